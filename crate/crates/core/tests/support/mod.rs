#![allow(dead_code)]

pub mod euler;
pub mod micro;

use std::path::PathBuf;

use pddl21::continuous::validate_continuous_plan;
use pddl21::ground::PlanningInstance;
use pddl21::simple_sem::{ground_simple_plan, validate_simple_plan, Trace, Verdict};
use pddl21::syntax::{parse_domain, parse_plan, parse_problem_for, PlanAst};

pub const EPS: f64 = 0.001;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

pub fn instance(domain: &str, problem: &str) -> PlanningInstance {
    let d = parse_domain(&read(domain)).unwrap_or_else(|e| panic!("{domain}: {e}"));
    let p = parse_problem_for(&read(problem), &d).unwrap_or_else(|e| panic!("{problem}: {e}"));
    PlanningInstance::new(d, p).unwrap()
}

pub fn plan(name: &str) -> PlanAst {
    parse_plan(&read(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Validates with the simple semantics when the plan has no durative steps
/// and with the temporal semantics otherwise.
pub fn validate(instance: &PlanningInstance, plan: &PlanAst, eps: f64) -> (Verdict, Trace) {
    let temporal = plan.steps.iter().any(|s| s.duration.is_some());
    if temporal {
        let run = validate_continuous_plan(instance, plan, eps).unwrap();
        (run.verdict, run.trace)
    } else {
        let actions = ground_simple_plan(instance, plan).unwrap();
        validate_simple_plan(instance, &actions, eps).unwrap()
    }
}

/// Loads `<stem>-domain.pddl` and `<stem>-problem.pddl` and validates
/// `plan_file` against them.
pub fn run_fixture(stem: &str, plan_file: &str, eps: f64) -> (PlanningInstance, Verdict, Trace) {
    let i = instance(&format!("{stem}-domain.pddl"), &format!("{stem}-problem.pddl"));
    let (v, t) = validate(&i, &plan(plan_file), eps);
    (i, v, t)
}

pub fn value(instance: &PlanningInstance, numeric: &[Option<f64>], pne: &str) -> Option<f64> {
    let i = instance.pnes.iter().position(|p| p.to_string() == pne).unwrap_or_else(|| panic!("no {pne}"));
    numeric[i]
}
