//! The `validate` command: parse a domain and problem once, then validate
//! each plan against them and report.

use std::collections::BTreeSet;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use serde::Serialize;

use crate::continuous::{validate_continuous_plan, Segment};
use crate::durative::{validate_plan, InducedPlan};
use crate::ground::{GroundError, PlanningInstance};
use crate::metric::{evaluate_metric, total_time, MetricReport};
use crate::simple_sem::exec::{ground_simple_plan, validate_simple_plan, TimedAction, Trace, Verdict};
use crate::simple_sem::failure::Failure;
use crate::syntax::{
    check_plan, check_problem_requirements, check_requirements, parse_domain, parse_plan, parse_problem_for,
    Diagnostic, PlanAst,
};
use crate::time::Time;

pub const EXIT_VALID: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    JsonLines,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(e) if e > 0.0 && e.is_finite() => Ok(e),
        _ => Err(format!("`{s}` is not a positive number")),
    }
}

/// Validates PDDL2.1 plans.
#[derive(Debug, Clone, Parser)]
#[command(name = "validate", version)]
pub struct RunConfig {
    /// Tolerance for numeric comparisons and separation of mutex end points.
    #[arg(long, default_value_t = 0.001, value_parser = positive)]
    pub epsilon: f64,
    /// Print the ground actions of each plan.
    #[arg(long)]
    pub dump_ground: bool,
    /// Print the induced simple plan of each plan.
    #[arg(long)]
    pub dump_induced: bool,
    /// Print the state after every happening.
    #[arg(long)]
    pub trace: bool,
    /// Print N samples of each continuously changing value per interval.
    #[arg(long, value_name = "N")]
    pub trace_samples: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    pub domain: PathBuf,
    pub problem: PathBuf,
    #[arg(required = true)]
    pub plans: Vec<PathBuf>,
}

impl RunConfig {
    pub fn new(domain: impl Into<PathBuf>, problem: impl Into<PathBuf>, plans: Vec<PathBuf>) -> RunConfig {
        RunConfig {
            epsilon: 0.001,
            dump_ground: false,
            dump_induced: false,
            trace: false,
            trace_samples: None,
            format: Format::Human,
            domain: domain.into(),
            problem: problem.into(),
            plans,
        }
    }
}

/// One output record. The json-lines format writes each as an object with
/// a `record` tag.
#[derive(Debug, Serialize)]
#[serde(tag = "record", rename_all = "kebab-case")]
pub enum Record<'a> {
    Error {
        file: String,
        message: String,
    },
    Requirement {
        file: String,
        #[serde(flatten)]
        diagnostic: &'a Diagnostic,
    },
    Ground {
        plan: String,
        action: String,
        components: String,
    },
    Induced {
        plan: String,
        time: Time,
        action: String,
    },
    State {
        plan: String,
        time: Time,
        atoms: Vec<String>,
        values: Vec<(String, Option<f64>)>,
    },
    Sample {
        plan: String,
        time: f64,
        pne: String,
        value: f64,
    },
    Verdict {
        plan: String,
        method: &'static str,
        valid: bool,
        #[serde(skip_serializing_if = "Option::is_none")]
        failure: Option<&'a Failure>,
    },
    Metric {
        plan: String,
        #[serde(flatten)]
        report: &'a MetricReport,
    },
}

fn human(r: &Record<'_>) -> String {
    match r {
        Record::Error { file, message } => format!("{file}: error: {message}"),
        Record::Requirement { file, diagnostic } => format!("{file}: warning: {diagnostic}"),
        Record::Ground { components, .. } => components.trim_end().to_string(),
        Record::Induced { time, action, .. } => format!("  {time}: {action}"),
        Record::State {
            time, atoms, values, ..
        } => {
            let values: Vec<String> = values
                .iter()
                .map(|(n, v)| match v {
                    Some(v) => format!("{n}={v}"),
                    None => format!("{n}=undefined"),
                })
                .collect();
            format!("  state at {time}: {} | {}", atoms.join(" "), values.join(" "))
        }
        Record::Sample { time, pne, value, .. } => format!("  sample t={time}: {pne}={value}"),
        Record::Verdict { plan, valid, failure, .. } => match failure {
            Some(f) if !valid => format!("{plan}: invalid: {f}"),
            _ => format!("{plan}: valid"),
        },
        Record::Metric { plan, report } => format!("{plan}: {report}"),
    }
}

struct Reporter<'w> {
    out: &'w mut dyn Write,
    format: Format,
}

impl Reporter<'_> {
    fn emit(&mut self, r: Record<'_>) -> io::Result<()> {
        let line = match self.format {
            Format::Human => human(&r),
            Format::JsonLines => serde_json::to_string(&r).expect("records serialize"),
        };
        writeln!(self.out, "{line}")
    }

    fn error(&mut self, file: &str, message: impl ToString) -> io::Result<i32> {
        self.emit(Record::Error {
            file: file.to_string(),
            message: message.to_string(),
        })?;
        Ok(EXIT_ERROR)
    }
}

/// Everything a plan's validation produced.
struct Outcome {
    method: &'static str,
    verdict: Verdict,
    trace: Trace,
    actions: Vec<TimedAction>,
    times: Vec<Time>,
    segments: Vec<Segment>,
}

fn validate(instance: &PlanningInstance, plan: &PlanAst, eps: f64) -> Result<Outcome, GroundError> {
    let durative: Vec<_> = plan
        .steps
        .iter()
        .filter_map(|s| instance.domain.durative_action(&s.action))
        .collect();
    if durative.is_empty() {
        let actions = ground_simple_plan(instance, plan)?;
        let (verdict, trace) = validate_simple_plan(instance, &actions, eps)?;
        let times = plan.steps.iter().map(|s| s.time).collect();
        return Ok(Outcome {
            method: "simple",
            verdict,
            trace,
            actions,
            times,
            segments: Vec::new(),
        });
    }
    let from_induced = |method, verdict, trace, induced: InducedPlan, segments| Outcome {
        method,
        verdict,
        trace,
        actions: induced.actions,
        times: induced.times,
        segments,
    };
    if durative.iter().any(|d| d.has_continuous_effects()) {
        let run = validate_continuous_plan(instance, plan, eps)?;
        Ok(from_induced("continuous", run.verdict, run.trace, run.induced, run.segments))
    } else {
        let (verdict, trace, induced) = validate_plan(instance, plan, eps)?;
        Ok(from_induced("durative", verdict, trace, induced, Vec::new()))
    }
}

fn report_plan(
    rep: &mut Reporter<'_>,
    config: &RunConfig,
    instance: &PlanningInstance,
    path: &str,
) -> io::Result<i32> {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return rep.error(path, e),
    };
    let plan = match parse_plan(&text).and_then(|p| check_plan(&p, &instance.domain).map(|_| p)) {
        Ok(p) => p,
        Err(e) => return rep.error(path, format!("{path}:{e}")),
    };
    let outcome = match validate(instance, &plan, config.epsilon) {
        Ok(o) => o,
        Err(e) => return rep.error(path, e),
    };
    let name = || path.to_string();
    if config.dump_ground {
        let mut seen = BTreeSet::new();
        for a in &outcome.actions {
            if !seen.insert(a.family.name.clone()) {
                continue;
            }
            for g in a.family.siblings() {
                rep.emit(Record::Ground {
                    plan: name(),
                    action: g.name.to_string(),
                    components: g.dump(),
                })?;
            }
        }
    }
    if config.dump_induced {
        let mut sorted: Vec<&TimedAction> = outcome.actions.iter().collect();
        sorted.sort_by_key(|a| a.time);
        for a in sorted {
            rep.emit(Record::Induced {
                plan: name(),
                time: a.time,
                action: a.family.name.to_string(),
            })?;
        }
    }
    if config.trace {
        for s in &outcome.trace.states {
            rep.emit(Record::State {
                plan: name(),
                time: s.time,
                atoms: s.visible_atoms().map(|a| a.to_string()).collect(),
                values: instance.pnes.iter().map(|p| p.to_string()).zip(s.numeric.iter().copied()).collect(),
            })?;
        }
    }
    if let Some(n) = config.trace_samples {
        for seg in &outcome.segments {
            for (time, slot, value) in seg.samples(n) {
                rep.emit(Record::Sample {
                    plan: name(),
                    time,
                    pne: instance.pnes[slot].to_string(),
                    value,
                })?;
            }
        }
    }
    rep.emit(Record::Verdict {
        plan: name(),
        method: outcome.method,
        valid: outcome.verdict.valid,
        failure: outcome.verdict.failure.as_ref(),
    })?;
    let metric = evaluate_metric(
        instance.problem.metric.as_ref(),
        outcome.trace.final_state(),
        instance,
        total_time(outcome.times.iter().copied()),
        plan.steps.len(),
    );
    rep.emit(Record::Metric {
        plan: name(),
        report: &metric,
    })?;
    Ok(if outcome.verdict.valid { EXIT_VALID } else { EXIT_INVALID })
}

/// Runs the validator and returns the exit status: 0 if every plan is
/// valid, 1 if some plan is invalid, 2 on any parse, usage or grounding
/// error.
pub fn run(config: &RunConfig, out: &mut dyn Write) -> io::Result<i32> {
    let mut rep = Reporter {
        out,
        format: config.format,
    };
    let domain_path = config.domain.display().to_string();
    let problem_path = config.problem.display().to_string();
    let domain = match fs::read_to_string(&config.domain) {
        Ok(t) => match parse_domain(&t) {
            Ok(d) => d,
            Err(e) => return rep.error(&domain_path, format!("{domain_path}:{e}")),
        },
        Err(e) => return rep.error(&domain_path, e),
    };
    let problem = match fs::read_to_string(&config.problem) {
        Ok(t) => match parse_problem_for(&t, &domain) {
            Ok(p) => p,
            Err(e) => return rep.error(&problem_path, format!("{problem_path}:{e}")),
        },
        Err(e) => return rep.error(&problem_path, e),
    };
    for d in check_requirements(&domain) {
        rep.emit(Record::Requirement {
            file: domain_path.clone(),
            diagnostic: &d,
        })?;
    }
    for d in check_problem_requirements(&domain, &problem) {
        rep.emit(Record::Requirement {
            file: problem_path.clone(),
            diagnostic: &d,
        })?;
    }
    let instance = match PlanningInstance::new(domain, problem) {
        Ok(i) => i,
        Err(e) => return rep.error(&problem_path, e),
    };
    let mut status = EXIT_VALID;
    for plan in &config.plans {
        let s = report_plan(&mut rep, config, &instance, &plan.display().to_string())?;
        status = status.max(s);
    }
    Ok(status)
}
