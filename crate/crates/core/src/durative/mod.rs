//! Plans with durative actions: compilation to simple plans and validation.

pub mod induce;
pub mod split;

pub use induce::{check_separation, induce_simple_plan, DurativeStep, InducedPlan};
pub use split::{split, ContinuousEffect, SplitDurative};

use crate::ground::{GroundError, PlanningInstance, Role};
use crate::simple_sem::exec::{check_goal, execute_plan, ground_goal, no_flow, Flow, Trace, Verdict};
use crate::simple_sem::failure::Failure;
use crate::syntax::ast::PlanAst;

/// Reports a failed monitor as a violated invariant over the enclosing
/// pair of happenings.
fn as_invariant_failure(failure: Failure, induced: &InducedPlan) -> Failure {
    match failure {
        Failure::Inapplicable {
            time,
            culprit,
            unsatisfied,
        } if induced
            .actions
            .iter()
            .any(|a| a.time == time && a.family.name.role == Role::Monitor && a.culprit() == culprit) =>
        {
            let (from, to) = induced.enclosing(time);
            Failure::InvariantViolated {
                culprit,
                from,
                to,
                condition: unsatisfied.join(" "),
                crossing: None,
            }
        }
        f => f,
    }
}

/// Executes an induced plan with the given flow between happenings, then
/// checks separation and the goal.
pub fn run_induced(
    instance: &PlanningInstance,
    induced: &InducedPlan,
    eps: f64,
    flow: &mut Flow<'_>,
) -> Result<(Verdict, Trace), GroundError> {
    let goal = ground_goal(instance)?;
    let exec = execute_plan(instance, &induced.actions, eps, flow);
    let failure = exec
        .failure
        .map(|f| as_invariant_failure(f, induced))
        .or_else(|| check_separation(&exec.trace.happenings, eps, instance).into_iter().next())
        .or_else(|| check_goal(exec.trace.final_state(), &goal, eps, instance));
    Ok((Verdict::from_failure(failure), exec.trace))
}

/// Validates a plan whose durative actions have only discrete effects.
pub fn validate_plan(
    instance: &PlanningInstance,
    plan: &PlanAst,
    eps: f64,
) -> Result<(Verdict, Trace, InducedPlan), GroundError> {
    let induced = induce_simple_plan(instance, plan)?;
    if induced.durative.iter().any(|d| !d.split.continuous.is_empty()) {
        return Err(GroundError::Unsupported(
            "continuous effects need the continuous validator".into(),
        ));
    }
    let (verdict, trace) = run_induced(instance, &induced, eps, &mut no_flow)?;
    Ok((verdict, trace, induced))
}
