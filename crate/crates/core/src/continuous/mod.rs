//! Plans whose durative actions change numeric values continuously.

pub mod poly;
pub mod solve;

pub use poly::Poly;
pub use solve::{first_violation, state_at, trajectories, SolveError, Trajectories};

use crate::durative::{induce_simple_plan, run_induced, DurativeStep, InducedPlan};
use crate::ground::{GroundError, PlanningInstance, Role};
use crate::simple_sem::exec::{Trace, Verdict};
use crate::simple_sem::failure::{Culprit, Failure};
use crate::simple_sem::state::{failing_conjuncts, State};
use crate::syntax::ast::PlanAst;
use crate::time::Time;

/// The solved continuous change between two consecutive happenings.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub from: Time,
    pub to: Time,
    pub trajectories: Trajectories,
}

impl Segment {
    /// `n` evenly spaced samples of every changing slot, both ends included,
    /// as `(absolute time, slot, value)`.
    pub fn samples(&self, n: usize) -> Vec<(f64, usize, f64)> {
        let a = self.from.to_f64();
        let dt = (self.to - self.from).to_f64();
        let taus: Vec<f64> = match n {
            0 => Vec::new(),
            1 => vec![dt / 2.0],
            _ => (0..n).map(|k| dt * k as f64 / (n - 1) as f64).collect(),
        };
        let mut out = Vec::new();
        for tau in taus {
            for (&slot, p) in &self.trajectories {
                out.push((a + tau, slot, p.eval(tau)));
            }
        }
        out
    }
}

fn culprit(step: &DurativeStep) -> Culprit {
    let mut name = step.split.start.name.clone();
    name.role = Role::Simple;
    Culprit {
        action: name.to_string(),
        line: Some(step.line),
    }
}

fn active(step: &DurativeStep, from: Time, to: Time) -> bool {
    step.start <= from && to <= step.end
}

/// Integrates the interval `(state.time, next)` and checks the invariants of
/// every durative step spanning it.
fn flow_interval(
    instance: &PlanningInstance,
    induced: &InducedPlan,
    eps: f64,
    state: &State,
    next: Time,
) -> Result<(State, Option<Segment>), Failure> {
    let from = state.time;
    let spanning: Vec<&DurativeStep> = induced.durative.iter().filter(|d| active(d, from, next)).collect();
    let effects: Vec<_> = spanning.iter().flat_map(|d| d.split.continuous.iter()).collect();
    if effects.is_empty() {
        return Ok((
            State {
                time: next,
                ..state.clone()
            },
            None,
        ));
    }
    let unsupported = |message| Failure::Unsupported { message };
    let undefined = |slot: usize| Failure::UndefinedTrajectory {
        from,
        to: next,
        pne: instance.pnes[slot].to_string(),
    };
    let lift = |e: SolveError| match e {
        SolveError::Undefined(slot) => undefined(slot),
        SolveError::Unsupported(m) => unsupported(m),
    };
    let traj = trajectories(&effects, &state.numeric).map_err(lift)?;
    let dt = (next - from).to_f64();
    for step in &spanning {
        let tau = first_violation(&step.split.invariant, &state.logical, &state.numeric, &traj, dt, eps).map_err(lift)?;
        if let Some(tau) = tau {
            // Report what fails just after the critical point.
            let probe = State {
                time: from,
                logical: state.logical.clone(),
                numeric: state_at(&state.numeric, &traj, tau + (dt - tau).min(eps) / 2.0),
            };
            let mut condition = failing_conjuncts(&probe, &step.split.invariant, eps, instance);
            if condition.is_empty() {
                condition.push(step.split.invariant.denormalize(instance).to_string());
            }
            return Err(Failure::InvariantViolated {
                culprit: culprit(step),
                from,
                to: next,
                condition: condition.join(" "),
                crossing: Some(from.to_f64() + tau),
            });
        }
    }
    let after = State {
        time: next,
        logical: state.logical.clone(),
        numeric: state_at(&state.numeric, &traj, dt),
    };
    Ok((
        after,
        Some(Segment {
            from,
            to: next,
            trajectories: traj,
        }),
    ))
}

/// The outcome of validating a plan with continuous effects.
#[derive(Debug, Clone)]
pub struct ContinuousRun {
    pub verdict: Verdict,
    pub trace: Trace,
    pub induced: InducedPlan,
    pub segments: Vec<Segment>,
}

/// Validates a temporal plan, discrete or continuous. Continuous change the
/// solver cannot handle is reported as [`GroundError::Unsupported`].
pub fn validate_continuous_plan(
    instance: &PlanningInstance,
    plan: &PlanAst,
    eps: f64,
) -> Result<ContinuousRun, GroundError> {
    let induced = induce_simple_plan(instance, plan)?;
    let mut segments = Vec::new();
    let (verdict, trace) = {
        let mut flow = |state: &State, next: Time| {
            let (after, segment) = flow_interval(instance, &induced, eps, state, next)?;
            segments.extend(segment);
            Ok(after)
        };
        run_induced(instance, &induced, eps, &mut flow)?
    };
    if let Some(Failure::Unsupported { message }) = &verdict.failure {
        return Err(GroundError::Unsupported(message.clone()));
    }
    Ok(ContinuousRun {
        verdict,
        trace,
        induced,
        segments,
    })
}
