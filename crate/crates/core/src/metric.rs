//! Plan metric evaluation on the final state.

use std::fmt;

use serde::Serialize;

use crate::ground::prop::apply_binop;
use crate::ground::{PlanningInstance, Pne};
use crate::simple_sem::state::State;
use crate::syntax::ast::{FExp, MetricSpec, Optimization, Term};
use crate::time::Time;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    /// `minimize` or `maximize`; absent when the problem has no metric.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expression: Option<String>,
    /// `None` when undefined or when there is no metric.
    pub value: Option<f64>,
    /// Final values of the PNEs the metric reads.
    pub used: Vec<(String, Option<f64>)>,
    pub total_time: f64,
    pub steps: usize,
}

impl fmt::Display for MetricReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.direction, self.value) {
            (None, _) => write!(f, "no metric; step count = {}", self.steps),
            (Some(d), Some(v)) => write!(f, "metric ({d}): {v}"),
            (Some(d), None) => write!(f, "metric ({d}): undefined"),
        }
    }
}

fn eval(e: &FExp, state: &State, instance: &PlanningInstance, total_time: f64, used: &mut Vec<(String, Option<f64>)>) -> Option<f64> {
    match e {
        FExp::Number(n) => Some(*n),
        FExp::TotalTime => Some(total_time),
        FExp::Head(h) => {
            let args: Option<Vec<_>> = h
                .args
                .iter()
                .map(|t| match t {
                    Term::Name(n) => Some(n.clone()),
                    Term::Var(_) => None,
                })
                .collect();
            let pne = Pne {
                function: h.function.clone(),
                args: args?,
            };
            let v = instance.index_of(&pne).and_then(|i| state.numeric[i]);
            used.push((pne.to_string(), v));
            v
        }
        FExp::Binary(op, a, b) => {
            let a = eval(a, state, instance, total_time, used);
            let b = eval(b, state, instance, total_time, used);
            apply_binop(*op, a?, b?)
        }
        FExp::Neg(a) => eval(a, state, instance, total_time, used).map(|v| -v),
        FExp::Duration | FExp::ElapsedTime => None,
    }
}

/// Evaluates `spec` on the final state of a plan whose last happening is at
/// `total_time` and which has `steps` steps.
pub fn evaluate_metric(
    spec: Option<&MetricSpec>,
    final_state: &State,
    instance: &PlanningInstance,
    total_time: Time,
    steps: usize,
) -> MetricReport {
    let total_time = total_time.to_f64();
    let Some(spec) = spec else {
        return MetricReport {
            direction: None,
            expression: None,
            value: None,
            used: Vec::new(),
            total_time,
            steps,
        };
    };
    let mut used = Vec::new();
    let value = eval(&spec.expression, final_state, instance, total_time, &mut used);
    used.sort_by(|a, b| a.0.cmp(&b.0));
    used.dedup();
    MetricReport {
        direction: Some(match spec.direction {
            Optimization::Minimize => "minimize",
            Optimization::Maximize => "maximize",
        }),
        expression: Some(spec.expression.to_string()),
        value,
        used,
        total_time,
        steps,
    }
}

/// The temporal span of a plan: its last happening time, or 0.
pub fn total_time(times: impl IntoIterator<Item = Time>) -> Time {
    times.into_iter().max().unwrap_or(Time::ZERO)
}
