use std::collections::BTreeSet;
use std::fmt::Write as _;

use crate::durative::split::{split, SplitDurative};
use crate::ground::action::{ground, Role};
use crate::ground::{GroundError, PlanningInstance};
use crate::simple_sem::exec::{HappeningRecord, TimedAction};
use crate::simple_sem::failure::Failure;
use crate::simple_sem::mutex::describe_interference;
use crate::syntax::ast::PlanAst;
use crate::time::Time;

#[derive(Debug, Clone, PartialEq)]
pub struct DurativeStep {
    /// Position of the step in the plan text.
    pub index: usize,
    pub line: usize,
    pub start: Time,
    pub end: Time,
    pub split: SplitDurative,
}

/// The simple plan a temporal plan compiles to.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedPlan {
    /// Simple steps, end points and monitors, in plan order with the
    /// monitors last.
    pub actions: Vec<TimedAction>,
    /// The happening sequence of the original plan, end times included.
    pub times: Vec<Time>,
    pub durative: Vec<DurativeStep>,
}

impl InducedPlan {
    /// The happening times of the plan immediately around `t`.
    pub fn enclosing(&self, t: Time) -> (Time, Time) {
        let from = self.times.iter().rev().find(|x| **x < t).copied().unwrap_or(Time::ZERO);
        let to = self.times.iter().find(|x| **x > t).copied().unwrap_or(t);
        (from, to)
    }

    /// The induced plan sorted by time, one action per line.
    pub fn dump(&self) -> String {
        let mut sorted: Vec<&TimedAction> = self.actions.iter().collect();
        sorted.sort_by_key(|a| a.time);
        let mut out = String::new();
        for a in sorted {
            let _ = writeln!(out, "{}: {}", a.time, a.family.name);
        }
        out
    }
}

/// Compiles a plan: simple steps stay, each durative step contributes its
/// start at `t`, its end at `t + d` and a monitor midway between every pair
/// of consecutive happenings in `[t, t + d)`.
pub fn induce_simple_plan(instance: &PlanningInstance, plan: &PlanAst) -> Result<InducedPlan, GroundError> {
    let mut actions = Vec::new();
    let mut durative = Vec::new();
    let mut times = BTreeSet::new();
    for (index, step) in plan.steps.iter().enumerate() {
        times.insert(step.time);
        if let Some(schema) = instance.domain.action(&step.action) {
            actions.push(TimedAction {
                time: step.time,
                family: ground(schema, &step.args, instance, Role::Simple, None)?,
                line: Some(step.line),
            });
            continue;
        }
        let schema = instance
            .domain
            .durative_action(&step.action)
            .ok_or_else(|| GroundError::UnknownAction(step.action.clone()))?;
        let d = step
            .duration
            .ok_or_else(|| GroundError::Unsupported(format!("`{}` has no duration", step.action)))?;
        let end = step.time + d;
        times.insert(end);
        let split = split(schema, &step.args, d.to_f64(), index, instance)?;
        actions.push(TimedAction {
            time: step.time,
            family: split.start.clone(),
            line: Some(step.line),
        });
        actions.push(TimedAction {
            time: end,
            family: split.end.clone(),
            line: Some(step.line),
        });
        durative.push(DurativeStep {
            index,
            line: step.line,
            start: step.time,
            end,
            split,
        });
    }
    let times: Vec<Time> = times.into_iter().collect();
    for step in &durative {
        for pair in times.windows(2) {
            if step.start <= pair[0] && pair[0] < step.end {
                actions.push(TimedAction {
                    time: pair[0].midpoint(pair[1]),
                    family: step.split.inv.clone(),
                    line: Some(step.line),
                });
            }
        }
    }
    Ok(InducedPlan {
        actions,
        times,
        durative,
    })
}

/// Mutex actions at distinct happenings closer than `eps`. Monitors are not
/// considered.
pub fn check_separation(records: &[HappeningRecord], eps: f64, instance: &PlanningInstance) -> Vec<Failure> {
    let mut out = Vec::new();
    for (i, a) in records.iter().enumerate() {
        for b in &records[i + 1..] {
            if (b.time - a.time).to_f64() >= eps {
                break;
            }
            for (ca, ga) in a.activity.iter().filter(|(_, g)| g.name.role != Role::Monitor) {
                for (cb, gb) in b.activity.iter().filter(|(_, g)| g.name.role != Role::Monitor) {
                    if let Some(reason) = describe_interference(ga, gb, instance) {
                        out.push(Failure::Separation {
                            first: ca.clone(),
                            first_time: a.time,
                            second: cb.clone(),
                            second_time: b.time,
                            reason,
                        });
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_domain, parse_plan, parse_problem_for};

    const DOMAIN: &str = "(define (domain o) (:requirements :durative-actions)
      (:predicates (ok))
      (:durative-action long :parameters () :duration (= ?duration 10)
        :condition (over all (ok)) :effect (and))
      (:durative-action short :parameters () :duration (= ?duration 2)
        :condition (over all (ok)) :effect (and)))";

    fn induce(plan: &str) -> InducedPlan {
        let d = parse_domain(DOMAIN).unwrap();
        let p = parse_problem_for("(define (problem p) (:domain o) (:init (ok)) (:goal (and)))", &d).unwrap();
        let i = PlanningInstance::new(d, p).unwrap();
        induce_simple_plan(&i, &parse_plan(plan).unwrap()).unwrap()
    }

    fn monitors(p: &InducedPlan, schema: &str) -> Vec<Time> {
        p.actions
            .iter()
            .filter(|a| a.family.name.role == Role::Monitor && a.family.name.schema == schema)
            .map(|a| a.time)
            .collect()
    }

    #[test]
    fn overlapping_monitors() {
        let p = induce("1: (long) [10]\n4: (short) [2]");
        let t = |n: i128, d: i128| Time::new(n, d);
        assert_eq!(p.times, [t(1, 1), t(4, 1), t(6, 1), t(11, 1)]);
        assert_eq!(monitors(&p, "long"), [t(5, 2), t(5, 1), t(17, 2)]);
        assert_eq!(monitors(&p, "short"), [t(5, 1)]);
        assert_eq!(p.enclosing(t(5, 1)), (t(4, 1), t(6, 1)));
    }

    #[test]
    fn zero_duration_has_no_monitor() {
        let p = induce("1: (short) [0]");
        assert!(monitors(&p, "short").is_empty());
        assert_eq!(p.actions.len(), 2);
    }
}
