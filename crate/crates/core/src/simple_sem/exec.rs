use std::collections::BTreeSet;

use serde::Serialize;

use crate::ground::action::{check_valid, ground, ActionFamily, Bindings, Role};
use crate::ground::flatten::{expand_goal, rewrite_imply};
use crate::ground::{GroundAction, GroundError, PlanningInstance, Prop};
use crate::simple_sem::failure::{Culprit, Failure};
use crate::simple_sem::mutex::describe_interference;
use crate::simple_sem::state::{apply_all_updates, failing_conjuncts, satisfies, State};
use crate::syntax::ast::PlanAst;
use crate::time::Time;

/// One entry of a simple plan: a ground action family at a time.
#[derive(Debug, Clone, PartialEq)]
pub struct TimedAction {
    pub time: Time,
    pub family: ActionFamily,
    /// Source line of the plan step this action comes from.
    pub line: Option<usize>,
}

impl TimedAction {
    pub fn culprit(&self) -> Culprit {
        Culprit {
            action: self.family.name.to_string(),
            line: self.line,
        }
    }
}

/// One executed happening: the state just before it and the actions that
/// fired.
#[derive(Debug, Clone, PartialEq)]
pub struct HappeningRecord {
    pub time: Time,
    pub activity: Vec<(Culprit, GroundAction)>,
    pub before: State,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    /// `states[0]` is the initial state; `states[i + 1]` follows
    /// `happenings[i]`.
    pub states: Vec<State>,
    pub happenings: Vec<HappeningRecord>,
}

impl Trace {
    pub fn final_state(&self) -> &State {
        self.states.last().expect("trace holds the initial state")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub trace: Trace,
    pub failure: Option<Failure>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Verdict {
    pub valid: bool,
    pub failure: Option<Failure>,
}

impl Verdict {
    pub fn from_failure(failure: Option<Failure>) -> Verdict {
        Verdict {
            valid: failure.is_none(),
            failure,
        }
    }
}

/// Groups a simple plan into happenings by exact time, in time order. Plan
/// order is kept inside a happening.
pub fn happenings(plan: &[TimedAction]) -> Vec<(Time, Vec<&TimedAction>)> {
    let mut sorted: Vec<&TimedAction> = plan.iter().collect();
    sorted.sort_by_key(|a| a.time);
    let mut out: Vec<(Time, Vec<&TimedAction>)> = Vec::new();
    for a in sorted {
        match out.last_mut() {
            Some((t, group)) if *t == a.time => group.push(a),
            _ => out.push((a.time, vec![a])),
        }
    }
    out
}

/// Executes one happening. Every named action must resolve to a valid,
/// applicable sibling, and no two of them may be mutex; a name occurring
/// twice is checked against itself.
pub fn execute_happening(
    state: &State,
    time: Time,
    items: &[&TimedAction],
    eps: f64,
    instance: &PlanningInstance,
) -> Result<(State, Vec<(Culprit, GroundAction)>), Failure> {
    let mut activity = Vec::with_capacity(items.len());
    for item in items {
        let culprit = item.culprit();
        let Some(action) = item.family.select(&state.logical, &state.numeric, eps) else {
            return Err(Failure::UndefinedCondition { time, culprit });
        };
        if let Err(e) = check_valid(&action) {
            return Err(Failure::InvalidAction {
                time,
                culprit,
                pne: instance.pnes[e.lvalue].to_string(),
                double_assignment: e.double_assignment,
            });
        }
        if !satisfies(state, &action.pre, eps) {
            return Err(Failure::Inapplicable {
                time,
                culprit,
                unsatisfied: failing_conjuncts(state, &action.pre, eps, instance),
            });
        }
        activity.push((culprit, action));
    }
    for i in 0..activity.len() {
        for j in i + 1..activity.len() {
            if let Some(reason) = describe_interference(&activity[i].1, &activity[j].1, instance) {
                return Err(Failure::Mutex {
                    time,
                    first: activity[i].0.clone(),
                    second: activity[j].0.clone(),
                    reason,
                });
            }
        }
    }
    let mut deleted = BTreeSet::new();
    let mut added = BTreeSet::new();
    for (_, a) in &activity {
        deleted.extend(a.del.iter().cloned());
        added.extend(a.add.iter().cloned());
    }
    let mut logical: BTreeSet<_> = state.logical.difference(&deleted).cloned().collect();
    logical.extend(added);
    let numeric = apply_all_updates(activity.iter().map(|(_, a)| a), &state.numeric);
    Ok((
        State {
            time,
            logical,
            numeric,
        },
        activity,
    ))
}

/// Computes the state just before a happening at `next`, given the state
/// after the previous one. Simple plans use [`no_flow`].
pub type Flow<'a> = dyn FnMut(&State, Time) -> Result<State, Failure> + 'a;

/// Nothing changes between happenings.
pub fn no_flow(state: &State, next: Time) -> Result<State, Failure> {
    Ok(State {
        time: next,
        ..state.clone()
    })
}

/// Folds the happenings of `plan` from the initial state. On failure the
/// trace holds every state reached before it.
pub fn execute_plan(instance: &PlanningInstance, plan: &[TimedAction], eps: f64, flow: &mut Flow<'_>) -> Execution {
    let mut trace = Trace {
        states: vec![State::initial(instance)],
        happenings: Vec::new(),
    };
    for a in plan {
        if !a.time.is_positive() {
            return Execution {
                trace,
                failure: Some(Failure::NonPositiveTime {
                    culprit: a.culprit(),
                    time: a.time,
                }),
            };
        }
    }
    for (time, items) in happenings(plan) {
        let before = match flow(trace.final_state(), time) {
            Ok(s) => s,
            Err(f) => {
                return Execution {
                    trace,
                    failure: Some(f),
                }
            }
        };
        match execute_happening(&before, time, &items, eps, instance) {
            Ok((after, activity)) => {
                trace.happenings.push(HappeningRecord { time, activity, before });
                trace.states.push(after);
            }
            Err(f) => {
                return Execution {
                    trace,
                    failure: Some(f),
                }
            }
        }
    }
    Execution { trace, failure: None }
}

/// Executes a simple plan without the goal check.
pub fn execute_simple_plan(instance: &PlanningInstance, plan: &[TimedAction], eps: f64) -> Execution {
    execute_plan(instance, plan, eps, &mut no_flow)
}

pub fn ground_goal(instance: &PlanningInstance) -> Result<Prop, GroundError> {
    let goal = expand_goal(&rewrite_imply(&instance.problem.goal), instance);
    Bindings::new(&[], &[], None).goal(&goal)?.normalize(instance)
}

pub fn check_goal(state: &State, goal: &Prop, eps: f64, instance: &PlanningInstance) -> Option<Failure> {
    (!satisfies(state, goal, eps)).then(|| Failure::GoalUnsatisfied {
        unsatisfied: failing_conjuncts(state, goal, eps, instance),
    })
}

/// Grounds the steps of a plan made of simple actions only.
pub fn ground_simple_plan(instance: &PlanningInstance, plan: &PlanAst) -> Result<Vec<TimedAction>, GroundError> {
    plan.steps
        .iter()
        .map(|step| {
            let schema = instance
                .domain
                .action(&step.action)
                .ok_or_else(|| GroundError::UnknownAction(step.action.clone()))?;
            Ok(TimedAction {
                time: step.time,
                family: ground(schema, &step.args, instance, Role::Simple, None)?,
                line: Some(step.line),
            })
        })
        .collect()
}

/// Executes a simple plan and checks the goal in the final state.
pub fn validate_simple_plan(instance: &PlanningInstance, plan: &[TimedAction], eps: f64) -> Result<(Verdict, Trace), GroundError> {
    let goal = ground_goal(instance)?;
    let exec = execute_simple_plan(instance, plan, eps);
    let failure = exec
        .failure
        .or_else(|| check_goal(exec.trace.final_state(), &goal, eps, instance));
    Ok((Verdict::from_failure(failure), exec.trace))
}
