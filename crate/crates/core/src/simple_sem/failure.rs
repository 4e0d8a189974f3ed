use std::fmt;

use serde::Serialize;

use crate::simple_sem::mutex::Interference;
use crate::time::Time;

/// An action as named in diagnostics, with the plan line it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Culprit {
    pub action: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
}

impl fmt::Display for Culprit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.action)?;
        if let Some(l) = self.line {
            write!(f, " (plan line {l})")?;
        }
        Ok(())
    }
}

/// Why a plan is not valid.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Failure {
    NonPositiveTime {
        culprit: Culprit,
        time: Time,
    },
    Inapplicable {
        time: Time,
        culprit: Culprit,
        unsatisfied: Vec<String>,
    },
    /// The condition of a conditional effect could not be evaluated.
    UndefinedCondition {
        time: Time,
        culprit: Culprit,
    },
    InvalidAction {
        time: Time,
        culprit: Culprit,
        pne: String,
        double_assignment: bool,
    },
    Mutex {
        time: Time,
        first: Culprit,
        second: Culprit,
        reason: Interference,
    },
    Separation {
        first: Culprit,
        first_time: Time,
        second: Culprit,
        second_time: Time,
        reason: Interference,
    },
    /// Continuous change over an interval depends on an undefined value.
    UndefinedTrajectory {
        from: Time,
        to: Time,
        pne: String,
    },
    InvariantViolated {
        culprit: Culprit,
        from: Time,
        to: Time,
        condition: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        crossing: Option<f64>,
    },
    GoalUnsatisfied {
        unsatisfied: Vec<String>,
    },
    Unsupported {
        message: String,
    },
}

impl Failure {
    pub fn kind(&self) -> &'static str {
        match self {
            Failure::NonPositiveTime { .. } => "non-positive-time",
            Failure::Inapplicable { .. } => "inapplicable",
            Failure::UndefinedCondition { .. } => "undefined-condition",
            Failure::InvalidAction { .. } => "invalid-action",
            Failure::Mutex { .. } => "mutex",
            Failure::Separation { .. } => "separation",
            Failure::UndefinedTrajectory { .. } => "undefined-trajectory",
            Failure::InvariantViolated { .. } => "invariant-violated",
            Failure::GoalUnsatisfied { .. } => "goal-unsatisfied",
            Failure::Unsupported { .. } => "unsupported",
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::NonPositiveTime { culprit, time } => {
                write!(f, "{culprit} is scheduled at {time}; plan times must be greater than 0")
            }
            Failure::Inapplicable {
                time,
                culprit,
                unsatisfied,
            } => write!(f, "at {time}: {culprit} is not applicable, unsatisfied: {}", unsatisfied.join(" ")),
            Failure::UndefinedCondition { time, culprit } => {
                write!(f, "at {time}: a conditional effect of {culprit} has an undefined condition")
            }
            Failure::InvalidAction {
                time,
                culprit,
                pne,
                double_assignment,
            } => {
                let how = if *double_assignment {
                    "assigned twice"
                } else {
                    "updated by effects of different kinds"
                };
                write!(f, "at {time}: {culprit} is invalid, {pne} is {how}")
            }
            Failure::Mutex {
                time,
                first,
                second,
                reason,
            } => write!(f, "at {time}: {first} and {second} are mutex: {reason}"),
            Failure::Separation {
                first,
                first_time,
                second,
                second_time,
                reason,
            } => write!(
                f,
                "{first} at {first_time} and {second} at {second_time} are mutex and closer than the tolerance: {reason}"
            ),
            Failure::UndefinedTrajectory { from, to, pne } => {
                write!(f, "continuous change in ({from}, {to}) depends on undefined {pne}")
            }
            Failure::InvariantViolated {
                culprit,
                from,
                to,
                condition,
                crossing,
            } => {
                write!(f, "invariant {condition} of {culprit} fails in ({from}, {to})")?;
                if let Some(t) = crossing {
                    let t = format!("{t:.6}");
                    write!(f, ", first at t = {}", t.trim_end_matches('0').trim_end_matches('.'))?;
                }
                Ok(())
            }
            Failure::GoalUnsatisfied { unsatisfied } => {
                write!(f, "goal not satisfied: {}", unsatisfied.join(" "))
            }
            Failure::Unsupported { message } => write!(f, "unsupported: {message}"),
        }
    }
}
