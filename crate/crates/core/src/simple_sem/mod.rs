//! Execution and validation of simple plans.

pub mod exec;
pub mod failure;
pub mod mutex;
pub mod state;

pub use exec::{
    check_goal, execute_happening, execute_plan, execute_simple_plan, ground_goal, ground_simple_plan, happenings,
    no_flow, validate_simple_plan, Execution, HappeningRecord, TimedAction, Trace, Verdict,
};
pub use failure::{Culprit, Failure};
pub use mutex::{interference, mutex, Interference};
pub use state::{apply_all_updates, apply_updates, satisfies, State};
