//! Parser and plan validator for PDDL2.1 domains, problems and plans.
#![allow(clippy::result_large_err)]

pub mod cli;
pub mod continuous;
pub mod durative;
pub mod ground;
pub mod metric;
pub mod simple_sem;
pub mod syntax;
pub mod time;

pub use time::Time;
