//! Readers for domain, problem and plan files.

pub mod ast;
pub mod domain;
pub mod error;
mod expr;
pub mod plan;
mod print;
pub mod problem;
pub mod requirements;
pub mod sexpr;

pub use ast::*;
pub use domain::parse_domain;
pub use error::ParseError;
pub use plan::{check_plan, parse_plan};
pub use problem::{parse_problem, parse_problem_for};
pub use requirements::{check_problem_requirements, check_requirements, Diagnostic, Requirement};
