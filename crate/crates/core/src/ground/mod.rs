//! Grounding: planning instances, ground propositions and ground actions.

pub mod action;
pub mod flatten;
pub mod instance;
pub mod prop;

pub use action::{
    check_valid, ground, ActionFamily, ActionName, AssignKind, AssignmentProposition, GroundAction, InvalidAction,
    Role,
};
pub use flatten::flatten;
pub use instance::{GroundAtom, PlanningInstance, Pne};
pub use prop::{NExpr, Prop};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GroundError {
    #[error("type `{0}` is its own ancestor")]
    CyclicTypes(String),
    #[error("object `{0}` is declared twice")]
    DuplicateObject(String),
    #[error("`{0}` is not well typed")]
    IllTyped(String),
    #[error("`{0}` is not a primitive numeric expression of this instance")]
    UnknownPne(String),
    #[error("unbound variable `{0}`")]
    NotGround(String),
    #[error("`{action}` takes {expected} arguments, found {found}")]
    Arity {
        action: String,
        expected: usize,
        found: usize,
    },
    #[error("`{argument}` cannot instantiate parameter ?{parameter} of `{action}`")]
    ArgumentType {
        action: String,
        argument: String,
        parameter: String,
    },
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}
