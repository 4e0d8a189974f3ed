use thiserror::Error;

use crate::syntax::sexpr::Pos;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("{pos}: lexical error: {message}")]
    Lexical { pos: Pos, message: String },
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Pos, message: String },
    #[error("{pos}: duplicate declaration of {kind} `{name}`")]
    Duplicate { pos: Pos, kind: &'static str, name: String },
    #[error("{pos}: unknown {kind} `{name}`")]
    Unknown { pos: Pos, kind: &'static str, name: String },
    #[error("{pos}: {kind} `{name}` expects {expected} argument(s), found {found}")]
    Arity {
        pos: Pos,
        kind: &'static str,
        name: String,
        expected: usize,
        found: usize,
    },
}

impl ParseError {
    pub fn pos(&self) -> Pos {
        match self {
            ParseError::Lexical { pos, .. }
            | ParseError::Syntax { pos, .. }
            | ParseError::Duplicate { pos, .. }
            | ParseError::Unknown { pos, .. }
            | ParseError::Arity { pos, .. } => *pos,
        }
    }

    pub(crate) fn syntax(pos: Pos, message: impl Into<String>) -> ParseError {
        ParseError::Syntax {
            pos,
            message: message.into(),
        }
    }
}
