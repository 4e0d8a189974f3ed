//! Tokenizer and s-expression reader shared by the domain and problem parsers.

use std::fmt;

use crate::syntax::error::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Atom {
    /// Lowercased name or operator symbol (`drive`, `>=`, `-`, `#t`).
    Symbol(String),
    /// `?name`, stored lowercased without the `?`.
    Variable(String),
    /// `:name`, stored lowercased without the `:`.
    Keyword(String),
    Number(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum SExpr {
    Atom(Atom, Pos),
    List(Vec<SExpr>, Pos),
}

impl SExpr {
    pub fn pos(&self) -> Pos {
        match self {
            SExpr::Atom(_, p) | SExpr::List(_, p) => *p,
        }
    }

    pub fn as_list(&self) -> Option<&[SExpr]> {
        match self {
            SExpr::List(items, _) => Some(items),
            SExpr::Atom(..) => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            SExpr::Atom(Atom::Symbol(s), _) => Some(s),
            _ => None,
        }
    }

    pub fn as_keyword(&self) -> Option<&str> {
        match self {
            SExpr::Atom(Atom::Keyword(s), _) => Some(s),
            _ => None,
        }
    }

    pub fn as_variable(&self) -> Option<&str> {
        match self {
            SExpr::Atom(Atom::Variable(s), _) => Some(s),
            _ => None,
        }
    }

    pub fn as_number(&self) -> Option<f64> {
        match self {
            SExpr::Atom(Atom::Number(n), _) => Some(*n),
            _ => None,
        }
    }

    /// The leading symbol of a list, e.g. `and` for `(and ...)`.
    pub fn head_symbol(&self) -> Option<&str> {
        self.as_list()?.first()?.as_symbol()
    }

    /// Short rendering used in error messages.
    pub fn describe(&self) -> String {
        match self {
            SExpr::Atom(Atom::Symbol(s), _) => format!("`{s}`"),
            SExpr::Atom(Atom::Variable(s), _) => format!("`?{s}`"),
            SExpr::Atom(Atom::Keyword(s), _) => format!("`:{s}`"),
            SExpr::Atom(Atom::Number(n), _) => format!("`{n}`"),
            SExpr::List(items, _) => match items.first() {
                Some(first) => format!("list starting with {}", first.describe()),
                None => "`()`".to_string(),
            },
        }
    }
}

fn is_symbol_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '+' | '*' | '/' | '<' | '>' | '=' | '#' | '.')
}

fn is_number(text: &str) -> bool {
    let body = text.strip_prefix('-').unwrap_or(text);
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (body, None),
    };
    let digits = |s: &str| s.chars().all(|c| c.is_ascii_digit());
    match frac_part {
        None => !int_part.is_empty() && digits(int_part),
        Some(f) => (!int_part.is_empty() || !f.is_empty()) && digits(int_part) && digits(f),
    }
}

fn is_name(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => chars.all(|c| c.is_ascii_alphanumeric() || c == '-' || c == '_'),
        _ => false,
    }
}

const OPERATORS: &[&str] = &["+", "-", "*", "/", "<", ">", "=", "<=", ">=", "#t"];

fn classify(raw: &str, pos: Pos) -> Result<Atom, ParseError> {
    let text = raw.to_ascii_lowercase();
    let lexical = |message: String| ParseError::Lexical { pos, message };
    if let Some(rest) = text.strip_prefix('?') {
        if is_name(rest) {
            return Ok(Atom::Variable(rest.to_string()));
        }
        return Err(lexical(format!("malformed variable `{raw}`")));
    }
    if let Some(rest) = text.strip_prefix(':') {
        if is_name(rest) {
            return Ok(Atom::Keyword(rest.to_string()));
        }
        return Err(lexical(format!("malformed keyword `{raw}`")));
    }
    if is_number(&text) {
        return text
            .parse::<f64>()
            .map(Atom::Number)
            .map_err(|_| lexical(format!("malformed number `{raw}`")));
    }
    if is_name(&text) || OPERATORS.contains(&text.as_str()) {
        return Ok(Atom::Symbol(text));
    }
    Err(lexical(format!("unexpected token `{raw}`")))
}

/// Reads every top-level s-expression of `text`. `;` starts a comment that
/// runs to the end of the line.
pub fn read_all(text: &str) -> Result<Vec<SExpr>, ParseError> {
    let mut stack: Vec<(Vec<SExpr>, Pos)> = Vec::new();
    let mut top = Vec::new();
    let mut line = 1;
    let mut col = 0;
    let mut chars = text.chars().peekable();
    let mut token = String::new();
    let mut token_pos = Pos::default();

    fn push(stack: &mut [(Vec<SExpr>, Pos)], top: &mut Vec<SExpr>, e: SExpr) {
        match stack.last_mut() {
            Some((items, _)) => items.push(e),
            None => top.push(e),
        }
    }

    let flush = |token: &mut String, token_pos: Pos, stack: &mut Vec<(Vec<SExpr>, Pos)>, top: &mut Vec<SExpr>| {
        if token.is_empty() {
            return Ok(());
        }
        let atom = classify(token, token_pos)?;
        token.clear();
        push(stack, top, SExpr::Atom(atom, token_pos));
        Ok::<(), ParseError>(())
    };

    while let Some(c) = chars.next() {
        col += 1;
        let pos = Pos { line, col };
        match c {
            '\n' => {
                flush(&mut token, token_pos, &mut stack, &mut top)?;
                line += 1;
                col = 0;
            }
            ';' => {
                flush(&mut token, token_pos, &mut stack, &mut top)?;
                while let Some(&next) = chars.peek() {
                    if next == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' => {
                flush(&mut token, token_pos, &mut stack, &mut top)?;
                stack.push((Vec::new(), pos));
            }
            ')' => {
                flush(&mut token, token_pos, &mut stack, &mut top)?;
                let (items, open) = stack.pop().ok_or(ParseError::Syntax {
                    pos,
                    message: "unbalanced `)`".to_string(),
                })?;
                push(&mut stack, &mut top, SExpr::List(items, open));
            }
            c if c.is_whitespace() => flush(&mut token, token_pos, &mut stack, &mut top)?,
            c if is_symbol_char(c) || c == '?' || c == ':' => {
                if token.is_empty() {
                    token_pos = pos;
                }
                token.push(c);
            }
            other => {
                return Err(ParseError::Lexical {
                    pos,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    flush(&mut token, token_pos, &mut stack, &mut top)?;
    if let Some((_, open)) = stack.last() {
        return Err(ParseError::Syntax {
            pos: *open,
            message: "unclosed `(`".to_string(),
        });
    }
    Ok(top)
}

/// Reads exactly one top-level expression.
pub fn read_one(text: &str) -> Result<SExpr, ParseError> {
    let mut all = read_all(text)?;
    match all.len() {
        1 => Ok(all.pop().expect("length checked")),
        0 => Err(ParseError::Syntax {
            pos: Pos { line: 1, col: 1 },
            message: "empty input".to_string(),
        }),
        _ => Err(ParseError::Syntax {
            pos: all[1].pos(),
            message: "unexpected text after the closing parenthesis".to_string(),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_nested_lists_with_positions() {
        let e = read_one("(define (Domain x) ; comment\n  (:requirements :STRIPS))").unwrap();
        let items = e.as_list().unwrap();
        assert_eq!(items[0].as_symbol(), Some("define"));
        assert_eq!(items[1].head_symbol(), Some("domain"));
        assert_eq!(items[2].pos(), Pos { line: 2, col: 3 });
        let req = items[2].as_list().unwrap();
        assert_eq!(req[1].as_keyword(), Some("strips"));
    }

    #[test]
    fn classifies_atoms() {
        let e = read_one("(>= ?X -3.5 #T foo-bar 2)").unwrap();
        let items = e.as_list().unwrap();
        assert_eq!(items[0].as_symbol(), Some(">="));
        assert_eq!(items[1].as_variable(), Some("x"));
        assert_eq!(items[2].as_number(), Some(-3.5));
        assert_eq!(items[3].as_symbol(), Some("#t"));
        assert_eq!(items[4].as_symbol(), Some("foo-bar"));
        assert_eq!(items[5].as_number(), Some(2.0));
    }

    #[test]
    fn reports_lexical_and_balance_errors() {
        assert!(matches!(read_all("(a @)"), Err(ParseError::Lexical { .. })));
        assert!(matches!(read_all("(a (b)"), Err(ParseError::Syntax { .. })));
        assert!(matches!(read_all("(a))"), Err(ParseError::Syntax { .. })));
        assert!(matches!(read_one("(a) (b)"), Err(ParseError::Syntax { .. })));
        assert!(matches!(read_all("(1x)"), Err(ParseError::Lexical { .. })));
    }
}
