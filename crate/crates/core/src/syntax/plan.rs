//! Plan files: one step per entry, either `(name args...)` in sequence or
//! `t: (name args...) [d]` with explicit times.

use crate::syntax::ast::{DomainAst, PlanAst, PlanStep};
use crate::syntax::error::ParseError;
use crate::syntax::sexpr::Pos;
use crate::time::Time;

type Result<T> = std::result::Result<T, ParseError>;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Open,
    Close,
    LBracket,
    RBracket,
    Colon,
    Word(String),
}

fn lex(text: &str) -> Result<Vec<(Tok, Pos)>> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split(';').next().unwrap_or("");
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let pos = Pos {
                line: ln + 1,
                col: i + 1,
            };
            let c = chars[i];
            let simple = match c {
                '(' => Some(Tok::Open),
                ')' => Some(Tok::Close),
                '[' => Some(Tok::LBracket),
                ']' => Some(Tok::RBracket),
                ':' => Some(Tok::Colon),
                _ => None,
            };
            if let Some(t) = simple {
                out.push((t, pos));
                i += 1;
                continue;
            }
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            let start = i;
            while i < chars.len() && !chars[i].is_whitespace() && !"()[]:;".contains(chars[i]) {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            if !word
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.' | '+'))
            {
                return Err(ParseError::Lexical {
                    pos,
                    message: format!("unexpected token `{word}` in plan"),
                });
            }
            out.push((Tok::Word(word.to_ascii_lowercase()), pos));
        }
    }
    Ok(out)
}

fn syntax(pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError::syntax(pos, message)
}

fn parse_time(word: &str, pos: Pos, what: &str) -> Result<Time> {
    let t: Time = word.parse().map_err(|_| ParseError::Lexical {
        pos,
        message: format!("malformed {what} `{word}`"),
    })?;
    if t.is_negative() {
        return Err(syntax(pos, format!("negative {what} `{word}`")));
    }
    Ok(t)
}

pub fn parse_plan(text: &str) -> Result<PlanAst> {
    let toks = lex(text)?;
    let mut steps = Vec::new();
    let mut timed: Option<bool> = None;
    let mut i = 0;
    let end_pos = |i: usize| toks.get(i).map(|t| t.1).unwrap_or_default();
    while i < toks.len() {
        let first_pos = toks[i].1;
        let time = match &toks[i].0 {
            Tok::Word(w) => {
                let t = parse_time(w, first_pos, "time stamp")?;
                if toks.get(i + 1).map(|t| &t.0) != Some(&Tok::Colon) {
                    return Err(syntax(first_pos, "expected `:` after the time stamp"));
                }
                i += 2;
                Some(t)
            }
            Tok::Open => None,
            _ => return Err(syntax(first_pos, "expected a plan step")),
        };
        match (timed, time.is_some()) {
            (None, t) => timed = Some(t),
            (Some(a), b) if a != b => {
                return Err(syntax(first_pos, "plans may not mix timed and untimed steps"))
            }
            _ => {}
        }
        if toks.get(i).map(|t| &t.0) != Some(&Tok::Open) {
            return Err(syntax(end_pos(i), "expected `(` to start an action"));
        }
        i += 1;
        let mut words = Vec::new();
        loop {
            match toks.get(i) {
                Some((Tok::Word(w), _)) => words.push(w.clone()),
                Some((Tok::Close, _)) => break,
                Some((_, p)) => return Err(syntax(*p, "unexpected token inside an action")),
                None => return Err(syntax(end_pos(i.saturating_sub(1)), "unclosed action")),
            }
            i += 1;
        }
        i += 1;
        if words.is_empty() {
            return Err(syntax(first_pos, "empty action"));
        }
        let mut duration = None;
        if toks.get(i).map(|t| &t.0) == Some(&Tok::LBracket) {
            let (w, p) = match toks.get(i + 1) {
                Some((Tok::Word(w), p)) => (w.clone(), *p),
                _ => return Err(syntax(end_pos(i), "expected a duration inside `[...]`")),
            };
            if toks.get(i + 2).map(|t| &t.0) != Some(&Tok::RBracket) {
                return Err(syntax(p, "expected `]` after the duration"));
            }
            if time.is_none() {
                return Err(syntax(p, "durations need explicit time stamps"));
            }
            duration = Some(parse_time(&w, p, "duration")?);
            i += 3;
        }
        let action = words.remove(0);
        steps.push(PlanStep {
            time: time.unwrap_or_else(|| Time::from_integer(steps.len() as i128 + 1)),
            action,
            args: words,
            duration,
            line: first_pos.line,
        });
    }
    Ok(PlanAst {
        steps,
        timed: timed.unwrap_or(false),
    })
}

/// Checks that every step names a known action with the right number of
/// arguments, and that durations are given exactly for durative ones.
pub fn check_plan(plan: &PlanAst, domain: &DomainAst) -> Result<()> {
    for step in &plan.steps {
        let pos = Pos {
            line: step.line,
            col: 1,
        };
        let (arity, durative) = if let Some(a) = domain.action(&step.action) {
            (a.parameters.len(), false)
        } else if let Some(a) = domain.durative_action(&step.action) {
            (a.parameters.len(), true)
        } else {
            return Err(ParseError::Unknown {
                pos,
                kind: "action",
                name: step.action.clone(),
            });
        };
        if arity != step.args.len() {
            return Err(ParseError::Arity {
                pos,
                kind: "action",
                name: step.action.clone(),
                expected: arity,
                found: step.args.len(),
            });
        }
        match (durative, step.duration.is_some()) {
            (true, false) => {
                return Err(syntax(pos, format!("durative action `{}` needs a `[duration]`", step.action)))
            }
            (false, true) => {
                return Err(syntax(pos, format!("`{}` is not durative and takes no duration", step.action)))
            }
            _ => {}
        }
    }
    Ok(())
}
