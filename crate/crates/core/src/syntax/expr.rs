//! Goal descriptions, numeric expressions and effects, shared by the domain
//! and problem readers.

use std::collections::{HashMap, HashSet};

use crate::syntax::ast::*;
use crate::syntax::error::ParseError;
use crate::syntax::sexpr::{Atom, Pos, SExpr};

type Result<T> = std::result::Result<T, ParseError>;

/// Which special numeric symbols are legal where an expression is read.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Specials {
    pub duration: bool,
    pub total_time: bool,
}

/// Declarations visible to the reader. With `check` off, names are taken at
/// face value (a problem read without its domain).
#[derive(Debug, Default)]
pub(crate) struct Ctx {
    pub check: bool,
    pub predicates: HashMap<Name, usize>,
    pub functions: HashMap<Name, usize>,
    pub types: HashSet<Name>,
    pub objects: HashSet<Name>,
    pub specials: Specials,
    /// Whether variables are legal at all; false for problem files.
    pub allow_variables: bool,
    pub scope: Vec<Name>,
}

pub(crate) fn syntax(pos: Pos, message: impl Into<String>) -> ParseError {
    ParseError::syntax(pos, message)
}

fn list<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr]> {
    e.as_list()
        .ok_or_else(|| syntax(e.pos(), format!("expected {what}, found {}", e.describe())))
}

pub(crate) fn name(e: &SExpr, what: &str) -> Result<Name> {
    e.as_symbol()
        .filter(|s| is_identifier(s))
        .map(str::to_string)
        .ok_or_else(|| syntax(e.pos(), format!("expected {what}, found {}", e.describe())))
}

pub(crate) fn is_identifier(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_alphabetic())
}

fn expect_len(items: &[SExpr], n: usize, pos: Pos, what: &str) -> Result<()> {
    if items.len() != n {
        return Err(syntax(
            pos,
            format!("`{what}` takes {} operand(s), found {}", n - 1, items.len() - 1),
        ));
    }
    Ok(())
}

#[derive(Clone, Copy, PartialEq, Eq)]
pub(crate) enum ListOf {
    Names,
    Variables,
}

fn parse_type(e: &SExpr) -> Result<Type> {
    if let Some(items) = e.as_list() {
        if e.head_symbol() != Some("either") || items.len() < 2 {
            return Err(syntax(e.pos(), "expected a type name or `(either ...)`"));
        }
        let members = items[1..]
            .iter()
            .map(|m| name(m, "a primitive type inside `either`"))
            .collect::<Result<Vec<_>>>()?;
        return Ok(Type::Either(members));
    }
    Ok(Type::Primitive(name(e, "a type name")?))
}

/// `x1 x2 - t1 x3 - t2 x4` (the trailing untyped run is allowed).
pub(crate) fn typed_list(items: &[SExpr], of: ListOf) -> Result<Vec<TypedName>> {
    let mut out = Vec::new();
    let mut pending: Vec<Name> = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let item = &items[i];
        if item.as_symbol() == Some("-") {
            if pending.is_empty() {
                return Err(syntax(item.pos(), "`-` must follow at least one element"));
            }
            let ty_expr = items
                .get(i + 1)
                .ok_or_else(|| syntax(item.pos(), "missing type after `-`"))?;
            let ty = parse_type(ty_expr)?;
            out.extend(pending.drain(..).map(|n| TypedName::new(n, Some(ty.clone()))));
            i += 2;
            continue;
        }
        let element = match of {
            ListOf::Names => name(item, "a name")?,
            ListOf::Variables => item
                .as_variable()
                .map(str::to_string)
                .ok_or_else(|| syntax(item.pos(), format!("expected a variable, found {}", item.describe())))?,
        };
        pending.push(element);
        i += 1;
    }
    out.extend(pending.into_iter().map(|n| TypedName::new(n, None)));
    Ok(out)
}

impl Ctx {
    pub fn check_types(&self, list: &[TypedName], pos: Pos) -> Result<()> {
        if !self.check {
            return Ok(());
        }
        for t in list {
            if let Some(ty) = &t.ty {
                for m in ty.members() {
                    if m != "object" && !self.types.contains(m) {
                        return Err(ParseError::Unknown {
                            pos,
                            kind: "type",
                            name: m.clone(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    pub fn bind(&mut self, vars: &[TypedName]) {
        self.scope.extend(vars.iter().map(|v| v.name.clone()));
    }

    pub fn unbind(&mut self, count: usize) {
        let keep = self.scope.len() - count;
        self.scope.truncate(keep);
    }

    fn quantified<T>(
        &mut self,
        items: &[SExpr],
        pos: Pos,
        keyword: &str,
        body: impl FnOnce(&mut Ctx, &SExpr) -> Result<T>,
    ) -> Result<(Vec<TypedName>, T)> {
        expect_len(items, 3, pos, keyword)?;
        let vars = typed_list(list(&items[1], "a variable list")?, ListOf::Variables)?;
        self.check_types(&vars, items[1].pos())?;
        self.bind(&vars);
        let inner = body(self, &items[2]);
        self.unbind(vars.len());
        Ok((vars, inner?))
    }

    pub fn term(&self, e: &SExpr) -> Result<Term> {
        match e {
            SExpr::Atom(Atom::Variable(v), pos) => {
                if !self.allow_variables && !self.scope.contains(v) {
                    return Err(syntax(*pos, format!("variable `?{v}` is not allowed here")));
                }
                if self.check && !self.scope.contains(v) {
                    return Err(ParseError::Unknown {
                        pos: *pos,
                        kind: "variable",
                        name: format!("?{v}"),
                    });
                }
                Ok(Term::Var(v.clone()))
            }
            SExpr::Atom(Atom::Symbol(s), pos) if is_identifier(s) => {
                if self.check && !self.objects.contains(s) {
                    return Err(ParseError::Unknown {
                        pos: *pos,
                        kind: "object",
                        name: s.clone(),
                    });
                }
                Ok(Term::Name(s.clone()))
            }
            other => Err(syntax(other.pos(), format!("expected a term, found {}", other.describe()))),
        }
    }

    fn arity(&self, kind: &'static str, name: &str, found: usize, pos: Pos) -> Result<()> {
        if !self.check {
            return Ok(());
        }
        let table = if kind == "predicate" {
            &self.predicates
        } else {
            &self.functions
        };
        match table.get(name) {
            None => Err(ParseError::Unknown {
                pos,
                kind,
                name: name.to_string(),
            }),
            Some(&expected) if expected != found => Err(ParseError::Arity {
                pos,
                kind,
                name: name.to_string(),
                expected,
                found,
            }),
            Some(_) => Ok(()),
        }
    }

    pub fn atomic(&self, e: &SExpr) -> Result<AtomicFormula> {
        let items = list(e, "an atomic formula")?;
        let predicate = match items.first() {
            Some(head) => name(head, "a predicate name")?,
            None => return Err(syntax(e.pos(), "empty atomic formula")),
        };
        let args = items[1..].iter().map(|a| self.term(a)).collect::<Result<Vec<_>>>()?;
        self.arity("predicate", &predicate, args.len(), e.pos())?;
        Ok(AtomicFormula { predicate, args })
    }

    pub fn fhead(&self, e: &SExpr) -> Result<FHead> {
        let (function, args, pos) = match e {
            SExpr::Atom(..) => (name(e, "a function symbol")?, Vec::new(), e.pos()),
            SExpr::List(items, pos) => {
                let function = match items.first() {
                    Some(h) => name(h, "a function symbol")?,
                    None => return Err(syntax(*pos, "empty function term")),
                };
                let args = items[1..].iter().map(|a| self.term(a)).collect::<Result<Vec<_>>>()?;
                (function, args, *pos)
            }
        };
        self.arity("function", &function, args.len(), pos)?;
        Ok(FHead { function, args })
    }

    pub fn fexp(&self, e: &SExpr) -> Result<FExp> {
        match e {
            SExpr::Atom(Atom::Number(n), _) => Ok(FExp::Number(*n)),
            SExpr::Atom(Atom::Variable(v), pos) if v == "duration" && !self.scope.contains(v) => {
                if self.specials.duration {
                    Ok(FExp::Duration)
                } else {
                    Err(syntax(*pos, "`?duration` is only allowed inside durative actions"))
                }
            }
            SExpr::Atom(Atom::Symbol(s), pos) if s == "total-time" => {
                if self.specials.total_time {
                    Ok(FExp::TotalTime)
                } else {
                    Err(syntax(*pos, "`total-time` is only allowed in a metric"))
                }
            }
            SExpr::Atom(Atom::Symbol(s), pos) if s == "#t" => Err(syntax(
                *pos,
                "`#t` may only appear as `#t`, `(* e #t)` or `(* #t e)` in a continuous effect",
            )),
            SExpr::Atom(Atom::Symbol(s), _) if is_identifier(s) => Ok(FExp::Head(self.fhead(e)?)),
            SExpr::List(items, pos) => {
                let op = items.first().and_then(SExpr::as_symbol);
                let binop = match op {
                    Some("+") => Some(BinOp::Add),
                    Some("-") => Some(BinOp::Sub),
                    Some("*") => Some(BinOp::Mul),
                    Some("/") => Some(BinOp::Div),
                    _ => None,
                };
                match binop {
                    Some(BinOp::Sub) if items.len() == 2 => Ok(FExp::Neg(Box::new(self.fexp(&items[1])?))),
                    Some(op) => {
                        if items.len() != 3 {
                            return Err(syntax(*pos, "arithmetic operators take exactly two operands"));
                        }
                        Ok(FExp::Binary(
                            op,
                            Box::new(self.fexp(&items[1])?),
                            Box::new(self.fexp(&items[2])?),
                        ))
                    }
                    None => Ok(FExp::Head(self.fhead(e)?)),
                }
            }
            other => Err(syntax(
                other.pos(),
                format!("expected a numeric expression, found {}", other.describe()),
            )),
        }
    }

    /// `(= a b)` is a numeric comparison when either side is a number, a
    /// compound expression or a declared function; otherwise object equality.
    fn is_numeric_operand(&self, e: &SExpr) -> bool {
        match e {
            SExpr::List(..) => true,
            SExpr::Atom(Atom::Number(_), _) => true,
            SExpr::Atom(Atom::Symbol(s), _) => self.functions.contains_key(s) || s == "total-time",
            SExpr::Atom(Atom::Variable(v), _) => v == "duration" && self.specials.duration && !self.scope.contains(v),
            SExpr::Atom(Atom::Keyword(_), _) => false,
        }
    }

    pub fn goal(&mut self, e: &SExpr) -> Result<GoalDesc> {
        let items = list(e, "a goal description")?;
        let pos = e.pos();
        let Some(head) = items.first() else {
            return Ok(GoalDesc::empty());
        };
        let comp = |s: &str| match s {
            ">" => Some(CompOp::Gt),
            "<" => Some(CompOp::Lt),
            ">=" => Some(CompOp::Ge),
            "<=" => Some(CompOp::Le),
            _ => None,
        };
        match head.as_symbol() {
            Some("and") => Ok(GoalDesc::And(
                items[1..].iter().map(|g| self.goal(g)).collect::<Result<_>>()?,
            )),
            Some("or") => Ok(GoalDesc::Or(
                items[1..].iter().map(|g| self.goal(g)).collect::<Result<_>>()?,
            )),
            Some("not") => {
                expect_len(items, 2, pos, "not")?;
                Ok(GoalDesc::Not(Box::new(self.goal(&items[1])?)))
            }
            Some("imply") => {
                expect_len(items, 3, pos, "imply")?;
                Ok(GoalDesc::Imply(
                    Box::new(self.goal(&items[1])?),
                    Box::new(self.goal(&items[2])?),
                ))
            }
            Some(q @ ("exists" | "forall")) => {
                let (vars, inner) = self.quantified(items, pos, q, |c, b| c.goal(b))?;
                Ok(if q == "exists" {
                    GoalDesc::Exists(vars, Box::new(inner))
                } else {
                    GoalDesc::Forall(vars, Box::new(inner))
                })
            }
            Some("=") => {
                expect_len(items, 3, pos, "=")?;
                if self.is_numeric_operand(&items[1]) || self.is_numeric_operand(&items[2]) {
                    Ok(GoalDesc::Compare(CompOp::Eq, self.fexp(&items[1])?, self.fexp(&items[2])?))
                } else {
                    Ok(GoalDesc::Equality(self.term(&items[1])?, self.term(&items[2])?))
                }
            }
            Some(s) if comp(s).is_some() => {
                expect_len(items, 3, pos, s)?;
                Ok(GoalDesc::Compare(
                    comp(s).expect("matched"),
                    self.fexp(&items[1])?,
                    self.fexp(&items[2])?,
                ))
            }
            _ => Ok(GoalDesc::Atom(self.atomic(e)?)),
        }
    }

    fn assign_op(s: Option<&str>) -> Option<AssignOp> {
        match s? {
            "assign" => Some(AssignOp::Assign),
            "scale-up" => Some(AssignOp::ScaleUp),
            "scale-down" => Some(AssignOp::ScaleDown),
            "increase" => Some(AssignOp::Increase),
            "decrease" => Some(AssignOp::Decrease),
            _ => None,
        }
    }

    /// `<p-effect>`: an atom, a negated atom or a numeric update.
    pub fn primitive_effect(&mut self, e: &SExpr) -> Result<Effect> {
        let items = list(e, "an effect")?;
        let pos = e.pos();
        match items.first().and_then(SExpr::as_symbol) {
            Some("not") => {
                expect_len(items, 2, pos, "not")?;
                Ok(Effect::Del(self.atomic(&items[1])?))
            }
            s @ Some(_) if Self::assign_op(s).is_some() => {
                let op = Self::assign_op(s).expect("matched");
                expect_len(items, 3, pos, s.expect("matched"))?;
                Ok(Effect::Assign(op, self.fhead(&items[1])?, self.fexp(&items[2])?))
            }
            Some("and" | "when" | "forall") => Err(syntax(pos, "expected a primitive effect")),
            _ => Ok(Effect::Add(self.atomic(e)?)),
        }
    }

    /// `<cond-effect>`: consequent of a `when`.
    fn cond_effect(&mut self, e: &SExpr) -> Result<Effect> {
        if e.head_symbol() == Some("and") {
            let items = e.as_list().expect("list");
            return Ok(Effect::And(
                items[1..].iter().map(|i| self.primitive_effect(i)).collect::<Result<_>>()?,
            ));
        }
        self.primitive_effect(e).map_err(|err| match err {
            ParseError::Syntax { pos, .. } if matches!(e.head_symbol(), Some("when" | "forall")) => {
                syntax(pos, "conditional effects may not be nested")
            }
            other => other,
        })
    }

    /// `<effect>` / `<c-effect>`.
    pub fn effect(&mut self, e: &SExpr) -> Result<Effect> {
        let items = list(e, "an effect")?;
        let pos = e.pos();
        match items.first().and_then(SExpr::as_symbol) {
            None if items.is_empty() => Ok(Effect::empty()),
            Some("and") => Ok(Effect::And(
                items[1..].iter().map(|i| self.effect(i)).collect::<Result<_>>()?,
            )),
            Some("forall") => {
                let (vars, inner) = self.quantified(items, pos, "forall", |c, b| c.effect(b))?;
                Ok(Effect::Forall(vars, Box::new(inner)))
            }
            Some("when") => {
                expect_len(items, 3, pos, "when")?;
                let cond = self.goal(&items[1])?;
                Ok(Effect::When(cond, Box::new(self.cond_effect(&items[2])?)))
            }
            _ => self.primitive_effect(e),
        }
    }

    fn time_spec(e: &SExpr) -> Result<TimeSpec> {
        match e.as_symbol() {
            Some("start") => Ok(TimeSpec::Start),
            Some("end") => Ok(TimeSpec::End),
            _ => Err(syntax(e.pos(), "expected `start` or `end`")),
        }
    }

    /// `<timed-GD>`.
    pub fn timed_goal(&mut self, e: &SExpr) -> Result<TimedGoal> {
        let items = list(e, "a timed condition")?;
        let pos = e.pos();
        let annotation = match (items.first().and_then(SExpr::as_symbol), items.get(1).and_then(SExpr::as_symbol)) {
            (Some("at"), Some("start")) => Annotation::AtStart,
            (Some("at"), Some("end")) => Annotation::AtEnd,
            (Some("over"), Some("all")) => Annotation::OverAll,
            _ => {
                return Err(syntax(
                    pos,
                    "durative conditions must be `(at start ...)`, `(at end ...)` or `(over all ...)`",
                ))
            }
        };
        expect_len(items, 3, pos, "at")?;
        Ok(TimedGoal {
            annotation,
            goal: self.goal(&items[2])?,
        })
    }

    /// `<da-GD>`: empty, one timed goal, or a conjunction of them.
    pub fn da_goal(&mut self, e: &SExpr) -> Result<Vec<TimedGoal>> {
        let items = list(e, "a durative condition")?;
        if items.is_empty() {
            return Ok(Vec::new());
        }
        if e.head_symbol() == Some("and") {
            return items[1..].iter().map(|g| self.timed_goal(g)).collect();
        }
        Ok(vec![self.timed_goal(e)?])
    }

    fn simple_duration_constraint(&self, e: &SExpr, time: Option<TimeSpec>) -> Result<DurationConstraint> {
        let items = list(e, "a duration constraint")?;
        let pos = e.pos();
        if e.head_symbol() == Some("at") {
            if time.is_some() {
                return Err(syntax(pos, "nested `at` in a duration constraint"));
            }
            expect_len(items, 3, pos, "at")?;
            let spec = Self::time_spec(&items[1])?;
            return self.simple_duration_constraint(&items[2], Some(spec));
        }
        let op = match e.head_symbol() {
            Some("=") => DurationOp::Eq,
            Some("<=") => DurationOp::Le,
            Some(">=") => DurationOp::Ge,
            Some("<") => DurationOp::Lt,
            Some(">") => DurationOp::Gt,
            _ => return Err(syntax(pos, "expected a duration comparison")),
        };
        expect_len(items, 3, pos, "duration comparison")?;
        if items[1].as_variable() != Some("duration") {
            return Err(syntax(items[1].pos(), "the left operand of a duration constraint must be `?duration`"));
        }
        let value = self.fexp(&items[2])?;
        if contains_duration(&value) {
            return Err(syntax(items[2].pos(), "a duration bound may not refer to `?duration`"));
        }
        Ok(DurationConstraint { time, op, value })
    }

    pub fn duration_constraint(&self, e: &SExpr) -> Result<Vec<DurationConstraint>> {
        let items = list(e, "a duration constraint")?;
        if items.is_empty() {
            return Ok(Vec::new());
        }
        if e.head_symbol() == Some("and") {
            return items[1..]
                .iter()
                .map(|c| self.simple_duration_constraint(c, None))
                .collect();
        }
        Ok(vec![self.simple_duration_constraint(e, None)?])
    }

    /// Rate of a continuous effect: `#t`, `(* e #t)` or `(* #t e)`.
    fn continuous_rate(&self, e: &SExpr) -> Result<Option<FExp>> {
        if e.as_symbol() == Some("#t") {
            return Ok(Some(FExp::Number(1.0)));
        }
        let Some(items) = e.as_list() else {
            return Ok(None);
        };
        if items.len() == 3 && e.head_symbol() == Some("*") {
            if items[2].as_symbol() == Some("#t") {
                return Ok(Some(self.fexp(&items[1])?));
            }
            if items[1].as_symbol() == Some("#t") {
                return Ok(Some(self.fexp(&items[2])?));
            }
        }
        Ok(None)
    }

    /// `<da-effect>`.
    pub fn da_effect(&mut self, e: &SExpr) -> Result<DaEffect> {
        let items = list(e, "a durative effect")?;
        let pos = e.pos();
        match items.first().and_then(SExpr::as_symbol) {
            None if items.is_empty() => Ok(DaEffect::empty()),
            Some("and") => Ok(DaEffect::And(
                items[1..].iter().map(|i| self.da_effect(i)).collect::<Result<_>>()?,
            )),
            Some("forall") => {
                let (vars, inner) = self.quantified(items, pos, "forall", |c, b| c.da_effect(b))?;
                Ok(DaEffect::Forall(vars, Box::new(inner)))
            }
            Some("when") => {
                expect_len(items, 3, pos, "when")?;
                let cond = self.da_goal(&items[1])?;
                let inner = self.timed_effect(&items[2])?;
                Ok(DaEffect::When(cond, Box::new(inner)))
            }
            _ => self.timed_effect(e),
        }
    }

    /// `<timed-effect>`; a conjunction of them is accepted as the consequent
    /// of a `when`.
    fn timed_effect(&mut self, e: &SExpr) -> Result<DaEffect> {
        let items = list(e, "a timed effect")?;
        let pos = e.pos();
        match items.first().and_then(SExpr::as_symbol) {
            Some("and") => Ok(DaEffect::And(
                items[1..].iter().map(|i| self.timed_effect(i)).collect::<Result<_>>()?,
            )),
            Some("at") => {
                expect_len(items, 3, pos, "at")?;
                let spec = Self::time_spec(&items[1])?;
                Ok(DaEffect::At(spec, self.cond_effect(&items[2])?))
            }
            Some(op @ ("increase" | "decrease")) => {
                expect_len(items, 3, pos, op)?;
                match self.continuous_rate(&items[2])? {
                    Some(rate) => {
                        let head = self.fhead(&items[1])?;
                        let op = if op == "increase" {
                            ContinuousOp::Increase
                        } else {
                            ContinuousOp::Decrease
                        };
                        Ok(DaEffect::Continuous(op, head, rate))
                    }
                    None => Err(syntax(
                        pos,
                        "a discrete numeric effect in a durative action must be wrapped in `(at start ...)` or `(at end ...)`",
                    )),
                }
            }
            _ => Err(syntax(
                pos,
                "durative effects must be `(at start ...)`, `(at end ...)` or continuous updates",
            )),
        }
    }
}

pub(crate) fn contains_duration(e: &FExp) -> bool {
    match e {
        FExp::Duration => true,
        FExp::Binary(_, a, b) => contains_duration(a) || contains_duration(b),
        FExp::Neg(a) => contains_duration(a),
        _ => false,
    }
}
