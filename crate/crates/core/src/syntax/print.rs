//! Surface-syntax rendering of the parse trees. Output re-parses to an equal
//! tree.

use std::fmt::{self, Display, Formatter, Write as _};

use crate::syntax::ast::*;

fn join<T: Display>(items: &[T]) -> String {
    let mut out = String::new();
    for (i, item) in items.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{item}");
    }
    out
}

impl Display for Type {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Type::Primitive(n) => write!(f, "{n}"),
            Type::Either(ns) => write!(f, "(either {})", ns.join(" ")),
        }
    }
}

/// A typed list; `variables` selects the `?` prefix.
struct TypedList<'a>(&'a [TypedName], bool);

impl Display for TypedList<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        let prefix = if self.1 { "?" } else { "" };
        let mut first = true;
        let mut i = 0;
        let items = self.0;
        while i < items.len() {
            let mut j = i;
            while j < items.len() && items[j].ty == items[i].ty {
                j += 1;
            }
            for item in &items[i..j] {
                if !first {
                    f.write_str(" ")?;
                }
                first = false;
                write!(f, "{prefix}{}", item.name)?;
            }
            if let Some(ty) = &items[i].ty {
                write!(f, " - {ty}")?;
            }
            i = j;
        }
        Ok(())
    }
}

impl Display for Term {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Term::Name(n) => write!(f, "{n}"),
            Term::Var(v) => write!(f, "?{v}"),
        }
    }
}

impl Display for AtomicFormula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            write!(f, "({})", self.predicate)
        } else {
            write!(f, "({} {})", self.predicate, join(&self.args))
        }
    }
}

impl Display for FHead {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            write!(f, "({})", self.function)
        } else {
            write!(f, "({} {})", self.function, join(&self.args))
        }
    }
}

impl Display for BinOp {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        })
    }
}

impl Display for CompOp {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompOp::Gt => ">",
            CompOp::Lt => "<",
            CompOp::Eq => "=",
            CompOp::Ge => ">=",
            CompOp::Le => "<=",
        })
    }
}

impl Display for FExp {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            FExp::Number(n) => write!(f, "{n}"),
            FExp::Head(h) => write!(f, "{h}"),
            FExp::Binary(op, a, b) => write!(f, "({op} {a} {b})"),
            FExp::Neg(a) => write!(f, "(- {a})"),
            FExp::Duration => f.write_str("?duration"),
            FExp::TotalTime => f.write_str("total-time"),
            FExp::ElapsedTime => f.write_str("#t"),
        }
    }
}

impl Display for GoalDesc {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            GoalDesc::Atom(a) => write!(f, "{a}"),
            GoalDesc::Equality(a, b) => write!(f, "(= {a} {b})"),
            GoalDesc::Not(g) => write!(f, "(not {g})"),
            GoalDesc::And(gs) if gs.is_empty() => f.write_str("(and)"),
            GoalDesc::And(gs) => write!(f, "(and {})", join(gs)),
            GoalDesc::Or(gs) if gs.is_empty() => f.write_str("(or)"),
            GoalDesc::Or(gs) => write!(f, "(or {})", join(gs)),
            GoalDesc::Imply(a, b) => write!(f, "(imply {a} {b})"),
            GoalDesc::Exists(vs, g) => write!(f, "(exists ({}) {g})", TypedList(vs, true)),
            GoalDesc::Forall(vs, g) => write!(f, "(forall ({}) {g})", TypedList(vs, true)),
            GoalDesc::Compare(op, a, b) => write!(f, "({op} {a} {b})"),
        }
    }
}

impl Display for AssignOp {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AssignOp::Assign => "assign",
            AssignOp::ScaleUp => "scale-up",
            AssignOp::ScaleDown => "scale-down",
            AssignOp::Increase => "increase",
            AssignOp::Decrease => "decrease",
        })
    }
}

impl Display for Effect {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Effect::And(es) if es.is_empty() => f.write_str("(and)"),
            Effect::And(es) => write!(f, "(and {})", join(es)),
            Effect::Add(a) => write!(f, "{a}"),
            Effect::Del(a) => write!(f, "(not {a})"),
            Effect::Assign(op, h, e) => write!(f, "({op} {h} {e})"),
            Effect::Forall(vs, e) => write!(f, "(forall ({}) {e})", TypedList(vs, true)),
            Effect::When(g, e) => write!(f, "(when {g} {e})"),
        }
    }
}

impl Display for TimeSpec {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TimeSpec::Start => "start",
            TimeSpec::End => "end",
        })
    }
}

impl Display for TimedGoal {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.annotation {
            Annotation::AtStart => write!(f, "(at start {})", self.goal),
            Annotation::AtEnd => write!(f, "(at end {})", self.goal),
            Annotation::OverAll => write!(f, "(over all {})", self.goal),
        }
    }
}

struct DaGoal<'a>(&'a [TimedGoal]);

impl Display for DaGoal<'_> {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.0 {
            [] => f.write_str("()"),
            [g] => write!(f, "{g}"),
            gs => write!(f, "(and {})", join(gs)),
        }
    }
}

impl Display for DurationOp {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DurationOp::Eq => "=",
            DurationOp::Le => "<=",
            DurationOp::Ge => ">=",
            DurationOp::Lt => "<",
            DurationOp::Gt => ">",
        })
    }
}

impl Display for DurationConstraint {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self.time {
            Some(t) => write!(f, "(at {t} ({} ?duration {}))", self.op, self.value),
            None => write!(f, "({} ?duration {})", self.op, self.value),
        }
    }
}

impl Display for DaEffect {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            DaEffect::And(es) if es.is_empty() => f.write_str("(and)"),
            DaEffect::And(es) => write!(f, "(and {})", join(es)),
            DaEffect::At(t, e) => write!(f, "(at {t} {e})"),
            DaEffect::Continuous(op, h, rate) => {
                let op = match op {
                    ContinuousOp::Increase => "increase",
                    ContinuousOp::Decrease => "decrease",
                };
                write!(f, "({op} {h} (* #t {rate}))")
            }
            DaEffect::Forall(vs, e) => write!(f, "(forall ({}) {e})", TypedList(vs, true)),
            DaEffect::When(cs, e) => write!(f, "(when {} {e})", DaGoal(cs)),
        }
    }
}

impl Display for ActionSchema {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "  (:action {}", self.name)?;
        writeln!(f, "   :parameters ({})", TypedList(&self.parameters, true))?;
        writeln!(f, "   :precondition {}", self.precondition)?;
        write!(f, "   :effect {})", self.effect)
    }
}

impl Display for DurativeSchema {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "  (:durative-action {}", self.name)?;
        writeln!(f, "   :parameters ({})", TypedList(&self.parameters, true))?;
        match self.duration.as_slice() {
            [] => writeln!(f, "   :duration ()")?,
            [c] => writeln!(f, "   :duration {c}")?,
            cs => writeln!(f, "   :duration (and {})", join(cs))?,
        }
        writeln!(f, "   :condition {}", DaGoal(&self.condition))?;
        write!(f, "   :effect {})", self.effect)
    }
}

impl Display for DomainAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (domain {})", self.name)?;
        if !self.requirements.is_empty() {
            let keys: Vec<String> = self.requirements.iter().map(|r| r.to_string()).collect();
            writeln!(f, "  (:requirements {})", keys.join(" "))?;
        }
        if !self.types.is_empty() {
            writeln!(f, "  (:types {})", TypedList(&self.types, false))?;
        }
        if !self.constants.is_empty() {
            writeln!(f, "  (:constants {})", TypedList(&self.constants, false))?;
        }
        if !self.predicates.is_empty() {
            f.write_str("  (:predicates")?;
            for p in &self.predicates {
                write!(f, " ({}", p.name)?;
                if !p.parameters.is_empty() {
                    write!(f, " {}", TypedList(&p.parameters, true))?;
                }
                f.write_str(")")?;
            }
            writeln!(f, ")")?;
        }
        if !self.functions.is_empty() {
            f.write_str("  (:functions")?;
            for p in &self.functions {
                write!(f, " ({}", p.name)?;
                if !p.parameters.is_empty() {
                    write!(f, " {}", TypedList(&p.parameters, true))?;
                }
                f.write_str(")")?;
            }
            writeln!(f, ")")?;
        }
        for a in &self.actions {
            writeln!(f, "{a}")?;
        }
        for a in &self.durative_actions {
            writeln!(f, "{a}")?;
        }
        f.write_str(")")
    }
}

impl Display for ProblemAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "(define (problem {})", self.name)?;
        writeln!(f, "  (:domain {})", self.domain_name)?;
        if !self.requirements.is_empty() {
            let keys: Vec<String> = self.requirements.iter().map(|r| r.to_string()).collect();
            writeln!(f, "  (:requirements {})", keys.join(" "))?;
        }
        if !self.objects.is_empty() {
            writeln!(f, "  (:objects {})", TypedList(&self.objects, false))?;
        }
        f.write_str("  (:init")?;
        for l in &self.init_literals {
            if l.positive {
                write!(f, " {}", l.atom)?;
            } else {
                write!(f, " (not {})", l.atom)?;
            }
        }
        for n in &self.init_numeric {
            write!(f, " (= {} {})", n.head, n.value)?;
        }
        writeln!(f, ")")?;
        writeln!(f, "  (:goal {})", self.goal)?;
        if let Some(m) = &self.metric {
            let dir = match m.direction {
                Optimization::Minimize => "minimize",
                Optimization::Maximize => "maximize",
            };
            writeln!(f, "  (:metric {dir} {})", m.expression)?;
        }
        if let Some(l) = &self.length {
            f.write_str("  (:length")?;
            if let Some(s) = l.serial {
                write!(f, " (:serial {s})")?;
            }
            if let Some(p) = l.parallel {
                write!(f, " (:parallel {p})")?;
            }
            writeln!(f, ")")?;
        }
        f.write_str(")")
    }
}

impl Display for PlanStep {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.action)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        f.write_str(")")?;
        if let Some(d) = self.duration {
            write!(f, " [{d}]")?;
        }
        Ok(())
    }
}

impl Display for PlanAst {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            if self.timed {
                writeln!(f, "{}: {s}", s.time)?;
            } else {
                writeln!(f, "{s}")?;
            }
        }
        Ok(())
    }
}
