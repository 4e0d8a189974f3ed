//! Ground propositions and numeric expressions.
//!
//! Numeric expressions come in two forms: with named PNEs, as produced by
//! grounding, and normalised, where every PNE is replaced by its slot in the
//! numeric state vector. Only the normalised form can be evaluated.

use std::collections::BTreeSet;
use std::fmt;

use crate::ground::instance::{GroundAtom, Pne, PlanningInstance};
use crate::ground::GroundError;
use crate::syntax::ast::{BinOp, CompOp};

#[derive(Debug, Clone, PartialEq)]
pub enum NExpr {
    Const(f64),
    Pne(Pne),
    /// Slot `X_i` of the numeric state (0-based; printed 1-based).
    Var(usize),
    Binary(BinOp, Box<NExpr>, Box<NExpr>),
    Neg(Box<NExpr>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Prop {
    Const(bool),
    Atom(GroundAtom),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
    Compare(CompOp, NExpr, NExpr),
}

pub fn apply_binop(op: BinOp, a: f64, b: f64) -> Option<f64> {
    let v = match op {
        BinOp::Add => a + b,
        BinOp::Sub => a - b,
        BinOp::Mul => a * b,
        BinOp::Div => {
            if b == 0.0 {
                return None;
            }
            a / b
        }
    };
    v.is_finite().then_some(v)
}

/// ε-tolerant comparison: equality within ε, non-strict orders relaxed by ε
/// and strict orders requiring a margin larger than ε.
pub fn compare(op: CompOp, l: f64, r: f64, eps: f64) -> bool {
    match op {
        CompOp::Eq => (l - r).abs() <= eps,
        CompOp::Ge => l >= r - eps,
        CompOp::Le => l <= r + eps,
        CompOp::Gt => l > r + eps,
        CompOp::Lt => l < r - eps,
    }
}

impl NExpr {
    /// Evaluates a normalised expression; `None` is the undefined value.
    pub fn eval(&self, x: &[Option<f64>]) -> Option<f64> {
        match self {
            NExpr::Const(c) => Some(*c),
            NExpr::Var(i) => x.get(*i).copied().flatten(),
            NExpr::Pne(_) => None,
            NExpr::Binary(op, a, b) => apply_binop(*op, a.eval(x)?, b.eval(x)?),
            NExpr::Neg(a) => Some(-a.eval(x)?),
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            NExpr::Var(i) => {
                out.insert(*i);
            }
            NExpr::Binary(_, a, b) => {
                a.vars(out);
                b.vars(out);
            }
            NExpr::Neg(a) => a.vars(out),
            NExpr::Const(_) | NExpr::Pne(_) => {}
        }
    }

    pub fn var_set(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.vars(&mut out);
        out
    }

    pub fn normalize(&self, instance: &PlanningInstance) -> Result<NExpr, GroundError> {
        Ok(match self {
            NExpr::Pne(p) => NExpr::Var(
                instance
                    .index_of(p)
                    .ok_or_else(|| GroundError::UnknownPne(p.to_string()))?,
            ),
            NExpr::Binary(op, a, b) => NExpr::Binary(
                *op,
                Box::new(a.normalize(instance)?),
                Box::new(b.normalize(instance)?),
            ),
            NExpr::Neg(a) => NExpr::Neg(Box::new(a.normalize(instance)?)),
            e => e.clone(),
        })
    }

    pub fn denormalize(&self, instance: &PlanningInstance) -> NExpr {
        match self {
            NExpr::Var(i) => NExpr::Pne(instance.pnes[*i].clone()),
            NExpr::Binary(op, a, b) => NExpr::Binary(
                *op,
                Box::new(a.denormalize(instance)),
                Box::new(b.denormalize(instance)),
            ),
            NExpr::Neg(a) => NExpr::Neg(Box::new(a.denormalize(instance))),
            e => e.clone(),
        }
    }
}

impl Prop {
    /// Three-valued evaluation. Any comparison touching an undefined value
    /// makes the whole proposition undefined.
    pub fn eval(&self, logical: &BTreeSet<GroundAtom>, x: &[Option<f64>], eps: f64) -> Option<bool> {
        match self {
            Prop::Const(b) => Some(*b),
            Prop::Atom(a) => Some(logical.contains(a)),
            Prop::Not(p) => p.eval(logical, x, eps).map(|b| !b),
            Prop::And(ps) => {
                let mut all = true;
                for p in ps {
                    all &= p.eval(logical, x, eps)?;
                }
                Some(all)
            }
            Prop::Or(ps) => {
                let mut any = false;
                for p in ps {
                    any |= p.eval(logical, x, eps)?;
                }
                Some(any)
            }
            Prop::Compare(op, l, r) => Some(compare(*op, l.eval(x)?, r.eval(x)?, eps)),
        }
    }

    pub fn holds(&self, logical: &BTreeSet<GroundAtom>, x: &[Option<f64>], eps: f64) -> bool {
        self.eval(logical, x, eps) == Some(true)
    }

    pub fn atoms(&self, out: &mut BTreeSet<GroundAtom>) {
        match self {
            Prop::Atom(a) => {
                out.insert(a.clone());
            }
            Prop::Not(p) => p.atoms(out),
            Prop::And(ps) | Prop::Or(ps) => ps.iter().for_each(|p| p.atoms(out)),
            Prop::Const(_) | Prop::Compare(..) => {}
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<usize>) {
        match self {
            Prop::Compare(_, l, r) => {
                l.vars(out);
                r.vars(out);
            }
            Prop::Not(p) => p.vars(out),
            Prop::And(ps) | Prop::Or(ps) => ps.iter().for_each(|p| p.vars(out)),
            Prop::Const(_) | Prop::Atom(_) => {}
        }
    }

    /// Replaces every PNE by its state-vector slot.
    pub fn normalize(&self, instance: &PlanningInstance) -> Result<Prop, GroundError> {
        Ok(match self {
            Prop::Not(p) => Prop::Not(Box::new(p.normalize(instance)?)),
            Prop::And(ps) => Prop::And(ps.iter().map(|p| p.normalize(instance)).collect::<Result<_, _>>()?),
            Prop::Or(ps) => Prop::Or(ps.iter().map(|p| p.normalize(instance)).collect::<Result<_, _>>()?),
            Prop::Compare(op, l, r) => Prop::Compare(*op, l.normalize(instance)?, r.normalize(instance)?),
            p => p.clone(),
        })
    }

    pub fn denormalize(&self, instance: &PlanningInstance) -> Prop {
        match self {
            Prop::Not(p) => Prop::Not(Box::new(p.denormalize(instance))),
            Prop::And(ps) => Prop::And(ps.iter().map(|p| p.denormalize(instance)).collect()),
            Prop::Or(ps) => Prop::Or(ps.iter().map(|p| p.denormalize(instance)).collect()),
            Prop::Compare(op, l, r) => Prop::Compare(*op, l.denormalize(instance), r.denormalize(instance)),
            p => p.clone(),
        }
    }

    /// Conjunction that drops trivially true parts.
    pub fn and(parts: Vec<Prop>) -> Prop {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Prop::Const(true) => {}
                Prop::And(inner) => out.extend(inner),
                p => out.push(p),
            }
        }
        if out.len() == 1 {
            out.pop().unwrap()
        } else {
            Prop::And(out)
        }
    }
}

pub(crate) fn binop_symbol(op: BinOp) -> &'static str {
    match op {
        BinOp::Add => "+",
        BinOp::Sub => "-",
        BinOp::Mul => "*",
        BinOp::Div => "/",
    }
}

pub(crate) fn compop_symbol(op: CompOp) -> &'static str {
    match op {
        CompOp::Gt => ">",
        CompOp::Lt => "<",
        CompOp::Eq => "=",
        CompOp::Ge => ">=",
        CompOp::Le => "<=",
    }
}

impl fmt::Display for NExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NExpr::Const(c) => write!(f, "{c}"),
            NExpr::Pne(p) => write!(f, "{p}"),
            NExpr::Var(i) => write!(f, "X_{}", i + 1),
            NExpr::Binary(op, a, b) => write!(f, "({} {a} {b})", binop_symbol(*op)),
            NExpr::Neg(a) => write!(f, "(- {a})"),
        }
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn list(f: &mut fmt::Formatter<'_>, head: &str, ps: &[Prop]) -> fmt::Result {
            write!(f, "({head}")?;
            for p in ps {
                write!(f, " {p}")?;
            }
            write!(f, ")")
        }
        match self {
            Prop::Const(true) => write!(f, "(and)"),
            Prop::Const(false) => write!(f, "(or)"),
            Prop::Atom(a) => write!(f, "{a}"),
            Prop::Not(p) => write!(f, "(not {p})"),
            Prop::And(ps) => list(f, "and", ps),
            Prop::Or(ps) => list(f, "or", ps),
            Prop::Compare(op, l, r) => write!(f, "({} {l} {r})", compop_symbol(*op)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom(p: &str) -> Prop {
        Prop::Atom(GroundAtom::new(p, vec![]))
    }

    #[test]
    fn closed_world_disjunction() {
        let s = BTreeSet::from([GroundAtom::new("p", vec![])]);
        assert!(Prop::Or(vec![atom("p"), atom("q")]).holds(&s, &[], 0.001));
        assert!(!Prop::And(vec![atom("p"), atom("q")]).holds(&s, &[], 0.001));
        assert!(Prop::Not(Box::new(atom("q"))).holds(&s, &[], 0.001));
    }

    #[test]
    fn undefined_values_are_never_satisfied() {
        let ge = Prop::Compare(CompOp::Ge, NExpr::Var(0), NExpr::Const(0.0));
        let s = BTreeSet::new();
        assert_eq!(ge.eval(&s, &[None], 0.001), None);
        assert!(!Prop::Not(Box::new(ge.clone())).holds(&s, &[None], 0.001));
        let eq = Prop::Compare(CompOp::Eq, NExpr::Var(0), NExpr::Var(0));
        assert!(!eq.holds(&s, &[None], 0.001));
        let div = NExpr::Binary(BinOp::Div, Box::new(NExpr::Const(1.0)), Box::new(NExpr::Const(0.0)));
        assert_eq!(div.eval(&[]), None);
    }

    #[test]
    fn tolerance_bands() {
        let e = 0.001;
        assert!(compare(CompOp::Eq, 1.0, 1.0005, e));
        assert!(!compare(CompOp::Eq, 1.0, 1.002, e));
        assert!(compare(CompOp::Ge, 0.9995, 1.0, e));
        assert!(!compare(CompOp::Gt, 1.0005, 1.0, e));
        assert!(compare(CompOp::Gt, 1.002, 1.0, e));
        assert!(compare(CompOp::Le, 1.0005, 1.0, e));
        assert!(!compare(CompOp::Lt, 0.9995, 1.0, e));
    }

    #[test]
    fn display_uses_one_based_slots() {
        let p = Prop::Compare(
            CompOp::Ge,
            NExpr::Binary(BinOp::Sub, Box::new(NExpr::Var(2)), Box::new(NExpr::Var(1))),
            NExpr::Var(0),
        );
        assert_eq!(p.to_string(), "(>= (- X_3 X_2) X_1)");
    }
}
