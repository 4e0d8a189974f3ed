//! Closed-form solution of the continuous change over one interval and
//! invariant checking along it.

use std::collections::{BTreeMap, BTreeSet};

use crate::continuous::poly::Poly;
use crate::durative::ContinuousEffect;
use crate::ground::{GroundAtom, NExpr, Prop};
use crate::syntax::ast::BinOp;

#[derive(Debug, Clone, PartialEq)]
pub enum SolveError {
    /// A value the solution depends on is undefined.
    Undefined(usize),
    Unsupported(String),
}

/// Slot trajectories as polynomials in the time elapsed since the start of
/// the interval.
pub type Trajectories = BTreeMap<usize, Poly>;

/// Highest degree of trajectory accepted.
pub const MAX_DEGREE: usize = 2;

/// `expr` as a polynomial in elapsed time, or `Ok(None)` if it reads a
/// changing slot whose trajectory is not known yet.
fn to_poly(
    expr: &NExpr,
    x: &[Option<f64>],
    known: &Trajectories,
    changing: &BTreeSet<usize>,
) -> Result<Option<Poly>, SolveError> {
    Ok(Some(match expr {
        NExpr::Const(c) => Poly::constant(*c),
        NExpr::Var(i) => {
            if let Some(p) = known.get(i) {
                p.clone()
            } else if changing.contains(i) {
                return Ok(None);
            } else {
                Poly::constant(x[*i].ok_or(SolveError::Undefined(*i))?)
            }
        }
        NExpr::Pne(p) => return Err(SolveError::Unsupported(format!("unnormalised {p}"))),
        NExpr::Neg(a) => match to_poly(a, x, known, changing)? {
            Some(p) => -&p,
            None => return Ok(None),
        },
        NExpr::Binary(op, a, b) => {
            let (Some(pa), Some(pb)) = (to_poly(a, x, known, changing)?, to_poly(b, x, known, changing)?) else {
                return Ok(None);
            };
            match op {
                BinOp::Add => &pa + &pb,
                BinOp::Sub => &pa - &pb,
                BinOp::Mul => &pa * &pb,
                BinOp::Div => {
                    if !pb.is_constant() {
                        return Err(SolveError::Unsupported(
                            "division by a continuously changing value".into(),
                        ));
                    }
                    let d = pb.constant_term();
                    if d == 0.0 {
                        return Err(SolveError::Unsupported("division by zero in a rate".into()));
                    }
                    pa.scale(1.0 / d)
                }
            }
        }
    }))
}

/// Solves `dX_i/dt = Σ rates` from `x`. Rates are accumulated per slot.
/// Rates may read other changing slots as long as the dependencies are
/// acyclic and every trajectory stays within [`MAX_DEGREE`].
pub fn trajectories(effects: &[&ContinuousEffect], x: &[Option<f64>]) -> Result<Trajectories, SolveError> {
    let mut rates: BTreeMap<usize, Vec<NExpr>> = BTreeMap::new();
    for e in effects {
        rates.entry(e.lvalue).or_default().push(e.derivative());
    }
    let changing: BTreeSet<usize> = rates.keys().copied().collect();
    let mut known = Trajectories::new();
    while known.len() < changing.len() {
        let mut progress = false;
        for (&slot, exprs) in &rates {
            if known.contains_key(&slot) {
                continue;
            }
            let mut sum = Some(Poly::zero());
            for e in exprs {
                sum = match (sum, to_poly(e, x, &known, &changing)?) {
                    (Some(s), Some(p)) => Some(&s + &p),
                    _ => None,
                };
            }
            if let Some(rate) = sum {
                let start = x[slot].ok_or(SolveError::Undefined(slot))?;
                let traj = rate.integral(start);
                if traj.degree() > MAX_DEGREE {
                    return Err(SolveError::Unsupported(format!(
                        "continuous change of degree {} (at most {MAX_DEGREE} is supported)",
                        traj.degree()
                    )));
                }
                known.insert(slot, traj);
                progress = true;
            }
        }
        if !progress {
            return Err(SolveError::Unsupported(
                "continuous rates that depend on each other cyclically".into(),
            ));
        }
    }
    Ok(known)
}

/// The numeric state `tau` into the interval.
pub fn state_at(x: &[Option<f64>], traj: &Trajectories, tau: f64) -> Vec<Option<f64>> {
    let mut out = x.to_vec();
    for (&slot, p) in traj {
        out[slot] = Some(p.eval(tau));
    }
    out
}

fn comparisons<'a>(p: &'a Prop, out: &mut Vec<(&'a NExpr, &'a NExpr)>) {
    match p {
        Prop::Compare(_, l, r) => out.push((l, r)),
        Prop::Not(q) => comparisons(q, out),
        Prop::And(ps) | Prop::Or(ps) => ps.iter().for_each(|q| comparisons(q, out)),
        Prop::Const(_) | Prop::Atom(_) => {}
    }
}

/// Checks `invariant` along the open interval `(0, dt)`. Truth values can only change where a compared difference
/// crosses `-eps`, `0` or `eps`, so the check evaluates those points and the
/// midpoints between them. Returns the elapsed time of the first failure.
pub fn first_violation(
    invariant: &Prop,
    logical: &BTreeSet<GroundAtom>,
    x: &[Option<f64>],
    traj: &Trajectories,
    dt: f64,
    eps: f64,
) -> Result<Option<f64>, SolveError> {
    let changing: BTreeSet<usize> = traj.keys().copied().collect();
    let mut cmps = Vec::new();
    comparisons(invariant, &mut cmps);
    let mut points = vec![0.0, dt];
    for (l, r) in cmps {
        let (pl, pr) = match (to_poly(l, x, traj, &changing), to_poly(r, x, traj, &changing)) {
            (Ok(Some(a)), Ok(Some(b))) => (a, b),
            (Err(SolveError::Undefined(_)), _) | (_, Err(SolveError::Undefined(_))) => continue,
            (Err(e), _) | (_, Err(e)) => return Err(e),
            _ => unreachable!("every changing slot has a trajectory"),
        };
        let diff = &pl - &pr;
        for c in [-eps, 0.0, eps] {
            let shifted = &diff - &Poly::constant(c);
            let roots = shifted
                .roots_in(0.0, dt)
                .ok_or_else(|| SolveError::Unsupported(format!("invariant of degree {}", shifted.degree())))?;
            points.extend(roots);
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let holds = |tau: f64| invariant.holds(logical, &state_at(x, traj, tau), eps);
    let last = points.len() - 1;
    for (k, &p) in points.iter().enumerate() {
        if k > 0 && k < last && !holds(p) {
            return Ok(Some(p));
        }
        if let Some(&q) = points.get(k + 1) {
            if !holds((p + q) / 2.0) {
                return Ok(Some(p));
            }
        }
    }
    Ok(None)
}
