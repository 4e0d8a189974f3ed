use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::ground::action::{AssignKind, AssignmentProposition, GroundAction};
use crate::ground::prop::apply_binop;
use crate::ground::{GroundAtom, PlanningInstance, Prop};
use crate::syntax::ast::{AssignOp, BinOp};
use crate::time::Time;

/// A time-stamped logical and numeric state. `None` slots are undefined.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct State {
    pub time: Time,
    pub logical: BTreeSet<GroundAtom>,
    pub numeric: Vec<Option<f64>>,
}

impl State {
    pub fn initial(instance: &PlanningInstance) -> State {
        State {
            time: Time::ZERO,
            logical: instance.init_logical.clone(),
            numeric: instance.init_numeric.clone(),
        }
    }

    /// Atoms a user can see; bookkeeping atoms are filtered out.
    pub fn visible_atoms(&self) -> impl Iterator<Item = &GroundAtom> {
        self.logical.iter().filter(|a| !a.is_internal())
    }
}

pub fn satisfies(state: &State, p: &Prop, eps: f64) -> bool {
    p.holds(&state.logical, &state.numeric, eps)
}

/// Top-level conjuncts of `p` that do not hold, for diagnostics, with PNEs
/// shown by name.
pub fn failing_conjuncts(state: &State, p: &Prop, eps: f64, instance: &PlanningInstance) -> Vec<String> {
    fn collect<'a>(p: &'a Prop, out: &mut Vec<&'a Prop>) {
        match p {
            Prop::And(ps) => ps.iter().for_each(|q| collect(q, out)),
            q => out.push(q),
        }
    }
    let mut parts = Vec::new();
    collect(p, &mut parts);
    parts
        .into_iter()
        .filter(|q| !satisfies(state, q, eps))
        .map(|q| {
            let text = q.denormalize(instance).to_string();
            if q.eval(&state.logical, &state.numeric, eps).is_none() {
                format!("{text} (undefined)")
            } else {
                text
            }
        })
        .collect()
}

/// Applies the combined numeric updates of a set of actions to `x`. Every
/// right-hand side reads the pre-update vector. Concurrent updates of one
/// slot are only legal when all are additive, in which case they sum.
pub fn apply_all_updates<'a>(
    actions: impl IntoIterator<Item = &'a GroundAction>,
    x: &[Option<f64>],
) -> Vec<Option<f64>> {
    let mut by_slot: BTreeMap<usize, Vec<&AssignmentProposition>> = BTreeMap::new();
    for a in actions {
        for p in &a.np {
            by_slot.entry(p.lvalue).or_default().push(p);
        }
    }
    let mut out = x.to_vec();
    for (slot, props) in by_slot {
        out[slot] = combined(slot, &props, x);
    }
    out
}

fn combined(slot: usize, props: &[&AssignmentProposition], x: &[Option<f64>]) -> Option<f64> {
    if props.len() == 1 {
        return props[0].rhs().eval(x);
    }
    match props[0].kind() {
        AssignKind::Simple => props[0].rhs().eval(x),
        AssignKind::Additive => {
            let mut v = x[slot]?;
            for p in props {
                let q = p.operand.eval(x)?;
                let op = if p.op == AssignOp::Increase { BinOp::Add } else { BinOp::Sub };
                v = apply_binop(op, v, q)?;
            }
            Some(v)
        }
        AssignKind::Scaling => {
            let mut v = x[slot]?;
            for p in props {
                let q = p.operand.eval(x)?;
                let op = if p.op == AssignOp::ScaleUp { BinOp::Mul } else { BinOp::Div };
                v = apply_binop(op, v, q)?;
            }
            Some(v)
        }
    }
}

/// The updating function of one valid action.
pub fn apply_updates(a: &GroundAction, x: &[Option<f64>]) -> Vec<Option<f64>> {
    apply_all_updates([a], x)
}
