use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::ground::{GroundAction, GroundAtom, PlanningInstance};

/// The first interference found between two actions.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Interference {
    /// One action's precondition mentions an atom the other changes.
    Precondition { atom: String },
    /// One action adds what the other deletes.
    AddDelete { atom: String },
    /// One action reads a value the other updates.
    ReadWrite { pne: String },
    /// Both update a value and not both additively.
    WriteWrite { pne: String },
}

impl fmt::Display for Interference {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interference::Precondition { atom } => write!(f, "{atom} is tested by one and changed by the other"),
            Interference::AddDelete { atom } => write!(f, "{atom} is added by one and deleted by the other"),
            Interference::ReadWrite { pne } => write!(f, "{pne} is read by one and updated by the other"),
            Interference::WriteWrite { pne } => write!(f, "{pne} is updated by both, not only additively"),
        }
    }
}

fn first_common<T: Ord + Clone>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> Option<T> {
    a.intersection(b).next().cloned()
}

/// A failed interference clause, with PNEs still as slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Clash {
    Precondition(GroundAtom),
    AddDelete(GroundAtom),
    ReadWrite(usize),
    WriteWrite(usize),
}

/// Checks the four interference clauses, returning the first that fails.
pub fn interference(a: &GroundAction, b: &GroundAction) -> Option<Clash> {
    let changes = |x: &GroundAction| -> BTreeSet<_> { x.add.union(&x.del).cloned().collect() };
    if let Some(atom) = first_common(&a.gpre, &changes(b)).or_else(|| first_common(&b.gpre, &changes(a))) {
        return Some(Clash::Precondition(atom));
    }
    if let Some(atom) = first_common(&a.add, &b.del).or_else(|| first_common(&b.add, &a.del)) {
        return Some(Clash::AddDelete(atom));
    }
    if let Some(i) = first_common(&a.lvalues, &b.rvalues).or_else(|| first_common(&b.lvalues, &a.rvalues)) {
        return Some(Clash::ReadWrite(i));
    }
    let both_additive: BTreeSet<usize> = a.additive_lvalues.intersection(&b.additive_lvalues).copied().collect();
    if let Some(&i) = a.lvalues.intersection(&b.lvalues).find(|i| !both_additive.contains(i)) {
        return Some(Clash::WriteWrite(i));
    }
    None
}

/// Like [`interference`], with PNE slots named.
pub fn describe_interference(a: &GroundAction, b: &GroundAction, instance: &PlanningInstance) -> Option<Interference> {
    Some(match interference(a, b)? {
        Clash::Precondition(atom) => Interference::Precondition { atom: atom.to_string() },
        Clash::AddDelete(atom) => Interference::AddDelete { atom: atom.to_string() },
        Clash::ReadWrite(i) => Interference::ReadWrite {
            pne: instance.pnes[i].to_string(),
        },
        Clash::WriteWrite(i) => Interference::WriteWrite {
            pne: instance.pnes[i].to_string(),
        },
    })
}

pub fn mutex(a: &GroundAction, b: &GroundAction) -> bool {
    interference(a, b).is_some()
}
