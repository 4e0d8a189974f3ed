use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::ground::flatten::{expand_schema, partition_effect};
use crate::ground::instance::{GroundAtom, Pne, PlanningInstance};
use crate::ground::prop::{NExpr, Prop};
use crate::ground::GroundError;
use crate::syntax::ast::*;

/// Which part of a plan step a ground action stands for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    Simple,
    Start,
    End,
    /// The invariant check placed between two end points.
    Monitor,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionName {
    pub schema: Name,
    pub args: Vec<Name>,
    pub role: Role,
}

impl fmt::Display for ActionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.schema)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")?;
        match self.role {
            Role::Simple => Ok(()),
            Role::Start => write!(f, "[start]"),
            Role::End => write!(f, "[end]"),
            Role::Monitor => write!(f, "[inv]"),
        }
    }
}

impl Serialize for ActionName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AssignKind {
    Simple,
    Additive,
    Scaling,
}

/// A numeric effect `(op X_i q)`, read as the assignment proposition
/// `X'_i = rhs` with `rhs` built from `op`, `X_i` and `q`.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentProposition {
    pub lvalue: usize,
    pub op: AssignOp,
    pub operand: NExpr,
}

impl AssignmentProposition {
    pub fn kind(&self) -> AssignKind {
        match self.op {
            AssignOp::Assign => AssignKind::Simple,
            AssignOp::Increase | AssignOp::Decrease => AssignKind::Additive,
            AssignOp::ScaleUp | AssignOp::ScaleDown => AssignKind::Scaling,
        }
    }

    /// The right-hand side in terms of the pre-action vector.
    pub fn rhs(&self) -> NExpr {
        let x = Box::new(NExpr::Var(self.lvalue));
        let q = Box::new(self.operand.clone());
        match self.op {
            AssignOp::Assign => self.operand.clone(),
            AssignOp::Increase => NExpr::Binary(BinOp::Add, x, q),
            AssignOp::Decrease => NExpr::Binary(BinOp::Sub, x, q),
            AssignOp::ScaleUp => NExpr::Binary(BinOp::Mul, x, q),
            AssignOp::ScaleDown => NExpr::Binary(BinOp::Div, x, q),
        }
    }
}

impl fmt::Display for AssignmentProposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(= X'_{} {})", self.lvalue + 1, self.rhs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundAction {
    pub name: ActionName,
    pub pre: Prop,
    pub gpre: BTreeSet<GroundAtom>,
    pub add: BTreeSet<GroundAtom>,
    pub del: BTreeSet<GroundAtom>,
    pub np: Vec<AssignmentProposition>,
    pub lvalues: BTreeSet<usize>,
    pub rvalues: BTreeSet<usize>,
    pub additive_lvalues: BTreeSet<usize>,
}

impl GroundAction {
    pub fn new(
        name: ActionName,
        pre: Prop,
        add: BTreeSet<GroundAtom>,
        del: BTreeSet<GroundAtom>,
        np: Vec<AssignmentProposition>,
    ) -> GroundAction {
        let mut gpre = BTreeSet::new();
        pre.atoms(&mut gpre);
        let mut rvalues = BTreeSet::new();
        pre.vars(&mut rvalues);
        for a in &np {
            a.operand.vars(&mut rvalues);
        }
        let lvalues = np.iter().map(|a| a.lvalue).collect();
        let additive_lvalues = np
            .iter()
            .filter(|a| a.kind() == AssignKind::Additive)
            .map(|a| a.lvalue)
            .collect();
        GroundAction {
            name,
            pre,
            gpre,
            add,
            del,
            np,
            lvalues,
            rvalues,
            additive_lvalues,
        }
    }

    /// Renders the action's components one per line, PNEs by slot.
    pub fn dump(&self) -> String {
        fn set<T: fmt::Display>(items: impl IntoIterator<Item = T>) -> String {
            items.into_iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" ")
        }
        let slots = |s: &BTreeSet<usize>| set(s.iter().map(|i| format!("X_{}", i + 1)));
        format!(
            "{}\n  pre:  {}\n  gpre: {}\n  add:  {}\n  del:  {}\n  np:   {}\n  L:    {}\n  R:    {}\n  L*:   {}\n",
            self.name,
            self.pre,
            set(&self.gpre),
            set(&self.add),
            set(&self.del),
            set(&self.np),
            slots(&self.lvalues),
            slots(&self.rvalues),
            slots(&self.additive_lvalues),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvalidAction {
    pub lvalue: usize,
    /// True when two simple assignments collide, false for mixed kinds.
    pub double_assignment: bool,
}

/// No PNE may be the lvalue of two simple assignments, or of assignments of
/// two different kinds.
pub fn check_valid(a: &GroundAction) -> Result<(), InvalidAction> {
    let mut by_lvalue: BTreeMap<usize, Vec<AssignKind>> = BTreeMap::new();
    for p in &a.np {
        by_lvalue.entry(p.lvalue).or_default().push(p.kind());
    }
    for (&lvalue, kinds) in &by_lvalue {
        let simple = kinds.iter().filter(|k| **k == AssignKind::Simple).count();
        if simple > 1 {
            return Err(InvalidAction {
                lvalue,
                double_assignment: true,
            });
        }
        if kinds.iter().any(|k| *k != kinds[0]) {
            return Err(InvalidAction {
                lvalue,
                double_assignment: false,
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EffectSet {
    pub add: BTreeSet<GroundAtom>,
    pub del: BTreeSet<GroundAtom>,
    pub np: Vec<AssignmentProposition>,
}

impl EffectSet {
    fn extend(&mut self, other: &EffectSet) {
        self.add.extend(other.add.iter().cloned());
        self.del.extend(other.del.iter().cloned());
        self.np.extend(other.np.iter().cloned());
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Conditional {
    pub condition: Prop,
    pub effects: EffectSet,
}

/// The flattened siblings of one ground action, kept factored: a shared
/// precondition and effect plus one entry per conditional effect. Sibling
/// `choice` assumes condition `j` when `choice[j]` is true and its negation
/// otherwise; the siblings are exactly the flat schemas of the action,
/// grounded.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionFamily {
    pub name: ActionName,
    pub pre: Prop,
    pub effects: EffectSet,
    pub conditionals: Vec<Conditional>,
}

impl ActionFamily {
    pub fn sibling(&self, choice: &[bool]) -> GroundAction {
        assert_eq!(choice.len(), self.conditionals.len());
        let mut pre = vec![self.pre.clone()];
        let mut effects = self.effects.clone();
        for (c, &on) in self.conditionals.iter().zip(choice) {
            if on {
                pre.push(c.condition.clone());
                effects.extend(&c.effects);
            } else {
                pre.push(Prop::Not(Box::new(c.condition.clone())));
            }
        }
        let pre = if self.conditionals.is_empty() {
            self.pre.clone()
        } else {
            Prop::And(pre)
        };
        GroundAction::new(self.name.clone(), pre, effects.add, effects.del, effects.np)
    }

    /// All siblings, in the order `flatten` produces them.
    pub fn siblings(&self) -> Vec<GroundAction> {
        let k = self.conditionals.len();
        (0..1u64 << k)
            .map(|n| {
                let choice: Vec<bool> = (0..k).map(|j| n >> (k - 1 - j) & 1 == 0).collect();
                self.sibling(&choice)
            })
            .collect()
    }

    /// The one sibling whose conditional assumptions hold in the state, or
    /// `None` when some condition is undefined (no sibling can then apply).
    pub fn select(&self, logical: &BTreeSet<GroundAtom>, x: &[Option<f64>], eps: f64) -> Option<GroundAction> {
        let choice = self
            .conditionals
            .iter()
            .map(|c| c.condition.eval(logical, x, eps))
            .collect::<Option<Vec<bool>>>()?;
        Some(self.sibling(&choice))
    }
}

/// Variable bindings used while grounding one schema.
pub struct Bindings<'a> {
    map: HashMap<&'a str, &'a str>,
    /// Value substituted for `?duration`.
    pub duration: Option<f64>,
}

impl<'a> Bindings<'a> {
    pub fn new(params: &'a [TypedName], args: &'a [Name], duration: Option<f64>) -> Bindings<'a> {
        Bindings {
            map: params.iter().map(|p| p.name.as_str()).zip(args.iter().map(String::as_str)).collect(),
            duration,
        }
    }

    fn term(&self, t: &Term) -> Result<Name, GroundError> {
        match t {
            Term::Name(n) => Ok(n.clone()),
            Term::Var(v) => self
                .map
                .get(v.as_str())
                .map(|s| s.to_string())
                .ok_or_else(|| GroundError::NotGround(format!("?{v}"))),
        }
    }

    pub fn atom(&self, a: &AtomicFormula) -> Result<GroundAtom, GroundError> {
        Ok(GroundAtom::new(
            a.predicate.clone(),
            a.args.iter().map(|t| self.term(t)).collect::<Result<_, _>>()?,
        ))
    }

    pub fn pne(&self, h: &FHead) -> Result<Pne, GroundError> {
        Ok(Pne {
            function: h.function.clone(),
            args: h.args.iter().map(|t| self.term(t)).collect::<Result<_, _>>()?,
        })
    }

    /// Grounds an expression with PNEs left named.
    pub fn fexp(&self, e: &FExp) -> Result<NExpr, GroundError> {
        Ok(match e {
            FExp::Number(n) => NExpr::Const(*n),
            FExp::Head(h) => NExpr::Pne(self.pne(h)?),
            FExp::Binary(op, a, b) => NExpr::Binary(*op, Box::new(self.fexp(a)?), Box::new(self.fexp(b)?)),
            FExp::Neg(a) => NExpr::Neg(Box::new(self.fexp(a)?)),
            FExp::Duration => NExpr::Const(
                self.duration
                    .ok_or_else(|| GroundError::Unsupported("?duration outside a durative action".into()))?,
            ),
            FExp::TotalTime => return Err(GroundError::Unsupported("total-time outside a metric".into())),
            FExp::ElapsedTime => return Err(GroundError::Unsupported("#t outside a continuous effect".into())),
        })
    }

    /// Grounds a quantifier-free, implication-free goal.
    pub fn goal(&self, g: &GoalDesc) -> Result<Prop, GroundError> {
        Ok(match g {
            GoalDesc::Atom(a) => Prop::Atom(self.atom(a)?),
            GoalDesc::Equality(a, b) => Prop::Const(self.term(a)? == self.term(b)?),
            GoalDesc::Not(inner) => Prop::Not(Box::new(self.goal(inner)?)),
            GoalDesc::And(gs) => Prop::And(gs.iter().map(|g| self.goal(g)).collect::<Result<_, _>>()?),
            GoalDesc::Or(gs) => Prop::Or(gs.iter().map(|g| self.goal(g)).collect::<Result<_, _>>()?),
            GoalDesc::Compare(op, a, b) => Prop::Compare(*op, self.fexp(a)?, self.fexp(b)?),
            GoalDesc::Imply(..) | GoalDesc::Exists(..) | GoalDesc::Forall(..) => {
                return Err(GroundError::Unsupported(format!("goal `{g}` must be expanded before grounding")))
            }
        })
    }

    fn effects(&self, prims: &[Effect], instance: &PlanningInstance) -> Result<EffectSet, GroundError> {
        let mut out = EffectSet::default();
        for e in prims {
            match e {
                Effect::Add(a) => {
                    out.add.insert(self.atom(a)?);
                }
                Effect::Del(a) => {
                    out.del.insert(self.atom(a)?);
                }
                Effect::Assign(op, head, value) => {
                    let pne = self.pne(head)?;
                    let lvalue = instance
                        .index_of(&pne)
                        .ok_or_else(|| GroundError::UnknownPne(pne.to_string()))?;
                    out.np.push(AssignmentProposition {
                        lvalue,
                        op: *op,
                        operand: self.fexp(value)?.normalize(instance)?,
                    });
                }
                other => unreachable!("not a primitive effect: {other:?}"),
            }
        }
        Ok(out)
    }
}

/// Checks that `args` instantiate `params`.
pub fn check_arguments(
    action: &str,
    params: &[TypedName],
    args: &[Name],
    instance: &PlanningInstance,
) -> Result<(), GroundError> {
    if params.len() != args.len() {
        return Err(GroundError::Arity {
            action: action.to_string(),
            expected: params.len(),
            found: args.len(),
        });
    }
    for (p, a) in params.iter().zip(args) {
        if !instance.has_type(a, p.ty.as_ref()) {
            return Err(GroundError::ArgumentType {
                action: action.to_string(),
                argument: a.clone(),
                parameter: p.name.clone(),
            });
        }
    }
    Ok(())
}

/// Grounds a schema for one argument tuple into its family of flat siblings.
pub fn ground(
    schema: &ActionSchema,
    args: &[Name],
    instance: &PlanningInstance,
    role: Role,
    duration: Option<f64>,
) -> Result<ActionFamily, GroundError> {
    check_arguments(&schema.name, &schema.parameters, args, instance)?;
    let expanded = expand_schema(schema, instance);
    let b = Bindings::new(&schema.parameters, args, duration);
    let pre = b.goal(&expanded.precondition)?.normalize(instance)?;
    let (prims, whens) = partition_effect(&expanded.effect);
    let effects = b.effects(&prims, instance)?;
    let conditionals = whens
        .iter()
        .map(|(c, es)| {
            Ok(Conditional {
                condition: b.goal(c)?.normalize(instance)?,
                effects: b.effects(es, instance)?,
            })
        })
        .collect::<Result<_, GroundError>>()?;
    Ok(ActionFamily {
        name: ActionName {
            schema: schema.name.clone(),
            args: args.to_vec(),
            role,
        },
        pre,
        effects,
        conditionals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground::flatten::flatten;
    use crate::syntax::{parse_domain, parse_problem_for};

    const JUGS: &str = "(define (domain jugs) (:requirements :typing :fluents) (:types jug)
      (:functions (amount ?j - jug) (capacity ?j - jug))
      (:action pour :parameters (?jug1 ?jug2 - jug)
        :precondition (>= (- (capacity ?jug2) (amount ?jug2)) (amount ?jug1))
        :effect (and (assign (amount ?jug1) 0) (increase (amount ?jug2) (amount ?jug1)))))";

    fn instance(domain: &str, objects: &str) -> PlanningInstance {
        let d = parse_domain(domain).unwrap();
        let text = format!("(define (problem p) (:domain {}) (:objects {objects}) (:init) (:goal (and)))", d.name);
        let p = parse_problem_for(&text, &d).unwrap();
        PlanningInstance::new(d, p).unwrap()
    }

    fn names(v: &[&str]) -> Vec<Name> {
        v.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn pour_components() {
        let i = instance(JUGS, "j1 j2 - jug");
        // amount j1, amount j2, capacity j1, capacity j2
        let f = ground(&i.domain.actions[0], &names(&["j1", "j2"]), &i, Role::Simple, None).unwrap();
        let a = f.sibling(&[]);
        assert_eq!(a.pre.to_string(), "(>= (- X_4 X_2) X_1)");
        let np: Vec<String> = a.np.iter().map(|p| p.to_string()).collect();
        assert_eq!(np, ["(= X'_1 0)", "(= X'_2 (+ X_2 X_1))"]);
        assert_eq!(a.lvalues, BTreeSet::from([0, 1]));
        assert_eq!(a.additive_lvalues, BTreeSet::from([1]));
        assert_eq!(a.rvalues, BTreeSet::from([0, 1, 3]));
        assert!(check_valid(&a).is_ok());
        assert_eq!(a.pre.denormalize(&i).to_string(), "(>= (- (capacity j2) (amount j2)) (amount j1))");
    }

    #[test]
    fn argument_types_are_checked() {
        let i = instance(JUGS, "j1 j2 - jug");
        let err = ground(&i.domain.actions[0], &names(&["j1", "x"]), &i, Role::Simple, None).unwrap_err();
        assert!(matches!(err, GroundError::ArgumentType { .. }));
        let err = ground(&i.domain.actions[0], &names(&["j1"]), &i, Role::Simple, None).unwrap_err();
        assert!(matches!(err, GroundError::Arity { .. }));
    }

    fn action_with(np: Vec<(AssignOp, f64)>) -> GroundAction {
        let name = ActionName {
            schema: "a".into(),
            args: vec![],
            role: Role::Simple,
        };
        let np = np
            .into_iter()
            .map(|(op, v)| AssignmentProposition {
                lvalue: 0,
                op,
                operand: NExpr::Const(v),
            })
            .collect();
        GroundAction::new(name, Prop::Const(true), BTreeSet::new(), BTreeSet::new(), np)
    }

    #[test]
    fn validity_of_assignments() {
        let two_assign = action_with(vec![(AssignOp::Assign, 0.0), (AssignOp::Assign, 1.0)]);
        assert!(check_valid(&two_assign).unwrap_err().double_assignment);
        assert!(check_valid(&action_with(vec![(AssignOp::Increase, 1.0), (AssignOp::Increase, 2.0)])).is_ok());
        assert!(check_valid(&action_with(vec![(AssignOp::Increase, 1.0), (AssignOp::Decrease, 2.0)])).is_ok());
        let mixed = action_with(vec![(AssignOp::Increase, 1.0), (AssignOp::ScaleUp, 2.0)]);
        assert!(!check_valid(&mixed).unwrap_err().double_assignment);
        assert!(check_valid(&action_with(vec![])).is_ok());
    }

    #[test]
    fn no_op_schema() {
        let i = instance("(define (domain n) (:action noop :parameters () :precondition (and) :effect (and)))", "");
        let a = ground(&i.domain.actions[0], &[], &i, Role::Simple, None).unwrap().sibling(&[]);
        assert!(a.gpre.is_empty() && a.add.is_empty() && a.del.is_empty() && a.np.is_empty());
        assert!(a.lvalues.is_empty() && a.rvalues.is_empty());
    }

    #[test]
    fn siblings_match_flattened_schemas() {
        let i = instance(
            "(define (domain c) (:requirements :conditional-effects :negative-preconditions)
               (:predicates (p ?x) (q ?x) (r))
               (:action a :parameters (?x) :precondition (r)
                 :effect (and (not (r)) (when (p ?x) (q ?x)) (when (q ?x) (not (p ?x))))))",
            "o",
        );
        let schema = &i.domain.actions[0];
        let family = ground(schema, &names(&["o"]), &i, Role::Simple, None).unwrap();
        let siblings = family.siblings();
        let flat = flatten(schema, &i);
        assert_eq!(siblings.len(), 4);
        for (s, f) in siblings.iter().zip(&flat) {
            let g = ground(f, &names(&["o"]), &i, Role::Simple, None).unwrap().sibling(&[]);
            assert_eq!(s.pre.to_string(), g.pre.to_string());
            assert_eq!((&s.add, &s.del), (&g.add, &g.del));
        }
        let applicable: Vec<_> = {
            let state = BTreeSet::from([GroundAtom::new("r", vec![]), GroundAtom::new("p", names(&["o"]))]);
            siblings.iter().filter(|s| s.pre.holds(&state, &[], 0.001)).collect()
        };
        assert_eq!(applicable.len(), 1);
        assert!(applicable[0].add.contains(&GroundAtom::new("q", names(&["o"]))));
    }
}
