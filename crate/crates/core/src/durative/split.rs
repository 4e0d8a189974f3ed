//! Compiling one durative plan step into start, end and invariant actions.

use crate::ground::action::{check_arguments, ground, ActionFamily, Bindings, Role};
use crate::ground::flatten::{expand_goal, rewrite_imply, subst_effect_all, subst_fexp, subst_goal_all};
use crate::ground::{GroundAtom, GroundError, NExpr, PlanningInstance, Prop};
use crate::syntax::ast::*;

/// A ground `#t` effect: `d X_lvalue / dt = ±rate`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousEffect {
    pub lvalue: usize,
    pub op: ContinuousOp,
    pub rate: NExpr,
}

impl ContinuousEffect {
    /// The signed rate.
    pub fn derivative(&self) -> NExpr {
        match self.op {
            ContinuousOp::Increase => self.rate.clone(),
            ContinuousOp::Decrease => NExpr::Neg(Box::new(self.rate.clone())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SplitDurative {
    pub start: ActionFamily,
    pub end: ActionFamily,
    pub inv: ActionFamily,
    /// The over-all conditions, normalised.
    pub invariant: Prop,
    pub continuous: Vec<ContinuousEffect>,
    /// Bookkeeping atoms introduced for conditional effects.
    pub memory: Vec<GroundAtom>,
}

fn timespec_annotation(t: TimeSpec) -> Annotation {
    match t {
        TimeSpec::Start => Annotation::AtStart,
        TimeSpec::End => Annotation::AtEnd,
    }
}

fn duration_goal(dc: &DurationConstraint) -> GoalDesc {
    let op = match dc.op {
        DurationOp::Eq => CompOp::Eq,
        DurationOp::Le => CompOp::Le,
        DurationOp::Ge => CompOp::Ge,
        DurationOp::Lt => CompOp::Lt,
        DurationOp::Gt => CompOp::Gt,
    };
    GoalDesc::Compare(op, FExp::Duration, dc.value.clone())
}

fn subst_da_effect(e: &DaEffect, vars: &[TypedName], values: &[Name]) -> DaEffect {
    let free: Vec<(TypedName, Name)> = vars.iter().cloned().zip(values.iter().cloned()).collect();
    fn go(e: &DaEffect, free: &[(TypedName, Name)]) -> DaEffect {
        let (vs, os): (Vec<TypedName>, Vec<Name>) = free.iter().cloned().unzip();
        match e {
            DaEffect::And(es) => DaEffect::And(es.iter().map(|e| go(e, free)).collect()),
            DaEffect::At(t, eff) => DaEffect::At(*t, subst_effect_all(eff, &vs, &os)),
            DaEffect::Continuous(op, h, rate) => {
                let mut head = FExp::Head(h.clone());
                let mut rate = rate.clone();
                for (v, o) in free {
                    head = subst_fexp(&head, &v.name, o);
                    rate = subst_fexp(&rate, &v.name, o);
                }
                let FExp::Head(h) = head else { unreachable!() };
                DaEffect::Continuous(*op, h, rate)
            }
            DaEffect::Forall(bound, body) => {
                let inner: Vec<_> = free
                    .iter()
                    .filter(|(v, _)| !bound.iter().any(|b| b.name == v.name))
                    .cloned()
                    .collect();
                DaEffect::Forall(bound.clone(), Box::new(go(body, &inner)))
            }
            DaEffect::When(conds, body) => DaEffect::When(
                conds
                    .iter()
                    .map(|c| TimedGoal {
                        annotation: c.annotation,
                        goal: subst_goal_all(&c.goal, &vs, &os),
                    })
                    .collect(),
                Box::new(go(body, free)),
            ),
        }
    }
    go(e, &free)
}

fn expand_da_effect(e: &DaEffect, instance: &PlanningInstance) -> DaEffect {
    match e {
        DaEffect::Forall(vs, body) => DaEffect::And(
            instance
                .tuples(vs)
                .into_iter()
                .map(|t| expand_da_effect(&subst_da_effect(body, vs, &t), instance))
                .collect(),
        ),
        DaEffect::And(es) => DaEffect::And(es.iter().map(|e| expand_da_effect(e, instance)).collect()),
        DaEffect::When(conds, body) => DaEffect::When(
            conds
                .iter()
                .map(|c| TimedGoal {
                    annotation: c.annotation,
                    goal: expand_goal(&rewrite_imply(&c.goal), instance),
                })
                .collect(),
            Box::new(expand_da_effect(body, instance)),
        ),
        e => e.clone(),
    }
}

#[derive(Default)]
struct Parts {
    start_pre: Vec<GoalDesc>,
    end_pre: Vec<GoalDesc>,
    inv_pre: Vec<GoalDesc>,
    start_eff: Vec<Effect>,
    end_eff: Vec<Effect>,
    inv_eff: Vec<Effect>,
    continuous: Vec<(ContinuousOp, FHead, FExp)>,
    memory: Vec<AtomicFormula>,
}

fn and(goals: Vec<GoalDesc>) -> GoalDesc {
    if goals.len() == 1 {
        goals.into_iter().next().unwrap()
    } else {
        GoalDesc::And(goals)
    }
}

fn effect_and(effects: Vec<Effect>) -> Effect {
    if effects.len() == 1 {
        effects.into_iter().next().unwrap()
    } else {
        Effect::And(effects)
    }
}

/// Collects the effects of a `when` consequent by time point.
fn timed_parts(e: &DaEffect, starts: &mut Vec<Effect>, ends: &mut Vec<Effect>) -> Result<(), GroundError> {
    match e {
        DaEffect::And(es) => es.iter().try_for_each(|e| timed_parts(e, starts, ends)),
        DaEffect::At(TimeSpec::Start, eff) => {
            starts.push(eff.clone());
            Ok(())
        }
        DaEffect::At(TimeSpec::End, eff) => {
            ends.push(eff.clone());
            Ok(())
        }
        DaEffect::Continuous(..) => Err(GroundError::Unsupported("conditional continuous effects".into())),
        DaEffect::Forall(..) | DaEffect::When(..) => {
            Err(GroundError::Unsupported("nested quantified or conditional durative effects".into()))
        }
    }
}

impl Parts {
    fn memory_atom(&mut self, step: usize, kind: &str) -> GoalDesc {
        let atom = AtomicFormula {
            predicate: format!("$m{step}-{}-{kind}", self.memory.len()),
            args: vec![],
        };
        self.memory.push(atom.clone());
        GoalDesc::Atom(atom)
    }

    fn effect(&mut self, e: &DaEffect, step: usize, name: &str) -> Result<(), GroundError> {
        match e {
            DaEffect::And(es) => es.iter().try_for_each(|e| self.effect(e, step, name)),
            DaEffect::At(TimeSpec::Start, eff) => {
                self.start_eff.push(eff.clone());
                Ok(())
            }
            DaEffect::At(TimeSpec::End, eff) => {
                self.end_eff.push(eff.clone());
                Ok(())
            }
            DaEffect::Continuous(op, h, rate) => {
                self.continuous.push((*op, h.clone(), rate.clone()));
                Ok(())
            }
            DaEffect::Forall(..) => unreachable!("expanded before splitting"),
            DaEffect::When(conds, body) => {
                let pick = |a: Annotation| {
                    conds
                        .iter()
                        .filter(|c| c.annotation == a)
                        .map(|c| c.goal.clone())
                        .collect::<Vec<_>>()
                };
                let (ps, pe, pi) = (pick(Annotation::AtStart), pick(Annotation::AtEnd), pick(Annotation::OverAll));
                let mut qs = Vec::new();
                let mut qe = Vec::new();
                timed_parts(body, &mut qs, &mut qe)?;
                if !qs.is_empty() {
                    if !pe.is_empty() || !pi.is_empty() {
                        return Err(GroundError::Unsupported(format!(
                            "`{name}` has an at-start effect conditioned on a later condition"
                        )));
                    }
                    self.start_eff.push(Effect::When(and(ps.clone()), Box::new(effect_and(qs))));
                }
                if qe.is_empty() {
                    return Ok(());
                }
                let mut end_cond = pe;
                if !ps.is_empty() {
                    let m = self.memory_atom(step, "ps");
                    let GoalDesc::Atom(ma) = &m else { unreachable!() };
                    self.start_eff.push(Effect::When(and(ps), Box::new(Effect::Add(ma.clone()))));
                    end_cond.push(m);
                }
                if !pi.is_empty() {
                    let m = self.memory_atom(step, "pi");
                    let GoalDesc::Atom(ma) = &m else { unreachable!() };
                    self.start_eff.push(Effect::Add(ma.clone()));
                    let broken = GoalDesc::And(vec![m.clone(), GoalDesc::Not(Box::new(and(pi)))]);
                    self.inv_eff.push(Effect::When(broken, Box::new(Effect::Del(ma.clone()))));
                    end_cond.push(m);
                }
                self.end_eff.push(Effect::When(and(end_cond), Box::new(effect_and(qe))));
                Ok(())
            }
        }
    }
}

/// Splits a durative plan step into its three simple actions, with
/// `?duration` replaced by `duration`. `step` makes memory atoms unique.
pub fn split(
    schema: &DurativeSchema,
    args: &[Name],
    duration: f64,
    step: usize,
    instance: &PlanningInstance,
) -> Result<SplitDurative, GroundError> {
    check_arguments(&schema.name, &schema.parameters, args, instance)?;
    let mut parts = Parts::default();
    for c in &schema.condition {
        let g = expand_goal(&rewrite_imply(&c.goal), instance);
        match c.annotation {
            Annotation::AtStart => parts.start_pre.push(g),
            Annotation::AtEnd => parts.end_pre.push(g),
            Annotation::OverAll => parts.inv_pre.push(g),
        }
    }
    for dc in &schema.duration {
        match timespec_annotation(dc.evaluated_at()) {
            Annotation::AtEnd => parts.end_pre.push(duration_goal(dc)),
            _ => parts.start_pre.push(duration_goal(dc)),
        }
    }
    parts.effect(&expand_da_effect(&schema.effect, instance), step, &schema.name)?;

    let schema_of = |pre: Vec<GoalDesc>, eff: Vec<Effect>| ActionSchema {
        name: schema.name.clone(),
        parameters: schema.parameters.clone(),
        precondition: GoalDesc::And(pre),
        effect: Effect::And(eff),
    };
    let d = Some(duration);
    let invariant = Bindings::new(&schema.parameters, args, d)
        .goal(&GoalDesc::And(parts.inv_pre.clone()))?
        .normalize(instance)?;
    let start = ground(&schema_of(parts.start_pre, parts.start_eff), args, instance, Role::Start, d)?;
    let end = ground(&schema_of(parts.end_pre, parts.end_eff), args, instance, Role::End, d)?;
    let inv = ground(&schema_of(parts.inv_pre, parts.inv_eff), args, instance, Role::Monitor, d)?;
    let b = Bindings::new(&schema.parameters, args, d);
    let continuous = parts
        .continuous
        .iter()
        .map(|(op, h, rate)| {
            let pne = b.pne(h)?;
            Ok(ContinuousEffect {
                lvalue: instance
                    .index_of(&pne)
                    .ok_or_else(|| GroundError::UnknownPne(pne.to_string()))?,
                op: *op,
                rate: b.fexp(rate)?.normalize(instance)?,
            })
        })
        .collect::<Result<_, GroundError>>()?;
    let memory = parts
        .memory
        .iter()
        .map(|a| GroundAtom::new(a.predicate.clone(), vec![]))
        .collect();
    Ok(SplitDurative {
        start,
        end,
        inv,
        invariant,
        continuous,
        memory,
    })
}
