//! Schema-level rewriting: `imply` elimination, quantifier expansion over the
//! instance's objects and splitting of conditional effects.

use crate::ground::instance::PlanningInstance;
use crate::syntax::ast::*;

fn subst_term(t: &Term, var: &str, value: &str) -> Term {
    match t {
        Term::Var(v) if v == var => Term::Name(value.to_string()),
        t => t.clone(),
    }
}

fn subst_atom(a: &AtomicFormula, var: &str, value: &str) -> AtomicFormula {
    AtomicFormula {
        predicate: a.predicate.clone(),
        args: a.args.iter().map(|t| subst_term(t, var, value)).collect(),
    }
}

fn subst_head(h: &FHead, var: &str, value: &str) -> FHead {
    FHead {
        function: h.function.clone(),
        args: h.args.iter().map(|t| subst_term(t, var, value)).collect(),
    }
}

pub fn subst_fexp(e: &FExp, var: &str, value: &str) -> FExp {
    match e {
        FExp::Head(h) => FExp::Head(subst_head(h, var, value)),
        FExp::Binary(op, a, b) => FExp::Binary(
            *op,
            Box::new(subst_fexp(a, var, value)),
            Box::new(subst_fexp(b, var, value)),
        ),
        FExp::Neg(a) => FExp::Neg(Box::new(subst_fexp(a, var, value))),
        e => e.clone(),
    }
}

fn binds(vars: &[TypedName], var: &str) -> bool {
    vars.iter().any(|v| v.name == var)
}

/// Replaces free occurrences of `?var`; inner quantifiers rebinding the same
/// name shadow it.
pub fn subst_goal(g: &GoalDesc, var: &str, value: &str) -> GoalDesc {
    let s = |g: &GoalDesc| subst_goal(g, var, value);
    match g {
        GoalDesc::Atom(a) => GoalDesc::Atom(subst_atom(a, var, value)),
        GoalDesc::Equality(a, b) => GoalDesc::Equality(subst_term(a, var, value), subst_term(b, var, value)),
        GoalDesc::Not(inner) => GoalDesc::Not(Box::new(s(inner))),
        GoalDesc::And(gs) => GoalDesc::And(gs.iter().map(s).collect()),
        GoalDesc::Or(gs) => GoalDesc::Or(gs.iter().map(s).collect()),
        GoalDesc::Imply(a, b) => GoalDesc::Imply(Box::new(s(a)), Box::new(s(b))),
        GoalDesc::Exists(vs, _) | GoalDesc::Forall(vs, _) if binds(vs, var) => g.clone(),
        GoalDesc::Exists(vs, body) => GoalDesc::Exists(vs.clone(), Box::new(s(body))),
        GoalDesc::Forall(vs, body) => GoalDesc::Forall(vs.clone(), Box::new(s(body))),
        GoalDesc::Compare(op, a, b) => GoalDesc::Compare(*op, subst_fexp(a, var, value), subst_fexp(b, var, value)),
    }
}

pub fn subst_effect(e: &Effect, var: &str, value: &str) -> Effect {
    let s = |e: &Effect| subst_effect(e, var, value);
    match e {
        Effect::And(es) => Effect::And(es.iter().map(s).collect()),
        Effect::Add(a) => Effect::Add(subst_atom(a, var, value)),
        Effect::Del(a) => Effect::Del(subst_atom(a, var, value)),
        Effect::Assign(op, h, v) => Effect::Assign(*op, subst_head(h, var, value), subst_fexp(v, var, value)),
        Effect::Forall(vs, _) if binds(vs, var) => e.clone(),
        Effect::Forall(vs, body) => Effect::Forall(vs.clone(), Box::new(s(body))),
        Effect::When(c, body) => Effect::When(subst_goal(c, var, value), Box::new(s(body))),
    }
}

pub fn subst_goal_all(g: &GoalDesc, vars: &[TypedName], values: &[Name]) -> GoalDesc {
    vars.iter()
        .zip(values)
        .fold(g.clone(), |g, (v, o)| subst_goal(&g, &v.name, o))
}

pub fn subst_effect_all(e: &Effect, vars: &[TypedName], values: &[Name]) -> Effect {
    vars.iter()
        .zip(values)
        .fold(e.clone(), |e, (v, o)| subst_effect(&e, &v.name, o))
}

/// `(imply a b)` becomes `(or (not a) b)`.
pub fn rewrite_imply(g: &GoalDesc) -> GoalDesc {
    match g {
        GoalDesc::Imply(a, b) => GoalDesc::Or(vec![
            GoalDesc::Not(Box::new(rewrite_imply(a))),
            rewrite_imply(b),
        ]),
        GoalDesc::Not(inner) => GoalDesc::Not(Box::new(rewrite_imply(inner))),
        GoalDesc::And(gs) => GoalDesc::And(gs.iter().map(rewrite_imply).collect()),
        GoalDesc::Or(gs) => GoalDesc::Or(gs.iter().map(rewrite_imply).collect()),
        GoalDesc::Exists(vs, body) => GoalDesc::Exists(vs.clone(), Box::new(rewrite_imply(body))),
        GoalDesc::Forall(vs, body) => GoalDesc::Forall(vs.clone(), Box::new(rewrite_imply(body))),
        g => g.clone(),
    }
}

/// Expands `exists` into a disjunction and `forall` into a conjunction over
/// every well-typed substitution; an empty domain gives `(or)` and `(and)`.
pub fn expand_goal(g: &GoalDesc, instance: &PlanningInstance) -> GoalDesc {
    match g {
        GoalDesc::Exists(vs, body) | GoalDesc::Forall(vs, body) => {
            let parts = instance
                .tuples(vs)
                .into_iter()
                .map(|t| expand_goal(&subst_goal_all(body, vs, &t), instance))
                .collect();
            if matches!(g, GoalDesc::Exists(..)) {
                GoalDesc::Or(parts)
            } else {
                GoalDesc::And(parts)
            }
        }
        GoalDesc::Not(inner) => GoalDesc::Not(Box::new(expand_goal(inner, instance))),
        GoalDesc::And(gs) => GoalDesc::And(gs.iter().map(|g| expand_goal(g, instance)).collect()),
        GoalDesc::Or(gs) => GoalDesc::Or(gs.iter().map(|g| expand_goal(g, instance)).collect()),
        GoalDesc::Imply(a, b) => {
            GoalDesc::Imply(Box::new(expand_goal(a, instance)), Box::new(expand_goal(b, instance)))
        }
        g => g.clone(),
    }
}

pub fn expand_effect(e: &Effect, instance: &PlanningInstance) -> Effect {
    match e {
        Effect::Forall(vs, body) => Effect::And(
            instance
                .tuples(vs)
                .into_iter()
                .map(|t| expand_effect(&subst_effect_all(body, vs, &t), instance))
                .collect(),
        ),
        Effect::And(es) => Effect::And(es.iter().map(|e| expand_effect(e, instance)).collect()),
        Effect::When(c, body) => Effect::When(
            expand_goal(&rewrite_imply(c), instance),
            Box::new(expand_effect(body, instance)),
        ),
        e => e.clone(),
    }
}

/// Separates an expanded effect into its unconditional primitives and its
/// conditional effects, in textual order.
pub fn partition_effect(e: &Effect) -> (Vec<Effect>, Vec<(GoalDesc, Vec<Effect>)>) {
    fn walk(e: &Effect, prims: &mut Vec<Effect>, whens: &mut Vec<(GoalDesc, Vec<Effect>)>) {
        match e {
            Effect::And(es) => es.iter().for_each(|e| walk(e, prims, whens)),
            Effect::When(c, body) => {
                let mut inner = Vec::new();
                let mut nested = Vec::new();
                walk(body, &mut inner, &mut nested);
                debug_assert!(nested.is_empty(), "conditional effects do not nest");
                whens.push((c.clone(), inner));
            }
            Effect::Forall(..) => unreachable!("quantified effects are expanded first"),
            prim => prims.push(prim.clone()),
        }
    }
    let mut prims = Vec::new();
    let mut whens = Vec::new();
    walk(e, &mut prims, &mut whens);
    (prims, whens)
}

/// Rewrites `imply` and expands quantifiers in both precondition and effect.
pub fn expand_schema(schema: &ActionSchema, instance: &PlanningInstance) -> ActionSchema {
    ActionSchema {
        name: schema.name.clone(),
        parameters: schema.parameters.clone(),
        precondition: expand_goal(&rewrite_imply(&schema.precondition), instance),
        effect: expand_effect(&schema.effect, instance),
    }
}

/// Produces the flat schemas of an action: no `imply`, no quantifiers and
/// no conditional effects. Each `when` doubles the family: one copy assumes
/// its condition and gains its effects, the other assumes the negation.
/// The copy assuming every condition comes first.
pub fn flatten(schema: &ActionSchema, instance: &PlanningInstance) -> Vec<ActionSchema> {
    let expanded = expand_schema(schema, instance);
    let (prims, whens) = partition_effect(&expanded.effect);
    let mut out = vec![(expanded.precondition, prims)];
    for (cond, effects) in whens {
        out = out
            .into_iter()
            .flat_map(|(pre, eff)| {
                let mut with = eff.clone();
                with.extend(effects.iter().cloned());
                [
                    (pre.clone().conjoin(cond.clone()), with),
                    (pre.conjoin(GoalDesc::Not(Box::new(cond.clone()))), eff),
                ]
            })
            .collect();
    }
    out.into_iter()
        .map(|(precondition, effects)| ActionSchema {
            name: schema.name.clone(),
            parameters: schema.parameters.clone(),
            precondition,
            effect: Effect::And(effects),
        })
        .collect()
}
