//! Requirement keys and the gating check that every construct used by a
//! domain is covered by a declared flag.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::syntax::ast::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(into = "String")]
pub enum Requirement {
    Strips,
    Typing,
    NegativePreconditions,
    DisjunctivePreconditions,
    Equality,
    ExistentialPreconditions,
    UniversalPreconditions,
    QuantifiedPreconditions,
    ConditionalEffects,
    Fluents,
    Adl,
    DurativeActions,
    DurationInequalities,
    ContinuousEffects,
}

impl From<Requirement> for String {
    fn from(r: Requirement) -> String {
        r.to_string()
    }
}

impl Requirement {
    pub const ALL: [Requirement; 14] = [
        Requirement::Strips,
        Requirement::Typing,
        Requirement::NegativePreconditions,
        Requirement::DisjunctivePreconditions,
        Requirement::Equality,
        Requirement::ExistentialPreconditions,
        Requirement::UniversalPreconditions,
        Requirement::QuantifiedPreconditions,
        Requirement::ConditionalEffects,
        Requirement::Fluents,
        Requirement::Adl,
        Requirement::DurativeActions,
        Requirement::DurationInequalities,
        Requirement::ContinuousEffects,
    ];

    /// Key without the leading colon.
    pub fn key(self) -> &'static str {
        match self {
            Requirement::Strips => "strips",
            Requirement::Typing => "typing",
            Requirement::NegativePreconditions => "negative-preconditions",
            Requirement::DisjunctivePreconditions => "disjunctive-preconditions",
            Requirement::Equality => "equality",
            Requirement::ExistentialPreconditions => "existential-preconditions",
            Requirement::UniversalPreconditions => "universal-preconditions",
            Requirement::QuantifiedPreconditions => "quantified-preconditions",
            Requirement::ConditionalEffects => "conditional-effects",
            Requirement::Fluents => "fluents",
            Requirement::Adl => "adl",
            Requirement::DurativeActions => "durative-actions",
            Requirement::DurationInequalities => "duration-inequalities",
            Requirement::ContinuousEffects => "continuous-effects",
        }
    }

    pub fn from_key(key: &str) -> Option<Requirement> {
        Requirement::ALL.into_iter().find(|r| r.key() == key)
    }

    /// The flags this one stands for, itself included.
    pub fn implied(self) -> Vec<Requirement> {
        use Requirement::*;
        match self {
            QuantifiedPreconditions => vec![
                QuantifiedPreconditions,
                ExistentialPreconditions,
                UniversalPreconditions,
            ],
            Adl => vec![
                Adl,
                Strips,
                Typing,
                NegativePreconditions,
                DisjunctivePreconditions,
                Equality,
                QuantifiedPreconditions,
                ExistentialPreconditions,
                UniversalPreconditions,
                ConditionalEffects,
            ],
            r => vec![r],
        }
    }
}

impl fmt::Display for Requirement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, ":{}", self.key())
    }
}

/// Closure of a declared set under abbreviation. An empty declaration means
/// `:strips`.
pub fn expand(declared: &BTreeSet<Requirement>) -> BTreeSet<Requirement> {
    if declared.is_empty() {
        return BTreeSet::from([Requirement::Strips]);
    }
    declared.iter().flat_map(|r| r.implied()).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub requirement: Requirement,
    /// The construct that needs the flag, e.g. "`or` in a goal description".
    pub construct: String,
    /// Where it was first seen, e.g. "action `drive`".
    pub location: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} is used in {} but {} is not declared",
            self.construct, self.location, self.requirement
        )
    }
}

struct Checker {
    available: BTreeSet<Requirement>,
    found: Vec<Diagnostic>,
    location: String,
}

impl Checker {
    fn new(declared: &BTreeSet<Requirement>) -> Checker {
        Checker {
            available: expand(declared),
            found: Vec::new(),
            location: String::new(),
        }
    }

    fn need(&mut self, requirement: Requirement, construct: &str) {
        self.need_any(&[requirement], construct);
    }

    /// Reports the first of `alternatives` unless any of them is available.
    fn need_any(&mut self, alternatives: &[Requirement], construct: &str) {
        if alternatives.iter().any(|r| self.available.contains(r)) {
            return;
        }
        let requirement = alternatives[0];
        if self.found.iter().any(|d| d.requirement == requirement) {
            return;
        }
        self.found.push(Diagnostic {
            requirement,
            construct: construct.to_string(),
            location: self.location.clone(),
        });
    }

    fn typed_list(&mut self, list: &[TypedName]) {
        if list.iter().any(|t| t.ty.is_some()) {
            self.need(Requirement::Typing, "a typed list");
        }
    }

    fn goal(&mut self, g: &GoalDesc) {
        match g {
            GoalDesc::Atom(_) => {}
            GoalDesc::Equality(..) => self.need(Requirement::Equality, "built-in `=`"),
            GoalDesc::Not(inner) => {
                match inner.as_ref() {
                    GoalDesc::Atom(_) | GoalDesc::Equality(..) => self.need_any(
                        &[
                            Requirement::NegativePreconditions,
                            Requirement::DisjunctivePreconditions,
                        ],
                        "a negative literal in a goal description",
                    ),
                    _ => self.need(
                        Requirement::DisjunctivePreconditions,
                        "`not` over a compound goal description",
                    ),
                }
                self.goal(inner);
            }
            GoalDesc::And(items) => items.iter().for_each(|i| self.goal(i)),
            GoalDesc::Or(items) => {
                self.need(Requirement::DisjunctivePreconditions, "`or` in a goal description");
                items.iter().for_each(|i| self.goal(i));
            }
            GoalDesc::Imply(a, b) => {
                self.need(Requirement::DisjunctivePreconditions, "`imply` in a goal description");
                self.goal(a);
                self.goal(b);
            }
            GoalDesc::Exists(vars, inner) => {
                self.need(Requirement::ExistentialPreconditions, "`exists` in a goal description");
                self.typed_list(vars);
                self.goal(inner);
            }
            GoalDesc::Forall(vars, inner) => {
                self.need(Requirement::UniversalPreconditions, "`forall` in a goal description");
                self.typed_list(vars);
                self.goal(inner);
            }
            GoalDesc::Compare(_, l, r) => {
                self.need(Requirement::Fluents, "a numeric comparison");
                self.fexp(l, false);
                self.fexp(r, false);
            }
        }
    }

    fn fexp(&mut self, e: &FExp, in_effect: bool) {
        match e {
            FExp::Number(_) | FExp::TotalTime | FExp::ElapsedTime => {}
            FExp::Head(_) => self.need(Requirement::Fluents, "a numeric fluent"),
            FExp::Binary(_, a, b) => {
                self.fexp(a, in_effect);
                self.fexp(b, in_effect);
            }
            FExp::Neg(a) => self.fexp(a, in_effect),
            FExp::Duration => {
                if in_effect {
                    self.need(
                        Requirement::DurationInequalities,
                        "`?duration` in a numeric effect",
                    );
                }
            }
        }
    }

    fn effect(&mut self, e: &Effect) {
        match e {
            Effect::And(items) => items.iter().for_each(|i| self.effect(i)),
            Effect::Add(_) | Effect::Del(_) => {}
            Effect::Assign(_, _, value) => {
                self.need(Requirement::Fluents, "a numeric effect");
                self.fexp(value, true);
            }
            Effect::Forall(vars, inner) => {
                self.need(Requirement::ConditionalEffects, "`forall` in an effect");
                self.typed_list(vars);
                self.effect(inner);
            }
            Effect::When(cond, inner) => {
                self.need(Requirement::ConditionalEffects, "`when` in an effect");
                self.goal(cond);
                self.effect(inner);
            }
        }
    }

    fn da_effect(&mut self, e: &DaEffect) {
        match e {
            DaEffect::And(items) => items.iter().for_each(|i| self.da_effect(i)),
            DaEffect::At(_, inner) => self.effect(inner),
            DaEffect::Continuous(_, _, rate) => {
                self.need(Requirement::ContinuousEffects, "a continuous effect");
                self.need(Requirement::Fluents, "a numeric effect");
                self.fexp(rate, true);
            }
            DaEffect::Forall(vars, inner) => {
                self.need(Requirement::ConditionalEffects, "`forall` in an effect");
                self.typed_list(vars);
                self.da_effect(inner);
            }
            DaEffect::When(conds, inner) => {
                self.need(Requirement::ConditionalEffects, "`when` in an effect");
                conds.iter().for_each(|c| self.goal(&c.goal));
                self.da_effect(inner);
            }
        }
    }

    fn durative(&mut self, da: &DurativeSchema) {
        self.need(Requirement::DurativeActions, "a durative action");
        self.typed_list(&da.parameters);
        if da.duration.len() > 1 || da.duration.iter().any(|c| c.op != DurationOp::Eq) {
            self.need(Requirement::DurationInequalities, "a duration inequality");
        }
        for c in &da.duration {
            if !matches!(c.value, FExp::Number(_)) {
                self.need(Requirement::Fluents, "a computed duration");
            }
            self.fexp(&c.value, false);
        }
        da.condition.iter().for_each(|c| self.goal(&c.goal));
        self.da_effect(&da.effect);
    }
}

/// Lists every requirement a domain uses without declaring, one diagnostic
/// per missing flag.
pub fn check_requirements(domain: &DomainAst) -> Vec<Diagnostic> {
    let mut c = Checker::new(&domain.requirements);
    c.location = format!("domain `{}`", domain.name);
    if !domain.types.is_empty() {
        c.need(Requirement::Typing, "a `:types` declaration");
    }
    c.typed_list(&domain.types);
    c.typed_list(&domain.constants);
    for p in &domain.predicates {
        c.typed_list(&p.parameters);
    }
    if !domain.functions.is_empty() {
        c.need(Requirement::Fluents, "a `:functions` declaration");
    }
    for f in &domain.functions {
        c.typed_list(&f.parameters);
    }
    for a in &domain.actions {
        c.location = format!("action `{}`", a.name);
        c.typed_list(&a.parameters);
        c.goal(&a.precondition);
        c.effect(&a.effect);
    }
    for da in &domain.durative_actions {
        c.location = format!("durative action `{}`", da.name);
        c.durative(da);
    }
    c.found
}

/// The same check for a problem, against the union of the domain's and the
/// problem's declared flags.
pub fn check_problem_requirements(domain: &DomainAst, problem: &ProblemAst) -> Vec<Diagnostic> {
    let declared: BTreeSet<Requirement> = domain
        .requirements
        .iter()
        .chain(&problem.requirements)
        .copied()
        .collect();
    let mut c = Checker::new(&declared);
    c.location = format!("problem `{}`", problem.name);
    c.typed_list(&problem.objects);
    if !problem.init_numeric.is_empty() {
        c.need(Requirement::Fluents, "a numeric initialisation");
    }
    c.goal(&problem.goal);
    c.found
}
