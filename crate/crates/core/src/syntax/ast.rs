//! Parse trees for domains, problems and plans.
//!
//! Every identifier is stored lowercased. Variables are stored without their
//! leading `?`.

use std::collections::BTreeSet;

use crate::syntax::requirements::Requirement;
use crate::time::Time;

pub type Name = String;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Primitive(Name),
    /// `(either t1 t2 ...)`, primitive members only.
    Either(Vec<Name>),
}

impl Type {
    pub fn members(&self) -> &[Name] {
        match self {
            Type::Primitive(n) => std::slice::from_ref(n),
            Type::Either(ns) => ns,
        }
    }
}

/// An element of a typed list. `ty` is `None` when no `- type` was given.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypedName {
    pub name: Name,
    pub ty: Option<Type>,
}

impl TypedName {
    pub fn new(name: impl Into<Name>, ty: Option<Type>) -> Self {
        TypedName {
            name: name.into(),
            ty,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Name(Name),
    Var(Name),
}

impl Term {
    pub fn as_name(&self) -> Option<&str> {
        match self {
            Term::Name(n) => Some(n),
            Term::Var(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AtomicFormula {
    pub predicate: Name,
    pub args: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FHead {
    pub function: Name,
    pub args: Vec<Term>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CompOp {
    Gt,
    Lt,
    Eq,
    Ge,
    Le,
}

#[derive(Debug, Clone, PartialEq)]
pub enum FExp {
    Number(f64),
    Head(FHead),
    Binary(BinOp, Box<FExp>, Box<FExp>),
    Neg(Box<FExp>),
    /// `?duration`
    Duration,
    /// `total-time`, metric expressions only.
    TotalTime,
    /// `#t`, continuous effects only.
    ElapsedTime,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GoalDesc {
    Atom(AtomicFormula),
    /// Built-in object equality, `(= t1 t2)`.
    Equality(Term, Term),
    Not(Box<GoalDesc>),
    And(Vec<GoalDesc>),
    Or(Vec<GoalDesc>),
    Imply(Box<GoalDesc>, Box<GoalDesc>),
    Exists(Vec<TypedName>, Box<GoalDesc>),
    Forall(Vec<TypedName>, Box<GoalDesc>),
    Compare(CompOp, FExp, FExp),
}

impl GoalDesc {
    pub fn empty() -> GoalDesc {
        GoalDesc::And(Vec::new())
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, GoalDesc::And(v) if v.is_empty())
    }

    /// Conjoins `other`, extending an existing top-level `and`.
    pub fn conjoin(self, other: GoalDesc) -> GoalDesc {
        match self {
            GoalDesc::And(mut items) => {
                items.push(other);
                GoalDesc::And(items)
            }
            g => GoalDesc::And(vec![g, other]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AssignOp {
    Assign,
    ScaleUp,
    ScaleDown,
    Increase,
    Decrease,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Effect {
    And(Vec<Effect>),
    Add(AtomicFormula),
    Del(AtomicFormula),
    Assign(AssignOp, FHead, FExp),
    Forall(Vec<TypedName>, Box<Effect>),
    /// `(when <GD> <cond-effect>)`; the consequent holds primitive effects only.
    When(GoalDesc, Box<Effect>),
}

impl Effect {
    pub fn empty() -> Effect {
        Effect::And(Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActionSchema {
    pub name: Name,
    pub parameters: Vec<TypedName>,
    pub precondition: GoalDesc,
    pub effect: Effect,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TimeSpec {
    Start,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Annotation {
    AtStart,
    AtEnd,
    OverAll,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimedGoal {
    pub annotation: Annotation,
    pub goal: GoalDesc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DurationOp {
    Eq,
    Le,
    Ge,
    Lt,
    Gt,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DurationConstraint {
    /// `None` when the constraint carries no `(at ...)` wrapper.
    pub time: Option<TimeSpec>,
    pub op: DurationOp,
    pub value: FExp,
}

impl DurationConstraint {
    /// Unannotated constraints are evaluated at the start point.
    pub fn evaluated_at(&self) -> TimeSpec {
        self.time.unwrap_or(TimeSpec::Start)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ContinuousOp {
    Increase,
    Decrease,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DaEffect {
    And(Vec<DaEffect>),
    At(TimeSpec, Effect),
    /// `(increase|decrease <f-head> <rate>*#t)`; only the rate is stored.
    Continuous(ContinuousOp, FHead, FExp),
    Forall(Vec<TypedName>, Box<DaEffect>),
    When(Vec<TimedGoal>, Box<DaEffect>),
}

impl DaEffect {
    pub fn empty() -> DaEffect {
        DaEffect::And(Vec::new())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DurativeSchema {
    pub name: Name,
    pub parameters: Vec<TypedName>,
    pub duration: Vec<DurationConstraint>,
    pub condition: Vec<TimedGoal>,
    pub effect: DaEffect,
}

impl DurativeSchema {
    pub fn has_continuous_effects(&self) -> bool {
        fn walk(e: &DaEffect) -> bool {
            match e {
                DaEffect::And(items) => items.iter().any(walk),
                DaEffect::At(..) => false,
                DaEffect::Continuous(..) => true,
                DaEffect::Forall(_, inner) | DaEffect::When(_, inner) => walk(inner),
            }
        }
        walk(&self.effect)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PredicateDecl {
    pub name: Name,
    pub parameters: Vec<TypedName>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionDecl {
    pub name: Name,
    pub parameters: Vec<TypedName>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainAst {
    pub name: Name,
    pub requirements: BTreeSet<Requirement>,
    pub types: Vec<TypedName>,
    pub constants: Vec<TypedName>,
    pub predicates: Vec<PredicateDecl>,
    pub functions: Vec<FunctionDecl>,
    pub actions: Vec<ActionSchema>,
    pub durative_actions: Vec<DurativeSchema>,
}

impl DomainAst {
    pub fn action(&self, name: &str) -> Option<&ActionSchema> {
        self.actions.iter().find(|a| a.name == name)
    }

    pub fn durative_action(&self, name: &str) -> Option<&DurativeSchema> {
        self.durative_actions.iter().find(|a| a.name == name)
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateDecl> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn function(&self, name: &str) -> Option<&FunctionDecl> {
        self.functions.iter().find(|f| f.name == name)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Literal {
    pub positive: bool,
    pub atom: AtomicFormula,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NumericInit {
    pub head: FHead,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Optimization {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricSpec {
    pub direction: Optimization,
    pub expression: FExp,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LengthSpec {
    pub serial: Option<u64>,
    pub parallel: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemAst {
    pub name: Name,
    pub domain_name: Name,
    pub requirements: BTreeSet<Requirement>,
    pub objects: Vec<TypedName>,
    pub init_literals: Vec<Literal>,
    pub init_numeric: Vec<NumericInit>,
    pub goal: GoalDesc,
    pub metric: Option<MetricSpec>,
    /// Deprecated; kept so it can be reported.
    pub length: Option<LengthSpec>,
}

#[derive(Debug, Clone)]
pub struct PlanStep {
    pub time: Time,
    pub action: Name,
    pub args: Vec<Name>,
    pub duration: Option<Time>,
    /// 1-based source line of the step; not part of equality.
    pub line: usize,
}

impl PartialEq for PlanStep {
    fn eq(&self, other: &Self) -> bool {
        self.time == other.time
            && self.action == other.action
            && self.args == other.args
            && self.duration == other.duration
    }
}

impl Eq for PlanStep {}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PlanAst {
    pub steps: Vec<PlanStep>,
    /// Whether the text carried explicit time stamps.
    pub timed: bool,
}
