use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::ground::GroundError;
use crate::syntax::ast::*;

/// A predicate applied to objects.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GroundAtom {
    pub predicate: Name,
    pub args: Vec<Name>,
}

impl GroundAtom {
    pub fn new(predicate: impl Into<Name>, args: Vec<Name>) -> GroundAtom {
        GroundAtom {
            predicate: predicate.into(),
            args,
        }
    }

    /// Atoms synthesised by the validator itself; they never come from user
    /// text because `$` cannot start a name.
    pub fn is_internal(&self) -> bool {
        self.predicate.starts_with('$')
    }
}

impl fmt::Display for GroundAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.predicate)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

/// A function symbol applied to objects: one numeric state slot.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Pne {
    pub function: Name,
    pub args: Vec<Name>,
}

impl fmt::Display for Pne {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}", self.function)?;
        for a in &self.args {
            write!(f, " {a}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone)]
pub struct PlanningInstance {
    pub domain: DomainAst,
    pub problem: ProblemAst,
    /// Domain constants followed by problem objects, in declaration order.
    pub objects: Vec<Name>,
    /// Every type each object belongs to, `object` included.
    object_types: HashMap<Name, BTreeSet<Name>>,
    /// All well-typed primitive numeric expressions, sorted by function
    /// symbol then arguments. Slot `i` of a numeric vector holds `pnes[i]`.
    pub pnes: Vec<Pne>,
    index: HashMap<Pne, usize>,
    pub init_logical: BTreeSet<GroundAtom>,
    pub init_numeric: Vec<Option<f64>>,
}

fn ancestors(ty: &str, parents: &HashMap<Name, Name>) -> Result<BTreeSet<Name>, GroundError> {
    let mut out = BTreeSet::from(["object".to_string()]);
    let mut cur = ty.to_string();
    while cur != "object" {
        if !out.insert(cur.clone()) {
            return Err(GroundError::CyclicTypes(ty.to_string()));
        }
        cur = match parents.get(&cur) {
            Some(p) => p.clone(),
            None => "object".to_string(),
        };
    }
    Ok(out)
}

impl PlanningInstance {
    pub fn new(domain: DomainAst, problem: ProblemAst) -> Result<PlanningInstance, GroundError> {
        let parents: HashMap<Name, Name> = domain
            .types
            .iter()
            .filter_map(|t| match &t.ty {
                Some(Type::Primitive(p)) => Some((t.name.clone(), p.clone())),
                _ => None,
            })
            .collect();
        let mut objects = Vec::new();
        let mut object_types = HashMap::new();
        for o in domain.constants.iter().chain(&problem.objects) {
            let mut types = BTreeSet::from(["object".to_string()]);
            if let Some(ty) = &o.ty {
                for m in ty.members() {
                    types.extend(ancestors(m, &parents)?);
                }
            }
            if object_types.insert(o.name.clone(), types).is_some() {
                return Err(GroundError::DuplicateObject(o.name.clone()));
            }
            objects.push(o.name.clone());
        }
        let mut instance = PlanningInstance {
            domain,
            problem,
            objects,
            object_types,
            pnes: Vec::new(),
            index: HashMap::new(),
            init_logical: BTreeSet::new(),
            init_numeric: Vec::new(),
        };
        let mut pnes = Vec::new();
        for f in &instance.domain.functions {
            for args in instance.tuples(&f.parameters) {
                pnes.push(Pne {
                    function: f.name.clone(),
                    args,
                });
            }
        }
        pnes.sort();
        instance.index = pnes.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
        instance.pnes = pnes;

        let mut init_logical = BTreeSet::new();
        for lit in &instance.problem.init_literals {
            let atom = instance.ground_init_atom(&lit.atom)?;
            if lit.positive {
                init_logical.insert(atom);
            }
        }
        let mut numeric = vec![None; instance.pnes.len()];
        for n in &instance.problem.init_numeric {
            let pne = Pne {
                function: n.head.function.clone(),
                args: n.head.args.iter().map(ground_name).collect::<Result<_, _>>()?,
            };
            let i = instance.index_of(&pne).ok_or_else(|| GroundError::UnknownPne(pne.to_string()))?;
            numeric[i] = Some(n.value);
        }
        instance.init_logical = init_logical;
        instance.init_numeric = numeric;
        Ok(instance)
    }

    fn ground_init_atom(&self, atom: &AtomicFormula) -> Result<GroundAtom, GroundError> {
        let args: Vec<Name> = atom.args.iter().map(ground_name).collect::<Result<_, _>>()?;
        let ga = GroundAtom::new(atom.predicate.clone(), args);
        if let Some(decl) = self.domain.predicate(&atom.predicate) {
            if !self.well_typed(&decl.parameters, &ga.args) {
                return Err(GroundError::IllTyped(ga.to_string()));
            }
        }
        Ok(ga)
    }

    pub fn dim(&self) -> usize {
        self.pnes.len()
    }

    pub fn index_of(&self, pne: &Pne) -> Option<usize> {
        self.index.get(pne).copied()
    }

    pub fn is_object(&self, name: &str) -> bool {
        self.object_types.contains_key(name)
    }

    /// Whether `object` may instantiate a parameter of type `ty`
    /// (untyped parameters accept every object).
    pub fn has_type(&self, object: &str, ty: Option<&Type>) -> bool {
        let Some(types) = self.object_types.get(object) else {
            return false;
        };
        match ty {
            None => true,
            Some(t) => t.members().iter().any(|m| types.contains(m)),
        }
    }

    pub fn well_typed(&self, params: &[TypedName], args: &[Name]) -> bool {
        params.len() == args.len()
            && params
                .iter()
                .zip(args)
                .all(|(p, a)| self.has_type(a, p.ty.as_ref()))
    }

    pub fn objects_of(&self, ty: Option<&Type>) -> Vec<Name> {
        self.objects
            .iter()
            .filter(|o| self.has_type(o, ty))
            .cloned()
            .collect()
    }

    /// Every well-typed argument tuple for a parameter list.
    pub fn tuples(&self, params: &[TypedName]) -> Vec<Vec<Name>> {
        let mut out = vec![Vec::new()];
        for p in params {
            let candidates = self.objects_of(p.ty.as_ref());
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    candidates.iter().map(move |c| {
                        let mut next = prefix.clone();
                        next.push(c.clone());
                        next
                    })
                })
                .collect();
        }
        out
    }

    /// All well-typed ground atoms of the instance.
    pub fn atoms(&self) -> Vec<GroundAtom> {
        self.domain
            .predicates
            .iter()
            .flat_map(|p| {
                self.tuples(&p.parameters)
                    .into_iter()
                    .map(|args| GroundAtom::new(p.name.clone(), args))
            })
            .collect()
    }
}

fn ground_name(t: &Term) -> Result<Name, GroundError> {
    match t {
        Term::Name(n) => Ok(n.clone()),
        Term::Var(v) => Err(GroundError::NotGround(format!("?{v}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_domain, parse_problem_for};

    fn instance(domain: &str, problem: &str) -> PlanningInstance {
        let d = parse_domain(domain).unwrap();
        let p = parse_problem_for(problem, &d).unwrap();
        PlanningInstance::new(d, p).unwrap()
    }

    #[test]
    fn pnes_are_sorted_and_indexed() {
        let i = instance(
            "(define (domain j) (:requirements :typing :fluents) (:types jug)
               (:functions (capacity ?j - jug) (amount ?j - jug)))",
            "(define (problem p) (:domain j) (:objects j2 j1 - jug)
               (:init (= (amount j1) 6)) (:goal (and)))",
        );
        let names: Vec<String> = i.pnes.iter().map(|p| p.to_string()).collect();
        assert_eq!(names, ["(amount j1)", "(amount j2)", "(capacity j1)", "(capacity j2)"]);
        assert_eq!(i.dim(), 4);
        for (k, p) in i.pnes.iter().enumerate() {
            assert_eq!(i.index_of(p), Some(k));
        }
        assert_eq!(i.init_numeric, vec![Some(6.0), None, None, None]);
    }

    #[test]
    fn subtypes_and_either() {
        let i = instance(
            "(define (domain t) (:requirements :typing) (:types car truck - vehicle vehicle place)
               (:predicates (at ?v - vehicle ?p - place)))",
            "(define (problem p) (:domain t) (:objects c - car t - truck x - place b - (either car place))
               (:init (at c x)) (:goal (and)))",
        );
        let vehicle = Type::Primitive("vehicle".into());
        assert_eq!(i.objects_of(Some(&vehicle)), ["c", "t", "b"]);
        assert_eq!(i.objects_of(None).len(), 4);
        assert_eq!(i.atoms().len(), 3 * 2);
        assert!(i.init_logical.contains(&GroundAtom::new("at", vec!["c".into(), "x".into()])));
    }

    #[test]
    fn ill_typed_init_is_rejected() {
        let d = parse_domain(
            "(define (domain t) (:requirements :typing) (:types a b) (:predicates (p ?x - a)))",
        )
        .unwrap();
        let p = parse_problem_for(
            "(define (problem p) (:domain t) (:objects y - b) (:init (p y)) (:goal (and)))",
            &d,
        )
        .unwrap();
        assert!(matches!(PlanningInstance::new(d, p), Err(GroundError::IllTyped(_))));
    }
}
