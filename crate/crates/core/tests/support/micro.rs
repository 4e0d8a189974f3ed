//! Random micro-instances of simple numeric planning and a direct simulator
//! for them, written from the definitions without the library.

use rand::seq::SliceRandom;
use rand::Rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cmp {
    Ge,
    Le,
    Gt,
    Lt,
    Eq,
}

impl Cmp {
    fn symbol(self) -> &'static str {
        match self {
            Cmp::Ge => ">=",
            Cmp::Le => "<=",
            Cmp::Gt => ">",
            Cmp::Lt => "<",
            Cmp::Eq => "=",
        }
    }

    fn holds(self, l: f64, r: f64, eps: f64) -> bool {
        match self {
            Cmp::Ge => l >= r - eps,
            Cmp::Le => l <= r + eps,
            Cmp::Gt => l > r + eps,
            Cmp::Lt => l < r - eps,
            Cmp::Eq => (l - r).abs() <= eps,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Update {
    Assign,
    Increase,
    Decrease,
    ScaleUp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Operand {
    Const(f64),
    Slot(usize),
}

#[derive(Debug, Clone, Default)]
pub struct Action {
    pub pos: Vec<usize>,
    pub neg: Vec<usize>,
    pub num: Vec<(Cmp, usize, f64)>,
    pub add: Vec<usize>,
    pub del: Vec<usize>,
    pub updates: Vec<(Update, usize, Operand)>,
}

impl Action {
    fn reads(&self) -> Vec<usize> {
        let mut r: Vec<usize> = self.num.iter().map(|(_, s, _)| *s).collect();
        for (_, _, o) in &self.updates {
            if let Operand::Slot(s) = o {
                r.push(*s);
            }
        }
        r
    }

    fn writes(&self) -> Vec<usize> {
        self.updates.iter().map(|(_, s, _)| *s).collect()
    }

    fn additive(&self, slot: usize) -> bool {
        self.updates
            .iter()
            .any(|(u, s, _)| *s == slot && matches!(u, Update::Increase | Update::Decrease))
    }
}

#[derive(Debug, Clone)]
pub struct Micro {
    pub atoms: usize,
    pub pnes: usize,
    pub init_atoms: Vec<bool>,
    pub init_num: Vec<Option<f64>>,
    pub actions: Vec<Action>,
    /// `(time, action)` in plan order.
    pub plan: Vec<(u32, usize)>,
    pub goal_pos: Vec<usize>,
    pub goal_num: Vec<(Cmp, usize, f64)>,
}

fn pick<R: Rng>(rng: &mut R, n: usize, max: usize) -> Vec<usize> {
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    all.truncate(rng.gen_range(0..=max));
    all.sort();
    all
}

fn cmp<R: Rng>(rng: &mut R) -> Cmp {
    *[Cmp::Ge, Cmp::Le, Cmp::Gt, Cmp::Lt, Cmp::Eq].choose(rng).unwrap()
}

fn small<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(-3..=6) as f64
}

impl Micro {
    pub fn generate<R: Rng>(rng: &mut R) -> Micro {
        let atoms = rng.gen_range(1..=6);
        let pnes = rng.gen_range(0..=2);
        let n_actions = rng.gen_range(1..=4);
        let mut actions = Vec::new();
        for _ in 0..n_actions {
            let pre = pick(rng, atoms, 2);
            let split = rng.gen_range(0..=pre.len());
            let mut a = Action {
                pos: pre[..split].to_vec(),
                neg: pre[split..].to_vec(),
                add: pick(rng, atoms, 2),
                del: pick(rng, atoms, 2),
                ..Action::default()
            };
            for s in pick(rng, pnes, 1) {
                a.num.push((cmp(rng), s, small(rng)));
            }
            for s in pick(rng, pnes, 2) {
                let u = *[Update::Assign, Update::Increase, Update::Decrease, Update::ScaleUp].choose(rng).unwrap();
                let o = if rng.gen_bool(0.3) {
                    Operand::Slot(rng.gen_range(0..pnes))
                } else {
                    Operand::Const(small(rng))
                };
                a.updates.push((u, s, o));
            }
            actions.push(a);
        }
        let steps = rng.gen_range(1..=5);
        let mut plan: Vec<(u32, usize)> = (0..steps)
            .map(|_| (rng.gen_range(1..=4), rng.gen_range(0..n_actions)))
            .collect();
        plan.sort_by_key(|(t, _)| *t);
        let goal_num = pick(rng, pnes, 1).into_iter().map(|s| (cmp(rng), s, small(rng))).collect();
        Micro {
            atoms,
            pnes,
            init_atoms: (0..atoms).map(|_| rng.gen_bool(0.5)).collect(),
            init_num: (0..pnes)
                .map(|_| if rng.gen_bool(0.15) { None } else { Some(small(rng)) })
                .collect(),
            actions,
            plan,
            goal_pos: pick(rng, atoms, 2),
            goal_num,
        }
    }

    pub fn domain_text(&self) -> String {
        let mut s = String::from("(define (domain micro) (:requirements :negative-preconditions :fluents)\n");
        s += "  (:predicates";
        for i in 0..self.atoms {
            s += &format!(" (p{i})");
        }
        s += ")\n";
        if self.pnes > 0 {
            s += "  (:functions";
            for i in 0..self.pnes {
                s += &format!(" (f{i})");
            }
            s += ")\n";
        }
        for (k, a) in self.actions.iter().enumerate() {
            let mut pre: Vec<String> = a.pos.iter().map(|i| format!("(p{i})")).collect();
            pre.extend(a.neg.iter().map(|i| format!("(not (p{i}))")));
            pre.extend(a.num.iter().map(|(c, s, v)| format!("({} (f{s}) {v})", c.symbol())));
            let mut eff: Vec<String> = a.add.iter().map(|i| format!("(p{i})")).collect();
            eff.extend(a.del.iter().map(|i| format!("(not (p{i}))")));
            for (u, slot, o) in &a.updates {
                let op = match u {
                    Update::Assign => "assign",
                    Update::Increase => "increase",
                    Update::Decrease => "decrease",
                    Update::ScaleUp => "scale-up",
                };
                let o = match o {
                    Operand::Const(c) => c.to_string(),
                    Operand::Slot(j) => format!("(f{j})"),
                };
                eff.push(format!("({op} (f{slot}) {o})"));
            }
            s += &format!(
                "  (:action a{k} :parameters () :precondition (and {}) :effect (and {}))\n",
                pre.join(" "),
                eff.join(" ")
            );
        }
        s + ")\n"
    }

    pub fn problem_text(&self) -> String {
        let mut init: Vec<String> = (0..self.atoms)
            .filter(|i| self.init_atoms[*i])
            .map(|i| format!("(p{i})"))
            .collect();
        for (i, v) in self.init_num.iter().enumerate() {
            if let Some(v) = v {
                init.push(format!("(= (f{i}) {v})"));
            }
        }
        let mut goal: Vec<String> = self.goal_pos.iter().map(|i| format!("(p{i})")).collect();
        goal.extend(self.goal_num.iter().map(|(c, s, v)| format!("({} (f{s}) {v})", c.symbol())));
        format!(
            "(define (problem m) (:domain micro) (:init {}) (:goal (and {})))",
            init.join(" "),
            goal.join(" ")
        )
    }

    pub fn plan_text(&self) -> String {
        self.plan.iter().map(|(t, a)| format!("{t}: (a{a})\n")).collect()
    }
}

/// The final state of a successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct Final {
    pub atoms: Vec<bool>,
    pub num: Vec<Option<f64>>,
}

fn interferes(a: &Action, b: &Action) -> bool {
    let changes = |x: &Action| -> Vec<usize> { x.add.iter().chain(&x.del).copied().collect() };
    let tests = |x: &Action| -> Vec<usize> { x.pos.iter().chain(&x.neg).copied().collect() };
    let meets = |x: &[usize], y: &[usize]| x.iter().any(|i| y.contains(i));
    meets(&tests(a), &changes(b))
        || meets(&tests(b), &changes(a))
        || meets(&a.add, &b.del)
        || meets(&b.add, &a.del)
        || meets(&a.reads(), &b.writes())
        || meets(&b.reads(), &a.writes())
        || a
            .writes()
            .iter()
            .any(|s| b.writes().contains(s) && !(a.additive(*s) && b.additive(*s)))
}

fn operand(o: Operand, x: &[Option<f64>]) -> Option<f64> {
    match o {
        Operand::Const(c) => Some(c),
        Operand::Slot(s) => x[s],
    }
}

fn test(c: Cmp, v: Option<f64>, k: f64, eps: f64) -> bool {
    v.is_some_and(|v| c.holds(v, k, eps))
}

/// Runs the plan of `m`. `None` if it is not valid.
pub fn simulate(m: &Micro, eps: f64) -> Option<Final> {
    let mut atoms = m.init_atoms.clone();
    let mut x = m.init_num.clone();
    let mut k = 0;
    while k < m.plan.len() {
        let t = m.plan[k].0;
        let group: Vec<&Action> = m.plan[k..]
            .iter()
            .take_while(|(u, _)| *u == t)
            .map(|(_, a)| &m.actions[*a])
            .collect();
        k += group.len();
        for (i, a) in group.iter().enumerate() {
            if group[i + 1..].iter().any(|b| interferes(a, b)) {
                return None;
            }
        }
        for a in &group {
            let ok = a.pos.iter().all(|i| atoms[*i])
                && a.neg.iter().all(|i| !atoms[*i])
                && a.num.iter().all(|(c, s, v)| test(*c, x[*s], *v, eps));
            if !ok {
                return None;
            }
        }
        let mut next_atoms = atoms.clone();
        for a in &group {
            for i in &a.del {
                next_atoms[*i] = false;
            }
        }
        for a in &group {
            for i in &a.add {
                next_atoms[*i] = true;
            }
        }
        let mut next_x = x.clone();
        for slot in 0..m.pnes {
            let writes: Vec<(Update, Operand)> = group
                .iter()
                .flat_map(|a| a.updates.iter().filter(|(_, s, _)| *s == slot).map(|(u, _, o)| (*u, *o)))
                .collect();
            if writes.is_empty() {
                continue;
            }
            let old = x[slot];
            next_x[slot] = if writes.iter().all(|(u, _)| matches!(u, Update::Increase | Update::Decrease)) {
                old.and_then(|start| {
                    writes.iter().try_fold(start, |acc, (u, o)| {
                        let v = operand(*o, &x)?;
                        Some(if *u == Update::Increase { acc + v } else { acc - v })
                    })
                })
            } else {
                let (u, o) = writes[0];
                let v = operand(o, &x);
                match u {
                    Update::Assign => v,
                    Update::ScaleUp => old.zip(v).map(|(a, b)| a * b),
                    _ => unreachable!("non-additive writes are alone"),
                }
            };
        }
        atoms = next_atoms;
        x = next_x;
    }
    let ok = m.goal_pos.iter().all(|i| atoms[*i]) && m.goal_num.iter().all(|(c, s, v)| test(*c, x[*s], *v, eps));
    ok.then_some(Final { atoms, num: x })
}
