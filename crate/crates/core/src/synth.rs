//! Synthetic theories and knowledge graphs for tests and benchmarks.

use crate::facts::FactStore;
use crate::logic::{Atom, ConstId, GroundAtom, PredId, Term, Theory};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shape limits for [`random_instance`].
#[derive(Debug, Clone, Copy)]
pub struct RandomShape {
    pub max_constants: usize,
    pub max_predicates: usize,
    pub max_clauses: usize,
    pub max_body: usize,
    pub max_facts: usize,
}

impl Default for RandomShape {
    fn default() -> Self {
        RandomShape {
            max_constants: 8,
            max_predicates: 3,
            max_clauses: 3,
            max_body: 3,
            max_facts: 15,
        }
    }
}

/// A random theory over binary predicates plus a random fact store.
#[derive(Debug, Clone)]
pub struct RandomInstance {
    pub theory: Theory,
    pub facts: Vec<GroundAtom>,
    pub constants: Vec<ConstId>,
    pub predicates: Vec<PredId>,
}

impl RandomInstance {
    pub fn store(&self) -> FactStore {
        FactStore::from_facts(self.facts.iter().cloned())
    }

    /// Every atom over the derivable predicates.
    pub fn head_base(&self) -> Vec<GroundAtom> {
        let mut out = Vec::new();
        for &p in &self.predicates {
            if !self.theory.is_derivable(p) {
                continue;
            }
            for &a in &self.constants {
                for &b in &self.constants {
                    out.push(GroundAtom::new(p, [a, b]));
                }
            }
        }
        out
    }
}

pub fn random_instance(seed: u64, shape: RandomShape) -> RandomInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut theory = Theory::default();
    let n_const = rng.random_range(2..=shape.max_constants.max(2));
    let n_pred = rng.random_range(1..=shape.max_predicates.max(1));
    let constants: Vec<ConstId> = (0..n_const)
        .map(|i| theory.symbols.intern_constant(&format!("c{i}")))
        .collect();
    let predicates: Vec<PredId> = (0..n_pred)
        .map(|i| theory.symbols.intern_predicate(&format!("p{i}"), 2).expect("fresh"))
        .collect();
    let vars: Vec<_> = ["X", "Y", "Z", "W"]
        .iter()
        .map(|v| theory.symbols.intern_variable(v))
        .collect();

    let n_clauses = rng.random_range(1..=shape.max_clauses.max(1));
    for _ in 0..n_clauses {
        let body_len = rng.random_range(1..=shape.max_body.max(1));
        let mut body = Vec::with_capacity(body_len);
        let mut used = Vec::new();
        for _ in 0..body_len {
            let p = *predicates.choose(&mut rng).expect("non-empty");
            let mut args = Vec::with_capacity(2);
            for _ in 0..2 {
                if rng.random_bool(0.08) {
                    args.push(Term::Const(*constants.choose(&mut rng).expect("non-empty")));
                } else {
                    let v = *vars.choose(&mut rng).expect("non-empty");
                    used.push(v);
                    args.push(Term::Var(v));
                }
            }
            body.push(Atom::new(p, args));
        }
        let head_pred = *predicates.choose(&mut rng).expect("non-empty");
        let head_args: Vec<Term> = (0..2)
            .map(|_| match used.choose(&mut rng) {
                Some(v) => Term::Var(*v),
                None => Term::Const(*constants.choose(&mut rng).expect("non-empty")),
            })
            .collect();
        theory.push(Atom::new(head_pred, head_args), body);
    }

    let n_facts = rng.random_range(0..=shape.max_facts);
    let mut facts = Vec::with_capacity(n_facts);
    for _ in 0..n_facts {
        let p = *predicates.choose(&mut rng).expect("non-empty");
        let a = *constants.choose(&mut rng).expect("non-empty");
        let b = *constants.choose(&mut rng).expect("non-empty");
        let f = GroundAtom::new(p, [a, b]);
        if !facts.contains(&f) {
            facts.push(f);
        }
    }
    RandomInstance {
        theory,
        facts,
        constants,
        predicates,
    }
}

/// A complete directed graph (with self loops) over `n` constants for the
/// predicate `p`, and the chain rule `p(X,Z) :- p(X,Y), p(Y,Z)`.
pub fn complete_graph(n: usize) -> (Theory, FactStore) {
    let mut theory = Theory::default();
    let p = theory.symbols.intern_predicate("p", 2).expect("fresh");
    let consts: Vec<ConstId> = (0..n).map(|i| theory.symbols.intern_constant(&format!("c{i}"))).collect();
    let [x, y, z] = ["X", "Y", "Z"].map(|v| Term::Var(theory.symbols.intern_variable(v)));
    theory.push(Atom::new(p, [x, z]), vec![Atom::new(p, [x, y]), Atom::new(p, [y, z])]);
    let facts = consts
        .iter()
        .flat_map(|&a| consts.iter().map(move |&b| GroundAtom::new(p, [a, b])))
        .collect::<Vec<_>>();
    (theory, FactStore::from_facts(facts))
}

/// Size parameters of a generated knowledge graph with chain rules.
#[derive(Debug, Clone, Copy)]
pub struct KgShape {
    pub entities: usize,
    pub relations: usize,
    pub facts: usize,
    pub rules: usize,
    pub test: usize,
}

impl KgShape {
    /// Entity, relation, fact and rule counts of WN18RR.
    pub fn wn18rr() -> Self {
        KgShape {
            entities: 40_943,
            relations: 18,
            facts: 93_003,
            rules: 17,
            test: 3_134,
        }
    }
}

/// A random graph with a heavy-tailed degree profile and random two-hop
/// chain rules `r0(X,Z) :- r1(X,Y), r2(Y,Z)` or inverse-style
/// `r0(X,Y) :- r1(Y,X)`.
pub fn synthetic_kg(shape: KgShape, seed: u64) -> (Theory, FactStore, Vec<GroundAtom>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut theory = Theory::default();
    let ents: Vec<ConstId> = (0..shape.entities)
        .map(|i| theory.symbols.intern_constant(&format!("e{i}")))
        .collect();
    let rels: Vec<PredId> = (0..shape.relations)
        .map(|i| theory.symbols.intern_predicate(&format!("r{i}"), 2).expect("fresh"))
        .collect();
    let [x, y, z] = ["X", "Y", "Z"].map(|v| Term::Var(theory.symbols.intern_variable(v)));
    for _ in 0..shape.rules {
        let h = *rels.choose(&mut rng).expect("relations");
        let b1 = *rels.choose(&mut rng).expect("relations");
        if rng.random_bool(0.3) {
            theory.push(Atom::new(h, [x, y]), vec![Atom::new(b1, [y, x])]);
        } else {
            let b2 = *rels.choose(&mut rng).expect("relations");
            theory.push(Atom::new(h, [x, z]), vec![Atom::new(b1, [x, y]), Atom::new(b2, [y, z])]);
        }
    }
    // squaring a uniform draw skews endpoints toward low ids
    let pick = |rng: &mut ChaCha8Rng| {
        let u: f64 = rng.random();
        ents[((u * u) * ents.len() as f64) as usize % ents.len()]
    };
    let mut seen = rustc_hash::FxHashSet::default();
    let mut facts = Vec::with_capacity(shape.facts + shape.test);
    while facts.len() < shape.facts + shape.test {
        let r = *rels.choose(&mut rng).expect("relations");
        let a = pick(&mut rng);
        let b = pick(&mut rng);
        let f = GroundAtom::new(r, [a, b]);
        if a != b && seen.insert(f.clone()) {
            facts.push(f);
        }
    }
    let test = facts.split_off(shape.facts);
    (theory, FactStore::from_facts(facts), test)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_instances_respect_shape() {
        for seed in 0..50 {
            let inst = random_instance(seed, RandomShape::default());
            assert!(inst.constants.len() <= 8 && inst.predicates.len() <= 3);
            assert!(inst.theory.len() <= 3 && inst.facts.len() <= 15);
            for c in inst.theory.clauses() {
                assert!(c.unrestricted_head_vars().is_empty());
            }
        }
    }

    #[test]
    fn complete_graph_size() {
        let (t, s) = complete_graph(4);
        assert_eq!(s.len(), 16);
        assert_eq!(t.len(), 1);
    }

    #[test]
    fn synthetic_kg_counts() {
        let shape = KgShape {
            entities: 500,
            relations: 4,
            facts: 2000,
            rules: 3,
            test: 50,
        };
        let (t, s, test) = synthetic_kg(shape, 1);
        assert_eq!(s.len(), 2000);
        assert_eq!(test.len(), 50);
        assert_eq!(t.len(), 3);
        assert!(test.iter().all(|f| !s.contains(f)));
    }
}
