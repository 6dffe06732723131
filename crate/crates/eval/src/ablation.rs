//! Splits whose queries need an exact number of chained rule applications.

use crate::metrics::EvalError;
use bcg_core::facts::FactStore;
use bcg_core::grounder::Limit;
use bcg_core::logic::{ConstId, GroundAtom, PredId, Term, Theory};
use bcg_core::oracle::oracle_provable;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustc_hash::{FxHashMap, FxHashSet};
use std::collections::{BTreeSet, VecDeque};

#[derive(Debug, Clone)]
pub struct AblationSplit {
    pub hops: usize,
    pub train: FactStore,
    pub queries: Vec<GroundAtom>,
    pub removed: Vec<GroundAtom>,
}

/// Predicates `(t, l)` of a rule shaped `t(X,Z) :- l(X,Y), t(Y,Z)`.
fn chain_shape(theory: &Theory, rule_id: usize) -> Option<(PredId, PredId)> {
    let c = theory.clauses().get(rule_id)?;
    let var = |t: Term| t.as_var();
    if c.body.len() != 2 || c.head.args.len() != 2 {
        return None;
    }
    let (x, z) = (var(c.head.args[0])?, var(c.head.args[1])?);
    let (link, rec) = if c.body[0].pred == c.head.pred { (&c.body[1], &c.body[0]) } else { (&c.body[0], &c.body[1]) };
    if rec.pred != c.head.pred || link.pred == c.head.pred || link.args.len() != 2 || rec.args.len() != 2 {
        return None;
    }
    let y = var(link.args[1])?;
    let distinct = x != y && y != z && x != z;
    (distinct && var(link.args[0])? == x && var(rec.args[0])? == y && var(rec.args[1])? == z).then_some((c.head.pred, link.pred))
}

struct Builder<'a> {
    theory: Theory,
    target: PredId,
    link: PredId,
    adj: FxHashMap<ConstId, Vec<ConstId>>,
    facts: FxHashSet<GroundAtom>,
    by_subject: FxHashMap<ConstId, Vec<&'a GroundAtom>>,
    hops: usize,
}

impl Builder<'_> {
    fn ball(&self, x: ConstId) -> FxHashMap<ConstId, usize> {
        let mut dist = FxHashMap::default();
        dist.insert(x, 0);
        let mut queue = VecDeque::from([x]);
        while let Some(a) = queue.pop_front() {
            let d = dist[&a];
            if d == self.hops {
                continue;
            }
            for &b in self.adj.get(&a).into_iter().flatten() {
                if let std::collections::hash_map::Entry::Vacant(e) = dist.entry(b) {
                    e.insert(d + 1);
                    queue.push_back(b);
                }
            }
        }
        dist
    }

    /// Provable with `BC_{1,d}` from the current facts, checked by the oracle
    /// on the `hops`-ball around the query subject. Proofs of this rule only
    /// visit link-reachable subjects, so the restriction is exact.
    fn provable(&self, q: &GroundAtom, d: usize) -> bool {
        if d == 0 {
            return false;
        }
        let ball = self.ball(q.args[0]);
        let mut domain: Vec<ConstId> = ball.keys().copied().collect();
        domain.push(q.args[1]);
        domain.sort_unstable();
        domain.dedup();
        let inside: FxHashSet<ConstId> = domain.iter().copied().collect();
        let facts: BTreeSet<GroundAtom> = self
            .facts
            .iter()
            .filter(|f| (f.pred == self.target || f.pred == self.link) && f.args.iter().all(|a| inside.contains(a)))
            .cloned()
            .collect();
        let got = oracle_provable(&self.theory, &facts, &domain, Limit::Finite(1), Limit::Finite(d), std::slice::from_ref(q));
        got.contains(q)
    }

    fn certified(&self, q: &GroundAtom) -> bool {
        !self.facts.contains(q) && self.provable(q, self.hops) && !self.provable(q, self.hops - 1)
    }
}

/// Picks `n_queries` facts from `candidates` and removes target facts so each
/// query is provable by `BC_{1,hops}` and not by `BC_{1,hops-1}` under the
/// chain rule `rule_id`. Every target fact of a subject closer than `hops`
/// links to the query subject is removed.
pub fn build_ablation_split(
    store: &FactStore,
    theory: &Theory,
    rule_id: usize,
    hops: usize,
    candidates: &[GroundAtom],
    n_queries: usize,
    seed: u64,
) -> Result<AblationSplit, EvalError> {
    if hops == 0 {
        return Err(EvalError::Ablation("hops must be at least 1".into()));
    }
    let (target, link) = chain_shape(theory, rule_id)
        .ok_or_else(|| EvalError::Ablation("rule must have the shape t(X,Z) :- l(X,Y), t(Y,Z)".into()))?;
    let mut single = Theory::new(theory.symbols.clone());
    let c = theory.clause(rule_id);
    single.push(c.head.clone(), c.body.clone());

    let mut adj: FxHashMap<ConstId, Vec<ConstId>> = FxHashMap::default();
    for f in store.facts_of(link) {
        adj.entry(f.args[0]).or_default().push(f.args[1]);
    }
    for list in adj.values_mut() {
        list.sort_unstable();
        list.dedup();
    }
    let mut by_subject: FxHashMap<ConstId, Vec<&GroundAtom>> = FxHashMap::default();
    for f in store.facts_of(target) {
        by_subject.entry(f.args[0]).or_default().push(f);
    }
    let mut b = Builder {
        theory: single,
        target,
        link,
        adj,
        facts: store.iter().cloned().collect(),
        by_subject,
        hops,
    };

    let mut order: Vec<&GroundAtom> = candidates.iter().filter(|q| q.pred == target && q.args.len() == 2).collect();
    order.sort();
    order.dedup();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut queries: Vec<GroundAtom> = Vec::new();
    let mut used: FxHashSet<ConstId> = FxHashSet::default();
    for q in order {
        if queries.len() == n_queries {
            break;
        }
        let (x, z) = (q.args[0], q.args[1]);
        if used.contains(&x) {
            continue;
        }
        let ball = b.ball(x);
        let endpoint = ball
            .iter()
            .any(|(&y, &d)| d == hops && b.facts.contains(&GroundAtom::new(target, [y, z])));
        if !endpoint {
            continue;
        }
        let mut removed = Vec::new();
        for (&y, &d) in &ball {
            if d < hops {
                for f in b.by_subject.get(&y).into_iter().flatten() {
                    if b.facts.remove(*f) {
                        removed.push((*f).clone());
                    }
                }
            }
        }
        b.facts.remove(q);
        if b.certified(q) && queries.iter().all(|p| b.certified(p)) {
            queries.push(q.clone());
            used.insert(x);
        } else {
            b.facts.extend(removed);
        }
    }
    if queries.len() < n_queries {
        return Err(EvalError::Ablation(format!(
            "only {} of {n_queries} queries need exactly {hops} steps",
            queries.len()
        )));
    }
    let train: Vec<GroundAtom> = store.iter().filter(|f| b.facts.contains(*f)).cloned().collect();
    let removed: Vec<GroundAtom> = store.iter().filter(|f| !b.facts.contains(*f)).cloned().collect();
    Ok(AblationSplit {
        hops,
        train: FactStore::from_facts(train),
        queries,
        removed,
    })
}
