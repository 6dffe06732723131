use crate::metrics::{rank_against, RankingReport, Side};
use bcg_core::facts::FactStore;
use bcg_core::logic::{ConstId, GroundAtom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

/// Anything that assigns a score to a ground atom.
pub trait ScoreSource: Sync {
    fn score(&self, atom: &GroundAtom) -> f64;
}

impl<F: Fn(&GroundAtom) -> f64 + Sync> ScoreSource for F {
    fn score(&self, atom: &GroundAtom) -> f64 {
        self(atom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Corruptions {
    /// Every entity replaces the head, then the tail.
    All,
    /// `n` entities per side drawn without replacement, reproducibly per query.
    Sampled { n: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    pub side: Side,
    pub corruptions: Corruptions,
    /// Drop corruptions that are true facts.
    pub filtered: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            side: Side::Both,
            corruptions: Corruptions::All,
            filtered: true,
        }
    }
}

fn sides(side: Side) -> &'static [usize] {
    match side {
        Side::Head => &[0],
        Side::Tail => &[1],
        Side::Both => &[0, 1],
    }
}

/// Candidate replacements for argument `pos` of test triple number `query`.
fn replacements(
    triple: &GroundAtom,
    query: usize,
    pos: usize,
    entities: &[ConstId],
    filter: Option<&FactStore>,
    corruptions: Corruptions,
) -> Vec<GroundAtom> {
    let pool: Vec<ConstId> = match corruptions {
        Corruptions::All => entities.to_vec(),
        Corruptions::Sampled { n, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ ((query as u64) << 1 | pos as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
            let n = n.min(entities.len());
            rand::seq::index::sample(&mut rng, entities.len(), n)
                .into_iter()
                .map(|i| entities[i])
                .collect()
        }
    };
    pool.into_iter()
        .filter(|&e| e != triple.args[pos])
        .map(|e| {
            let mut c = triple.clone();
            c.args[pos] = e;
            c
        })
        .filter(|c| filter.is_none_or(|f| !f.contains(c)))
        .collect()
}

/// Test triples usable with the entity vocabulary, and how many were not.
fn in_vocabulary<'a>(test: &'a [GroundAtom], entities: &[ConstId]) -> (Vec<(usize, &'a GroundAtom)>, usize) {
    let vocab: FxHashSet<ConstId> = entities.iter().copied().collect();
    let ok: Vec<_> = test
        .iter()
        .enumerate()
        .filter(|(_, t)| t.args.len() == 2 && t.args.iter().all(|a| vocab.contains(a)))
        .collect();
    let excluded = test.len() - ok.len();
    (ok, excluded)
}

/// Every corrupted atom `evaluate` will score for `test`, in a stable order.
pub fn corruption_atoms(
    test: &[GroundAtom],
    entities: &[ConstId],
    filter: &FactStore,
    opts: EvalOptions,
) -> Vec<GroundAtom> {
    let (ok, _) = in_vocabulary(test, entities);
    let filter = opts.filtered.then_some(filter);
    let mut out = Vec::new();
    for (i, t) in ok {
        for &pos in sides(opts.side) {
            out.extend(replacements(t, i, pos, entities, filter, opts.corruptions));
        }
    }
    out
}

/// Ranks each test triple against its corruptions.
pub fn evaluate(
    source: &impl ScoreSource,
    test: &[GroundAtom],
    entities: &[ConstId],
    filter: &FactStore,
    opts: EvalOptions,
) -> RankingReport {
    let (ok, excluded) = in_vocabulary(test, entities);
    let filter = opts.filtered.then_some(filter);
    let ranks: Vec<f64> = ok
        .par_iter()
        .flat_map_iter(|&(i, t)| {
            let q = source.score(t);
            sides(opts.side).iter().map(move |&pos| {
                let cands = replacements(t, i, pos, entities, filter, opts.corruptions);
                rank_against(q, cands.iter().map(|c| source.score(c)))
            })
        })
        .collect();
    let mut report = RankingReport::from_ranks(ranks, opts.side);
    report.excluded = excluded;
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use bcg_core::logic::PredId;

    fn atom(p: u32, a: u32, b: u32) -> GroundAtom {
        GroundAtom::new(PredId(p), [ConstId(a), ConstId(b)])
    }

    #[test]
    fn perfect_and_constant_scorers() {
        let ents: Vec<ConstId> = (0..5).map(ConstId).collect();
        let test = vec![atom(0, 0, 1), atom(0, 2, 3)];
        let store = FactStore::from_facts([atom(0, 0, 2)]);
        let perfect = |a: &GroundAtom| if test.contains(a) { 1.0 } else { 0.0 };
        let r = evaluate(&perfect, &test, &ents, &store, EvalOptions::default());
        assert_eq!(r.mrr, 1.0);
        assert_eq!(r.ranks.len(), 4);
        // a constant scorer ties with every candidate
        let flat = |_: &GroundAtom| 0.5;
        let r = evaluate(&flat, &test, &ents, &FactStore::new(), EvalOptions::default());
        assert!(r.ranks.iter().all(|x| *x == 3.0));
    }

    #[test]
    fn filtering_never_worsens_rank() {
        let ents: Vec<ConstId> = (0..6).map(ConstId).collect();
        let test = vec![atom(0, 0, 1)];
        let store = FactStore::from_facts([atom(0, 0, 2), atom(0, 0, 3), atom(0, 4, 1)]);
        let score = |a: &GroundAtom| (a.args[0].0 * 7 + a.args[1].0 * 3) as f64 % 5.0;
        let raw = evaluate(&score, &test, &ents, &store, EvalOptions { filtered: false, ..Default::default() });
        let filt = evaluate(&score, &test, &ents, &store, EvalOptions::default());
        for (f, r) in filt.ranks.iter().zip(&raw.ranks) {
            assert!(f <= r);
        }
    }

    #[test]
    fn out_of_vocabulary_queries_are_counted() {
        let ents: Vec<ConstId> = (0..3).map(ConstId).collect();
        let test = vec![atom(0, 0, 1), atom(0, 0, 9)];
        let r = evaluate(&|_: &GroundAtom| 0.1, &test, &ents, &FactStore::new(), EvalOptions::default());
        assert_eq!(r.excluded, 1);
        assert_eq!(r.ranks.len(), 2);
    }

    #[test]
    fn sampled_corruptions_are_reproducible() {
        let ents: Vec<ConstId> = (0..50).map(ConstId).collect();
        let test = vec![atom(0, 0, 1), atom(0, 2, 3)];
        let opts = EvalOptions {
            corruptions: Corruptions::Sampled { n: 10, seed: 4 },
            ..Default::default()
        };
        let a = corruption_atoms(&test, &ents, &FactStore::new(), opts);
        assert_eq!(a, corruption_atoms(&test, &ents, &FactStore::new(), opts));
        assert!(a.len() <= 40 && a.len() >= 36);
    }
}
