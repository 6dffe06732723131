//! Brute-force reference answers for small instances. Nothing here uses the
//! fact-store indexes or the grounder's search code.

use crate::grounder::Limit;
use crate::logic::{ConstId, GroundAtom, Substitution, Theory};
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("Herbrand universe would have {size} ground rules, over the budget of {budget}")]
pub struct OracleBudget {
    pub size: u128,
    pub budget: u128,
}

/// One ground clause with its atoms materialized.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GroundClause {
    pub rule_id: usize,
    pub substitution: Substitution,
    pub head: GroundAtom,
    pub body: Vec<GroundAtom>,
}

impl GroundClause {
    fn unknown<'a>(&'a self, facts: &'a BTreeSet<GroundAtom>) -> impl Iterator<Item = &'a GroundAtom> + 'a {
        self.body.iter().filter(move |b| !facts.contains(*b))
    }
}

/// Accepted instances and proved roots of a reference grounding.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OracleGrounding {
    pub instances: BTreeSet<(usize, Substitution)>,
    pub provable: BTreeSet<GroundAtom>,
}

/// Every substitution of every clause over `constants`.
pub fn enumerate_hu(
    theory: &Theory,
    constants: &[ConstId],
    budget: u128,
) -> Result<Vec<GroundClause>, OracleBudget> {
    let mut size: u128 = 0;
    for c in theory.clauses() {
        let n = (constants.len() as u128).saturating_pow(c.variables().len() as u32);
        size = size.saturating_add(n);
    }
    if size > budget {
        return Err(OracleBudget { size, budget });
    }
    let mut out = Vec::new();
    for clause in theory.clauses() {
        let vars = clause.variables();
        let mut values = vec![0usize; vars.len()];
        if !vars.is_empty() && constants.is_empty() {
            continue;
        }
        loop {
            let mut theta = Substitution::new();
            for (v, &i) in vars.iter().zip(&values) {
                theta.bind(*v, constants[i]);
            }
            out.push(GroundClause {
                rule_id: clause.rule_id,
                head: clause.head.ground_with(&theta).expect("range restricted"),
                body: clause
                    .body
                    .iter()
                    .map(|b| b.ground_with(&theta).expect("all vars bound"))
                    .collect(),
                substitution: theta,
            });
            let mut k = vars.len();
            let mut carry = true;
            while carry && k > 0 {
                k -= 1;
                values[k] += 1;
                if values[k] == constants.len() {
                    values[k] = 0;
                } else {
                    carry = false;
                }
            }
            if carry {
                break;
            }
        }
    }
    Ok(out)
}

fn by_head(hu: &[GroundClause]) -> BTreeMap<&GroundAtom, Vec<&GroundClause>> {
    let mut m: BTreeMap<&GroundAtom, Vec<&GroundClause>> = BTreeMap::new();
    for g in hu {
        m.entry(&g.head).or_default().push(g);
    }
    m
}

fn width_of(theory: &Theory, w: Limit) -> usize {
    let max_body = theory.clauses().iter().map(|c| c.body.len()).max().unwrap_or(0);
    match w {
        Limit::Finite(n) => n.min(max_body),
        Limit::Infinite => max_body,
    }
}

/// `levels[r]` = atoms with a proof tree of depth at most `r`, whose nodes each
/// have at most `w` unknown body atoms. The last level is the fixpoint when
/// `d` is infinite.
fn proof_levels(hu: &[GroundClause], facts: &BTreeSet<GroundAtom>, w: usize, d: Limit) -> Vec<BTreeSet<GroundAtom>> {
    let mut levels = vec![BTreeSet::new()];
    loop {
        let prev = levels.last().expect("level 0");
        let mut next = BTreeSet::new();
        for g in hu {
            let unknown: Vec<_> = g.unknown(facts).collect();
            if unknown.len() <= w && unknown.iter().all(|u| prev.contains(*u)) {
                next.insert(g.head.clone());
            }
        }
        let done = match d {
            Limit::Finite(n) => levels.len() == n,
            Limit::Infinite => &next == prev,
        };
        levels.push(next);
        if done {
            return levels;
        }
    }
}

/// Reference `BC_{w,d}` under the known-leaf acceptance rule.
pub fn oracle_grounding(
    theory: &Theory,
    facts: &BTreeSet<GroundAtom>,
    constants: &[ConstId],
    w: Limit,
    d: Limit,
    roots: &[GroundAtom],
) -> OracleGrounding {
    assert!(d != Limit::Finite(0), "depth must be positive");
    let hu = enumerate_hu(theory, constants, u128::MAX).expect("unbounded budget");
    let width = width_of(theory, w);
    let levels = proof_levels(&hu, facts, width, d);
    let top = levels.len() - 1;
    // with infinite depth the last two levels coincide, so r - 1 stays at the fixpoint
    let below = |r: usize| if d == Limit::Infinite { top } else { r - 1 };
    let heads = by_head(&hu);

    let mut out = OracleGrounding::default();
    let mut seen: BTreeSet<(GroundAtom, usize)> = BTreeSet::new();
    let mut stack: Vec<(GroundAtom, usize)> = Vec::new();
    for r in roots {
        if levels[top].contains(r) {
            out.provable.insert(r.clone());
            stack.push((r.clone(), top));
        }
    }
    while let Some((a, r)) = stack.pop() {
        if !seen.insert((a.clone(), r)) {
            continue;
        }
        for g in heads.get(&a).into_iter().flatten() {
            let unknown: Vec<_> = g.unknown(facts).collect();
            if unknown.len() <= width && unknown.iter().all(|u| levels[below(r)].contains(*u)) {
                out.instances.insert((g.rule_id, g.substitution.clone()));
                for u in unknown {
                    stack.push((u.clone(), below(r)));
                }
            }
        }
    }
    out
}

/// Reference `BC^u_{w,d}`: every width-admissible instance of every goal
/// reachable from the roots within `d` levels is accepted.
pub fn oracle_grounding_uncertain(
    theory: &Theory,
    facts: &BTreeSet<GroundAtom>,
    constants: &[ConstId],
    w: Limit,
    d: Limit,
    roots: &[GroundAtom],
) -> OracleGrounding {
    assert!(d != Limit::Finite(0), "depth must be positive");
    let hu = enumerate_hu(theory, constants, u128::MAX).expect("unbounded budget");
    let width = width_of(theory, w);
    let depth = d.finite().unwrap_or(usize::MAX);
    let heads = by_head(&hu);
    let mut out = OracleGrounding::default();
    let mut best: BTreeMap<GroundAtom, usize> = BTreeMap::new();
    let mut stack: Vec<(GroundAtom, usize)> = roots.iter().map(|r| (r.clone(), depth)).collect();
    while let Some((a, r)) = stack.pop() {
        if best.get(&a).is_some_and(|s| *s >= r) {
            continue;
        }
        best.insert(a.clone(), r);
        for g in heads.get(&a).into_iter().flatten() {
            let unknown: Vec<_> = g.unknown(facts).collect();
            if unknown.len() > width {
                continue;
            }
            out.instances.insert((g.rule_id, g.substitution.clone()));
            if roots.contains(&a) {
                out.provable.insert(a.clone());
            }
            if r > 1 {
                let next = if r == usize::MAX { r } else { r - 1 };
                for u in unknown {
                    stack.push((u.clone(), next));
                }
            }
        }
    }
    out
}

/// Provable roots of the reference `BC_{w,d}`.
pub fn oracle_provable(
    theory: &Theory,
    facts: &BTreeSet<GroundAtom>,
    constants: &[ConstId],
    w: Limit,
    d: Limit,
    roots: &[GroundAtom],
) -> BTreeSet<GroundAtom> {
    oracle_grounding(theory, facts, constants, w, d, roots).provable
}

/// Atoms derived by naive forward chaining to the least fixpoint, store excluded.
pub fn forward_closure(theory: &Theory, facts: &BTreeSet<GroundAtom>, constants: &[ConstId]) -> BTreeSet<GroundAtom> {
    let hu = enumerate_hu(theory, constants, u128::MAX).expect("unbounded budget");
    let mut all = facts.clone();
    loop {
        let mut changed = false;
        for g in &hu {
            if !all.contains(&g.head) && g.body.iter().all(|b| all.contains(b)) {
                all.insert(g.head.clone());
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    all.difference(facts).cloned().collect()
}
