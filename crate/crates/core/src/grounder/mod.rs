//! The `BC_{w,d}` family of backward-chaining grounders.
//!
//! A goal is a ground atom together with the proof depth still available to
//! it. For every goal the grounder enumerates the rule instances whose head
//! is the goal and whose body has at most `w` atoms outside the fact store
//! (the width filter). Each such unknown atom becomes a sub-goal with one
//! less unit of depth.
//!
//! Without the uncertain flag an instance is accepted only when every unknown
//! body atom is itself proved within the remaining depth, so accepted proofs
//! bottom out in known facts. With the flag every width-admissible instance of
//! every visited goal is accepted and unknown atoms are left to be scored.
//!
//! The search is tabled: each ground atom is expanded once, at the largest
//! remaining depth it is reached with, and provability is computed as the
//! minimum proof depth over the resulting AND/OR graph. This terminates for
//! `d = ∞` on recursive theories and gives the same accepted set for any
//! worker count.

mod params;
mod proof;
mod search;

pub use params::{GrounderParams, Limit, ParamsError};
pub use proof::ProofTree;

use crate::facts::FactStore;
use crate::logic::{herbrand_base, ConstId, GroundAtom, Substitution, Theory};
use crate::table::{AtomId, AtomTable};
use rayon::prelude::*;
use search::{bits, Expander};
use serde::Serialize;
use smallvec::SmallVec;
use std::collections::{BTreeSet, VecDeque};
use std::time::Instant;

const INF: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GroundError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error("root atom has {found} arguments but its predicate has arity {expected}")]
    RootArity { expected: usize, found: usize },
    #[error("Herbrand universe has {size} ground rules, over the budget of {budget}")]
    Budget { size: u128, budget: u128 },
}

/// One accepted ground rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundRuleInstance {
    pub rule_id: usize,
    pub substitution: Substitution,
    pub head: AtomId,
    pub body: SmallVec<[AtomId; 3]>,
    /// Per body atom: whether it is a known fact.
    pub known: SmallVec<[bool; 3]>,
}

impl GroundRuleInstance {
    pub fn unknown_count(&self) -> usize {
        self.known.iter().filter(|k| !**k).count()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GroundingStats {
    /// Distinct goals expanded.
    pub nodes_expanded: u64,
    /// Width-admissible rule instances generated.
    pub candidates: u64,
    /// Join branches discarded because one more body atom would be unknown.
    pub rejected_width: u64,
    /// Width-admissible instances not accepted within the depth bound.
    pub rejected_depth: u64,
    pub instances: u64,
    pub atoms: u64,
    pub roots: u64,
    pub proved_roots: u64,
}

/// Goals whose free-variable enumeration hit the cap in uncertain mode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Truncation {
    pub cap: usize,
    pub goals: u64,
}

/// Output of a grounder run.
#[derive(Debug, Clone)]
pub struct GroundingResult {
    pub params: GrounderParams,
    atoms: AtomTable,
    known: Vec<bool>,
    /// Minimum proof depth of each atom, for atoms proved by some rule.
    min_depth: Vec<Option<u32>>,
    roots: Vec<AtomId>,
    proved: Vec<bool>,
    instances: Vec<GroundRuleInstance>,
    pub stats: GroundingStats,
    pub truncation: Option<Truncation>,
    pub elapsed_ms: u128,
}

impl GroundingResult {
    pub fn atoms(&self) -> &AtomTable {
        &self.atoms
    }

    pub fn atom(&self, id: AtomId) -> &GroundAtom {
        self.atoms.get(id)
    }

    pub fn is_known(&self, id: AtomId) -> bool {
        self.known[id.index()]
    }

    pub fn roots(&self) -> &[AtomId] {
        &self.roots
    }

    pub fn instances(&self) -> &[GroundRuleInstance] {
        &self.instances
    }

    pub fn min_depth(&self, id: AtomId) -> Option<u32> {
        self.min_depth[id.index()]
    }

    pub fn is_proved(&self, root_index: usize) -> bool {
        self.proved[root_index]
    }

    /// Accepted instances whose head is `atom`.
    pub fn proof_count(&self, atom: AtomId) -> usize {
        self.instances.iter().filter(|g| g.head == atom).count()
    }

    /// Roots derived by at least one accepted rule instance.
    pub fn provable_set(&self) -> BTreeSet<GroundAtom> {
        self.roots
            .iter()
            .zip(&self.proved)
            .filter(|(_, p)| **p)
            .map(|(r, _)| self.atoms.get(*r).clone())
            .collect()
    }

    /// `(rule_id, substitution)` keys of the accepted instances.
    pub fn instance_keys(&self) -> BTreeSet<(usize, Substitution)> {
        self.instances
            .iter()
            .map(|g| (g.rule_id, g.substitution.clone()))
            .collect()
    }

    /// Assembles a result from explicit instances, e.g. for hand-built networks.
    pub fn from_instances(
        theory: &Theory,
        store: &FactStore,
        roots: &[GroundAtom],
        instances: impl IntoIterator<Item = (usize, Substitution)>,
    ) -> GroundingResult {
        let mut atoms = AtomTable::new();
        let mut root_ids = Vec::new();
        for r in roots {
            let (id, fresh) = atoms.insert(r.clone());
            if fresh {
                root_ids.push(id);
            }
        }
        let mut out = Vec::new();
        for (rule_id, theta) in instances {
            let clause = theory.clause(rule_id);
            let head = atoms.intern(clause.head.ground_with(&theta).expect("full substitution"));
            let mut body = SmallVec::new();
            let mut known = SmallVec::new();
            for b in &clause.body {
                let g = b.ground_with(&theta).expect("full substitution");
                known.push(store.contains(&g));
                body.push(atoms.intern(g));
            }
            out.push(GroundRuleInstance {
                rule_id,
                substitution: theta,
                head,
                body,
                known,
            });
        }
        let known = atoms.iter().map(|(_, a)| store.contains(a)).collect();
        let proved = root_ids
            .iter()
            .map(|r| out.iter().any(|g| g.head == *r))
            .collect();
        let n = atoms.len();
        GroundingResult {
            params: GrounderParams::full(),
            stats: GroundingStats {
                instances: out.len() as u64,
                atoms: n as u64,
                roots: root_ids.len() as u64,
                ..Default::default()
            },
            atoms,
            known,
            min_depth: vec![None; n],
            roots: root_ids,
            proved,
            instances: out,
            truncation: None,
            elapsed_ms: 0,
        }
    }
}

struct Cand {
    rule: u32,
    slots: SmallVec<[ConstId; 4]>,
    head: u32,
    body: SmallVec<[u32; 3]>,
    unknown: u64,
}

/// Runs `BC_{w,d}` from `roots`. Free variables that only occur in unknown
/// body atoms range over the constants of the store and the theory, or over
/// every interned constant in uncertain mode.
pub fn ground(
    theory: &Theory,
    store: &FactStore,
    params: GrounderParams,
    roots: &[GroundAtom],
) -> Result<GroundingResult, GroundError> {
    let domain: Vec<ConstId> = if params.uncertain {
        theory.symbols.constants().collect()
    } else {
        let mut d = store.entities();
        d.extend(theory.rule_constants());
        d.sort_unstable();
        d.dedup();
        d
    };
    ground_with_domain(theory, store, params, roots, &domain)
}

/// Like [`ground`] with an explicit domain for free-variable enumeration.
pub fn ground_with_domain(
    theory: &Theory,
    store: &FactStore,
    params: GrounderParams,
    roots: &[GroundAtom],
    domain: &[ConstId],
) -> Result<GroundingResult, GroundError> {
    params.validate()?;
    for r in roots {
        let expected = theory.symbols.arity(r.pred);
        if expected != r.args.len() {
            return Err(GroundError::RootArity {
                expected,
                found: r.args.len(),
            });
        }
    }
    let start = Instant::now();
    let width = params.effective_width(theory.max_body_len());
    let depth = match params.depth {
        Limit::Finite(d) => u32::try_from(d).unwrap_or(INF - 1).min(INF - 1),
        Limit::Infinite => INF,
    };
    let child = |r: u32| if r == INF { INF } else { r - 1 };
    let expander = Expander::new(
        theory,
        store,
        width,
        params.uncertain,
        params.enumeration_cap,
        domain,
    );

    // expansion, level by level from the roots
    let mut table = AtomTable::new();
    let mut remaining: Vec<u32> = Vec::new();
    let mut goal_cands: Vec<(u32, u32)> = Vec::new();
    let mut cands: Vec<Cand> = Vec::new();
    let mut root_ids = Vec::new();
    let mut stats = GroundingStats::default();
    let mut truncated_goals = 0u64;

    let mut frontier = Vec::new();
    for r in roots {
        let id = intern_goal(&mut table, &mut remaining, &mut goal_cands, r.clone());
        if remaining[id.index()] == 0 {
            remaining[id.index()] = depth;
            frontier.push(id.0);
            root_ids.push(id);
        }
    }

    while !frontier.is_empty() {
        let expansions: Vec<_> = frontier
            .par_iter()
            .map(|&g| {
                let r = remaining[g as usize];
                let allow_unknown = params.uncertain || r > 1;
                expander.expand(table.get(AtomId(g)), allow_unknown)
            })
            .collect();
        let mut next = Vec::new();
        for (&g, exp) in frontier.iter().zip(expansions) {
            let r = remaining[g as usize];
            stats.nodes_expanded += 1;
            stats.rejected_width += exp.rejected_width;
            if exp.truncated {
                truncated_goals += 1;
            }
            let begin = cands.len() as u32;
            for rc in exp.cands {
                let mut body = SmallVec::new();
                for (p, atom) in rc.body.into_iter().enumerate() {
                    let id = intern_goal(&mut table, &mut remaining, &mut goal_cands, atom);
                    if rc.unknown & (1u64 << p) != 0 && r > 1 && remaining[id.index()] == 0 {
                        remaining[id.index()] = child(r);
                        next.push(id.0);
                    }
                    body.push(id.0);
                }
                cands.push(Cand {
                    rule: rc.rule,
                    slots: rc.slots,
                    head: g,
                    body,
                    unknown: rc.unknown,
                });
            }
            goal_cands[g as usize] = (begin, cands.len() as u32);
        }
        frontier = next;
    }
    stats.candidates = cands.len() as u64;

    let n = table.len();
    let known: Vec<bool> = table.iter().map(|(_, a)| store.contains(a)).collect();
    let unknown_atoms = |c: &Cand| -> SmallVec<[u32; 3]> {
        let mut u: SmallVec<[u32; 3]> = bits(c.unknown).map(|p| c.body[p]).collect();
        u.sort_unstable();
        u.dedup();
        u
    };

    // minimum proof depth over the AND/OR graph (unused in uncertain mode)
    let mut md = vec![INF; n];
    if !params.uncertain {
        let mut pending = vec![0u32; cands.len()];
        let mut rev: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut layer = Vec::new();
        for (ci, c) in cands.iter().enumerate() {
            let u = unknown_atoms(c);
            pending[ci] = u.len() as u32;
            for a in u {
                rev[a as usize].push(ci as u32);
            }
            if pending[ci] == 0 && md[c.head as usize] == INF {
                md[c.head as usize] = 1;
                layer.push(c.head);
            }
        }
        let mut k = 1u32;
        while !layer.is_empty() {
            let mut next = Vec::new();
            for &a in &layer {
                for &ci in &rev[a as usize] {
                    pending[ci as usize] -= 1;
                    if pending[ci as usize] == 0 {
                        let h = cands[ci as usize].head as usize;
                        if md[h] == INF {
                            md[h] = k + 1;
                            next.push(h as u32);
                        }
                    }
                }
            }
            layer = next;
            k += 1;
        }
    }

    // accepted instances, collected top-down from the roots
    let mut accepted = vec![false; cands.len()];
    let mut visited = vec![0u32; n];
    let mut queue: VecDeque<(u32, u32)> = VecDeque::new();
    let proved_root = |id: AtomId| -> bool {
        if params.uncertain {
            let (b, e) = goal_cands[id.index()];
            e > b
        } else {
            within(md[id.index()], depth)
        }
    };
    let proved: Vec<bool> = root_ids.iter().map(|&r| proved_root(r)).collect();
    for (&r, &p) in root_ids.iter().zip(&proved) {
        if p {
            queue.push_back((r.0, depth));
        }
    }
    while let Some((a, r)) = queue.pop_front() {
        if visited[a as usize] >= r {
            continue;
        }
        visited[a as usize] = r;
        let (b, e) = goal_cands[a as usize];
        for ci in b..e {
            let c = &cands[ci as usize];
            let ok = params.uncertain
                || bits(c.unknown).all(|p| within(md[c.body[p] as usize], child(r)));
            if !ok {
                continue;
            }
            accepted[ci as usize] = true;
            if r > 1 {
                for p in bits(c.unknown) {
                    let u = c.body[p];
                    if remaining[u as usize] > 0 {
                        queue.push_back((u, child(r)));
                    }
                }
            }
        }
    }

    // canonical order: roots, then atoms of instances sorted by (rule, substitution)
    let mut chosen: Vec<&Cand> = cands
        .iter()
        .zip(&accepted)
        .filter(|(_, a)| **a)
        .map(|(c, _)| c)
        .collect();
    chosen.sort_by(|x, y| (x.rule, &x.slots).cmp(&(y.rule, &y.slots)));
    chosen.dedup_by(|x, y| x.rule == y.rule && x.slots == y.slots);

    let mut out_atoms = AtomTable::new();
    let mut remap = vec![u32::MAX; n];
    let mut map_id = |out_atoms: &mut AtomTable, old: u32| -> AtomId {
        if remap[old as usize] == u32::MAX {
            remap[old as usize] = out_atoms.intern(table.get(AtomId(old)).clone()).0;
        }
        AtomId(remap[old as usize])
    };
    let out_roots: Vec<AtomId> = root_ids.iter().map(|r| map_id(&mut out_atoms, r.0)).collect();
    let mut instances = Vec::with_capacity(chosen.len());
    for c in &chosen {
        let clause = theory.clause(c.rule as usize);
        let head = map_id(&mut out_atoms, c.head);
        let body: SmallVec<[AtomId; 3]> = c.body.iter().map(|&b| map_id(&mut out_atoms, b)).collect();
        let known_flags = (0..c.body.len()).map(|p| c.unknown & (1u64 << p) == 0).collect();
        instances.push(GroundRuleInstance {
            rule_id: c.rule as usize,
            substitution: clause.variables().iter().copied().zip(c.slots.iter().copied()).collect(),
            head,
            body,
            known: known_flags,
        });
    }
    let m = out_atoms.len();
    let mut out_known = vec![false; m];
    let mut out_md = vec![None; m];
    for (old, &new) in remap.iter().enumerate() {
        if new != u32::MAX {
            out_known[new as usize] = known[old];
            if md[old] != INF {
                out_md[new as usize] = Some(md[old]);
            }
        }
    }

    stats.instances = instances.len() as u64;
    stats.rejected_depth = stats.candidates - accepted.iter().filter(|a| **a).count() as u64;
    stats.atoms = m as u64;
    stats.roots = out_roots.len() as u64;
    stats.proved_roots = proved.iter().filter(|p| **p).count() as u64;

    Ok(GroundingResult {
        params,
        atoms: out_atoms,
        known: out_known,
        min_depth: out_md,
        roots: out_roots,
        proved,
        instances,
        stats,
        truncation: (truncated_goals > 0).then(|| Truncation {
            cap: params.enumeration_cap.unwrap_or(0),
            goals: truncated_goals,
        }),
        elapsed_ms: start.elapsed().as_millis(),
    })
}

/// A proof of depth `md` fits in `limit`; `INF` as `md` means unproved.
fn within(md: u32, limit: u32) -> bool {
    md != INF && md <= limit
}

fn intern_goal(
    table: &mut AtomTable,
    remaining: &mut Vec<u32>,
    goal_cands: &mut Vec<(u32, u32)>,
    atom: GroundAtom,
) -> AtomId {
    let (id, fresh) = table.insert(atom);
    if fresh {
        remaining.push(0);
        goal_cands.push((0, 0));
    }
    id
}

/// `Σ_clauses |domain|^{#vars}`, the size of the Herbrand universe.
pub fn herbrand_universe_size(theory: &Theory, n_constants: u64) -> Option<u128> {
    theory.clauses().iter().try_fold(0u128, |acc, c| {
        let term = (n_constants as u128).checked_pow(c.variables().len() as u32)?;
        acc.checked_add(term)
    })
}

/// The Full Grounder: `BC^u_{∞,1}` rooted at every atom of the Herbrand base
/// over `domain`. Refuses when the Herbrand universe exceeds `budget` ground
/// rules.
pub fn full_grounding(
    theory: &Theory,
    domain: &[ConstId],
    budget: u128,
) -> Result<GroundingResult, GroundError> {
    let size = herbrand_universe_size(theory, domain.len() as u64).unwrap_or(u128::MAX);
    if size > budget {
        return Err(GroundError::Budget { size, budget });
    }
    let heads: BTreeSet<_> = theory.clauses().iter().map(|c| c.head.pred).collect();
    let roots: Vec<GroundAtom> = herbrand_base(&theory.symbols, heads, domain).collect();
    ground_with_domain(theory, &FactStore::new(), GrounderParams::full(), &roots, domain)
}

/// Reads the provable roots of a result.
pub fn provable_set(result: &GroundingResult) -> BTreeSet<GroundAtom> {
    result.provable_set()
}
