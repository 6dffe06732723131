//! Candidate generation: every width-admissible instantiation of every clause
//! whose head matches a ground goal.

use crate::facts::FactStore;
use crate::logic::{tuples, ConstId, GroundAtom, PredId, Term, Theory};
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

#[derive(Clone, Copy, Debug)]
enum Slot {
    Const(ConstId),
    Var(usize),
}

#[derive(Debug)]
struct CompiledAtom {
    pred: PredId,
    args: SmallVec<[Slot; 3]>,
}

#[derive(Debug)]
struct CompiledClause {
    rule_id: u32,
    head: CompiledAtom,
    body: Vec<CompiledAtom>,
    n_slots: usize,
    derivable: Vec<bool>,
}

/// A rule instance found for one goal, before atom interning.
#[derive(Debug, Clone)]
pub(crate) struct RawCandidate {
    pub rule: u32,
    pub slots: SmallVec<[ConstId; 4]>,
    pub body: SmallVec<[GroundAtom; 3]>,
    /// Bit `i` set when body atom `i` is not a known fact.
    pub unknown: u64,
}

#[derive(Debug, Default)]
pub(crate) struct Expansion {
    pub cands: Vec<RawCandidate>,
    pub rejected_width: u64,
    pub truncated: bool,
}

pub(crate) struct Expander<'a> {
    by_head: FxHashMap<PredId, Vec<CompiledClause>>,
    store: &'a FactStore,
    width: usize,
    uncertain: bool,
    cap: Option<usize>,
    domain: &'a [ConstId],
}

struct JoinState {
    out: Vec<RawCandidate>,
    rejected_width: u64,
    enumerated: usize,
    truncated: bool,
}

fn compile_atom(atom: &crate::logic::Atom, vars: &[crate::logic::VarId]) -> CompiledAtom {
    CompiledAtom {
        pred: atom.pred,
        args: atom
            .args
            .iter()
            .map(|t| match *t {
                Term::Const(c) => Slot::Const(c),
                Term::Var(v) => Slot::Var(vars.iter().position(|&u| u == v).expect("clause var")),
            })
            .collect(),
    }
}

impl<'a> Expander<'a> {
    pub fn new(
        theory: &Theory,
        store: &'a FactStore,
        width: usize,
        uncertain: bool,
        cap: Option<usize>,
        domain: &'a [ConstId],
    ) -> Self {
        let mut by_head: FxHashMap<PredId, Vec<CompiledClause>> = FxHashMap::default();
        for c in theory.clauses() {
            assert!(c.body.len() <= 64, "clause bodies are limited to 64 atoms");
            let vars = c.variables();
            let compiled = CompiledClause {
                rule_id: c.rule_id as u32,
                head: compile_atom(&c.head, vars),
                body: c.body.iter().map(|b| compile_atom(b, vars)).collect(),
                n_slots: vars.len(),
                derivable: c.body.iter().map(|b| theory.is_derivable(b.pred)).collect(),
            };
            by_head.entry(c.head.pred).or_default().push(compiled);
        }
        Expander {
            by_head,
            store,
            width,
            uncertain,
            cap,
            domain,
        }
    }

    /// All candidates for `goal`. With `allow_unknown == false` only
    /// instances whose body is entirely known are produced.
    pub fn expand(&self, goal: &GroundAtom, allow_unknown: bool) -> Expansion {
        let mut st = JoinState {
            out: Vec::new(),
            rejected_width: 0,
            enumerated: 0,
            truncated: false,
        };
        let width = if allow_unknown { self.width } else { 0 };
        let Some(clauses) = self.by_head.get(&goal.pred) else {
            return Expansion::default();
        };
        for cl in clauses {
            let mut bind: Vec<Option<ConstId>> = vec![None; cl.n_slots];
            if !match_compiled(&cl.head, &goal.args, &mut bind) {
                continue;
            }
            let n = cl.body.len();
            let all: u64 = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
            let mut masks: Vec<u64> = (0..=all)
                .filter(|m| (m.count_ones() as usize) <= width)
                .collect();
            masks.sort_by_key(|m| (m.count_ones(), *m));
            for unknown in masks {
                // an unknown atom must be provable unless uncertain atoms are accepted
                if !self.uncertain && bits(unknown).any(|p| !cl.derivable[p]) {
                    continue;
                }
                let full = unknown.count_ones() as usize >= width;
                self.join(cl, unknown, all & !unknown, full, &mut bind, &mut st);
                if st.truncated {
                    break;
                }
            }
            if st.truncated {
                break;
            }
        }
        Expansion {
            cands: st.out,
            rejected_width: st.rejected_width,
            truncated: st.truncated,
        }
    }

    fn join(
        &self,
        cl: &CompiledClause,
        unknown: u64,
        todo: u64,
        full: bool,
        bind: &mut Vec<Option<ConstId>>,
        st: &mut JoinState,
    ) {
        if st.truncated {
            return;
        }
        // an atom designated unknown that turns out to be known belongs to a smaller mask
        for p in bits(unknown) {
            if let Some(g) = ground_compiled(&cl.body[p], bind) {
                if self.store.contains(&g) {
                    return;
                }
            }
        }
        if todo == 0 {
            self.finish(cl, unknown, bind, st);
            return;
        }
        let mut best: Option<(usize, usize)> = None;
        for p in bits(todo) {
            let bound = bound_args(&cl.body[p], bind);
            let est = self.store.estimate(cl.body[p].pred, &bound);
            if best.is_none_or(|(_, e)| est < e) {
                best = Some((p, est));
            }
        }
        let (pos, est) = best.expect("todo non-empty");
        if est == 0 {
            if full {
                st.rejected_width += 1;
            }
            return;
        }
        let atom = &cl.body[pos];
        let bound = bound_args(atom, bind);
        let mut fresh: SmallVec<[usize; 3]> = SmallVec::new();
        for fact in self.store.matching(atom.pred, &bound) {
            let mut ok = true;
            for (slot, &c) in atom.args.iter().zip(fact.args.iter()) {
                if let Slot::Var(i) = *slot {
                    match bind[i] {
                        Some(b) if b != c => {
                            ok = false;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            bind[i] = Some(c);
                            fresh.push(i);
                        }
                    }
                }
            }
            if ok {
                self.join(cl, unknown, todo & !(1u64 << pos), full, bind, st);
            }
            for i in fresh.drain(..) {
                bind[i] = None;
            }
            if st.truncated {
                return;
            }
        }
    }

    /// Binds variables that only occur in unknown atoms by enumerating the domain.
    fn finish(
        &self,
        cl: &CompiledClause,
        unknown: u64,
        bind: &mut [Option<ConstId>],
        st: &mut JoinState,
    ) {
        let free: SmallVec<[usize; 4]> = (0..cl.n_slots).filter(|&i| bind[i].is_none()).collect();
        if free.is_empty() {
            self.emit(cl, unknown, bind, st);
            return;
        }
        for assignment in tuples(self.domain, free.len()) {
            if self.uncertain {
                if let Some(cap) = self.cap {
                    if st.enumerated >= cap {
                        st.truncated = true;
                        break;
                    }
                }
            }
            st.enumerated += 1;
            for (&i, &c) in free.iter().zip(&assignment) {
                bind[i] = Some(c);
            }
            self.emit(cl, unknown, bind, st);
        }
        for &i in &free {
            bind[i] = None;
        }
    }

    fn emit(&self, cl: &CompiledClause, unknown: u64, bind: &[Option<ConstId>], st: &mut JoinState) {
        let mut body: SmallVec<[GroundAtom; 3]> = SmallVec::with_capacity(cl.body.len());
        for (p, atom) in cl.body.iter().enumerate() {
            let g = ground_compiled(atom, bind).expect("all slots bound");
            if unknown & (1u64 << p) != 0 && self.store.contains(&g) {
                return;
            }
            body.push(g);
        }
        st.out.push(RawCandidate {
            rule: cl.rule_id,
            slots: bind.iter().map(|b| b.expect("bound")).collect(),
            body,
            unknown,
        });
    }
}

fn match_compiled(head: &CompiledAtom, goal: &[ConstId], bind: &mut [Option<ConstId>]) -> bool {
    if head.args.len() != goal.len() {
        return false;
    }
    for (slot, &c) in head.args.iter().zip(goal) {
        match *slot {
            Slot::Const(k) if k != c => return false,
            Slot::Const(_) => {}
            Slot::Var(i) => match bind[i] {
                Some(b) if b != c => return false,
                Some(_) => {}
                None => bind[i] = Some(c),
            },
        }
    }
    true
}

fn bound_args(atom: &CompiledAtom, bind: &[Option<ConstId>]) -> SmallVec<[Option<ConstId>; 3]> {
    atom.args
        .iter()
        .map(|s| match *s {
            Slot::Const(c) => Some(c),
            Slot::Var(i) => bind[i],
        })
        .collect()
}

fn ground_compiled(atom: &CompiledAtom, bind: &[Option<ConstId>]) -> Option<GroundAtom> {
    let args = atom
        .args
        .iter()
        .map(|s| match *s {
            Slot::Const(c) => Some(c),
            Slot::Var(i) => bind[i],
        })
        .collect::<Option<_>>()?;
    Some(GroundAtom {
        pred: atom.pred,
        args,
    })
}

pub(crate) fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |i| mask & (1u64 << i) != 0)
}
