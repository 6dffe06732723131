//! Indexed store of known ground atoms.

use crate::logic::{ArityConflict, Atom, ConstId, GroundAtom, PredId, Substitution, Symbols, Term};
use indexmap::IndexSet;
use rustc_hash::{FxBuildHasher, FxHashMap};
use serde::Serialize;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum FactError {
    #[error("line {line}: expected 3 tab-separated columns, found {found}")]
    Malformed { line: usize, found: usize },
    #[error("line {line}: {source}")]
    Arity {
        line: usize,
        #[source]
        source: ArityConflict,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Dataset statistics in the layout of the usual KG benchmark tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KgStats {
    pub entities: usize,
    pub relations: usize,
    pub facts: usize,
    /// facts / entities
    pub degree: f64,
}

/// Set of known ground atoms with per-position indices.
///
/// For every predicate the store keeps the full posting list and, for every
/// argument position, a posting list keyed by the constant at that position.
/// Fully ground lookups go through the membership hash. Posting lists are in
/// ascending fact id order.
#[derive(Debug, Clone, Default)]
pub struct FactStore {
    facts: IndexSet<GroundAtom, FxBuildHasher>,
    by_pred: FxHashMap<PredId, Vec<u32>>,
    by_pos: FxHashMap<(PredId, u8, ConstId), Vec<u32>>,
}

impl FactStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_facts(facts: impl IntoIterator<Item = GroundAtom>) -> Self {
        let mut store = FactStore::new();
        for f in facts {
            store.insert(f);
        }
        store
    }

    fn insert(&mut self, fact: GroundAtom) -> bool {
        let (id, fresh) = self.facts.insert_full(fact);
        if !fresh {
            return false;
        }
        let fact = &self.facts[id];
        let id = id as u32;
        self.by_pred.entry(fact.pred).or_default().push(id);
        for (pos, &c) in fact.args.iter().enumerate() {
            self.by_pos
                .entry((fact.pred, pos as u8, c))
                .or_default()
                .push(id);
        }
        true
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn contains(&self, atom: &GroundAtom) -> bool {
        self.facts.contains(atom)
    }

    pub fn id_of(&self, atom: &GroundAtom) -> Option<usize> {
        self.facts.get_index_of(atom)
    }

    pub fn get(&self, id: usize) -> &GroundAtom {
        &self.facts[id]
    }

    pub fn iter(&self) -> impl Iterator<Item = &GroundAtom> + '_ {
        self.facts.iter()
    }

    pub fn facts_of(&self, pred: PredId) -> impl Iterator<Item = &GroundAtom> + '_ {
        self.by_pred
            .get(&pred)
            .into_iter()
            .flatten()
            .map(|&i| &self.facts[i as usize])
    }

    pub fn predicates(&self) -> Vec<PredId> {
        let mut p: Vec<_> = self.by_pred.keys().copied().collect();
        p.sort_unstable();
        p
    }

    /// Constants occurring in some fact, ascending.
    pub fn entities(&self) -> Vec<ConstId> {
        let mut out: Vec<ConstId> = self.facts.iter().flat_map(|f| f.args.iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn stats(&self) -> KgStats {
        let entities = self.entities().len();
        KgStats {
            entities,
            relations: self.by_pred.len(),
            facts: self.len(),
            degree: if entities == 0 {
                0.0
            } else {
                self.len() as f64 / entities as f64
            },
        }
    }

    /// Posting list of the most selective index for a partially bound pattern.
    fn postings(&self, pred: PredId, bound: &[Option<ConstId>]) -> &[u32] {
        let mut best: Option<&[u32]> = None;
        for (pos, b) in bound.iter().enumerate() {
            if let Some(c) = b {
                let list = self
                    .by_pos
                    .get(&(pred, pos as u8, *c))
                    .map_or(&[][..], |v| v.as_slice());
                if best.is_none_or(|b| list.len() < b.len()) {
                    best = Some(list);
                }
            }
        }
        best.unwrap_or_else(|| self.by_pred.get(&pred).map_or(&[][..], |v| v.as_slice()))
    }

    /// Upper bound on the number of facts matching a partially bound pattern.
    pub fn estimate(&self, pred: PredId, bound: &[Option<ConstId>]) -> usize {
        if bound.iter().all(Option::is_some) {
            let g = GroundAtom::new(pred, bound.iter().map(|c| c.unwrap()));
            return usize::from(self.contains(&g));
        }
        self.postings(pred, bound).len()
    }

    /// Facts agreeing with every bound position, in ascending id order.
    pub fn matching<'a>(
        &'a self,
        pred: PredId,
        bound: &'a [Option<ConstId>],
    ) -> impl Iterator<Item = &'a GroundAtom> + 'a {
        self.postings(pred, bound)
            .iter()
            .map(move |&i| &self.facts[i as usize])
            .filter(move |f| {
                f.args.len() == bound.len()
                    && f.args
                        .iter()
                        .zip(bound)
                        .all(|(a, b)| b.is_none_or(|b| *a == b))
            })
    }

    /// Every substitution `theta` over the pattern's variables with
    /// `theta(pattern)` in the store, ascending by fact id.
    pub fn lookup<'a>(&'a self, pattern: &'a Atom) -> impl Iterator<Item = Substitution> + 'a {
        let bound: Vec<Option<ConstId>> = pattern.args.iter().map(|t| t.as_const()).collect();
        let ids: Vec<u32> = if bound.iter().all(Option::is_some) {
            pattern
                .to_ground()
                .and_then(|g| self.id_of(&g))
                .map(|i| i as u32)
                .into_iter()
                .collect()
        } else {
            self.postings(pattern.pred, &bound).to_vec()
        };
        ids.into_iter().filter_map(move |i| {
            let fact = &self.facts[i as usize];
            if fact.pred != pattern.pred || fact.args.len() != pattern.args.len() {
                return None;
            }
            let mut theta = Substitution::new();
            for (&c, &t) in fact.args.iter().zip(pattern.args.iter()) {
                match t {
                    Term::Const(k) if k != c => return None,
                    Term::Const(_) => {}
                    Term::Var(v) => match theta.get(v) {
                        Some(b) if b != c => return None,
                        Some(_) => {}
                        None => {
                            theta.bind(v, c);
                        }
                    },
                }
            }
            Some(theta)
        })
    }
}

/// Parses `subject TAB relation TAB object` lines into binary ground atoms.
pub fn parse_triples(text: &str, symbols: &mut Symbols) -> Result<Vec<GroundAtom>, FactError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = raw.split('\t').collect();
        if cols.len() != 3 || cols.iter().any(|c| c.trim().is_empty()) {
            return Err(FactError::Malformed {
                line,
                found: cols.len(),
            });
        }
        let pred = symbols
            .intern_predicate(cols[1].trim(), 2)
            .map_err(|source| FactError::Arity { line, source })?;
        let s = symbols.intern_constant(cols[0].trim());
        let o = symbols.intern_constant(cols[2].trim());
        out.push(GroundAtom::new(pred, [s, o]));
    }
    Ok(out)
}

/// Loads a TSV triple file into a store, interning new symbols.
pub fn load_facts(text: &str, symbols: &mut Symbols) -> Result<FactStore, FactError> {
    Ok(FactStore::from_facts(parse_triples(text, symbols)?))
}

pub fn read_triples_file(path: &Path, symbols: &mut Symbols) -> Result<Vec<GroundAtom>, FactError> {
    let text = std::fs::read_to_string(path).map_err(|source| FactError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_triples(&text, symbols)
}

/// The train/valid/test triple-file triplet of a KG benchmark.
#[derive(Debug, Clone, Default)]
pub struct Dataset {
    pub train: FactStore,
    pub valid: Vec<GroundAtom>,
    pub test: Vec<GroundAtom>,
}

impl Dataset {
    /// Reads `train.tsv`, `valid.tsv` and `test.tsv` (or `.txt`) from `dir`.
    /// A missing validation file is treated as empty.
    pub fn load_dir(dir: &Path, symbols: &mut Symbols) -> Result<Dataset, FactError> {
        let find = |stem: &str| -> Option<std::path::PathBuf> {
            ["tsv", "txt"]
                .iter()
                .map(|ext| dir.join(format!("{stem}.{ext}")))
                .find(|p| p.exists())
        };
        let train_path = find("train").unwrap_or_else(|| dir.join("train.tsv"));
        let train = FactStore::from_facts(read_triples_file(&train_path, symbols)?);
        let valid = match find("valid") {
            Some(p) => read_triples_file(&p, symbols)?,
            None => Vec::new(),
        };
        let test_path = find("test").unwrap_or_else(|| dir.join("test.tsv"));
        let test = read_triples_file(&test_path, symbols)?;
        Ok(Dataset { train, valid, test })
    }

    /// Every constant of the three splits, ascending.
    pub fn entities(&self) -> Vec<ConstId> {
        let mut out = self.train.entities();
        out.extend(self.valid.iter().chain(&self.test).flat_map(|f| f.args.iter().copied()));
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Train, valid and test facts together; the usual filter set.
    pub fn all_true(&self) -> FactStore {
        FactStore::from_facts(
            self.train
                .iter()
                .cloned()
                .chain(self.valid.iter().cloned())
                .chain(self.test.iter().cloned()),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::parse_theory;

    fn tiny() -> (Symbols, FactStore) {
        let mut s = Symbols::new();
        let store = load_facts("it\tlocIn\tseu\nseu\tlocIn\teu\nit\tneighOf\tfr\n", &mut s).unwrap();
        (s, store)
    }

    #[test]
    fn tsv_line_becomes_binary_atom() {
        let mut s = Symbols::new();
        let store = load_facts("italy\tlocatedIn\tsouthern_europe\n", &mut s).unwrap();
        let f = store.get(0);
        assert_eq!(f.display(&s).to_string(), "locatedIn(italy,southern_europe)");
        assert_eq!(s.arity(f.pred), 2);
    }

    #[test]
    fn duplicates_are_ignored() {
        let mut s = Symbols::new();
        let store = load_facts("a\tp\tb\na\tp\tb\n", &mut s).unwrap();
        assert_eq!(store.len(), 1);
    }

    #[test]
    fn malformed_line_number() {
        let mut s = Symbols::new();
        let err = load_facts("a\tp\tb\na\tp\n", &mut s).unwrap_err();
        assert!(matches!(err, FactError::Malformed { line: 2, found: 2 }));
    }

    #[test]
    fn arity_conflict_with_rules() {
        let theory = parse_theory("p(X,Y,Z) :- q(X,Y,Z).").unwrap();
        let mut s = theory.symbols.clone();
        let err = load_facts("a\tp\tb\n", &mut s).unwrap_err();
        assert!(matches!(err, FactError::Arity { line: 1, .. }));
    }

    #[test]
    fn lookup_examples() {
        let (mut s, store) = tiny();
        let loc = s.predicate("locIn").unwrap();
        let y = s.intern_variable("Y");
        let x = s.intern_variable("X");
        let it = s.constant("it").unwrap();
        let fr = s.constant("fr").unwrap();
        let seu = s.constant("seu").unwrap();

        let p = Atom::new(loc, [Term::Const(it), Term::Var(y)]);
        let got: Vec<_> = store.lookup(&p).collect();
        assert_eq!(got, vec![Substitution::from_pairs([(y, seu)])]);

        let p = Atom::new(loc, [Term::Var(x), Term::Var(y)]);
        assert_eq!(store.lookup(&p).count(), 2);

        let p = Atom::new(loc, [Term::Const(fr), Term::Var(y)]);
        assert_eq!(store.lookup(&p).count(), 0);

        let g = Atom::new(loc, [Term::Const(it), Term::Const(seu)]);
        assert_eq!(store.lookup(&g).collect::<Vec<_>>(), vec![Substitution::new()]);
    }

    #[test]
    fn repeated_pattern_variable() {
        let mut s = Symbols::new();
        let store = load_facts("a\tp\ta\na\tp\tb\n", &mut s).unwrap();
        let p = s.predicate("p").unwrap();
        let x = s.intern_variable("X");
        let pat = Atom::new(p, [Term::Var(x), Term::Var(x)]);
        assert_eq!(store.lookup(&pat).count(), 1);
    }

    #[test]
    fn stats_degree() {
        let (_, store) = tiny();
        let st = store.stats();
        assert_eq!((st.entities, st.relations, st.facts), (4, 2, 3));
        assert!((st.degree - 0.75).abs() < 1e-12);
    }
}
