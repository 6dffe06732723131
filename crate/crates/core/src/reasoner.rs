//! Fuzzy score propagation over a grounded network.

use crate::gmn::GroundedNetwork;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Convergence tolerance for [`Steps::Fixpoint`].
pub const EPSILON: f64 = 1e-9;

/// Initial score of an atom over symbols the input layer never saw.
pub const NEUTRAL_SCORE: f64 = 0.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TNorm {
    Product,
    Goedel,
    Lukasiewicz,
}

impl TNorm {
    pub const ALL: [TNorm; 3] = [TNorm::Product, TNorm::Goedel, TNorm::Lukasiewicz];

    /// Unchecked evaluation; the empty conjunction is 1.
    #[inline]
    pub fn apply(self, values: impl IntoIterator<Item = f64>) -> f64 {
        match self {
            TNorm::Product => values.into_iter().product(),
            TNorm::Goedel => values.into_iter().fold(1.0, f64::min),
            TNorm::Lukasiewicz => values.into_iter().fold(1.0, |acc, v| (acc + v - 1.0).max(0.0)),
        }
    }

    pub fn eval(self, values: &[f64]) -> Result<f64, ReasonerError> {
        if values.is_empty() {
            return Err(ReasonerError::EmptyConjunction);
        }
        if let Some(&v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(ReasonerError::OutOfRange(v));
        }
        Ok(self.apply(values.iter().copied()))
    }
}

impl fmt::Display for TNorm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TNorm::Product => "product",
            TNorm::Goedel => "goedel",
            TNorm::Lukasiewicz => "lukasiewicz",
        })
    }
}

impl FromStr for TNorm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "product" | "prod" => Ok(TNorm::Product),
            "goedel" | "godel" | "gödel" | "min" => Ok(TNorm::Goedel),
            "lukasiewicz" | "łukasiewicz" | "luk" => Ok(TNorm::Lukasiewicz),
            other => Err(format!("unknown t-norm `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ReasonerError {
    #[error("t-norm of an empty sequence")]
    EmptyConjunction,
    #[error("score {0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error("score table has {found} entries but the network has {expected} nodes")]
    MissingInit { expected: usize, found: usize },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    KnownFact,
    KgeInitial,
    Propagated,
}

/// Scores per network node.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreTable {
    scores: Vec<f64>,
    provenance: Vec<Provenance>,
}

impl ScoreTable {
    /// Known nodes get 1; others take `initial(node)`, clamped to [0, 1].
    pub fn init(net: &GroundedNetwork, mut initial: impl FnMut(u32) -> f64) -> ScoreTable {
        let mut scores = Vec::with_capacity(net.nodes.len());
        let mut provenance = Vec::with_capacity(net.nodes.len());
        for (i, n) in net.nodes.iter().enumerate() {
            if n.known {
                scores.push(1.0);
                provenance.push(Provenance::KnownFact);
            } else {
                scores.push(initial(i as u32).clamp(0.0, 1.0));
                provenance.push(Provenance::KgeInitial);
            }
        }
        ScoreTable { scores, provenance }
    }

    pub fn from_parts(scores: Vec<f64>, provenance: Vec<Provenance>) -> Result<ScoreTable, ReasonerError> {
        assert_eq!(scores.len(), provenance.len());
        if let Some(&v) = scores.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(ReasonerError::OutOfRange(v));
        }
        Ok(ScoreTable { scores, provenance })
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn score(&self, node: u32) -> f64 {
        self.scores[node as usize]
    }

    pub fn provenance(&self, node: u32) -> Provenance {
        self.provenance[node as usize]
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    /// `atom<TAB>score` lines in node order.
    pub fn to_text(&self, net: &GroundedNetwork) -> String {
        let mut s = String::new();
        for (i, v) in self.scores.iter().enumerate() {
            s.push_str(&net.node_name(i as u32));
            s.push('\t');
            s.push_str(&format!("{v}\n"));
        }
        s
    }
}

/// Reads `atom<TAB>score` lines.
pub fn parse_scores(text: &str) -> Result<Vec<(String, f64)>, ReasonerError> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| ReasonerError::Parse { line: i + 1, message };
        let (atom, score) = line
            .rsplit_once('\t')
            .ok_or_else(|| err("expected `atom<TAB>score`".into()))?;
        let v: f64 = score.trim().parse().map_err(|e| err(format!("{e}")))?;
        if !(0.0..=1.0).contains(&v) {
            return Err(err(format!("score {v} is outside [0, 1]")));
        }
        out.push((atom.to_string(), v));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Steps {
    Fixed(usize),
    /// Until no score moves by more than [`EPSILON`], at most one step per node.
    Fixpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Propagation {
    pub steps_run: usize,
    pub converged: bool,
}

/// Synchronous max/t-norm propagation:
/// `o'(h) = max(o0(h), max over edges g into h of tnorm(o(body(g))))`.
pub fn propagate(
    net: &GroundedNetwork,
    init: &ScoreTable,
    kind: TNorm,
    steps: Steps,
) -> Result<(ScoreTable, Propagation), ReasonerError> {
    if init.len() != net.nodes.len() {
        return Err(ReasonerError::MissingInit {
            expected: net.nodes.len(),
            found: init.len(),
        });
    }
    let heads: Vec<u32> = (0..net.nodes.len() as u32).filter(|&h| net.is_head(h)).collect();
    let limit = match steps {
        Steps::Fixed(n) => n,
        Steps::Fixpoint => net.nodes.len(),
    };
    let mut cur = init.scores.clone();
    let mut provenance = init.provenance.clone();
    let mut run = 0;
    let mut converged = false;
    while run < limit {
        let updates: Vec<f64> = heads
            .par_iter()
            .map(|&h| {
                net.incoming(h).iter().fold(init.scores[h as usize], |best, &e| {
                    let v = kind.apply(net.neighbours(e).iter().map(|&b| cur[b as usize]));
                    best.max(v)
                })
            })
            .collect();
        run += 1;
        let mut delta: f64 = 0.0;
        for (&h, v) in heads.iter().zip(updates) {
            let slot = &mut cur[h as usize];
            delta = delta.max((v - *slot).abs());
            if v > init.scores[h as usize] && provenance[h as usize] != Provenance::KnownFact {
                provenance[h as usize] = Provenance::Propagated;
            }
            *slot = v;
        }
        if delta <= EPSILON {
            converged = true;
            break;
        }
    }
    if limit == 0 || heads.is_empty() {
        converged = true;
    }
    Ok((ScoreTable { scores: cur, provenance }, Propagation { steps_run: run, converged }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::facts::FactStore;
    use crate::gmn::build_gmn;
    use crate::grounder::GroundingResult;
    use crate::logic::{parse_theory, GroundAtom, Substitution};

    #[test]
    fn tnorm_values() {
        let v = [0.8, 0.5];
        assert!((TNorm::Product.eval(&v).unwrap() - 0.40).abs() < 1e-12);
        assert_eq!(TNorm::Goedel.eval(&v).unwrap(), 0.5);
        assert!((TNorm::Lukasiewicz.eval(&v).unwrap() - 0.3).abs() < 1e-12);
        assert!(matches!(TNorm::Product.eval(&[1.2]), Err(ReasonerError::OutOfRange(_))));
        assert_eq!(TNorm::Goedel.eval(&[]), Err(ReasonerError::EmptyConjunction));
    }

    fn single_edge() -> GroundedNetwork {
        let mut t = parse_theory("h(X) :- a(X), b(X).").unwrap();
        let x = t.symbols.variable("X").unwrap();
        let c = t.symbols.intern_constant("c");
        let h = GroundAtom::new(t.symbols.predicate("h").unwrap(), [c]);
        let r = GroundingResult::from_instances(&t, &FactStore::new(), &[h], [(0, Substitution::from_pairs([(x, c)]))]);
        build_gmn(&r, &t)
    }

    #[test]
    fn one_step_product() {
        let net = single_edge();
        let init = ScoreTable::init(&net, |n| [0.1, 0.9, 0.8][n as usize]);
        let (out, _) = propagate(&net, &init, TNorm::Product, Steps::Fixed(1)).unwrap();
        assert!((out.score(0) - 0.72).abs() < 1e-12);
        assert_eq!(out.provenance(0), Provenance::Propagated);
        let (same, p) = propagate(&net, &init, TNorm::Product, Steps::Fixed(0)).unwrap();
        assert_eq!(same, init);
        assert_eq!(p.steps_run, 0);
    }

    #[test]
    fn prior_is_kept_when_larger() {
        let net = single_edge();
        let init = ScoreTable::init(&net, |n| [0.95, 0.9, 0.8][n as usize]);
        let (out, _) = propagate(&net, &init, TNorm::Goedel, Steps::Fixpoint).unwrap();
        assert_eq!(out.score(0), 0.95);
        assert_eq!(out.provenance(0), Provenance::KgeInitial);
    }

    #[test]
    fn init_must_cover_nodes() {
        let net = single_edge();
        let short = ScoreTable::from_parts(vec![0.5], vec![Provenance::KgeInitial]).unwrap();
        assert!(matches!(
            propagate(&net, &short, TNorm::Product, Steps::Fixed(1)),
            Err(ReasonerError::MissingInit { .. })
        ));
    }

    #[test]
    fn score_text_round_trip() {
        let net = single_edge();
        let init = ScoreTable::init(&net, |_| 0.25);
        let parsed = parse_scores(&init.to_text(&net)).unwrap();
        assert_eq!(parsed[0], ("h(c)".to_string(), 0.25));
        assert!(parse_scores("p(a)\t1.5").is_err());
    }
}
