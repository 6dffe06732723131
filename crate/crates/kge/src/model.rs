use bcg_core::logic::{ConstId, GroundAtom, PredId, Symbols};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    ComplEx,
    DistMult,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::ComplEx => "complex",
            ModelKind::DistMult => "distmult",
        })
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "complex" => Ok(ModelKind::ComplEx),
            "distmult" => Ok(ModelKind::DistMult),
            other => Err(format!("unknown model kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("unknown entity `{0}`")]
    UnknownEntity(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("atom is not binary")]
    NotBinary,
}

/// Row-major real and imaginary parts, one row of `dim` per symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl Table {
    fn zeros(rows: usize, dim: usize) -> Table {
        Table {
            re: vec![0.0; rows * dim],
            im: vec![0.0; rows * dim],
        }
    }
}

/// Complex embeddings for every entity and relation. Rows are indexed by the
/// symbol ids of the table the model was created from.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    pub kind: ModelKind,
    pub dim: usize,
    pub entity_names: Vec<String>,
    pub relation_names: Vec<String>,
    pub entities: Table,
    pub relations: Table,
    entity_index: FxHashMap<String, usize>,
    relation_index: FxHashMap<String, usize>,
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

impl EmbeddingModel {
    /// Entries drawn from `N(0, 1/sqrt(dim))`; DistMult keeps zero imaginary parts.
    pub fn new(kind: ModelKind, dim: usize, symbols: &Symbols, seed: u64) -> EmbeddingModel {
        let entity_names: Vec<String> = symbols.constants().map(|c| symbols.constant_name(c).to_string()).collect();
        let relation_names: Vec<String> = symbols.predicates().map(|p| symbols.predicate_name(p).to_string()).collect();
        let mut m = EmbeddingModel::zeros(kind, dim, entity_names, relation_names);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = Normal::new(0.0, 1.0 / (dim as f64).sqrt()).expect("positive std");
        for t in [&mut m.entities, &mut m.relations] {
            for v in t.re.iter_mut() {
                *v = normal.sample(&mut rng);
            }
            if kind == ModelKind::ComplEx {
                for v in t.im.iter_mut() {
                    *v = normal.sample(&mut rng);
                }
            }
        }
        m
    }

    pub fn zeros(kind: ModelKind, dim: usize, entity_names: Vec<String>, relation_names: Vec<String>) -> EmbeddingModel {
        let entity_index = entity_names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let relation_index = relation_names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        EmbeddingModel {
            kind,
            dim,
            entities: Table::zeros(entity_names.len(), dim),
            relations: Table::zeros(relation_names.len(), dim),
            entity_names,
            relation_names,
            entity_index,
            relation_index,
        }
    }

    pub fn num_entities(&self) -> usize {
        self.entity_names.len()
    }

    pub fn num_relations(&self) -> usize {
        self.relation_names.len()
    }

    pub fn entity(&self, name: &str) -> Option<usize> {
        self.entity_index.get(name).copied()
    }

    pub fn relation(&self, name: &str) -> Option<usize> {
        self.relation_index.get(name).copied()
    }

    /// `Re(sum_k e_s[k] * w_r[k] * conj(e_o[k]))` by row index.
    #[inline]
    pub fn raw(&self, s: usize, r: usize, o: usize) -> f64 {
        let k = self.dim;
        let (sr, si) = (&self.entities.re[s * k..][..k], &self.entities.im[s * k..][..k]);
        let (rr, ri) = (&self.relations.re[r * k..][..k], &self.relations.im[r * k..][..k]);
        let (or, oi) = (&self.entities.re[o * k..][..k], &self.entities.im[o * k..][..k]);
        let mut acc = 0.0;
        for i in 0..k {
            acc += sr[i] * rr[i] * or[i] + si[i] * rr[i] * oi[i] + sr[i] * ri[i] * oi[i] - si[i] * ri[i] * or[i];
        }
        acc
    }

    pub fn raw_ids(&self, s: ConstId, r: PredId, o: ConstId) -> f64 {
        self.raw(s.index(), r.index(), o.index())
    }

    /// Score of a binary atom in `(0, 1)`, or `None` when a symbol is outside
    /// the vocabulary.
    pub fn prob(&self, atom: &GroundAtom) -> Option<f64> {
        if atom.args.len() != 2 {
            return None;
        }
        let (s, o) = (atom.args[0].index(), atom.args[1].index());
        let r = atom.pred.index();
        if s >= self.num_entities() || o >= self.num_entities() || r >= self.num_relations() {
            return None;
        }
        Some(sigmoid(self.raw(s, r, o)))
    }

    pub fn score_named(&self, s: &str, r: &str, o: &str) -> Result<f64, ModelError> {
        let si = self.entity(s).ok_or_else(|| ModelError::UnknownEntity(s.into()))?;
        let oi = self.entity(o).ok_or_else(|| ModelError::UnknownEntity(o.into()))?;
        let ri = self.relation(r).ok_or_else(|| ModelError::UnknownRelation(r.into()))?;
        Ok(self.raw(si, ri, oi))
    }

    pub fn is_finite(&self) -> bool {
        [&self.entities, &self.relations]
            .iter()
            .all(|t| t.re.iter().chain(&t.im).all(|v| v.is_finite()))
    }

    /// Flat view of all parameters: entity re, entity im, relation re, relation im.
    pub fn params_mut(&mut self) -> [&mut Vec<f64>; 4] {
        [
            &mut self.entities.re,
            &mut self.entities.im,
            &mut self.relations.re,
            &mut self.relations.im,
        ]
    }

    pub fn params(&self) -> [&Vec<f64>; 4] {
        [&self.entities.re, &self.entities.im, &self.relations.re, &self.relations.im]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(s: (f64, f64), r: (f64, f64), o: (f64, f64)) -> EmbeddingModel {
        let mut m = EmbeddingModel::zeros(ModelKind::ComplEx, 1, vec!["s".into(), "o".into()], vec!["r".into()]);
        m.entities.re = vec![s.0, o.0];
        m.entities.im = vec![s.1, o.1];
        m.relations.re = vec![r.0];
        m.relations.im = vec![r.1];
        m
    }

    #[test]
    fn unit_scores() {
        let m = unit((1.0, 0.0), (1.0, 0.0), (1.0, 0.0));
        assert_eq!(m.raw(0, 0, 1), 1.0);
        assert!((sigmoid(1.0) - 0.7311).abs() < 1e-4);
        let m = unit((1.0, 0.0), (1.0, 0.0), (0.0, 1.0));
        assert_eq!(m.raw(0, 0, 1), 0.0);
        assert_eq!(sigmoid(0.0), 0.5);
        assert!(matches!(m.score_named("x", "r", "o"), Err(ModelError::UnknownEntity(_))));
    }

    #[test]
    fn complex_is_asymmetric_distmult_is_not() {
        let mut syms = Symbols::new();
        syms.intern_predicate("r", 2).unwrap();
        syms.intern_constant("a");
        syms.intern_constant("b");
        let c = EmbeddingModel::new(ModelKind::ComplEx, 8, &syms, 3);
        assert!((c.raw(0, 0, 1) - c.raw(1, 0, 0)).abs() > 1e-9);
        let d = EmbeddingModel::new(ModelKind::DistMult, 8, &syms, 3);
        assert!(d.entities.im.iter().all(|v| *v == 0.0));
        assert!((d.raw(0, 0, 1) - d.raw(1, 0, 0)).abs() < 1e-12);
        // a DistMult model is a ComplEx model with zero imaginary parts
        let mut as_complex = d.clone();
        as_complex.kind = ModelKind::ComplEx;
        assert_eq!(as_complex.raw(0, 0, 1), d.raw(0, 0, 1));
    }
}
