use serde::{Deserialize, Serialize};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("no candidates to rank against")]
    NoCandidates,
    #[error("no reports to average")]
    NothingToAverage,
    #[error("invalid ablation request: {0}")]
    Ablation(String),
}

/// Mean tie rank: `1 + #greater + #equal / 2`.
pub fn rank_query(query: f64, candidates: &[f64]) -> Result<f64, EvalError> {
    if candidates.is_empty() {
        return Err(EvalError::NoCandidates);
    }
    Ok(rank_against(query, candidates.iter().copied()))
}

pub(crate) fn rank_against(query: f64, candidates: impl IntoIterator<Item = f64>) -> f64 {
    let (mut greater, mut equal) = (0u64, 0u64);
    for c in candidates {
        if c > query {
            greater += 1;
        } else if c == query {
            equal += 1;
        }
    }
    1.0 + greater as f64 + equal as f64 / 2.0
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Head,
    Tail,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankingReport {
    pub mrr: f64,
    pub hits1: f64,
    pub hits3: f64,
    pub hits10: f64,
    pub side: Side,
    /// Number of runs averaged into this report.
    pub runs: usize,
    /// Test triples skipped for using symbols outside the vocabulary.
    pub excluded: usize,
    pub ranks: Vec<f64>,
}

impl RankingReport {
    pub fn from_ranks(ranks: Vec<f64>, side: Side) -> RankingReport {
        let n = ranks.len().max(1) as f64;
        let hits = |k: f64| ranks.iter().filter(|r| **r <= k).count() as f64 / n;
        RankingReport {
            mrr: ranks.iter().map(|r| 1.0 / r).sum::<f64>() / n,
            hits1: hits(1.0),
            hits3: hits(3.0),
            hits10: hits(10.0),
            side,
            runs: 1,
            excluded: 0,
            ranks,
        }
    }

    /// Metric means over runs; per-query ranks are concatenated.
    pub fn average(reports: &[RankingReport]) -> Result<RankingReport, EvalError> {
        let first = reports.first().ok_or(EvalError::NothingToAverage)?;
        let n = reports.len() as f64;
        let mean = |f: fn(&RankingReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
        Ok(RankingReport {
            mrr: mean(|r| r.mrr),
            hits1: mean(|r| r.hits1),
            hits3: mean(|r| r.hits3),
            hits10: mean(|r| r.hits10),
            side: first.side,
            runs: reports.iter().map(|r| r.runs).sum(),
            excluded: reports.iter().map(|r| r.excluded).sum(),
            ranks: reports.iter().flat_map(|r| r.ranks.iter().copied()).collect(),
        })
    }
}

impl fmt::Display for RankingReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<8}{:>8}{:>8}{:>8}{:>8}", "runs", "MRR", "H@1", "H@3", "H@10")?;
        writeln!(
            f,
            "{:<8}{:>8.4}{:>8.4}{:>8.4}{:>8.4}",
            self.runs, self.mrr, self.hits1, self.hits3, self.hits10
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks() {
        assert_eq!(rank_query(0.9, &[0.95, 0.8, 0.7]).unwrap(), 2.0);
        assert_eq!(rank_query(0.5, &[0.5; 10]).unwrap(), 6.0);
        assert_eq!(rank_query(1.0, &[0.2, 0.3]).unwrap(), 1.0);
        assert_eq!(rank_query(1.0, &[]), Err(EvalError::NoCandidates));
    }

    #[test]
    fn aggregates() {
        let r = RankingReport::from_ranks(vec![1.0, 2.0, 4.0], Side::Both);
        assert!((r.mrr - 1.75 / 3.0).abs() < 1e-12);
        assert!((r.hits3 - 2.0 / 3.0).abs() < 1e-12);
        assert!((r.hits1 - 1.0 / 3.0).abs() < 1e-12);
        let p = RankingReport::from_ranks(vec![1.0; 5], Side::Both);
        assert_eq!((p.mrr, p.hits1, p.hits3, p.hits10), (1.0, 1.0, 1.0, 1.0));
        let avg = RankingReport::average(&[r.clone(), p]).unwrap();
        assert_eq!(avg.runs, 2);
        assert!((avg.mrr - (r.mrr + 1.0) / 2.0).abs() < 1e-12);
    }
}
