//! Link-prediction evaluation: ranks, filtered metrics and ablation splits.

pub mod ablation;
pub mod evaluate;
pub mod metrics;

pub use ablation::{build_ablation_split, AblationSplit};
pub use evaluate::{corruption_atoms, evaluate, Corruptions, EvalOptions, ScoreSource};
pub use metrics::{rank_query, EvalError, RankingReport, Side};
