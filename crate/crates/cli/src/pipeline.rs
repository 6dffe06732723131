//! Train, ground, propagate and rank: the end-to-end experiment.

use bcg_core::facts::FactStore;
use bcg_core::gmn::{build_gmn, GroundedNetwork};
use bcg_core::grounder::{ground, GroundError, GrounderParams, GroundingResult};
use bcg_core::logic::{ConstId, GroundAtom, Symbols, Theory};
use bcg_core::reasoner::{propagate, ReasonerError, ScoreTable, Steps, TNorm, NEUTRAL_SCORE};
use bcg_eval::{corruption_atoms, evaluate, EvalOptions, RankingReport};
use bcg_kge::{sigmoid, train, EmbeddingModel, TrainConfig, TrainError};

/// Input-layer scores `o0` for atoms named through a symbol table, tolerant
/// of models whose vocabulary is ordered differently or incomplete.
pub struct KgeScorer<'a> {
    model: &'a EmbeddingModel,
    entities: Vec<Option<usize>>,
    relations: Vec<Option<usize>>,
}

impl<'a> KgeScorer<'a> {
    pub fn new(model: &'a EmbeddingModel, symbols: &Symbols) -> KgeScorer<'a> {
        KgeScorer {
            model,
            entities: symbols.constants().map(|c| model.entity(symbols.constant_name(c))).collect(),
            relations: symbols.predicates().map(|p| model.relation(symbols.predicate_name(p))).collect(),
        }
    }

    pub fn score(&self, atom: &GroundAtom) -> f64 {
        if atom.args.len() != 2 {
            return NEUTRAL_SCORE;
        }
        let ent = |c: ConstId| self.entities.get(c.index()).copied().flatten();
        match (ent(atom.args[0]), self.relations.get(atom.pred.index()).copied().flatten(), ent(atom.args[1])) {
            (Some(s), Some(r), Some(o)) => sigmoid(self.model.raw(s, r, o)),
            _ => NEUTRAL_SCORE,
        }
    }

    /// `o0` for every network node, looked up by name.
    pub fn init(&self, net: &GroundedNetwork) -> ScoreTable {
        network_init(self.model, net)
    }
}

/// `o0` for every node of `net` from `model`, matching symbols by name.
pub fn network_init(model: &EmbeddingModel, net: &GroundedNetwork) -> ScoreTable {
    ScoreTable::init(net, |n| {
        let node = &net.nodes[n as usize];
        if node.args.len() != 2 {
            return NEUTRAL_SCORE;
        }
        let ids = (
            model.entity(&net.constants[node.args[0] as usize]),
            model.relation(&net.predicates[node.pred as usize].0),
            model.entity(&net.constants[node.args[1] as usize]),
        );
        match ids {
            (Some(s), Some(r), Some(o)) => sigmoid(model.raw(s, r, o)),
            _ => NEUTRAL_SCORE,
        }
    })
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Train(#[from] TrainError),
    #[error(transparent)]
    Ground(#[from] GroundError),
    #[error(transparent)]
    Reasoner(#[from] ReasonerError),
}

/// Reasoning stage settings; `params == None` means the input layer alone.
#[derive(Debug, Clone, Copy)]
pub struct Reasoning {
    pub params: Option<GrounderParams>,
    pub tnorm: TNorm,
    /// Defaults to one step per unit of grounder depth, or a fixpoint.
    pub steps: Option<Steps>,
}

impl Reasoning {
    pub fn baseline() -> Reasoning {
        Reasoning {
            params: None,
            tnorm: TNorm::Product,
            steps: None,
        }
    }

    pub fn with(params: GrounderParams, tnorm: TNorm) -> Reasoning {
        Reasoning {
            params: Some(params),
            tnorm,
            steps: None,
        }
    }

    fn steps(&self, params: &GrounderParams) -> Steps {
        self.steps.unwrap_or(match params.depth.finite() {
            Some(d) => Steps::Fixed(d),
            None => Steps::Fixpoint,
        })
    }
}

/// Everything one evaluation needs.
pub struct Task<'a> {
    pub theory: &'a Theory,
    pub train: &'a FactStore,
    pub test: &'a [GroundAtom],
    /// All known-true triples, used for filtering.
    pub filter: &'a FactStore,
    pub entities: &'a [ConstId],
    pub eval: EvalOptions,
}

pub struct Reasoned {
    pub result: GroundingResult,
    pub network: GroundedNetwork,
    pub scores: ScoreTable,
}

/// Grounds from the test queries and their corruptions and propagates.
pub fn reason(task: &Task, scorer: &KgeScorer, params: GrounderParams, tnorm: TNorm, steps: Steps) -> Result<Reasoned, PipelineError> {
    let mut roots: Vec<GroundAtom> = task.test.to_vec();
    roots.extend(corruption_atoms(task.test, task.entities, task.filter, task.eval));
    let result = ground(task.theory, task.train, params, &roots)?;
    let network = build_gmn(&result, task.theory);
    let init = scorer.init(&network);
    let (scores, _) = propagate(&network, &init, tnorm, steps)?;
    Ok(Reasoned { result, network, scores })
}

/// Ranks the test queries with the input layer, optionally refined by reasoning.
pub fn score_and_rank(task: &Task, model: &EmbeddingModel, reasoning: &Reasoning) -> Result<RankingReport, PipelineError> {
    let scorer = KgeScorer::new(model, &task.theory.symbols);
    match reasoning.params {
        None => Ok(evaluate(&|a: &GroundAtom| scorer.score(a), task.test, task.entities, task.filter, task.eval)),
        Some(params) => {
            let r = reason(task, &scorer, params, reasoning.tnorm, reasoning.steps(&params))?;
            let source = |a: &GroundAtom| match r.result.atoms().id_of(a) {
                Some(id) => r.scores.score(id.0),
                None => scorer.score(a),
            };
            Ok(evaluate(&source, task.test, task.entities, task.filter, task.eval))
        }
    }
}

/// Trains a fresh model with `cfg` and evaluates it under every reasoning setting.
pub fn run_seed(task: &Task, cfg: &TrainConfig, settings: &[Reasoning]) -> Result<(Vec<RankingReport>, Vec<f64>), PipelineError> {
    let mut model = EmbeddingModel::new(cfg.kind, cfg.dim, &task.theory.symbols, cfg.seed);
    let losses = train(&mut model, task.train, cfg)?;
    let reports = settings
        .iter()
        .map(|s| score_and_rank(task, &model, s))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((reports, losses))
}
