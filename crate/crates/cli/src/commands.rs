use crate::config::{RunConfig, StepSetting};
use crate::error::CliError;
use crate::pipeline::{network_init, run_seed, KgeScorer, Reasoning, Task};
use bcg_core::facts::{read_triples_file, FactStore};
use bcg_core::gmn::{build_gmn, GroundedNetwork};
use bcg_core::grounder::{ground, ground_with_domain, herbrand_universe_size, GroundingResult, Limit};
use bcg_core::logic::{herbrand_base, parse_theory, ConstId, GroundAtom, Symbols, Theory};
use bcg_core::reasoner::{parse_scores, propagate, ScoreTable, TNorm, NEUTRAL_SCORE};
use bcg_eval::{build_ablation_split, corruption_atoms, evaluate, RankingReport, Side};
use bcg_kge::{checkpoint, train, EmbeddingModel, ModelKind};
use clap::{Args, Parser, Subcommand};
use rustc_hash::FxHashMap;
use serde_json::json;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Instant;

#[derive(Parser, Debug)]
#[command(name = "bcg", version, about = "Backward-chaining grounders, fuzzy propagation and link-prediction experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Ground a theory and write the network with its statistics.
    Ground(Common),
    /// Print dataset and grounding counts.
    Stats(Common),
    /// Train an embedding model on the training facts.
    TrainKge(Common),
    /// Propagate scores over a grounded network.
    Propagate(PropagateArgs),
    /// Rank the test triples against their corruptions.
    Eval(EvalArgs),
    /// Build a split whose queries need an exact number of rule applications.
    MakeAblation(AblationArgs),
    /// Train, ground, propagate and evaluate for every seed, then average.
    Experiment(Common),
}

#[derive(Args, Debug, Default, Clone)]
pub struct Common {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub rules: Option<PathBuf>,
    /// Directory with train/valid/test triple files.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, alias = "facts")]
    pub train: Option<PathBuf>,
    #[arg(long)]
    pub valid: Option<PathBuf>,
    #[arg(long)]
    pub test: Option<PathBuf>,
    /// `test`, `hb` or a triple file.
    #[arg(long)]
    pub roots: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub width: Option<Limit>,
    #[arg(long)]
    pub depth: Option<Limit>,
    #[arg(long)]
    pub uncertain: bool,
    /// Evaluate the input layer alone.
    #[arg(long)]
    pub no_reasoning: bool,
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long)]
    pub tnorm: Option<TNorm>,
    /// `depth`, `fixpoint` or a step count.
    #[arg(long)]
    pub steps: Option<StepSetting>,
    #[arg(long)]
    pub model: Option<ModelKind>,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub negatives: Option<usize>,
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub seeds: Option<usize>,
    /// Worker threads for grounding, propagation and evaluation.
    #[arg(long)]
    pub jobs: Option<usize>,
    #[arg(long, value_parser = parse_side)]
    pub side: Option<Side>,
    /// Corruptions sampled per side instead of every entity.
    #[arg(long)]
    pub corruptions: Option<usize>,
    #[arg(long)]
    pub corruption_seed: Option<u64>,
    /// Keep corruptions that are known facts.
    #[arg(long)]
    pub raw: bool,
    /// Also write per-query ranks.
    #[arg(long)]
    pub ranks: bool,
}

#[derive(Args, Debug, Clone)]
pub struct PropagateArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub gmn: PathBuf,
    /// Initial scores from an embedding checkpoint.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
    /// Initial scores from an `atom<TAB>score` file.
    #[arg(long)]
    pub init: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: Common,
    /// Propagated `atom<TAB>score` table.
    #[arg(long)]
    pub scores: Option<PathBuf>,
    /// Input-layer scores for atoms missing from the table.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct AblationArgs {
    #[command(flatten)]
    pub common: Common,
    /// Id of a rule shaped `t(X,Z) :- l(X,Y), t(Y,Z)`, in file order.
    #[arg(long, default_value_t = 0)]
    pub rule: usize,
    #[arg(long)]
    pub hops: usize,
    #[arg(long, default_value_t = 20)]
    pub queries: usize,
    /// Candidate queries; defaults to the test and validation triples.
    #[arg(long)]
    pub candidates: Option<PathBuf>,
}

fn parse_side(s: &str) -> Result<Side, String> {
    match s {
        "head" => Ok(Side::Head),
        "tail" => Ok(Side::Tail),
        "both" => Ok(Side::Both),
        other => Err(format!("expected head, tail or both, got `{other}`")),
    }
}

/// The effective configuration and the verbatim file it came from.
pub struct Resolved {
    pub config: RunConfig,
    pub source: Option<String>,
}

impl Common {
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let (mut c, source) = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                let c = RunConfig::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                (c, Some(text))
            }
            None => (RunConfig::default(), None),
        };
        let p = &mut c.paths;
        set(&mut p.rules, self.rules.clone());
        set(&mut p.data, self.data.clone());
        set(&mut p.train, self.train.clone());
        set(&mut p.valid, self.valid.clone());
        set(&mut p.test, self.test.clone());
        if let Some(r) = &self.roots {
            p.roots = r.clone();
        }
        if let Some(o) = &self.out {
            p.output = o.clone();
        }
        let g = &mut c.grounder;
        over(&mut g.width, self.width);
        over(&mut g.depth, self.depth);
        g.uncertain |= self.uncertain;
        g.enabled &= !self.no_reasoning;
        set(&mut g.cap, self.cap);
        over(&mut g.budget, self.budget);
        over(&mut c.reasoner.tnorm, self.tnorm);
        over(&mut c.reasoner.steps, self.steps);
        let k = &mut c.kge;
        over(&mut k.kind, self.model);
        over(&mut k.dim, self.dim);
        over(&mut k.epochs, self.epochs);
        over(&mut k.lr, self.lr);
        over(&mut k.negatives, self.negatives);
        over(&mut k.batch_size, self.batch_size);
        over(&mut k.l2, self.l2);
        over(&mut k.seed, self.seed);
        over(&mut c.seeds, self.seeds);
        set(&mut c.jobs, self.jobs);
        let e = &mut c.eval;
        over(&mut e.side, self.side);
        set(&mut e.corruptions, self.corruptions);
        over(&mut e.corruption_seed, self.corruption_seed);
        e.filtered &= !self.raw;
        e.ranks |= self.ranks;
        c.check_paths().map_err(CliError::Config)?;
        Ok(Resolved { config: c, source })
    }
}

fn set<T>(slot: &mut Option<T>, v: Option<T>) {
    if v.is_some() {
        *slot = v;
    }
}

fn over<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

/// Theory and facts, interned in a fixed order: rules, train, valid, test.
pub struct Inputs {
    pub theory: Theory,
    pub train: FactStore,
    pub valid: Vec<GroundAtom>,
    pub test: Vec<GroundAtom>,
}

impl Inputs {
    pub fn load(c: &RunConfig) -> Result<Inputs, CliError> {
        let mut theory = match c.rules_path() {
            Some(p) => parse_theory(&std::fs::read_to_string(&p).map_err(CliError::io(&p))?)?,
            None => Theory::new(Symbols::new()),
        };
        let train_path = c
            .train_path()
            .ok_or_else(|| CliError::Config("no training facts; set paths.data or paths.train".into()))?;
        let train = FactStore::from_facts(read_triples_file(&train_path, &mut theory.symbols)?);
        let mut read = |p: Option<PathBuf>| -> Result<Vec<GroundAtom>, CliError> {
            Ok(match p {
                Some(p) => read_triples_file(&p, &mut theory.symbols)?,
                None => Vec::new(),
            })
        };
        let valid = read(c.valid_path())?;
        let test = read(c.test_path())?;
        Ok(Inputs { theory, train, valid, test })
    }

    pub fn filter(&self) -> FactStore {
        FactStore::from_facts(self.train.iter().chain(&self.valid).chain(&self.test).cloned())
    }

    pub fn entities(&self) -> Vec<ConstId> {
        let mut out = self.train.entities();
        out.extend(self.valid.iter().chain(&self.test).flat_map(|f| f.args.iter().copied()));
        out.sort_unstable();
        out.dedup();
        out
    }

    fn require_test(&self) -> Result<(), CliError> {
        if self.test.is_empty() {
            return Err(CliError::Config("no test triples; set paths.data or paths.test".into()));
        }
        Ok(())
    }
}

struct Output {
    dir: PathBuf,
}

impl Output {
    fn new(resolved: &Resolved) -> Result<Output, CliError> {
        let dir = resolved.config.paths.output.clone();
        std::fs::create_dir_all(&dir).map_err(CliError::io(&dir))?;
        let out = Output { dir };
        if let Some(src) = &resolved.source {
            out.write("config.toml", src)?;
        }
        out.write("resolved.toml", &resolved.config.to_toml())?;
        Ok(out)
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    fn write(&self, name: &str, contents: &str) -> Result<(), CliError> {
        let p = self.path(name);
        std::fs::write(&p, contents).map_err(CliError::io(p))
    }

    fn json(&self, name: &str, value: &serde_json::Value) -> Result<(), CliError> {
        self.write(name, &(serde_json::to_string_pretty(value).expect("json") + "\n"))
    }
}

fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, CliError> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(CliError::Config("jobs must be at least 1".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| CliError::Config(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Ground(c) => grounding(&c.resolve()?, true),
        Command::Stats(c) => grounding(&c.resolve()?, false),
        Command::TrainKge(c) => train_kge(&c.resolve()?),
        Command::Propagate(a) => propagate_cmd(&a),
        Command::Eval(a) => eval_cmd(&a),
        Command::MakeAblation(a) => make_ablation(&a),
        Command::Experiment(c) => experiment(&c.resolve()?),
    }
}

fn limit_text(l: Limit) -> String {
    l.to_string()
}

/// Runs the configured grounder from the configured roots.
fn ground_roots(c: &RunConfig, inputs: &Inputs) -> Result<(GroundingResult, Option<u128>), CliError> {
    let params = c.grounder.params();
    let theory = &inputs.theory;
    match c.paths.roots.as_str() {
        "hb" => {
            let domain: Vec<ConstId> = theory.symbols.constants().collect();
            let size = herbrand_universe_size(theory, domain.len() as u64).unwrap_or(u128::MAX);
            if size > c.grounder.budget as u128 {
                return Err(CliError::Budget(format!(
                    "the Herbrand universe over {} constants has {size} ground rules, over the budget of {}",
                    domain.len(),
                    c.grounder.budget
                )));
            }
            let heads: BTreeSet<_> = theory.clauses().iter().map(|cl| cl.head.pred).collect();
            let roots: Vec<GroundAtom> = herbrand_base(&theory.symbols, heads, &domain).collect();
            Ok((ground_with_domain(theory, &inputs.train, params, &roots, &domain)?, Some(size)))
        }
        "test" => {
            inputs.require_test()?;
            let mut roots = inputs.test.clone();
            roots.extend(corruption_atoms(&inputs.test, &inputs.entities(), &inputs.filter(), c.eval.options()));
            Ok((ground(theory, &inputs.train, params, &roots)?, None))
        }
        file => {
            let mut symbols = theory.symbols.clone();
            let roots = read_triples_file(Path::new(file), &mut symbols)?;
            if symbols.num_predicates() != theory.symbols.num_predicates() || symbols.num_constants() != theory.symbols.num_constants() {
                let mut t = Theory::new(symbols);
                for cl in theory.clauses() {
                    t.push(cl.head.clone(), cl.body.clone());
                }
                return Ok((ground(&t, &inputs.train, params, &roots)?, None));
            }
            Ok((ground(theory, &inputs.train, params, &roots)?, None))
        }
    }
}

fn grounding(r: &Resolved, write_network: bool) -> Result<(), CliError> {
    let c = &r.config;
    let inputs = Inputs::load(c)?;
    let out = Output::new(r)?;
    let start = Instant::now();
    let (result, hu) = with_jobs(c.jobs, || ground_roots(c, &inputs))??;
    let net = build_gmn(&result, &inputs.theory);
    let elapsed_ms = start.elapsed().as_millis();
    let summary = json!({
        "facts": inputs.train.stats(),
        "grounder": {
            "width": limit_text(c.grounder.width),
            "depth": limit_text(c.grounder.depth),
            "uncertain": c.grounder.uncertain,
            "cap": c.grounder.cap,
        },
        "herbrand_universe": hu.map(|s| s.to_string()),
        "grounding": result.stats,
        "truncation": result.truncation,
        "network": net.stats(),
    });
    out.json("stats.json", &summary)?;
    if write_network {
        let p = out.path("network.gmn");
        let file = std::fs::File::create(&p).map_err(CliError::io(&p))?;
        let mut w = std::io::BufWriter::new(file);
        net.export(&mut w).and_then(|_| std::io::Write::flush(&mut w)).map_err(CliError::io(&p))?;
    }
    let mut printed = summary;
    printed["elapsed_ms"] = json!(elapsed_ms);
    println!("{}", serde_json::to_string_pretty(&printed).expect("json"));
    if let Some(t) = &result.truncation {
        eprintln!("warning: {} goals hit the enumeration cap of {}", t.goals, t.cap);
    }
    Ok(())
}

fn train_kge(r: &Resolved) -> Result<(), CliError> {
    let c = &r.config;
    let inputs = Inputs::load(c)?;
    let out = Output::new(r)?;
    let mut model = EmbeddingModel::new(c.kge.kind, c.kge.dim, &inputs.theory.symbols, c.kge.seed);
    let losses = train(&mut model, &inputs.train, &c.kge)?;
    let p = out.path("model.kge");
    let mut buf = Vec::new();
    checkpoint::save(&model, &mut buf).map_err(CliError::io(&p))?;
    std::fs::write(&p, buf).map_err(CliError::io(&p))?;
    out.write("losses.tsv", &loss_trace(&losses))?;
    println!("trained {} epochs, final loss {:.6}", losses.len(), losses.last().copied().unwrap_or(f64::NAN));
    Ok(())
}

fn loss_trace(losses: &[f64]) -> String {
    let mut s = String::from("epoch\tloss\n");
    for (i, l) in losses.iter().enumerate() {
        let _ = writeln!(s, "{}\t{l}", i + 1);
    }
    s
}

fn load_checkpoint(p: &Path) -> Result<EmbeddingModel, CliError> {
    let f = std::fs::File::open(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
    Ok(checkpoint::load(BufReader::new(f))?)
}

fn load_score_file(p: &Path) -> Result<FxHashMap<String, f64>, CliError> {
    let text = std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
    Ok(parse_scores(&text)?.into_iter().collect())
}

fn propagate_cmd(a: &PropagateArgs) -> Result<(), CliError> {
    let r = a.common.resolve()?;
    let c = &r.config;
    let f = std::fs::File::open(&a.gmn).map_err(|e| CliError::Config(format!("{}: {e}", a.gmn.display())))?;
    let net = GroundedNetwork::import(BufReader::new(f))?;
    let out = Output::new(&r)?;
    let init = match (&a.checkpoint, &a.init) {
        (Some(p), _) => {
            let model = load_checkpoint(p)?;
            network_init(&model, &net)
        }
        (None, Some(p)) => {
            let given = load_score_file(p)?;
            ScoreTable::init(&net, |n| given.get(&net.node_name(n)).copied().unwrap_or(NEUTRAL_SCORE))
        }
        (None, None) => ScoreTable::init(&net, |_| NEUTRAL_SCORE),
    };
    let steps = c.reasoner.steps.resolve(c.grounder.depth);
    let (scores, info) = with_jobs(c.jobs, || propagate(&net, &init, c.reasoner.tnorm, steps))??;
    out.write("scores.tsv", &scores.to_text(&net))?;
    out.json("propagation.json", &json!({ "tnorm": c.reasoner.tnorm, "steps": c.reasoner.steps.to_string(), "run": info }))?;
    println!("propagated {} nodes in {} steps (converged: {})", net.nodes.len(), info.steps_run, info.converged);
    Ok(())
}

fn report_json(rep: &RankingReport) -> serde_json::Value {
    json!({
        "mrr": rep.mrr,
        "hits1": rep.hits1,
        "hits3": rep.hits3,
        "hits10": rep.hits10,
        "runs": rep.runs,
        "queries": rep.ranks.len(),
        "excluded": rep.excluded,
    })
}

fn eval_cmd(a: &EvalArgs) -> Result<(), CliError> {
    let r = a.common.resolve()?;
    let c = &r.config;
    if a.scores.is_none() && a.checkpoint.is_none() {
        return Err(CliError::Config("eval needs --scores, --checkpoint or both".into()));
    }
    let inputs = Inputs::load(c)?;
    inputs.require_test()?;
    let out = Output::new(&r)?;
    let table = a.scores.as_deref().map(load_score_file).transpose()?.unwrap_or_default();
    let model = a.checkpoint.as_deref().map(load_checkpoint).transpose()?;
    let scorer = model.as_ref().map(|m| KgeScorer::new(m, &inputs.theory.symbols));
    let symbols = &inputs.theory.symbols;
    let source = |atom: &GroundAtom| {
        if !table.is_empty() {
            if let Some(v) = table.get(&atom.display(symbols).to_string()) {
                return *v;
            }
        }
        scorer.as_ref().map_or(NEUTRAL_SCORE, |s| s.score(atom))
    };
    let rep = with_jobs(c.jobs, || evaluate(&source, &inputs.test, &inputs.entities(), &inputs.filter(), c.eval.options()))?;
    out.json("report.json", &report_json(&rep))?;
    out.write("report.txt", &rep.to_string())?;
    if c.eval.ranks {
        out.write("ranks.tsv", &ranks_text(&[("eval".into(), rep.clone())]))?;
    }
    print!("{rep}");
    Ok(())
}

fn ranks_text(reports: &[(String, RankingReport)]) -> String {
    let mut s = String::from("setting\tquery\trank\n");
    for (name, rep) in reports {
        for (i, r) in rep.ranks.iter().enumerate() {
            let _ = writeln!(s, "{name}\t{i}\t{r}");
        }
    }
    s
}

fn triples_text(facts: &[GroundAtom], symbols: &Symbols) -> String {
    let mut s = String::new();
    for f in facts {
        let _ = writeln!(
            s,
            "{}\t{}\t{}",
            symbols.constant_name(f.args[0]),
            symbols.predicate_name(f.pred),
            symbols.constant_name(f.args[1])
        );
    }
    s
}

fn make_ablation(a: &AblationArgs) -> Result<(), CliError> {
    let r = a.common.resolve()?;
    let c = &r.config;
    let mut inputs = Inputs::load(c)?;
    if inputs.theory.is_empty() {
        return Err(CliError::Config("make-ablation needs rules".into()));
    }
    if a.rule >= inputs.theory.len() {
        return Err(CliError::Config(format!("rule {} does not exist; the theory has {} rules", a.rule, inputs.theory.len())));
    }
    let candidates = match &a.candidates {
        Some(p) => {
            if !p.exists() {
                return Err(CliError::Config(format!("{} does not exist", p.display())));
            }
            read_triples_file(p, &mut inputs.theory.symbols)?
        }
        None => inputs.test.iter().chain(&inputs.valid).cloned().collect(),
    };
    let all = inputs.filter();
    let split = build_ablation_split(&all, &inputs.theory, a.rule, a.hops, &candidates, a.queries, c.kge.seed)?;
    let out = Output::new(&r)?;
    let symbols = &inputs.theory.symbols;
    let train: Vec<GroundAtom> = split.train.iter().cloned().collect();
    out.write("train.tsv", &triples_text(&train, symbols))?;
    out.write("valid.tsv", "")?;
    out.write("test.tsv", &triples_text(&split.queries, symbols))?;
    out.write("removed.tsv", &triples_text(&split.removed, symbols))?;
    let mut rules = String::new();
    for cl in inputs.theory.clauses() {
        let _ = writeln!(rules, "{}", cl.display(symbols));
    }
    out.write("rules.pl", &rules)?;
    out.json(
        "split.json",
        &json!({
            "rule": a.rule,
            "hops": a.hops,
            "queries": split.queries.len(),
            "train": train.len(),
            "removed": split.removed.len(),
            "seed": c.kge.seed,
        }),
    )?;
    println!("{} queries need exactly {} steps; removed {} facts", split.queries.len(), a.hops, split.removed.len());
    Ok(())
}

fn setting_name(reasoning: &Reasoning) -> String {
    match reasoning.params {
        None => "kge".into(),
        Some(p) => format!(
            "BC{}_{},{} {}",
            if p.uncertain { "u" } else { "" },
            p.width,
            p.depth,
            reasoning.tnorm
        ),
    }
}

fn experiment(r: &Resolved) -> Result<(), CliError> {
    let c = &r.config;
    let inputs = Inputs::load(c)?;
    inputs.require_test()?;
    let out = Output::new(r)?;
    let filter = inputs.filter();
    let entities = inputs.entities();
    let task = Task {
        theory: &inputs.theory,
        train: &inputs.train,
        test: &inputs.test,
        filter: &filter,
        entities: &entities,
        eval: c.eval.options(),
    };
    let mut settings = vec![Reasoning::baseline()];
    if c.grounder.enabled && !inputs.theory.is_empty() {
        let params = c.grounder.params();
        settings.push(Reasoning {
            params: Some(params),
            tnorm: c.reasoner.tnorm,
            steps: Some(c.reasoner.steps.resolve(params.depth)),
        });
    }
    let mut per_seed: Vec<Vec<RankingReport>> = vec![Vec::new(); settings.len()];
    for i in 0..c.seeds() {
        let mut cfg = c.kge;
        cfg.seed = c.kge.seed + i as u64;
        let (reports, losses) = with_jobs(c.jobs, || run_seed(&task, &cfg, &settings))??;
        out.write(&format!("losses_seed{}.tsv", cfg.seed), &loss_trace(&losses))?;
        for (slot, rep) in per_seed.iter_mut().zip(reports) {
            slot.push(rep);
        }
    }
    let mut rows = Vec::new();
    let mut named = Vec::new();
    let mut text = String::new();
    for (s, reps) in settings.iter().zip(&per_seed) {
        let mean = RankingReport::average(reps)?;
        let name = setting_name(s);
        rows.push(json!({
            "setting": name,
            "mean": report_json(&mean),
            "seeds": reps.iter().enumerate().map(|(i, r)| {
                let mut v = report_json(r);
                v["seed"] = json!(c.kge.seed + i as u64);
                v
            }).collect::<Vec<_>>(),
        }));
        let _ = writeln!(text, "{name}");
        text.push_str(&mean.to_string());
        named.push((name, mean));
    }
    out.json("report.json", &json!({ "settings": rows }))?;
    out.write("report.txt", &text)?;
    if c.eval.ranks {
        out.write("ranks.tsv", &ranks_text(&named))?;
    }
    print!("{text}");
    Ok(())
}
