//! Run configuration: one TOML document, overridable from the command line.

use bcg_core::grounder::{GrounderParams, Limit};
use bcg_core::reasoner::{Steps, TNorm};
use bcg_eval::{Corruptions, EvalOptions, Side};
use bcg_kge::TrainConfig;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seeds: usize,
    pub jobs: Option<usize>,
    pub paths: Paths,
    pub grounder: GrounderConfig,
    pub reasoner: ReasonerConfig,
    pub kge: TrainConfig,
    pub eval: EvalConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub rules: Option<PathBuf>,
    /// Directory holding `train`, `valid` and `test` triple files.
    pub data: Option<PathBuf>,
    pub train: Option<PathBuf>,
    pub valid: Option<PathBuf>,
    pub test: Option<PathBuf>,
    /// `test` (queries and their corruptions), `hb` (the Herbrand base) or a triple file.
    pub roots: String,
    pub output: PathBuf,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            rules: None,
            data: None,
            train: None,
            valid: None,
            test: None,
            roots: "test".into(),
            output: PathBuf::from("out"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GrounderConfig {
    /// Set to false to evaluate the input layer alone.
    pub enabled: bool,
    #[serde(serialize_with = "ser_limit", deserialize_with = "de_limit")]
    pub width: Limit,
    #[serde(serialize_with = "ser_limit", deserialize_with = "de_limit")]
    pub depth: Limit,
    pub uncertain: bool,
    pub cap: Option<usize>,
    /// Largest Herbrand universe, in ground rules, that `hb` roots may need.
    pub budget: u64,
}

impl Default for GrounderConfig {
    fn default() -> Self {
        GrounderConfig {
            enabled: true,
            width: Limit::Finite(1),
            depth: Limit::Finite(2),
            uncertain: false,
            cap: None,
            budget: 50_000_000,
        }
    }
}

impl GrounderConfig {
    pub fn params(&self) -> GrounderParams {
        GrounderParams {
            width: self.width,
            depth: self.depth,
            uncertain: self.uncertain,
            enumeration_cap: self.cap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepSetting {
    /// As many steps as the grounder depth.
    Depth,
    Fixpoint,
    Fixed(usize),
}

impl StepSetting {
    pub fn resolve(self, depth: Limit) -> Steps {
        match self {
            StepSetting::Depth => match depth {
                Limit::Finite(d) => Steps::Fixed(d),
                Limit::Infinite => Steps::Fixpoint,
            },
            StepSetting::Fixpoint => Steps::Fixpoint,
            StepSetting::Fixed(n) => Steps::Fixed(n),
        }
    }
}

impl std::str::FromStr for StepSetting {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "depth" => Ok(StepSetting::Depth),
            "fixpoint" => Ok(StepSetting::Fixpoint),
            n => n
                .parse()
                .map(StepSetting::Fixed)
                .map_err(|_| format!("expected `depth`, `fixpoint` or a count, got `{n}`")),
        }
    }
}

impl std::fmt::Display for StepSetting {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StepSetting::Depth => f.write_str("depth"),
            StepSetting::Fixpoint => f.write_str("fixpoint"),
            StepSetting::Fixed(n) => write!(f, "{n}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReasonerConfig {
    pub tnorm: TNorm,
    #[serde(serialize_with = "ser_display", deserialize_with = "de_steps")]
    pub steps: StepSetting,
}

impl Default for ReasonerConfig {
    fn default() -> Self {
        ReasonerConfig {
            tnorm: TNorm::Product,
            steps: StepSetting::Depth,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    pub side: Side,
    /// Corruptions per side; absent means every entity.
    pub corruptions: Option<usize>,
    pub corruption_seed: u64,
    pub filtered: bool,
    /// Also write per-query ranks.
    pub ranks: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            side: Side::Both,
            corruptions: None,
            corruption_seed: 0,
            filtered: true,
            ranks: false,
        }
    }
}

impl EvalConfig {
    pub fn options(&self) -> EvalOptions {
        EvalOptions {
            side: self.side,
            corruptions: match self.corruptions {
                None => Corruptions::All,
                Some(n) => Corruptions::Sampled {
                    n,
                    seed: self.corruption_seed,
                },
            },
            filtered: self.filtered,
        }
    }
}

fn ser_limit<S: Serializer>(l: &Limit, s: S) -> Result<S::Ok, S::Error> {
    match l {
        Limit::Finite(n) => s.serialize_u64(*n as u64),
        Limit::Infinite => s.serialize_str("inf"),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum CountOrWord {
    Count(usize),
    Word(String),
}

impl CountOrWord {
    fn text(self) -> String {
        match self {
            CountOrWord::Count(n) => n.to_string(),
            CountOrWord::Word(w) => w,
        }
    }
}

fn de_limit<'de, D: Deserializer<'de>>(d: D) -> Result<Limit, D::Error> {
    CountOrWord::deserialize(d)?.text().parse().map_err(serde::de::Error::custom)
}

fn ser_display<S: Serializer>(v: &StepSetting, s: S) -> Result<S::Ok, S::Error> {
    match v {
        StepSetting::Fixed(n) => s.serialize_u64(*n as u64),
        other => s.serialize_str(&other.to_string()),
    }
}

fn de_steps<'de, D: Deserializer<'de>>(d: D) -> Result<StepSetting, D::Error> {
    CountOrWord::deserialize(d)?.text().parse().map_err(serde::de::Error::custom)
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<RunConfig, String> {
        toml::from_str(text).map_err(|e| e.to_string())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn seeds(&self) -> usize {
        self.seeds.max(1)
    }

    fn data_file(&self, explicit: &Option<PathBuf>, stem: &str) -> Option<PathBuf> {
        if let Some(p) = explicit {
            return Some(p.clone());
        }
        let dir = self.paths.data.as_ref()?;
        ["tsv", "txt"].iter().map(|ext| dir.join(format!("{stem}.{ext}"))).find(|p| p.exists())
    }

    pub fn train_path(&self) -> Option<PathBuf> {
        self.data_file(&self.paths.train, "train")
    }

    pub fn valid_path(&self) -> Option<PathBuf> {
        self.data_file(&self.paths.valid, "valid")
    }

    pub fn test_path(&self) -> Option<PathBuf> {
        self.data_file(&self.paths.test, "test")
    }

    pub fn rules_path(&self) -> Option<PathBuf> {
        self.paths
            .rules
            .clone()
            .or_else(|| self.paths.data.as_ref().map(|d| d.join("rules.pl")).filter(|p| p.exists()))
    }

    /// Every referenced input path must exist.
    pub fn check_paths(&self) -> Result<(), String> {
        let p = &self.paths;
        let listed = [&p.rules, &p.data, &p.train, &p.valid, &p.test];
        for path in listed.into_iter().flatten() {
            if !path.exists() {
                return Err(format!("{} does not exist", path.display()));
            }
        }
        if !matches!(p.roots.as_str(), "test" | "hb") && !Path::new(&p.roots).exists() {
            return Err(format!("roots file {} does not exist", p.roots));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_limits_and_round_trips() {
        let text = r#"
seeds = 5
[paths]
roots = "hb"
[grounder]
width = "inf"
depth = 3
[reasoner]
tnorm = "goedel"
steps = "fixpoint"
[kge]
dim = 20
[eval]
corruptions = 1000
"#;
        let c = RunConfig::parse(text).unwrap();
        assert_eq!(c.grounder.width, Limit::Infinite);
        assert_eq!(c.grounder.depth, Limit::Finite(3));
        assert_eq!(c.reasoner.steps, StepSetting::Fixpoint);
        assert_eq!(c.kge.dim, 20);
        assert_eq!(c.kge.epochs, TrainConfig::default().epochs);
        assert_eq!(RunConfig::parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_limits() {
        assert!(RunConfig::parse("[grounder]\nwidht = 1").is_err());
        assert!(RunConfig::parse("[grounder]\nwidth = \"lots\"").is_err());
        assert!(RunConfig::parse("[reasoner]\nsteps = \"forever\"").is_err());
    }

    #[test]
    fn depth_steps_follow_the_grounder() {
        assert_eq!(StepSetting::Depth.resolve(Limit::Finite(3)), Steps::Fixed(3));
        assert_eq!(StepSetting::Depth.resolve(Limit::Infinite), Steps::Fixpoint);
    }
}
