use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// A non-negative count that may be unbounded.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Limit {
    Finite(usize),
    Infinite,
}

impl Limit {
    pub fn finite(self) -> Option<usize> {
        match self {
            Limit::Finite(n) => Some(n),
            Limit::Infinite => None,
        }
    }
}

impl fmt::Display for Limit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::Finite(n) => write!(f, "{n}"),
            Limit::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Limit {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Limit::Infinite),
            other => other
                .parse::<usize>()
                .map(Limit::Finite)
                .map_err(|_| format!("expected a count or `inf`, got `{other}`")),
        }
    }
}

impl From<usize> for Limit {
    fn from(n: usize) -> Self {
        Limit::Finite(n)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParamsError {
    #[error("grounder depth must be at least 1")]
    ZeroDepth,
}

/// Parameters of a `BC_{w,d}` grounder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrounderParams {
    /// Maximum number of body atoms per ground rule that are not known facts.
    pub width: Limit,
    /// Maximum proof depth; one rule application has depth 1.
    pub depth: Limit,
    /// Accept rule instances whose unknown atoms stay unproven (`BC^u`).
    pub uncertain: bool,
    /// Per-goal cap on free-variable assignments enumerated in uncertain mode.
    pub enumeration_cap: Option<usize>,
}

impl GrounderParams {
    pub fn new(width: impl Into<Limit>, depth: impl Into<Limit>) -> Self {
        GrounderParams {
            width: width.into(),
            depth: depth.into(),
            uncertain: false,
            enumeration_cap: None,
        }
    }

    pub fn uncertain(mut self) -> Self {
        self.uncertain = true;
        self
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.enumeration_cap = Some(cap);
        self
    }

    /// Known Body grounder, `BC_{0,1}`.
    pub fn known_body() -> Self {
        GrounderParams::new(0, 1)
    }

    /// Full grounder, `BC^u_{∞,1}`.
    pub fn full() -> Self {
        GrounderParams::new(Limit::Infinite, 1).uncertain()
    }

    /// Classic backward chaining, `BC_{∞,∞}`.
    pub fn backward_chaining() -> Self {
        GrounderParams::new(Limit::Infinite, Limit::Infinite)
    }

    pub fn validate(&self) -> Result<(), ParamsError> {
        if self.depth == Limit::Finite(0) {
            return Err(ParamsError::ZeroDepth);
        }
        Ok(())
    }

    /// Width with infinity capped at the longest body `max_body`.
    pub fn effective_width(&self, max_body: usize) -> usize {
        match self.width {
            Limit::Finite(w) => w.min(max_body),
            Limit::Infinite => max_body,
        }
    }
}

impl fmt::Display for GrounderParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let u = if self.uncertain { "^u" } else { "" };
        write!(f, "BC{u}_{{{},{}}}", self.width, self.depth)
    }
}
