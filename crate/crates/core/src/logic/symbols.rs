use indexmap::IndexSet;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Interned constant (entity) symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConstId(pub u32);

/// Interned variable name.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub u32);

/// Interned predicate (relation) symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PredId(pub u32);

impl ConstId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl PredId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("predicate `{name}` used with arity {found}, previously declared with arity {expected}")]
pub struct ArityConflict {
    pub name: String,
    pub expected: usize,
    pub found: usize,
}

/// Symbol tables for predicates, constants and variables.
///
/// The three id spaces are disjoint types; interning the same surface name
/// twice returns the same id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Symbols {
    predicates: IndexSet<String>,
    arities: Vec<usize>,
    constants: IndexSet<String>,
    variables: IndexSet<String>,
}

impl Symbols {
    pub fn new() -> Self {
        Self::default()
    }

    /// Interns a predicate, fixing its arity on first use.
    pub fn intern_predicate(&mut self, name: &str, arity: usize) -> Result<PredId, ArityConflict> {
        if let Some(idx) = self.predicates.get_index_of(name) {
            let expected = self.arities[idx];
            if expected != arity {
                return Err(ArityConflict {
                    name: name.to_owned(),
                    expected,
                    found: arity,
                });
            }
            return Ok(PredId(idx as u32));
        }
        let (idx, _) = self.predicates.insert_full(name.to_owned());
        self.arities.push(arity);
        Ok(PredId(idx as u32))
    }

    pub fn intern_constant(&mut self, name: &str) -> ConstId {
        if let Some(idx) = self.constants.get_index_of(name) {
            return ConstId(idx as u32);
        }
        let (idx, _) = self.constants.insert_full(name.to_owned());
        ConstId(idx as u32)
    }

    pub fn intern_variable(&mut self, name: &str) -> VarId {
        if let Some(idx) = self.variables.get_index_of(name) {
            return VarId(idx as u32);
        }
        let (idx, _) = self.variables.insert_full(name.to_owned());
        VarId(idx as u32)
    }

    pub fn predicate(&self, name: &str) -> Option<PredId> {
        self.predicates.get_index_of(name).map(|i| PredId(i as u32))
    }

    pub fn constant(&self, name: &str) -> Option<ConstId> {
        self.constants.get_index_of(name).map(|i| ConstId(i as u32))
    }

    pub fn variable(&self, name: &str) -> Option<VarId> {
        self.variables.get_index_of(name).map(|i| VarId(i as u32))
    }

    pub fn predicate_name(&self, id: PredId) -> &str {
        &self.predicates[id.index()]
    }

    pub fn constant_name(&self, id: ConstId) -> &str {
        &self.constants[id.index()]
    }

    pub fn variable_name(&self, id: VarId) -> &str {
        &self.variables[id.index()]
    }

    pub fn arity(&self, id: PredId) -> usize {
        self.arities[id.index()]
    }

    pub fn num_predicates(&self) -> usize {
        self.predicates.len()
    }

    pub fn num_constants(&self) -> usize {
        self.constants.len()
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    pub fn predicates(&self) -> impl Iterator<Item = PredId> + '_ {
        (0..self.predicates.len() as u32).map(PredId)
    }

    pub fn constants(&self) -> impl Iterator<Item = ConstId> + '_ {
        (0..self.constants.len() as u32).map(ConstId)
    }
}

/// Writes a constant so that the rule parser reads it back as the same constant.
pub fn write_constant(f: &mut impl fmt::Write, name: &str) -> fmt::Result {
    if is_plain_constant(name) {
        f.write_str(name)
    } else {
        f.write_char('"')?;
        for ch in name.chars() {
            match ch {
                '"' => f.write_str("\\\"")?,
                '\\' => f.write_str("\\\\")?,
                c => f.write_char(c)?,
            }
        }
        f.write_char('"')
    }
}

fn is_plain_constant(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_lowercase() || c.is_ascii_digit() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}
