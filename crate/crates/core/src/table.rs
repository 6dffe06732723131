use crate::logic::GroundAtom;
use indexmap::IndexSet;
use rustc_hash::FxBuildHasher;
use serde::{Deserialize, Serialize};

/// Dense id of an interned ground atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct AtomId(pub u32);

impl AtomId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Interner for ground atoms; ids follow insertion order.
#[derive(Debug, Clone, Default)]
pub struct AtomTable {
    atoms: IndexSet<GroundAtom, FxBuildHasher>,
}

impl AtomTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, atom: GroundAtom) -> AtomId {
        if let Some(i) = self.atoms.get_index_of(&atom) {
            return AtomId(i as u32);
        }
        let (i, _) = self.atoms.insert_full(atom);
        AtomId(i as u32)
    }

    /// Interns and reports whether the atom was new.
    pub fn insert(&mut self, atom: GroundAtom) -> (AtomId, bool) {
        let (i, fresh) = self.atoms.insert_full(atom);
        (AtomId(i as u32), fresh)
    }

    pub fn get(&self, id: AtomId) -> &GroundAtom {
        &self.atoms[id.index()]
    }

    pub fn id_of(&self, atom: &GroundAtom) -> Option<AtomId> {
        self.atoms.get_index_of(atom).map(|i| AtomId(i as u32))
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (AtomId, &GroundAtom)> + '_ {
        self.atoms
            .iter()
            .enumerate()
            .map(|(i, a)| (AtomId(i as u32), a))
    }
}
