use super::symbols::{ConstId, VarId};
use smallvec::SmallVec;

/// A finite map from variables to constants, kept sorted by variable id.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Substitution {
    bindings: SmallVec<[(VarId, ConstId); 4]>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(pairs: impl IntoIterator<Item = (VarId, ConstId)>) -> Self {
        let mut s = Self::new();
        for (v, c) in pairs {
            s.bind(v, c);
        }
        s
    }

    pub fn get(&self, var: VarId) -> Option<ConstId> {
        self.bindings
            .binary_search_by_key(&var, |&(v, _)| v)
            .ok()
            .map(|i| self.bindings[i].1)
    }

    /// Binds `var` to `c`. A variable already bound keeps its first value.
    pub fn bind(&mut self, var: VarId, c: ConstId) -> bool {
        match self.bindings.binary_search_by_key(&var, |&(v, _)| v) {
            Ok(_) => false,
            Err(i) => {
                self.bindings.insert(i, (var, c));
                true
            }
        }
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, ConstId)> + '_ {
        self.bindings.iter().copied()
    }

    /// `other ∘ self`: apply `self` first, then `other` to whatever is left unbound.
    pub fn then(&self, other: &Substitution) -> Substitution {
        let mut out = self.clone();
        for (v, c) in other.iter() {
            out.bind(v, c);
        }
        out
    }
}

impl FromIterator<(VarId, ConstId)> for Substitution {
    fn from_iter<T: IntoIterator<Item = (VarId, ConstId)>>(iter: T) -> Self {
        Self::from_pairs(iter)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bind_once() {
        let mut s = Substitution::new();
        assert!(s.bind(VarId(2), ConstId(7)));
        assert!(!s.bind(VarId(2), ConstId(8)));
        assert!(s.bind(VarId(0), ConstId(1)));
        assert_eq!(s.get(VarId(2)), Some(ConstId(7)));
        assert_eq!(s.iter().map(|(v, _)| v.0).collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn composition_associative() {
        let a = Substitution::from_pairs([(VarId(0), ConstId(0))]);
        let b = Substitution::from_pairs([(VarId(0), ConstId(1)), (VarId(1), ConstId(1))]);
        let c = Substitution::from_pairs([(VarId(2), ConstId(2)), (VarId(1), ConstId(3))]);
        assert_eq!(a.then(&b).then(&c), a.then(&b.then(&c)));
    }
}
