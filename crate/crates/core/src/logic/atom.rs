use super::subst::Substitution;
use super::symbols::{write_constant, ConstId, PredId, Symbols, VarId};
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(ConstId),
    Var(VarId),
}

impl Term {
    pub fn as_const(self) -> Option<ConstId> {
        match self {
            Term::Const(c) => Some(c),
            Term::Var(_) => None,
        }
    }

    pub fn as_var(self) -> Option<VarId> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

pub type Args<T> = SmallVec<[T; 3]>;

/// A possibly non-ground atom `pred(t1, ..., tk)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub pred: PredId,
    pub args: Args<Term>,
}

/// A variable-free atom.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroundAtom {
    pub pred: PredId,
    pub args: Args<ConstId>,
}

impl Atom {
    pub fn new(pred: PredId, args: impl IntoIterator<Item = Term>) -> Self {
        Atom {
            pred,
            args: args.into_iter().collect(),
        }
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| matches!(t, Term::Const(_)))
    }

    pub fn variables(&self) -> impl Iterator<Item = VarId> + '_ {
        self.args.iter().filter_map(|t| t.as_var())
    }

    pub fn to_ground(&self) -> Option<GroundAtom> {
        let args = self
            .args
            .iter()
            .map(|t| t.as_const())
            .collect::<Option<Args<ConstId>>>()?;
        Some(GroundAtom {
            pred: self.pred,
            args,
        })
    }

    /// Replaces every variable bound in `theta` by its constant.
    pub fn apply(&self, theta: &Substitution) -> Atom {
        Atom {
            pred: self.pred,
            args: self
                .args
                .iter()
                .map(|&t| match t {
                    Term::Var(v) => theta.get(v).map_or(t, Term::Const),
                    c => c,
                })
                .collect(),
        }
    }

    /// Grounds the atom if `theta` binds all of its variables.
    pub fn ground_with(&self, theta: &Substitution) -> Option<GroundAtom> {
        let args = self
            .args
            .iter()
            .map(|&t| match t {
                Term::Const(c) => Some(c),
                Term::Var(v) => theta.get(v),
            })
            .collect::<Option<Args<ConstId>>>()?;
        Some(GroundAtom {
            pred: self.pred,
            args,
        })
    }

    pub fn display<'a>(&'a self, symbols: &'a Symbols) -> impl fmt::Display + 'a {
        DisplayAtom { atom: self, symbols }
    }
}

impl GroundAtom {
    pub fn new(pred: PredId, args: impl IntoIterator<Item = ConstId>) -> Self {
        GroundAtom {
            pred,
            args: args.into_iter().collect(),
        }
    }

    pub fn to_atom(&self) -> Atom {
        Atom {
            pred: self.pred,
            args: self.args.iter().map(|&c| Term::Const(c)).collect(),
        }
    }

    /// Canonical text form, e.g. `locatedIn(italy,europe)`.
    pub fn display<'a>(&'a self, symbols: &'a Symbols) -> impl fmt::Display + 'a {
        DisplayGround { atom: self, symbols }
    }
}

impl From<GroundAtom> for Atom {
    fn from(g: GroundAtom) -> Self {
        g.to_atom()
    }
}

/// Returns the most general matcher `theta` with `theta(head) == goal`.
pub fn match_head(goal: &GroundAtom, head: &Atom) -> Option<Substitution> {
    if goal.pred != head.pred || goal.args.len() != head.args.len() {
        return None;
    }
    let mut theta = Substitution::new();
    for (&c, &t) in goal.args.iter().zip(head.args.iter()) {
        match t {
            Term::Const(k) if k != c => return None,
            Term::Const(_) => {}
            Term::Var(v) => match theta.get(v) {
                Some(bound) if bound != c => return None,
                Some(_) => {}
                None => {
                    theta.bind(v, c);
                }
            },
        }
    }
    Some(theta)
}

struct DisplayAtom<'a> {
    atom: &'a Atom,
    symbols: &'a Symbols,
}

impl fmt::Display for DisplayAtom<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbols.predicate_name(self.atom.pred))?;
        f.write_str("(")?;
        for (i, t) in self.atom.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            match *t {
                Term::Const(c) => write_constant(f, self.symbols.constant_name(c))?,
                Term::Var(v) => f.write_str(self.symbols.variable_name(v))?,
            }
        }
        f.write_str(")")
    }
}

struct DisplayGround<'a> {
    atom: &'a GroundAtom,
    symbols: &'a Symbols,
}

impl fmt::Display for DisplayGround<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbols.predicate_name(self.atom.pred))?;
        f.write_str("(")?;
        for (i, &c) in self.atom.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write_constant(f, self.symbols.constant_name(c))?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (Symbols, PredId, PredId) {
        let mut s = Symbols::new();
        let loc = s.intern_predicate("locIn", 2).unwrap();
        let nb = s.intern_predicate("neighOf", 2).unwrap();
        (s, loc, nb)
    }

    #[test]
    fn apply_full_binding() {
        let (mut s, loc, _) = setup();
        let (x, y) = (s.intern_variable("X"), s.intern_variable("Y"));
        let (it, eu) = (s.intern_constant("italy"), s.intern_constant("europe"));
        let atom = Atom::new(loc, [Term::Var(x), Term::Var(y)]);
        let theta = Substitution::from_pairs([(x, it), (y, eu)]);
        let out = atom.apply(&theta);
        assert!(out.is_ground());
        assert_eq!(out.display(&s).to_string(), "locIn(italy,europe)");
    }

    #[test]
    fn apply_identity_on_ground() {
        let (mut s, loc, _) = setup();
        let x = s.intern_variable("X");
        let (a, b) = (s.intern_constant("a"), s.intern_constant("b"));
        let atom = Atom::new(loc, [Term::Const(a), Term::Const(b)]);
        let theta = Substitution::from_pairs([(x, b)]);
        assert_eq!(atom.apply(&theta), atom);
    }

    #[test]
    fn apply_partial_binding() {
        let (mut s, loc, _) = setup();
        let (x, y) = (s.intern_variable("X"), s.intern_variable("Y"));
        let a = s.intern_constant("a");
        let atom = Atom::new(loc, [Term::Var(x), Term::Var(y)]);
        let out = atom.apply(&Substitution::from_pairs([(x, a)]));
        assert!(!out.is_ground());
        assert_eq!(out.args[0], Term::Const(a));
        assert_eq!(out.args[1], Term::Var(y));
    }

    #[test]
    fn match_head_cases() {
        let (mut s, loc, nb) = setup();
        let (x, z) = (s.intern_variable("X"), s.intern_variable("Z"));
        let (it, eu, fr) = (
            s.intern_constant("it"),
            s.intern_constant("eu"),
            s.intern_constant("fr"),
        );
        let goal = GroundAtom::new(loc, [it, eu]);
        let head = Atom::new(loc, [Term::Var(x), Term::Var(z)]);
        let theta = match_head(&goal, &head).unwrap();
        assert_eq!(theta, Substitution::from_pairs([(x, it), (z, eu)]));

        let repeated = Atom::new(loc, [Term::Var(x), Term::Var(x)]);
        assert!(match_head(&goal, &repeated).is_none());

        let other = GroundAtom::new(nb, [it, fr]);
        assert!(match_head(&other, &head).is_none());

        let with_const = Atom::new(loc, [Term::Var(x), Term::Const(fr)]);
        assert!(match_head(&goal, &with_const).is_none());
    }
}
