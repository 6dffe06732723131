use super::atom::{Atom, GroundAtom};
use super::symbols::{ConstId, PredId, Symbols, VarId};
use std::fmt;

/// `body_1 ∧ ... ∧ body_n → head`, stored with its position in the theory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HornClause {
    pub rule_id: usize,
    pub head: Atom,
    pub body: Vec<Atom>,
    vars: Vec<VarId>,
}

impl HornClause {
    pub fn new(rule_id: usize, head: Atom, body: Vec<Atom>) -> Self {
        let mut vars = Vec::new();
        for atom in std::iter::once(&head).chain(body.iter()) {
            for v in atom.variables() {
                if !vars.contains(&v) {
                    vars.push(v);
                }
            }
        }
        HornClause {
            rule_id,
            head,
            body,
            vars,
        }
    }

    /// Distinct variables in order of first appearance (head first).
    pub fn variables(&self) -> &[VarId] {
        &self.vars
    }

    /// Head variables that never occur in the body.
    pub fn unrestricted_head_vars(&self) -> Vec<VarId> {
        self.head
            .variables()
            .filter(|v| !self.body.iter().any(|b| b.variables().any(|u| u == *v)))
            .collect()
    }

    pub fn display<'a>(&'a self, symbols: &'a Symbols) -> impl fmt::Display + 'a {
        DisplayClause {
            clause: self,
            symbols,
        }
    }
}

struct DisplayClause<'a> {
    clause: &'a HornClause,
    symbols: &'a Symbols,
}

impl fmt::Display for DisplayClause<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} :- ", self.clause.head.display(self.symbols))?;
        for (i, b) in self.clause.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", b.display(self.symbols))?;
        }
        f.write_str(".")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("Herbrand base size overflows 128-bit counter")]
pub struct CountOverflow;

/// A set of Horn clauses plus the symbol tables they were interned into.
#[derive(Debug, Clone, Default)]
pub struct Theory {
    pub symbols: Symbols,
    clauses: Vec<HornClause>,
}

impl Theory {
    pub fn new(symbols: Symbols) -> Self {
        Theory {
            symbols,
            clauses: Vec::new(),
        }
    }

    /// Appends a clause, renumbering its `rule_id` to keep ids dense.
    pub fn push(&mut self, head: Atom, body: Vec<Atom>) -> usize {
        let id = self.clauses.len();
        self.clauses.push(HornClause::new(id, head, body));
        id
    }

    pub fn clauses(&self) -> &[HornClause] {
        &self.clauses
    }

    pub fn clause(&self, rule_id: usize) -> &HornClause {
        &self.clauses[rule_id]
    }

    pub fn len(&self) -> usize {
        self.clauses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// Largest body length over all clauses; the cap applied to an infinite width.
    pub fn max_body_len(&self) -> usize {
        self.clauses.iter().map(|c| c.body.len()).max().unwrap_or(0)
    }

    /// Whether some clause has `pred` as head predicate.
    pub fn is_derivable(&self, pred: PredId) -> bool {
        self.clauses.iter().any(|c| c.head.pred == pred)
    }

    /// Constants that occur literally in some clause.
    pub fn rule_constants(&self) -> Vec<ConstId> {
        let mut out: Vec<ConstId> = self
            .clauses
            .iter()
            .flat_map(|c| std::iter::once(&c.head).chain(c.body.iter()))
            .flat_map(|a| a.args.iter().filter_map(|t| t.as_const()))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// `Σ_r n_constants^arity(r)` over every predicate in the symbol table.
    pub fn herbrand_base_size(&self, n_constants: u64) -> Result<u128, CountOverflow> {
        herbrand_base_size(&self.symbols, n_constants)
    }
}

pub fn herbrand_base_size(symbols: &Symbols, n_constants: u64) -> Result<u128, CountOverflow> {
    symbols.predicates().try_fold(0u128, |acc, p| {
        let arity = u32::try_from(symbols.arity(p)).map_err(|_| CountOverflow)?;
        let term = (n_constants as u128)
            .checked_pow(arity)
            .ok_or(CountOverflow)?;
        acc.checked_add(term).ok_or(CountOverflow)
    })
}

/// Every ground atom over `preds` with arguments drawn from `domain`.
pub fn herbrand_base<'a>(
    symbols: &'a Symbols,
    preds: impl IntoIterator<Item = PredId> + 'a,
    domain: &'a [ConstId],
) -> impl Iterator<Item = GroundAtom> + 'a {
    preds.into_iter().flat_map(move |p| {
        let arity = symbols.arity(p);
        tuples(domain, arity).map(move |args| GroundAtom::new(p, args))
    })
}

/// All `domain^k` tuples in lexicographic order of domain position.
pub fn tuples(domain: &[ConstId], k: usize) -> impl Iterator<Item = Vec<ConstId>> + '_ {
    let total = if domain.is_empty() && k > 0 {
        0
    } else {
        domain.len().saturating_pow(k as u32)
    };
    (0..total).map(move |mut idx| {
        let mut out = vec![ConstId(0); k];
        for slot in out.iter_mut().rev() {
            *slot = domain[idx % domain.len()];
            idx /= domain.len();
        }
        out
    })
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.clauses {
            writeln!(f, "{}", c.display(&self.symbols))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn herbrand_base_counts() {
        let mut s = Symbols::new();
        for name in ["locatedIn", "neighborOf", "other"] {
            s.intern_predicate(name, 2).unwrap();
        }
        assert_eq!(herbrand_base_size(&s, 272).unwrap(), 221_952);
        assert_eq!(herbrand_base_size(&s, 0).unwrap(), 0);

        let mut u = Symbols::new();
        u.intern_predicate("p", 1).unwrap();
        assert_eq!(herbrand_base_size(&u, 1).unwrap(), 1);

        let mut wide = Symbols::new();
        wide.intern_predicate("w", 40).unwrap();
        assert_eq!(herbrand_base_size(&wide, 14_505), Err(CountOverflow));
    }

    #[test]
    fn herbrand_base_enumeration_matches_size() {
        let mut s = Symbols::new();
        let p = s.intern_predicate("p", 2).unwrap();
        let q = s.intern_predicate("q", 1).unwrap();
        let dom: Vec<_> = ["a", "b", "c"].iter().map(|n| s.intern_constant(n)).collect();
        let hb: Vec<_> = herbrand_base(&s, [p, q], &dom).collect();
        assert_eq!(hb.len() as u128, herbrand_base_size(&s, 3).unwrap());
        assert_eq!(tuples(&[], 0).count(), 1);
        assert_eq!(tuples(&[], 2).count(), 0);
    }
}
