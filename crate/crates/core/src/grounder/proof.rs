use super::GroundingResult;
use crate::logic::Theory;
use crate::table::AtomId;
use std::fmt::{self, Write as _};

/// A proof extracted from a grounding; leaves are known facts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofTree {
    pub atom: AtomId,
    /// `None` for a known fact.
    pub rule: Option<usize>,
    pub children: Vec<ProofTree>,
}

impl ProofTree {
    /// A proof of minimum depth for `atom`, following decreasing min-depth
    /// labels, so no atom repeats along a path.
    pub fn extract(result: &GroundingResult, atom: AtomId) -> Option<ProofTree> {
        if result.is_known(atom) {
            return Some(ProofTree {
                atom,
                rule: None,
                children: Vec::new(),
            });
        }
        let md = result.min_depth(atom)?;
        let inst = result.instances().iter().find(|g| {
            g.head == atom
                && g.body
                    .iter()
                    .zip(&g.known)
                    .all(|(b, k)| *k || result.min_depth(*b).is_some_and(|m| m < md))
        })?;
        let children = inst
            .body
            .iter()
            .map(|b| ProofTree::extract(result, *b))
            .collect::<Option<Vec<_>>>()?;
        Some(ProofTree {
            atom,
            rule: Some(inst.rule_id),
            children,
        })
    }

    /// Rule applications along the longest path.
    pub fn depth(&self) -> usize {
        match self.rule {
            None => 0,
            Some(_) => 1 + self.children.iter().map(|c| c.depth()).max().unwrap_or(0),
        }
    }

    pub fn render(&self, result: &GroundingResult, theory: &Theory) -> String {
        let mut s = String::new();
        self.render_into(result, theory, 0, &mut s).expect("string write");
        s
    }

    fn render_into(
        &self,
        result: &GroundingResult,
        theory: &Theory,
        indent: usize,
        out: &mut String,
    ) -> fmt::Result {
        let atom = result.atom(self.atom).display(&theory.symbols);
        match self.rule {
            None => writeln!(out, "{:indent$}{atom}  [fact]", "")?,
            Some(r) => writeln!(out, "{:indent$}{atom}  [rule {r}]", "")?,
        }
        for c in &self.children {
            c.render_into(result, theory, indent + 2, out)?;
        }
        Ok(())
    }
}
