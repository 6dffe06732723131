//! Grounded networks: ground atoms as nodes, accepted rule instances as
//! hyperedges from body nodes to a head node.
//!
//! # Text format
//!
//! Tab-separated records, one per line, in this order:
//!
//! ```text
//! #gmn 1
//! counts  <predicates> <constants> <rules> <nodes> <edges>
//! pred    <id> <name> <arity>
//! const   <id> <name>
//! rule    <id> <clause>
//! node    <id> <pred> <arg>... <known:0|1> <root:0|1>
//! edge    <id> <rule> <head> <body>...
//! ```
//!
//! Ids are dense and local to the file. Node arguments are constant ids and
//! edge endpoints are node ids. Within each kind, records appear in id order.

use crate::grounder::GroundingResult;
use crate::logic::{ConstId, PredId, Symbols, Theory};
use rustc_hash::FxHashMap;
use serde::Serialize;
use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Node {
    pub pred: u32,
    pub args: Vec<u32>,
    pub known: bool,
    pub root: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hyperedge {
    pub rule: u32,
    pub head: u32,
    pub body: Vec<u32>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GroundedNetwork {
    pub predicates: Vec<(String, usize)>,
    pub constants: Vec<String>,
    /// Clause text per rule id.
    pub rules: Vec<String>,
    pub nodes: Vec<Node>,
    pub edges: Vec<Hyperedge>,
    /// Per node, incident edges where it is the head, ordered by rule id.
    incoming: Vec<Vec<u32>>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct GmnStats {
    pub nodes: u64,
    pub edges: u64,
    pub known_nodes: u64,
    pub roots: u64,
    /// Edge count per rule id.
    pub per_rule: Vec<u64>,
    pub max_in_degree: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum GmnError {
    #[error("unsupported network format version `{0}` (expected {FORMAT_VERSION})")]
    Version(String),
    #[error("record {record}: {message}")]
    Malformed { record: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl GroundedNetwork {
    fn index_incoming(&mut self) {
        let mut incoming = vec![Vec::new(); self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            incoming[e.head as usize].push(i as u32);
        }
        for list in &mut incoming {
            list.sort_by_key(|&e| (self.edges[e as usize].rule, e));
        }
        self.incoming = incoming;
    }

    /// `R(h)`: edges whose head is `node`, grouped by rule.
    pub fn incoming(&self, node: u32) -> &[u32] {
        &self.incoming[node as usize]
    }

    /// `ne(h, i)` of edge `edge`: its body nodes in clause order.
    pub fn neighbours(&self, edge: u32) -> &[u32] {
        &self.edges[edge as usize].body
    }

    pub fn is_head(&self, node: u32) -> bool {
        !self.incoming[node as usize].is_empty()
    }

    pub fn node_name(&self, node: u32) -> String {
        let n = &self.nodes[node as usize];
        let mut s = String::new();
        s.push_str(&self.predicates[n.pred as usize].0);
        s.push('(');
        for (i, a) in n.args.iter().enumerate() {
            if i > 0 {
                s.push(',');
            }
            crate::logic::write_constant(&mut s, &self.constants[*a as usize]).expect("string write");
        }
        s.push(')');
        s
    }

    /// Node id by predicate and constant names.
    pub fn lookup(&self) -> FxHashMap<String, u32> {
        (0..self.nodes.len() as u32).map(|i| (self.node_name(i), i)).collect()
    }

    pub fn stats(&self) -> GmnStats {
        let mut per_rule = vec![0u64; self.rules.len()];
        for e in &self.edges {
            per_rule[e.rule as usize] += 1;
        }
        GmnStats {
            nodes: self.nodes.len() as u64,
            edges: self.edges.len() as u64,
            known_nodes: self.nodes.iter().filter(|n| n.known).count() as u64,
            roots: self.nodes.iter().filter(|n| n.root).count() as u64,
            per_rule,
            max_in_degree: self.incoming.iter().map(|l| l.len() as u64).max().unwrap_or(0),
        }
    }

    pub fn export(&self, out: &mut impl Write) -> io::Result<()> {
        writeln!(out, "#gmn {FORMAT_VERSION}")?;
        writeln!(
            out,
            "counts\t{}\t{}\t{}\t{}\t{}",
            self.predicates.len(),
            self.constants.len(),
            self.rules.len(),
            self.nodes.len(),
            self.edges.len()
        )?;
        for (i, (name, arity)) in self.predicates.iter().enumerate() {
            writeln!(out, "pred\t{i}\t{name}\t{arity}")?;
        }
        for (i, name) in self.constants.iter().enumerate() {
            writeln!(out, "const\t{i}\t{name}")?;
        }
        for (i, text) in self.rules.iter().enumerate() {
            writeln!(out, "rule\t{i}\t{text}")?;
        }
        let mut line = String::new();
        for (i, n) in self.nodes.iter().enumerate() {
            line.clear();
            write!(line, "node\t{i}\t{}", n.pred).expect("string write");
            for a in &n.args {
                write!(line, "\t{a}").expect("string write");
            }
            writeln!(out, "{line}\t{}\t{}", n.known as u8, n.root as u8)?;
        }
        for (i, e) in self.edges.iter().enumerate() {
            line.clear();
            write!(line, "edge\t{i}\t{}\t{}", e.rule, e.head).expect("string write");
            for b in &e.body {
                write!(line, "\t{b}").expect("string write");
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.export(&mut buf).expect("in-memory write");
        String::from_utf8(buf).expect("utf-8")
    }

    pub fn import(input: impl BufRead) -> Result<GroundedNetwork, GmnError> {
        let mut lines = input.lines();
        let header = lines.next().transpose()?.unwrap_or_default();
        match header.strip_prefix("#gmn ") {
            Some(v) if v.trim() == FORMAT_VERSION.to_string() => {}
            Some(v) => return Err(GmnError::Version(v.trim().to_string())),
            None => return Err(GmnError::Version(header)),
        }
        let mut net = GroundedNetwork::default();
        let mut counts: Option<[usize; 5]> = None;
        for (idx, line) in lines.enumerate() {
            let line = line?;
            let record = idx + 1;
            if line.is_empty() {
                continue;
            }
            let bad = |message: String| GmnError::Malformed { record, message };
            let fields: Vec<&str> = line.split('\t').collect();
            let num = |i: usize| -> Result<usize, GmnError> {
                fields
                    .get(i)
                    .ok_or_else(|| bad(format!("missing field {i}")))?
                    .parse::<usize>()
                    .map_err(|e| bad(format!("field {i}: {e}")))
            };
            let expect_id = |have: usize| -> Result<(), GmnError> {
                let id = num(1)?;
                if id != have {
                    return Err(bad(format!("expected id {have}, found {id}")));
                }
                Ok(())
            };
            match fields[0] {
                "counts" => {
                    let mut c = [0; 5];
                    for (k, slot) in c.iter_mut().enumerate() {
                        *slot = num(k + 1)?;
                    }
                    counts = Some(c);
                }
                "pred" if fields.len() == 4 => {
                    expect_id(net.predicates.len())?;
                    net.predicates.push((fields[2].to_string(), num(3)?));
                }
                "const" if fields.len() == 3 => {
                    expect_id(net.constants.len())?;
                    net.constants.push(fields[2].to_string());
                }
                "rule" if fields.len() == 3 => {
                    expect_id(net.rules.len())?;
                    net.rules.push(fields[2].to_string());
                }
                "node" if fields.len() >= 5 => {
                    expect_id(net.nodes.len())?;
                    let pred = num(2)?;
                    let arity = net
                        .predicates
                        .get(pred)
                        .ok_or_else(|| bad(format!("unknown predicate {pred}")))?
                        .1;
                    if fields.len() != 5 + arity {
                        return Err(bad(format!("expected {arity} arguments")));
                    }
                    let mut args = Vec::with_capacity(arity);
                    for k in 0..arity {
                        let a = num(3 + k)?;
                        if a >= net.constants.len() {
                            return Err(bad(format!("unknown constant {a}")));
                        }
                        args.push(a as u32);
                    }
                    let flag = |i: usize| match fields[i] {
                        "0" => Ok(false),
                        "1" => Ok(true),
                        other => Err(bad(format!("expected 0 or 1, found `{other}`"))),
                    };
                    net.nodes.push(Node {
                        pred: pred as u32,
                        args,
                        known: flag(3 + arity)?,
                        root: flag(4 + arity)?,
                    });
                }
                "edge" if fields.len() >= 4 => {
                    expect_id(net.edges.len())?;
                    let rule = num(2)?;
                    if rule >= net.rules.len() {
                        return Err(bad(format!("unknown rule {rule}")));
                    }
                    let mut ends = Vec::with_capacity(fields.len() - 3);
                    for k in 3..fields.len() {
                        let n = num(k)?;
                        if n >= net.nodes.len() {
                            return Err(bad(format!("unknown node {n}")));
                        }
                        ends.push(n as u32);
                    }
                    net.edges.push(Hyperedge {
                        rule: rule as u32,
                        head: ends[0],
                        body: ends[1..].to_vec(),
                    });
                }
                other => return Err(bad(format!("unexpected record `{other}`"))),
            }
        }
        let found = [
            net.predicates.len(),
            net.constants.len(),
            net.rules.len(),
            net.nodes.len(),
            net.edges.len(),
        ];
        match counts {
            Some(c) if c == found => {}
            Some(c) => {
                return Err(GmnError::Malformed {
                    record: 0,
                    message: format!("counts line says {c:?} but the file holds {found:?}"),
                })
            }
            None => {
                return Err(GmnError::Malformed {
                    record: 0,
                    message: "missing counts record".into(),
                })
            }
        }
        net.index_incoming();
        Ok(net)
    }
}

/// Builds the network of a grounding. Node ids follow the result's atom
/// order, so roots come first; only symbols that occur are kept.
pub fn build_gmn(result: &GroundingResult, theory: &Theory) -> GroundedNetwork {
    build_with_symbols(result, theory, &theory.symbols)
}

/// Like [`build_gmn`] with names resolved through `symbols`, which must
/// extend the theory's table.
pub fn build_with_symbols(result: &GroundingResult, theory: &Theory, symbols: &Symbols) -> GroundedNetwork {
    let mut net = GroundedNetwork {
        rules: theory
            .clauses()
            .iter()
            .map(|c| c.display(&theory.symbols).to_string())
            .collect(),
        ..Default::default()
    };
    let mut preds: FxHashMap<PredId, u32> = FxHashMap::default();
    let mut consts: FxHashMap<ConstId, u32> = FxHashMap::default();
    let is_root: rustc_hash::FxHashSet<_> = result.roots().iter().copied().collect();
    for (id, atom) in result.atoms().iter() {
        let pred = *preds.entry(atom.pred).or_insert_with(|| {
            net.predicates
                .push((symbols.predicate_name(atom.pred).to_string(), symbols.arity(atom.pred)));
            (net.predicates.len() - 1) as u32
        });
        let args = atom
            .args
            .iter()
            .map(|c| {
                *consts.entry(*c).or_insert_with(|| {
                    net.constants.push(symbols.constant_name(*c).to_string());
                    (net.constants.len() - 1) as u32
                })
            })
            .collect();
        net.nodes.push(Node {
            pred,
            args,
            known: result.is_known(id),
            root: is_root.contains(&id),
        });
    }
    net.edges = result
        .instances()
        .iter()
        .map(|g| Hyperedge {
            rule: g.rule_id as u32,
            head: g.head.0,
            body: g.body.iter().map(|b| b.0).collect(),
        })
        .collect();
    net.index_incoming();
    net
}
