//! Text checkpoints.
//!
//! ```text
//! #kge 1
//! model <complex|distmult> <dim> <entities> <relations>
//! entity <name> <re_0> .. <re_{dim-1}> <im_0> .. <im_{dim-1}>
//! relation <name> <re..> <im..>
//! ```
//!
//! Fields are tab-separated; entity and relation rows appear in id order.
//! Floats are written in shortest round-trip form.

use crate::model::{EmbeddingModel, ModelKind};
use std::io::{self, BufRead, Write};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum CheckpointError {
    #[error("unsupported checkpoint version `{0}`")]
    Version(String),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn save(model: &EmbeddingModel, out: &mut impl Write) -> io::Result<()> {
    writeln!(out, "#kge {CHECKPOINT_VERSION}")?;
    writeln!(
        out,
        "model\t{}\t{}\t{}\t{}",
        model.kind,
        model.dim,
        model.num_entities(),
        model.num_relations()
    )?;
    let k = model.dim;
    let mut row = |tag: &str, name: &str, re: &[f64], im: &[f64]| -> io::Result<()> {
        write!(out, "{tag}\t{name}")?;
        for v in re.iter().chain(im) {
            write!(out, "\t{v}")?;
        }
        writeln!(out)
    };
    for (i, name) in model.entity_names.iter().enumerate() {
        row("entity", name, &model.entities.re[i * k..][..k], &model.entities.im[i * k..][..k])?;
    }
    for (i, name) in model.relation_names.iter().enumerate() {
        row("relation", name, &model.relations.re[i * k..][..k], &model.relations.im[i * k..][..k])?;
    }
    Ok(())
}

pub fn load(input: impl BufRead) -> Result<EmbeddingModel, CheckpointError> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    match header.strip_prefix("#kge ") {
        Some(v) if v.trim() == CHECKPOINT_VERSION.to_string() => {}
        Some(v) => return Err(CheckpointError::Version(v.trim().into())),
        None => return Err(CheckpointError::Version(header)),
    }
    let bad = |line: usize, message: String| CheckpointError::Malformed { line, message };
    let spec = lines.next().transpose()?.ok_or_else(|| bad(2, "missing model line".into()))?;
    let f: Vec<&str> = spec.split('\t').collect();
    if f.len() != 5 || f[0] != "model" {
        return Err(bad(2, "expected `model kind dim entities relations`".into()));
    }
    let kind: ModelKind = f[1].parse().map_err(|e: String| bad(2, e))?;
    let num = |s: &str| s.parse::<usize>().map_err(|e| bad(2, e.to_string()));
    let (dim, n_ent, n_rel) = (num(f[2])?, num(f[3])?, num(f[4])?);

    let mut rows: Vec<(String, Vec<f64>)> = Vec::with_capacity(n_ent + n_rel);
    for (i, line) in lines.enumerate() {
        let line = line?;
        let lno = i + 3;
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        let want = if rows.len() < n_ent { "entity" } else { "relation" };
        if f[0] != want || f.len() != 2 + 2 * dim {
            return Err(bad(lno, format!("expected a `{want}` row with {} values", 2 * dim)));
        }
        let vals = f[2..]
            .iter()
            .map(|v| v.parse::<f64>().map_err(|e| bad(lno, e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        rows.push((f[1].to_string(), vals));
    }
    if rows.len() != n_ent + n_rel {
        return Err(bad(0, format!("expected {} rows, found {}", n_ent + n_rel, rows.len())));
    }
    let rel_rows = rows.split_off(n_ent);
    let mut m = EmbeddingModel::zeros(
        kind,
        dim,
        rows.iter().map(|r| r.0.clone()).collect(),
        rel_rows.iter().map(|r| r.0.clone()).collect(),
    );
    for (table, src) in [(&mut m.entities, &rows), (&mut m.relations, &rel_rows)] {
        for (i, (_, vals)) in src.iter().enumerate() {
            table.re[i * dim..][..dim].copy_from_slice(&vals[..dim]);
            table.im[i * dim..][..dim].copy_from_slice(&vals[dim..]);
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use bcg_core::logic::Symbols;

    #[test]
    fn round_trip_is_exact() {
        let mut syms = Symbols::new();
        syms.intern_predicate("r", 2).unwrap();
        for c in ["a", "b", "c"] {
            syms.intern_constant(c);
        }
        let m = EmbeddingModel::new(ModelKind::ComplEx, 5, &syms, 11);
        let mut buf = Vec::new();
        save(&m, &mut buf).unwrap();
        assert_eq!(load(buf.as_slice()).unwrap(), m);
        assert!(matches!(load("#kge 2\n".as_bytes()), Err(CheckpointError::Version(_))));
    }
}
