//! Exponential random graph models over undirected graphs.

mod mple;
mod sampler;
mod stats;
mod terms;

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::num::Real;

pub use mple::{fit_mple, DyadSampling, ErgmModel, FitDiagnostics, MpleConfig};
pub use sampler::{fold_samples, sample_graphs, Chain, DynGraph, McmcConfig};
pub use stats::{change_statistics, compute_statistics, Adjacency, StatVector};
pub use terms::{Term, TermKind, TermSet};

/// Writes the model as `key = value` lines.
pub fn write_model<T: Real, W: Write>(model: &ErgmModel<T>, mut out: W) -> Result<()> {
    let names: Vec<&str> = model.terms.terms().iter().map(|t| t.kind.name()).collect();
    writeln!(out, "# ergm model")?;
    writeln!(out, "terms = {}", names.join(","))?;
    for t in model.terms.terms() {
        if let Some(d) = t.decay {
            writeln!(out, "decay.{} = {:?}", t.kind, d.as_f64())?;
        }
    }
    for (t, th) in model.terms.terms().iter().zip(&model.theta) {
        writeln!(out, "theta.{} = {:?}", t.kind, th.as_f64())?;
    }
    let d = &model.diagnostics;
    writeln!(out, "fit.iterations = {}", d.iterations)?;
    writeln!(
        out,
        "fit.log_pseudo_likelihood = {:?}",
        d.log_pseudo_likelihood.as_f64()
    )?;
    writeln!(out, "fit.gradient_norm = {:?}", d.gradient_norm.as_f64())?;
    writeln!(out, "fit.converged = {}", d.converged)?;
    writeln!(out, "fit.separation = {}", d.separation)?;
    writeln!(out, "fit.dyads_used = {}", d.dyads_used)?;
    writeln!(out, "fit.offset = {:?}", d.offset.as_f64())?;
    Ok(())
}

/// Parses the format produced by [`write_model`].
pub fn read_model<T: Real, R: BufRead>(reader: R) -> Result<ErgmModel<T>> {
    let mut kv: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let (k, v) = t.split_once('=').ok_or_else(|| Error::Parse {
            line: i + 1,
            message: "expected key = value".into(),
        })?;
        kv.insert(k.trim().to_string(), (i + 1, v.trim().to_string()));
    }
    let get = |k: &str| -> Result<&(usize, String)> {
        kv.get(k).ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("missing key {k}"),
        })
    };
    fn num<X: std::str::FromStr>(entry: &(usize, String)) -> Result<X> {
        entry.1.parse().map_err(|_| Error::Parse {
            line: entry.0,
            message: format!("bad value {:?}", entry.1),
        })
    }
    let mut terms = Vec::new();
    let mut theta = Vec::new();
    for name in get("terms")?.1.split(',') {
        let kind = TermKind::parse(name.trim())?;
        let decay = if kind.is_geometric() {
            Some(T::lit(num::<f64>(get(&format!("decay.{kind}"))?)?))
        } else {
            None
        };
        terms.push(Term { kind, decay });
        theta.push(T::lit(num::<f64>(get(&format!("theta.{kind}"))?)?));
    }
    let mut model = ErgmModel::with_theta(TermSet::new(terms)?, theta)?;
    let d = &mut model.diagnostics;
    if let Some(e) = kv.get("fit.iterations") {
        d.iterations = num(e)?;
    }
    if let Some(e) = kv.get("fit.log_pseudo_likelihood") {
        d.log_pseudo_likelihood = T::lit(num(e)?);
    }
    if let Some(e) = kv.get("fit.gradient_norm") {
        d.gradient_norm = T::lit(num(e)?);
    }
    if let Some(e) = kv.get("fit.converged") {
        d.converged = num(e)?;
    }
    if let Some(e) = kv.get("fit.separation") {
        d.separation = num(e)?;
    }
    if let Some(e) = kv.get("fit.dyads_used") {
        d.dyads_used = num(e)?;
    }
    if let Some(e) = kv.get("fit.offset") {
        d.offset = T::lit(num(e)?);
    }
    Ok(model)
}
