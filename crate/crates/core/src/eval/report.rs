use std::io::Write;

use rayon::prelude::*;

use super::{build_trial_graphs, compute_metrics, run_trial, TrialGraphs, TrialResult};
use crate::ergm::TermSet;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linkpred::LinkPredConfig;
use crate::num::Real;
use crate::rng::Seed;
use crate::seeds::{Method, SelectionParams};

pub const REPORT_HEADER: [&str; 10] = [
    "dataset",
    "method",
    "diff_p",
    "similarity",
    "added",
    "random",
    "total",
    "m1",
    "m2",
    "m3",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow<T> {
    pub dataset: String,
    pub method: Method,
    pub diff_p: T,
    pub similarity: T,
    /// Mean `|O ∩ A|`.
    pub added: T,
    /// Mean `|O ∩ R|`.
    pub random: T,
    /// Mean `|O|`.
    pub total: T,
    pub m1: Option<T>,
    pub m2: Option<T>,
    pub m3: T,
}

/// `m3` against diffusion round for one grid cell.
#[derive(Clone, Debug, PartialEq)]
pub struct TrendSeries<T> {
    pub method: Method,
    pub diff_p: T,
    pub similarity: T,
    pub m3: Vec<T>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridConfig<T> {
    pub methods: Vec<Method>,
    pub diff_ps: Vec<f64>,
    pub similarities: Vec<T>,
    /// `diffusion.p` is replaced by each grid probability.
    pub selection: SelectionParams,
    pub terms: TermSet<T>,
    /// The trim mode is replaced by top-m with `m = |removed|`.
    pub linkpred: LinkPredConfig<T>,
    pub m3_scale: T,
}

impl<T: Real> GridConfig<T> {
    pub fn validate(&self, node_count: usize) -> Result<()> {
        if self.methods.is_empty() || self.diff_ps.is_empty() || self.similarities.is_empty() {
            return Err(Error::param("experiment grid is empty"));
        }
        if let Some(p) = self.diff_ps.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::param(format!(
                "diffusion probability {p} outside [0, 1]"
            )));
        }
        if let Some(f) = self
            .similarities
            .iter()
            .find(|f| !(**f > T::zero() && **f < T::one()))
        {
            return Err(Error::param(format!("similarity {f} outside (0, 1)")));
        }
        let k = self.selection.k;
        if k == 0 || k > node_count {
            return Err(Error::param(format!(
                "seed set size k = {k} must lie in 1..={node_count}"
            )));
        }
        if self.linkpred.num_medial_graphs == 0 {
            return Err(Error::param("num_medial_graphs must be positive"));
        }
        self.selection.diffusion.validate()
    }
}

impl<T: Real> Default for GridConfig<T> {
    fn default() -> Self {
        let decay = T::lit(0.5);
        GridConfig {
            methods: Method::TABLE.to_vec(),
            diff_ps: vec![0.25, 0.2, 0.15],
            similarities: [0.9, 0.85, 0.8, 0.75, 0.7]
                .into_iter()
                .map(T::lit)
                .collect(),
            selection: SelectionParams::default(),
            terms: TermSet::standard(decay, decay, decay).expect("positive decays"),
            linkpred: LinkPredConfig::default(),
            m3_scale: T::one(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentReport<T> {
    pub rows: Vec<ReportRow<T>>,
    /// Same order as `rows`.
    pub trends: Vec<TrendSeries<T>>,
    /// One entry per similarity, in configuration order.
    pub trials: Vec<TrialGraphs<T>>,
}

/// Runs every (method, diffusion probability, similarity) cell.
///
/// Trial graphs for similarity `j` come from `master.child2(1, j)`; the cell
/// `(i, j, method)` draws from `master.child2(2, i).child2(j, method tag)`.
pub fn run_experiment_grid<T: Real>(
    dataset: &str,
    original: &Graph,
    cfg: &GridConfig<T>,
    master: Seed,
) -> Result<ExperimentReport<T>> {
    cfg.validate(original.node_count())?;
    let trials: Vec<TrialGraphs<T>> = cfg
        .similarities
        .par_iter()
        .enumerate()
        .map(|(j, &f)| {
            build_trial_graphs(
                original,
                f,
                &cfg.terms,
                &cfg.linkpred,
                master.child2(1, j as u64),
            )
        })
        .collect::<Result<_>>()?;

    let mut cells = Vec::new();
    for (i, &p) in cfg.diff_ps.iter().enumerate() {
        for j in 0..trials.len() {
            for &m in &cfg.methods {
                cells.push((i, p, j, m));
            }
        }
    }
    let results: Vec<(usize, usize, TrialResult<T>)> = cells
        .par_iter()
        .map(|&(i, p, j, m)| {
            let mut params = cfg.selection.clone();
            params.diffusion.p = p;
            let seed = master.child2(2, i as u64).child2(j as u64, m.stream_tag());
            run_trial(&trials[j], m, &params, seed).map(|r| (i, j, r))
        })
        .collect::<Result<_>>()?;

    let mut out: Vec<(ReportRow<T>, TrendSeries<T>)> = results
        .into_iter()
        .map(|(i, j, r)| {
            let f = cfg.similarities[j];
            let metrics = compute_metrics(r.c_mean, r.b_mean, r.t_mean, f, cfg.m3_scale)?;
            let diff_p = T::lit(cfg.diff_ps[i]);
            let gap = T::one() - f;
            let m3 = r
                .trend
                .iter()
                .map(|s| cfg.m3_scale * (s.added - s.random) / gap)
                .collect();
            let row = ReportRow {
                dataset: dataset.to_string(),
                method: r.method,
                diff_p,
                similarity: f,
                added: r.c_mean,
                random: r.b_mean,
                total: r.t_mean,
                m1: metrics.m1,
                m2: metrics.m2,
                m3: metrics.m3,
            };
            Ok((
                row,
                TrendSeries {
                    method: r.method,
                    diff_p,
                    similarity: f,
                    m3,
                },
            ))
        })
        .collect::<Result<_>>()?;
    out.sort_by(|(a, _), (b, _)| {
        b.diff_p
            .partial_cmp(&a.diff_p)
            .unwrap()
            .then(b.similarity.partial_cmp(&a.similarity).unwrap())
            .then(a.method.cmp(&b.method))
    });
    let (rows, trends) = out.into_iter().unzip();
    Ok(ExperimentReport {
        rows,
        trends,
        trials,
    })
}

/// Per method (in table order), the row with the largest `m1`, ties by
/// larger `m2`, then by earlier row.
pub fn best_results<T: Real>(rows: &[ReportRow<T>]) -> Vec<ReportRow<T>> {
    let key = |v: Option<T>| v.unwrap_or_else(T::neg_infinity);
    let mut methods: Vec<Method> = rows.iter().map(|r| r.method).collect();
    methods.sort();
    methods.dedup();
    methods
        .into_iter()
        .filter_map(|m| {
            rows.iter()
                .filter(|r| r.method == m)
                .fold(None::<&ReportRow<T>>, |best, r| match best {
                    Some(b) if (key(r.m1), key(r.m2)) <= (key(b.m1), key(b.m2)) => Some(b),
                    _ => Some(r),
                })
                .cloned()
        })
        .collect()
}

fn fmt<T: Real>(v: T, full: bool) -> String {
    if full {
        v.to_string()
    } else {
        format!("{v:.2}")
    }
}

/// Report rows under the fixed header; `m1`/`m2` are empty when undefined.
pub fn write_report_csv<T: Real, W: Write>(
    rows: &[ReportRow<T>],
    out: W,
    full_precision: bool,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(REPORT_HEADER)
        .map_err(std::io::Error::from)?;
    for r in rows {
        let opt = |v: Option<T>| v.map(|x| fmt(x, full_precision)).unwrap_or_default();
        w.write_record([
            r.dataset.clone(),
            r.method.name().to_string(),
            fmt(r.diff_p, full_precision),
            fmt(r.similarity, full_precision),
            fmt(r.added, full_precision),
            fmt(r.random, full_precision),
            fmt(r.total, full_precision),
            opt(r.m1),
            opt(r.m2),
            fmt(r.m3, full_precision),
        ])
        .map_err(std::io::Error::from)?;
    }
    w.flush()?;
    Ok(())
}

/// One row per (diffusion probability, similarity, round) with a column of
/// `m3` per method. Series shorter than the cell horizon hold their final
/// value.
pub fn write_trends_csv<T: Real, W: Write>(
    dataset: &str,
    trends: &[TrendSeries<T>],
    out: W,
    full_precision: bool,
) -> Result<()> {
    let mut methods: Vec<Method> = trends.iter().map(|t| t.method).collect();
    methods.sort();
    methods.dedup();
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec![
        "dataset".to_string(),
        "diff_p".into(),
        "similarity".into(),
        "step".into(),
    ];
    header.extend(methods.iter().map(|m| m.name().to_string()));
    w.write_record(&header).map_err(std::io::Error::from)?;
    let mut start = 0;
    while start < trends.len() {
        let (p, f) = (trends[start].diff_p, trends[start].similarity);
        let end = start
            + trends[start..]
                .iter()
                .take_while(|t| t.diff_p == p && t.similarity == f)
                .count();
        let cell = &trends[start..end];
        let horizon = cell.iter().map(|t| t.m3.len()).max().unwrap_or(0);
        for s in 0..horizon {
            let mut rec = vec![
                dataset.to_string(),
                fmt(p, full_precision),
                fmt(f, full_precision),
                s.to_string(),
            ];
            for m in &methods {
                let v = cell
                    .iter()
                    .find(|t| t.method == *m)
                    .and_then(|t| t.m3.get(s).or(t.m3.last()));
                rec.push(v.map(|x| fmt(*x, full_precision)).unwrap_or_default());
            }
            w.write_record(&rec).map_err(std::io::Error::from)?;
        }
        start = end;
    }
    w.flush()?;
    Ok(())
}
