//! Maximum pseudo-likelihood fitting.
//!
//! Each included dyad contributes a logistic observation: the response is
//! whether the dyad is an edge and the covariates are its change statistics.
//! Identical rows are pooled into weighted rows before Newton iteration.

use std::collections::BTreeMap;

use log::warn;
use rayon::prelude::*;

use super::stats::change_statistics_into;
use super::terms::{TermKind, TermSet};
use crate::error::{Error, Result};
use crate::graph::{sample_random_nonedges, Dyad, Graph};
use crate::num::{log1p_exp, logistic, Real};
use crate::rng::Seed;

/// Which dyads enter the pseudo-likelihood.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DyadSampling {
    All,
    /// Every edge plus `ratio × |E|` uniformly sampled non-edges, with the
    /// case-control offset added to the edges coefficient.
    CaseControl {
        ratio: usize,
    },
    /// `All` up to `max_dyads` dyads, otherwise `CaseControl { ratio: 5 }`.
    Auto {
        max_dyads: usize,
    },
}

impl Default for DyadSampling {
    fn default() -> Self {
        DyadSampling::Auto {
            max_dyads: 2_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MpleConfig {
    pub sampling: DyadSampling,
    pub max_iters: usize,
    /// Convergence threshold on the gradient's infinity norm.
    pub tol: f64,
    /// Bound on |θ_i|.
    pub clamp: f64,
}

impl Default for MpleConfig {
    fn default() -> Self {
        MpleConfig {
            sampling: DyadSampling::default(),
            max_iters: 200,
            tol: 1e-6,
            clamp: 10.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FitDiagnostics<T> {
    pub iterations: usize,
    pub log_pseudo_likelihood: T,
    pub gradient_norm: T,
    pub converged: bool,
    /// Some coefficient ends at the clamp bound (separated data or an
    /// optimum beyond the bound).
    pub separation: bool,
    /// Rows in the design before pooling.
    pub dyads_used: usize,
    /// Case-control correction added to the edges coefficient (0 if none).
    pub offset: T,
}

/// Fitted model: term set, coefficients and fit diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct ErgmModel<T> {
    pub terms: TermSet<T>,
    pub theta: Vec<T>,
    pub diagnostics: FitDiagnostics<T>,
}

impl<T: Real> ErgmModel<T> {
    /// Model with given coefficients and empty diagnostics.
    pub fn with_theta(terms: TermSet<T>, theta: Vec<T>) -> Result<Self> {
        if theta.len() != terms.len() || theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::param("theta must have one finite value per term"));
        }
        Ok(ErgmModel {
            terms,
            theta,
            diagnostics: FitDiagnostics {
                iterations: 0,
                log_pseudo_likelihood: T::zero(),
                gradient_norm: T::zero(),
                converged: true,
                separation: false,
                dyads_used: 0,
                offset: T::zero(),
            },
        })
    }
}

/// Pooled design row.
#[derive(Clone, Debug)]
pub(crate) struct Row<T> {
    pub x: Vec<T>,
    pub y: bool,
    pub weight: T,
}

const ROW_CHUNK: usize = 4096;

pub(crate) fn design_rows<T: Real>(g: &Graph, terms: &TermSet<T>, dyads: &[Dyad]) -> Vec<Row<T>> {
    let p = terms.len();
    let chunks: Vec<Vec<(Vec<T>, bool)>> = dyads
        .par_chunks(ROW_CHUNK)
        .map(|chunk| {
            chunk
                .iter()
                .map(|d| {
                    let mut x = vec![T::zero(); p];
                    change_statistics_into(g, d.lo(), d.hi(), terms, &mut x);
                    (x, g.has_edge(d.lo(), d.hi()))
                })
                .collect()
        })
        .collect();
    let mut pooled: BTreeMap<(Vec<u64>, bool), (Vec<T>, usize)> = BTreeMap::new();
    for (x, y) in chunks.into_iter().flatten() {
        let key: Vec<u64> = x.iter().map(|v| v.as_f64().to_bits()).collect();
        pooled.entry((key, y)).or_insert_with(|| (x, 0)).1 += 1;
    }
    pooled
        .into_iter()
        .map(|((_, y), (x, c))| Row {
            x,
            y,
            weight: T::count(c),
        })
        .collect()
}

pub(crate) fn log_pl<T: Real>(rows: &[Row<T>], theta: &[T]) -> T {
    rows.iter()
        .map(|r| {
            let eta: T = r.x.iter().zip(theta).map(|(a, b)| *a * *b).sum();
            let y = if r.y { eta } else { T::zero() };
            r.weight * (y - log1p_exp(eta))
        })
        .sum()
}

/// Gradient and negated Hessian of the log pseudo-likelihood.
pub(crate) fn gradient_hessian<T: Real>(rows: &[Row<T>], theta: &[T]) -> (Vec<T>, Vec<Vec<T>>) {
    let p = theta.len();
    let mut g = vec![T::zero(); p];
    let mut h = vec![vec![T::zero(); p]; p];
    for r in rows {
        let eta: T = r.x.iter().zip(theta).map(|(a, b)| *a * *b).sum();
        let prob = logistic(eta);
        let resid = if r.y { T::one() - prob } else { -prob };
        let curv = r.weight * prob * (T::one() - prob);
        for a in 0..p {
            g[a] = g[a] + r.weight * resid * r.x[a];
            for b in 0..=a {
                h[a][b] = h[a][b] + curv * r.x[a] * r.x[b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            h[b][a] = h[a][b];
        }
    }
    (g, h)
}

/// Solves `h · x = g` restricted to `free` coordinates by Gaussian
/// elimination with partial pivoting. Directions with a vanishing pivot get
/// a zero step.
fn solve_free<T: Real>(h: &[Vec<T>], g: &[T], free: &[usize]) -> Vec<T> {
    let m = free.len();
    let mut a: Vec<Vec<T>> = free
        .iter()
        .map(|&i| free.iter().map(|&j| h[i][j]).collect())
        .collect();
    let mut b: Vec<T> = free.iter().map(|&i| g[i]).collect();
    let scale = a
        .iter()
        .enumerate()
        .map(|(i, r)| r[i].abs())
        .fold(T::zero(), T::max);
    let eps = scale * T::lit(1e-12) + T::min_positive_value();
    let mut pivot_ok = vec![true; m];
    for col in 0..m {
        let piv = (col..m)
            .max_by(|&x, &y| {
                a[x][col]
                    .abs()
                    .partial_cmp(&a[y][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .unwrap();
        if a[piv][col].abs() <= eps {
            pivot_ok[col] = false;
            continue;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..m {
            let f = a[row][col] / a[col][col];
            for k in col..m {
                a[row][k] = a[row][k] - f * a[col][k];
            }
            b[row] = b[row] - f * b[col];
        }
    }
    let mut x = vec![T::zero(); m];
    for col in (0..m).rev() {
        if !pivot_ok[col] {
            continue;
        }
        let s: T = (col + 1..m).map(|k| a[col][k] * x[k]).sum();
        x[col] = (b[col] - s) / a[col][col];
    }
    let mut full = vec![T::zero(); g.len()];
    for (slot, &i) in free.iter().enumerate() {
        full[i] = x[slot];
    }
    full
}

pub(crate) struct NewtonOutcome<T> {
    pub theta: Vec<T>,
    pub iterations: usize,
    pub gradient_norm: T,
    pub log_pl: T,
    pub converged: bool,
    pub separation: bool,
}

/// Damped Newton ascent on the box `|θ_i| ≤ clamp` with an active set of
/// coordinates held at the bound.
pub(crate) fn newton<T: Real>(rows: &[Row<T>], p: usize, cfg: &MpleConfig) -> NewtonOutcome<T> {
    let clamp = T::lit(cfg.clamp);
    let tol = T::lit(cfg.tol);
    let mut theta = vec![T::zero(); p];
    let mut clamped = vec![false; p];
    let mut current = log_pl(rows, &theta);
    let mut iterations = 0;
    let mut converged = false;
    let mut grad_norm = T::infinity();
    while iterations < cfg.max_iters {
        let (g, h) = gradient_hessian(rows, &theta);
        // A coordinate stays at the bound only while the gradient pushes outward.
        for i in 0..p {
            clamped[i] = theta[i].abs() >= clamp && g[i] * theta[i] > T::zero();
        }
        let free: Vec<usize> = (0..p).filter(|&i| !clamped[i]).collect();
        grad_norm = free.iter().map(|&i| g[i].abs()).fold(T::zero(), T::max);
        if grad_norm < tol {
            converged = true;
            break;
        }
        iterations += 1;
        let mut step = solve_free(&h, &g, &free);
        if step.iter().all(|s| *s == T::zero()) {
            // Flat directions only: follow the gradient.
            step = free.iter().fold(vec![T::zero(); p], |mut s, &i| {
                s[i] = g[i];
                s
            });
        }
        let mut t = T::one();
        let mut accepted = false;
        for _ in 0..60 {
            let cand: Vec<T> = theta
                .iter()
                .zip(&step)
                .map(|(a, s)| (*a + t * *s).max(-clamp).min(clamp))
                .collect();
            let val = log_pl(rows, &cand);
            if val >= current {
                theta = cand;
                current = val;
                accepted = true;
                break;
            }
            t = t * T::lit(0.5);
        }
        if !accepted {
            break;
        }
    }
    if !converged {
        let (g, _) = gradient_hessian(rows, &theta);
        for i in 0..p {
            clamped[i] = theta[i].abs() >= clamp && g[i] * theta[i] > T::zero();
        }
        grad_norm = (0..p)
            .filter(|&i| !clamped[i])
            .map(|i| g[i].abs())
            .fold(T::zero(), T::max);
        converged = grad_norm < tol;
    }
    NewtonOutcome {
        theta,
        iterations,
        gradient_norm: grad_norm,
        log_pl: current,
        converged,
        separation: clamped.iter().any(|&c| c),
    }
}

/// Fits `terms` to `g` by maximum pseudo-likelihood.
pub fn fit_mple<T: Real>(
    g: &Graph,
    terms: &TermSet<T>,
    cfg: &MpleConfig,
    seed: Seed,
) -> Result<ErgmModel<T>> {
    let n = g.node_count();
    let dyad_total = g.dyad_count();
    let e = g.edge_count();
    if e == 0 {
        return Err(Error::Degenerate("graph has no edges".into()));
    }
    let case_control = match cfg.sampling {
        DyadSampling::All => None,
        DyadSampling::CaseControl { ratio } => Some(ratio),
        DyadSampling::Auto { max_dyads } => (dyad_total > max_dyads).then_some(5),
    }
    .filter(|&ratio| ratio * e < dyad_total - e);

    let (dyads, offset) = match case_control {
        None => {
            let all: Vec<Dyad> = (0..n)
                .flat_map(|u| (u + 1..n).map(move |v| Dyad::of(u, v)))
                .collect();
            (all, T::zero())
        }
        Some(ratio) => {
            terms
                .position(TermKind::Edges)
                .ok_or_else(|| Error::param("case-control sampling requires the edges term"))?;
            let controls = sample_random_nonedges(g, ratio * e, &mut seed.rng())?;
            let mut dyads: Vec<Dyad> = g.edges().chain(controls.iter()).collect();
            dyads.sort_unstable();
            let frac = (ratio * e) as f64 / (dyad_total - e) as f64;
            (dyads, T::lit(frac.ln()))
        }
    };

    let rows = design_rows(g, terms, &dyads);
    let out = newton(&rows, terms.len(), cfg);
    if out.separation {
        warn!(
            "pseudo-likelihood maximum lies outside |theta| <= {}; coefficients held at the bound",
            cfg.clamp
        );
    }
    let mut theta = out.theta;
    if let Some(i) = terms.position(TermKind::Edges) {
        theta[i] = theta[i] + offset;
    }
    Ok(ErgmModel {
        terms: terms.clone(),
        theta,
        diagnostics: FitDiagnostics {
            iterations: out.iterations,
            log_pseudo_likelihood: out.log_pl,
            gradient_norm: out.gradient_norm,
            converged: out.converged,
            separation: out.separation,
            dyads_used: dyads.len(),
            offset,
        },
    })
}
