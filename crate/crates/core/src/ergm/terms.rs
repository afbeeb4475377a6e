//! Model terms and their geometric weights.

use std::fmt;

use crate::error::{Error, Result};
use crate::num::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TermKind {
    Edges,
    Isolates,
    GwDegree,
    GwEsp,
    GwDsp,
}

impl TermKind {
    pub fn name(self) -> &'static str {
        match self {
            TermKind::Edges => "edges",
            TermKind::Isolates => "isolates",
            TermKind::GwDegree => "gwdegree",
            TermKind::GwEsp => "gwesp",
            TermKind::GwDsp => "gwdsp",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        [
            TermKind::Edges,
            TermKind::Isolates,
            TermKind::GwDegree,
            TermKind::GwEsp,
            TermKind::GwDsp,
        ]
        .into_iter()
        .find(|k| k.name() == s)
        .ok_or_else(|| Error::param(format!("unknown ERGM term {s:?}")))
    }

    pub fn is_geometric(self) -> bool {
        matches!(self, TermKind::GwDegree | TermKind::GwEsp | TermKind::GwDsp)
    }
}

impl fmt::Display for TermKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One model term; geometrically weighted terms carry a fixed decay `τ > 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term<T> {
    pub kind: TermKind,
    pub decay: Option<T>,
}

impl<T: Real> Term<T> {
    pub fn edges() -> Self {
        Term {
            kind: TermKind::Edges,
            decay: None,
        }
    }

    pub fn isolates() -> Self {
        Term {
            kind: TermKind::Isolates,
            decay: None,
        }
    }

    pub fn gw_degree(decay: T) -> Self {
        Term {
            kind: TermKind::GwDegree,
            decay: Some(decay),
        }
    }

    pub fn gw_esp(decay: T) -> Self {
        Term {
            kind: TermKind::GwEsp,
            decay: Some(decay),
        }
    }

    pub fn gw_dsp(decay: T) -> Self {
        Term {
            kind: TermKind::GwDsp,
            decay: Some(decay),
        }
    }

    pub(crate) fn weights(&self) -> Option<GeoWeights<T>> {
        self.decay.map(GeoWeights::new)
    }
}

/// `w(i) = e^τ (1 - (1 - e^{-τ})^i)`. The increment `w(i+1) - w(i)` reduces
/// to `r^i` with `r = 1 - e^{-τ}`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct GeoWeights<T> {
    exp_tau: T,
    ratio: T,
}

impl<T: Real> GeoWeights<T> {
    pub(crate) fn new(tau: T) -> Self {
        GeoWeights {
            exp_tau: tau.exp(),
            ratio: T::one() - (-tau).exp(),
        }
    }

    #[inline]
    pub(crate) fn weight(&self, i: usize) -> T {
        if i == 0 {
            T::zero()
        } else {
            self.exp_tau * (T::one() - self.ratio.powi(i as i32))
        }
    }

    #[inline]
    pub(crate) fn increment(&self, i: usize) -> T {
        self.ratio.powi(i as i32)
    }
}

/// Ordered, duplicate-free list of terms.
#[derive(Clone, Debug, PartialEq)]
pub struct TermSet<T> {
    terms: Vec<Term<T>>,
}

impl<T: Real> TermSet<T> {
    pub fn new(terms: Vec<Term<T>>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::param("ERGM term set must not be empty"));
        }
        for (i, t) in terms.iter().enumerate() {
            if terms[..i].iter().any(|u| u.kind == t.kind) {
                return Err(Error::param(format!("duplicate ERGM term {}", t.kind)));
            }
            match (t.kind.is_geometric(), t.decay) {
                (true, Some(d)) if d > T::zero() && d.is_finite() => {}
                (true, _) => {
                    return Err(Error::param(format!("{} needs a positive decay", t.kind)))
                }
                (false, None) => {}
                (false, Some(_)) => return Err(Error::param(format!("{} takes no decay", t.kind))),
            }
        }
        Ok(TermSet { terms })
    }

    /// edges, isolates and the three geometrically weighted terms.
    pub fn standard(decay_degree: T, decay_esp: T, decay_dsp: T) -> Result<Self> {
        Self::new(vec![
            Term::edges(),
            Term::isolates(),
            Term::gw_degree(decay_degree),
            Term::gw_esp(decay_esp),
            Term::gw_dsp(decay_dsp),
        ])
    }

    pub fn edges_only() -> Self {
        TermSet {
            terms: vec![Term::edges()],
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[Term<T>] {
        &self.terms
    }

    pub fn position(&self, kind: TermKind) -> Option<usize> {
        self.terms.iter().position(|t| t.kind == kind)
    }
}
