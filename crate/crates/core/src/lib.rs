//! Link-predicted influence maximization.
//!
//! A partially observed graph is completed with edges predicted by an
//! exponential random graph model, after which seed-selection methods and
//! independent-cascade diffusion are run on the original, completed and
//! randomly completed graphs to measure how much the completion helps.

pub mod diffusion;
pub mod ergm;
pub mod error;
pub mod eval;
pub mod graph;
pub mod linkpred;
pub mod num;
pub mod rng;
pub mod seeds;

pub use error::{Error, Result};
pub use graph::{Dyad, EdgeSet, Graph, NodeId};
pub use num::Real;
pub use rng::Seed;

/// Double-precision instantiations of the generic types.
pub type GraphStats = graph::GraphStats<f64>;
pub type CentralityScores = seeds::CentralityScores<f64>;
pub type ErgmTermSet = ergm::TermSet<f64>;
pub type ErgmModel = ergm::ErgmModel<f64>;
pub type StatVector = ergm::StatVector<f64>;
pub type EdgeProbabilityMap = linkpred::EdgeProbabilityMap<f64>;
pub type ReportRow = eval::ReportRow<f64>;
