//! Community detection by L0-penalized normalized graph Laplacian.
//!
//! Communities are extracted one at a time: for each penalty on a small
//! grid, an alternating hard-thresholded power iteration on
//! `Q = D^{-1/2} A D^{-1/2}` produces a candidate node set, the candidate
//! with the best within/between density share is kept, its nodes are
//! removed, and the process repeats on what is left. Small communities are
//! then tested against fixed-edge-count random graphs and dropped when they
//! look like chance.
//!
//! The numeric kernels are generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`.

// `!(x > 0.0)` is used on purpose so that NaN parameters are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criteria;
pub mod error;
pub mod extractor;
pub mod graph;
pub mod io;
pub mod laplacian;
pub mod metrics;
pub mod models;
pub mod scalar;
pub mod solver;
pub mod tail;

pub use criteria::{membership_vector, phi, psi};
pub use error::{Error, Result};
pub use extractor::{
    detect, extract_all, permutation_filter, tune_eta, Community, DetectionConfig, DetectionResult,
    NodeStatus,
};
pub use graph::{set_stats, Graph, LoadReport, NodeSet};
pub use laplacian::laplacian_apply;
pub use metrics::{benchmark_summary, nmi, overlap_matrix, BenchmarkSummary, NmiVariant};
pub use models::{build_connection_matrix, fixed_size_sample, sample, DcsbmParams, ThetaDist};
pub use scalar::Scalar;
pub use solver::{hard_threshold, l0lap_iterate, two_phase_solve};
pub use tail::binom_tail;

pub type MembershipVector = criteria::MembershipVector<f64>;
pub type MembershipVector32 = criteria::MembershipVector<f32>;
pub type SolverConfig = solver::SolverConfig<f64>;
pub type SolverConfig32 = solver::SolverConfig<f32>;
pub type SolverOutcome = solver::SolverOutcome<f64>;
pub type SolverOutcome32 = solver::SolverOutcome<f32>;
pub type TunedCandidate = extractor::TunedCandidate<f64>;
