//! Numerical toolkit for quasi-projection pairs.
//!
//! A quasi-projection pair couples an orthogonal projection `P` with an
//! idempotent `Q` through `Q* = (2P - I) Q (2P - I)`. This crate implements
//! the finite-dimensional theory end to end:
//!
//! * [`matrix`], [`eig`], [`ops`] — dense complex matrices, a Jacobi
//!   Hermitian eigensolver, and the operator primitives built on it (PSD
//!   square roots, pseudoinverses, range/null projections, polar
//!   decompositions);
//! * [`pair`] — validation of pairs, the corner operators `T1..T4`, the six
//!   submodule projections, and verification of the structural identities,
//!   decomposition formulas, range sums, compressions, and the sigma family;
//! * [`matched`] — the matched projection `m(Q)` from its closed formula,
//!   with its symmetry, complement, and range identities;
//! * [`construct`] — block-construction, Krein-space, and seeded random
//!   generators;
//! * [`grid`] — the commutative model on unions of closed intervals, where
//!   complementarity questions become clopen-zero-set checks on a grid;
//! * [`batch`] — seeded verification campaigns, parallel with the `parallel`
//!   feature (default) and sequential otherwise.

pub mod batch;
pub mod construct;
pub mod eig;
pub mod error;
pub mod grid;
pub mod matched;
pub mod matrix;
pub mod ops;
pub mod pair;
pub mod report;
pub mod tolerance;

pub use num_complex::Complex64;

pub use batch::{run_campaign, run_campaign_seq, run_trial, FuzzConfig, TrialOutcome};
pub use construct::{
    build_block_pair, build_krein_pair, perturb_idempotent, random_idempotent, random_qpp,
    BlockPairSpec, KreinOutcome, KreinSpec,
};
pub use eig::{herm_eig, HermEigDecomposition};
pub use error::{Error, Result};
pub use grid::{
    complementarity_criterion, ideal_distance, pair_criteria, restricted_harmony_check,
    scalar_polar_exists, zero_set, CriterionResult, FunctionSpec, GridDocument, GridFunction,
    IntervalDomain,
};
pub use matched::{
    abs_pinv_via_projections, matched_projection, verify_matched_properties, MatchedResult,
};
pub use matrix::ComplexMatrix;
pub use ops::{
    moore_penrose, null_projection, operator_abs, polar_decompose, psd_sqrt, range_projection,
    rank, PolarDecomposition,
};
pub use pair::{
    is_idempotent, is_quasi_projection_pair, Idempotent, PairDocument, Projection, QppPair,
};
pub use report::{IdentityCheck, VerificationReport};
pub use tolerance::Tolerance;
