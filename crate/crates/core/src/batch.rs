//! Seeded verification campaigns over random pairs.
//!
//! Each trial draws one random pair from a per-trial seed, runs the full
//! identity battery on it, and returns a report. Trials are independent, so
//! with the `parallel` feature (on by default) the campaign fans out over a
//! rayon pool; results always come back ordered by trial index and are
//! identical to the sequential path.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::construct::random_qpp;
use crate::error::Result;
use crate::matched::{abs_pinv_via_projections, matched_projection, verify_matched_properties};
use crate::ops::{moore_penrose, rank_floored};
use crate::pair::is_quasi_projection_pair;
use crate::report::VerificationReport;
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, Copy)]
pub struct FuzzConfig {
    pub n_max: usize,
    pub trials: usize,
    pub seed: u64,
    pub tol: Tolerance,
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub index: usize,
    pub dim: usize,
    pub seed: u64,
    pub report: VerificationReport,
}

impl TrialOutcome {
    pub fn passed(&self) -> bool {
        self.report.all_passed()
    }
}

/// SplitMix64 finalizer; decorrelates per-trial seeds from the master seed.
pub fn trial_seed(master: u64, index: usize) -> u64 {
    let mut z = master ^ (index as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs the full battery on one seeded random pair: the five pair conditions,
/// the structural identities, both decomposition suites, the range-sum
/// identity, the compression onto the difference range with rank
/// preservation, the eight sibling pairs, and the matched-projection
/// properties of the idempotent.
pub fn run_trial(cfg: &FuzzConfig, index: usize) -> Result<TrialOutcome> {
    let seed = trial_seed(cfg.seed, index);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(1..=cfg.n_max.max(1));
    let tol = cfg.tol;

    let pair = random_qpp(n, seed, &tol);
    let mut report = VerificationReport::new();

    report.absorb("pair", is_quasi_projection_pair(pair.p(), pair.q(), &tol)?);
    report.absorb("structure", pair.verify_structure_identities(&tol)?);
    report.absorb("semiharmony", pair.verify_semiharmony_decompositions(&tol)?);
    report.absorb("harmony", pair.verify_harmony_decompositions(&tol)?);
    let one = Complex64::new(1.0, 0.0);
    report.absorb("range_sum", pair.range_sum_check(one, one, &tol)?);

    let restricted = pair.restrict_to_difference_range(&tol)?;
    report.absorb(
        "restriction",
        is_quasi_projection_pair(restricted.p(), restricted.q(), &tol)?,
    );
    let rank_bound = 0.5;
    let floor = pair.ambient_scale();
    let restricted_floor = restricted.ambient_scale();
    let t3_drift = rank_floored(pair.t3(), &tol, floor)?
        .abs_diff(rank_floored(restricted.t3(), &tol, restricted_floor)?);
    report.push("restriction/t3_rank_preserved", t3_drift as f64, rank_bound);
    let t4_drift = rank_floored(pair.t4(), &tol, floor)?
        .abs_diff(rank_floored(restricted.t4(), &tol, restricted_floor)?);
    report.push("restriction/t4_rank_preserved", t4_drift as f64, rank_bound);

    for (i, (a, b)) in pair.sigma_family().into_iter().enumerate() {
        let member = is_quasi_projection_pair(&a, &b, &tol)?;
        report.push(
            format!("sigma/{i}"),
            member.max_residual(),
            member
                .records()
                .iter()
                .map(|r| r.bound)
                .fold(0.0, f64::max),
        );
    }

    let matched = matched_projection(pair.q(), &tol)?;
    report.absorb("matched", matched.report);
    report.absorb("matched_props", verify_matched_properties(pair.q(), &tol)?);
    let dual = abs_pinv_via_projections(pair.q(), &tol)?;
    let qn = pair.q().matrix().fro_norm();
    report.push(
        "matched/abs_pinv_dual_route",
        dual.residual_from(&moore_penrose(&matched.abs_q_star, &tol)?),
        tol.bound(qn * qn),
    );

    Ok(TrialOutcome {
        index,
        dim: pair.dim(),
        seed,
        report,
    })
}

/// Sequential runner over an explicit index window; always available and
/// bit-identical to the parallel path.
pub fn run_range_seq(cfg: &FuzzConfig, range: std::ops::Range<usize>) -> Result<Vec<TrialOutcome>> {
    range.map(|i| run_trial(cfg, i)).collect()
}

/// Rayon-parallel runner over an explicit index window, ordered by index.
#[cfg(feature = "parallel")]
pub fn run_range_par(cfg: &FuzzConfig, range: std::ops::Range<usize>) -> Result<Vec<TrialOutcome>> {
    range.into_par_iter().map(|i| run_trial(cfg, i)).collect()
}

/// Window runner: parallel when the `parallel` feature is enabled,
/// sequential otherwise. Trial seeds depend only on the master seed and the
/// trial index, so splitting a campaign into windows changes nothing.
pub fn run_range(cfg: &FuzzConfig, range: std::ops::Range<usize>) -> Result<Vec<TrialOutcome>> {
    #[cfg(feature = "parallel")]
    {
        run_range_par(cfg, range)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_range_seq(cfg, range)
    }
}

/// Sequential campaign over trials `0..cfg.trials`.
pub fn run_campaign_seq(cfg: &FuzzConfig) -> Result<Vec<TrialOutcome>> {
    run_range_seq(cfg, 0..cfg.trials)
}

/// Rayon-parallel campaign over trials `0..cfg.trials`.
#[cfg(feature = "parallel")]
pub fn run_campaign_par(cfg: &FuzzConfig) -> Result<Vec<TrialOutcome>> {
    run_range_par(cfg, 0..cfg.trials)
}

/// Campaign entry point: parallel when the `parallel` feature is enabled,
/// sequential otherwise.
pub fn run_campaign(cfg: &FuzzConfig) -> Result<Vec<TrialOutcome>> {
    run_range(cfg, 0..cfg.trials)
}
