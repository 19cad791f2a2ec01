use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Residual and rank-cutoff policy used by every verification routine.
///
/// `abs_eps` bounds identity residuals (scaled by the size of the operands,
/// see [`Tolerance::bound`]). `rank_eps` is the relative cutoff deciding when
/// an eigenvalue of `T*T` counts as zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    pub abs_eps: f64,
    pub rank_eps: f64,
}

impl Tolerance {
    pub const DEFAULT_ABS_EPS: f64 = 1e-8;
    pub const DEFAULT_RANK_EPS: f64 = 1e-10;

    pub fn new(abs_eps: f64, rank_eps: f64) -> Result<Self> {
        if !(abs_eps.is_finite() && rank_eps.is_finite() && abs_eps >= 0.0 && rank_eps >= 0.0) {
            return Err(Error::BadTolerance);
        }
        Ok(Self { abs_eps, rank_eps })
    }

    /// Residual bound for an identity whose operands have the given scale:
    /// `abs_eps * max(1, scale)`.
    pub fn bound(&self, scale: f64) -> f64 {
        self.abs_eps * scale.max(1.0)
    }

    /// Eigenvalues of `T*T` at or below this threshold count as zero.
    pub fn rank_cutoff(&self, lambda_max: f64) -> f64 {
        self.rank_eps * lambda_max
    }
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_eps: Self::DEFAULT_ABS_EPS,
            rank_eps: Self::DEFAULT_RANK_EPS,
        }
    }
}
