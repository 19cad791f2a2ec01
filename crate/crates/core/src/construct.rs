//! Constructors for quasi-projection pairs: the doubled-space block
//! construction from an admissible Hermitian generator, Krein-space weighted
//! projections, and seeded random families for fuzzing.
//!
//! Everything here is deterministic for a fixed seed, down to the bit
//! pattern: the generators draw from a ChaCha stream and the arithmetic has
//! no ordering ambiguity.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::eig::herm_eig;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::ops::inverse;
use crate::pair::{is_quasi_projection_pair, Idempotent, Projection, QppPair};
use crate::tolerance::Tolerance;

const RESAMPLE_ATTEMPTS: usize = 10_000;

/// Doubled-space pair built from a Hermitian `a` with `a^2 - a >= 0`:
///
/// ```text
/// P = [[I, 0], [0, 0]]     Q = [[a, -l], [l, I - a]]     l = (a^2 - a)^{1/2}
/// ```
///
/// optionally conjugated by a unitary on the doubled space.
#[derive(Debug, Clone)]
pub struct BlockPairSpec {
    pub a: ComplexMatrix,
    pub basis_rotation: Option<ComplexMatrix>,
}

pub fn build_block_pair(spec: &BlockPairSpec, tol: &Tolerance) -> Result<QppPair> {
    let a = &spec.a;
    let eig = herm_eig(a, tol)?;
    let margin = tol.rank_cutoff(eig.spectral_radius().max(1.0));
    for &lambda in eig.eigenvalues() {
        if lambda > margin && lambda < 1.0 - margin {
            return Err(Error::SpectrumViolation { eigenvalue: lambda });
        }
    }
    // l(a) evaluated in the eigenbasis of a. The gap l^2 - l is clamped to
    // zero near the branch points: the square root would amplify
    // eigenvalue roundoff at spectrum atoms 0 and 1 from eps to sqrt(eps).
    let gap_clamp = tol.rank_cutoff(eig.spectral_radius().max(1.0).powi(2));
    let ell = eig.apply(|l| {
        let gap = l * l - l;
        if gap > gap_clamp {
            gap.sqrt()
        } else {
            0.0
        }
    });

    let n = a.rows();
    let identity = ComplexMatrix::identity(n);
    let zero = ComplexMatrix::zeros(n, n);
    let mut p = ComplexMatrix::block2(&identity, &zero, &zero, &zero);
    let mut q = ComplexMatrix::block2(a, &ell.scale(-1.0), &ell, &(&identity - a));

    if let Some(w) = &spec.basis_rotation {
        let gram = &w.adjoint() * w;
        let residual = gram.residual_from(&ComplexMatrix::identity(w.rows()));
        if !w.is_square() || w.rows() != 2 * n || residual > tol.bound(w.fro_norm()) {
            return Err(Error::NotUnitary { residual });
        }
        p = &(w * &p) * &w.adjoint();
        q = &(w * &q) * &w.adjoint();
    }

    QppPair::build(Projection::new(p, tol)?, Idempotent::new(q, tol)?, tol)
}

/// A symmetry `J` (self-adjoint unitary) together with an idempotent to test
/// against the induced indefinite inner product.
#[derive(Debug, Clone)]
pub struct KreinSpec {
    pub j: ComplexMatrix,
    pub q: Idempotent,
}

/// Outcome of the Krein construction. `Q` is a weighted projection exactly
/// when `JQ` is self-adjoint, and that is equivalent to `(J_+, Q)` being a
/// quasi-projection pair (likewise for `J_- = I - J_+`); `pair` is populated
/// only in that case.
#[derive(Debug, Clone)]
pub struct KreinOutcome {
    pub j_plus: Projection,
    pub pair: Option<QppPair>,
    pub is_weighted_projection: bool,
    pub weighted_residual: f64,
    pub j_plus_passes: bool,
    pub j_minus_passes: bool,
}

impl KreinOutcome {
    /// True when the weighted-projection test and the two pair tests agree.
    pub fn equivalence_agrees(&self) -> bool {
        self.is_weighted_projection == self.j_plus_passes
            && self.j_plus_passes == self.j_minus_passes
    }
}

pub fn build_krein_pair(spec: &KreinSpec, tol: &Tolerance) -> Result<KreinOutcome> {
    let j = &spec.j;
    if !j.is_square() {
        return Err(Error::NotSquare {
            rows: j.rows(),
            cols: j.cols(),
        });
    }
    if j.rows() != spec.q.dim() {
        return Err(Error::DimensionMismatch {
            left: j.shape(),
            right: spec.q.matrix().shape(),
        });
    }
    let n = j.rows();
    let identity = ComplexMatrix::identity(n);
    let jn = j.fro_norm();
    let sym_residual = (&(j * j) - &identity)
        .fro_norm()
        .max(j.hermitian_defect());
    if sym_residual > tol.bound(jn * jn) {
        return Err(Error::NotSymmetry {
            residual: sym_residual,
        });
    }

    let j_plus = Projection::new((&identity + j).scale(0.5), tol)?;
    let j_minus = j_plus.complement();

    let qm = spec.q.matrix();
    let jq = j * qm;
    let weighted_residual = jq.hermitian_defect();
    let qn = qm.fro_norm();
    let is_weighted = weighted_residual <= tol.bound(jn * qn);

    let j_plus_passes = is_quasi_projection_pair(&j_plus, &spec.q, tol)?.all_passed();
    let j_minus_passes = is_quasi_projection_pair(&j_minus, &spec.q, tol)?.all_passed();

    let pair = if j_plus_passes {
        Some(QppPair::build(j_plus.clone(), spec.q.clone(), tol)?)
    } else {
        None
    };

    Ok(KreinOutcome {
        j_plus,
        pair,
        is_weighted_projection: is_weighted,
        weighted_residual,
        j_plus_passes,
        j_minus_passes,
    })
}

/// Standard complex Gaussian matrix.
pub fn random_matrix<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Gaussian Hermitian matrix.
pub fn random_hermitian<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
    random_matrix(n, n, rng).hermitized()
}

/// Haar-ish random unitary: orthonormalization of a complex Gaussian matrix
/// by modified Gram-Schmidt.
pub fn random_unitary<R: Rng>(n: usize, rng: &mut R) -> ComplexMatrix {
    loop {
        let g = random_matrix(n, n, rng);
        if let Some(u) = gram_schmidt(&g) {
            return u;
        }
        // Rank-deficient draw; probability zero in exact arithmetic.
    }
}

fn gram_schmidt(g: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = g.rows();
    let mut q = g.clone();
    for c in 0..n {
        for prev in 0..c {
            let mut dot = Complex64::new(0.0, 0.0);
            for r in 0..n {
                dot += q.at(r, prev).conj() * q.at(r, c);
            }
            for r in 0..n {
                let correction = dot * q.at(r, prev);
                q[(r, c)] -= correction;
            }
        }
        let norm = (0..n).map(|r| q.at(r, c).norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            return None;
        }
        for r in 0..n {
            q[(r, c)] /= norm;
        }
    }
    Some(q)
}

/// Seeded random idempotent of exact rank `k`: `S diag(I_k, 0) S^{-1}` with
/// `S` resampled until its 2-norm condition estimate is at most `cond_cap`.
pub fn random_idempotent(n: usize, k: usize, seed: u64, cond_cap: f64) -> Result<Idempotent> {
    if k > n {
        return Err(Error::RankOutOfRange { rank: k, dim: n });
    }
    if k == 0 {
        return Ok(Idempotent::from_validated(ComplexMatrix::zeros(n, n)));
    }
    if k == n {
        return Ok(Idempotent::from_validated(ComplexMatrix::identity(n)));
    }

    let tol = Tolerance::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..RESAMPLE_ATTEMPTS {
        let s = random_matrix(n, n, &mut rng);
        let gram = (&s.adjoint() * &s).hermitized();
        let eig = herm_eig(&gram, &tol)?;
        let min = eig.eigenvalues().first().copied().unwrap_or(0.0);
        let max = eig.eigenvalues().last().copied().unwrap_or(0.0);
        if min <= 0.0 {
            continue;
        }
        let cond = (max / min).sqrt();
        if cond > cond_cap {
            continue;
        }
        let s_inv = inverse(&s)?;
        let mut scaled = s.clone();
        for c in k..n {
            for r in 0..n {
                scaled[(r, c)] = Complex64::new(0.0, 0.0);
            }
        }
        let q = &scaled * &s_inv;
        return Idempotent::new(q, &tol);
    }
    Err(Error::ConditionCap {
        attempts: RESAMPLE_ATTEMPTS,
    })
}

fn sample_admissible_eigenvalue<R: Rng>(rng: &mut R) -> f64 {
    let pick: f64 = rng.random();
    if pick < 0.15 {
        return 0.0;
    }
    if pick < 0.30 {
        return 1.0;
    }
    // Uniform over [-4, -0.05] ∪ [1.05, 4]; the 0.05 margin keeps the open
    // interval (0, 1) clear of roundoff.
    let lower = 3.95;
    let upper = 2.95;
    let side: f64 = rng.random();
    let offset: f64 = rng.random();
    if side < lower / (lower + upper) {
        -4.0 + offset * lower
    } else {
        1.05 + offset * upper
    }
}

/// Seeded random quasi-projection pair of dimension `2 * ceil(n / 2)`.
///
/// A Hermitian generator of size `ceil(n / 2)` is drawn with spectrum in
/// `[-4, 0] ∪ [1, 4]` (atoms at 0 and 1 included so the intersection
/// submodules are exercised), fed through the block construction, and
/// conjugated by a random unitary of the doubled space.
pub fn random_qpp(n: usize, seed: u64, tol: &Tolerance) -> QppPair {
    let half = n.div_ceil(2).max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let eigenvalues: Vec<f64> = (0..half)
        .map(|_| sample_admissible_eigenvalue(&mut rng))
        .collect();
    let v = random_unitary(half, &mut rng);
    let mut scaled = v.clone();
    for c in 0..half {
        for r in 0..half {
            scaled[(r, c)] = v.at(r, c) * eigenvalues[c];
        }
    }
    let a = (&scaled * &v.adjoint()).hermitized();
    let w = random_unitary(2 * half, &mut rng);
    let spec = BlockPairSpec {
        a,
        basis_rotation: Some(w),
    };
    build_block_pair(&spec, tol).expect("block construction always yields a valid pair")
}

/// Newton iteration `X <- 3X^2 - 2X^3`, which contracts onto the idempotent
/// manifold when the spectrum starts near {0, 1}.
pub fn newton_idempotent(m: &ComplexMatrix, max_iter: usize) -> ComplexMatrix {
    let mut x = m.clone();
    for _ in 0..max_iter {
        let norm = x.fro_norm();
        let defect = (&(&x * &x) - &x).fro_norm();
        if defect <= 1e-14 * (norm * norm).max(1.0) {
            break;
        }
        let x2 = &x * &x;
        let x3 = &x2 * &x;
        x = &x2.scale(3.0) - &x3.scale(2.0);
    }
    x
}

/// Near-miss negative for tolerance stress tests: perturbs `Q` by `eps * G`
/// and re-idempotentizes, producing a genuine idempotent that generally no
/// longer pairs with the original projection.
pub fn perturb_idempotent(
    q: &Idempotent,
    eps: f64,
    seed: u64,
    tol: &Tolerance,
) -> Result<Idempotent> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = random_matrix(q.dim(), q.dim(), &mut rng).scale(eps);
    let perturbed = q.matrix() + &noise;
    Idempotent::new(newton_idempotent(&perturbed, 50), tol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn block_pair_scalar_zero_commutes() {
        let spec = BlockPairSpec {
            a: ComplexMatrix::from_real(1, 1, &[0.0]).unwrap(),
            basis_rotation: None,
        };
        let pair = build_block_pair(&spec, &tol()).unwrap();
        let want = ComplexMatrix::from_real(2, 2, &[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(pair.q().matrix().residual_from(&want) < 1e-14);
        assert!(pair.t3().fro_norm() < 1e-14);
    }

    #[test]
    fn block_pair_scalar_two() {
        let spec = BlockPairSpec {
            a: ComplexMatrix::from_real(1, 1, &[2.0]).unwrap(),
            basis_rotation: None,
        };
        let pair = build_block_pair(&spec, &tol()).unwrap();
        let want = ComplexMatrix::from_real(2, 2, &[2.0, -SQRT2, SQRT2, -1.0]).unwrap();
        assert!(pair.q().matrix().residual_from(&want) < 1e-12);
    }

    #[test]
    fn block_pair_diagonal_generator() {
        let a = ComplexMatrix::from_real(2, 2, &[2.0, 0.0, 0.0, -1.0]).unwrap();
        let spec = BlockPairSpec {
            a: a.clone(),
            basis_rotation: None,
        };
        let pair = build_block_pair(&spec, &tol()).unwrap();
        assert_eq!(pair.dim(), 4);
        let report = is_quasi_projection_pair(pair.p(), pair.q(), &tol()).unwrap();
        assert!(report.all_passed());

        // In the unrotated basis the corner operators are the off-diagonal
        // blocks built from l(a).
        let ell = crate::ops::psd_sqrt(&(&(&a * &a) - &a), &tol()).unwrap();
        let zero = ComplexMatrix::zeros(2, 2);
        let want_t3 = ComplexMatrix::block2(&zero, &ell.scale(-1.0), &zero, &zero);
        assert!(pair.t3().residual_from(&want_t3) < 1e-12);
        let want_t4 = ComplexMatrix::block2(&zero, &zero, &ell, &zero);
        assert!(pair.t4().residual_from(&want_t4) < 1e-12);
    }

    #[test]
    fn block_pair_rejects_forbidden_spectrum() {
        let spec = BlockPairSpec {
            a: ComplexMatrix::from_real(1, 1, &[0.5]).unwrap(),
            basis_rotation: None,
        };
        assert!(matches!(
            build_block_pair(&spec, &tol()),
            Err(Error::SpectrumViolation { .. })
        ));
    }

    #[test]
    fn krein_identity_symmetry() {
        let q = Projection::new(
            ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]).unwrap(),
            &tol(),
        )
        .unwrap();
        let spec = KreinSpec {
            j: ComplexMatrix::identity(2),
            q: q.as_idempotent(),
        };
        let outcome = build_krein_pair(&spec, &tol()).unwrap();
        assert!(outcome.is_weighted_projection);
        assert!(outcome.j_plus_passes && outcome.j_minus_passes);
        assert!(outcome.equivalence_agrees());
    }

    #[test]
    fn krein_oblique_idempotent_fails_both_ways() {
        let j = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        let q = Idempotent::new(
            ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 0.0]).unwrap(),
            &tol(),
        )
        .unwrap();
        let outcome = build_krein_pair(&KreinSpec { j, q }, &tol()).unwrap();
        assert!(!outcome.is_weighted_projection);
        assert!(!outcome.j_plus_passes);
        assert!(outcome.pair.is_none());
        assert!(outcome.equivalence_agrees());
    }

    #[test]
    fn krein_weighted_idempotent_passes_both_ways() {
        let j = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).unwrap();
        let q = Idempotent::new(
            ComplexMatrix::from_real(2, 2, &[2.0, -SQRT2, SQRT2, -1.0]).unwrap(),
            &tol(),
        )
        .unwrap();
        let outcome = build_krein_pair(&KreinSpec { j, q }, &tol()).unwrap();
        assert!(outcome.is_weighted_projection);
        assert!(outcome.j_plus_passes && outcome.j_minus_passes);
        assert!(outcome.pair.is_some());
    }

    #[test]
    fn krein_rejects_non_symmetry() {
        let j = ComplexMatrix::from_real(2, 2, &[1.0, 1.0, 0.0, 1.0]).unwrap();
        let q = Idempotent::new(ComplexMatrix::identity(2), &tol()).unwrap();
        assert!(matches!(
            build_krein_pair(&KreinSpec { j, q }, &tol()),
            Err(Error::NotSymmetry { .. })
        ));
    }

    #[test]
    fn random_idempotent_ranks() {
        assert!(random_idempotent(3, 0, 1, 50.0)
            .unwrap()
            .matrix()
            .fro_norm()
            .abs()
            < 1e-15);
        assert_eq!(
            random_idempotent(3, 3, 1, 50.0).unwrap().matrix(),
            &ComplexMatrix::identity(3)
        );
        let q = random_idempotent(4, 2, 1, 50.0).unwrap();
        let qm = q.matrix();
        assert!((&(qm * qm) - qm).fro_norm() < 1e-10);
        let again = random_idempotent(4, 2, 1, 50.0).unwrap();
        assert_eq!(qm.data(), again.matrix().data());
        assert!(matches!(
            random_idempotent(2, 3, 1, 50.0),
            Err(Error::RankOutOfRange { .. })
        ));
    }

    #[test]
    fn random_qpp_is_valid_and_deterministic() {
        let pair = random_qpp(2, 0, &tol());
        assert_eq!(pair.dim(), 2);
        let again = random_qpp(2, 0, &tol());
        assert_eq!(pair.q().matrix().data(), again.q().matrix().data());
        assert_eq!(pair.p().matrix().data(), again.p().matrix().data());

        let pair = random_qpp(8, 42, &tol());
        assert_eq!(pair.dim(), 8);
        let report = pair.verify_structure_identities(&tol()).unwrap();
        assert!(report.all_passed(), "failed: {:?}", report.failed_names());

        // Odd requests round up to the next even dimension.
        assert_eq!(random_qpp(5, 7, &tol()).dim(), 6);
    }

    #[test]
    fn perturbation_produces_idempotent_non_pair() {
        let pair = random_qpp(6, 3, &tol());
        let bad = perturb_idempotent(pair.q(), 1e-3, 99, &tol()).unwrap();
        let report = is_quasi_projection_pair(pair.p(), &bad, &tol()).unwrap();
        assert!(!report.all_passed());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = random_unitary(5, &mut rng);
        let gram = &u.adjoint() * &u;
        assert!(gram.residual_from(&ComplexMatrix::identity(5)) < 1e-12);
    }
}
