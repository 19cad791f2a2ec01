//! Operator-theoretic primitives on top of the Hermitian eigensolver: PSD
//! square roots, the modulus |T|, Moore-Penrose pseudoinverses, range and
//! null-space projections, polar decompositions, and a dense linear solve.
//!
//! Rank decisions all go through the same rule: an eigenvalue of `T*T` counts
//! as zero iff it is at most `rank_eps` times the largest one.

use num_complex::Complex64;

use crate::eig::herm_eig;
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::tolerance::Tolerance;

/// Polar factorization `T = U |T|` where `U` is the partial isometry with
/// `U*U` the projection onto the closure of `R(T*)` and `U U*` the projection
/// onto the closure of `R(T)`.
#[derive(Debug, Clone)]
pub struct PolarDecomposition {
    pub isometry_part: ComplexMatrix,
    pub modulus: ComplexMatrix,
}

/// PSD square root.
///
/// The whole near-zero eigenvalue cluster `|lambda| <= rank_eps * ||H||` is
/// flushed to zero before the square root: the square root has infinite
/// slope at zero, so roundoff-sized eigenvalues would otherwise be amplified
/// from `eps` to `sqrt(eps)`. Eigenvalues below the negative clamp are an
/// error.
pub fn psd_sqrt(h: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    let eig = herm_eig(h, tol)?;
    let radius = eig.spectral_radius();
    let clamp = tol.rank_cutoff(radius);
    if let Some(&min) = eig
        .eigenvalues()
        .iter()
        .find(|&&l| l < -clamp && l < 0.0)
    {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
            bound: clamp,
        });
    }
    Ok(eig
        .apply(|l| if l > clamp { l.sqrt() } else { 0.0 })
        .hermitized())
}

/// `|T| = (T*T)^{1/2}`.
pub fn operator_abs(t: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    let gram = &t.adjoint() * t;
    psd_sqrt(&gram.hermitized(), tol)
}

/// Moore-Penrose pseudoinverse via the eigendecomposition of `T*T`.
pub fn moore_penrose(t: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    let gram = (&t.adjoint() * t).hermitized();
    let eig = herm_eig(&gram, tol)?;
    let cutoff = tol.rank_cutoff(eig.spectral_radius());
    let inv_gram = eig.apply(|l| if l > cutoff { 1.0 / l } else { 0.0 });
    Ok(&inv_gram * &t.adjoint())
}

/// Orthogonal projection onto the column space of `T`.
pub fn range_projection(t: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    range_projection_floored(t, tol, 0.0)
}

/// `range_projection` with an ambient singular-value floor.
///
/// Derived operators such as `P(I-Q)` can be mathematically zero yet come
/// out as roundoff noise after basis rotations; a purely relative cutoff
/// would then promote the noise to a genuine range. `sigma_floor` is the
/// scale of the computation that produced `T` (for pair operators,
/// `max(1, ||Q||)`), and eigenvalues of `T T*` are measured against
/// `rank_eps * max(lambda_max, sigma_floor^2)`.
pub fn range_projection_floored(
    t: &ComplexMatrix,
    tol: &Tolerance,
    sigma_floor: f64,
) -> Result<ComplexMatrix> {
    let gram = (t * &t.adjoint()).hermitized();
    let eig = herm_eig(&gram, tol)?;
    let cutoff = tol.rank_cutoff(eig.spectral_radius().max(sigma_floor * sigma_floor));
    Ok(eig
        .apply(|l| if l > cutoff { 1.0 } else { 0.0 })
        .hermitized())
}

/// Orthogonal projection onto the null space of `T`, i.e. `I - P_{R(T*)}`.
pub fn null_projection(t: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    null_projection_floored(t, tol, 0.0)
}

/// `null_projection` with an ambient singular-value floor; see
/// [`range_projection_floored`].
pub fn null_projection_floored(
    t: &ComplexMatrix,
    tol: &Tolerance,
    sigma_floor: f64,
) -> Result<ComplexMatrix> {
    let onto_row_space = range_projection_floored(&t.adjoint(), tol, sigma_floor)?;
    Ok(&ComplexMatrix::identity(t.cols()) - &onto_row_space)
}

/// Orthonormal columns spanning the column space of `T`.
pub fn range_basis(t: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    range_basis_floored(t, tol, 0.0)
}

/// `range_basis` with an ambient singular-value floor; see
/// [`range_projection_floored`].
pub fn range_basis_floored(
    t: &ComplexMatrix,
    tol: &Tolerance,
    sigma_floor: f64,
) -> Result<ComplexMatrix> {
    let gram = (t * &t.adjoint()).hermitized();
    let eig = herm_eig(&gram, tol)?;
    let cutoff = tol.rank_cutoff(eig.spectral_radius().max(sigma_floor * sigma_floor));
    let selected: Vec<usize> = (0..t.rows())
        .filter(|&i| eig.eigenvalues()[i] > cutoff)
        .collect();
    let v = eig.eigenvectors();
    Ok(ComplexMatrix::from_fn(t.rows(), selected.len(), |r, c| {
        v.at(r, selected[c])
    }))
}

/// Number of eigenvalues of `T*T` above the rank cutoff.
pub fn rank(t: &ComplexMatrix, tol: &Tolerance) -> Result<usize> {
    rank_floored(t, tol, 0.0)
}

/// `rank` with an ambient singular-value floor; see
/// [`range_projection_floored`].
pub fn rank_floored(t: &ComplexMatrix, tol: &Tolerance, sigma_floor: f64) -> Result<usize> {
    let gram = (&t.adjoint() * t).hermitized();
    let eig = herm_eig(&gram, tol)?;
    let cutoff = tol.rank_cutoff(eig.spectral_radius().max(sigma_floor * sigma_floor));
    Ok(eig.eigenvalues().iter().filter(|&&l| l > cutoff).count())
}

/// Polar decomposition `T = U |T|`.
///
/// `U` is assembled columnwise from the eigenvectors `v` of `T*T` with
/// nonzero eigenvalue: it sends `v` to `Tv / ||Tv||` and kills the null space
/// of `T`.
pub fn polar_decompose(t: &ComplexMatrix, tol: &Tolerance) -> Result<PolarDecomposition> {
    let gram = (&t.adjoint() * t).hermitized();
    let eig = herm_eig(&gram, tol)?;
    let cutoff = tol.rank_cutoff(eig.spectral_radius());
    let v = eig.eigenvectors();
    let tv = t * v;

    let (rows, n) = (t.rows(), t.cols());
    let mut u = ComplexMatrix::zeros(rows, n);
    for (i, &lambda) in eig.eigenvalues().iter().enumerate() {
        if lambda <= cutoff {
            continue;
        }
        let mut norm_sqr = 0.0;
        for r in 0..rows {
            norm_sqr += tv.at(r, i).norm_sqr();
        }
        let inv = 1.0 / norm_sqr.sqrt();
        // u += (T v_i / ||T v_i||) v_i*
        for r in 0..rows {
            let ui = tv.at(r, i) * inv;
            for c in 0..n {
                u[(r, c)] += ui * v.at(c, i).conj();
            }
        }
    }

    let modulus = eig
        .apply(|l| if l > cutoff { l.sqrt() } else { 0.0 })
        .hermitized();
    Ok(PolarDecomposition {
        isometry_part: u,
        modulus,
    })
}

/// Solves `A X = B` by LU with partial pivoting. `A` must be square.
pub fn solve(a: &ComplexMatrix, rhs: &ComplexMatrix) -> Result<ComplexMatrix> {
    assert!(a.is_square(), "solve needs a square coefficient matrix");
    assert_eq!(a.rows(), rhs.rows(), "solve shape mismatch");
    let n = a.rows();
    if n == 0 {
        return Ok(ComplexMatrix::zeros(0, rhs.cols()));
    }

    let mut lu = a.clone();
    let mut x = rhs.clone();
    let scale = a.max_abs().max(1.0);

    for col in 0..n {
        let mut pivot_row = col;
        let mut pivot_mag = lu.at(col, col).norm();
        for r in (col + 1)..n {
            let mag = lu.at(r, col).norm();
            if mag > pivot_mag {
                pivot_mag = mag;
                pivot_row = r;
            }
        }
        if pivot_mag <= f64::EPSILON * scale {
            return Err(Error::Singular);
        }
        if pivot_row != col {
            for c in 0..n {
                let tmp = lu.at(col, c);
                lu[(col, c)] = lu.at(pivot_row, c);
                lu[(pivot_row, c)] = tmp;
            }
            for c in 0..x.cols() {
                let tmp = x.at(col, c);
                x[(col, c)] = x.at(pivot_row, c);
                x[(pivot_row, c)] = tmp;
            }
        }
        let pivot = lu.at(col, col);
        for r in (col + 1)..n {
            let factor = lu.at(r, col) / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in col..n {
                let val = lu.at(col, c);
                lu[(r, c)] -= factor * val;
            }
            for c in 0..x.cols() {
                let val = x.at(col, c);
                x[(r, c)] -= factor * val;
            }
        }
    }

    for col in (0..n).rev() {
        let pivot = lu.at(col, col);
        for c in 0..x.cols() {
            let mut acc = x.at(col, c);
            for k in (col + 1)..n {
                acc -= lu.at(col, k) * x.at(k, c);
            }
            x[(col, c)] = acc / pivot;
        }
    }
    Ok(x)
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    solve(a, &ComplexMatrix::identity(a.rows()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn m2(a: f64, b: f64, c: f64, d: f64) -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[a, b, c, d]).unwrap()
    }

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn psd_sqrt_examples() {
        let zero = ComplexMatrix::zeros(2, 2);
        assert_eq!(psd_sqrt(&zero, &tol()).unwrap(), zero);

        // The modulus block of the rank-one weighted construction at a = 2.
        let h = m2(6.0, 3.0 * SQRT2, 3.0 * SQRT2, 3.0);
        let s = psd_sqrt(&h, &tol()).unwrap();
        let expected = m2(2.0, SQRT2, SQRT2, 1.0);
        assert!(s.residual_from(&expected) < 1e-12);
        assert!((&s * &s).residual_from(&h) < 1e-12);

        // A projection is its own PSD square root.
        let p = m2(0.5, 0.5, 0.5, 0.5);
        assert!(psd_sqrt(&p, &tol()).unwrap().residual_from(&p) < 1e-12);
    }

    #[test]
    fn psd_sqrt_rejects_indefinite() {
        let h = m2(1.0, 0.0, 0.0, -1.0);
        assert!(matches!(psd_sqrt(&h, &tol()), Err(Error::NotPsd { .. })));
    }

    #[test]
    fn moore_penrose_examples() {
        let id = ComplexMatrix::identity(3);
        assert!(moore_penrose(&id, &tol()).unwrap().residual_from(&id) < 1e-13);

        let d = m2(2.0, 0.0, 0.0, 0.0);
        let want = m2(0.5, 0.0, 0.0, 0.0);
        assert!(moore_penrose(&d, &tol()).unwrap().residual_from(&want) < 1e-13);

        let t = m2(1.0, 1.0, 0.0, 0.0);
        let pinv = moore_penrose(&t, &tol()).unwrap();
        let want = m2(0.5, 0.0, 0.5, 0.0);
        assert!(pinv.residual_from(&want) < 1e-13);
        // The four Penrose identities.
        let tpt = &(&t * &pinv) * &t;
        assert!(tpt.residual_from(&t) < 1e-13);
        let ptp = &(&pinv * &t) * &pinv;
        assert!(ptp.residual_from(&pinv) < 1e-13);
        assert!((&t * &pinv).hermitian_defect() < 1e-13);
        assert!((&pinv * &t).hermitian_defect() < 1e-13);
    }

    #[test]
    fn range_and_null_projections() {
        let zero = ComplexMatrix::zeros(2, 2);
        assert_eq!(range_projection(&zero, &tol()).unwrap(), zero);
        assert!(null_projection(&zero, &tol())
            .unwrap()
            .residual_from(&ComplexMatrix::identity(2))
            < 1e-14);

        let t = m2(1.0, 1.0, 0.0, 0.0);
        let want = m2(1.0, 0.0, 0.0, 0.0);
        assert!(range_projection(&t, &tol()).unwrap().residual_from(&want) < 1e-13);

        // Column space of the a = 2 weighted idempotent: span{(sqrt2, 1)/sqrt3}.
        let q = m2(2.0, -SQRT2, SQRT2, -1.0);
        let want = m2(2.0 / 3.0, SQRT2 / 3.0, SQRT2 / 3.0, 1.0 / 3.0);
        assert!(range_projection(&q, &tol()).unwrap().residual_from(&want) < 1e-12);

        // Null space of [[1,1],[0,0]] is span{(1,-1)/sqrt2}.
        let np = null_projection(&t, &tol()).unwrap();
        let want = m2(0.5, -0.5, -0.5, 0.5);
        assert!(np.residual_from(&want) < 1e-13);
        assert!((&t * &np).fro_norm() < 1e-13);

        let id = ComplexMatrix::identity(2);
        assert!(null_projection(&id, &tol()).unwrap().fro_norm() < 1e-14);
    }

    #[test]
    fn operator_abs_examples() {
        let h = m2(0.5, 0.5, 0.5, 0.5);
        assert!(operator_abs(&h, &tol()).unwrap().residual_from(&h) < 1e-12);

        let rot = m2(0.0, -1.0, 1.0, 0.0);
        assert!(
            operator_abs(&rot, &tol())
                .unwrap()
                .residual_from(&ComplexMatrix::identity(2))
                < 1e-13
        );

        let q = m2(1.0, 1.0, 0.0, 0.0);
        let want = m2(1.0, 1.0, 1.0, 1.0).scale(1.0 / SQRT2);
        assert!(operator_abs(&q, &tol()).unwrap().residual_from(&want) < 1e-13);
    }

    #[test]
    fn polar_examples() {
        let p = m2(1.0, 0.0, 0.0, 0.0);
        let pd = polar_decompose(&p, &tol()).unwrap();
        assert!(pd.isometry_part.residual_from(&p) < 1e-13);
        assert!(pd.modulus.residual_from(&p) < 1e-13);

        let d = m2(-2.0, 0.0, 0.0, 0.0);
        let pd = polar_decompose(&d, &tol()).unwrap();
        assert!(pd.isometry_part.residual_from(&m2(-1.0, 0.0, 0.0, 0.0)) < 1e-13);
        assert!(pd.modulus.residual_from(&m2(2.0, 0.0, 0.0, 0.0)) < 1e-13);

        let q = m2(1.0, 1.0, 0.0, 0.0);
        let pd = polar_decompose(&q, &tol()).unwrap();
        let want_u = m2(1.0, 1.0, 0.0, 0.0).scale(1.0 / SQRT2);
        let want_abs = m2(1.0, 1.0, 1.0, 1.0).scale(1.0 / SQRT2);
        assert!(pd.isometry_part.residual_from(&want_u) < 1e-13);
        assert!(pd.modulus.residual_from(&want_abs) < 1e-13);
        // Contract: T = U|T|, U*U = P onto R(T*), UU* = P onto R(T).
        let recon = &pd.isometry_part * &pd.modulus;
        assert!(recon.residual_from(&q) < 1e-13);
        let uu = &pd.isometry_part.adjoint() * &pd.isometry_part;
        let want = range_projection(&q.adjoint(), &tol()).unwrap();
        assert!(uu.residual_from(&want) < 1e-12);
        let uut = &pd.isometry_part * &pd.isometry_part.adjoint();
        let want = range_projection(&q, &tol()).unwrap();
        assert!(uut.residual_from(&want) < 1e-12);
    }

    #[test]
    fn solve_and_inverse() {
        let a = m2(2.0, 1.0, 1.0, 3.0);
        let inv = inverse(&a).unwrap();
        assert!((&a * &inv).residual_from(&ComplexMatrix::identity(2)) < 1e-13);
        assert!(matches!(
            solve(&ComplexMatrix::zeros(2, 2), &ComplexMatrix::identity(2)),
            Err(Error::Singular)
        ));
        // 0x0 solve is legal.
        let empty = ComplexMatrix::zeros(0, 0);
        assert_eq!(solve(&empty, &empty).unwrap().shape(), (0, 0));
    }

    #[test]
    fn rank_uses_relative_cutoff() {
        let t = m2(1.0, 1.0, 0.0, 0.0);
        assert_eq!(rank(&t, &tol()).unwrap(), 1);
        assert_eq!(rank(&ComplexMatrix::zeros(2, 2), &tol()).unwrap(), 0);
        assert_eq!(rank(&ComplexMatrix::identity(2), &tol()).unwrap(), 2);
    }
}
