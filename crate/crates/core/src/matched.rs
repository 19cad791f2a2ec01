//! The matched projection of an idempotent.
//!
//! For any idempotent `Q` there is a distinguished projection
//!
//! ```text
//! m(Q) = 1/2 (|Q*| + Q*) |Q*|^+ (|Q*| + I)^{-1} (|Q*| + Q)
//! ```
//!
//! (`|Q*|^+` the Moore-Penrose inverse) that forms a quasi-projection pair
//! with `Q`. This module evaluates the formula, the independent route to
//! `|Q*|^+` through range projections, and the symmetry, complement, and
//! range identities `m(Q)` satisfies.

use crate::error::Result;
use crate::matrix::ComplexMatrix;
use crate::ops::{inverse, moore_penrose, operator_abs, psd_sqrt, range_projection_floored};
use crate::pair::{is_quasi_projection_pair, Idempotent, Projection};
use crate::report::VerificationReport;
use crate::tolerance::Tolerance;

/// The matched projection together with the intermediates of the formula and
/// a report certifying that the result is a projection pairing with `Q`.
#[derive(Debug, Clone)]
pub struct MatchedResult {
    pub m: Projection,
    pub abs_q_star: ComplexMatrix,
    pub abs_pinv: ComplexMatrix,
    pub report: VerificationReport,
}

/// Raw evaluation of the matched-projection formula.
///
/// `(|Q*| + I)^{-1}` is obtained by a direct solve; the spectrum of
/// `|Q*| + I` sits in `[1, 1 + ||Q||]`, so the system is well conditioned.
pub fn matched_projection_matrix(q: &ComplexMatrix, tol: &Tolerance) -> Result<ComplexMatrix> {
    let qs = q.adjoint();
    let abs_qs = operator_abs(&qs, tol)?;
    let pinv = moore_penrose(&abs_qs, tol)?;
    let shifted = &abs_qs + &ComplexMatrix::identity(q.rows());
    let shifted_inv = inverse(&shifted)?;
    let left = &(&abs_qs + &qs) * &pinv;
    let right = &shifted_inv * &(&abs_qs + q);
    Ok((&left * &right).scale(0.5))
}

/// Computes `m(Q)`, validates it as a projection, and certifies the pair
/// `(m(Q), Q)`.
pub fn matched_projection(q: &Idempotent, tol: &Tolerance) -> Result<MatchedResult> {
    let qm = q.matrix();
    let qs = qm.adjoint();
    let abs_q_star = operator_abs(&qs, tol)?;
    let abs_pinv = moore_penrose(&abs_q_star, tol)?;
    let m_matrix = matched_projection_matrix(qm, tol)?;

    let qn = qm.fro_norm();
    let bound = tol.bound(qn * qn);
    let mut report = VerificationReport::new();
    report.push(
        "m_idempotent",
        (&(&m_matrix * &m_matrix) - &m_matrix).fro_norm(),
        bound,
    );
    report.push("m_selfadjoint", m_matrix.hermitian_defect(), bound);

    let m = Projection::new(m_matrix, tol)?;
    report.absorb("matched_pair", is_quasi_projection_pair(&m, q, tol)?);

    Ok(MatchedResult {
        m,
        abs_q_star,
        abs_pinv,
        report,
    })
}

/// Independent route to `|Q*|^+`:
/// `(P_R(Q) P_R(Q*) P_R(Q))^{1/2}` agrees with the Moore-Penrose inverse of
/// the modulus.
pub fn abs_pinv_via_projections(q: &Idempotent, tol: &Tolerance) -> Result<ComplexMatrix> {
    let qm = q.matrix();
    let floor = qm.fro_norm().max(1.0);
    let onto_range = range_projection_floored(qm, tol, floor)?;
    let onto_adjoint_range = range_projection_floored(&qm.adjoint(), tol, floor)?;
    let sandwich = (&(&onto_range * &onto_adjoint_range) * &onto_range).hermitized();
    psd_sqrt(&sandwich, tol)
}

/// Certifies the stated properties of the matched projection:
///
/// * involution symmetry `m(Q*) = m(Q)` and the complement law
///   `I - m(Q) = m(I - Q)`;
/// * the range identity: `m(Q)`, `P_R(|Q*| + Q*)` and `P_R(|Q| + Q)`
///   coincide;
/// * the matched-pair range identities `P_R[(m(Q) Q)*] = P_R(Q*)` and
///   `P_R[(m(I-Q)(I-Q))*] = P_R(I - Q*)`, the working identities behind the
///   equivalence of semi-harmony and harmony for matched pairs.
pub fn verify_matched_properties(q: &Idempotent, tol: &Tolerance) -> Result<VerificationReport> {
    let qm = q.matrix();
    let n = q.dim();
    let identity = ComplexMatrix::identity(n);
    let qs = qm.adjoint();

    let qn = qm.fro_norm();
    let bound = tol.bound(qn * qn);
    let floor = qn.max(1.0);
    let mut report = VerificationReport::new();

    let m = matched_projection_matrix(qm, tol)?;
    let m_of_adjoint = matched_projection_matrix(&qs, tol)?;
    report.push(
        "involution_symmetry",
        m_of_adjoint.residual_from(&m),
        bound,
    );

    let m_of_complement = matched_projection_matrix(&(&identity - qm), tol)?;
    report.push(
        "complement_symmetry",
        (&identity - &m).residual_from(&m_of_complement),
        bound,
    );

    let abs_qs = operator_abs(&qs, tol)?;
    let abs_q = operator_abs(qm, tol)?;
    let via_adjoint = range_projection_floored(&(&abs_qs + &qs), tol, floor)?;
    let via_plain = range_projection_floored(&(&abs_q + qm), tol, floor)?;
    let m_range = range_projection_floored(&m, tol, floor)?;
    report.push(
        "range_eq_abs_qstar_plus_qstar",
        m_range.residual_from(&via_adjoint),
        bound,
    );
    report.push(
        "range_eq_abs_q_plus_q",
        m_range.residual_from(&via_plain),
        bound,
    );

    // Corner ranges of the pair (m(Q), I-Q): T1 = m(Q) Q and
    // T2 = (I - m(Q))(I - Q).
    let lhs = range_projection_floored(&(&m * qm).adjoint(), tol, floor)?;
    let rhs = range_projection_floored(&qs, tol, floor)?;
    report.push("matched_pair_t1_star_range", lhs.residual_from(&rhs), bound);

    let iq = &identity - qm;
    let lhs = range_projection_floored(&(&(&identity - &m) * &iq).adjoint(), tol, floor)?;
    let rhs = range_projection_floored(&iq.adjoint(), tol, floor)?;
    report.push("matched_pair_t2_star_range", lhs.residual_from(&rhs), bound);

    Ok(report)
}
