//! Quasi-projection pairs.
//!
//! A pair couples an orthogonal projection `P` with an idempotent `Q` through
//! the symmetry `2P - I`: the defining conditions are
//!
//! ```text
//! P Q* P = P Q P,    P Q* (I-P) = -P Q (I-P),    (I-P) Q* (I-P) = (I-P) Q (I-P)
//! ```
//!
//! equivalently `Q* = (2P-I) Q (2P-I)`, equivalently the same conjugation
//! identity for the moduli `|Q*|` and `|Q|`. This module validates pairs,
//! builds the four corner operators `T1..T4` with their tilde variants, the
//! six submodule projections `H1..H6`, and verifies every structural identity
//! and decomposition formula the pair satisfies.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matched::matched_projection_matrix;
use crate::matrix::ComplexMatrix;
use crate::ops::{
    null_projection_floored, operator_abs, range_basis_floored, range_projection_floored,
};
use crate::report::VerificationReport;
use crate::tolerance::Tolerance;

/// True iff `||M^2 - M|| <= abs_eps * max(1, ||M||^2)`. Non-square matrices
/// are never idempotent.
pub fn is_idempotent(m: &ComplexMatrix, tol: &Tolerance) -> bool {
    if !m.is_square() {
        return false;
    }
    let norm = m.fro_norm();
    (&(m * m) - m).fro_norm() <= tol.bound(norm * norm)
}

/// A validated idempotent: `Q^2 = Q` within tolerance.
#[derive(Debug, Clone)]
pub struct Idempotent {
    matrix: ComplexMatrix,
}

impl Idempotent {
    pub fn new(matrix: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let norm = matrix.fro_norm();
        let residual = (&(&matrix * &matrix) - &matrix).fro_norm();
        let bound = tol.bound(norm * norm);
        if residual > bound {
            return Err(Error::NotIdempotent { residual, bound });
        }
        Ok(Self { matrix })
    }

    /// Wraps a matrix that is idempotent by construction (adjoints and
    /// complements of validated idempotents have the same residual).
    pub(crate) fn from_validated(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `Q*`.
    pub fn adjoint(&self) -> Idempotent {
        Idempotent::from_validated(self.matrix.adjoint())
    }

    /// `I - Q`.
    pub fn complement(&self) -> Idempotent {
        Idempotent::from_validated(&ComplexMatrix::identity(self.dim()) - &self.matrix)
    }
}

/// A validated orthogonal projection: idempotent and self-adjoint.
#[derive(Debug, Clone)]
pub struct Projection {
    matrix: ComplexMatrix,
}

impl Projection {
    pub fn new(matrix: ComplexMatrix, tol: &Tolerance) -> Result<Self> {
        let idem = Idempotent::new(matrix, tol)?;
        let matrix = idem.into_matrix();
        let residual = matrix.hermitian_defect();
        let bound = tol.bound(matrix.fro_norm());
        if residual > bound {
            return Err(Error::NotProjection { residual, bound });
        }
        Ok(Self { matrix })
    }

    pub(crate) fn from_validated(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `I - P`.
    pub fn complement(&self) -> Projection {
        Projection::from_validated(&ComplexMatrix::identity(self.dim()) - &self.matrix)
    }

    pub fn as_idempotent(&self) -> Idempotent {
        Idempotent::from_validated(self.matrix.clone())
    }
}

/// Checks the three defining conditions together with the two equivalent
/// conjugation forms (for `Q*` and for `|Q*|`). All five residuals land in
/// the report; a valid pair passes all of them and an invalid pair fails them
/// together, the forms being equivalent.
pub fn is_quasi_projection_pair(
    p: &Projection,
    q: &Idempotent,
    tol: &Tolerance,
) -> Result<VerificationReport> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.matrix().shape(),
            right: q.matrix().shape(),
        });
    }
    let pm = p.matrix();
    let qm = q.matrix();
    let n = p.dim();
    let identity = ComplexMatrix::identity(n);
    let ip = &identity - pm;
    let sym = &pm.scale(2.0) - &identity;
    let qs = qm.adjoint();

    let scale = {
        let qn = qm.fro_norm();
        qn * qn
    };
    let bound = tol.bound(scale);
    let mut report = VerificationReport::new();

    let lhs = &(pm * &qs) * pm;
    let rhs = &(pm * qm) * pm;
    report.push("pqp_corner", lhs.residual_from(&rhs), bound);

    let lhs = &(pm * &qs) * &ip;
    let rhs = (&(pm * qm) * &ip).scale(-1.0);
    report.push("pq_ip_corner", lhs.residual_from(&rhs), bound);

    let lhs = &(&ip * &qs) * &ip;
    let rhs = &(&ip * qm) * &ip;
    report.push("ip_q_ip_corner", lhs.residual_from(&rhs), bound);

    let rhs = &(&sym * qm) * &sym;
    report.push("adjoint_conjugation", qs.residual_from(&rhs), bound);

    let abs_qs = operator_abs(&qs, tol)?;
    let abs_q = operator_abs(qm, tol)?;
    let rhs = &(&sym * &abs_q) * &sym;
    report.push("modulus_conjugation", abs_qs.residual_from(&rhs), bound);

    Ok(report)
}

/// A validated pair with its corner operators and submodule projections.
///
/// `t1 = P(I-Q)`, `t2 = (I-P)Q`, `t3 = PQ(I-P)`, `t4 = (I-P)QP`,
/// `t1_tilde = t1(2P-I)`, `t2_tilde = -t2(2P-I)`. The projections `h1..h4`
/// target the intersections `R(P) ∩ R(Q)`, `R(P) ∩ N(Q)`, `N(P) ∩ R(Q)`,
/// `N(P) ∩ N(Q)`; `h5` and `h6` target the ranges of `t3` and `t4`.
#[derive(Debug, Clone)]
pub struct QppPair {
    p: Projection,
    q: Idempotent,
    t1: ComplexMatrix,
    t2: ComplexMatrix,
    t3: ComplexMatrix,
    t4: ComplexMatrix,
    t1_tilde: ComplexMatrix,
    t2_tilde: ComplexMatrix,
    h1: ComplexMatrix,
    h2: ComplexMatrix,
    h3: ComplexMatrix,
    h4: ComplexMatrix,
    h5: ComplexMatrix,
    h6: ComplexMatrix,
}

/// Projection onto `N(top) ∩ N(bottom)`, computed as the null projection of
/// the vertically stacked block.
fn stacked_null_projection(
    top: &ComplexMatrix,
    bottom: &ComplexMatrix,
    tol: &Tolerance,
    sigma_floor: f64,
) -> Result<ComplexMatrix> {
    null_projection_floored(&top.vstack(bottom), tol, sigma_floor)
}

impl QppPair {
    /// Validates the pair and computes its canonical operators.
    pub fn build(p: Projection, q: Idempotent, tol: &Tolerance) -> Result<QppPair> {
        let report = is_quasi_projection_pair(&p, &q, tol)?;
        if !report.all_passed() {
            return Err(Error::NotQpp {
                failed: report.failed_names().join(", "),
            });
        }

        let pm = p.matrix();
        let qm = q.matrix();
        let n = p.dim();
        let identity = ComplexMatrix::identity(n);
        let ip = &identity - pm;
        let iq = &identity - qm;
        let sym = &pm.scale(2.0) - &identity;

        let t1 = pm * &iq;
        let t2 = &ip * qm;
        let t3 = &(pm * qm) * &ip;
        let t4 = &(&ip * qm) * pm;
        let t1_tilde = &t1 * &sym;
        let t2_tilde = (&t2 * &sym).scale(-1.0);

        // Derived operators that vanish algebraically surface as roundoff
        // noise, so every rank decision below is floored at the pair scale.
        let floor = qm.fro_norm().max(1.0);

        // Intersections of ranges and kernels as stacked null spaces:
        // R(P) = N(I-P) and N(Q) = N(Q) for idempotents.
        let h1 = stacked_null_projection(&ip, &iq, tol, floor)?;
        let h2 = stacked_null_projection(&ip, qm, tol, floor)?;
        let h3 = stacked_null_projection(pm, &iq, tol, floor)?;
        let h4 = stacked_null_projection(pm, qm, tol, floor)?;
        let h5 = range_projection_floored(&t3, tol, floor)?;
        let h6 = range_projection_floored(&t4, tol, floor)?;

        Ok(QppPair {
            p,
            q,
            t1,
            t2,
            t3,
            t4,
            t1_tilde,
            t2_tilde,
            h1,
            h2,
            h3,
            h4,
            h5,
            h6,
        })
    }

    pub fn dim(&self) -> usize {
        self.p.dim()
    }

    pub fn p(&self) -> &Projection {
        &self.p
    }

    pub fn q(&self) -> &Idempotent {
        &self.q
    }

    pub fn t1(&self) -> &ComplexMatrix {
        &self.t1
    }

    pub fn t2(&self) -> &ComplexMatrix {
        &self.t2
    }

    pub fn t3(&self) -> &ComplexMatrix {
        &self.t3
    }

    pub fn t4(&self) -> &ComplexMatrix {
        &self.t4
    }

    pub fn t1_tilde(&self) -> &ComplexMatrix {
        &self.t1_tilde
    }

    pub fn t2_tilde(&self) -> &ComplexMatrix {
        &self.t2_tilde
    }

    pub fn h1(&self) -> &ComplexMatrix {
        &self.h1
    }

    pub fn h2(&self) -> &ComplexMatrix {
        &self.h2
    }

    pub fn h3(&self) -> &ComplexMatrix {
        &self.h3
    }

    pub fn h4(&self) -> &ComplexMatrix {
        &self.h4
    }

    pub fn h5(&self) -> &ComplexMatrix {
        &self.h5
    }

    pub fn h6(&self) -> &ComplexMatrix {
        &self.h6
    }

    pub fn submodule_projections(&self) -> [&ComplexMatrix; 6] {
        [&self.h1, &self.h2, &self.h3, &self.h4, &self.h5, &self.h6]
    }

    fn identity_bound(&self, tol: &Tolerance) -> f64 {
        let qn = self.q.matrix().fro_norm();
        tol.bound(qn * qn)
    }

    /// Singular-value floor for rank decisions on operators derived from
    /// this pair. Nonzero idempotents have singular values at least 1, so
    /// the pair scale `max(1, ||Q||)` separates genuine ranges from noise.
    pub fn ambient_scale(&self) -> f64 {
        self.q.matrix().fro_norm().max(1.0)
    }

    /// Adjoint formulas for the corner operators, the self-adjointness of
    /// `T1 + T2`, the alternative `Q*`-forms of `H1..H4`, and the two kernel
    /// decompositions `N(T4) = N(P) + H1 + H2` and
    /// `N[(I-Q)(I-P)] = R(P) + H3`, all as projection-level identities.
    pub fn verify_structure_identities(&self, tol: &Tolerance) -> Result<VerificationReport> {
        let pm = self.p.matrix();
        let qm = self.q.matrix();
        let n = self.dim();
        let identity = ComplexMatrix::identity(n);
        let ip = &identity - pm;
        let iq = &identity - qm;
        let sym = &pm.scale(2.0) - &identity;
        let qs = qm.adjoint();
        let iqs = &identity - &qs;

        let bound = self.identity_bound(tol);
        let mut report = VerificationReport::new();

        let rhs = &(&sym * &iq) * pm;
        report.push("t1_adjoint", self.t1.adjoint().residual_from(&rhs), bound);

        let rhs = &iq * pm;
        report.push(
            "t1_tilde_adjoint",
            self.t1_tilde.adjoint().residual_from(&rhs),
            bound,
        );

        let rhs = (&(&sym * qm) * &ip).scale(-1.0);
        report.push("t2_adjoint", self.t2.adjoint().residual_from(&rhs), bound);

        let rhs = qm * &ip;
        report.push(
            "t2_tilde_adjoint",
            self.t2_tilde.adjoint().residual_from(&rhs),
            bound,
        );

        report.push(
            "t3_adjoint",
            self.t3.adjoint().residual_from(&self.t4.scale(-1.0)),
            bound,
        );
        report.push(
            "t4_adjoint",
            self.t4.adjoint().residual_from(&self.t3.scale(-1.0)),
            bound,
        );

        let sum = &self.t1 + &self.t2;
        report.push(
            "t1_plus_t2_selfadjoint",
            sum.adjoint().residual_from(&sum),
            bound,
        );

        let floor = self.ambient_scale();

        // H1..H4 expressed through Q* instead of Q.
        let alt = stacked_null_projection(&ip, &iqs, tol, floor)?;
        report.push("h1_adjoint_form", self.h1.residual_from(&alt), bound);
        let alt = stacked_null_projection(&ip, &qs, tol, floor)?;
        report.push("h2_adjoint_form", self.h2.residual_from(&alt), bound);
        let alt = stacked_null_projection(pm, &iqs, tol, floor)?;
        report.push("h3_adjoint_form", self.h3.residual_from(&alt), bound);
        let alt = stacked_null_projection(pm, &qs, tol, floor)?;
        report.push("h4_adjoint_form", self.h4.residual_from(&alt), bound);

        let lhs = null_projection_floored(&self.t4, tol, floor)?;
        let rhs = &(&ip + &self.h1) + &self.h2;
        report.push("null_t4_decomposition", lhs.residual_from(&rhs), bound);

        let lhs = null_projection_floored(&(&iq * &ip), tol, floor)?;
        let rhs = &range_projection_floored(pm, tol, floor)? + &self.h3;
        report.push(
            "null_iq_ip_decomposition",
            lhs.residual_from(&rhs),
            bound,
        );

        Ok(report)
    }

    /// The four projection-sum decompositions available to every pair in
    /// finite dimension:
    ///
    /// ```text
    /// P          = P_R(T1)  + H1          P_R(Q) = P_R(T2~*) + H1
    /// I - P      = P_R(T2)  + H4          P_N(Q) = P_R(T1~*) + H4
    /// ```
    ///
    /// When `P` coincides with the matched projection of `Q`, two extra
    /// range identities from the matched-pair characterization are checked:
    /// `P_R(T1*) = P_R(P_R(Q) - Q*)` and `P_R(T2~*) = P_R(P_R(Q) - Q)`.
    pub fn verify_semiharmony_decompositions(&self, tol: &Tolerance) -> Result<VerificationReport> {
        let pm = self.p.matrix();
        let qm = self.q.matrix();
        let identity = ComplexMatrix::identity(self.dim());
        let ip = &identity - pm;

        let bound = self.identity_bound(tol);
        let floor = self.ambient_scale();
        let mut report = VerificationReport::new();

        let rhs = &range_projection_floored(&self.t1, tol, floor)? + &self.h1;
        report.push("p_eq_range_t1_plus_h1", pm.residual_from(&rhs), bound);

        let lhs = range_projection_floored(qm, tol, floor)?;
        let rhs = &range_projection_floored(&self.t2_tilde.adjoint(), tol, floor)? + &self.h1;
        report.push(
            "proj_range_q_eq_range_t2_tilde_star_plus_h1",
            lhs.residual_from(&rhs),
            bound,
        );

        let rhs = &range_projection_floored(&self.t2, tol, floor)? + &self.h4;
        report.push(
            "complement_p_eq_range_t2_plus_h4",
            ip.residual_from(&rhs),
            bound,
        );

        let lhs = null_projection_floored(qm, tol, floor)?;
        let rhs = &range_projection_floored(&self.t1_tilde.adjoint(), tol, floor)? + &self.h4;
        report.push(
            "proj_null_q_eq_range_t1_tilde_star_plus_h4",
            lhs.residual_from(&rhs),
            bound,
        );

        let matched = matched_projection_matrix(qm, tol)?;
        if pm.residual_from(&matched) <= tol.bound(1.0) {
            let prq = range_projection_floored(qm, tol, floor)?;
            let lhs = range_projection_floored(&self.t1.adjoint(), tol, floor)?;
            let rhs = range_projection_floored(&(&prq - &qm.adjoint()), tol, floor)?;
            report.push("matched_range_t1_star", lhs.residual_from(&rhs), bound);

            let lhs = range_projection_floored(&self.t2_tilde.adjoint(), tol, floor)?;
            let rhs = range_projection_floored(&(&prq - qm), tol, floor)?;
            report.push(
                "matched_range_t2_tilde_star",
                lhs.residual_from(&rhs),
                bound,
            );
        }

        Ok(report)
    }

    /// The six projection-sum identities tied to the ranges of `T3`, `T4`:
    ///
    /// ```text
    /// P_R(PQ)          = H1 + H5        P = P_R(PQ) + H2
    /// P_R(T1)          = H2 + H5        P = H1 + H2 + H5
    /// P_R(T2)          = H3 + H6        P_R[(I-P)(I-Q)] = H4 + H6
    /// ```
    pub fn verify_harmony_decompositions(&self, tol: &Tolerance) -> Result<VerificationReport> {
        let pm = self.p.matrix();
        let qm = self.q.matrix();
        let identity = ComplexMatrix::identity(self.dim());
        let ip = &identity - pm;
        let iq = &identity - qm;

        let bound = self.identity_bound(tol);
        let floor = self.ambient_scale();
        let mut report = VerificationReport::new();

        let rpq = range_projection_floored(&(pm * qm), tol, floor)?;
        let rhs = &self.h1 + &self.h5;
        report.push("range_pq_eq_h1_plus_h5", rpq.residual_from(&rhs), bound);

        let rhs = &rpq + &self.h2;
        report.push("p_eq_range_pq_plus_h2", pm.residual_from(&rhs), bound);

        let lhs = range_projection_floored(&self.t1, tol, floor)?;
        let rhs = &self.h2 + &self.h5;
        report.push("range_t1_eq_h2_plus_h5", lhs.residual_from(&rhs), bound);

        let lhs = range_projection_floored(&self.t2, tol, floor)?;
        let rhs = &self.h3 + &self.h6;
        report.push("range_t2_eq_h3_plus_h6", lhs.residual_from(&rhs), bound);

        let lhs = range_projection_floored(&(&ip * &iq), tol, floor)?;
        let rhs = &self.h4 + &self.h6;
        report.push("range_ip_iq_eq_h4_plus_h6", lhs.residual_from(&rhs), bound);

        let rhs = &(&self.h1 + &self.h2) + &self.h5;
        report.push("p_eq_h1_plus_h2_plus_h5", pm.residual_from(&rhs), bound);

        Ok(report)
    }

    /// `R(l1 T1 + l2 T2) = R(T1) ⊕ R(T2) = R(P - Q)` at projection level, for
    /// any nonzero scalars.
    pub fn range_sum_check(
        &self,
        lambda1: Complex64,
        lambda2: Complex64,
        tol: &Tolerance,
    ) -> Result<VerificationReport> {
        if lambda1.norm() == 0.0 || lambda2.norm() == 0.0 {
            return Err(Error::ZeroParameter);
        }
        let bound = self.identity_bound(tol);
        let floor = self.ambient_scale();
        let mut report = VerificationReport::new();

        let r1 = range_projection_floored(&self.t1, tol, floor)?;
        let r2 = range_projection_floored(&self.t2, tol, floor)?;
        let sum = &r1 + &r2;

        let combo = &self.t1.scale(lambda1) + &self.t2.scale(lambda2);
        let lhs = range_projection_floored(&combo, tol, floor)?;
        report.push("range_combo_eq_range_sum", lhs.residual_from(&sum), bound);

        report.push("range_t1_orth_range_t2", (&r1 * &r2).fro_norm(), bound);

        let diff = self.p.matrix() - self.q.matrix();
        let lhs = range_projection_floored(&diff, tol, floor)?;
        report.push(
            "range_p_minus_q_eq_range_sum",
            lhs.residual_from(&sum),
            bound,
        );

        Ok(report)
    }

    /// Compresses the pair onto `M = R(P - Q)` in an orthonormal basis of
    /// that range. `M` is invariant under both `P` and `Q`, so the compressed
    /// matrices form a quasi-projection pair on `dim(M)`; when `P = Q` the
    /// result is the empty pair on dimension zero.
    pub fn restrict_to_difference_range(&self, tol: &Tolerance) -> Result<QppPair> {
        let diff = self.p.matrix() - self.q.matrix();
        let basis = range_basis_floored(&diff, tol, self.ambient_scale())?;
        let basis_adj = basis.adjoint();
        let pc = &(&basis_adj * self.p.matrix()) * &basis;
        let qc = &(&basis_adj * self.q.matrix()) * &basis;
        QppPair::build(Projection::new(pc, tol)?, Idempotent::new(qc, tol)?, tol)
    }

    /// The eight sibling pairs `(A, B)` with `A ∈ {P, I-P}` and
    /// `B ∈ {Q, Q*, I-Q, I-Q*}`, in that order. Each one is again a
    /// quasi-projection pair.
    pub fn sigma_family(&self) -> Vec<(Projection, Idempotent)> {
        let mut family = Vec::with_capacity(8);
        for a in [self.p.clone(), self.p.complement()] {
            for b in [
                self.q.clone(),
                self.q.adjoint(),
                self.q.complement(),
                self.q.complement().adjoint(),
            ] {
                family.push((a.clone(), b));
            }
        }
        family
    }
}

/// Wire form of a pair: `{"P": <matrix>, "Q": <matrix>}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairDocument {
    #[serde(rename = "P")]
    pub p: ComplexMatrix,
    #[serde(rename = "Q")]
    pub q: ComplexMatrix,
}

impl PairDocument {
    pub fn validate(self, tol: &Tolerance) -> Result<(Projection, Idempotent)> {
        Ok((Projection::new(self.p, tol)?, Idempotent::new(self.q, tol)?))
    }
}
