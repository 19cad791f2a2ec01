use std::fmt;

/// Error type shared by every module in the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Symmetry residual of a purportedly Hermitian matrix exceeds the bound.
    NotHermitian { residual: f64, bound: f64 },
    /// The Jacobi sweeps did not reduce the off-diagonal mass in budget.
    NoConvergence { sweeps: usize },
    /// An eigenvalue sits below the negative clamp threshold.
    NotPsd { min_eigenvalue: f64, bound: f64 },
    /// Idempotency residual exceeds the bound.
    NotIdempotent { residual: f64, bound: f64 },
    /// Self-adjointness residual of a purported projection exceeds the bound.
    NotProjection { residual: f64, bound: f64 },
    /// The pair fails the quasi-projection conditions.
    NotQpp { failed: String },
    /// J is not a symmetry (J^2 = I, J = J*).
    NotSymmetry { residual: f64 },
    /// The conjugating matrix is not unitary within tolerance.
    NotUnitary { residual: f64 },
    /// A Hermitian generator has spectrum inside the forbidden interval (0, 1).
    SpectrumViolation { eigenvalue: f64 },
    /// Requested idempotent rank exceeds the dimension.
    RankOutOfRange { rank: usize, dim: usize },
    /// A scalar parameter that must be nonzero is zero.
    ZeroParameter,
    /// Operand shapes are incompatible.
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    /// Matrix entries are not all finite.
    NotFinite,
    /// A square matrix was required.
    NotSquare { rows: usize, cols: usize },
    /// Declared shape disagrees with the number of entries.
    ShapeMismatch { expected: usize, actual: usize },
    /// Linear solve hit a numerically singular pivot.
    Singular,
    /// Resampling could not reach the requested condition cap.
    ConditionCap { attempts: usize },
    /// Two grid functions live on different domains.
    DomainMismatch,
    /// a^2 - a dips below the admissibility threshold at some grid point.
    NotAdmissible { point: f64, value: f64 },
    /// Invalid interval list or grid density.
    BadDomain(String),
    /// Unknown builtin function name in a function spec.
    UnknownBuiltin(String),
    /// Invalid tolerance parameters.
    BadTolerance,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotHermitian { residual, bound } => {
                write!(f, "matrix is not Hermitian: defect {residual:.3e} > {bound:.3e}")
            }
            Error::NoConvergence { sweeps } => {
                write!(f, "eigensolver did not converge within {sweeps} sweeps")
            }
            Error::NotPsd { min_eigenvalue, bound } => write!(
                f,
                "matrix is not positive semidefinite: eigenvalue {min_eigenvalue:.3e} < -{bound:.3e}"
            ),
            Error::NotIdempotent { residual, bound } => {
                write!(f, "matrix is not idempotent: residual {residual:.3e} > {bound:.3e}")
            }
            Error::NotProjection { residual, bound } => write!(
                f,
                "matrix is not self-adjoint: defect {residual:.3e} > {bound:.3e}"
            ),
            Error::NotQpp { failed } => {
                write!(f, "not a quasi-projection pair (failed: {failed})")
            }
            Error::NotSymmetry { residual } => {
                write!(f, "matrix is not a symmetry: residual {residual:.3e}")
            }
            Error::NotUnitary { residual } => {
                write!(f, "matrix is not unitary: residual {residual:.3e}")
            }
            Error::SpectrumViolation { eigenvalue } => write!(
                f,
                "eigenvalue {eigenvalue} lies in the forbidden interval (0, 1)"
            ),
            Error::RankOutOfRange { rank, dim } => {
                write!(f, "rank {rank} out of range for dimension {dim}")
            }
            Error::ZeroParameter => write!(f, "parameter must be nonzero"),
            Error::DimensionMismatch { left, right } => write!(
                f,
                "dimension mismatch: {}x{} vs {}x{}",
                left.0, left.1, right.0, right.1
            ),
            Error::NotFinite => write!(f, "matrix entries must be finite"),
            Error::NotSquare { rows, cols } => {
                write!(f, "square matrix required, got {rows}x{cols}")
            }
            Error::ShapeMismatch { expected, actual } => write!(
                f,
                "entry count {actual} does not match declared shape ({expected} expected)"
            ),
            Error::Singular => write!(f, "linear system is singular"),
            Error::ConditionCap { attempts } => write!(
                f,
                "could not sample a matrix under the condition cap in {attempts} attempts"
            ),
            Error::DomainMismatch => write!(f, "grid functions live on different domains"),
            Error::NotAdmissible { point, value } => write!(
                f,
                "a^2 - a = {value:.3e} < 0 at t = {point}: generator not admissible"
            ),
            Error::BadDomain(msg) => write!(f, "invalid domain: {msg}"),
            Error::UnknownBuiltin(name) => write!(f, "unknown builtin function {name:?}"),
            Error::BadTolerance => write!(f, "tolerance parameters must be finite and nonnegative"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
