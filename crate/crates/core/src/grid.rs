//! Continuous functions over unions of closed intervals, sampled on a grid.
//!
//! This is the commutative model: a function algebra over a disjoint union of
//! intervals, with closed ideals represented by their zero sets. Membership
//! and distance questions about closed ideals reduce to pointwise checks on
//! the grid, and "the zero set is clopen" becomes "no zero-set grid point
//! sits within one grid step of a point where the function is nonzero".
//! Interval endpoints are always grid points, so clopen components of the
//! domain are detected exactly.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::report::VerificationReport;

/// A union of pairwise disjoint closed intervals with a sampling density.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalDomain {
    intervals: Vec<(f64, f64)>,
    points_per_unit: usize,
    points: Vec<f64>,
    interval_of: Vec<usize>,
}

impl IntervalDomain {
    pub fn new(intervals: Vec<(f64, f64)>, points_per_unit: usize) -> Result<Self> {
        if points_per_unit == 0 {
            return Err(Error::BadDomain("points_per_unit must be positive".into()));
        }
        if intervals.is_empty() {
            return Err(Error::BadDomain("at least one interval required".into()));
        }
        for &(a, b) in &intervals {
            if !(a.is_finite() && b.is_finite()) {
                return Err(Error::BadDomain("endpoints must be finite".into()));
            }
            if a > b {
                return Err(Error::BadDomain(format!("interval [{a}, {b}] is reversed")));
            }
        }
        for w in intervals.windows(2) {
            if w[0].1 >= w[1].0 {
                return Err(Error::BadDomain(
                    "intervals must be ascending and disjoint".into(),
                ));
            }
        }

        let mut points = Vec::new();
        let mut interval_of = Vec::new();
        for (idx, &(a, b)) in intervals.iter().enumerate() {
            let span = b - a;
            if span == 0.0 {
                points.push(a);
                interval_of.push(idx);
                continue;
            }
            let steps = ((span * points_per_unit as f64).round() as usize).max(1);
            for k in 0..=steps {
                // Endpoints land on the grid exactly.
                let t = if k == steps {
                    b
                } else {
                    a + span * (k as f64) / (steps as f64)
                };
                points.push(t);
                interval_of.push(idx);
            }
        }

        Ok(Self {
            intervals,
            points_per_unit,
            points,
            interval_of,
        })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn points_per_unit(&self) -> usize {
        self.points_per_unit
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Same intervals at `factor` times the density.
    pub fn refined(&self, factor: usize) -> Result<IntervalDomain> {
        IntervalDomain::new(self.intervals.clone(), self.points_per_unit * factor)
    }

    fn same_interval(&self, i: usize, j: usize) -> bool {
        self.interval_of[i] == self.interval_of[j]
    }
}

#[derive(Serialize, Deserialize)]
struct DomainWire {
    intervals: Vec<[f64; 2]>,
    points_per_unit: usize,
}

impl Serialize for IntervalDomain {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        DomainWire {
            intervals: self.intervals.iter().map(|&(a, b)| [a, b]).collect(),
            points_per_unit: self.points_per_unit,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IntervalDomain {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let wire = DomainWire::deserialize(deserializer)?;
        IntervalDomain::new(
            wire.intervals.iter().map(|&[a, b]| (a, b)).collect(),
            wire.points_per_unit,
        )
        .map_err(serde::de::Error::custom)
    }
}

/// A function sampled at every grid point of its domain.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    domain: IntervalDomain,
    values: Vec<Complex64>,
}

impl GridFunction {
    pub fn from_fn(domain: IntervalDomain, f: impl Fn(f64) -> f64) -> Self {
        let values = domain
            .points()
            .iter()
            .map(|&t| Complex64::new(f(t), 0.0))
            .collect();
        Self { domain, values }
    }

    pub fn from_values(domain: IntervalDomain, values: Vec<f64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::ShapeMismatch {
                expected: domain.len(),
                actual: values.len(),
            });
        }
        if !values.iter().all(|v| v.is_finite()) {
            return Err(Error::NotFinite);
        }
        Ok(Self {
            domain,
            values: values.into_iter().map(|v| Complex64::new(v, 0.0)).collect(),
        })
    }

    pub fn from_complex_values(domain: IntervalDomain, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != domain.len() {
            return Err(Error::ShapeMismatch {
                expected: domain.len(),
                actual: values.len(),
            });
        }
        if !values.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::NotFinite);
        }
        Ok(Self { domain, values })
    }

    pub fn domain(&self) -> &IntervalDomain {
        &self.domain
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Default zero-set threshold: `1e-9 * max|f|`.
    pub fn default_zero_tol(&self) -> f64 {
        1e-9 * self.max_abs()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> GridFunction {
        GridFunction {
            domain: self.domain.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    fn same_domain(&self, other: &GridFunction) -> bool {
        self.domain == other.domain
    }
}

/// The builtin generators the wire format knows about.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FunctionSpec {
    Builtin {
        builtin: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        param: Option<f64>,
    },
    Values {
        values: Vec<f64>,
    },
}

impl FunctionSpec {
    pub fn realize(&self, domain: &IntervalDomain) -> Result<GridFunction> {
        match self {
            FunctionSpec::Builtin { builtin, param } => match builtin.as_str() {
                "sec2" => Ok(GridFunction::from_fn(domain.clone(), |t| {
                    1.0 / (t.cos() * t.cos())
                })),
                "tan2" => Ok(GridFunction::from_fn(domain.clone(), |t| {
                    let x = t.tan();
                    x * x
                })),
                "id" => Ok(GridFunction::from_fn(domain.clone(), |t| t)),
                "const" => {
                    let c = param.unwrap_or(0.0);
                    Ok(GridFunction::from_fn(domain.clone(), |_| c))
                }
                other => Err(Error::UnknownBuiltin(other.to_string())),
            },
            FunctionSpec::Values { values } => {
                GridFunction::from_values(domain.clone(), values.clone())
            }
        }
    }
}

/// Wire form of a grid-criterion request.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridDocument {
    pub domain: IntervalDomain,
    pub function: FunctionSpec,
}

/// Grid indices where `|f| <= zero_tol`.
pub fn zero_set(f: &GridFunction, zero_tol: f64) -> Vec<usize> {
    f.values
        .iter()
        .enumerate()
        .filter(|(_, v)| v.norm() <= zero_tol)
        .map(|(i, _)| i)
        .collect()
}

fn cozero_closure_mask(f: &GridFunction, zero_tol: f64) -> Vec<bool> {
    let n = f.values.len();
    let coz: Vec<bool> = f.values.iter().map(|v| v.norm() > zero_tol).collect();
    let mut closure = coz.clone();
    for i in 0..n {
        if closure[i] {
            continue;
        }
        let left = i > 0 && coz[i - 1] && f.domain.same_interval(i - 1, i);
        let right = i + 1 < n && coz[i + 1] && f.domain.same_interval(i, i + 1);
        closure[i] = left || right;
    }
    closure
}

/// Grid indices of the closure of `{|f| > zero_tol}`: the cozero points plus
/// every grid point one step away inside the same interval.
pub fn cozero_closure(f: &GridFunction, zero_tol: f64) -> Vec<usize> {
    cozero_closure_mask(f, zero_tol)
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i)
        .collect()
}

/// Sup-norm distance from `g` to the closed ideal generated by `f`: functions
/// in that ideal vanish on the zero set of `f` and approximate `g` anywhere
/// else, so the distance is `max |g|` over the zero set (zero if the zero set
/// is empty).
pub fn ideal_distance(g: &GridFunction, f: &GridFunction, zero_tol: f64) -> Result<f64> {
    if !g.same_domain(f) {
        return Err(Error::DomainMismatch);
    }
    Ok(zero_set(f, zero_tol)
        .into_iter()
        .map(|i| g.values[i].norm())
        .fold(0.0, f64::max))
}

/// Whether the unit belongs to `closure(R(f)) + N(f)` in the function
/// algebra, decided at grid resolution.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionResult {
    pub holds: bool,
    pub distance: f64,
    pub witness_point: Option<f64>,
}

fn clopen_criterion(f: &GridFunction, zero_tol: f64) -> CriterionResult {
    let closure = cozero_closure_mask(f, zero_tol);
    let witness = zero_set(f, zero_tol)
        .into_iter()
        .find(|&i| closure[i])
        .map(|i| f.domain.points()[i]);
    CriterionResult {
        holds: witness.is_none(),
        distance: if witness.is_some() { 1.0 } else { 0.0 },
        witness_point: witness,
    }
}

/// Membership of the unit in `closure(ideal(f)) + N(f)`.
///
/// The closed ideal of `f` consists of the functions vanishing on `Z(f)`, and
/// the annihilator `N(f)` of the functions vanishing on the closure of the
/// cozero set; their sum contains the unit exactly when those two closed sets
/// are disjoint, i.e. when `Z(f)` is clopen. When they intersect, the unit
/// stays at sup-distance 1 and the first intersection point is the witness.
pub fn complementarity_criterion(f: &GridFunction, zero_tol: f64) -> CriterionResult {
    clopen_criterion(f, zero_tol)
}

fn require_real(a: &GridFunction, zero_tol: f64) -> Result<Vec<f64>> {
    for (i, v) in a.values.iter().enumerate() {
        if v.im.abs() > zero_tol {
            return Err(Error::NotAdmissible {
                point: a.domain.points()[i],
                value: v.im,
            });
        }
    }
    Ok(a.values.iter().map(|v| v.re).collect())
}

fn require_admissible(a: &GridFunction, zero_tol: f64) -> Result<Vec<f64>> {
    let re = require_real(a, zero_tol)?;
    for (i, &v) in re.iter().enumerate() {
        let gap = v * v - v;
        if gap < -zero_tol {
            return Err(Error::NotAdmissible {
                point: a.domain.points()[i],
                value: gap,
            });
        }
    }
    Ok(re)
}

/// The two membership criteria attached to the block pair with generator `a`
/// (`a` real with `a^2 - a >= 0` pointwise): the pair is semi-harmonious iff
/// the unit lies in `closure(R(a - 1)) + N(a - 1)` and harmonious iff it lies
/// in `closure(R(a^2 - a)) + N(a^2 - a)`. Harmony implies semi-harmony.
pub fn pair_criteria(
    a: &GridFunction,
    zero_tol: f64,
) -> Result<(CriterionResult, CriterionResult)> {
    let re = require_admissible(a, zero_tol)?;
    let domain = a.domain.clone();
    let shifted = GridFunction {
        domain: domain.clone(),
        values: re.iter().map(|&v| Complex64::new(v - 1.0, 0.0)).collect(),
    };
    let gap = GridFunction {
        domain,
        values: re
            .iter()
            .map(|&v| Complex64::new(v * v - v, 0.0))
            .collect(),
    };
    Ok((
        complementarity_criterion(&shifted, zero_tol),
        complementarity_criterion(&gap, zero_tol),
    ))
}

/// Whether multiplication by `f` admits a polar decomposition on the function
/// module: true exactly when the zero set of `|f|` is clopen at grid
/// resolution. The rule is derived from the closed-ideal structure of the
/// algebra (the range closure of the multiplication operator is complemented
/// exactly when the zero set splits off as a clopen piece); a false verdict
/// carries the obstructing grid point.
pub fn scalar_polar_exists(f: &GridFunction, zero_tol: f64) -> CriterionResult {
    clopen_criterion(f, zero_tol)
}

fn max_abs_over(values: &[f64], indices: impl Iterator<Item = usize>) -> f64 {
    indices.map(|i| values[i].abs()).fold(0.0, f64::max)
}

/// Harmony of the restriction of the block pair to `M = closure(R(P - Q))`.
///
/// The entries of `M` form the closed ideal generated by `b = 1 - a` (equal,
/// for admissible `a`, to the ideal of `a^2 - a` wherever `a` stays away from
/// zero), while the range of `T4` restricted to `M` is controlled by the
/// ideal of `l = (a^2 - a)^{1/2}`. The restriction is harmonious exactly when
/// the two ideals coincide, i.e. when their zero sets agree at grid
/// resolution; the reported residual for that record is the sup-distance from
/// `b` to the ideal of `l`, which is the size of the obstruction.
pub fn restricted_harmony_check(a: &GridFunction, zero_tol: f64) -> Result<VerificationReport> {
    let re = require_admissible(a, zero_tol)?;
    let b: Vec<f64> = re.iter().map(|&v| 1.0 - v).collect();
    let gap: Vec<f64> = re.iter().map(|&v| v * v - v).collect();
    let ell: Vec<f64> = gap.iter().map(|&v| v.max(0.0).sqrt()).collect();

    let zeros_of = |values: &[f64]| -> Vec<usize> {
        values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.abs() <= zero_tol)
            .map(|(i, _)| i)
            .collect()
    };
    let z_b = zeros_of(&b);
    let z_ell = zeros_of(&ell);
    let z_gap = zeros_of(&gap);

    let mut report = VerificationReport::new();
    report.push(
        "zset_b_subset_zset_ell",
        max_abs_over(&ell, z_b.iter().copied()),
        zero_tol,
    );
    let obstruction = max_abs_over(&b, z_ell.iter().copied());
    report.push("zset_ell_eq_zset_b", obstruction, zero_tol);
    report.push(
        "mu_ideal_matches_t4_range_ideal",
        max_abs_over(&gap, z_ell.iter().copied())
            .max(max_abs_over(&ell, z_gap.iter().copied())),
        zero_tol,
    );
    report.push("restriction_harmonious", obstruction, zero_tol);
    Ok(report)
}
