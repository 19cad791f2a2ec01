//! Property tests: the algebraic invariants the operators satisfy on seeded
//! random families, plus proptest-driven checks on arbitrary small matrices.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qpp::batch::trial_seed;
use qpp::construct::{random_matrix, random_unitary};
use qpp::grid::cozero_closure;
use qpp::{
    herm_eig, ideal_distance, is_quasi_projection_pair, matched_projection, moore_penrose,
    pair_criteria, perturb_idempotent, polar_decompose, psd_sqrt, random_qpp, range_projection,
    ComplexMatrix, GridFunction, Idempotent, IntervalDomain, Projection, QppPair, Tolerance,
};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[test]
fn seeded_hermitian_reconstructs_tightly() {
    let tol = tol();
    let mut rng = seeded(7);
    let h = qpp::construct::random_hermitian(6, &mut rng);
    let eig = herm_eig(&h, &tol).unwrap();
    assert!(eig.reconstruct().residual_from(&h) < 1e-12);
}

#[test]
fn range_projection_fixes_its_matrix() {
    let tol = tol();
    for i in 0..50usize {
        let mut rng = seeded(trial_seed(1, i));
        let rows = rng.random_range(1..=6);
        let cols = rng.random_range(1..=6);
        let t = random_matrix(rows, cols, &mut rng);
        let onto_range = range_projection(&t, &tol).unwrap();
        assert!((&onto_range * &t).residual_from(&t) < 1e-10);
        let onto_row = range_projection(&t.adjoint(), &tol).unwrap();
        assert!((&t * &onto_row).residual_from(&t) < 1e-10);
    }
}

#[test]
fn psd_powers_share_ranges() {
    // PSD matrices with a clean spectral gap (eigenvalues either zero or in
    // [0.1, 4]): squaring sharpens a relative cutoff, so the property is
    // about genuine ranges, not about hairline rank decisions.
    let tol = tol();
    for i in 0..40usize {
        let mut rng = seeded(trial_seed(2, i));
        let n = rng.random_range(1..=6);
        let basis = random_unitary(n, &mut rng);
        let mut scaled = basis.clone();
        for c in 0..n {
            let lambda = if rng.random::<f64>() < 0.4 {
                0.0
            } else {
                0.1 + 3.9 * rng.random::<f64>()
            };
            for r in 0..n {
                scaled[(r, c)] = basis.at(r, c) * lambda;
            }
        }
        let h = (&scaled * &basis.adjoint()).hermitized();

        let base = range_projection(&h, &tol).unwrap();
        let root = psd_sqrt(&h, &tol).unwrap();
        assert!(range_projection(&root, &tol).unwrap().residual_from(&base) < 1e-9);
        let square = &h * &h;
        assert!(range_projection(&square, &tol).unwrap().residual_from(&base) < 1e-9);
    }
}

#[test]
fn polar_isometry_is_partial() {
    let tol = tol();
    for i in 0..50usize {
        let mut rng = seeded(trial_seed(3, i));
        let rows = rng.random_range(1..=6);
        let cols = rng.random_range(1..=6);
        let t = random_matrix(rows, cols, &mut rng);
        let u = polar_decompose(&t, &tol).unwrap().isometry_part;
        let uuu = &(&u * &u.adjoint()) * &u;
        assert!(uuu.residual_from(&u) < 1e-10);
    }
}

#[test]
fn penrose_identities_on_seeded_matrices() {
    let tol = tol();
    for i in 0..200usize {
        let mut rng = seeded(trial_seed(4, i));
        let rows = rng.random_range(1..=8);
        let cols = rng.random_range(1..=8);
        let t = if i % 3 == 0 {
            let k = rng.random_range(0..=rows.min(cols));
            &random_matrix(rows, k, &mut rng) * &random_matrix(k, cols, &mut rng)
        } else {
            random_matrix(rows, cols, &mut rng)
        };
        let pinv = moore_penrose(&t, &tol).unwrap();
        assert!((&(&t * &pinv) * &t).residual_from(&t) < 1e-9, "matrix {i}");
        assert!((&(&pinv * &t) * &pinv).residual_from(&pinv) < 1e-9, "matrix {i}");
        assert!((&t * &pinv).hermitian_defect() < 1e-9, "matrix {i}");
        assert!((&pinv * &t).hermitian_defect() < 1e-9, "matrix {i}");
    }
}

/// The three defining conditions, the adjoint conjugation form, and the
/// modulus conjugation form agree as pass/fail verdicts on valid pairs and
/// on near-miss perturbations alike.
#[test]
fn definition_and_conjugation_forms_agree() {
    let tol = tol();
    for i in 0..250usize {
        let seed = trial_seed(5, i);
        let mut rng = seeded(seed);
        let n = rng.random_range(1..=8);
        let pair = random_qpp(n, seed, &tol);

        let mut instances: Vec<(Projection, Idempotent)> =
            vec![(pair.p().clone(), pair.q().clone())];
        if let Ok(bad) = perturb_idempotent(pair.q(), 1e-3, trial_seed(6, i), &tol) {
            instances.push((pair.p().clone(), bad));
        }

        for (p, q) in instances {
            let report = is_quasi_projection_pair(&p, &q, &tol).unwrap();
            let records = report.records();
            let definition = records[0].passed && records[1].passed && records[2].passed;
            let adjoint_form = records[3].passed;
            let modulus_form = records[4].passed;
            assert_eq!(definition, adjoint_form, "instance {i}");
            assert_eq!(adjoint_form, modulus_form, "instance {i}");
        }
    }
}

#[test]
fn submodule_projections_stay_below_identity() {
    let tol = tol();
    for i in 0..60usize {
        let seed = trial_seed(7, i);
        let mut rng = seeded(seed);
        let n = rng.random_range(1..=8);
        let pair = random_qpp(n, seed, &tol);
        let mut sum = ComplexMatrix::zeros(pair.dim(), pair.dim());
        for h in pair.submodule_projections() {
            sum = &sum + h;
        }
        let gap = (&ComplexMatrix::identity(pair.dim()) - &sum).hermitized();
        let eig = herm_eig(&gap, &tol).unwrap();
        let min = eig.eigenvalues().first().copied().unwrap_or(0.0);
        assert!(min > -1e-8, "pair {i}: h-sum exceeds identity by {min}");
    }
}

#[test]
fn t3_gram_equals_minus_t3_t4() {
    let tol = tol();
    for i in 0..60usize {
        let seed = trial_seed(8, i);
        let mut rng = seeded(seed);
        let n = rng.random_range(1..=8);
        let pair = random_qpp(n, seed, &tol);
        let gram = pair.t3() * &pair.t3().adjoint();
        let cross = (pair.t3() * pair.t4()).scale(-1.0);
        assert!(gram.residual_from(&cross) < 1e-9, "pair {i}");
    }
}

/// Building the pair in a rotated basis conjugates every canonical operator
/// and submodule projection; the matched projection transforms the same way.
#[test]
fn unitary_covariance() {
    let tol = tol();
    for i in 0..25usize {
        let seed = trial_seed(9, i);
        let mut rng = seeded(seed);
        let n = rng.random_range(1..=6);
        let pair = random_qpp(n, seed, &tol);
        let w = random_unitary(pair.dim(), &mut rng);
        let ws = w.adjoint();
        let conj = |m: &ComplexMatrix| &(&w * m) * &ws;

        let rotated = QppPair::build(
            Projection::new(conj(pair.p().matrix()), &tol).unwrap(),
            Idempotent::new(conj(pair.q().matrix()), &tol).unwrap(),
            &tol,
        )
        .unwrap();

        assert!(rotated.t1().residual_from(&conj(pair.t1())) < 1e-9);
        assert!(rotated.t2().residual_from(&conj(pair.t2())) < 1e-9);
        assert!(rotated.t3().residual_from(&conj(pair.t3())) < 1e-9);
        assert!(rotated.t4().residual_from(&conj(pair.t4())) < 1e-9);
        assert!(rotated.t1_tilde().residual_from(&conj(pair.t1_tilde())) < 1e-9);
        assert!(rotated.t2_tilde().residual_from(&conj(pair.t2_tilde())) < 1e-9);
        for (rh, h) in rotated
            .submodule_projections()
            .iter()
            .zip(pair.submodule_projections())
        {
            assert!(rh.residual_from(&conj(h)) < 1e-8, "pair {i}: submodule projection moved");
        }

        let m_direct = matched_projection(pair.q(), &tol).unwrap();
        let m_rotated = matched_projection(rotated.q(), &tol).unwrap();
        assert!(
            m_rotated
                .m
                .matrix()
                .residual_from(&conj(m_direct.m.matrix()))
                < 1e-8
        );
    }
}

#[test]
fn kernel_decompositions_hold_as_records() {
    let tol = tol();
    for i in 0..50usize {
        let seed = trial_seed(10, i);
        let mut rng = seeded(seed);
        let n = rng.random_range(1..=8);
        let pair = random_qpp(n, seed, &tol);
        let report = pair.verify_structure_identities(&tol).unwrap();
        for name in ["null_t4_decomposition", "null_iq_ip_decomposition"] {
            let record = report.find(name).unwrap();
            assert!(record.passed, "pair {i}: {name} residual {}", record.residual);
        }
    }
}

/// Doubling the grid density moves the paper-example ideal distances by less
/// than the modulus of continuity over one coarse step.
#[test]
fn grid_refinement_stability() {
    type Case = (Vec<(f64, f64)>, fn(f64) -> f64, fn(f64) -> f64);
    let cases: Vec<Case> = vec![
        (vec![(0.0, 1.0)], |_| 1.0, |t| {
            let x = t.tan();
            x * x
        }),
        (vec![(-1.0, 0.0), (1.0, 2.0)], |t| 1.0 - t, |t| {
            (t * t - t).max(0.0).sqrt()
        }),
        (vec![(-1.0, 0.0), (1.0, 2.0)], |t| 1.0 - t, |t| t * t - t),
    ];
    for (intervals, g_fn, f_fn) in cases {
        let coarse = IntervalDomain::new(intervals.clone(), 1000).unwrap();
        let fine = coarse.refined(2).unwrap();
        let mut distances = Vec::new();
        for domain in [coarse, fine] {
            let g = GridFunction::from_fn(domain.clone(), g_fn);
            let f = GridFunction::from_fn(domain, f_fn);
            distances.push(ideal_distance(&g, &f, f.default_zero_tol()).unwrap());
        }
        assert!(
            (distances[0] - distances[1]).abs() < 0.01,
            "refinement moved the distance: {distances:?}"
        );
    }
}

#[test]
fn clopen_zero_set_leaves_indicator_in_ideal() {
    // f vanishes on one whole component, so its zero set is clopen and the
    // indicator of the cozero closure lies in the closed ideal of f.
    let domain = IntervalDomain::new(vec![(-1.0, 0.0), (1.0, 2.0)], 500).unwrap();
    let f = GridFunction::from_fn(domain.clone(), |t| if t < 0.5 { 0.0 } else { 1.0 + t });
    let zero_tol = f.default_zero_tol();
    let closure = cozero_closure(&f, zero_tol);
    let mut indicator = vec![0.0; domain.len()];
    for i in closure {
        indicator[i] = 1.0;
    }
    let g = GridFunction::from_values(domain, indicator).unwrap();
    assert_eq!(ideal_distance(&g, &f, zero_tol).unwrap(), 0.0);
}

#[test]
fn harmony_requires_both_branch_criteria() {
    // A function pinned to 1 at a point: the semi-harmony generator a - 1
    // obstructs while a^2 - a obstructs as well; moving it off 1 clears both.
    let domain = IntervalDomain::new(vec![(0.0, 1.0)], 500).unwrap();
    let touching = GridFunction::from_fn(domain.clone(), |t| 1.0 + (t - 0.5) * (t - 0.5));
    let (semi, harmony) = pair_criteria(&touching, touching.default_zero_tol()).unwrap();
    assert!(!semi.holds && !harmony.holds);

    let clear = GridFunction::from_fn(domain, |t| 1.1 + (t - 0.5) * (t - 0.5));
    let (semi, harmony) = pair_criteria(&clear, clear.default_zero_tol()).unwrap();
    assert!(semi.holds && harmony.holds);
}

fn arbitrary_matrix(max_dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(rows, cols)| {
        proptest::collection::vec((-3.0f64..3.0, -3.0f64..3.0), rows * cols).prop_map(
            move |entries| {
                ComplexMatrix::new(
                    rows,
                    cols,
                    entries
                        .into_iter()
                        .map(|(re, im)| Complex64::new(re, im))
                        .collect(),
                )
                .unwrap()
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn prop_penrose_identities(t in arbitrary_matrix(4)) {
        let tol = tol();
        let pinv = moore_penrose(&t, &tol).unwrap();
        prop_assert!((&(&t * &pinv) * &t).residual_from(&t) < 1e-9);
        prop_assert!((&(&pinv * &t) * &pinv).residual_from(&pinv) < 1e-9);
        prop_assert!((&t * &pinv).hermitian_defect() < 1e-9);
        prop_assert!((&pinv * &t).hermitian_defect() < 1e-9);
    }

    #[test]
    fn prop_range_projection_fixes_matrix(t in arbitrary_matrix(4)) {
        let tol = tol();
        let onto_range = range_projection(&t, &tol).unwrap();
        prop_assert!((&onto_range * &t).residual_from(&t) < 1e-10);
        prop_assert!(onto_range.hermitian_defect() < 1e-12);
        prop_assert!((&(&onto_range * &onto_range) - &onto_range).fro_norm() < 1e-10);
    }

    #[test]
    fn prop_polar_partial_isometry(t in arbitrary_matrix(4)) {
        let tol = tol();
        let polar = polar_decompose(&t, &tol).unwrap();
        let u = &polar.isometry_part;
        prop_assert!((u * &polar.modulus).residual_from(&t) < 1e-10);
        prop_assert!((&(u * &u.adjoint()) * u).residual_from(u) < 1e-10);
    }

    #[test]
    fn prop_matrix_json_round_trip(t in arbitrary_matrix(4)) {
        let text = serde_json::to_string(&t).unwrap();
        let back: ComplexMatrix = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, t);
    }
}
