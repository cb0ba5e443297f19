use std::f64::consts::PI;

use dfr_core::transforms::{build_transform_matrix, midpoint_integral, TransformKind, TransformPlan};
use proptest::prelude::*;

const SIZES: [usize; 6] = [1, 2, 8, 64, 200, 274];

/// Matrix entries written out from the trigonometric definitions.
fn reference_entry(kind: TransformKind, n: usize, k: usize, j: usize) -> f64 {
    let (nf, x) = (n as f64, (j as f64 + 0.5) * PI / n as f64);
    let norm = (2.0 / nf).sqrt();
    match kind {
        TransformKind::DstII => norm * if k == n - 1 { 0.5f64.sqrt() } else { 1.0 } * ((k as f64 + 1.0) * x).sin(),
        TransformKind::DstIV => norm * ((k as f64 + 0.5) * x).sin(),
        TransformKind::DctII => norm * if k == 0 { 0.5f64.sqrt() } else { 1.0 } * (k as f64 * x).cos(),
        TransformKind::DctIV => norm * ((k as f64 + 0.5) * x).cos(),
    }
}

#[test]
fn matrices_match_trigonometric_definition() {
    for kind in TransformKind::ALL {
        for n in SIZES {
            let m = build_transform_matrix::<f64>(kind, n).unwrap();
            for k in 0..n {
                for j in 0..n {
                    assert!((m[k * n + j] - reference_entry(kind, n, k, j)).abs() < 1e-12, "{kind} N={n} ({k},{j})");
                }
            }
        }
    }
}

#[test]
fn matrices_are_orthogonal() {
    for kind in TransformKind::ALL {
        for n in SIZES {
            let m = build_transform_matrix::<f64>(kind, n).unwrap();
            let mut worst = 0.0f64;
            for a in 0..n {
                for b in 0..n {
                    let dot: f64 = (0..n).map(|k| m[k * n + a] * m[k * n + b]).sum();
                    worst = worst.max((dot - if a == b { 1.0 } else { 0.0 }).abs());
                }
            }
            assert!(worst <= 1e-12, "{kind} N={n}: {worst:e}");
        }
    }
}

#[test]
fn sine_matrix_is_reversed_sign_flipped_cosine() {
    for (s, c) in [(TransformKind::DstII, TransformKind::DctII), (TransformKind::DstIV, TransformKind::DctIV)] {
        for n in SIZES {
            let sm = build_transform_matrix::<f64>(s, n).unwrap();
            let cm = build_transform_matrix::<f64>(c, n).unwrap();
            for k in 0..n {
                for j in 0..n {
                    let jcd = cm[(n - 1 - k) * n + j] * if j % 2 == 0 { 1.0 } else { -1.0 };
                    assert!((sm[k * n + j] - jcd).abs() <= 1e-14, "{s} N={n} ({k},{j})");
                }
            }
        }
    }
}

#[test]
fn fast_and_dense_paths_agree() {
    for kind in TransformKind::ALL {
        for n in SIZES.into_iter().chain([63, 65, 128, 1000]) {
            let plan = TransformPlan::<f64>::new(kind, n).unwrap();
            let x: Vec<f64> = (0..n).map(|i| ((i * 7919 % 1013) as f64 / 1013.0 - 0.5) * 3.0).collect();
            let (a, b) = (plan.apply_fast(&x).unwrap(), plan.apply_dense(&x).unwrap());
            let (c, d) = (plan.apply_transpose_fast(&x).unwrap(), plan.apply_transpose_dense(&x).unwrap());
            for i in 0..n {
                assert!((a[i] - b[i]).abs() <= 1e-10, "{kind} N={n}");
                assert!((c[i] - d[i]).abs() <= 1e-10, "{kind} N={n} transpose");
            }
        }
    }
}

/// Midpoint rule on `m` points of `∫₀^π f`.
fn dense_quadrature(m: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = PI / m as f64;
    (0..m).map(|i| f((i as f64 + 0.5) * h)).sum::<f64>() * h
}

#[test]
fn band_limited_integrals_are_exact() {
    let n = 64;
    let x: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * PI / n as f64).collect();

    let plan = TransformPlan::<f64>::new(TransformKind::DstII, n).unwrap();
    let c = plan.apply(&x.iter().map(|t| (3.0 * t).sin()).collect::<Vec<_>>()).unwrap();
    let oracle = dense_quadrature(1_000_000, |t| (3.0 * t).sin().powi(2));
    assert!((oracle - PI / 2.0).abs() < 1e-10);
    for (i, v) in c.iter().enumerate() {
        let want = if i == 2 { oracle } else { 0.0 };
        assert!((v - want).abs() < 1e-10, "DST-II row {i}: {v}");
    }

    let plan = TransformPlan::<f64>::new(TransformKind::DctIV, n).unwrap();
    let c = plan.apply(&x.iter().map(|t| (1.5 * t).cos()).collect::<Vec<_>>()).unwrap();
    let oracle = dense_quadrature(1_000_000, |t| (1.5 * t).cos().powi(2));
    assert!((c[1] - oracle).abs() < 1e-10 && (c[1] - PI / 2.0).abs() < 1e-10);
}

#[test]
fn midpoint_integral_of_polynomial() {
    let n = 1000;
    let h = 2.0 / n as f64;
    let s: Vec<f64> = (0..n).map(|i| (-1.0 + (i as f64 + 0.5) * h).powi(2)).collect();
    // midpoint error is −(b−a)h²f''/24
    let want = 2.0 / 3.0 - 2.0 * h * h * 2.0 / 24.0;
    assert!((midpoint_integral(&s, -1.0, 1.0).unwrap() - want).abs() < 1e-13);
}

fn kind_strategy() -> impl Strategy<Value = TransformKind> {
    prop::sample::select(TransformKind::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn forward_then_transpose_recovers_samples(kind in kind_strategy(), x in prop::collection::vec(-10.0f64..10.0, 1..300)) {
        let plan = TransformPlan::<f64>::new(kind, x.len()).unwrap();
        let q2 = plan.quadrature_factor().powi(2);
        let back = plan.apply_transpose(&plan.apply(&x).unwrap()).unwrap();
        for (a, b) in back.iter().zip(&x) {
            prop_assert!((a / q2 - b).abs() <= 1e-10 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn transform_preserves_norm(kind in kind_strategy(), x in prop::collection::vec(-10.0f64..10.0, 1..300)) {
        let plan = TransformPlan::<f64>::new(kind, x.len()).unwrap();
        let y = plan.apply(&x).unwrap();
        let nx: f64 = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let ny: f64 = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((ny - plan.quadrature_factor() * nx).abs() <= 1e-10 * (1.0 + ny));
    }

    #[test]
    fn transform_is_linear(kind in kind_strategy(), pair in prop::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 1..200), a in -3.0f64..3.0) {
        let (x, y): (Vec<f64>, Vec<f64>) = pair.into_iter().unzip();
        let plan = TransformPlan::<f64>::new(kind, x.len()).unwrap();
        let mix: Vec<f64> = x.iter().zip(&y).map(|(p, q)| a * p + q).collect();
        let (fx, fy, fm) = (plan.apply(&x).unwrap(), plan.apply(&y).unwrap(), plan.apply(&mix).unwrap());
        for i in 0..x.len() {
            prop_assert!((fm[i] - (a * fx[i] + fy[i])).abs() <= 1e-9);
        }
    }
}
