use std::f64::consts::PI;

use dfr_core::basis::{Basis1D, BasisND, DirichletMask1D};
use proptest::prelude::*;

const QUAD: usize = 10_000;

/// Midpoint rule of `∫_a^b f` on `m` points.
fn quad(a: f64, b: f64, m: usize, f: impl Fn(f64) -> f64) -> f64 {
    let h = (b - a) / m as f64;
    (0..m).map(|i| f(a + (i as f64 + 0.5) * h)).sum::<f64>() * h
}

fn intervals() -> [(f64, f64); 3] {
    [(0.0, PI), (0.0, 1.0), (-2.0, 3.5)]
}

#[test]
fn orthonormal_in_l2() {
    for mask in DirichletMask1D::ALL {
        for (a, b) in intervals() {
            let basis = Basis1D::new(mask, a, b).unwrap();
            for j in 1..=20 {
                for k in j..=20 {
                    let v = quad(a, b, QUAD, |x| basis.eval_phi(j, x).unwrap() * basis.eval_phi(k, x).unwrap());
                    let want = if j == k { 1.0 } else { 0.0 };
                    assert!((v - want).abs() <= 1e-8, "{mask:?} ({a},{b}) j={j} k={k}: {v}");
                }
            }
        }
    }
}

#[test]
fn eigen_relation_in_weak_form() {
    for mask in DirichletMask1D::ALL {
        for (a, b) in intervals() {
            let basis = Basis1D::new(mask, a, b).unwrap();
            for k in 1..=20 {
                let lambda = basis.eigenvalue(k).unwrap();
                for j in 1..=20 {
                    let lhs = quad(a, b, QUAD, |x| {
                        basis.eval_phi_prime(k, x).unwrap() * basis.eval_phi_prime(j, x).unwrap()
                            + basis.eval_phi(k, x).unwrap() * basis.eval_phi(j, x).unwrap()
                    });
                    let rhs =
                        lambda * quad(a, b, QUAD, |x| basis.eval_phi(k, x).unwrap() * basis.eval_phi(j, x).unwrap());
                    assert!((lhs - rhs).abs() <= 1e-6 * lambda, "{mask:?} ({a},{b}) k={k} j={j}: {lhs} vs {rhs}");
                }
            }
        }
    }
}

#[test]
fn h1_norm_equals_eigenvalue() {
    for mask in DirichletMask1D::ALL {
        for (a, b) in intervals() {
            let basis = Basis1D::new(mask, a, b).unwrap();
            for k in 1..=20 {
                let lambda = basis.eigenvalue(k).unwrap();
                let h1 = quad(a, b, QUAD, |x| {
                    basis.eval_phi(k, x).unwrap().powi(2) + basis.eval_phi_prime(k, x).unwrap().powi(2)
                });
                assert!((h1 - lambda).abs() <= 1e-6 * lambda, "{mask:?} k={k}: {h1} vs {lambda}");
            }
        }
    }
}

#[test]
fn boundary_conditions_hold() {
    for mask in DirichletMask1D::ALL {
        let basis = Basis1D::<f64>::new(mask, 0.0, 2.0).unwrap();
        for k in 1..=20 {
            let (l, r) = basis.endpoint_values(k).unwrap();
            let (dl, dr) = (basis.eval_phi_prime(k, 0.0).unwrap(), basis.eval_phi_prime(k, 2.0).unwrap());
            assert!(if mask.left { l.abs() } else { dl.abs() } < 1e-12, "{mask:?} k={k} left");
            assert!(if mask.right { r.abs() } else { dr.abs() } < 1e-12, "{mask:?} k={k} right");
        }
    }
}

#[test]
fn unit_interval_example() {
    let basis = Basis1D::new(DirichletMask1D::BOTH, 0.0, 1.0).unwrap();
    assert!((basis.eigenvalue(1).unwrap() - (1.0 + PI * PI)).abs() < 1e-12);
    let dense = quad(0.0, 1.0, 1_000_000, |x| basis.eval_phi(1, x).unwrap().powi(2));
    assert!((dense - 1.0).abs() < 1e-10);
    // φ̃₁ = √2 sin(πx)
    assert!((basis.eval_phi(1, 0.25).unwrap() - 2f64.sqrt() * (PI / 4.0).sin()).abs() < 1e-14);
}

#[test]
fn projectors_match_dense_quadrature() {
    let g = |x: f64| (-0.3 * x).exp() * (1.0 + x * x).ln() + 0.2 * x;
    for mask in DirichletMask1D::ALL {
        for (a, b) in intervals() {
            let basis = Basis1D::new(mask, a, b).unwrap();
            let n = 20_000;
            let h = (b - a) / n as f64;
            let samples: Vec<f64> = (0..n).map(|i| g(a + (i as f64 + 0.5) * h)).collect();
            let values = basis.value_projector(n).unwrap().project(&samples).unwrap();
            let derivs = basis.derivative_projector(n).unwrap().project(&samples).unwrap();
            for k in 1..=20 {
                let v = quad(a, b, 1_000_000, |x| g(x) * basis.eval_phi(k, x).unwrap());
                let d = quad(a, b, 1_000_000, |x| g(x) * basis.eval_phi_prime(k, x).unwrap());
                assert!((values[k - 1] - v).abs() <= 1e-6, "{mask:?} ({a},{b}) value k={k}");
                assert!((derivs[k - 1] - d).abs() <= 1e-6, "{mask:?} ({a},{b}) derivative k={k}");
            }
        }
    }
}

#[test]
fn tensor_eigenvalue_of_product_modes() {
    let b = BasisND::new(vec![
        Basis1D::new(DirichletMask1D::BOTH, 0.0, PI).unwrap(),
        Basis1D::new(DirichletMask1D::LEFT, 0.0, PI).unwrap(),
    ]);
    // 1 + 2² + (3 − ½)²
    assert!((b.tensor_eigenvalue(&[2, 3]).unwrap() - (1.0 + 4.0 + 6.25)).abs() < 1e-12);
    assert!(b.tensor_eigenvalue(&[2]).is_err());
}

fn mask_strategy() -> impl Strategy<Value = DirichletMask1D> {
    prop::sample::select(DirichletMask1D::ALL.to_vec())
}

proptest! {
    #[test]
    fn eigenvalues_scale_with_interval(mask in mask_strategy(), a in -5.0f64..5.0, len in 0.1f64..10.0, k in 1usize..200) {
        let reference = Basis1D::new(mask, 0.0, PI).unwrap();
        let scaled = Basis1D::new(mask, a, a + len).unwrap();
        let s = PI / len;
        let w2 = reference.eigenvalue(k).unwrap() - 1.0;
        prop_assert!((scaled.eigenvalue(k).unwrap() - (1.0 + s * s * w2)).abs() <= 1e-9 * (1.0 + s * s * w2));
        prop_assert!(reference.eigenvalue(k + 1).unwrap() > reference.eigenvalue(k).unwrap());
    }

    #[test]
    fn rescaled_modes_are_stretched_copies(mask in mask_strategy(), a in -5.0f64..5.0, len in 0.1f64..10.0, k in 1usize..50, t in 0.0f64..1.0) {
        let reference = Basis1D::new(mask, 0.0, PI).unwrap();
        let scaled = Basis1D::new(mask, a, a + len).unwrap();
        let s = PI / len;
        let v = scaled.eval_phi(k, a + t * len).unwrap();
        prop_assert!((v - s.sqrt() * reference.eval_phi(k, t * PI).unwrap()).abs() <= 1e-9 * (1.0 + v.abs()));
    }
}
