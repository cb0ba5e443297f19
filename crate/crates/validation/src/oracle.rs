use std::f64::consts::PI;

use dfr_core::network::PointValues;
use dfr_core::problems::{mp3_sigma, mp6_edge_flux, mp6_sigma};
use dfr_core::{init_network, DerivativeOrder, LossAssembler, LossKind, Network64, NetworkCandidate, Problem64};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn random_network(problem: &Problem64, seed: u64) -> Network64 {
    init_network(&problem.architecture(seed)).unwrap()
}

/// Midpoint nodes of `(0, π)`.
pub fn nodes(n: usize) -> Vec<f64> {
    (0..n).map(|i| (i as f64 + 0.5) * PI / n as f64).collect()
}

/// Test function of a Dirichlet-both axis (`sin kx`) or a left-Dirichlet
/// axis (`sin (k − ½)x`), orthonormal on `(0, π)`.
pub fn phi(left_only: bool, k: usize, x: f64) -> f64 {
    let w = if left_only { k as f64 - 0.5 } else { k as f64 };
    (2.0 / PI).sqrt() * (w * x).sin()
}

pub fn dphi(left_only: bool, k: usize, x: f64) -> f64 {
    let w = if left_only { k as f64 - 0.5 } else { k as f64 };
    (2.0 / PI).sqrt() * w * (w * x).cos()
}

/// `⟨R(u), φ_k⟩` for `k = 1..=k_max` by the midpoint rule on `nq` points,
/// with every flux written out by hand.
pub fn oracle_1d(problem: &Problem64, net: &Network64, k_max: usize, nq: usize) -> Vec<f64> {
    let x = nodes(nq);
    let pv = net.evaluate(&problem.cutoff, &x, DerivativeOrder::First).unwrap();
    let (u, du) = (&pv.values, &pv.gradients[0]);
    let h = PI / nq as f64;
    let src = problem.weak.source.clone();
    let left_only = problem.name == "mp2";
    (1..=k_max)
        .map(|k| {
            let mut s = 0.0;
            for i in 0..nq {
                let flux = match problem.name {
                    "mp3" => mp3_sigma(x[i]) * du[i],
                    "mp5" => du[i] + 0.5 * du[i].sin(),
                    _ => du[i],
                };
                let mut f2 = src.as_ref().map_or(0.0, |f| f(&[x[i]]));
                if problem.name == "mp5" {
                    f2 += u[i] + u[i].powi(3);
                }
                s += flux * dphi(left_only, k, x[i]) + f2 * phi(left_only, k, x[i]);
            }
            s *= h;
            match problem.name {
                "mp2" => {
                    let a = dfr_core::problems::MP2_A;
                    let g = -a / (a * PI / 2.0).cosh().powi(2);
                    s -= g * phi(true, k, PI);
                }
                "mp4" => s -= phi(false, k, PI / 2.0),
                _ => {}
            }
            s
        })
        .collect()
}

/// `⟨R(u), φ_{k₁}φ_{k₂}⟩` for MP6, `k₁, k₂ = 1..=k_max`, row-major, on an
/// `nq × nq` midpoint grid.
pub fn oracle_mp6(problem: &Problem64, net: &Network64, k_max: usize, nq: usize) -> Vec<f64> {
    let x = nodes(nq);
    let mut pts = Vec::with_capacity(2 * nq * nq);
    for &a in &x {
        for &b in &x {
            pts.extend([a, b]);
        }
    }
    let pv: PointValues<f64> = net.evaluate(&problem.cutoff, &pts, DerivativeOrder::First).unwrap();
    let src = problem.weak.source.clone().unwrap();
    let h = PI / nq as f64;
    let tab = |left: bool, d: bool| -> Vec<Vec<f64>> {
        (1..=k_max).map(|k| x.iter().map(|&t| if d { dphi(left, k, t) } else { phi(left, k, t) }).collect()).collect()
    };
    let (p0, dp0, p1, dp1) = (tab(false, false), tab(false, true), tab(true, false), tab(true, true));
    let mut fx = vec![0.0; nq * nq];
    let mut fy = vec![0.0; nq * nq];
    let mut f2 = vec![0.0; nq * nq];
    for p in 0..nq * nq {
        let xy = &pts[2 * p..2 * p + 2];
        let s = mp6_sigma(xy);
        fx[p] = s * pv.gradients[0][p];
        fy[p] = s * pv.gradients[1][p];
        f2[p] = src(xy);
    }
    let mut out = Vec::with_capacity(k_max * k_max);
    for k1 in 0..k_max {
        for k2 in 0..k_max {
            let mut s = 0.0;
            for i in 0..nq {
                for j in 0..nq {
                    let p = i * nq + j;
                    s +=
                        fx[p] * dp0[k1][i] * p1[k2][j] + fy[p] * p0[k1][i] * dp1[k2][j] + f2[p] * p0[k1][i] * p1[k2][j];
                }
            }
            s *= h * h;
            let edge: f64 = x.iter().enumerate().map(|(i, &t)| mp6_edge_flux(t) * p0[k1][i]).sum::<f64>() * h;
            s -= edge * phi(true, k2 + 1, PI);
            out.push(s);
        }
    }
    out
}

/// Every (problem, loss) pair with a defined loss.
pub fn pairs(problems: &[Problem64]) -> Vec<(usize, LossKind)> {
    let mut out = Vec::new();
    for (i, p) in problems.iter().enumerate() {
        for kind in LossKind::ALL {
            if kind != LossKind::Collocation || p.strong.is_some() {
                out.push((i, kind));
            }
        }
    }
    out
}

/// Outcome of a finite-difference gradient check.
#[derive(Debug)]
pub struct FdCheck {
    pub checked: usize,
    pub failures: usize,
    pub worst: f64,
}

/// Compares `count` randomly chosen gradient components with a fourth-order
/// central difference. A component passes when
/// `|fd − g| ≤ tol·|g| + 1e-8·max(1, |loss|)`, the second term bounding the
/// rounding error of the difference quotient.
pub fn fd_check(problem: &Problem64, kind: LossKind, n: usize, count: usize, seed: u64, tol: f64) -> FdCheck {
    let asm = LossAssembler::new(problem, kind, n).unwrap();
    let net = random_network(problem, seed);
    let (loss, grad) = asm.value_and_gradient(&net, &problem.cutoff).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx = sample(&mut rng, grad.len(), count.min(grad.len()));
    let eval = |i: usize, d: f64| {
        let mut m = net.clone();
        m.parameters_mut()[i] += d;
        asm.value(&NetworkCandidate { network: &m, cutoff: &problem.cutoff }).unwrap()
    };
    let floor = 1e-8 * loss.abs().max(1.0);
    let mut check = FdCheck { checked: 0, failures: 0, worst: 0.0 };
    for i in idx {
        let h = 1e-3 * net.parameters()[i].abs().max(1.0);
        let fd = (eval(i, -2.0 * h) - 8.0 * eval(i, -h) + 8.0 * eval(i, h) - eval(i, 2.0 * h)) / (12.0 * h);
        let err = (fd - grad[i]).abs();
        check.checked += 1;
        check.worst = check.worst.max(err / (grad[i].abs() + floor / tol));
        if err > tol * grad[i].abs() + floor {
            check.failures += 1;
        }
    }
    check
}

/// `max |a − b| / max |b|`.
pub fn normwise_rel(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    let scale = b.iter().fold(0.0f64, |m, y| m.max(y.abs()));
    diff / scale
}
