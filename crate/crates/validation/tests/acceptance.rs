//! One line per acceptance criterion, `PASS` or `FAIL`, with the measured
//! quantities. Exits non-zero when any criterion fails.
//!
//! The 200² MP6 run takes hours on one core and only runs when
//! `DFR_ACCEPTANCE_FULL=1`; otherwise criterion 10 reports the full run as
//! not executed and fails.

use std::error::Error;
use std::f64::consts::PI;
use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use dfr_core::basis::{Basis1D, DirichletMask1D};
use dfr_core::losses::dfr_loss;
use dfr_core::metrics::{default_error_points, loss_error_correlation, sample_candidate, ErrorEvaluator, ErrorReport};
use dfr_core::problems::{mp1, mp2, mp3, mp3_spurious, mp4, mp5, mp6};
use dfr_core::transforms::{build_transform_matrix, TransformKind, TransformPlan};
use dfr_core::{
    all_problems, init_network, residual_spectrum, AnalyticField, LossAssembler, LossKind, Network64, NetworkCandidate,
    Problem64, TrainConfig, Trainer, TrainingRecord,
};
use dfr_validation::{fd_check, normwise_rel, oracle_1d, oracle_mp6, pairs, random_network};

type Outcome = Result<(bool, String), Box<dyn Error>>;

const MAX_ITERATIONS: usize = 100_000;
/// Records before this iteration are excluded from the correlation.
const BURN_IN: usize = 1000;

fn emit(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
}

fn cand<'a>(net: &'a Network64, p: &'a Problem64) -> NetworkCandidate<'a, f64> {
    NetworkCandidate { network: net, cutoff: &p.cutoff }
}

struct Run {
    network: Network64,
    iterations: usize,
    stopped_early: bool,
    history: Vec<TrainingRecord>,
    report: ErrorReport,
}

/// Trains from the seed-0 initialisation. With `target`, stops as soon as a
/// check every `check_every` iterations finds the H¹ error at or below it.
fn train_run(
    p: &Problem64,
    config: TrainConfig,
    target: Option<f64>,
    check_every: usize,
) -> Result<Run, Box<dyn Error>> {
    let eval = ErrorEvaluator::new(p, default_error_points(p.dim()))?;
    let mut trainer = Trainer::new(p, &config, init_network(&p.architecture(config.seed))?)?;
    let mut history = Vec::new();
    let mut stopped = false;
    while trainer.iteration() < config.max_iterations {
        let r = trainer.step()?;
        if let Some(rec) = r.record {
            history.push(rec);
        }
        if r.stop {
            stopped = true;
            break;
        }
        if let Some(t) = target {
            if trainer.iteration() % check_every == 0 && eval.report(&cand(trainer.network(), p))?.h1_rel <= t {
                break;
            }
        }
    }
    let out = trainer.finish(history, stopped)?;
    let report = eval.report(&cand(&out.network, p))?;
    Ok(Run {
        iterations: out.iterations,
        stopped_early: out.stopped_early,
        history: out.history,
        network: out.network,
        report,
    })
}

fn config(p: &Problem64, kind: LossKind, iterations: usize) -> TrainConfig {
    TrainConfig { max_iterations: iterations, ..TrainConfig::for_problem(p, kind) }
}

fn transforms() -> Outcome {
    let sizes = [1, 2, 8, 64, 200, 274];
    let (mut orth, mut jcd, mut fast) = (0.0f64, 0.0f64, 0.0f64);
    for kind in TransformKind::ALL {
        for n in sizes {
            let m = build_transform_matrix::<f64>(kind, n)?;
            for a in 0..n {
                for b in 0..n {
                    let dot: f64 = (0..n).map(|k| m[k * n + a] * m[k * n + b]).sum();
                    orth = orth.max((dot - if a == b { 1.0 } else { 0.0 }).abs());
                }
            }
            if kind.is_sine() {
                let c = build_transform_matrix::<f64>(kind.partner(), n)?;
                for k in 0..n {
                    for j in 0..n {
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        jcd = jcd.max((m[k * n + j] - sign * c[(n - 1 - k) * n + j]).abs());
                    }
                }
            }
            let plan = TransformPlan::<f64>::new(kind, n)?;
            let x: Vec<f64> = (0..n).map(|i| ((i * 7919 % 1013) as f64 / 1013.0 - 0.5) * 3.0).collect();
            let (a, b) = (plan.apply_fast(&x)?, plan.apply_dense(&x)?);
            let (c, d) = (plan.apply_transpose_fast(&x)?, plan.apply_transpose_dense(&x)?);
            for i in 0..n {
                fast = fast.max((a[i] - b[i]).abs()).max((c[i] - d[i]).abs());
            }
        }
    }
    let pass = orth <= 1e-12 && jcd <= 1e-14 && fast <= 1e-10;
    Ok((
        pass,
        format!(
            "max |MᵀM − I| {orth:.1e} (≤ 1e-12), |S − JCD| {jcd:.1e} (≤ 1e-14), fast vs dense {fast:.1e} (≤ 1e-10)"
        ),
    ))
}

fn basis() -> Outcome {
    let m = 10_000;
    let h = PI / m as f64;
    let nodes: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) * h).collect();
    let (mut ortho, mut eigen, mut h1) = (0.0f64, 0.0f64, 0.0f64);
    for mask in DirichletMask1D::ALL {
        let b = Basis1D::<f64>::new(mask, 0.0, PI)?;
        let tab = |d: bool| -> Result<Vec<Vec<f64>>, Box<dyn Error>> {
            (1..=20)
                .map(|k| {
                    nodes.iter().map(|&x| Ok(if d { b.eval_phi_prime(k, x)? } else { b.eval_phi(k, x)? })).collect()
                })
                .collect()
        };
        let (v, dv) = (tab(false)?, tab(true)?);
        let dot = |a: &[f64], c: &[f64]| a.iter().zip(c).map(|(x, y)| x * y).sum::<f64>() * h;
        for k in 0..20 {
            let lambda = b.eigenvalue(k + 1)?;
            h1 = h1.max((dot(&v[k], &v[k]) + dot(&dv[k], &dv[k]) - lambda).abs());
            for j in 0..20 {
                let delta = if j == k { 1.0 } else { 0.0 };
                ortho = ortho.max((dot(&v[k], &v[j]) - delta).abs());
                eigen = eigen.max((dot(&dv[k], &dv[j]) + dot(&v[k], &v[j]) - lambda * delta).abs());
            }
        }
    }
    let pass = ortho <= 1e-8 && eigen <= 1e-6 && h1 <= 1e-6;
    Ok((pass, format!("L² orthonormality {ortho:.1e} (≤ 1e-8), eigen-relation {eigen:.1e} (≤ 1e-6), |‖φ‖²_H¹ − λ| {h1:.1e} (≤ 1e-6)")))
}

fn gradients() -> Outcome {
    let problems: Vec<Problem64> = all_problems();
    let (mut failures, mut checked, mut worst) = (0, 0, 0.0f64);
    for (i, kind) in pairs(&problems) {
        let p = &problems[i];
        let n = if p.dim() == 1 { 200 } else { 20 };
        let c = fd_check(p, kind, n, 50, 7 + i as u64, 1e-5);
        failures += c.failures + 50 - c.checked;
        checked += c.checked;
        worst = worst.max(c.worst);
    }
    Ok((
        failures == 0,
        format!(
            "{checked} components over {} pairs, {failures} outside 1e-5, worst scaled error {worst:.1e}",
            pairs(&problems).len()
        ),
    ))
}

fn exact_residuals() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for p in all_problems::<f64>() {
        let exact = p.exact.clone().ok_or("no exact solution")?;
        let loss = dfr_loss(&residual_spectrum(&p, &exact, 200)?);
        let tol = if p.dim() == 1 { 1e-6 } else { 1e-3 };
        pass &= loss <= tol;
        parts.push(format!("{} {loss:.1e}{}", p.name, if loss <= tol { "" } else { " (over)" }));
    }
    Ok((pass, format!("dfr_loss(u*) at N=200: {}", parts.join(", "))))
}

fn mp1_table() -> Outcome {
    let p: Problem64 = mp1();
    let mut pass = true;
    let mut parts = Vec::new();
    for kind in LossKind::ALL {
        let run = train_run(&p, config(&p, kind, MAX_ITERATIONS), Some(0.1), 1000)?;
        pass &= run.report.h1_rel <= 0.1;
        parts.push(format!("{kind} {:.4}% at {}", run.report.h1_rel, run.iterations));
    }
    Ok((pass, format!("H¹ ≤ 0.1%: {}", parts.join(", "))))
}

fn mp2_table() -> Outcome {
    let p: Problem64 = mp2();
    let mut errs = Vec::new();
    for kind in LossKind::ALL {
        errs.push(train_run(&p, config(&p, kind, MAX_ITERATIONS), None, 0)?.report.h1_rel);
    }
    let (dfr, vp, col) = (errs[0], errs[1], errs[2]);
    let pass = dfr <= 0.5 && vp <= 2.0 && col <= 2.0 && dfr < vp && dfr < col;
    Ok((
        pass,
        format!("H¹ after {MAX_ITERATIONS}: dfr {dfr:.4}% (≤ 0.5), vpinn {vp:.4}% (≤ 2), collocation {col:.4}% (≤ 2)"),
    ))
}

/// `‖u − f‖_{H¹}` on a 10⁴-point midpoint grid of `(0, π)`.
fn h1_distance(net: &Network64, p: &Problem64, f: &AnalyticField<f64>) -> Result<f64, Box<dyn Error>> {
    let m = 10_000;
    let h = PI / m as f64;
    let x: Vec<f64> = (0..m).map(|i| (i as f64 + 0.5) * h).collect();
    let pv = sample_candidate(&cand(net, p), &x)?;
    let s: f64 = (0..m)
        .map(|i| (pv.values[i] - f.value(&x[i..=i])).powi(2) + (pv.gradients[0][i] - f.gradient(&x[i..=i])[0]).powi(2))
        .sum();
    Ok((s * h).sqrt())
}

fn mp3_table() -> Outcome {
    let p: Problem64 = mp3();
    let dfr = train_run(&p, config(&p, LossKind::Dfr, MAX_ITERATIONS), Some(5.0), 1000)?;
    let col = train_run(&p, config(&p, LossKind::Collocation, 20_000), None, 0)?;
    let to_exact = h1_distance(&col.network, &p, p.exact.as_ref().ok_or("no exact solution")?)?;
    let to_spurious = h1_distance(&col.network, &p, &mp3_spurious())?;
    let pass = dfr.report.h1_rel <= 5.0 && col.report.h1_rel >= 30.0 && to_spurious < to_exact;
    Ok((
        pass,
        format!(
            "dfr H¹ {:.3}% at {} (≤ 5), collocation H¹ {:.2}% at {} (≥ 30), collocation H¹ distance to ũ {to_spurious:.3e} vs u* {to_exact:.3e}",
            dfr.report.h1_rel, dfr.iterations, col.report.h1_rel, col.iterations
        ),
    ))
}

fn mp4_point_source() -> Outcome {
    let p: Problem64 = mp4();
    let run = train_run(&p, config(&p, LossKind::Dfr, MAX_ITERATIONS), None, 0)?;
    let pass = run.report.l2_rel <= 0.5 && run.report.h1_rel <= 10.0;
    Ok((
        pass,
        format!(
            "L² {:.4}% (≤ 0.5), H¹ {:.3}% (≤ 10), {} iterations, early stop {}",
            run.report.l2_rel, run.report.h1_rel, run.iterations, run.stopped_early
        ),
    ))
}

fn mp5_nonlinear() -> Outcome {
    let p: Problem64 = mp5();
    let run = train_run(&p, config(&p, LossKind::Dfr, MAX_ITERATIONS), None, 0)?;
    let r = loss_error_correlation(&run.history, BURN_IN)?;
    let pass = run.report.h1_rel <= 1.0 && r >= 0.95;
    Ok((
        pass,
        format!(
            "H¹ {:.3}% (≤ 1) after {} iterations (early stop {}), Pearson r {r:.4} after iteration {BURN_IN} (≥ 0.95)",
            run.report.h1_rel, run.iterations, run.stopped_early
        ),
    ))
}

fn mp6_two_dimensional() -> Outcome {
    let p: Problem64 = mp6();
    let smoke_cfg = TrainConfig { n_train: 50, n_val: 68, ..config(&p, LossKind::Dfr, 20_000) };
    let smoke = train_run(&p, smoke_cfg, Some(25.0), 500)?;
    let smoke_ok = smoke.report.h1_rel <= 25.0;
    let full = if std::env::var("DFR_ACCEPTANCE_FULL").as_deref() == Ok("1") {
        let run = train_run(&p, config(&p, LossKind::Dfr, MAX_ITERATIONS), Some(10.0), 500)?;
        Some((run.report.h1_rel <= 10.0, format!("200² H¹ {:.3}% after {} (≤ 10)", run.report.h1_rel, run.iterations)))
    } else {
        None
    };
    let (full_ok, full_text) = full.unwrap_or((false, "200² run not executed (set DFR_ACCEPTANCE_FULL=1)".into()));
    Ok((
        smoke_ok && full_ok,
        format!("50² smoke H¹ {:.3}% at {} (≤ 25 within 20000); {full_text}", smoke.report.h1_rel, smoke.iterations),
    ))
}

fn oracle_equivalence() -> Outcome {
    let (mut worst, mut coarse) = (0.0f64, 0.0f64);
    for p in all_problems::<f64>() {
        for seed in 0..5 {
            let net = random_network(&p, seed);
            let c = cand(&net, &p);
            let (mine, oracle, at_200) = if p.dim() == 1 {
                let oracle = oracle_1d(&p, &net, 10, 100_000);
                let s = residual_spectrum(&p, &c, 100_000)?;
                (s.coefficients[..10].to_vec(), oracle, residual_spectrum(&p, &c, 200)?.coefficients[..10].to_vec())
            } else {
                let oracle = oracle_mp6(&p, &net, 10, 316);
                let pick = |n: usize| -> Result<Vec<f64>, Box<dyn Error>> {
                    let s = residual_spectrum(&p, &c, n)?;
                    Ok((1..=10)
                        .flat_map(|a| (1..=10).map(move |b| [a, b]))
                        .map(|k| s.get(&k).unwrap_or(f64::NAN))
                        .collect())
                };
                (pick(316)?, oracle, pick(200)?)
            };
            worst = worst.max(normwise_rel(&mine, &oracle));
            coarse = coarse.max(normwise_rel(&at_200, &oracle));
        }
    }
    Ok((
        worst <= 1e-4,
        format!("k ≤ 10, 5 networks per problem, shared 10⁵-point grid: {worst:.1e} (≤ 1e-4); training grid N=200 vs oracle: {coarse:.1e}"),
    ))
}

fn bits(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| x.to_bits()).collect()
}

fn rollback_and_stopping() -> Outcome {
    let p: Problem64 = mp1();
    let cfg = TrainConfig { history_error_points: 200, ..TrainConfig::for_problem(&p, LossKind::Dfr) };
    let mut trainer = Trainer::new(&p, &cfg, random_network(&p, 5))?;
    for _ in 0..20 {
        trainer.step()?;
    }
    let (params, adam) = (bits(trainer.network().parameters()), trainer.adam().clone());
    trainer.set_learning_rate(1e3);
    let rejected = !trainer.step()?.accepted;
    let rollback = rejected
        && bits(trainer.network().parameters()) == params
        && bits(&trainer.adam().first_moment) == bits(&adam.first_moment)
        && bits(&trainer.adam().second_moment) == bits(&adam.second_moment)
        && trainer.adam().step_count == adam.step_count;

    let q: Problem64 = mp4();
    let base =
        TrainConfig { early_stopping: true, history_error_points: 200, ..TrainConfig::for_problem(&q, LossKind::Dfr) };
    let flat = TrainConfig { initial_lr: 1e-300, lr_min: 1e-300, lr_max: 1e-300, ..base.clone() };
    let net = random_network(&q, 2);
    let initial = bits(net.parameters());
    let mut t = Trainer::new(&q, &flat, net)?;
    let mut stop_at = None;
    while t.iteration() < 10 * flat.patience {
        if t.step()?.stop {
            stop_at = Some(t.iteration());
            break;
        }
    }
    let out = t.finish(Vec::new(), true)?;
    let flat_ok = stop_at.is_some_and(|s| s <= flat.patience + 1) && bits(out.network.parameters()) == initial;

    // improve for 60 steps, then freeze the parameters
    let net = random_network(&q, 2);
    let val = LossAssembler::new(&q, LossKind::Dfr, base.n_val)?;
    let mut best = (val.value(&cand(&net, &q))?, 0);
    let mut t = Trainer::new(&q, &base, net)?;
    let mut snapshots = vec![bits(t.network().parameters())];
    for _ in 0..60 {
        let r = t.step()?;
        snapshots.push(bits(t.network().parameters()));
        if let Some(v) = r.val_loss.filter(|&v| v < best.0) {
            best = (v, r.iteration);
        }
    }
    t.set_learning_rate(1e-300);
    let mut stop_at_best = None;
    while t.iteration() < 60 + 10 * base.patience {
        if t.step()?.stop {
            stop_at_best = Some(t.iteration());
            break;
        }
    }
    let out = t.finish(Vec::new(), true)?;
    let best_ok = best.1 > 0
        && stop_at_best.is_some_and(|s| s <= best.1 + base.patience + 1)
        && out.best_iteration == best.1
        && bits(out.network.parameters()) == snapshots[best.1];
    Ok((
        rollback && flat_ok && best_ok,
        format!(
            "rollback bit-exact {rollback}; flat loss stopped at {stop_at:?} (≤ {}) with initial parameters {flat_ok}; best checkpoint {} restored after stop at {stop_at_best:?}: {best_ok}",
            flat.patience + 1,
            best.1
        ),
    ))
}

fn main() -> ExitCode {
    let criteria: [(u8, &str, fn() -> Outcome); 12] = [
        (1, "transforms", transforms),
        (2, "basis", basis),
        (3, "gradient engine", gradients),
        (4, "exact-solution residual", exact_residuals),
        (5, "MP1 losses", mp1_table),
        (6, "MP2 losses", mp2_table),
        (7, "MP3 interface", mp3_table),
        (8, "MP4 point source", mp4_point_source),
        (9, "MP5 nonlinear", mp5_nonlinear),
        (10, "MP6 two-dimensional", mp6_two_dimensional),
        (11, "oracle equivalence", oracle_equivalence),
        (12, "rollback and stopping", rollback_and_stopping),
    ];
    let only: Vec<u8> = std::env::var("DFR_ACCEPTANCE_ONLY")
        .map(|s| s.split(',').filter_map(|t| t.trim().parse().ok()).collect())
        .unwrap_or_default();
    let mut failed = 0;
    for (id, name, run) in criteria {
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let t = Instant::now();
        let (pass, detail) = run().unwrap_or_else(|e| (false, format!("error: {e}")));
        failed += usize::from(!pass);
        let verdict = if pass { "PASS" } else { "FAIL" };
        emit(&format!("criterion {id:2} {verdict} {name}: {detail} [{:.1} s]", t.elapsed().as_secs_f64()));
    }
    emit(&format!("acceptance: {failed} failed"));
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
