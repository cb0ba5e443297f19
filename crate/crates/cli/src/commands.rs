use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use dfr_core::metrics::{default_error_points, loss_error_correlation, ErrorEvaluator};
use dfr_core::{
    all_problems, init_network, initial_record, train_network, LossKind, Network64, NetworkCandidate, TrainingRecord,
};

use crate::config::ExperimentConfig;
use crate::export::{read_history, write_comparison, write_errors, write_history, write_solution, RunSummary};
use crate::svg::{render, ChartKind};

/// Trains one configuration and writes its artifacts into `cfg.out`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let problem = cfg.problem_spec()?;
    if cfg.loss == LossKind::Collocation && problem.strong.is_none() {
        bail!("configuration error: problem {} has no strong form, so the collocation loss is undefined", problem.name);
    }
    cfg.train.validate()?;
    let network: Network64 = match &cfg.resume {
        Some(path) => {
            let net = Network64::load(path).with_context(|| format!("loading {}", path.display()))?;
            let expected = problem.architecture(cfg.train.seed).widths();
            if net.widths() != expected.as_slice() {
                bail!("checkpoint widths {:?} do not match the architecture {:?}", net.widths(), expected);
            }
            net
        }
        None => init_network(&problem.architecture(cfg.train.seed))?,
    };
    fs::create_dir_all(&cfg.out).with_context(|| format!("creating {}", cfg.out.display()))?;

    let mut history = vec![initial_record(&problem, &cfg.train, &network)?];
    let outcome = train_network(&problem, &cfg.train, network, |r| {
        if r.iteration % 1000 == 0 {
            println!(
                "{:>7}  loss {:.4e}  val {:.4e}  H1 {:.4}%  lr {:.2e}",
                r.iteration,
                r.train_loss,
                r.val_loss,
                100.0 * r.h1_rel_err_sq.sqrt(),
                r.learning_rate
            );
        }
    })?;
    if !outcome.final_train_loss.is_finite() {
        bail!(
            "training diverged: final loss {} after {} iterations ({} accepted, {} rejected, {} stalls)",
            outcome.final_train_loss,
            outcome.iterations,
            outcome.accepted_steps,
            outcome.rejected_steps,
            outcome.stalls
        );
    }
    history.extend_from_slice(&outcome.history);

    let errors = match problem.exact {
        Some(_) => Some(
            ErrorEvaluator::new(&problem, default_error_points(problem.dim()))?
                .report(&NetworkCandidate { network: &outcome.network, cutoff: &problem.cutoff })?,
        ),
        None => None,
    };
    let summary = RunSummary {
        problem: problem.name.to_string(),
        loss: cfg.loss,
        errors,
        final_train_loss: outcome.final_train_loss,
        iterations: outcome.iterations,
        stopped_early: outcome.stopped_early,
        best_iteration: outcome.best_iteration,
        stalls: outcome.stalls,
    };

    write_history(&cfg.out.join("history.csv"), &history)?;
    write_solution(&cfg.out.join("solution.csv"), &problem, &outcome.network, cfg.solution_points)?;
    write_errors(&cfg.out.join("errors.csv"), &summary)?;
    outcome.network.save(cfg.out.join("params.bin"))?;
    if cfg.svg && cfg.train.max_iterations > 0 {
        for kind in ChartKind::ALL {
            if let Ok(svg) = render(&history, kind) {
                fs::write(cfg.out.join(format!("{}.svg", kind.name())), svg)?;
            }
        }
    }

    match errors {
        Some(e) => println!(
            "{} {}: H1 {:.4}%  L2 {:.4}%  loss {:.4e}  iterations {}",
            summary.problem, summary.loss, e.h1_rel, e.l2_rel, summary.final_train_loss, summary.iterations
        ),
        None => println!("{} {}: loss {:.4e}", summary.problem, summary.loss, summary.final_train_loss),
    }
    if let Ok(r) = loss_error_correlation(&history, 100) {
        println!("loss/error correlation after 100 iterations: r = {r:.4}");
    }
    Ok(summary)
}

/// Runs `base` once per loss kind into `out/<loss>/` and writes
/// `out/compare.csv`.
pub fn compare(base: &ExperimentConfig, losses: &[LossKind]) -> Result<Vec<RunSummary>> {
    if losses.is_empty() {
        bail!("usage: compare needs at least one loss kind");
    }
    let mut rows = Vec::new();
    for &loss in losses {
        let mut cfg = base.clone();
        cfg.loss = loss;
        cfg.train.loss_kind = loss;
        cfg.out = base.out.join(loss.name());
        rows.push(run(&cfg)?);
    }
    fs::create_dir_all(&base.out)?;
    write_comparison(&base.out.join("compare.csv"), &rows)?;
    println!("{}", comparison_table(&rows));
    Ok(rows)
}

pub fn comparison_table(rows: &[RunSummary]) -> String {
    let mut s = format!("{:<12} {:>14} {:>14} {:>14}\n", "loss", "H1 error (%)", "L2 error (%)", "final loss");
    for r in rows {
        let (h1, l2) = r.errors.map_or((f64::NAN, f64::NAN), |e| (e.h1_rel, e.l2_rel));
        s.push_str(&format!("{:<12} {:>14.4e} {:>14.4e} {:>14.4e}\n", r.loss.name(), h1, l2, r.final_train_loss));
    }
    s
}

/// Renders a history CSV as an SVG chart.
pub fn plot(history: &Path, kind: ChartKind, out: &Path) -> Result<()> {
    let records: Vec<TrainingRecord> = read_history(history)?;
    let svg = render(&records, kind).map_err(|e| anyhow!("{}: {e}", history.display()))?;
    fs::write(out, svg).with_context(|| format!("writing {}", out.display()))?;
    Ok(())
}

pub fn list_problems() -> String {
    let mut s = String::new();
    for p in all_problems::<f64>() {
        let losses: Vec<&str> = LossKind::ALL
            .into_iter()
            .filter(|k| *k != LossKind::Collocation || p.strong.is_some())
            .map(LossKind::name)
            .collect();
        s.push_str(&format!("{:<5} {}D  [{}]  {}\n", p.name, p.dim(), losses.join(", "), p.description));
    }
    s
}
