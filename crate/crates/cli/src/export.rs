//! CSV artifacts.

use std::path::Path;

use anyhow::{bail, Context, Result};
use dfr_core::metrics::ErrorReport;
use dfr_core::{DerivativeOrder, LossKind, Network64, Problem64, TrainingRecord};

pub const HISTORY_HEADER: [&str; 6] = ["iteration", "train_loss", "val_loss", "h1_rel_err_sq", "l2_rel_err_sq", "lr"];

pub fn write_history(path: &Path, history: &[TrainingRecord]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(HISTORY_HEADER)?;
    for r in history {
        w.write_record([
            r.iteration.to_string(),
            r.train_loss.to_string(),
            r.val_loss.to_string(),
            r.h1_rel_err_sq.to_string(),
            r.l2_rel_err_sq.to_string(),
            r.learning_rate.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_history(path: &Path) -> Result<Vec<TrainingRecord>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header != HISTORY_HEADER {
        bail!("{}: unexpected header {:?}", path.display(), header);
    }
    let mut out = Vec::new();
    for (i, row) in r.records().enumerate() {
        let row = row?;
        let num = |j: usize| -> Result<f64> {
            row[j].parse().with_context(|| format!("{}: row {} column {}", path.display(), i + 1, HISTORY_HEADER[j]))
        };
        out.push(TrainingRecord {
            iteration: row[0].parse().with_context(|| format!("{}: row {} iteration", path.display(), i + 1))?,
            train_loss: num(1)?,
            val_loss: num(2)?,
            h1_rel_err_sq: num(3)?,
            l2_rel_err_sq: num(4)?,
            learning_rate: num(5)?,
        });
    }
    Ok(out)
}

/// Network and exact solution on a midpoint grid of `n` points per axis.
pub fn write_solution(path: &Path, problem: &Problem64, network: &Network64, n: usize) -> Result<()> {
    let d = problem.dim();
    let points = problem.domain.midpoint_points(n)?;
    let u = network.evaluate(&problem.cutoff, &points, DerivativeOrder::First)?;
    let exact =
        problem.exact.as_ref().map(|e| dfr_core::network::PointValues::from_field(e, &points, DerivativeOrder::First));
    let mut header: Vec<String> = (1..=d).map(|i| if d == 1 { "x".into() } else { format!("x{i}") }).collect();
    header.push("u".into());
    header.push("u_exact".into());
    for i in 1..=d {
        header.push(format!("du_dx{i}"));
        header.push(format!("du_dx{i}_exact"));
    }
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(&header)?;
    for p in 0..points.len() / d {
        let mut row: Vec<String> = points[p * d..(p + 1) * d].iter().map(f64::to_string).collect();
        row.push(u.values[p].to_string());
        row.push(exact.as_ref().map_or(f64::NAN, |e| e.values[p]).to_string());
        for i in 0..d {
            row.push(u.gradients[i][p].to_string());
            row.push(exact.as_ref().map_or(f64::NAN, |e| e.gradients[i][p]).to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Final metrics of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub problem: String,
    pub loss: LossKind,
    pub errors: Option<ErrorReport>,
    pub final_train_loss: f64,
    pub iterations: usize,
    pub stopped_early: bool,
    pub best_iteration: usize,
    pub stalls: usize,
}

pub fn write_errors(path: &Path, s: &RunSummary) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["metric", "value"])?;
    let (h1, l2) = s.errors.map_or((f64::NAN, f64::NAN), |e| (e.h1_rel, e.l2_rel));
    let rows = [
        ("problem", s.problem.clone()),
        ("loss", s.loss.name().to_string()),
        ("h1_rel_err_percent", h1.to_string()),
        ("l2_rel_err_percent", l2.to_string()),
        ("final_train_loss", s.final_train_loss.to_string()),
        ("iterations", s.iterations.to_string()),
        ("stopped_early", s.stopped_early.to_string()),
        ("best_iteration", s.best_iteration.to_string()),
        ("stalls", s.stalls.to_string()),
    ];
    for (k, v) in rows {
        w.write_record([k, v.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_comparison(path: &Path, rows: &[RunSummary]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["loss", "h1_rel_err_percent", "l2_rel_err_percent", "final_train_loss", "iterations"])?;
    for s in rows {
        let (h1, l2) = s.errors.map_or((f64::NAN, f64::NAN), |e| (e.h1_rel, e.l2_rel));
        w.write_record([
            s.loss.name().to_string(),
            h1.to_string(),
            l2.to_string(),
            s.final_train_loss.to_string(),
            s.iterations.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
