//! Relative errors against exact solutions and loss/error correlation.

use crate::error::{DfrError, Result};
use crate::network::{Candidate, DerivativeOrder, PointValues};
use crate::problems::ProblemSpec;
use crate::scalar::Real;
use crate::tape::Tape;
use crate::training::TrainingRecord;

/// Default fine-grid resolution per axis for final errors.
pub fn default_error_points(dim: usize) -> usize {
    if dim == 1 {
        10_000
    } else {
        500
    }
}

const CHUNK: usize = 4096;

/// Relative errors in percent.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ErrorReport {
    pub h1_rel: f64,
    pub l2_rel: f64,
}

impl ErrorReport {
    pub fn h1_rel_sq(&self) -> f64 {
        (self.h1_rel / 100.0).powi(2)
    }

    pub fn l2_rel_sq(&self) -> f64 {
        (self.l2_rel / 100.0).powi(2)
    }
}

/// Samples `candidate` in chunks without keeping a tape alive.
pub fn sample_candidate<T: Real, C: Candidate<T> + ?Sized>(candidate: &C, points: &[T]) -> Result<PointValues<T>> {
    let d = candidate.dim();
    let mut out = PointValues { values: Vec::new(), gradients: vec![Vec::new(); d], second: Vec::new() };
    for chunk in points.chunks(CHUNK * d) {
        let mut tape = Tape::new();
        let rec = candidate.record(&mut tape, chunk, DerivativeOrder::First)?;
        out.values.extend_from_slice(tape.value(rec.sample.value).data());
        for (dst, &g) in out.gradients.iter_mut().zip(&rec.sample.gradient) {
            dst.extend_from_slice(tape.value(g).data());
        }
    }
    Ok(out)
}

/// Midpoint-rule error evaluator with the exact solution sampled once.
#[derive(Clone, Debug)]
pub struct ErrorEvaluator<T> {
    points: Vec<T>,
    exact: PointValues<T>,
    l2_norm_sq: f64,
    h1_norm_sq: f64,
}

impl<T: Real> ErrorEvaluator<T> {
    pub fn new(problem: &ProblemSpec<T>, n_fine: usize) -> Result<Self> {
        let exact = problem
            .exact
            .as_ref()
            .ok_or_else(|| DfrError::UnsupportedMetric(format!("problem {} has no exact solution", problem.name)))?;
        let points = problem.domain.midpoint_points(n_fine)?;
        let ev = PointValues::from_field(exact, &points, DerivativeOrder::First);
        let l2: f64 = ev.values.iter().map(|v| sq(*v)).sum();
        let semi: f64 = ev.gradients.iter().flatten().map(|v| sq(*v)).sum();
        Ok(Self { points, exact: ev, l2_norm_sq: l2, h1_norm_sq: l2 + semi })
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn report<C: Candidate<T> + ?Sized>(&self, candidate: &C) -> Result<ErrorReport> {
        let pv = sample_candidate(candidate, &self.points)?;
        Ok(self.report_values(&pv))
    }

    pub fn report_values(&self, pv: &PointValues<T>) -> ErrorReport {
        let l2: f64 = pv.values.iter().zip(&self.exact.values).map(|(&u, &e)| sq(u - e)).sum();
        let semi: f64 = pv
            .gradients
            .iter()
            .zip(&self.exact.gradients)
            .flat_map(|(g, e)| g.iter().zip(e).map(|(&a, &b)| sq(a - b)))
            .sum();
        ErrorReport {
            h1_rel: 100.0 * ((l2 + semi) / self.h1_norm_sq).sqrt(),
            l2_rel: 100.0 * (l2 / self.l2_norm_sq).sqrt(),
        }
    }
}

fn sq<T: Real>(v: T) -> f64 {
    let f = v.to_f64().unwrap_or(f64::NAN);
    f * f
}

/// `100 ‖u − u*‖_{H¹} / ‖u*‖_{H¹}` by the midpoint rule on `n_fine` points
/// per axis.
pub fn h1_relative_error<T: Real, C: Candidate<T> + ?Sized>(
    problem: &ProblemSpec<T>,
    candidate: &C,
    n_fine: usize,
) -> Result<f64> {
    Ok(ErrorEvaluator::new(problem, n_fine)?.report(candidate)?.h1_rel)
}

/// `100 ‖u − u*‖_{L²} / ‖u*‖_{L²}`.
pub fn l2_relative_error<T: Real, C: Candidate<T> + ?Sized>(
    problem: &ProblemSpec<T>,
    candidate: &C,
    n_fine: usize,
) -> Result<f64> {
    Ok(ErrorEvaluator::new(problem, n_fine)?.report(candidate)?.l2_rel)
}

/// Pearson correlation coefficient.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(DfrError::InsufficientData("need at least two paired samples".into()));
    }
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(DfrError::InsufficientData("a series is constant".into()));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// Pearson `r` of `(log √train_loss, log h1_rel)` over records at or after
/// `burn_in`.
pub fn loss_error_correlation(history: &[TrainingRecord], burn_in: usize) -> Result<f64> {
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for r in history.iter().filter(|r| r.iteration >= burn_in) {
        if r.train_loss > 0.0 && r.h1_rel_err_sq > 0.0 && r.train_loss.is_finite() && r.h1_rel_err_sq.is_finite() {
            x.push(0.5 * r.train_loss.ln());
            y.push(0.5 * r.h1_rel_err_sq.ln());
        }
    }
    if x.len() < 10 {
        return Err(DfrError::InsufficientData(format!("{} usable records after burn-in, need 10", x.len())));
    }
    pearson(&x, &y)
}
