//! Full-batch Adam with accept/reject learning-rate control and validation
//! early stopping.

use crate::error::{DfrError, Result};
use crate::losses::{LossAssembler, LossKind};
use crate::metrics::ErrorEvaluator;
use crate::network::{init_network, Network, NetworkCandidate};
use crate::problems::ProblemSpec;
use crate::scalar::{lit, Real};

pub const ADAM_BETA1: f64 = 0.9;
pub const ADAM_BETA2: f64 = 0.999;
pub const ADAM_EPSILON: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub struct AdamState<T> {
    pub first_moment: Vec<T>,
    pub second_moment: Vec<T>,
    pub step_count: u64,
}

impl<T: Real> AdamState<T> {
    pub fn new(parameters: usize) -> Self {
        Self { first_moment: vec![T::zero(); parameters], second_moment: vec![T::zero(); parameters], step_count: 0 }
    }
}

/// One bias-corrected Adam update. A non-finite gradient leaves both the
/// parameters and the state untouched.
pub fn adam_step<T: Real>(state: &mut AdamState<T>, params: &mut [T], grads: &[T], lr: T) -> Result<()> {
    if params.len() != grads.len() || state.first_moment.len() != params.len() {
        return Err(DfrError::Shape(format!(
            "{} parameters, {} gradients, {} moments",
            params.len(),
            grads.len(),
            state.first_moment.len()
        )));
    }
    if grads.iter().any(|g| !g.is_finite()) {
        return Err(DfrError::NonFiniteGradient);
    }
    let (b1, b2, eps) = (lit::<T>(ADAM_BETA1), lit::<T>(ADAM_BETA2), lit::<T>(ADAM_EPSILON));
    state.step_count += 1;
    let t = state.step_count as i32;
    let c1 = T::one() - b1.powi(t);
    let c2 = T::one() - b2.powi(t);
    for i in 0..params.len() {
        let g = grads[i];
        let m = b1 * state.first_moment[i] + (T::one() - b1) * g;
        let v = b2 * state.second_moment[i] + (T::one() - b2) * g * g;
        state.first_moment[i] = m;
        state.second_moment[i] = v;
        params[i] -= lr * (m / c1) / ((v / c2).sqrt() + eps);
    }
    Ok(())
}

/// Grows the step after accepted iterations and shrinks it after rejected
/// ones.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveLr {
    pub lr: f64,
    pub up: f64,
    pub down: f64,
    pub min: f64,
    pub max: f64,
}

impl AdaptiveLr {
    /// Applies the rule for a candidate step; returns whether it is accepted.
    pub fn step(&mut self, previous_loss: f64, new_loss: f64) -> bool {
        let accept = new_loss.is_finite() && new_loss <= previous_loss;
        self.lr = if accept { (self.lr * self.up).min(self.max) } else { (self.lr * self.down).max(self.min) };
        accept
    }

    pub fn at_floor(&self) -> bool {
        self.lr <= self.min
    }
}

/// Tracks the best validation loss and the parameters that produced it.
#[derive(Clone, Debug)]
pub struct EarlyStopping<T> {
    pub patience: usize,
    pub best_loss: f64,
    pub best_iteration: usize,
    pub best_params: Vec<T>,
}

impl<T: Real> EarlyStopping<T> {
    pub fn new(patience: usize, initial_loss: f64, params: &[T]) -> Self {
        Self { patience, best_loss: initial_loss, best_iteration: 0, best_params: params.to_vec() }
    }

    /// Records the validation loss at `iteration`; returns `true` once more
    /// than `patience` iterations have passed without improvement.
    pub fn observe(&mut self, iteration: usize, val_loss: f64, params: &[T]) -> bool {
        if val_loss < self.best_loss {
            self.best_loss = val_loss;
            self.best_iteration = iteration;
            self.best_params.copy_from_slice(params);
        }
        iteration - self.best_iteration > self.patience
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub loss_kind: LossKind,
    /// Training grid points per axis.
    pub n_train: usize,
    /// Validation grid points per axis.
    pub n_val: usize,
    pub max_iterations: usize,
    pub initial_lr: f64,
    pub lr_up: f64,
    pub lr_down: f64,
    pub lr_min: f64,
    pub lr_max: f64,
    pub patience: usize,
    pub early_stopping: bool,
    /// Roll the Adam moments back with the parameters on a rejected step.
    /// When false only the parameters are restored and the moments keep
    /// the rejected update.
    pub restore_moments: bool,
    pub log_every: usize,
    /// Thin logged records logarithmically past 1000 iterations.
    pub thin_log: bool,
    /// Fine-grid points per axis for errors recorded in the history;
    /// `0` disables error tracking.
    pub history_error_points: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            loss_kind: LossKind::Dfr,
            n_train: 200,
            n_val: 274,
            max_iterations: 100_000,
            initial_lr: 1e-2,
            lr_up: 1.1,
            lr_down: 0.5,
            lr_min: 1e-12,
            lr_max: 1e-1,
            patience: 200,
            early_stopping: false,
            restore_moments: true,
            log_every: 10,
            thin_log: true,
            history_error_points: 2000,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// Reference protocol for `problem` with loss `kind`.
    pub fn for_problem<T: Real>(problem: &ProblemSpec<T>, kind: LossKind) -> Self {
        Self {
            loss_kind: kind,
            early_stopping: problem.early_stopping,
            history_error_points: if problem.dim() == 1 { 2000 } else { 100 },
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(DfrError::Configuration(m.to_string()));
        if !(0.0 < self.lr_down && self.lr_down < 1.0 && 1.0 < self.lr_up) {
            return bad("learning-rate factors must satisfy 0 < lr_down < 1 < lr_up");
        }
        if !(0.0 < self.lr_min && self.lr_min <= self.lr_max) {
            return bad("learning-rate bounds must satisfy 0 < lr_min <= lr_max");
        }
        if !(self.initial_lr > 0.0) {
            return bad("initial learning rate must be positive");
        }
        if self.n_train % 2 != 0 || self.n_val % 2 != 0 || self.n_train < 2 || self.n_val < 2 {
            return bad("grid sizes must be even and at least 2");
        }
        if self.log_every == 0 {
            return bad("log_every must be positive");
        }
        Ok(())
    }

    fn logs(&self, iteration: usize) -> bool {
        if iteration % self.log_every != 0 {
            return false;
        }
        if !self.thin_log || iteration < 1000 {
            return true;
        }
        let stride = 10usize.pow((iteration as f64).log10().floor() as u32 - 2);
        iteration % stride.max(self.log_every) == 0
    }
}

/// One logged iteration. Errors are squared relative errors as fractions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainingRecord {
    pub iteration: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub h1_rel_err_sq: f64,
    pub l2_rel_err_sq: f64,
    pub learning_rate: f64,
}

#[derive(Clone, Debug)]
pub struct TrainOutcome<T> {
    pub network: Network<T>,
    pub history: Vec<TrainingRecord>,
    pub iterations: usize,
    pub final_train_loss: f64,
    pub stopped_early: bool,
    pub best_iteration: usize,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    /// Times a step failed at the minimum rate, which resets the Adam
    /// moments and the learning rate.
    pub stalls: usize,
}

fn f<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Losses, errors and learning rate of `network` before any update, logged
/// as iteration 0.
pub fn initial_record<T: Real>(
    problem: &ProblemSpec<T>,
    config: &TrainConfig,
    network: &Network<T>,
) -> Result<TrainingRecord> {
    config.validate()?;
    let cand = NetworkCandidate { network, cutoff: &problem.cutoff };
    let train_loss = f(LossAssembler::new(problem, config.loss_kind, config.n_train)?.value(&cand)?);
    let val_loss = f(LossAssembler::new(problem, config.loss_kind, config.n_val)?.value(&cand)?);
    let (h1, l2) = match (&problem.exact, config.history_error_points) {
        (Some(_), n) if n > 0 => {
            let r = ErrorEvaluator::new(problem, n)?.report(&cand)?;
            (r.h1_rel_sq(), r.l2_rel_sq())
        }
        _ => (f64::NAN, f64::NAN),
    };
    Ok(TrainingRecord {
        iteration: 0,
        train_loss,
        val_loss,
        h1_rel_err_sq: h1,
        l2_rel_err_sq: l2,
        learning_rate: config.initial_lr,
    })
}

/// Trains a freshly initialised network for `problem`.
pub fn train<T: Real>(problem: &ProblemSpec<T>, config: &TrainConfig) -> Result<TrainOutcome<T>> {
    let net = init_network(&problem.architecture(config.seed))?;
    train_network(problem, config, net, |_| {})
}

/// Result of one [`Trainer::step`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepReport {
    pub iteration: usize,
    pub accepted: bool,
    /// Training loss after the step (the previous loss when rejected).
    pub train_loss: f64,
    /// Validation loss, when it was evaluated this iteration.
    pub val_loss: Option<f64>,
    pub record: Option<TrainingRecord>,
    /// Early stopping asks to halt.
    pub stop: bool,
}

/// Full-batch training state, advanced one iteration at a time.
pub struct Trainer<'p, T: Real> {
    problem: &'p ProblemSpec<T>,
    config: TrainConfig,
    train_loss: LossAssembler<T>,
    val_loss: LossAssembler<T>,
    errors: Option<ErrorEvaluator<T>>,
    network: Network<T>,
    adam: AdamState<T>,
    lr: AdaptiveLr,
    loss: f64,
    grad: Vec<T>,
    stopper: Option<EarlyStopping<T>>,
    iteration: usize,
    accepted_steps: usize,
    rejected_steps: usize,
    stalls: usize,
}

impl<'p, T: Real> Trainer<'p, T> {
    pub fn new(problem: &'p ProblemSpec<T>, config: &TrainConfig, network: Network<T>) -> Result<Self> {
        config.validate()?;
        if network.input_dim() != problem.dim() {
            return Err(DfrError::Configuration(format!(
                "{}-dimensional network for a {}-dimensional problem",
                network.input_dim(),
                problem.dim()
            )));
        }
        if config.loss_kind == LossKind::Collocation && problem.strong.is_none() {
            return Err(DfrError::Configuration(format!("problem {} has no strong form", problem.name)));
        }
        let train_loss = LossAssembler::new(problem, config.loss_kind, config.n_train)?;
        let val_loss = LossAssembler::new(problem, config.loss_kind, config.n_val)?;
        let errors = match (&problem.exact, config.history_error_points) {
            (Some(_), n) if n > 0 => Some(ErrorEvaluator::new(problem, n)?),
            _ => None,
        };
        let (loss, grad) = train_loss.value_and_gradient(&network, &problem.cutoff)?;
        let stopper = if config.early_stopping {
            let v = f(val_loss.value(&NetworkCandidate { network: &network, cutoff: &problem.cutoff })?);
            Some(EarlyStopping::new(config.patience, v, network.parameters()))
        } else {
            None
        };
        Ok(Self {
            problem,
            config: config.clone(),
            train_loss,
            val_loss,
            errors,
            adam: AdamState::new(network.parameter_count()),
            network,
            lr: AdaptiveLr {
                lr: config.initial_lr,
                up: config.lr_up,
                down: config.lr_down,
                min: config.lr_min,
                max: config.lr_max,
            },
            loss: f(loss),
            grad,
            stopper,
            iteration: 0,
            accepted_steps: 0,
            rejected_steps: 0,
            stalls: 0,
        })
    }

    pub fn network(&self) -> &Network<T> {
        &self.network
    }

    pub fn adam(&self) -> &AdamState<T> {
        &self.adam
    }

    pub fn learning_rate(&self) -> f64 {
        self.lr.lr
    }

    /// Overrides the rate used by the next step.
    pub fn set_learning_rate(&mut self, lr: f64) {
        self.lr.lr = lr;
    }

    pub fn train_loss(&self) -> f64 {
        self.loss
    }

    pub fn iteration(&self) -> usize {
        self.iteration
    }

    /// One Adam step with accept/reject, validation, logging and early
    /// stopping bookkeeping.
    pub fn step(&mut self) -> Result<StepReport> {
        self.iteration += 1;
        let it = self.iteration;
        let cutoff = &self.problem.cutoff;
        let snapshot = self.network.parameters().to_vec();
        let adam_before = self.adam.clone();
        let step_lr = self.lr.lr;
        let candidate = match adam_step(&mut self.adam, self.network.parameters_mut(), &self.grad, lit(step_lr)) {
            Ok(()) => self.train_loss.value_and_gradient(&self.network, cutoff).map(|(l, g)| (f(l), g)).ok(),
            Err(DfrError::NonFiniteGradient) => None,
            Err(e) => return Err(e),
        };
        let accepted = match candidate {
            Some((new_loss, new_grad)) if self.lr.step(self.loss, new_loss) => {
                self.loss = new_loss;
                self.grad = new_grad;
                true
            }
            Some(_) => false,
            None => {
                self.lr.step(self.loss, f64::NAN);
                false
            }
        };
        if accepted {
            self.accepted_steps += 1;
        } else {
            self.rejected_steps += 1;
            self.network.parameters_mut().copy_from_slice(&snapshot);
            if self.config.restore_moments {
                self.adam = adam_before;
            }
        }

        let logging = self.config.logs(it);
        let val = if self.stopper.is_some() || logging {
            Some(f(self.val_loss.value(&NetworkCandidate { network: &self.network, cutoff })?))
        } else {
            None
        };
        let record = if logging {
            let (h1, l2) = match &self.errors {
                Some(ev) => {
                    let r = ev.report(&NetworkCandidate { network: &self.network, cutoff })?;
                    (r.h1_rel_sq(), r.l2_rel_sq())
                }
                None => (f64::NAN, f64::NAN),
            };
            Some(TrainingRecord {
                iteration: it,
                train_loss: self.loss,
                val_loss: val.unwrap_or(f64::NAN),
                h1_rel_err_sq: h1,
                l2_rel_err_sq: l2,
                learning_rate: self.lr.lr,
            })
        } else {
            None
        };
        let stop = match (self.stopper.as_mut(), val) {
            (Some(s), Some(v)) => s.observe(it, v, self.network.parameters()),
            _ => false,
        };
        if !accepted && step_lr <= self.config.lr_min {
            // the retry would repeat this step exactly
            self.stalls += 1;
            self.adam = AdamState::new(self.network.parameter_count());
            self.lr.lr = self.config.initial_lr;
        }
        Ok(StepReport { iteration: it, accepted, train_loss: self.loss, val_loss: val, record, stop })
    }

    /// Restores the best validation checkpoint when early stopping is on.
    pub fn finish(mut self, history: Vec<TrainingRecord>, stopped_early: bool) -> Result<TrainOutcome<T>> {
        let mut best_iteration = 0;
        if let Some(s) = self.stopper.take() {
            self.network.set_parameters(&s.best_params)?;
            best_iteration = s.best_iteration;
            self.loss =
                f(self.train_loss.value(&NetworkCandidate { network: &self.network, cutoff: &self.problem.cutoff })?);
        }
        Ok(TrainOutcome {
            network: self.network,
            history,
            iterations: self.iteration,
            final_train_loss: self.loss,
            stopped_early,
            best_iteration,
            accepted_steps: self.accepted_steps,
            rejected_steps: self.rejected_steps,
            stalls: self.stalls,
        })
    }
}

/// Trains `network`, calling `on_record` for every logged record.
pub fn train_network<T: Real>(
    problem: &ProblemSpec<T>,
    config: &TrainConfig,
    network: Network<T>,
    mut on_record: impl FnMut(&TrainingRecord),
) -> Result<TrainOutcome<T>> {
    if config.max_iterations == 0 {
        config.validate()?;
        let loss = LossAssembler::new(problem, config.loss_kind, config.n_train)?
            .value(&NetworkCandidate { network: &network, cutoff: &problem.cutoff })?;
        return Ok(TrainOutcome {
            network,
            history: Vec::new(),
            iterations: 0,
            final_train_loss: f(loss),
            stopped_early: false,
            best_iteration: 0,
            accepted_steps: 0,
            rejected_steps: 0,
            stalls: 0,
        });
    }
    let mut trainer = Trainer::new(problem, config, network)?;
    let mut history = Vec::new();
    let mut stopped = false;
    while trainer.iteration() < config.max_iterations {
        let report = trainer.step()?;
        if let Some(rec) = report.record {
            on_record(&rec);
            history.push(rec);
        }
        if report.stop {
            stopped = true;
            break;
        }
    }
    trainer.finish(history, stopped)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adam_first_step_by_hand() {
        let mut s = AdamState::new(1);
        let mut p = [1.0f64];
        adam_step(&mut s, &mut p, &[0.5], 0.1).unwrap();
        // m̂ = 0.5, v̂ = 0.25 → step = 0.1 · 0.5 / (0.5 + 1e-8)
        let expected = 1.0 - 0.1 * 0.5 / (0.5 + 1e-8);
        assert!((p[0] - expected).abs() < 1e-15);
        assert_eq!(s.step_count, 1);
    }

    #[test]
    fn adam_zero_gradient_keeps_parameters() {
        let mut s = AdamState { first_moment: vec![0.2], second_moment: vec![0.1], step_count: 3 };
        let mut p = [2.0f64];
        let m_before = s.first_moment[0];
        adam_step(&mut s, &mut p, &[0.0], 0.1).unwrap();
        assert!(s.first_moment[0].abs() < m_before);
        assert!(s.second_moment[0] < 0.1);
        let mut z = AdamState::new(2);
        let mut q = [1.0f64, -1.0];
        adam_step(&mut z, &mut q, &[0.0, 0.0], 0.1).unwrap();
        assert_eq!(q, [1.0, -1.0]);
    }

    #[test]
    fn adam_rejects_non_finite_gradients_untouched() {
        let mut s = AdamState::new(2);
        let mut p = [1.0f64, 2.0];
        let before = s.clone();
        assert!(matches!(adam_step(&mut s, &mut p, &[f64::NAN, 0.0], 0.1), Err(DfrError::NonFiniteGradient)));
        assert_eq!(s, before);
        assert_eq!(p, [1.0, 2.0]);
    }

    #[test]
    fn adaptive_rule_arithmetic() {
        let mut lr = AdaptiveLr { lr: 1e-2, up: 1.1, down: 0.5, min: 1e-7, max: 1e-1 };
        assert!(lr.step(1.0, 0.9));
        assert!(!lr.step(0.9, 1.0));
        assert!((lr.lr - 5.5e-3).abs() < 1e-15);
        let mut g = AdaptiveLr { lr: 1e-2, up: 1.1, down: 0.5, min: 1e-7, max: 1e-1 };
        for i in 0..100 {
            g.step(1.0 / (i as f64 + 1.0), 1.0 / (i as f64 + 2.0));
        }
        assert_eq!(g.lr, 1e-1);
    }

    #[test]
    fn early_stopping_rule() {
        let mut s = EarlyStopping::new(200, 1.0, &[0.0f64]);
        assert!(!s.observe(1, 0.5, &[1.0]));
        for it in 2..=201 {
            assert!(!s.observe(it, 0.5, &[it as f64]));
        }
        assert!(s.observe(202, 0.5, &[202.0]));
        assert_eq!(s.best_iteration, 1);
        assert_eq!(s.best_params, vec![1.0]);
    }

    #[test]
    fn log_thinning() {
        let c = TrainConfig::default();
        assert!(c.logs(10) && c.logs(990) && !c.logs(15));
        assert!(c.logs(5000) && !c.logs(10_010) && c.logs(10_100));
    }

    #[test]
    fn config_validation() {
        assert!(TrainConfig::default().validate().is_ok());
        assert!(TrainConfig { lr_down: 1.5, ..TrainConfig::default() }.validate().is_err());
        assert!(TrainConfig { n_train: 201, ..TrainConfig::default() }.validate().is_err());
    }
}
