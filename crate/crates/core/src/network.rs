//! Feed-forward tanh networks with cutoff-based Dirichlet imposition.
//!
//! The network output `ũ` is combined with a cutoff `φ₁` (vanishing on the
//! Dirichlet boundary) and a lift `φ₂` into `u = φ₁ ũ + φ₂`. Spatial
//! derivatives of `u` are propagated forward as jet planes on a [`Tape`], so
//! any loss built from `u`, `∇u` (and `∂ᵢᵢu`) can be differentiated with
//! respect to all weights and biases in one reverse sweep.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{DfrError, Result};
use crate::field::AnalyticField;
use crate::scalar::{lit, Real};
use crate::tape::{Tape, Tensor, Var};

/// Points per chunk when evaluating without gradients.
const EVAL_CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Activation {
    #[default]
    Tanh,
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("tanh")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Architecture {
    pub input_dim: usize,
    pub hidden_widths: Vec<usize>,
    pub activation: Activation,
    pub seed: u64,
}

impl Architecture {
    pub fn new(input_dim: usize, hidden_widths: Vec<usize>, seed: u64) -> Self {
        Self { input_dim, hidden_widths, activation: Activation::Tanh, seed }
    }

    /// `depth` hidden layers of `width` neurons.
    pub fn uniform(input_dim: usize, depth: usize, width: usize, seed: u64) -> Self {
        Self::new(input_dim, vec![width; depth], seed)
    }

    /// Layer widths including input and the scalar output.
    pub fn widths(&self) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.hidden_widths.len() + 2);
        w.push(self.input_dim);
        w.extend_from_slice(&self.hidden_widths);
        w.push(1);
        w
    }

    pub fn parameter_count(&self) -> usize {
        parameter_count(&self.widths())
    }

    fn validate(&self) -> Result<()> {
        if self.input_dim == 0 {
            return Err(DfrError::InvalidArchitecture("input dimension must be positive".into()));
        }
        if self.hidden_widths.is_empty() {
            return Err(DfrError::InvalidArchitecture("at least one hidden layer is required".into()));
        }
        if self.hidden_widths.contains(&0) {
            return Err(DfrError::InvalidArchitecture("hidden widths must be positive".into()));
        }
        Ok(())
    }
}

fn parameter_count(widths: &[usize]) -> usize {
    widths.windows(2).map(|w| w[1] * w[0] + w[1]).sum()
}

/// Weights and biases stored flat: for each layer the `out × in` weight
/// matrix (row-major) followed by the bias.
#[derive(Clone, Debug, PartialEq)]
pub struct Network<T> {
    widths: Vec<usize>,
    activation: Activation,
    params: Vec<T>,
}

/// Deterministic Glorot-uniform weights and zero biases.
pub fn init_network<T: Real>(arch: &Architecture) -> Result<Network<T>> {
    arch.validate()?;
    let widths = arch.widths();
    let mut rng = ChaCha8Rng::seed_from_u64(arch.seed);
    let mut params = Vec::with_capacity(parameter_count(&widths));
    for w in widths.windows(2) {
        let (fan_in, fan_out) = (w[0], w[1]);
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        for _ in 0..fan_in * fan_out {
            params.push(lit(rng.gen_range(-limit..limit)));
        }
        params.extend(std::iter::repeat(T::zero()).take(fan_out));
    }
    Ok(Network { widths, activation: arch.activation, params })
}

impl<T: Real> Network<T> {
    /// Rebuilds a network from layer widths and a flat parameter vector.
    pub fn from_parameters(widths: Vec<usize>, params: Vec<T>) -> Result<Self> {
        if widths.len() < 3 || widths.contains(&0) {
            return Err(DfrError::InvalidArchitecture(format!("unusable widths {widths:?}")));
        }
        if *widths.last().unwrap() != 1 {
            return Err(DfrError::InvalidArchitecture("output width must be 1".into()));
        }
        let expected = parameter_count(&widths);
        if params.len() != expected {
            return Err(DfrError::Shape(format!("expected {expected} parameters, got {}", params.len())));
        }
        Ok(Self { widths, activation: Activation::Tanh, params })
    }

    pub fn widths(&self) -> &[usize] {
        &self.widths
    }

    pub fn input_dim(&self) -> usize {
        self.widths[0]
    }

    pub fn activation(&self) -> Activation {
        self.activation
    }

    pub fn parameters(&self) -> &[T] {
        &self.params
    }

    pub fn parameters_mut(&mut self) -> &mut [T] {
        &mut self.params
    }

    pub fn set_parameters(&mut self, params: &[T]) -> Result<()> {
        if params.len() != self.params.len() {
            return Err(DfrError::Shape(format!("expected {} parameters, got {}", self.params.len(), params.len())));
        }
        self.params.copy_from_slice(params);
        Ok(())
    }

    pub fn parameter_count(&self) -> usize {
        self.params.len()
    }

    /// `(offset, fan_in, fan_out)` of every layer in the flat vector.
    fn layout(&self) -> Vec<(usize, usize, usize)> {
        let mut off = 0;
        self.widths
            .windows(2)
            .map(|w| {
                let l = (off, w[0], w[1]);
                off += w[0] * w[1] + w[1];
                l
            })
            .collect()
    }

    /// Records `ũ` and its spatial derivatives at `points` (flattened
    /// `[B, d]`). Returns the output jet `[C, B, 1]` and one leaf per weight
    /// matrix and bias, in flat-parameter order.
    pub fn record_raw(
        &self,
        tape: &mut Tape<T>,
        points: &[T],
        second: bool,
        trainable: bool,
    ) -> Result<(Var, Vec<Var>)> {
        let d = self.input_dim();
        if points.len() % d != 0 {
            return Err(DfrError::Shape(format!("{} coordinates do not form {d}-dimensional points", points.len())));
        }
        let mut h = tape.input_jet(points, d, second);
        let layers = self.layout();
        let mut leaves = Vec::with_capacity(2 * layers.len());
        for (li, &(off, fan_in, fan_out)) in layers.iter().enumerate() {
            let wdata = self.params[off..off + fan_in * fan_out].to_vec();
            let bdata = self.params[off + fan_in * fan_out..off + fan_in * fan_out + fan_out].to_vec();
            let wt = Tensor::new(vec![fan_out, fan_in], wdata)?;
            let bt = Tensor::vector(bdata);
            let (w, b) = if trainable {
                (tape.parameter(wt), tape.parameter(bt))
            } else {
                (tape.constant(wt), tape.constant(bt))
            };
            leaves.push(w);
            leaves.push(b);
            h = tape.jet_affine(h, w, b);
            if li + 1 < layers.len() {
                h = tape.jet_tanh(h, d);
            }
        }
        Ok((h, leaves))
    }

    /// Values, gradients and (optionally) pure second derivatives of
    /// `u = φ₁ ũ + φ₂` at `points`, evaluated in chunks without gradients.
    pub fn evaluate(&self, cutoff: &CutoffSpec<T>, points: &[T], order: DerivativeOrder) -> Result<PointValues<T>> {
        let d = self.input_dim();
        let cand = NetworkCandidate { network: self, cutoff };
        let mut out = PointValues::empty(d, order);
        for chunk in points.chunks(EVAL_CHUNK * d) {
            let mut tape = Tape::new();
            let rec = cand.record_with(&mut tape, chunk, order, false)?;
            out.extend(&tape, &rec.sample);
        }
        Ok(out)
    }

    /// Network output `ũ` alone.
    pub fn forward(&self, points: &[T]) -> Result<Vec<T>> {
        let d = self.input_dim();
        let mut out = Vec::with_capacity(points.len() / d);
        for chunk in points.chunks(EVAL_CHUNK * d) {
            let mut tape = Tape::new();
            let (jet, _) = self.record_raw(&mut tape, chunk, false, false)?;
            let b = chunk.len() / d;
            out.extend_from_slice(&tape.value(jet).data()[..b]);
        }
        Ok(out)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + 4 * self.widths.len() + 8 * self.params.len());
        out.extend_from_slice(&(self.widths.len() as u32).to_le_bytes());
        for &w in &self.widths {
            out.extend_from_slice(&(w as u32).to_le_bytes());
        }
        for &p in &self.params {
            out.extend_from_slice(&p.to_f64().unwrap_or(f64::NAN).to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut cursor = bytes;
        let mut word = [0u8; 4];
        cursor.read_exact(&mut word).map_err(|_| DfrError::Checkpoint("missing header".into()))?;
        let count = u32::from_le_bytes(word) as usize;
        if count > 1024 {
            return Err(DfrError::Checkpoint(format!("implausible layer count {count}")));
        }
        let mut widths = Vec::with_capacity(count);
        for _ in 0..count {
            cursor.read_exact(&mut word).map_err(|_| DfrError::Checkpoint("truncated header".into()))?;
            widths.push(u32::from_le_bytes(word) as usize);
        }
        if cursor.len() % 8 != 0 {
            return Err(DfrError::Checkpoint("parameter block is not a whole number of f64".into()));
        }
        let params: Vec<T> =
            cursor.chunks_exact(8).map(|c| lit(f64::from_le_bytes(c.try_into().expect("8-byte chunk")))).collect();
        Self::from_parameters(widths, params).map_err(|e| DfrError::Checkpoint(e.to_string()))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

/// Cutoff `φ₁` and lift `φ₂`.
#[derive(Clone, Debug)]
pub struct CutoffSpec<T> {
    pub phi1: AnalyticField<T>,
    pub phi2: AnalyticField<T>,
}

crate::scalar_fn!(Identity1, |x| x[0]);
crate::scalar_fn!(Unit, |_x| S::cst(1.0));
crate::scalar_fn!(Bubble1, |x| x[0] * (S::cst(std::f64::consts::PI) - x[0]));

impl<T: Real> CutoffSpec<T> {
    pub fn new(phi1: AnalyticField<T>, phi2: AnalyticField<T>) -> Self {
        Self { phi1, phi2 }
    }

    /// `φ₁ = x(π − x)`, `φ₂ = 0`.
    pub fn both_ends() -> Self {
        Self::new(AnalyticField::new(1, Bubble1), AnalyticField::zero(1))
    }

    /// `φ₁ = x`, `φ₂ = 0`.
    pub fn left_end() -> Self {
        Self::new(AnalyticField::new(1, Identity1), AnalyticField::zero(1))
    }

    /// `u = ũ` in `dim` dimensions.
    pub fn none(dim: usize) -> Self {
        Self::new(AnalyticField::new(dim, Unit), AnalyticField::zero(dim))
    }

    pub fn dim(&self) -> usize {
        self.phi1.dim()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivativeOrder {
    First,
    Second,
}

/// Handles to `u`, `∂ⱼu` and (for [`DerivativeOrder::Second`]) `∂ⱼⱼu`, each
/// of shape `[B]`.
#[derive(Clone, Debug)]
pub struct Sampled {
    pub value: Var,
    pub gradient: Vec<Var>,
    pub second: Vec<Var>,
}

#[derive(Clone, Debug)]
pub struct Recorded {
    pub sample: Sampled,
    /// Parameter leaves in flat-parameter order; empty for fixed candidates.
    pub params: Vec<Var>,
}

/// Anything a loss can be evaluated on.
pub trait Candidate<T: Real> {
    fn dim(&self) -> usize;
    fn record(&self, tape: &mut Tape<T>, points: &[T], order: DerivativeOrder) -> Result<Recorded>;
}

/// A network together with its cutoff.
#[derive(Clone, Copy, Debug)]
pub struct NetworkCandidate<'a, T> {
    pub network: &'a Network<T>,
    pub cutoff: &'a CutoffSpec<T>,
}

impl<T: Real> NetworkCandidate<'_, T> {
    fn record_with(
        &self,
        tape: &mut Tape<T>,
        points: &[T],
        order: DerivativeOrder,
        trainable: bool,
    ) -> Result<Recorded> {
        let d = self.network.input_dim();
        if self.cutoff.dim() != d {
            return Err(DfrError::Shape(format!("cutoff is {}-dimensional, network {d}", self.cutoff.dim())));
        }
        let second = order == DerivativeOrder::Second;
        let (jet, params) = self.network.record_raw(tape, points, second, trainable)?;
        let b = points.len() / d;
        let plane = |tape: &mut Tape<T>, p: usize| {
            let v = tape.plane(jet, p);
            tape.reshape(v, vec![b])
        };
        let nv = plane(tape, 0);
        let ng: Vec<Var> = (0..d).map(|j| plane(tape, 1 + j)).collect();
        let ns: Vec<Var> = if second { (0..d).map(|j| plane(tape, 1 + d + j)).collect() } else { Vec::new() };

        let cut = CutoffSamples::new(self.cutoff, points, d, second);
        let p1 = tape.constant(Tensor::vector(cut.phi1.clone()));
        let prod = tape.mul(p1, nv);
        let value = add_const(tape, prod, &cut.phi2);
        let mut gradient = Vec::with_capacity(d);
        for j in 0..d {
            let a = scale_const(tape, nv, &cut.dphi1[j]);
            let bterm = tape.mul(p1, ng[j]);
            let s = tape.add(a, bterm);
            gradient.push(add_const(tape, s, &cut.dphi2[j]));
        }
        let mut second_vars = Vec::new();
        if second {
            for j in 0..d {
                let a = scale_const(tape, nv, &cut.ddphi1[j]);
                let twice: Vec<T> = cut.dphi1[j].iter().map(|&v| v + v).collect();
                let bterm = scale_const(tape, ng[j], &twice);
                let c = tape.mul(p1, ns[j]);
                let s = tape.add(a, bterm);
                let s = tape.add(s, c);
                second_vars.push(add_const(tape, s, &cut.ddphi2[j]));
            }
        }
        Ok(Recorded { sample: Sampled { value, gradient, second: second_vars }, params })
    }
}

fn add_const<T: Real>(tape: &mut Tape<T>, v: Var, c: &[T]) -> Var {
    if c.iter().all(|x| x.is_zero()) {
        return v;
    }
    let k = tape.constant(Tensor::vector(c.to_vec()));
    tape.add(v, k)
}

fn scale_const<T: Real>(tape: &mut Tape<T>, v: Var, c: &[T]) -> Var {
    let k = tape.constant(Tensor::vector(c.to_vec()));
    tape.mul(k, v)
}

struct CutoffSamples<T> {
    phi1: Vec<T>,
    phi2: Vec<T>,
    dphi1: Vec<Vec<T>>,
    dphi2: Vec<Vec<T>>,
    ddphi1: Vec<Vec<T>>,
    ddphi2: Vec<Vec<T>>,
}

impl<T: Real> CutoffSamples<T> {
    fn new(c: &CutoffSpec<T>, points: &[T], d: usize, second: bool) -> Self {
        let b = points.len() / d;
        let mut s = Self {
            phi1: Vec::with_capacity(b),
            phi2: Vec::with_capacity(b),
            dphi1: vec![Vec::with_capacity(b); d],
            dphi2: vec![Vec::with_capacity(b); d],
            ddphi1: vec![Vec::new(); d],
            ddphi2: vec![Vec::new(); d],
        };
        for x in points.chunks(d) {
            s.phi1.push(c.phi1.value(x));
            s.phi2.push(c.phi2.value(x));
            for (j, (g1, g2)) in c.phi1.gradient(x).into_iter().zip(c.phi2.gradient(x)).enumerate() {
                s.dphi1[j].push(g1);
                s.dphi2[j].push(g2);
            }
            if second {
                for (j, (h1, h2)) in c.phi1.second_diagonal(x).into_iter().zip(c.phi2.second_diagonal(x)).enumerate() {
                    s.ddphi1[j].push(h1);
                    s.ddphi2[j].push(h2);
                }
            }
        }
        s
    }
}

impl<T: Real> Candidate<T> for NetworkCandidate<'_, T> {
    fn dim(&self) -> usize {
        self.network.input_dim()
    }

    fn record(&self, tape: &mut Tape<T>, points: &[T], order: DerivativeOrder) -> Result<Recorded> {
        self.record_with(tape, points, order, true)
    }
}

/// A fixed analytic candidate; enters the tape as constants.
impl<T: Real> Candidate<T> for AnalyticField<T> {
    fn dim(&self) -> usize {
        AnalyticField::dim(self)
    }

    fn record(&self, tape: &mut Tape<T>, points: &[T], order: DerivativeOrder) -> Result<Recorded> {
        let d = AnalyticField::dim(self);
        if points.len() % d != 0 {
            return Err(DfrError::Shape(format!("{} coordinates do not form {d}-dimensional points", points.len())));
        }
        let pv = PointValues::from_field(self, points, order);
        let value = tape.constant(Tensor::vector(pv.values));
        let gradient = pv.gradients.into_iter().map(|g| tape.constant(Tensor::vector(g))).collect();
        let second = pv.second.into_iter().map(|g| tape.constant(Tensor::vector(g))).collect();
        Ok(Recorded { sample: Sampled { value, gradient, second }, params: Vec::new() })
    }
}

/// Plain samples of `u`, `∂ⱼu` and optionally `∂ⱼⱼu`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointValues<T> {
    pub values: Vec<T>,
    /// One vector per spatial component.
    pub gradients: Vec<Vec<T>>,
    /// One vector per spatial component; empty for first order.
    pub second: Vec<Vec<T>>,
}

impl<T: Real> PointValues<T> {
    fn empty(d: usize, order: DerivativeOrder) -> Self {
        let second = if order == DerivativeOrder::Second { vec![Vec::new(); d] } else { Vec::new() };
        Self { values: Vec::new(), gradients: vec![Vec::new(); d], second }
    }

    fn extend(&mut self, tape: &Tape<T>, s: &Sampled) {
        self.values.extend_from_slice(tape.value(s.value).data());
        for (dst, &v) in self.gradients.iter_mut().zip(&s.gradient) {
            dst.extend_from_slice(tape.value(v).data());
        }
        for (dst, &v) in self.second.iter_mut().zip(&s.second) {
            dst.extend_from_slice(tape.value(v).data());
        }
    }

    pub fn from_field(f: &AnalyticField<T>, points: &[T], order: DerivativeOrder) -> Self {
        let d = f.dim();
        let mut out = Self::empty(d, order);
        for x in points.chunks(d) {
            out.values.push(f.value(x));
            for (j, g) in f.gradient(x).into_iter().enumerate() {
                out.gradients[j].push(g);
            }
            if order == DerivativeOrder::Second {
                for (j, h) in f.second_diagonal(x).into_iter().enumerate() {
                    out.second[j].push(h);
                }
            }
        }
        out
    }
}

/// A recorded evaluation of `u` and `∇u` that can be differentiated with
/// respect to the network parameters.
pub struct EvalBatch<T: Real> {
    pub points: Vec<T>,
    pub tape: Tape<T>,
    pub recorded: Recorded,
    parameter_count: usize,
}

impl<T: Real> fmt::Debug for EvalBatch<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EvalBatch")
            .field("points", &self.points.len())
            .field("tape", &self.tape)
            .finish_non_exhaustive()
    }
}

pub fn evaluate_with_derivative<T: Real>(
    network: &Network<T>,
    cutoff: &CutoffSpec<T>,
    points: &[T],
) -> Result<EvalBatch<T>> {
    let mut tape = Tape::new();
    let recorded = NetworkCandidate { network, cutoff }.record(&mut tape, points, DerivativeOrder::First)?;
    Ok(EvalBatch { points: points.to_vec(), tape, recorded, parameter_count: network.parameter_count() })
}

impl<T: Real> EvalBatch<T> {
    pub fn values(&self) -> &[T] {
        self.tape.value(self.recorded.sample.value).data()
    }

    /// `∂ⱼu` at every point.
    pub fn spatial_gradient(&self, j: usize) -> &[T] {
        self.tape.value(self.recorded.sample.gradient[j]).data()
    }

    /// Gradient of the scalar built by `loss` with respect to every
    /// parameter, in flat order. Consumes the tape.
    pub fn parameter_gradient(&mut self, loss: impl FnOnce(&mut Tape<T>, &Sampled) -> Var) -> Result<Vec<T>> {
        if self.tape.is_consumed() {
            return Err(DfrError::InvalidTape("evaluation batch already differentiated".into()));
        }
        let l = loss(&mut self.tape, &self.recorded.sample);
        collect_gradient(&mut self.tape, l, &[&self.recorded], self.parameter_count)
    }
}

/// Runs the reverse sweep from `loss` and sums the adjoints of every record's
/// parameter leaves into one flat vector.
pub fn collect_gradient<T: Real>(
    tape: &mut Tape<T>,
    loss: Var,
    records: &[&Recorded],
    parameter_count: usize,
) -> Result<Vec<T>> {
    let grads = tape.backward(loss)?;
    let mut out = vec![T::zero(); parameter_count];
    for rec in records {
        let mut off = 0;
        for &leaf in &rec.params {
            let len = tape.value(leaf).len();
            if let Some(g) = grads.wrt(leaf)? {
                for (o, &v) in out[off..off + len].iter_mut().zip(g) {
                    *o += v;
                }
            }
            off += len;
        }
        if off != 0 && off != parameter_count {
            return Err(DfrError::Shape(format!("parameter leaves cover {off} of {parameter_count} entries")));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn default_parameter_count() {
        let arch = Architecture::uniform(1, 5, 25, 0);
        assert_eq!(arch.parameter_count(), 2676);
        let net = init_network::<f64>(&arch).unwrap();
        assert_eq!(net.parameter_count(), 2676);
    }

    #[test]
    fn init_is_deterministic_and_biases_are_zero() {
        let arch = Architecture::uniform(2, 2, 4, 7);
        let a = init_network::<f64>(&arch).unwrap();
        let b = init_network::<f64>(&arch).unwrap();
        assert_eq!(a, b);
        // first bias block follows the 4x2 weights
        assert!(a.parameters()[8..12].iter().all(|&v| v == 0.0));
        let limit = (6.0f64 / 6.0).sqrt();
        assert!(a.parameters()[..8].iter().all(|v| v.abs() <= limit));
        let c = init_network::<f64>(&Architecture::uniform(2, 2, 4, 8)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn empty_hidden_layers_are_rejected() {
        let arch = Architecture::new(1, vec![], 0);
        assert!(matches!(init_network::<f64>(&arch), Err(DfrError::InvalidArchitecture(_))));
    }

    #[test]
    fn one_hidden_layer_output_weight_gradient() {
        let arch = Architecture::new(1, vec![3], 11);
        let mut net = init_network::<f64>(&arch).unwrap();
        for (i, p) in net.parameters_mut().iter_mut().enumerate() {
            *p = 0.1 * i as f64 - 0.3;
        }
        let x0 = 0.7;
        let cutoff = CutoffSpec::none(1);
        let mut batch = evaluate_with_derivative(&net, &cutoff, &[x0]).unwrap();
        let g = batch.parameter_gradient(|t, s| t.sum(s.value)).unwrap();
        let p = net.parameters();
        for j in 0..3 {
            let hidden = (p[j] * x0 + p[3 + j]).tanh();
            assert_relative_eq!(g[6 + j], hidden, epsilon = 1e-15);
        }
        assert_relative_eq!(g[9], 1.0);
    }

    #[test]
    fn checkpoint_round_trip() {
        let net = init_network::<f64>(&Architecture::uniform(2, 3, 5, 3)).unwrap();
        let back = Network::<f64>::from_bytes(&net.to_bytes()).unwrap();
        assert_eq!(net, back);
        let mut bad = net.to_bytes();
        bad.truncate(bad.len() - 3);
        assert!(matches!(Network::<f64>::from_bytes(&bad), Err(DfrError::Checkpoint(_))));
    }

    #[test]
    fn zero_network_passes_the_lift_through() {
        crate::scalar_fn!(SinLift, |x| x[0].sin());
        let mut net = init_network::<f64>(&Architecture::uniform(1, 2, 4, 0)).unwrap();
        net.parameters_mut().iter_mut().for_each(|p| *p = 0.0);
        let cutoff = CutoffSpec::new(AnalyticField::new(1, Identity1), AnalyticField::new(1, SinLift));
        let pts = [0.1, 1.0, 2.5];
        let pv = net.evaluate(&cutoff, &pts, DerivativeOrder::Second).unwrap();
        for (i, &x) in pts.iter().enumerate() {
            assert_relative_eq!(pv.values[i], x.sin(), epsilon = 1e-15);
            assert_relative_eq!(pv.gradients[0][i], x.cos(), epsilon = 1e-15);
            assert_relative_eq!(pv.second[0][i], -x.sin(), epsilon = 1e-15);
        }
    }
}
