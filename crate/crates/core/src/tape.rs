//! Tensor-level reverse-mode differentiation.
//!
//! Every operation appends a node holding its value to a [`Tape`]. A
//! [`Var`] is a handle to a node. [`Tape::backward`] walks the nodes in
//! reverse and accumulates adjoints into every node that depends on a
//! parameter leaf.
//!
//! Network layers are recorded as fused *jet* operations: a jet tensor has
//! shape `[C, B, W]`, where plane 0 holds values at `B` points, planes
//! `1..=d` the first spatial derivatives and (optionally) planes
//! `d+1..=2d` the pure second derivatives. Forward-mode spatial derivatives
//! thus travel through the same graph that reverse mode differentiates
//! with respect to the parameters.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{DfrError, Result};
use crate::scalar::{lit, Real};

static NEXT_TAPE_ID: AtomicU64 = AtomicU64::new(1);

/// Rows handled per parallel task; fixed so results do not depend on the
/// number of worker threads.
const ROW_CHUNK: usize = 2048;

/// Dense row-major tensor.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<T> {
    shape: Vec<usize>,
    data: Vec<T>,
}

impl<T: Real> Tensor<T> {
    pub fn new(shape: Vec<usize>, data: Vec<T>) -> Result<Self> {
        let len: usize = shape.iter().product();
        if len != data.len() {
            return Err(DfrError::Shape(format!("shape {shape:?} needs {len} entries, got {}", data.len())));
        }
        Ok(Self { shape, data })
    }

    pub fn vector(data: Vec<T>) -> Self {
        Self { shape: vec![data.len()], data }
    }

    pub fn scalar(v: T) -> Self {
        Self { shape: Vec::new(), data: vec![v] }
    }

    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        Self { shape, data: vec![T::zero(); len] }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }
}

/// A linear operator with an explicit adjoint.
pub trait LinearMap<T>: Send + Sync + fmt::Debug {
    fn input_len(&self) -> usize;
    fn output_len(&self) -> usize;
    fn apply(&self, x: &[T], y: &mut [T]);
    fn apply_transpose(&self, y: &[T], x: &mut [T]);
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Var {
    tape: u64,
    index: usize,
}

#[derive(Debug)]
enum Op<T: Real> {
    Leaf,
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Neg(usize),
    Scale(usize, T),
    AddScalar(usize),
    Sin(usize),
    Cos(usize),
    Tanh(usize),
    Powi(usize, i32),
    Sum(usize),
    WeightedSumSquares(usize, Arc<[T]>),
    Reshape(usize),
    AxisMap { input: usize, axis: usize, map: Arc<dyn LinearMap<T>> },
    JetAffine { input: usize, weight: usize, bias: usize },
    JetTanh { input: usize, dim: usize, second: bool },
    Plane { input: usize, plane: usize },
}

#[derive(Debug)]
struct Node<T: Real> {
    value: Tensor<T>,
    op: Op<T>,
    needs_grad: bool,
}

/// Recording of one forward evaluation.
pub struct Tape<T: Real> {
    id: u64,
    nodes: Vec<Node<T>>,
    consumed: bool,
}

impl<T: Real> fmt::Debug for Tape<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tape")
            .field("id", &self.id)
            .field("nodes", &self.nodes.len())
            .field("consumed", &self.consumed)
            .finish()
    }
}

impl<T: Real> Default for Tape<T> {
    fn default() -> Self {
        Self::new()
    }
}

/// Adjoints produced by [`Tape::backward`].
#[derive(Debug)]
pub struct Gradients<T> {
    tape: u64,
    adjoints: Vec<Option<Vec<T>>>,
}

impl<T: Real> Gradients<T> {
    /// Adjoint of `var`; `None` if the loss does not depend on it.
    pub fn wrt(&self, var: Var) -> Result<Option<&[T]>> {
        if var.tape != self.tape {
            return Err(DfrError::InvalidTape("variable belongs to another tape".into()));
        }
        Ok(self.adjoints.get(var.index).and_then(|a| a.as_deref()))
    }
}

impl<T: Real> Tape<T> {
    pub fn new() -> Self {
        Self { id: NEXT_TAPE_ID.fetch_add(1, Ordering::Relaxed), nodes: Vec::new(), consumed: false }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_consumed(&self) -> bool {
        self.consumed
    }

    fn node(&self, v: Var) -> &Node<T> {
        assert_eq!(v.tape, self.id, "variable used on a foreign tape");
        &self.nodes[v.index]
    }

    fn push(&mut self, value: Tensor<T>, op: Op<T>, inputs: &[usize]) -> Var {
        let needs_grad = inputs.iter().any(|&i| self.nodes[i].needs_grad);
        self.nodes.push(Node { value, op, needs_grad });
        Var { tape: self.id, index: self.nodes.len() - 1 }
    }

    pub fn value(&self, v: Var) -> &Tensor<T> {
        &self.node(v).value
    }

    pub fn shape(&self, v: Var) -> &[usize] {
        self.node(v).value.shape()
    }

    /// Value of a scalar node.
    pub fn scalar_value(&self, v: Var) -> T {
        let t = &self.node(v).value;
        assert_eq!(t.len(), 1, "scalar_value on a tensor of shape {:?}", t.shape());
        t.data[0]
    }

    /// Leaf that does not receive gradients.
    pub fn constant(&mut self, value: Tensor<T>) -> Var {
        self.nodes.push(Node { value, op: Op::Leaf, needs_grad: false });
        Var { tape: self.id, index: self.nodes.len() - 1 }
    }

    /// Leaf that receives gradients.
    pub fn parameter(&mut self, value: Tensor<T>) -> Var {
        self.nodes.push(Node { value, op: Op::Leaf, needs_grad: true });
        Var { tape: self.id, index: self.nodes.len() - 1 }
    }

    fn binary(&mut self, a: Var, b: Var, f: impl Fn(T, T) -> T, op: Op<T>) -> Var {
        let (x, y) = (&self.node(a).value, &self.node(b).value);
        assert_eq!(x.shape, y.shape, "elementwise operands must share a shape");
        let data = x.data.iter().zip(&y.data).map(|(&p, &q)| f(p, q)).collect();
        let value = Tensor { shape: x.shape.clone(), data };
        self.push(value, op, &[a.index, b.index])
    }

    fn unary(&mut self, a: Var, f: impl Fn(T) -> T, op: Op<T>) -> Var {
        let x = &self.node(a).value;
        let value = Tensor { shape: x.shape.clone(), data: x.data.iter().map(|&p| f(p)).collect() };
        self.push(value, op, &[a.index])
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        self.binary(a, b, |p, q| p + q, Op::Add(a.index, b.index))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        self.binary(a, b, |p, q| p - q, Op::Sub(a.index, b.index))
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        self.binary(a, b, |p, q| p * q, Op::Mul(a.index, b.index))
    }

    pub fn neg(&mut self, a: Var) -> Var {
        self.unary(a, |p| -p, Op::Neg(a.index))
    }

    pub fn scale(&mut self, a: Var, c: T) -> Var {
        self.unary(a, |p| p * c, Op::Scale(a.index, c))
    }

    pub fn add_scalar(&mut self, a: Var, c: T) -> Var {
        self.unary(a, |p| p + c, Op::AddScalar(a.index))
    }

    pub fn sin(&mut self, a: Var) -> Var {
        self.unary(a, |p| p.sin(), Op::Sin(a.index))
    }

    pub fn cos(&mut self, a: Var) -> Var {
        self.unary(a, |p| p.cos(), Op::Cos(a.index))
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        self.unary(a, |p| p.tanh(), Op::Tanh(a.index))
    }

    pub fn powi(&mut self, a: Var, n: i32) -> Var {
        self.unary(a, |p| p.powi(n), Op::Powi(a.index, n))
    }

    /// Sum of all entries (scalar result).
    pub fn sum(&mut self, a: Var) -> Var {
        let s = self.node(a).value.data.iter().copied().sum();
        self.push(Tensor::scalar(s), Op::Sum(a.index), &[a.index])
    }

    /// `sum_i w_i a_i^2` (scalar result).
    pub fn weighted_sum_squares(&mut self, a: Var, weights: Arc<[T]>) -> Var {
        let x = &self.node(a).value;
        assert_eq!(x.len(), weights.len(), "one weight per entry");
        let s = x.data.iter().zip(weights.iter()).map(|(&v, &w)| w * v * v).sum();
        self.push(Tensor::scalar(s), Op::WeightedSumSquares(a.index, weights), &[a.index])
    }

    pub fn reshape(&mut self, a: Var, shape: Vec<usize>) -> Var {
        let x = &self.node(a).value;
        assert_eq!(shape.iter().product::<usize>(), x.len(), "reshape must keep the entry count");
        let value = Tensor { shape, data: x.data.clone() };
        self.push(value, Op::Reshape(a.index), &[a.index])
    }

    /// Applies `map` to every fibre of `a` along `axis`.
    pub fn axis_map(&mut self, a: Var, axis: usize, map: Arc<dyn LinearMap<T>>) -> Var {
        let x = &self.node(a).value;
        assert!(axis < x.shape.len(), "axis {axis} out of range for {:?}", x.shape);
        assert_eq!(x.shape[axis], map.input_len(), "map input length must match the axis");
        let (outer, inner) = split_axis(&x.shape, axis);
        let (n, m) = (map.input_len(), map.output_len());
        let mut shape = x.shape.clone();
        shape[axis] = m;
        let mut out = vec![T::zero(); outer * m * inner];
        let mut fin = vec![T::zero(); n];
        let mut fout = vec![T::zero(); m];
        for o in 0..outer {
            for i in 0..inner {
                for j in 0..n {
                    fin[j] = x.data[(o * n + j) * inner + i];
                }
                map.apply(&fin, &mut fout);
                for j in 0..m {
                    out[(o * m + j) * inner + i] = fout[j];
                }
            }
        }
        let value = Tensor { shape, data: out };
        self.push(value, Op::AxisMap { input: a.index, axis, map }, &[a.index])
    }

    /// Jet of spatial coordinates: `points` is `[B, d]` row-major. Returns a
    /// constant of shape `[C, B, d]` with unit first derivatives.
    pub fn input_jet(&mut self, points: &[T], dim: usize, second: bool) -> Var {
        let b = points.len() / dim;
        let planes = if second { 1 + 2 * dim } else { 1 + dim };
        let mut data = vec![T::zero(); planes * b * dim];
        data[..b * dim].copy_from_slice(points);
        for j in 0..dim {
            let base = (1 + j) * b * dim;
            for p in 0..b {
                data[base + p * dim + j] = T::one();
            }
        }
        self.constant(Tensor { shape: vec![planes, b, dim], data })
    }

    /// `z_c = x_c A^T (+ b on plane 0)` for jet input `[C, B, W_in]`,
    /// weight `[W_out, W_in]`, bias `[W_out]`.
    pub fn jet_affine(&mut self, input: Var, weight: Var, bias: Var) -> Var {
        let x = &self.node(input).value;
        let a = &self.node(weight).value;
        let bvec = &self.node(bias).value;
        assert_eq!(x.shape.len(), 3, "jet tensors are [planes, points, width]");
        let (c, b, w_in) = (x.shape[0], x.shape[1], x.shape[2]);
        assert_eq!(a.shape, vec![a.shape[0], w_in], "weight must be [out, in]");
        let w_out = a.shape[0];
        assert_eq!(bvec.shape, vec![w_out], "bias must be [out]");
        let mut out = vec![T::zero(); c * b * w_out];
        let (xd, ad, bd) = (&x.data, &a.data, &bvec.data);
        out.par_chunks_mut(ROW_CHUNK * w_out).enumerate().for_each(|(chunk, rows)| {
            let first = chunk * ROW_CHUNK;
            for (r_local, orow) in rows.chunks_mut(w_out).enumerate() {
                let r = first + r_local;
                let xrow = &xd[r * w_in..(r + 1) * w_in];
                for (o, ov) in orow.iter_mut().enumerate() {
                    let arow = &ad[o * w_in..(o + 1) * w_in];
                    let mut acc = if r < b { bd[o] } else { T::zero() };
                    for (&p, &q) in xrow.iter().zip(arow) {
                        acc += p * q;
                    }
                    *ov = acc;
                }
            }
        });
        let value = Tensor { shape: vec![c, b, w_out], data: out };
        self.push(
            value,
            Op::JetAffine { input: input.index, weight: weight.index, bias: bias.index },
            &[input.index, weight.index, bias.index],
        )
    }

    /// Elementwise `tanh` on a jet, propagating first and (when present)
    /// second spatial derivatives.
    pub fn jet_tanh(&mut self, input: Var, dim: usize) -> Var {
        let x = &self.node(input).value;
        let (c, b, w) = (x.shape[0], x.shape[1], x.shape[2]);
        let second = match c {
            _ if c == 1 + dim => false,
            _ if c == 1 + 2 * dim => true,
            _ => panic!("jet with {c} planes does not match dimension {dim}"),
        };
        let plane = b * w;
        let mut out = vec![T::zero(); c * plane];
        let two = lit::<T>(2.0);
        for e in 0..plane {
            let t = x.data[e].tanh();
            let s = T::one() - t * t;
            out[e] = t;
            for j in 0..dim {
                let zj = x.data[(1 + j) * plane + e];
                out[(1 + j) * plane + e] = s * zj;
                if second {
                    let zjj = x.data[(1 + dim + j) * plane + e];
                    out[(1 + dim + j) * plane + e] = s * zjj - two * t * s * zj * zj;
                }
            }
        }
        let value = Tensor { shape: vec![c, b, w], data: out };
        self.push(value, Op::JetTanh { input: input.index, dim, second }, &[input.index])
    }

    /// Plane `plane` of a jet `[C, B, W]` as a `[B, W]` tensor.
    pub fn plane(&mut self, input: Var, plane: usize) -> Var {
        let x = &self.node(input).value;
        let (b, w) = (x.shape[1], x.shape[2]);
        let len = b * w;
        let data = x.data[plane * len..(plane + 1) * len].to_vec();
        let value = Tensor { shape: vec![b, w], data };
        self.push(value, Op::Plane { input: input.index, plane }, &[input.index])
    }

    /// Reverse sweep from the scalar `loss`. The tape cannot be swept twice.
    pub fn backward(&mut self, loss: Var) -> Result<Gradients<T>> {
        if loss.tape != self.id {
            return Err(DfrError::InvalidTape("loss belongs to another tape".into()));
        }
        if self.consumed {
            return Err(DfrError::InvalidTape("tape already consumed by a backward pass".into()));
        }
        if loss.index >= self.nodes.len() {
            return Err(DfrError::InvalidTape("stale variable".into()));
        }
        if self.nodes[loss.index].value.len() != 1 {
            return Err(DfrError::Shape("backward needs a scalar loss".into()));
        }
        self.consumed = true;
        let mut adj: Vec<Option<Vec<T>>> = vec![None; self.nodes.len()];
        adj[loss.index] = Some(vec![T::one()]);
        for i in (0..=loss.index).rev() {
            if !self.nodes[i].needs_grad {
                continue;
            }
            let Some(g) = adj[i].take() else { continue };
            self.propagate(i, &g, &mut adj);
            adj[i] = Some(g);
        }
        Ok(Gradients { tape: self.id, adjoints: adj })
    }

    fn accumulate(&self, adj: &mut [Option<Vec<T>>], target: usize, f: impl FnOnce(&mut [T])) {
        if !self.nodes[target].needs_grad {
            return;
        }
        let slot = adj[target].get_or_insert_with(|| vec![T::zero(); self.nodes[target].value.len()]);
        f(slot);
    }

    fn propagate(&self, i: usize, g: &[T], adj: &mut [Option<Vec<T>>]) {
        let node = &self.nodes[i];
        let val = |k: usize| &self.nodes[k].value.data;
        match &node.op {
            Op::Leaf => {}
            Op::Add(a, b) => {
                self.accumulate(adj, *a, |s| add_into(s, g));
                self.accumulate(adj, *b, |s| add_into(s, g));
            }
            Op::Sub(a, b) => {
                self.accumulate(adj, *a, |s| add_into(s, g));
                self.accumulate(adj, *b, |s| s.iter_mut().zip(g).for_each(|(x, &y)| *x -= y));
            }
            Op::Mul(a, b) => {
                let (va, vb) = (val(*a), val(*b));
                self.accumulate(adj, *a, |s| s.iter_mut().zip(g.iter().zip(vb)).for_each(|(x, (&y, &q))| *x += y * q));
                self.accumulate(adj, *b, |s| s.iter_mut().zip(g.iter().zip(va)).for_each(|(x, (&y, &p))| *x += y * p));
            }
            Op::Neg(a) => self.accumulate(adj, *a, |s| s.iter_mut().zip(g).for_each(|(x, &y)| *x -= y)),
            Op::Scale(a, c) => {
                let c = *c;
                self.accumulate(adj, *a, |s| s.iter_mut().zip(g).for_each(|(x, &y)| *x += c * y))
            }
            Op::AddScalar(a) | Op::Reshape(a) => self.accumulate(adj, *a, |s| add_into(s, g)),
            Op::Sin(a) => {
                let va = val(*a);
                self.accumulate(adj, *a, |s| {
                    s.iter_mut().zip(g.iter().zip(va)).for_each(|(x, (&y, &p))| *x += y * p.cos())
                })
            }
            Op::Cos(a) => {
                let va = val(*a);
                self.accumulate(adj, *a, |s| {
                    s.iter_mut().zip(g.iter().zip(va)).for_each(|(x, (&y, &p))| *x -= y * p.sin())
                })
            }
            Op::Tanh(a) => {
                let out = &node.value.data;
                self.accumulate(adj, *a, |s| {
                    s.iter_mut().zip(g.iter().zip(out)).for_each(|(x, (&y, &t))| *x += y * (T::one() - t * t))
                })
            }
            Op::Powi(a, n) => {
                let (va, n) = (val(*a), *n);
                let nf = T::from_i32(n).expect("small exponent");
                self.accumulate(adj, *a, |s| {
                    s.iter_mut().zip(g.iter().zip(va)).for_each(|(x, (&y, &p))| *x += y * nf * p.powi(n - 1))
                })
            }
            Op::Sum(a) => {
                let y = g[0];
                self.accumulate(adj, *a, |s| s.iter_mut().for_each(|x| *x += y))
            }
            Op::WeightedSumSquares(a, w) => {
                let (va, y) = (val(*a), g[0]);
                let two = lit::<T>(2.0);
                self.accumulate(adj, *a, |s| {
                    s.iter_mut().zip(va.iter().zip(w.iter())).for_each(|(x, (&p, &wi))| *x += two * wi * p * y)
                })
            }
            Op::AxisMap { input, axis, map } => {
                let shape = &self.nodes[*input].value.shape;
                let (outer, inner) = split_axis(shape, *axis);
                let (n, m) = (map.input_len(), map.output_len());
                self.accumulate(adj, *input, |s| {
                    let mut fout = vec![T::zero(); m];
                    let mut fin = vec![T::zero(); n];
                    for o in 0..outer {
                        for i in 0..inner {
                            for j in 0..m {
                                fout[j] = g[(o * m + j) * inner + i];
                            }
                            map.apply_transpose(&fout, &mut fin);
                            for j in 0..n {
                                s[(o * n + j) * inner + i] += fin[j];
                            }
                        }
                    }
                })
            }
            Op::JetAffine { input, weight, bias } => self.jet_affine_backward(g, *input, *weight, *bias, adj),
            Op::JetTanh { input, dim, second } => self.jet_tanh_backward(i, g, *input, *dim, *second, adj),
            Op::Plane { input, plane } => {
                let len = g.len();
                let off = plane * len;
                self.accumulate(adj, *input, |s| add_into(&mut s[off..off + len], g))
            }
        }
    }

    fn jet_affine_backward(&self, g: &[T], input: usize, weight: usize, bias: usize, adj: &mut [Option<Vec<T>>]) {
        let x = &self.nodes[input].value;
        let a = &self.nodes[weight].value;
        let (c, b, w_in) = (x.shape[0], x.shape[1], x.shape[2]);
        let w_out = a.shape[0];
        let rows = c * b;
        let (xd, ad) = (&x.data, &a.data);

        self.accumulate(adj, input, |s| {
            s.par_chunks_mut(ROW_CHUNK * w_in).enumerate().for_each(|(chunk, srows)| {
                let first = chunk * ROW_CHUNK;
                for (r_local, srow) in srows.chunks_mut(w_in).enumerate() {
                    let r = first + r_local;
                    let grow = &g[r * w_out..(r + 1) * w_out];
                    for (o, &go) in grow.iter().enumerate() {
                        if go == T::zero() {
                            continue;
                        }
                        let arow = &ad[o * w_in..(o + 1) * w_in];
                        for (sv, &q) in srow.iter_mut().zip(arow) {
                            *sv += go * q;
                        }
                    }
                }
            })
        });

        self.accumulate(adj, weight, |s| {
            let chunks = rows.div_ceil(ROW_CHUNK);
            let partials: Vec<Vec<T>> = (0..chunks)
                .into_par_iter()
                .map(|chunk| {
                    let mut acc = vec![T::zero(); w_out * w_in];
                    let end = ((chunk + 1) * ROW_CHUNK).min(rows);
                    for r in chunk * ROW_CHUNK..end {
                        let grow = &g[r * w_out..(r + 1) * w_out];
                        let xrow = &xd[r * w_in..(r + 1) * w_in];
                        for (o, &go) in grow.iter().enumerate() {
                            let arow = &mut acc[o * w_in..(o + 1) * w_in];
                            for (av, &p) in arow.iter_mut().zip(xrow) {
                                *av += go * p;
                            }
                        }
                    }
                    acc
                })
                .collect();
            for p in partials {
                add_into(s, &p);
            }
        });

        self.accumulate(adj, bias, |s| {
            for r in 0..b {
                add_into(s, &g[r * w_out..(r + 1) * w_out]);
            }
        });
    }

    fn jet_tanh_backward(&self, i: usize, g: &[T], input: usize, dim: usize, second: bool, adj: &mut [Option<Vec<T>>]) {
        let out = &self.nodes[i].value;
        let x = &self.nodes[input].value;
        let plane = out.shape[1] * out.shape[2];
        let two = lit::<T>(2.0);
        let four = lit::<T>(4.0);
        self.accumulate(adj, input, |s| {
            for e in 0..plane {
                let t = out.data[e];
                let sech2 = T::one() - t * t;
                // d(sech2)/dz = -2 t sech2, d(t sech2)/dz = sech2^2 - 2 t^2 sech2
                let dsech2 = -two * t * sech2;
                let dts = sech2 * sech2 - two * t * t * sech2;
                let mut gz = g[e] * sech2;
                for j in 0..dim {
                    let pj = (1 + j) * plane + e;
                    let zj = x.data[pj];
                    let gj = g[pj];
                    gz += gj * dsech2 * zj;
                    let mut gzj = gj * sech2;
                    if second {
                        let pjj = (1 + dim + j) * plane + e;
                        let zjj = x.data[pjj];
                        let gjj = g[pjj];
                        gz += gjj * (dsech2 * zjj - two * dts * zj * zj);
                        gzj -= gjj * four * t * sech2 * zj;
                        s[pjj] += gjj * sech2;
                    }
                    s[pj] += gzj;
                }
                s[e] += gz;
            }
        });
    }
}

fn add_into<T: Real>(s: &mut [T], g: &[T]) {
    s.iter_mut().zip(g).for_each(|(x, &y)| *x += y);
}

fn split_axis(shape: &[usize], axis: usize) -> (usize, usize) {
    let outer = shape[..axis].iter().product();
    let inner = shape[axis + 1..].iter().product();
    (outer, inner)
}
