//! Residual spectra and the three training losses.
//!
//! A weak residual `⟨R(u), v⟩ = ∫ F¹·∇v + F² v − ∫_{Γ_N} g v − Σ c v(x₀)`
//! is projected onto the tensor eigenbasis of `1 − Δ` by applying the
//! per-axis value or derivative projectors of [`Basis1D`] along each axis of
//! the midpoint grid. Terms that do not depend on `u` are projected once at
//! construction.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::basis::{Basis1D, DirichletMask1D, ModeProjector};
use crate::error::{DfrError, Result};
use crate::field::{sample, tensor_points, BoxDomain, PointFn};
use crate::network::{collect_gradient, Candidate, CutoffSpec, DerivativeOrder, Network, NetworkCandidate, Recorded};
use crate::problems::ProblemSpec;
use crate::scalar::{idx, Real};
use crate::tape::{LinearMap, Tape, Tensor, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LossKind {
    Dfr,
    Vpinn,
    Collocation,
}

impl LossKind {
    pub const ALL: [LossKind; 3] = [LossKind::Dfr, LossKind::Vpinn, LossKind::Collocation];

    pub fn name(self) -> &'static str {
        match self {
            LossKind::Dfr => "dfr",
            LossKind::Vpinn => "vpinn",
            LossKind::Collocation => "collocation",
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LossKind {
    type Err = DfrError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dfr" => Ok(LossKind::Dfr),
            "vpinn" | "vp" => Ok(LossKind::Vpinn),
            "collocation" | "col" | "pinn" => Ok(LossKind::Collocation),
            other => Err(DfrError::Configuration(format!("unknown loss kind '{other}'"))),
        }
    }
}

/// Quantities a weak-form closure may combine, each of shape `[B]`.
#[derive(Clone, Debug)]
pub struct WeakCtx {
    pub u: Var,
    pub grad: Vec<Var>,
    /// Sampled coefficient (e.g. a conductivity), when the problem has one.
    pub coef: Option<Var>,
}

pub type FluxFn<T> = Arc<dyn Fn(&mut Tape<T>, &WeakCtx) -> Vec<Var> + Send + Sync>;
pub type ReactionFn<T> = Arc<dyn Fn(&mut Tape<T>, &WeakCtx) -> Var + Send + Sync>;

/// `−∫_face g v` on the face `x_axis = lower/upper`.
#[derive(Clone)]
pub struct NeumannTerm<T> {
    pub axis: usize,
    pub upper: bool,
    /// Evaluated at full-dimensional points on the face.
    pub data: PointFn<T>,
}

/// `−c v(x₀)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointTerm<T> {
    pub location: Vec<T>,
    pub coefficient: T,
}

/// `∫ F¹(x,u,∇u)·∇v + F²(x,u,∇u) v` plus boundary and point terms, with
/// `F² = reaction(u) + source(x)`.
#[derive(Clone)]
pub struct WeakResidualSpec<T: Real> {
    pub flux: FluxFn<T>,
    pub reaction: Option<ReactionFn<T>>,
    pub source: Option<PointFn<T>>,
    pub coefficient: Option<PointFn<T>>,
    pub neumann: Vec<NeumannTerm<T>>,
    pub point_terms: Vec<PointTerm<T>>,
}

impl<T: Real> fmt::Debug for WeakResidualSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeakResidualSpec")
            .field("reaction", &self.reaction.is_some())
            .field("source", &self.source.is_some())
            .field("coefficient", &self.coefficient.is_some())
            .field("neumann", &self.neumann.len())
            .field("point_terms", &self.point_terms.len())
            .finish()
    }
}

/// Quantities a strong-form closure may combine, each of shape `[B]`.
#[derive(Clone, Debug)]
pub struct StrongCtx {
    pub u: Var,
    pub grad: Vec<Var>,
    pub second: Vec<Var>,
    pub coef: Option<Var>,
    pub source: Option<Var>,
}

pub type StrongFn<T> = Arc<dyn Fn(&mut Tape<T>, &StrongCtx) -> Var + Send + Sync>;

#[derive(Clone)]
pub struct BoundaryCondition<T: Real> {
    pub location: Vec<T>,
    pub residual: StrongFn<T>,
}

/// Pointwise residual `L_u(x)` and boundary residuals `G_u`.
#[derive(Clone)]
pub struct StrongResidualSpec<T: Real> {
    pub interior: StrongFn<T>,
    pub source: Option<PointFn<T>>,
    pub coefficient: Option<PointFn<T>>,
    pub boundary: Vec<BoundaryCondition<T>>,
}

impl<T: Real> fmt::Debug for StrongResidualSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("StrongResidualSpec").field("boundary", &self.boundary.len()).finish_non_exhaustive()
    }
}

/// `R̂(k)` over the multi-index box `{1..N−1}^d` with matching eigenvalues.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualSpectrum<T> {
    pub shape: Vec<usize>,
    pub coefficients: Vec<T>,
    pub eigenvalues: Vec<T>,
}

impl<T: Real> ResidualSpectrum<T> {
    /// Coefficient at the one-based multi-index `k`.
    pub fn get(&self, k: &[usize]) -> Option<T> {
        if k.len() != self.shape.len() {
            return None;
        }
        let mut flat = 0;
        for (&ki, &m) in k.iter().zip(&self.shape) {
            if ki == 0 || ki > m {
                return None;
            }
            flat = flat * m + (ki - 1);
        }
        Some(self.coefficients[flat])
    }

    pub fn max_abs(&self) -> T {
        self.coefficients.iter().fold(T::zero(), |m, v| m.max(v.abs()))
    }
}

/// `Σ R̂(k)² / λ_k`.
pub fn dfr_loss<T: Real>(spectrum: &ResidualSpectrum<T>) -> T {
    spectrum.coefficients.iter().zip(&spectrum.eigenvalues).map(|(&r, &l)| r * r / l).sum()
}

/// `Σ R̂(k)²`.
pub fn vpinn_loss<T: Real>(spectrum: &ResidualSpectrum<T>) -> T {
    spectrum.coefficients.iter().map(|&r| r * r).sum()
}

/// Projects `[B]` samples on the tensor grid onto the mode box.
fn project_on_tape<T: Real>(tape: &mut Tape<T>, v: Var, n: usize, maps: &[Arc<dyn LinearMap<T>>]) -> Var {
    let mut t = tape.reshape(v, vec![n; maps.len()]);
    for (axis, m) in maps.iter().enumerate() {
        t = tape.axis_map(t, axis, m.clone());
    }
    t
}

fn project_constant<T: Real>(data: Vec<T>, n: usize, maps: &[Arc<dyn LinearMap<T>>]) -> Vec<T> {
    if maps.is_empty() {
        return data;
    }
    let mut tape = Tape::new();
    let v = tape.constant(Tensor::vector(data));
    let out = project_on_tape(&mut tape, v, n, maps);
    tape.value(out).data().to_vec()
}

/// Weak residual projector on an `N^d` midpoint grid.
pub struct WeakAssembler<T: Real> {
    dim: usize,
    n: usize,
    points: Vec<T>,
    coef: Option<Vec<T>>,
    value_maps: Vec<Arc<dyn LinearMap<T>>>,
    derivative_maps: Vec<Arc<dyn LinearMap<T>>>,
    constant: Vec<T>,
    eigenvalues: Vec<T>,
    dfr_weights: Arc<[T]>,
    unit_weights: Arc<[T]>,
    flux: FluxFn<T>,
    reaction: Option<ReactionFn<T>>,
}

impl<T: Real> fmt::Debug for WeakAssembler<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeakAssembler").field("dim", &self.dim).field("n", &self.n).finish_non_exhaustive()
    }
}

impl<T: Real> WeakAssembler<T> {
    pub fn new(domain: &BoxDomain<T>, masks: &[DirichletMask1D], spec: &WeakResidualSpec<T>, n: usize) -> Result<Self> {
        let d = domain.dim();
        if masks.len() != d {
            return Err(DfrError::Shape(format!("{} boundary masks for a {d}-dimensional domain", masks.len())));
        }
        if n < 2 {
            return Err(DfrError::InvalidSize(format!("weak assembly needs at least 2 points per axis, got {n}")));
        }
        let m = n - 1;
        let bases: Vec<Basis1D<T>> =
            (0..d).map(|a| Basis1D::new(masks[a], domain.lower[a], domain.upper[a])).collect::<Result<_>>()?;
        let mut value_maps: Vec<Arc<dyn LinearMap<T>>> = Vec::with_capacity(d);
        let mut derivative_maps: Vec<Arc<dyn LinearMap<T>>> = Vec::with_capacity(d);
        for b in &bases {
            value_maps.push(Arc::new(b.value_projector(n)?) as Arc<dyn LinearMap<T>>);
            derivative_maps.push(Arc::new(b.derivative_projector(n)?) as Arc<dyn LinearMap<T>>);
        }
        let points = domain.midpoint_points(n)?;
        let coef = spec.coefficient.as_ref().map(|c| sample(&points, d, |x| c(x)));

        let total = m.pow(d as u32);
        let mut constant = match &spec.source {
            Some(src) => project_constant(sample(&points, d, |x| src(x)), n, &value_maps),
            None => vec![T::zero(); total],
        };

        let axis_phi = |a: usize, x: T| -> Result<Vec<T>> { (1..=m).map(|k| bases[a].eval_phi(k, x)).collect() };

        for term in &spec.neumann {
            let a = term.axis;
            if a >= d {
                return Err(DfrError::Index(format!("Neumann face axis {a} in {d} dimensions")));
            }
            let fixed = if term.upper { domain.upper[a] } else { domain.lower[a] };
            let grids: Vec<Vec<T>> = (0..d)
                .map(|i| if i == a { Ok(vec![fixed]) } else { domain.axis_grid(i, n).map(|g| g.points) })
                .collect::<Result<_>>()?;
            let face_pts = tensor_points(&grids.iter().map(|g| g.as_slice()).collect::<Vec<_>>());
            let g = sample(&face_pts, d, |x| (term.data)(x));
            let maps: Vec<Arc<dyn LinearMap<T>>> = (0..d).filter(|&i| i != a).map(|i| value_maps[i].clone()).collect();
            let face_proj = if d > 1 { project_constant(g, n, &maps) } else { g };
            let phi_a = axis_phi(a, fixed)?;
            // face_proj is laid out over the remaining axes in order; insert axis a
            let inner: usize = m.pow((d - 1 - a) as u32);
            for (flat, c) in constant.iter_mut().enumerate() {
                let ka = (flat / inner) % m;
                let outer = flat / (inner * m);
                let rest = outer * inner + flat % inner;
                *c -= phi_a[ka] * face_proj[rest];
            }
        }

        for pt in &spec.point_terms {
            if pt.location.len() != d {
                return Err(DfrError::Shape("point term location has the wrong dimension".into()));
            }
            let phis: Vec<Vec<T>> = (0..d).map(|a| axis_phi(a, pt.location[a])).collect::<Result<_>>()?;
            for (flat, c) in constant.iter_mut().enumerate() {
                let mut rem = flat;
                let mut prod = pt.coefficient;
                for a in (0..d).rev() {
                    prod *= phis[a][rem % m];
                    rem /= m;
                }
                *c -= prod;
            }
        }

        let axis_eig: Vec<Vec<T>> = bases
            .iter()
            .map(|b| (1..=m).map(|k| b.eigenvalue(k)).collect::<Result<Vec<T>>>())
            .collect::<Result<_>>()?;
        let mut eigenvalues = vec![T::one() - idx::<T>(d); total];
        for (flat, l) in eigenvalues.iter_mut().enumerate() {
            let mut rem = flat;
            for a in (0..d).rev() {
                *l += axis_eig[a][rem % m];
                rem /= m;
            }
        }
        let dfr_weights: Arc<[T]> = eigenvalues.iter().map(|&l| T::one() / l).collect::<Vec<_>>().into();
        let unit_weights: Arc<[T]> = vec![T::one(); total].into();

        Ok(Self {
            dim: d,
            n,
            points,
            coef,
            value_maps,
            derivative_maps,
            constant,
            eigenvalues,
            dfr_weights,
            unit_weights,
            flux: spec.flux.clone(),
            reaction: spec.reaction.clone(),
        })
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn modes(&self) -> usize {
        self.n - 1
    }

    pub fn eigenvalues(&self) -> &[T] {
        &self.eigenvalues
    }

    /// Records `R̂` (shape `[N−1; d]`) for `candidate`.
    pub fn record_spectrum<C: Candidate<T> + ?Sized>(
        &self,
        tape: &mut Tape<T>,
        candidate: &C,
    ) -> Result<(Var, Recorded)> {
        if candidate.dim() != self.dim {
            return Err(DfrError::Shape(format!(
                "{}-dimensional candidate on a {}-dimensional grid",
                candidate.dim(),
                self.dim
            )));
        }
        let rec = candidate.record(tape, &self.points, DerivativeOrder::First)?;
        let coef = self.coef.as_ref().map(|c| tape.constant(Tensor::vector(c.clone())));
        let ctx = WeakCtx { u: rec.sample.value, grad: rec.sample.gradient.clone(), coef };
        let flux = (self.flux)(tape, &ctx);
        if flux.len() != self.dim {
            return Err(DfrError::Shape(format!("flux has {} components in {} dimensions", flux.len(), self.dim)));
        }
        let mut total: Option<Var> = None;
        for (j, &fj) in flux.iter().enumerate() {
            let maps: Vec<Arc<dyn LinearMap<T>>> = (0..self.dim)
                .map(|a| if a == j { self.derivative_maps[a].clone() } else { self.value_maps[a].clone() })
                .collect();
            let p = project_on_tape(tape, fj, self.n, &maps);
            total = Some(match total {
                Some(t) => tape.add(t, p),
                None => p,
            });
        }
        let mut r = total.expect("at least one dimension");
        if let Some(reaction) = &self.reaction {
            let f2 = reaction(tape, &ctx);
            let p = project_on_tape(tape, f2, self.n, &self.value_maps);
            r = tape.add(r, p);
        }
        let c = tape.constant(Tensor::new(vec![self.n - 1; self.dim], self.constant.clone())?);
        r = tape.add(r, c);
        Ok((r, rec))
    }

    pub fn spectrum<C: Candidate<T> + ?Sized>(&self, candidate: &C) -> Result<ResidualSpectrum<T>> {
        let mut tape = Tape::new();
        let (r, _) = self.record_spectrum(&mut tape, candidate)?;
        Ok(ResidualSpectrum {
            shape: vec![self.n - 1; self.dim],
            coefficients: tape.value(r).data().to_vec(),
            eigenvalues: self.eigenvalues.clone(),
        })
    }

    fn record_loss<C: Candidate<T> + ?Sized>(
        &self,
        tape: &mut Tape<T>,
        candidate: &C,
        kind: LossKind,
    ) -> Result<(Var, Vec<Recorded>)> {
        let (r, rec) = self.record_spectrum(tape, candidate)?;
        let flat = tape.reshape(r, vec![self.constant.len()]);
        let w = match kind {
            LossKind::Dfr => self.dfr_weights.clone(),
            LossKind::Vpinn => self.unit_weights.clone(),
            LossKind::Collocation => {
                return Err(DfrError::UnsupportedFormulation("collocation is not a weak-form loss".into()))
            }
        };
        Ok((tape.weighted_sum_squares(flat, w), vec![rec]))
    }
}

/// Mean squared strong residual on an `N^d` midpoint grid plus squared
/// boundary residuals.
pub struct CollocationAssembler<T: Real> {
    dim: usize,
    points: Vec<T>,
    coef: Option<Vec<T>>,
    source: Option<Vec<T>>,
    weights: Arc<[T]>,
    spec: StrongResidualSpec<T>,
}

impl<T: Real> fmt::Debug for CollocationAssembler<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CollocationAssembler").field("points", &(self.points.len() / self.dim)).finish_non_exhaustive()
    }
}

impl<T: Real> CollocationAssembler<T> {
    pub fn new(domain: &BoxDomain<T>, spec: &StrongResidualSpec<T>, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(DfrError::InvalidSize("collocation needs at least one point".into()));
        }
        let d = domain.dim();
        let points = domain.midpoint_points(n)?;
        let k = points.len() / d;
        Ok(Self {
            dim: d,
            coef: spec.coefficient.as_ref().map(|c| sample(&points, d, |x| c(x))),
            source: spec.source.as_ref().map(|s| sample(&points, d, |x| s(x))),
            weights: vec![T::one() / idx::<T>(k); k].into(),
            points,
            spec: spec.clone(),
        })
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    /// Records `L_u` at the grid points.
    pub fn record_interior<C: Candidate<T> + ?Sized>(
        &self,
        tape: &mut Tape<T>,
        candidate: &C,
    ) -> Result<(Var, Recorded)> {
        if candidate.dim() != self.dim {
            return Err(DfrError::Shape("candidate dimension does not match the grid".into()));
        }
        let rec = candidate.record(tape, &self.points, DerivativeOrder::Second)?;
        let ctx = StrongCtx {
            u: rec.sample.value,
            grad: rec.sample.gradient.clone(),
            second: rec.sample.second.clone(),
            coef: self.coef.as_ref().map(|c| tape.constant(Tensor::vector(c.clone()))),
            source: self.source.as_ref().map(|s| tape.constant(Tensor::vector(s.clone()))),
        };
        Ok(((self.spec.interior)(tape, &ctx), rec))
    }

    fn record_loss<C: Candidate<T> + ?Sized>(&self, tape: &mut Tape<T>, candidate: &C) -> Result<(Var, Vec<Recorded>)> {
        let (l, rec) = self.record_interior(tape, candidate)?;
        let mut loss = tape.weighted_sum_squares(l, self.weights.clone());
        let mut recs = vec![rec];
        for bc in &self.spec.boundary {
            let brec = candidate.record(tape, &bc.location, DerivativeOrder::Second)?;
            let ctx = StrongCtx {
                u: brec.sample.value,
                grad: brec.sample.gradient.clone(),
                second: brec.sample.second.clone(),
                coef: self.spec.coefficient.as_ref().map(|c| tape.constant(Tensor::vector(vec![c(&bc.location)]))),
                source: self.spec.source.as_ref().map(|s| tape.constant(Tensor::vector(vec![s(&bc.location)]))),
            };
            let g = (bc.residual)(tape, &ctx);
            let b = tape.value(g).len();
            let term = tape.weighted_sum_squares(g, vec![T::one() / idx::<T>(b); b].into());
            loss = tape.add(loss, term);
            recs.push(brec);
        }
        Ok((loss, recs))
    }
}

#[derive(Debug)]
enum Inner<T: Real> {
    Weak(WeakAssembler<T>),
    Strong(CollocationAssembler<T>),
}

/// A loss of a given kind for one problem and grid size.
#[derive(Debug)]
pub struct LossAssembler<T: Real> {
    kind: LossKind,
    n: usize,
    inner: Inner<T>,
}

impl<T: Real> LossAssembler<T> {
    pub fn new(problem: &ProblemSpec<T>, kind: LossKind, n: usize) -> Result<Self> {
        let inner = match kind {
            LossKind::Dfr | LossKind::Vpinn => {
                Inner::Weak(WeakAssembler::new(&problem.domain, &problem.masks, &problem.weak, n)?)
            }
            LossKind::Collocation => {
                let strong = problem.strong.as_ref().ok_or_else(|| {
                    DfrError::UnsupportedFormulation(format!("problem {} has no strong form", problem.name))
                })?;
                Inner::Strong(CollocationAssembler::new(&problem.domain, strong, n)?)
            }
        };
        Ok(Self { kind, n, inner })
    }

    pub fn kind(&self) -> LossKind {
        self.kind
    }

    pub fn grid_size(&self) -> usize {
        self.n
    }

    pub fn weak(&self) -> Option<&WeakAssembler<T>> {
        match &self.inner {
            Inner::Weak(w) => Some(w),
            Inner::Strong(_) => None,
        }
    }

    /// Records the scalar loss; returns it with every candidate record made.
    pub fn record<C: Candidate<T> + ?Sized>(&self, tape: &mut Tape<T>, candidate: &C) -> Result<(Var, Vec<Recorded>)> {
        match &self.inner {
            Inner::Weak(w) => w.record_loss(tape, candidate, self.kind),
            Inner::Strong(s) => s.record_loss(tape, candidate),
        }
    }

    pub fn value<C: Candidate<T> + ?Sized>(&self, candidate: &C) -> Result<T> {
        let mut tape = Tape::new();
        let (l, _) = self.record(&mut tape, candidate)?;
        Ok(tape.scalar_value(l))
    }

    /// Loss and its gradient with respect to the network parameters.
    pub fn value_and_gradient(&self, network: &Network<T>, cutoff: &CutoffSpec<T>) -> Result<(T, Vec<T>)> {
        let mut tape = Tape::new();
        let cand = NetworkCandidate { network, cutoff };
        let (l, recs) = self.record(&mut tape, &cand)?;
        let value = tape.scalar_value(l);
        let refs: Vec<&Recorded> = recs.iter().collect();
        let grad = collect_gradient(&mut tape, l, &refs, network.parameter_count())?;
        Ok((value, grad))
    }
}

/// Residual spectrum of `candidate` for `problem` on an `n`-point grid per axis.
pub fn residual_spectrum<T: Real, C: Candidate<T> + ?Sized>(
    problem: &ProblemSpec<T>,
    candidate: &C,
    n: usize,
) -> Result<ResidualSpectrum<T>> {
    WeakAssembler::new(&problem.domain, &problem.masks, &problem.weak, n)?.spectrum(candidate)
}

/// Collocation loss of `candidate` with `n` interior points per axis.
pub fn collocation_loss<T: Real, C: Candidate<T> + ?Sized>(
    problem: &ProblemSpec<T>,
    candidate: &C,
    n: usize,
) -> Result<T> {
    LossAssembler::new(problem, LossKind::Collocation, n)?.value(candidate)
}

/// Projects `samples` on an `n`-point midpoint grid of `basis`'s interval
/// onto `∫ g φ_k`, `k = 1..n−1`.
pub fn project_values<T: Real>(basis: &Basis1D<T>, samples: &[T]) -> Result<Vec<T>> {
    let p: ModeProjector<T> = basis.value_projector(samples.len())?;
    p.project(samples)
}
