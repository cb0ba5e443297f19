//! Benchmark problems.
//!
//! Each constructor returns a [`ProblemSpec`] with its weak form, optional
//! strong form, exact solution, cutoff and default network shape.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use crate::basis::DirichletMask1D;
use crate::dual::Dual;
use crate::error::{DfrError, Result};
use crate::field::{AnalyticField, BoxDomain, ScalarFn};
use crate::losses::{
    BoundaryCondition, NeumannTerm, PointTerm, StrongCtx, StrongResidualSpec, WeakCtx, WeakResidualSpec,
};
use crate::network::{Architecture, CutoffSpec};
use crate::scalar::{lit, Real, Scalar};
use crate::scalar_fn;
use crate::tape::{Tape, Var};

/// A weak-form boundary value problem on a box.
#[derive(Clone)]
pub struct ProblemSpec<T: Real> {
    pub name: &'static str,
    pub description: &'static str,
    pub domain: BoxDomain<T>,
    /// Dirichlet ends per axis.
    pub masks: Vec<DirichletMask1D>,
    pub weak: WeakResidualSpec<T>,
    pub strong: Option<StrongResidualSpec<T>>,
    pub exact: Option<AnalyticField<T>>,
    pub cutoff: CutoffSpec<T>,
    pub linear: bool,
    /// Hidden layer widths of the reference network.
    pub hidden_widths: Vec<usize>,
    /// Whether the reference protocol uses validation early stopping.
    pub early_stopping: bool,
}

impl<T: Real> fmt::Debug for ProblemSpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("masks", &self.masks)
            .field("strong", &self.strong.is_some())
            .field("exact", &self.exact.is_some())
            .finish_non_exhaustive()
    }
}

impl<T: Real> ProblemSpec<T> {
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn architecture(&self, seed: u64) -> Architecture {
        Architecture::new(self.dim(), self.hidden_widths.clone(), seed)
    }
}

pub const PROBLEM_NAMES: [&str; 6] = ["mp1", "mp2", "mp3", "mp4", "mp5", "mp6"];

/// Looks a problem up by name (`mp1`..`mp6`).
pub fn problem_by_name<T: Real>(name: &str) -> Result<ProblemSpec<T>> {
    match name.to_ascii_lowercase().as_str() {
        "mp1" => Ok(mp1()),
        "mp2" => Ok(mp2()),
        "mp3" => Ok(mp3()),
        "mp4" => Ok(mp4()),
        "mp5" => Ok(mp5()),
        "mp6" => Ok(mp6()),
        other => Err(DfrError::Configuration(format!("unknown problem '{other}'"))),
    }
}

pub fn all_problems<T: Real>() -> Vec<ProblemSpec<T>> {
    vec![mp1(), mp2(), mp3(), mp4(), mp5(), mp6()]
}

/// `x ↦ operator(u(x), u'(x), u''(x), x)` for a one-dimensional `exact`,
/// using nested forward mode.
pub fn manufactured_forcing<F, O>(exact: F, operator: O) -> impl Fn(f64) -> f64 + Send + Sync
where
    F: ScalarFn,
    O: Fn(f64, f64, f64, f64) -> f64 + Send + Sync,
{
    move |x| {
        let seed = Dual::new(Dual::variable(x), Dual::constant(1.0));
        let y = exact.call(&[seed]);
        operator(y.re.re, y.re.eps, y.eps.eps, x)
    }
}

fn flux_gradient<T: Real>() -> Arc<dyn Fn(&mut Tape<T>, &WeakCtx) -> Vec<Var> + Send + Sync> {
    Arc::new(|_t, c| c.grad.clone())
}

fn point_fn<T: Real>(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Arc<dyn Fn(&[T]) -> T + Send + Sync> {
    Arc::new(move |x: &[T]| lit(f(x[0].re())))
}

fn domain<T: Real>(dim: usize) -> BoxDomain<T> {
    BoxDomain::reference(dim)
}

scalar_fn!(
    /// `sin 2x`.
    pub Mp1Exact,
    |x| (x[0] * S::cst(2.0)).sin()
);

/// `u'' + 4 sin 2x = 0`, `u(0) = u(π) = 0`.
pub fn mp1<T: Real>() -> ProblemSpec<T> {
    let source = point_fn(|x| -4.0 * (2.0 * x).sin());
    ProblemSpec {
        name: "mp1",
        description: "smooth solution sin 2x",
        domain: domain(1),
        masks: vec![DirichletMask1D::BOTH],
        weak: WeakResidualSpec {
            flux: flux_gradient(),
            reaction: None,
            source: Some(source),
            coefficient: None,
            neumann: vec![],
            point_terms: vec![],
        },
        strong: Some(StrongResidualSpec {
            interior: Arc::new(|t, c: &StrongCtx| t.add(c.second[0], c.source.expect("source"))),
            source: Some(point_fn(|x| 4.0 * (2.0 * x).sin())),
            coefficient: None,
            boundary: vec![],
        }),
        exact: Some(AnalyticField::new(1, Mp1Exact)),
        cutoff: CutoffSpec::both_ends(),
        linear: true,
        hidden_widths: vec![25; 5],
        early_stopping: false,
    }
}

pub const MP2_A: f64 = 20.0;

scalar_fn!(
    /// `tanh(a(x − π/2)) + tanh(aπ/2)`.
    pub Mp2Exact,
    |x| (S::cst(MP2_A) * (x[0] - S::cst(PI / 2.0))).tanh() + S::cst((MP2_A * PI / 2.0).tanh())
);

fn sech2(v: f64) -> f64 {
    let c = v.cosh();
    1.0 / (c * c)
}

/// `u'' = −2a² tanh(a(x−π/2)) sech²(a(x−π/2))`, `u(0) = 0`, flux data at `π`.
pub fn mp2<T: Real>() -> ProblemSpec<T> {
    let a = MP2_A;
    let forcing = move |x: f64| {
        let s = a * (x - PI / 2.0);
        -2.0 * a * a * s.tanh() * sech2(s)
    };
    let flux_end = a * sech2(a * PI / 2.0);
    let boundary_value: T = lit(flux_end);
    ProblemSpec {
        name: "mp2",
        description: "steep interior layer, a = 20",
        domain: domain(1),
        masks: vec![DirichletMask1D::LEFT],
        weak: WeakResidualSpec {
            flux: flux_gradient(),
            reaction: None,
            source: Some(point_fn(forcing)),
            coefficient: None,
            // −g v(π) with g = −a sech²(aπ/2), i.e. +a sech²(aπ/2) v(π)
            neumann: vec![NeumannTerm { axis: 0, upper: true, data: Arc::new(move |_x: &[T]| lit(-flux_end)) }],
            point_terms: vec![],
        },
        strong: Some(StrongResidualSpec {
            interior: Arc::new(|t, c: &StrongCtx| t.add(c.second[0], c.source.expect("source"))),
            source: Some(point_fn(move |x| -forcing(x))),
            coefficient: None,
            boundary: vec![BoundaryCondition {
                location: vec![T::PI()],
                residual: Arc::new(move |t, c: &StrongCtx| t.add_scalar(c.grad[0], -boundary_value)),
            }],
        }),
        exact: Some(AnalyticField::new(1, Mp2Exact)),
        cutoff: CutoffSpec::left_end(),
        linear: true,
        hidden_widths: vec![25; 5],
        early_stopping: false,
    }
}

/// Conductivity of the one-dimensional interface problem; the left limit
/// is taken at `π/2`.
pub fn mp3_sigma(x: f64) -> f64 {
    if x <= PI / 2.0 {
        1.0
    } else {
        2.0
    }
}

scalar_fn!(
    /// Weak solution: `sin 2x` left of `π/2`, `½ sin 2x` right of it.
    pub Mp3Exact,
    |x| {
        let s = (x[0] * S::cst(2.0)).sin();
        if x[0].re() <= PI / 2.0 { s } else { s * S::cst(0.5) }
    }
);

scalar_fn!(
    /// The C¹ solution of the non-equivalent strong form.
    pub Mp3Spurious,
    |x| {
        let s = (x[0] * S::cst(2.0)).sin();
        if x[0].re() <= PI / 2.0 {
            s + x[0] * S::cst(0.5)
        } else {
            s * S::cst(0.5) - (x[0] - S::cst(PI)) * S::cst(0.5)
        }
    }
);

/// `(σu')' + 4 sin 2x = 0` with `σ` jumping from 1 to 2 at `π/2`.
pub fn mp3<T: Real>() -> ProblemSpec<T> {
    ProblemSpec {
        name: "mp3",
        description: "discontinuous coefficient in 1D",
        domain: domain(1),
        masks: vec![DirichletMask1D::BOTH],
        weak: WeakResidualSpec {
            flux: Arc::new(|t, c: &WeakCtx| vec![t.mul(c.coef.expect("coefficient"), c.grad[0])]),
            reaction: None,
            source: Some(point_fn(|x| -4.0 * (2.0 * x).sin())),
            coefficient: Some(point_fn(mp3_sigma)),
            neumann: vec![],
            point_terms: vec![],
        },
        strong: Some(StrongResidualSpec {
            interior: Arc::new(|t, c: &StrongCtx| t.add(c.second[0], c.source.expect("source"))),
            source: Some(point_fn(|x| 4.0 / mp3_sigma(x) * (2.0 * x).sin())),
            coefficient: None,
            boundary: vec![],
        }),
        exact: Some(AnalyticField::new(1, Mp3Exact)),
        cutoff: CutoffSpec::both_ends(),
        linear: true,
        hidden_widths: vec![25; 5],
        early_stopping: false,
    }
}

/// The spurious strong-form solution of [`mp3`].
pub fn mp3_spurious<T: Real>() -> AnalyticField<T> {
    AnalyticField::new(1, Mp3Spurious)
}

scalar_fn!(
    /// Tent `(π/2 − |x − π/2|) / 2`, the Green's function of `−u''` at `π/2`
    /// for a unit source.
    pub Mp4Exact,
    |x| (S::cst(PI / 2.0) - (x[0] - S::cst(PI / 2.0)).abs()) * S::cst(0.5)
);

/// `−u'' = δ(x − π/2)`, `u(0) = u(π) = 0`.
pub fn mp4<T: Real>() -> ProblemSpec<T> {
    ProblemSpec {
        name: "mp4",
        description: "point source at pi/2",
        domain: domain(1),
        masks: vec![DirichletMask1D::BOTH],
        weak: WeakResidualSpec {
            flux: flux_gradient(),
            reaction: None,
            source: None,
            coefficient: None,
            neumann: vec![],
            point_terms: vec![PointTerm { location: vec![lit(PI / 2.0)], coefficient: T::one() }],
        },
        strong: None,
        exact: Some(AnalyticField::new(1, Mp4Exact)),
        cutoff: CutoffSpec::both_ends(),
        linear: true,
        hidden_widths: vec![25; 5],
        early_stopping: true,
    }
}

scalar_fn!(
    /// `5x(x − π/2) tanh(5(x − π))`.
    pub Mp5Exact,
    |x| S::cst(5.0) * x[0] * (x[0] - S::cst(PI / 2.0)) * (S::cst(5.0) * (x[0] - S::cst(PI))).tanh()
);

/// Forcing that makes [`Mp5Exact`] the solution of the nonlinear problem.
pub fn mp5_forcing(x: f64) -> f64 {
    manufactured_forcing(Mp5Exact, |u, du, ddu, _| ddu * (1.0 + 0.5 * du.cos()) - u - u * u * u)(x)
}

/// `((u' + ½ sin u')' = f + u + u³`, `u(0) = u(π) = 0`.
pub fn mp5<T: Real>() -> ProblemSpec<T> {
    let half: T = lit(0.5);
    ProblemSpec {
        name: "mp5",
        description: "nonlinear flux and reaction",
        domain: domain(1),
        masks: vec![DirichletMask1D::BOTH],
        weak: WeakResidualSpec {
            flux: Arc::new(move |t, c: &WeakCtx| {
                let s = t.sin(c.grad[0]);
                let s = t.scale(s, half);
                vec![t.add(c.grad[0], s)]
            }),
            reaction: Some(Arc::new(|t, c: &WeakCtx| {
                let cube = t.powi(c.u, 3);
                t.add(c.u, cube)
            })),
            source: Some(point_fn(mp5_forcing)),
            coefficient: None,
            neumann: vec![],
            point_terms: vec![],
        },
        strong: Some(StrongResidualSpec {
            interior: Arc::new(move |t, c: &StrongCtx| {
                let cs = t.cos(c.grad[0]);
                let cs = t.scale(cs, half);
                let cs = t.add_scalar(cs, T::one());
                let flux_div = t.mul(c.second[0], cs);
                let cube = t.powi(c.u, 3);
                let r = t.add(c.u, cube);
                let r = t.add(r, c.source.expect("source"));
                t.sub(r, flux_div)
            }),
            source: Some(point_fn(mp5_forcing)),
            coefficient: None,
            boundary: vec![],
        }),
        exact: Some(AnalyticField::new(1, Mp5Exact)),
        cutoff: CutoffSpec::both_ends(),
        linear: false,
        hidden_widths: vec![25; 5],
        early_stopping: true,
    }
}

/// Radius of the high-conductivity disc.
pub const MP6_RADIUS: f64 = 1.0;

/// `σ = 2` on the closed disc `|x − (π/2, π/2)| ≤ 1`, else 1.
pub fn mp6_sigma(x: &[f64]) -> f64 {
    let r2 = (x[0] - PI / 2.0).powi(2) + (x[1] - PI / 2.0).powi(2);
    if r2 <= MP6_RADIUS * MP6_RADIUS {
        2.0
    } else {
        1.0
    }
}

scalar_fn!(
    /// `(x₁ − π)(x₂ − π) x₁ x₂ (1 − |x − c|²)`.
    pub Mp6Flux,
    |x| {
        let c = S::cst(PI / 2.0);
        let r2 = (x[0] - c) * (x[0] - c) + (x[1] - c) * (x[1] - c);
        (x[0] - S::cst(PI)) * (x[1] - S::cst(PI)) * x[0] * x[1] * (S::cst(1.0) - r2)
    }
);

scalar_fn!(
    /// Exact solution `w / σ`.
    pub Mp6Exact,
    |x| {
        let w = Mp6Flux.call(x);
        let r2 = (x[0].re() - PI / 2.0).powi(2) + (x[1].re() - PI / 2.0).powi(2);
        if r2 <= MP6_RADIUS * MP6_RADIUS { w * S::cst(0.5) } else { w }
    }
);

scalar_fn!(
    /// `φ₁ = x₁(π − x₁) x₂`.
    pub Mp6Cutoff,
    |x| x[0] * (S::cst(PI) - x[0]) * x[1]
);

/// `−∇·(σ∇u) = −Δw` on `(0, π)²`, Dirichlet on `x₁ ∈ {0, π}` and
/// `x₂ = 0`, flux data on `x₂ = π`.
pub fn mp6<T: Real>() -> ProblemSpec<T> {
    let w = AnalyticField::<T>::new(2, Mp6Flux);
    let w_src = w.clone();
    let w_edge = w;
    ProblemSpec {
        name: "mp6",
        description: "discontinuous coefficient in 2D",
        domain: domain(2),
        masks: vec![DirichletMask1D::BOTH, DirichletMask1D::LEFT],
        weak: WeakResidualSpec {
            flux: Arc::new(|t, c: &WeakCtx| {
                let s = c.coef.expect("coefficient");
                vec![t.mul(s, c.grad[0]), t.mul(s, c.grad[1])]
            }),
            reaction: None,
            source: Some(Arc::new(move |x: &[T]| w_src.laplacian(x))),
            coefficient: Some(Arc::new(|x: &[T]| lit(mp6_sigma(&[x[0].re(), x[1].re()])))),
            neumann: vec![NeumannTerm { axis: 1, upper: true, data: Arc::new(move |x: &[T]| w_edge.gradient(x)[1]) }],
            point_terms: vec![],
        },
        strong: None,
        exact: Some(AnalyticField::new(2, Mp6Exact)),
        cutoff: CutoffSpec::new(AnalyticField::new(2, Mp6Cutoff), AnalyticField::zero(2)),
        linear: true,
        hidden_widths: vec![10; 5],
        early_stopping: true,
    }
}

/// Closed form of the MP6 flux data on `x₂ = π`.
pub fn mp6_edge_flux(x1: f64) -> f64 {
    PI * (x1 - PI) * x1 * (1.0 - (x1 - PI / 2.0).powi(2) - (PI / 2.0).powi(2))
}
