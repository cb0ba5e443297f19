//! Eigenbases of `1 - d²/dx²` on an interval and their tensor products.
//!
//! On `(0, pi)` the four boundary configurations give
//!
//! | Dirichlet at | `lambda_k`       | `phi_k`                      | values  | derivatives |
//! |--------------|------------------|------------------------------|---------|-------------|
//! | both ends    | `1 + k²`         | `sqrt(2/pi) sin(k x)`        | DST-II  | DCT-II      |
//! | left         | `1 + (k-1/2)²`   | `sqrt(2/pi) sin((k-1/2) x)`  | DST-IV  | DCT-IV      |
//! | right        | `1 + (k-1/2)²`   | `sqrt(2/pi) cos((k-1/2) x)`  | DCT-IV  | DST-IV      |
//! | neither      | `1 + (k-1)²`     | `sqrt(2/pi) cos((k-1) x)`    | DCT-II  | DST-II      |
//!
//! with `phi_1 = pi^{-1/2}` in the pure Neumann case. Each `phi_k` has unit
//! `L²` norm and `H¹` norm squared `lambda_k`. Intervals other than
//! `(0, pi)` are handled by an affine change of variable.

use std::sync::Arc;

use crate::error::{DfrError, Result};
use crate::scalar::{idx, lit, Real};
use crate::tape::LinearMap;
use crate::transforms::{TransformKind, TransformPlan};

/// Which endpoints of an interval carry a homogeneous Dirichlet condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DirichletMask1D {
    pub left: bool,
    pub right: bool,
}

impl DirichletMask1D {
    pub const BOTH: Self = Self { left: true, right: true };
    pub const LEFT: Self = Self { left: true, right: false };
    pub const RIGHT: Self = Self { left: false, right: true };
    pub const NONE: Self = Self { left: false, right: false };

    pub const ALL: [Self; 4] = [Self::BOTH, Self::LEFT, Self::RIGHT, Self::NONE];

    fn is_sine(self) -> bool {
        self.left
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Basis1D<T> {
    mask: DirichletMask1D,
    a: T,
    b: T,
}

fn check_mode(k: usize) -> Result<()> {
    if k == 0 {
        return Err(DfrError::Index("basis modes are numbered from 1".into()));
    }
    Ok(())
}

/// Basis on `(0, pi)` for the given boundary configuration.
pub fn make_basis_1d<T: Real>(mask: DirichletMask1D) -> Basis1D<T> {
    Basis1D { mask, a: T::zero(), b: T::PI() }
}

impl<T: Real> Basis1D<T> {
    pub fn new(mask: DirichletMask1D, a: T, b: T) -> Result<Self> {
        make_basis_1d(mask).rescale(a, b)
    }

    pub fn mask(&self) -> DirichletMask1D {
        self.mask
    }

    pub fn interval(&self) -> (T, T) {
        (self.a, self.b)
    }

    /// Same boundary configuration on `(a, b)`.
    pub fn rescale(&self, a: T, b: T) -> Result<Self> {
        if !(a < b) {
            return Err(DfrError::InvalidInterval {
                a: a.to_f64().unwrap_or(f64::NAN),
                b: b.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Self { mask: self.mask, a, b })
    }

    /// `pi / (b - a)`: stretch from the reference interval.
    fn stretch(&self) -> T {
        T::PI() / (self.b - self.a)
    }

    /// Angular frequency of mode `k` on the reference interval `(0, pi)`.
    pub fn reference_frequency(&self, k: usize) -> Result<T> {
        check_mode(k)?;
        let half = lit::<T>(0.5);
        Ok(match (self.mask.left, self.mask.right) {
            (true, true) => idx(k),
            (true, false) | (false, true) => idx::<T>(k) - half,
            (false, false) => idx(k - 1),
        })
    }

    pub fn eigenvalue(&self, k: usize) -> Result<T> {
        let w = self.reference_frequency(k)? * self.stretch();
        Ok(T::one() + w * w)
    }

    pub fn value_transform(&self) -> TransformKind {
        match (self.mask.left, self.mask.right) {
            (true, true) => TransformKind::DstII,
            (true, false) => TransformKind::DstIV,
            (false, true) => TransformKind::DctIV,
            (false, false) => TransformKind::DctII,
        }
    }

    pub fn derivative_transform(&self) -> TransformKind {
        self.value_transform().partner()
    }

    /// Transform row holding mode `k` of the value transform.
    pub fn value_row(&self, k: usize) -> Result<Option<usize>> {
        check_mode(k)?;
        Ok(Some(k - 1))
    }

    /// Transform row holding the derivative of mode `k`, `None` when
    /// `phi_k' = 0`.
    pub fn derivative_row(&self, k: usize) -> Result<Option<usize>> {
        check_mode(k)?;
        Ok(match (self.mask.left, self.mask.right) {
            // cos(k x) is row k of DCT-II
            (true, true) => Some(k),
            (true, false) | (false, true) => Some(k - 1),
            // sin((k-1) x) is row k-2 of DST-II
            (false, false) => k.checked_sub(2),
        })
    }

    /// Signed factor `m_k` with `phi_k' = m_k sqrt(2/pi) trig'(w_k x)` on the
    /// reference interval.
    pub fn derivative_multiplier(&self, k: usize) -> Result<T> {
        let w = self.reference_frequency(k)?;
        Ok(if self.mask.is_sine() { w } else { -w })
    }

    fn reference_phi(&self, k: usize, t: T) -> T {
        let w = self.reference_frequency(k).expect("mode checked by caller");
        let norm = (lit::<T>(2.0) / T::PI()).sqrt();
        if self.mask.is_sine() {
            norm * (w * t).sin()
        } else if !self.mask.right && k == 1 {
            T::one() / T::PI().sqrt()
        } else {
            norm * (w * t).cos()
        }
    }

    fn reference_phi_prime(&self, k: usize, t: T) -> T {
        let w = self.reference_frequency(k).expect("mode checked by caller");
        let norm = (lit::<T>(2.0) / T::PI()).sqrt();
        if self.mask.is_sine() {
            norm * w * (w * t).cos()
        } else {
            -norm * w * (w * t).sin()
        }
    }

    pub fn eval_phi(&self, k: usize, x: T) -> Result<T> {
        check_mode(k)?;
        let s = self.stretch();
        Ok(s.sqrt() * self.reference_phi(k, s * (x - self.a)))
    }

    pub fn eval_phi_prime(&self, k: usize, x: T) -> Result<T> {
        check_mode(k)?;
        let s = self.stretch();
        Ok(s.sqrt() * s * self.reference_phi_prime(k, s * (x - self.a)))
    }

    /// `(phi_k(a), phi_k(b))`.
    pub fn endpoint_values(&self, k: usize) -> Result<(T, T)> {
        Ok((self.eval_phi(k, self.a)?, self.eval_phi(k, self.b)?))
    }

    /// Maps `n` midpoint samples on the interval to `int g phi_k`,
    /// `k = 1..n-1`.
    pub fn value_projector(&self, n: usize) -> Result<ModeProjector<T>> {
        self.projector(n, false)
    }

    /// Maps `n` midpoint samples on the interval to `int g phi_k'`,
    /// `k = 1..n-1`.
    pub fn derivative_projector(&self, n: usize) -> Result<ModeProjector<T>> {
        self.projector(n, true)
    }

    fn projector(&self, n: usize, derivative: bool) -> Result<ModeProjector<T>> {
        if n < 2 {
            return Err(DfrError::InvalidSize(format!("need at least 2 samples to project onto modes, got {n}")));
        }
        let kind = if derivative { self.derivative_transform() } else { self.value_transform() };
        let plan = Arc::new(TransformPlan::new(kind, n)?);
        let s = self.stretch();
        let norm = (lit::<T>(2.0) / T::PI()).sqrt();
        let mut rows = Vec::with_capacity(n - 1);
        let mut scales = Vec::with_capacity(n - 1);
        for k in 1..n {
            if derivative {
                rows.push(self.derivative_row(k)?);
                scales.push(s.sqrt() * norm * self.derivative_multiplier(k)?);
            } else {
                rows.push(self.value_row(k)?);
                scales.push(norm / s.sqrt());
            }
        }
        Ok(ModeProjector { plan, rows, scales })
    }
}

/// Linear map from midpoint samples to basis-mode integrals, built on a
/// transform plan followed by row selection and scaling.
#[derive(Debug)]
pub struct ModeProjector<T: Real> {
    plan: Arc<TransformPlan<T>>,
    rows: Vec<Option<usize>>,
    scales: Vec<T>,
}

impl<T: Real> ModeProjector<T> {
    pub fn samples(&self) -> usize {
        self.plan.size()
    }

    pub fn modes(&self) -> usize {
        self.rows.len()
    }

    pub fn project(&self, samples: &[T]) -> Result<Vec<T>> {
        if samples.len() != self.samples() {
            return Err(DfrError::Shape(format!(
                "projector expects {} samples, got {}",
                self.samples(),
                samples.len()
            )));
        }
        let mut out = vec![T::zero(); self.modes()];
        self.apply(samples, &mut out);
        Ok(out)
    }
}

impl<T: Real> LinearMap<T> for ModeProjector<T> {
    fn input_len(&self) -> usize {
        self.plan.size()
    }

    fn output_len(&self) -> usize {
        self.rows.len()
    }

    fn apply(&self, x: &[T], y: &mut [T]) {
        let mut full = vec![T::zero(); self.plan.size()];
        self.plan.forward_into(x, &mut full);
        for ((o, row), &s) in y.iter_mut().zip(&self.rows).zip(&self.scales) {
            *o = row.map_or(T::zero(), |r| s * full[r]);
        }
    }

    fn apply_transpose(&self, y: &[T], x: &mut [T]) {
        let mut full = vec![T::zero(); self.plan.size()];
        for ((&v, row), &s) in y.iter().zip(&self.rows).zip(&self.scales) {
            if let Some(r) = row {
                full[*r] += s * v;
            }
        }
        self.plan.transpose_into(&full, x);
    }
}

/// Tensor-product basis on a box.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisND<T> {
    pub factors: Vec<Basis1D<T>>,
}

impl<T: Real> BasisND<T> {
    pub fn new(factors: Vec<Basis1D<T>>) -> Self {
        Self { factors }
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    /// `1 - d + sum_i lambda_{k_i}`.
    pub fn tensor_eigenvalue(&self, multi_index: &[usize]) -> Result<T> {
        if multi_index.len() != self.dim() {
            return Err(DfrError::Shape(format!(
                "multi-index of length {} for a {}-dimensional basis",
                multi_index.len(),
                self.dim()
            )));
        }
        let mut total = T::one() - idx::<T>(self.dim());
        for (basis, &k) in self.factors.iter().zip(multi_index) {
            total += basis.eigenvalue(k)?;
        }
        Ok(total)
    }

    /// Tensor eigenvalue from per-axis eigenvalues.
    pub fn combine_eigenvalues(axis_eigenvalues: &[T]) -> T {
        let d = idx::<T>(axis_eigenvalues.len());
        T::one() - d + axis_eigenvalues.iter().copied().sum::<T>()
    }
}
