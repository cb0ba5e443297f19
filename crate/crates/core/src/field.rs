//! Analytic scalar fields and sampling grids.

use std::fmt;
use std::sync::Arc;

use crate::dual::Dual;
use crate::error::{DfrError, Result};
use crate::scalar::{Real, Scalar};
use crate::transforms::MidpointGrid;

/// A scalar expression generic over the arithmetic it is evaluated in.
///
/// Writing an expression once against [`Scalar`] gives values (`T`),
/// gradients (`Dual<T>`) and pure second derivatives (`Dual<Dual<T>>`).
pub trait ScalarFn: Send + Sync + 'static {
    fn call<S: Scalar>(&self, x: &[S]) -> S;
}

/// Declares a unit struct implementing [`ScalarFn`].
#[macro_export]
macro_rules! scalar_fn {
    ($(#[$meta:meta])* $vis:vis $name:ident, |$x:ident| $body:expr) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, Default)]
        $vis struct $name;

        impl $crate::field::ScalarFn for $name {
            #[allow(unused_imports)]
            fn call<S: $crate::scalar::Scalar>(&self, $x: &[S]) -> S {
                use $crate::scalar::Scalar as _;
                $body
            }
        }
    };
}

/// Shared point function `x -> T`.
pub type PointFn<T> = Arc<dyn Fn(&[T]) -> T + Send + Sync>;

type VecFn<T> = Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>;

/// Scalar field with exact gradient and pure second derivatives.
#[derive(Clone)]
pub struct AnalyticField<T> {
    dim: usize,
    value: PointFn<T>,
    gradient: VecFn<T>,
    second: VecFn<T>,
}

impl<T> fmt::Debug for AnalyticField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("AnalyticField").field("dim", &self.dim).finish_non_exhaustive()
    }
}

fn seeded<S: Scalar>(x: &[S], j: usize) -> Vec<Dual<S>> {
    x.iter().enumerate().map(|(i, &v)| if i == j { Dual::variable(v) } else { Dual::constant(v) }).collect()
}

impl<T: Real> AnalyticField<T> {
    pub fn new<F: ScalarFn>(dim: usize, f: F) -> Self {
        let f = Arc::new(f);
        let (fv, fg, fs) = (f.clone(), f.clone(), f);
        Self {
            dim,
            value: Arc::new(move |x: &[T]| fv.call(x)),
            gradient: Arc::new(move |x: &[T]| (0..x.len()).map(|j| fg.call(&seeded(x, j)).eps).collect()),
            second: Arc::new(move |x: &[T]| {
                (0..x.len())
                    .map(|j| {
                        let inner = seeded(x, j);
                        let outer: Vec<Dual<Dual<T>>> = inner
                            .iter()
                            .enumerate()
                            .map(|(i, &d)| {
                                let seed = if i == j { T::one() } else { T::zero() };
                                Dual::new(d, Dual::constant(seed))
                            })
                            .collect();
                        fs.call(&outer).eps.eps
                    })
                    .collect()
            }),
        }
    }

    /// The zero field.
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            value: Arc::new(|_| T::zero()),
            gradient: Arc::new(|x: &[T]| vec![T::zero(); x.len()]),
            second: Arc::new(|x: &[T]| vec![T::zero(); x.len()]),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self, x: &[T]) -> T {
        (self.value)(x)
    }

    pub fn gradient(&self, x: &[T]) -> Vec<T> {
        (self.gradient)(x)
    }

    /// `[d²f/dx_1², ..., d²f/dx_d²]`.
    pub fn second_diagonal(&self, x: &[T]) -> Vec<T> {
        (self.second)(x)
    }

    pub fn laplacian(&self, x: &[T]) -> T {
        self.second_diagonal(x).into_iter().fold(T::zero(), |a, b| a + b)
    }

    pub fn value_fn(&self) -> PointFn<T> {
        self.value.clone()
    }
}

/// Axis-aligned box `[lower_i, upper_i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxDomain<T> {
    pub lower: Vec<T>,
    pub upper: Vec<T>,
}

impl<T: Real> BoxDomain<T> {
    pub fn new(lower: Vec<T>, upper: Vec<T>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(DfrError::Shape("box bounds must have equal, nonzero length".into()));
        }
        for (&a, &b) in lower.iter().zip(&upper) {
            if !(a < b) {
                return Err(DfrError::InvalidInterval { a: a.re(), b: b.re() });
            }
        }
        Ok(Self { lower, upper })
    }

    /// `(0, π)^dim`.
    pub fn reference(dim: usize) -> Self {
        Self { lower: vec![T::zero(); dim], upper: vec![T::PI(); dim] }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn volume(&self) -> T {
        self.lower.iter().zip(&self.upper).fold(T::one(), |v, (&a, &b)| v * (b - a))
    }

    pub fn axis_grid(&self, axis: usize, n: usize) -> Result<MidpointGrid<T>> {
        MidpointGrid::new(self.lower[axis], self.upper[axis], n)
    }

    /// Tensor midpoint grid with `n` nodes per axis, row-major with axis 0
    /// slowest. Returns `n^d` points flattened as `[point][coordinate]`.
    pub fn midpoint_points(&self, n: usize) -> Result<Vec<T>> {
        let axes = (0..self.dim()).map(|a| self.axis_grid(a, n)).collect::<Result<Vec<_>>>()?;
        Ok(tensor_points(&axes.iter().map(|g| g.points.as_slice()).collect::<Vec<_>>()))
    }
}

/// Cartesian product of per-axis coordinates, axis 0 slowest.
pub fn tensor_points<T: Real>(axes: &[&[T]]) -> Vec<T> {
    let d = axes.len();
    let total: usize = axes.iter().map(|a| a.len()).product();
    let mut out = Vec::with_capacity(total * d);
    let mut idx = vec![0usize; d];
    for _ in 0..total {
        for (a, &i) in idx.iter().enumerate() {
            out.push(axes[a][i]);
        }
        for a in (0..d).rev() {
            idx[a] += 1;
            if idx[a] < axes[a].len() {
                break;
            }
            idx[a] = 0;
        }
    }
    out
}

/// Applies `f` to every point of a flattened `[B, d]` array.
pub fn sample<T: Real>(points: &[T], dim: usize, f: impl Fn(&[T]) -> T) -> Vec<T> {
    points.chunks(dim).map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    scalar_fn!(Bump, |x| (x[0] * S::cst(2.0)).sin() * x[1].powi(3));

    #[test]
    fn analytic_field_derivatives() {
        let f = AnalyticField::<f64>::new(2, Bump);
        let x = [0.3, 1.7];
        assert_relative_eq!(f.value(&x), (0.6f64).sin() * 1.7f64.powi(3));
        let g = f.gradient(&x);
        assert_relative_eq!(g[0], 2.0 * 0.6f64.cos() * 1.7f64.powi(3), epsilon = 1e-14);
        assert_relative_eq!(g[1], 0.6f64.sin() * 3.0 * 1.7f64.powi(2), epsilon = 1e-14);
        let h = f.second_diagonal(&x);
        assert_relative_eq!(h[0], -4.0 * 0.6f64.sin() * 1.7f64.powi(3), epsilon = 1e-13);
        assert_relative_eq!(h[1], 0.6f64.sin() * 6.0 * 1.7, epsilon = 1e-13);
    }

    #[test]
    fn tensor_grid_layout() {
        let d = BoxDomain::<f64>::reference(2);
        let p = d.midpoint_points(2).unwrap();
        let q = std::f64::consts::PI / 4.0;
        assert_eq!(p.len(), 8);
        assert_relative_eq!(p[0], q);
        assert_relative_eq!(p[1], q);
        assert_relative_eq!(p[2], q);
        assert_relative_eq!(p[3], 3.0 * q);
        assert_relative_eq!(p[4], 3.0 * q);
        assert_relative_eq!(p[5], q);
    }

    #[test]
    fn degenerate_box_is_rejected() {
        assert!(BoxDomain::new(vec![1.0], vec![1.0]).is_err());
        assert!(BoxDomain::<f64>::new(vec![0.0, 0.0], vec![1.0]).is_err());
    }
}
