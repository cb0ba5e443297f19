//! Type-II and type-IV discrete sine and cosine transforms.
//!
//! The orthonormal matrices are indexed by `k, n = 0..N-1`:
//!
//! ```text
//! S^II_kn = sqrt(2/N) e_k  sin(pi/N (n+1/2)(k+1)),   e_{N-1} = 1/sqrt(2)
//! S^IV_kn = sqrt(2/N)      sin(pi/N (n+1/2)(k+1/2))
//! C^II_kn = sqrt(2/N) e'_k cos(pi/N (n+1/2) k),       e'_0    = 1/sqrt(2)
//! C^IV_kn = sqrt(2/N)      cos(pi/N (n+1/2)(k+1/2))
//! ```
//!
//! Applied to samples `g((2n+1)pi/(2N))` and scaled by `pi/sqrt(2N)`, row
//! `k-1` is the midpoint-rule approximation of `int_0^pi g(x) trig(w x) dx`
//! where `w` is the row frequency. The dense matrix is the reference
//! definition; the fast path reduces every kind to one complex FFT of
//! length `2N`.

use std::fmt;
use std::sync::{Arc, OnceLock};

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{DfrError, Result};
use crate::scalar::{idx, lit, Real};

/// Below this size `apply` uses the dense matrix.
pub const DENSE_CUTOFF: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TransformKind {
    DstII,
    DstIV,
    DctII,
    DctIV,
}

impl TransformKind {
    pub const ALL: [TransformKind; 4] = [Self::DstII, Self::DstIV, Self::DctII, Self::DctIV];

    pub fn is_sine(self) -> bool {
        matches!(self, Self::DstII | Self::DstIV)
    }

    pub fn is_type_iv(self) -> bool {
        matches!(self, Self::DstIV | Self::DctIV)
    }

    /// The kind related to `self` through `S = J C D`.
    pub fn partner(self) -> Self {
        match self {
            Self::DstII => Self::DctII,
            Self::DctII => Self::DstII,
            Self::DstIV => Self::DctIV,
            Self::DctIV => Self::DstIV,
        }
    }
}

impl fmt::Display for TransformKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::DstII => "DST-II",
            Self::DstIV => "DST-IV",
            Self::DctII => "DCT-II",
            Self::DctIV => "DCT-IV",
        };
        f.write_str(s)
    }
}

/// `sin` or `cos` of `pi * p / q` with `p` reduced modulo the period `2q`
/// before conversion, so large index products do not lose accuracy.
fn trig_of_fraction<T: Real>(sine: bool, p: usize, q: usize) -> T {
    let p = p % (2 * q);
    let angle = T::PI() * idx::<T>(p) / idx::<T>(q);
    if sine {
        angle.sin()
    } else {
        angle.cos()
    }
}

/// Row-major `n x n` matrix of the given transform.
pub fn build_transform_matrix<T: Real>(kind: TransformKind, n: usize) -> Result<Vec<T>> {
    if n == 0 {
        return Err(DfrError::InvalidSize("transform size must be at least 1".into()));
    }
    let norm = (lit::<T>(2.0) / idx::<T>(n)).sqrt();
    let inv_sqrt2 = T::FRAC_1_SQRT_2();
    let mut m = vec![T::zero(); n * n];
    for k in 0..n {
        for j in 0..n {
            let odd = 2 * j + 1;
            let v: T = match kind {
                // pi (2j+1)(k+1) / (2N)
                TransformKind::DstII => {
                    let e = if k == n - 1 { inv_sqrt2 } else { T::one() };
                    e * trig_of_fraction::<T>(true, odd * (k + 1), 2 * n)
                }
                TransformKind::DctII => {
                    let e = if k == 0 { inv_sqrt2 } else { T::one() };
                    e * trig_of_fraction::<T>(false, odd * k, 2 * n)
                }
                // pi (2j+1)(2k+1) / (4N)
                TransformKind::DstIV => trig_of_fraction::<T>(true, odd * (2 * k + 1), 4 * n),
                TransformKind::DctIV => trig_of_fraction::<T>(false, odd * (2 * k + 1), 4 * n),
            };
            m[k * n + j] = norm * v;
        }
    }
    Ok(m)
}

/// A prepared transform of fixed kind and size.
///
/// Immutable after construction; every method takes `&self`.
pub struct TransformPlan<T: Real> {
    kind: TransformKind,
    size: usize,
    /// Built on first use.
    dense: OnceLock<Vec<T>>,
    fft: Arc<dyn Fft<T>>,
    /// `exp(-i pi n / (2N))` for type IV, unused for type II.
    pre: Vec<Complex<T>>,
    /// `exp(-i pi (m + delta) / (2N))`, `m = 0..=N`.
    post: Vec<Complex<T>>,
    norm: T,
    quadrature: T,
}

impl<T: Real> fmt::Debug for TransformPlan<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TransformPlan").field("kind", &self.kind).field("size", &self.size).finish()
    }
}

fn unit_phase<T: Real>(p: usize, q: usize) -> Complex<T> {
    // exp(-i pi p / q)
    Complex::new(trig_of_fraction(false, p, q), -trig_of_fraction::<T>(true, p, q))
}

impl<T: Real> TransformPlan<T> {
    pub fn new(kind: TransformKind, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(DfrError::InvalidSize("transform size must be at least 1".into()));
        }
        let n = size;
        let fft = FftPlanner::new().plan_fft_forward(2 * n);
        let (pre, post) = if kind.is_type_iv() {
            let pre = (0..n).map(|j| unit_phase(j, 2 * n)).collect();
            let post = (0..=n).map(|m| unit_phase(2 * m + 1, 4 * n)).collect();
            (pre, post)
        } else {
            (Vec::new(), (0..=n).map(|m| unit_phase(m, 2 * n)).collect())
        };
        Ok(Self {
            kind,
            size,
            dense: OnceLock::new(),
            fft,
            pre,
            post,
            norm: (lit::<T>(2.0) / idx::<T>(n)).sqrt(),
            quadrature: T::PI() / (lit::<T>(2.0) * idx::<T>(n)).sqrt(),
        })
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn fast_path_available(&self) -> bool {
        true
    }

    pub fn dense_matrix(&self) -> &[T] {
        self.dense.get_or_init(|| build_transform_matrix(self.kind, self.size).expect("size checked in new"))
    }

    /// The midpoint-rule prefactor `pi / sqrt(2N)`.
    pub fn quadrature_factor(&self) -> T {
        self.quadrature
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.size {
            return Err(DfrError::Shape(format!(
                "{} plan of size {} applied to {} samples",
                self.kind, self.size, len
            )));
        }
        Ok(())
    }

    /// Quadrature-scaled coefficients: entry `k-1` approximates the integral
    /// of `g` against the row-`k-1` mode on `(0, pi)`.
    pub fn apply(&self, samples: &[T]) -> Result<Vec<T>> {
        self.check_len(samples.len())?;
        let mut out = vec![T::zero(); self.size];
        self.forward_into(samples, &mut out);
        Ok(out)
    }

    /// Adjoint of [`apply`](Self::apply).
    pub fn apply_transpose(&self, coefficients: &[T]) -> Result<Vec<T>> {
        self.check_len(coefficients.len())?;
        let mut out = vec![T::zero(); self.size];
        self.transpose_into(coefficients, &mut out);
        Ok(out)
    }

    pub fn apply_dense(&self, samples: &[T]) -> Result<Vec<T>> {
        self.check_len(samples.len())?;
        let mut out = vec![T::zero(); self.size];
        self.dense_into(samples, &mut out, false);
        scale(&mut out, self.quadrature);
        Ok(out)
    }

    pub fn apply_fast(&self, samples: &[T]) -> Result<Vec<T>> {
        self.check_len(samples.len())?;
        let mut out = vec![T::zero(); self.size];
        self.fast_into(samples, &mut out);
        scale(&mut out, self.quadrature);
        Ok(out)
    }

    pub fn apply_transpose_dense(&self, coefficients: &[T]) -> Result<Vec<T>> {
        self.check_len(coefficients.len())?;
        let mut out = vec![T::zero(); self.size];
        self.dense_into(coefficients, &mut out, true);
        scale(&mut out, self.quadrature);
        Ok(out)
    }

    pub fn apply_transpose_fast(&self, coefficients: &[T]) -> Result<Vec<T>> {
        self.check_len(coefficients.len())?;
        let mut out = vec![T::zero(); self.size];
        self.fast_transpose_into(coefficients, &mut out);
        scale(&mut out, self.quadrature);
        Ok(out)
    }

    /// Unchecked quadrature-scaled forward transform.
    pub(crate) fn forward_into(&self, x: &[T], out: &mut [T]) {
        if self.size < DENSE_CUTOFF {
            self.dense_into(x, out, false);
        } else {
            self.fast_into(x, out);
        }
        scale(out, self.quadrature);
    }

    pub(crate) fn transpose_into(&self, y: &[T], out: &mut [T]) {
        if self.size < DENSE_CUTOFF {
            self.dense_into(y, out, true);
        } else {
            self.fast_transpose_into(y, out);
        }
        scale(out, self.quadrature);
    }

    fn dense_into(&self, x: &[T], out: &mut [T], transpose: bool) {
        let n = self.size;
        let dense = self.dense_matrix();
        if transpose {
            out.iter_mut().for_each(|o| *o = T::zero());
            for (k, &xk) in x.iter().enumerate() {
                let row = &dense[k * n..(k + 1) * n];
                for (o, &m) in out.iter_mut().zip(row) {
                    *o += m * xk;
                }
            }
        } else {
            for (k, o) in out.iter_mut().enumerate() {
                let row = &dense[k * n..(k + 1) * n];
                *o = row.iter().zip(x).fold(T::zero(), |acc, (&m, &v)| acc + m * v);
            }
        }
    }

    /// `Z_m = sum_n x_n exp(-i pi (n+1/2)(m+delta)/N)` for `m = 0..=N`.
    fn phased_spectrum(&self, x: &[T]) -> Vec<Complex<T>> {
        let n = self.size;
        let mut buf = vec![Complex::new(T::zero(), T::zero()); 2 * n];
        if self.kind.is_type_iv() {
            for (b, (&v, &p)) in buf.iter_mut().zip(x.iter().zip(&self.pre)) {
                *b = p * v;
            }
        } else {
            for (b, &v) in buf.iter_mut().zip(x) {
                *b = Complex::new(v, T::zero());
            }
        }
        self.fft.process(&mut buf);
        buf.truncate(n + 1);
        for (b, &p) in buf.iter_mut().zip(&self.post) {
            *b = *b * p;
        }
        buf
    }

    fn fast_into(&self, x: &[T], out: &mut [T]) {
        let n = self.size;
        let z = self.phased_spectrum(x);
        let inv_sqrt2 = T::FRAC_1_SQRT_2();
        match self.kind {
            TransformKind::DctII => {
                for (k, o) in out.iter_mut().enumerate() {
                    *o = self.norm * z[k].re;
                }
                out[0] = out[0] * inv_sqrt2;
            }
            TransformKind::DstII => {
                for (k, o) in out.iter_mut().enumerate() {
                    *o = -self.norm * z[k + 1].im;
                }
                out[n - 1] = out[n - 1] * inv_sqrt2;
            }
            TransformKind::DctIV => {
                for (k, o) in out.iter_mut().enumerate() {
                    *o = self.norm * z[k].re;
                }
            }
            TransformKind::DstIV => {
                for (k, o) in out.iter_mut().enumerate() {
                    *o = -self.norm * z[k].im;
                }
            }
        }
    }

    fn fast_transpose_into(&self, y: &[T], out: &mut [T]) {
        let n = self.size;
        let inv_sqrt2 = T::FRAC_1_SQRT_2();
        match self.kind {
            // Type IV matrices are symmetric.
            TransformKind::DctIV | TransformKind::DstIV => self.fast_into(y, out),
            TransformKind::DctII => {
                // (C^T y)_n = Re sum_k e'_k y_k exp(-i pi (n+1/2) k / N)
                let mut buf = vec![Complex::new(T::zero(), T::zero()); 2 * n];
                for k in 0..n {
                    let e = if k == 0 { inv_sqrt2 } else { T::one() };
                    buf[k] = self.post[k] * (e * y[k]);
                }
                self.fft.process(&mut buf);
                for (o, b) in out.iter_mut().zip(&buf) {
                    *o = self.norm * b.re;
                }
            }
            TransformKind::DstII => {
                // (S^T y)_n = -Im sum_{j=1..N} e_{j-1} y_{j-1} exp(-i pi (n+1/2) j / N)
                let mut buf = vec![Complex::new(T::zero(), T::zero()); 2 * n];
                for j in 1..=n {
                    let e = if j == n { inv_sqrt2 } else { T::one() };
                    buf[j] = self.post[j] * (e * y[j - 1]);
                }
                self.fft.process(&mut buf);
                for (o, b) in out.iter_mut().zip(&buf) {
                    *o = -self.norm * b.im;
                }
            }
        }
    }
}

fn scale<T: Real>(v: &mut [T], s: T) {
    v.iter_mut().for_each(|x| *x = *x * s);
}

/// Equispaced midpoint nodes of `(a, b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MidpointGrid<T> {
    pub a: T,
    pub b: T,
    pub points: Vec<T>,
}

impl<T: Real> MidpointGrid<T> {
    pub fn new(a: T, b: T, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(DfrError::InvalidSize("midpoint grid needs at least one node".into()));
        }
        if !(a < b) {
            return Err(DfrError::InvalidInterval {
                a: a.to_f64().unwrap_or(f64::NAN),
                b: b.to_f64().unwrap_or(f64::NAN),
            });
        }
        let h = (b - a) / idx::<T>(2 * n);
        let points = (0..n).map(|i| a + idx::<T>(2 * i + 1) * h).collect();
        Ok(Self { a, b, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn spacing(&self) -> T {
        (self.b - self.a) / idx::<T>(self.points.len())
    }
}

/// Midpoint rule `(b - a)/n * sum(samples)`.
pub fn midpoint_integral<T: Real>(samples: &[T], a: T, b: T) -> Result<T> {
    if samples.is_empty() {
        return Err(DfrError::InvalidSize("midpoint rule needs at least one sample".into()));
    }
    let sum: T = samples.iter().copied().sum();
    Ok((b - a) / idx::<T>(samples.len()) * sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn size_one_dst_ii_is_identity() {
        let m = build_transform_matrix::<f64>(TransformKind::DstII, 1).unwrap();
        assert_abs_diff_eq!(m[0], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn dct_iv_size_two_corner_entry() {
        let m = build_transform_matrix::<f64>(TransformKind::DctIV, 2).unwrap();
        // literal evaluation, independent of the integer angle reduction
        let literal = (2.0_f64 / 2.0).sqrt() * (PI / 2.0 * 0.5 * 0.5).cos();
        assert_abs_diff_eq!(m[0], literal, epsilon = 1e-15);
        assert_abs_diff_eq!(m[0], 0.923_879_532_511_286_7, epsilon = 1e-15);
    }

    #[test]
    fn zero_size_is_rejected() {
        assert!(matches!(build_transform_matrix::<f64>(TransformKind::DctII, 0), Err(DfrError::InvalidSize(_))));
        assert!(TransformPlan::<f64>::new(TransformKind::DstIV, 0).is_err());
    }

    #[test]
    fn wrong_sample_count_is_a_shape_error() {
        let plan = TransformPlan::<f64>::new(TransformKind::DstII, 8).unwrap();
        assert!(matches!(plan.apply(&[0.0; 7]), Err(DfrError::Shape(_))));
        assert!(matches!(plan.apply_transpose(&[0.0; 9]), Err(DfrError::Shape(_))));
    }

    #[test]
    fn zero_samples_give_zero_coefficients() {
        let plan = TransformPlan::<f64>::new(TransformKind::DstII, 64).unwrap();
        assert!(plan.apply(&[0.0; 64]).unwrap().iter().all(|&c| c == 0.0));
    }

    #[test]
    fn midpoint_rule_examples() {
        let g = MidpointGrid::new(0.0, PI, 5).unwrap();
        assert_abs_diff_eq!(midpoint_integral(&[1.0; 5], 0.0, PI).unwrap(), PI, epsilon = 1e-15);
        assert_eq!(g.len(), 5);

        let two: Vec<f64> = MidpointGrid::new(0.0, PI, 2).unwrap().points.iter().map(|x| x.sin()).collect();
        assert_abs_diff_eq!(midpoint_integral(&two, 0.0, PI).unwrap(), PI / 2f64.sqrt(), epsilon = 1e-14);

        let fine = MidpointGrid::new(0.0, PI, 10_000).unwrap();
        let s: Vec<f64> = fine.points.iter().map(|x| x.sin()).collect();
        assert_abs_diff_eq!(midpoint_integral(&s, 0.0, PI).unwrap(), 2.0, epsilon = 1e-7);

        assert!(midpoint_integral::<f64>(&[], 0.0, 1.0).is_err());
    }

    #[test]
    fn midpoint_grid_is_interior_and_increasing() {
        let g = MidpointGrid::new(-1.0, 2.0, 7).unwrap();
        assert!(g.points.windows(2).all(|w| w[0] < w[1]));
        assert!(g.points[0] > -1.0 && g.points[6] < 2.0);
        assert_abs_diff_eq!(g.points[1] - g.points[0], g.spacing(), epsilon = 1e-15);
        assert!(MidpointGrid::new(1.0, 1.0, 3).is_err());
    }

    #[test]
    fn single_precision_plan_matches_double() {
        let p32 = TransformPlan::<f32>::new(TransformKind::DctIV, 96).unwrap();
        let p64 = TransformPlan::<f64>::new(TransformKind::DctIV, 96).unwrap();
        let x: Vec<f64> = (0..96).map(|i| ((i * 37 % 11) as f64) - 5.0).collect();
        let x32: Vec<f32> = x.iter().map(|&v| v as f32).collect();
        let a = p64.apply(&x).unwrap();
        let b = p32.apply(&x32).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - *v as f64).abs() < 1e-3);
        }
    }
}
