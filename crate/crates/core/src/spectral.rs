//! Spectral calculus for smooth 2π-periodic functions on equispaced grids.
//!
//! Coefficients are stored in centered order, index `i` holding wavenumber
//! `k = i - m/2`, so a series with `m` modes covers `k = -m/2 ..= m/2 - 1`.
//! The forward transform carries the `1/n` factor; the inverse is a plain
//! exponential sum.

use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::{Complex, Real};

/// Equispaced nodes `α_j = 2πj/n`, `j = 0..n`, on the periodic interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UniformGrid {
    n: usize,
}

impl UniformGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 4 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(n));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing<T: Real>(&self) -> T {
        T::two_pi() / T::from_usize_lossy(self.n)
    }

    pub fn node<T: Real>(&self, j: usize) -> T {
        T::two_pi() * T::from_usize_lossy(j) / T::from_usize_lossy(self.n)
    }

    pub fn nodes<T: Real>(&self) -> Vec<T> {
        (0..self.n).map(|j| self.node(j)).collect()
    }
}

/// Truncated Fourier series of a 2π-periodic function.
#[derive(Clone, PartialEq)]
pub struct FourierSeries<T> {
    coeffs: Vec<Complex<T>>,
}

impl<T: fmt::Debug> fmt::Debug for FourierSeries<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierSeries")
            .field("modes", &self.coeffs.len())
            .field("mean", &self.coeffs.get(self.coeffs.len() / 2))
            .finish()
    }
}

impl<T: Real> FourierSeries<T> {
    /// Wrap centered coefficients (`k = -m/2 ..= m/2-1`).
    pub fn new(coeffs: Vec<Complex<T>>) -> Result<Self> {
        let m = coeffs.len();
        if m == 0 || !m.is_multiple_of(2) {
            return Err(Error::InvalidModes(m));
        }
        Ok(Self { coeffs })
    }

    pub fn zeros(m: usize) -> Result<Self> {
        Self::new(vec![Complex::new(T::zero(), T::zero()); m])
    }

    /// The constant function `value` with `m` modes.
    pub fn constant(m: usize, value: T) -> Result<Self> {
        let mut s = Self::zeros(m)?;
        s.set(0, Complex::new(value, T::zero()));
        Ok(s)
    }

    pub fn modes(&self) -> usize {
        self.coeffs.len()
    }

    /// Lowest wavenumber, `-m/2`.
    pub fn k_min(&self) -> isize {
        -((self.coeffs.len() / 2) as isize)
    }

    pub fn coeffs(&self) -> &[Complex<T>] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex<T>> {
        self.coeffs
    }

    fn index(&self, k: isize) -> Option<usize> {
        let i = k - self.k_min();
        (i >= 0 && (i as usize) < self.coeffs.len()).then_some(i as usize)
    }

    /// Coefficient of `e^{ikα}`; zero outside the band.
    pub fn coeff(&self, k: isize) -> Complex<T> {
        self.index(k)
            .map(|i| self.coeffs[i])
            .unwrap_or_else(|| Complex::new(T::zero(), T::zero()))
    }

    /// Set a coefficient. Panics if `k` is outside the band.
    pub fn set(&mut self, k: isize, c: Complex<T>) {
        let i = self.index(k).expect("wavenumber inside band");
        self.coeffs[i] = c;
    }

    pub fn mean(&self) -> Complex<T> {
        self.coeff(0)
    }

    pub fn wavenumbers(&self) -> impl Iterator<Item = isize> {
        let k0 = self.k_min();
        (0..self.coeffs.len() as isize).map(move |i| k0 + i)
    }

    pub fn iter(&self) -> impl Iterator<Item = (isize, Complex<T>)> + '_ {
        self.wavenumbers().zip(self.coeffs.iter().copied())
    }

    /// Term-by-term derivative; the unpaired `k = -m/2` mode is dropped.
    pub fn differentiate(&self) -> Self {
        let k_min = self.k_min();
        let coeffs = self
            .iter()
            .map(|(k, c)| {
                if k == k_min {
                    Complex::new(T::zero(), T::zero())
                } else {
                    c * Complex::new(T::zero(), T::from_isize_lossy(k))
                }
            })
            .collect();
        Self { coeffs }
    }

    /// Antiderivative with base point 0:
    /// `F(α) = c₀α + Σ_{k≠0} c_k/(ik) (e^{ikα} - 1)`.
    ///
    /// The result splits into the constant slope `c₀` and a periodic part
    /// whose mean absorbs the `-1` terms, so `F(0) = 0`.
    pub fn antiderivative(&self) -> SemiPeriodicField<T> {
        let m = self.modes();
        let k_min = self.k_min();
        let zero = Complex::new(T::zero(), T::zero());
        let mut coeffs: Vec<Complex<T>> = self
            .iter()
            .map(|(k, c)| {
                if k == 0 || k == k_min {
                    zero
                } else {
                    c / Complex::new(T::zero(), T::from_isize_lossy(k))
                }
            })
            .collect();
        let offset: Complex<T> = coeffs.iter().copied().sum();
        coeffs[m / 2] = -offset;
        let slope = Self::constant(m, T::zero())
            .map(|mut s| {
                s.set(0, self.mean());
                s
            })
            .expect("valid mode count");
        SemiPeriodicField {
            periodic: Self { coeffs },
            slope,
        }
    }

    /// Zero-pad (or truncate) to `m` modes, keeping the shared band.
    pub fn with_modes(&self, m: usize) -> Result<Self> {
        let mut out = Self::zeros(m)?;
        let lo = out.k_min().max(self.k_min());
        let hi = (-out.k_min()).min(-self.k_min());
        for k in lo..hi {
            out.set(k, self.coeff(k));
        }
        Ok(out)
    }

    /// Copy with the `k = -m/2` coefficient zeroed, so that evaluation off the
    /// grid of a real function stays real.
    pub fn without_nyquist(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = Complex::new(T::zero(), T::zero());
        out
    }

    /// Copy with every coefficient below `level · max|c|` set to zero.
    pub fn filtered(&self, level: T) -> Self {
        let cut = level * self.max_abs();
        self.map_coeffs(|_, c| {
            if c.norm() < cut {
                Complex::new(T::zero(), T::zero())
            } else {
                c
            }
        })
    }

    pub fn map_coeffs(&self, f: impl Fn(isize, Complex<T>) -> Complex<T>) -> Self {
        Self {
            coeffs: self.iter().map(|(k, c)| f(k, c)).collect(),
        }
    }

    pub fn scaled(&self, a: T) -> Self {
        self.map_coeffs(|_, c| c * a)
    }

    /// Coefficient-wise sum; both series must have the same band.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Result<Self> {
        if self.modes() != other.modes() {
            return Err(Error::LengthMismatch {
                expected: self.modes(),
                got: other.modes(),
            });
        }
        Ok(Self {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Direct `O(m)` evaluation of `Σ c_k e^{ikx}`.
    pub fn eval(&self, x: T) -> Complex<T> {
        self.iter().fold(Complex::new(T::zero(), T::zero()), |acc, (k, c)| {
            let (s, co) = (T::from_isize_lossy(k) * x).sin_cos();
            acc + c * Complex::new(co, s)
        })
    }

    pub fn eval_real(&self, x: T) -> T {
        self.eval(x).re
    }

    /// `sqrt(Σ|c_k|²)`, the L² norm of the function divided by `sqrt(2π)`.
    pub fn l2_norm(&self) -> T {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<T>().sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.norm()))
    }

    /// `max |c(-k) - conj c(k)|` over `0 < k < m/2`, relative to the largest
    /// coefficient.
    pub fn conjugate_symmetry_defect(&self) -> T {
        let scale = self.max_abs();
        if scale == T::zero() {
            return T::zero();
        }
        let half = (self.modes() / 2) as isize;
        let imag0 = self.coeff(0).im.abs();
        (1..half)
            .map(|k| (self.coeff(-k) - self.coeff(k).conj()).norm())
            .fold(imag0, T::max)
            / scale
    }

    /// Largest coefficient magnitude with `|k| >= k_from`, relative to the
    /// largest overall.
    pub fn tail_ratio(&self, k_from: usize) -> T {
        let scale = self.max_abs();
        if scale == T::zero() {
            return T::zero();
        }
        self.iter()
            .filter(|(k, _)| k.unsigned_abs() >= k_from)
            .fold(T::zero(), |m, (_, c)| m.max(c.norm()))
            / scale
    }
}

/// A function `F(s) = q(s) + s·r(s)` with `q`, `r` periodic.
///
/// Antiderivatives of periodic functions with nonzero mean, and products of
/// those with periodic functions, stay in this class.
#[derive(Clone, Debug, PartialEq)]
pub struct SemiPeriodicField<T> {
    pub periodic: FourierSeries<T>,
    pub slope: FourierSeries<T>,
}

impl<T: Real> SemiPeriodicField<T> {
    pub fn new(periodic: FourierSeries<T>, slope: FourierSeries<T>) -> Result<Self> {
        if periodic.modes() != slope.modes() {
            return Err(Error::LengthMismatch {
                expected: periodic.modes(),
                got: slope.modes(),
            });
        }
        Ok(Self { periodic, slope })
    }

    pub fn from_periodic(periodic: FourierSeries<T>) -> Self {
        let slope = FourierSeries::zeros(periodic.modes()).expect("valid modes");
        Self { periodic, slope }
    }

    pub fn modes(&self) -> usize {
        self.periodic.modes()
    }

    pub fn eval(&self, x: T) -> T {
        self.periodic.eval_real(x) + x * self.slope.eval_real(x)
    }

    /// `F' = (q' + r) + s·r'`.
    pub fn derivative(&self) -> Self {
        let periodic = self.periodic.differentiate().add(&self.slope).expect("matching bands");
        Self {
            periodic,
            slope: self.slope.differentiate(),
        }
    }

    /// Values at the nodes of `plan`'s grid.
    pub fn samples(&self, plan: &FourierPlan<T>) -> Result<Vec<T>> {
        let q = plan.inverse(&self.periodic)?;
        let r = plan.inverse(&self.slope)?;
        let grid = UniformGrid::new(plan.len())?;
        Ok(q.iter()
            .zip(&r)
            .enumerate()
            .map(|(j, (&q, &r))| q + grid.node::<T>(j) * r)
            .collect())
    }
}

/// Cached forward/inverse FFT plans for one transform length.
#[derive(Clone)]
pub struct FourierPlan<T: Real> {
    n: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

impl<T: Real> fmt::Debug for FourierPlan<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FourierPlan").field("n", &self.n).finish()
    }
}

impl<T: Real> FourierPlan<T> {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::InvalidGrid(n));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            n,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Unnormalized `Σ_j a_j e^{-2πijk/n}` in place.
    pub(crate) fn fft_forward(&self, buf: &mut [Complex<T>]) {
        self.forward.process(buf);
    }

    /// Unnormalized `Σ_k a_k e^{+2πijk/n}` in place.
    pub(crate) fn fft_inverse(&self, buf: &mut [Complex<T>]) {
        self.inverse.process(buf);
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got });
        }
        Ok(())
    }

    /// `c(k) = (1/n) Σ_j f_j e^{-ikα_j}` for complex samples.
    pub fn forward_complex(&self, samples: &[Complex<T>]) -> Result<FourierSeries<T>> {
        self.check_len(samples.len())?;
        let mut buf = samples.to_vec();
        self.fft_forward(&mut buf);
        let scale = T::one() / T::from_usize_lossy(self.n);
        let half = self.n / 2;
        let coeffs = (0..self.n).map(|i| buf[(i + half) % self.n] * scale).collect();
        FourierSeries::new(coeffs)
    }

    pub fn forward(&self, samples: &[T]) -> Result<FourierSeries<T>> {
        let z: Vec<Complex<T>> = samples.iter().map(|&x| Complex::new(x, T::zero())).collect();
        self.forward_complex(&z)
    }

    /// Evaluate `series` on this plan's grid. Requires `n >= m`; the unpaired
    /// `k = -m/2` coefficient is split evenly between `±m/2` when `n > m`.
    pub fn inverse_complex(&self, series: &FourierSeries<T>) -> Result<Vec<Complex<T>>> {
        let m = series.modes();
        if m > self.n {
            return Err(Error::DownsampleForbidden {
                modes: m,
                n_out: self.n,
            });
        }
        let n = self.n as isize;
        let mut buf = vec![Complex::new(T::zero(), T::zero()); self.n];
        let k_min = series.k_min();
        for (k, c) in series.iter() {
            if k == k_min && m < self.n {
                let half = c * T::lit(0.5);
                buf[k.rem_euclid(n) as usize] += half;
                buf[(-k).rem_euclid(n) as usize] += half;
            } else {
                buf[k.rem_euclid(n) as usize] += c;
            }
        }
        self.fft_inverse(&mut buf);
        Ok(buf)
    }

    pub fn inverse(&self, series: &FourierSeries<T>) -> Result<Vec<T>> {
        Ok(self.inverse_complex(series)?.into_iter().map(|z| z.re).collect())
    }
}

/// Fourier coefficients of real samples on `UniformGrid(n)`.
pub fn forward_coeffs<T: Real>(samples: &[T]) -> Result<FourierSeries<T>> {
    UniformGrid::new(samples.len())?;
    FourierPlan::new(samples.len())?.forward(samples)
}

/// Evaluate a real series on `UniformGrid(n_out)`, `n_out >= m`.
pub fn inverse_samples<T: Real>(series: &FourierSeries<T>, n_out: usize) -> Result<Vec<T>> {
    UniformGrid::new(n_out)?;
    if n_out < series.modes() {
        return Err(Error::DownsampleForbidden {
            modes: series.modes(),
            n_out,
        });
    }
    FourierPlan::new(n_out)?.inverse(series)
}

pub fn differentiate<T: Real>(series: &FourierSeries<T>) -> FourierSeries<T> {
    series.differentiate()
}

pub fn antiderivative<T: Real>(series: &FourierSeries<T>) -> SemiPeriodicField<T> {
    series.antiderivative()
}

/// Band-limited interpolation of periodic samples onto `n_out >= n` points.
pub fn upsample<T: Real>(samples: &[T], n_out: usize) -> Result<Vec<T>> {
    if n_out == samples.len() {
        return Ok(samples.to_vec());
    }
    inverse_samples(&forward_coeffs(samples)?, n_out)
}
