//! Monitor functions and their normalization into a target curvature.
//!
//! A monitor is a strictly positive `2π`-periodic function of the rescaled
//! arclength `s' = 2πs/L`. Normalizing it by its `L¹` norm gives `φ*` with
//! mean one, which is the curvature of the artificial curve at `t = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{forward_coeffs, inverse_samples, FourierSeries, UniformGrid};

/// Relative size of the last periodic image kept in a periodized sum.
pub const IMAGE_TRUNCATION: f64 = 1e-15;

/// Positivity of a monitor is checked on a grid this many times finer than
/// the normalization grid.
pub const POSITIVITY_OVERSAMPLING: usize = 4;

/// `Σ_j f(d + 2πj)` for a kernel `f` that decreases in `|d|`.
///
/// Images are added outward from the one closest to the origin until the
/// next image on both sides contributes less than `tol`.
pub fn periodic_image_sum<T: Real>(d: T, tol: T, f: impl Fn(T) -> T) -> T {
    let tau = T::two_pi();
    let d = d - tau * (d / tau + T::lit(0.5)).floor();
    let mut total = f(d);
    let mut j = T::one();
    loop {
        let right = f(d + j * tau);
        let left = f(d - j * tau);
        if right.abs() < tol && left.abs() < tol {
            break;
        }
        total += right + left;
        j += T::one();
    }
    total
}

/// One periodized Gaussian `A Σ_j exp(-(b (s - c + 2πj))²)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianTerm<T> {
    pub amplitude: T,
    pub center: T,
    pub width: T,
}

impl<T: Real> GaussianTerm<T> {
    pub fn new(amplitude: T, center: T, width: T) -> Self {
        Self {
            amplitude,
            center,
            width,
        }
    }

    pub fn eval(&self, s: T) -> T {
        let b = self.width;
        let tol = T::lit(IMAGE_TRUNCATION);
        self.amplitude * periodic_image_sum(s - self.center, tol, |d| (-(b * d) * (b * d)).exp())
    }
}

/// Constant plus a superposition of periodized Gaussians.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonitorSpec<T> {
    pub constant: T,
    #[serde(rename = "gaussians")]
    pub terms: Vec<GaussianTerm<T>>,
}

impl<T: Real> MonitorSpec<T> {
    pub fn new(constant: T, terms: Vec<GaussianTerm<T>>) -> Result<Self> {
        let spec = Self { constant, terms };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.constant >= T::zero()) || !self.constant.is_finite() {
            return Err(Error::InvalidSpec(format!("constant {} must be >= 0", self.constant)));
        }
        if self.constant == T::zero() && self.terms.is_empty() {
            return Err(Error::InvalidSpec("monitor is identically zero".into()));
        }
        for (i, t) in self.terms.iter().enumerate() {
            if !(t.amplitude > T::zero()) || !t.amplitude.is_finite() {
                return Err(Error::InvalidSpec(format!(
                    "term {i}: amplitude {} must be > 0",
                    t.amplitude
                )));
            }
            if !(t.width > T::zero()) || !t.width.is_finite() {
                return Err(Error::InvalidSpec(format!("term {i}: width {} must be > 0", t.width)));
            }
            if !(t.center >= T::zero() && t.center < T::two_pi()) {
                return Err(Error::InvalidSpec(format!(
                    "term {i}: center {} outside [0, 2π)",
                    t.center
                )));
            }
        }
        Ok(())
    }

    pub fn eval(&self, s: T) -> T {
        self.terms.iter().fold(self.constant, |acc, t| acc + t.eval(s))
    }

    /// Same spec with every coefficient multiplied by `c`.
    pub fn scaled(&self, c: T) -> Self {
        Self {
            constant: self.constant * c,
            terms: self
                .terms
                .iter()
                .map(|t| GaussianTerm::new(t.amplitude * c, t.center, t.width))
                .collect(),
        }
    }
}

/// A monitor function of the rescaled arclength `s' ∈ [0, 2π)`.
#[derive(Clone, Debug, PartialEq)]
pub enum Monitor<T> {
    /// `constant + amplitude · cos s'`.
    Cosine {
        constant: T,
        amplitude: T,
    },
    Gaussians(MonitorSpec<T>),
    /// Fourier interpolant of samples on a uniform grid.
    Sampled(FourierSeries<T>),
}

impl<T: Real> Monitor<T> {
    /// `0.5 + 0.25 cos s`.
    pub fn phi0() -> Self {
        Monitor::Cosine {
            constant: T::lit(0.5),
            amplitude: T::lit(0.25),
        }
    }

    /// Two sharp bumps of height 37 at `0` and `π` on a unit background.
    pub fn phi1() -> Self {
        let (a, b) = (T::lit(37.0), T::lit(7.5));
        Monitor::Gaussians(MonitorSpec {
            constant: T::one(),
            terms: vec![GaussianTerm::new(a, T::zero(), b), GaussianTerm::new(a, T::PI(), b)],
        })
    }

    /// A broad bump at `0.4` and a sharp one at `π + 0.692`.
    pub fn phi2() -> Self {
        Monitor::Gaussians(MonitorSpec {
            constant: T::one(),
            terms: vec![
                GaussianTerm::new(T::lit(10.0), T::lit(0.4), T::lit(3.0)),
                GaussianTerm::new(T::lit(37.0), T::PI() + T::lit(0.692), T::lit(7.5)),
            ],
        })
    }

    /// `φ ≡ 1`; leaves the uniform spacing unchanged.
    pub fn uniform() -> Self {
        Monitor::Cosine {
            constant: T::one(),
            amplitude: T::zero(),
        }
    }

    pub fn builtin(name: &str) -> Result<Self> {
        match name {
            "phi0" => Ok(Self::phi0()),
            "phi1" => Ok(Self::phi1()),
            "phi2" => Ok(Self::phi2()),
            "uniform" => Ok(Self::uniform()),
            other => Err(Error::InvalidSpec(format!("unknown builtin monitor '{other}'"))),
        }
    }

    /// Interpolate samples given at `s'_j = 2πj/n`.
    pub fn from_samples(samples: &[T]) -> Result<Self> {
        Ok(Monitor::Sampled(forward_coeffs(samples)?.without_nyquist()))
    }

    pub fn eval(&self, s: T) -> T {
        match self {
            Monitor::Cosine { constant, amplitude } => *constant + *amplitude * s.cos(),
            Monitor::Gaussians(spec) => spec.eval(s),
            Monitor::Sampled(series) => series.eval_real(s),
        }
    }

    pub fn eval_many(&self, points: &[T]) -> Vec<T> {
        points.iter().map(|&s| self.eval(s)).collect()
    }

    /// Values on the uniform grid of size `n`.
    pub fn samples(&self, n: usize) -> Result<Vec<T>> {
        let grid = UniformGrid::new(n)?;
        match self {
            Monitor::Sampled(series) if n >= series.modes() => inverse_samples(series, n),
            _ => Ok(self.eval_many(&grid.nodes())),
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            Monitor::Gaussians(spec) => spec.validate(),
            Monitor::Cosine { constant, amplitude } if !(constant.is_finite() && amplitude.is_finite()) => {
                Err(Error::InvalidSpec("non-finite cosine monitor".into()))
            }
            _ => Ok(()),
        }
    }
}

/// `φ* = 2πφ/‖φ‖_{L¹}` as a Fourier series of mean exactly one.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedMonitor<T> {
    phi_star: FourierSeries<T>,
    l1_norm: T,
}

impl<T: Real> NormalizedMonitor<T> {
    /// Wrap a series that already has mean one and positive values.
    pub fn from_series(phi_star: FourierSeries<T>) -> Result<Self> {
        let n = phi_star.modes();
        let samples = inverse_samples(&phi_star, POSITIVITY_OVERSAMPLING * n)?;
        check_positive(&samples)?;
        let mut phi_star = phi_star.without_nyquist();
        phi_star.set(0, crate::Complex::new(T::one(), T::zero()));
        Ok(Self {
            phi_star,
            l1_norm: T::two_pi(),
        })
    }

    pub fn phi_star(&self) -> &FourierSeries<T> {
        &self.phi_star
    }

    pub fn l1_norm(&self) -> T {
        self.l1_norm
    }

    pub fn modes(&self) -> usize {
        self.phi_star.modes()
    }

    pub fn eval(&self, s: T) -> T {
        self.phi_star.eval_real(s)
    }
}

/// Normalize on the uniform `s'`-grid of size `n` (at least the number of
/// modes of a sampled monitor).
pub fn normalize<T: Real>(monitor: &Monitor<T>, n: usize) -> Result<NormalizedMonitor<T>> {
    monitor.validate()?;
    let n = match monitor {
        Monitor::Sampled(series) => n.max(series.modes()),
        _ => n,
    };
    check_positive(&monitor.samples(POSITIVITY_OVERSAMPLING * n)?)?;
    let samples = monitor.samples(n)?;
    normalize_samples(&samples)
}

/// Normalize samples of `φ` on a uniform grid over one period.
///
/// The grid may be in physical arclength over `[0, L)`; the rescaling to
/// `[0, 2π)` maps it node for node onto the `s'`-grid, so `L` drops out.
pub fn normalize_samples<T: Real>(samples: &[T]) -> Result<NormalizedMonitor<T>> {
    check_positive(samples)?;
    // The trapezoid sum is the zeroth DFT coefficient.
    let coeffs = forward_coeffs(samples)?;
    let mean = coeffs.mean().re;
    let l1_norm = T::two_pi() * mean;
    let mut phi_star = coeffs.scaled(mean.recip()).without_nyquist();
    phi_star.set(0, crate::Complex::new(T::one(), T::zero()));
    Ok(NormalizedMonitor { phi_star, l1_norm })
}

fn check_positive<T: Real>(samples: &[T]) -> Result<()> {
    let min = samples.iter().fold(T::infinity(), |m, &v| m.min(v));
    if !(min > T::zero()) {
        return Err(Error::Positivity { min: min.as_f64() });
    }
    Ok(())
}
