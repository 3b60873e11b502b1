//! Analytic test curves.

use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::geometry::{CurveKind, PlanarCurveSamples};
use crate::monitor::IMAGE_TRUNCATION;
use crate::scalar::Real;

/// Polar angle of the droplet waist, where the radius is smallest.
pub const DROPLET_WAIST: f64 = 3.0 * FRAC_PI_4;

/// Builtin analytic curves.
///
/// The droplet is `r(η) = 1 + ε P₂(cos(η - π/4))` in polar form, sampled
/// uniformly in `η` starting at `η₀`. The peakons are the graph of two
/// periodized rounded peaks `A e^{-sqrt((a(x - c))² + ε)}` over `[0, 2π)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ExampleCurve<T> {
    Circle,
    Droplet { eps: T, eta0: T },
    Peakons { eps: T },
}

/// `(A, a, c)` of each periodized peak.
const PEAKS: [(f64, f64, f64); 2] = [(2.0, 1.0, 0.5), (4.0, 2.0, 4.0)];

impl<T: Real> ExampleCurve<T> {
    /// Droplet sampled from `η = 0`.
    pub fn droplet(eps: T) -> Result<Self> {
        Self::droplet_from(eps, T::zero())
    }

    /// Droplet sampled from the waist, so that the two high-curvature points
    /// sit at `α = 0` and `α = π`.
    pub fn pinched_droplet(eps: T) -> Result<Self> {
        Self::droplet_from(eps, T::lit(DROPLET_WAIST))
    }

    pub fn droplet_from(eps: T, eta0: T) -> Result<Self> {
        if !(eps >= T::zero() && eps < T::lit(2.0)) {
            return Err(Error::Parameter(format!("droplet deformation {eps} outside [0, 2)")));
        }
        Ok(ExampleCurve::Droplet { eps, eta0 })
    }

    pub fn peakons(eps: T) -> Result<Self> {
        if !(eps > T::zero()) || !eps.is_finite() {
            return Err(Error::Parameter(format!("peakon rounding {eps} must be > 0")));
        }
        Ok(ExampleCurve::Peakons { eps })
    }

    /// `circle`, `droplet` (pinched start) or `peakons` with its parameter.
    pub fn from_name(name: &str, param: Option<T>) -> Result<Self> {
        match name {
            "circle" => Ok(ExampleCurve::Circle),
            "droplet" => Self::pinched_droplet(param.unwrap_or(T::lit(1.7))),
            "peakons" => Self::peakons(param.unwrap_or(T::lit(1e-2))),
            other => Err(Error::Parameter(format!("unknown example curve '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ExampleCurve::Circle => "circle",
            ExampleCurve::Droplet { .. } => "droplet",
            ExampleCurve::Peakons { .. } => "peakons",
        }
    }

    pub fn kind(&self) -> CurveKind {
        match self {
            ExampleCurve::Peakons { .. } => CurveKind::HorizontallyPeriodic,
            _ => CurveKind::Closed,
        }
    }

    /// Position, first and second derivative with respect to the sampling
    /// parameter `p ∈ [0, 2π)`.
    pub fn jet(&self, p: T) -> [(T, T); 3] {
        match *self {
            ExampleCurve::Circle => {
                let (s, c) = p.sin_cos();
                [(c, s), (-s, c), (-c, -s)]
            }
            ExampleCurve::Droplet { eps, eta0 } => {
                let eta = eta0 + p;
                let (su, cu) = (eta - T::FRAC_PI_4()).sin_cos();
                let three = T::lit(3.0);
                let r = T::one() + eps * (three * cu * cu - T::one()) / T::lit(2.0);
                let r1 = -three * eps * cu * su;
                let r2 = -three * eps * (cu * cu - su * su);
                let (s, c) = eta.sin_cos();
                let two = T::lit(2.0);
                [
                    (r * c, r * s),
                    (r1 * c - r * s, r1 * s + r * c),
                    (r2 * c - two * r1 * s - r * c, r2 * s + two * r1 * c - r * s),
                ]
            }
            ExampleCurve::Peakons { eps } => {
                let (y, y1, y2) = peakon_graph(p, eps);
                [(p, y), (T::one(), y1), (T::zero(), y2)]
            }
        }
    }

    pub fn point(&self, p: T) -> (T, T) {
        self.jet(p)[0]
    }

    /// `|X_p|`.
    pub fn speed(&self, p: T) -> T {
        let (dx, dy) = self.jet(p)[1];
        dx.hypot(dy)
    }

    pub fn curvature(&self, p: T) -> T {
        let [_, (x1, y1), (x2, y2)] = self.jet(p);
        let s = x1.hypot(y1);
        (x1 * y2 - y1 * x2) / (s * s * s)
    }

    /// Samples at `p_j = 2πj/n`.
    pub fn sample(&self, n: usize) -> Result<PlanarCurveSamples<T>> {
        PlanarCurveSamples::from_fn(n, self.kind(), |p| self.point(p))
    }

    /// `max |κ|`, located on a dense grid and polished by golden-section
    /// search.
    pub fn kappa_max(&self) -> T {
        let n = 1usize << 16;
        let h = T::two_pi() / T::from_usize_lossy(n);
        let k = |p: T| self.curvature(p).abs();
        let best = (0..n)
            .map(|j| T::from_usize_lossy(j) * h)
            .max_by(|a, b| k(*a).partial_cmp(&k(*b)).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap_or(T::zero());
        let (mut a, mut b) = (best - h, best + h);
        let g = T::lit(0.5 * (5f64.sqrt() - 1.0));
        for _ in 0..80 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if k(c) > k(d) {
                b = d;
            } else {
                a = c;
            }
        }
        k(T::lit(0.5) * (a + b)).max(k(best))
    }
}

/// `y`, `y'` and `y''` of the periodized peakon pair.
fn peakon_graph<T: Real>(x: T, eps: T) -> (T, T, T) {
    let tol = T::lit(IMAGE_TRUNCATION);
    let tau = T::two_pi();
    let mut out = (T::zero(), T::zero(), T::zero());
    for &(amp, a, c) in &PEAKS {
        let (amp, a, c) = (T::lit(amp), T::lit(a), T::lit(c));
        let d = x - c;
        let d = d - tau * (d / tau + T::lit(0.5)).floor();
        let term = |d: T| {
            let u = a * d;
            let q = (u * u + eps).sqrt();
            let e = amp * (-q).exp();
            let q1 = a * u / q;
            let q2 = a * a * eps / (q * q * q);
            (e, -q1 * e, (q1 * q1 - q2) * e)
        };
        let mut add = |v: (T, T, T)| {
            out.0 += v.0;
            out.1 += v.1;
            out.2 += v.2;
        };
        add(term(d));
        let mut j = T::one();
        loop {
            let (r, l) = (term(d + j * tau), term(d - j * tau));
            if r.0 < tol * amp && l.0 < tol * amp {
                break;
            }
            add(r);
            add(l);
            j += T::one();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn reported_peak_curvatures() {
        let d = ExampleCurve::pinched_droplet(1.7_f64).unwrap().kappa_max();
        assert!((d - 220.0).abs() <= 5.0, "{d}");
        let p = ExampleCurve::peakons(1e-2_f64).unwrap().kappa_max();
        assert!((p - 144.0).abs() <= 5.0, "{p}");
    }

    #[test]
    fn droplet_waist_curvature_closed_form() {
        // At the waist r = 1 - ε/2, r' = 0, r'' = 3ε.
        let eps = 1.7_f64;
        let r = 1.0 - eps / 2.0;
        let want = (r * r - r * 3.0 * eps) / (r * r * r);
        let ex = ExampleCurve::pinched_droplet(eps).unwrap();
        assert!((ex.curvature(0.0) - want).abs() < 1e-9 * want.abs());
        assert!((ex.curvature(PI) - want).abs() < 1e-9 * want.abs());
    }

    #[test]
    fn zero_deformation_is_circle() {
        let d = ExampleCurve::droplet(0.0).unwrap();
        for p in [0.0_f64, 1.0, 4.0] {
            let (x, y) = d.point(p);
            assert!((x - p.cos()).abs() < 1e-16 && (y - p.sin()).abs() < 1e-16);
            assert!((d.curvature(p) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn parameter_ranges() {
        assert!(ExampleCurve::droplet(2.0).is_err());
        assert!(ExampleCurve::droplet(-0.1).is_err());
        assert!(ExampleCurve::peakons(0.0).is_err());
        assert!(ExampleCurve::<f64>::from_name("spiral", None).is_err());
    }

    #[test]
    fn peakon_derivatives_match_finite_differences() {
        let eps = 1e-2_f64;
        let h = 1e-5;
        for x in [0.3_f64, 0.5, 2.0, 4.01, 6.2] {
            let (y, y1, y2) = peakon_graph(x, eps);
            let (yp, y1p, _) = peakon_graph(x + h, eps);
            let (ym, y1m, _) = peakon_graph(x - h, eps);
            assert!(((yp - ym) / (2.0 * h) - y1).abs() < 1e-5 * (1.0 + y1.abs()));
            assert!(((y1p - y1m) / (2.0 * h) - y2).abs() < 1e-4 * (1.0 + y2.abs()));
            let (yt, _, _) = peakon_graph(x + TAU, eps);
            assert!((yt - y).abs() < 1e-14);
        }
    }

    #[test]
    fn peakon_image_sum_matches_wide_sum() {
        let eps = 1e-2;
        for x in [0.0, 1.0, 3.5, 6.0] {
            let wide: f64 = PEAKS
                .iter()
                .map(|&(amp, a, c)| {
                    (-200..=200)
                        .map(|j| {
                            let u: f64 = a * (x - c + TAU * j as f64);
                            amp * (-(u * u + eps).sqrt()).exp()
                        })
                        .sum::<f64>()
                })
                .sum();
            assert!((peakon_graph(x, eps).0 - wide).abs() < 1e-14);
        }
    }
}
