//! Fourier coefficients of the arclength parametrization (Step 1) and their
//! evaluation at arbitrary arclength targets.
//!
//! The coefficients are invariant under reparametrization of the input: they
//! are computed by the change of variables `α -> s(α)` inside the Fourier
//! integral, discretized by the trapezoidal rule on an upsampled `α`-grid and
//! summed with a Type-1 NUFFT.

use crate::error::{Error, Result};
use crate::geometry::{compute_geometry, CurveGeometry, CurveKind, PlanarCurveSamples};
use crate::nufft::NufftPlan;
use crate::scalar::{Complex, Real};
use crate::spectral::{forward_coeffs, inverse_samples, FourierPlan, FourierSeries};

/// Closure defect tolerated for closed curves, relative to the length.
pub const DEFAULT_CLOSURE_TOL: f64 = 1e-6;

/// Largest upsampled grid chosen by [`ExtractOptions::for_curve`].
pub const MAX_DEFAULT_NUP: usize = 65536;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExtractOptions<T> {
    /// Size of the upsampled `α`-grid carrying the trapezoidal sums.
    pub n_up: usize,
    /// Coefficients are kept for `k = -k_max ..= k_max - 1`.
    pub k_max: usize,
    pub eps: T,
    pub closure_tol: T,
}

impl<T: Real> ExtractOptions<T> {
    pub fn new(n_up: usize, k_max: usize, eps: T) -> Self {
        Self {
            n_up,
            k_max,
            eps,
            closure_tol: T::lit(DEFAULT_CLOSURE_TOL),
        }
    }

    /// `N_up = 2 N1` for closed curves and `16 N1` (at most 65536) for
    /// graphs; `k_max = N1/2`.
    pub fn for_curve(n1: usize, kind: CurveKind, eps: T) -> Self {
        let n_up = match kind {
            CurveKind::Closed => 2 * n1,
            CurveKind::HorizontallyPeriodic => (16 * n1).min(MAX_DEFAULT_NUP).max(n1),
        };
        Self::new(n_up, n1 / 2, eps)
    }

    pub fn with_closure_tol(mut self, tol: T) -> Self {
        self.closure_tol = tol;
        self
    }
}

/// Arclength parametrization of a curve of length `L`:
/// `x(s) = slope_x·s + Σ cx_k e^{2πiks/L}` and likewise for `y`.
#[derive(Clone, Debug, PartialEq)]
pub struct ArclengthInvariants<T> {
    pub length: T,
    pub k_max: usize,
    pub cx: FourierSeries<T>,
    pub cy: FourierSeries<T>,
    pub slope_x: T,
    pub slope_y: T,
    pub base_point: [T; 2],
    pub theta0: T,
}

impl<T: Real> ArclengthInvariants<T> {
    pub fn kind(&self) -> CurveKind {
        if self.slope_x == T::zero() && self.slope_y == T::zero() {
            CurveKind::Closed
        } else {
            CurveKind::HorizontallyPeriodic
        }
    }

    /// `cx + i·cy`, whose Type-2 sum gives `x + iy` minus the linear part.
    pub fn packed(&self) -> FourierSeries<T> {
        self.cx
            .map_coeffs(|k, c| c + self.cy.coeff(k) * Complex::new(T::zero(), T::one()))
    }

    /// Points at the uniform arclength grid `s_j = jL/n`, `n >= 2 k_max`.
    pub fn sample_uniform(&self, n: usize) -> Result<Vec<[T; 2]>> {
        let x = inverse_samples(&self.cx, n)?;
        let y = inverse_samples(&self.cy, n)?;
        let ds = self.length / T::from_usize_lossy(n);
        Ok(x.into_iter()
            .zip(y)
            .enumerate()
            .map(|(j, (x, y))| {
                let s = ds * T::from_usize_lossy(j);
                [x + self.slope_x * s, y + self.slope_y * s]
            })
            .collect())
    }

    /// The arclength parametrization sampled as a curve on `n` nodes.
    pub fn to_curve(&self, n: usize) -> Result<PlanarCurveSamples<T>> {
        let pts = self.sample_uniform(n)?;
        let (x, y) = pts.into_iter().map(|p| (p[0], p[1])).unzip();
        PlanarCurveSamples::new(x, y, self.kind())
    }
}

/// `F[f](k) ≈ (1/L) ∫ f e^{-2πiks/L} ds` for `k = -k_max ..= k_max - 1`.
///
/// `f` is sampled at the nodes of the grid that produced `geometry`.
/// `f·s_α` and the periodic part of `s(α)` are Fourier-interpolated to
/// `n_up` points before the trapezoidal sum.
pub fn arclength_coeffs<T: Real>(
    f: &[T],
    geometry: &CurveGeometry<T>,
    n_up: usize,
    k_max: usize,
    eps: T,
) -> Result<FourierSeries<T>> {
    let n = geometry.len();
    if f.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: f.len(),
        });
    }
    if n_up < n || !n_up.is_multiple_of(2) {
        return Err(Error::Parameter(format!("N_up = {n_up} must be even and >= {n}")));
    }
    if k_max == 0 || k_max > n_up / 2 {
        return Err(Error::Undersampled { k_max, half: n_up / 2 });
    }
    let weighted: Vec<T> = f.iter().zip(&geometry.s_alpha).map(|(&f, &s)| f * s).collect();
    let weighted = inverse_samples(&forward_coeffs(&weighted)?, n_up)?;
    let s = geometry.arclength.samples(&FourierPlan::new(n_up)?)?;

    let length = geometry.length;
    let scale = T::two_pi() / length;
    let h = T::two_pi() / T::from_usize_lossy(n_up);
    let nodes: Vec<T> = s.iter().map(|&s| s * scale).collect();
    let weights: Vec<Complex<T>> = weighted
        .iter()
        .map(|&g| Complex::new(g * h / length, T::zero()))
        .collect();
    NufftPlan::new(2 * k_max, eps)?.type1(&nodes, &weights)
}

/// Step 1: the arclength invariants of a sampled curve.
///
/// The curvature coefficients are integrated once for the tangent angle,
/// the unit tangent is formed on the uniform arclength grid of size
/// `2 k_max`, and integrated again for the coordinates. The base point and
/// `θ₀` are taken from the sample at `α = 0`.
pub fn extract<T: Real>(curve: &PlanarCurveSamples<T>, opts: &ExtractOptions<T>) -> Result<ArclengthInvariants<T>> {
    let geometry = compute_geometry(curve)?;
    let kind = curve.kind();
    let turning = geometry.turning_number();
    let expected = T::from_isize_lossy(kind.turning_number() as isize);
    if (turning - expected).abs() > T::lit(0.5) {
        return Err(Error::Parameter(format!(
            "turning number {:.3} unsupported for a {} curve (expected {})",
            turning.as_f64(),
            kind.label(),
            kind.turning_number()
        )));
    }

    let length = geometry.length;
    let mut kappa_hat =
        arclength_coeffs(&geometry.kappa, &geometry, opts.n_up, opts.k_max, opts.eps)?.without_nyquist();
    kappa_hat.set(0, Complex::new(T::two_pi() * expected / length, T::zero()));

    let m = 2 * opts.k_max;
    let plan = FourierPlan::new(m)?;
    let stretch = length / T::two_pi();
    let theta0 = geometry.y_alpha[0].atan2(geometry.x_alpha[0]);
    let theta = kappa_hat.antiderivative().samples(&plan)?;
    let (cos, sin): (Vec<T>, Vec<T>) = theta
        .iter()
        .map(|&t| {
            let (s, c) = (theta0 + stretch * t).sin_cos();
            (c, s)
        })
        .unzip();
    let xs = plan.forward(&cos)?;
    let ys = plan.forward(&sin)?;

    let shift = kind.x_period_shift::<T>();
    let gap_x = length * xs.mean().re - shift;
    let gap_y = length * ys.mean().re;
    let defect = gap_x.hypot(gap_y);
    if defect > opts.closure_tol * length {
        return Err(Error::Resolution(format!(
            "closure defect {:.3e} exceeds {:.1e}·L at N1 = {}, N_up = {}, k_max = {}",
            defect.as_f64(),
            opts.closure_tol.as_f64(),
            curve.len(),
            opts.n_up,
            opts.k_max
        )));
    }

    let base_point = [curve.x()[0], curve.y()[0]];
    let coords = |series: &FourierSeries<T>, base: T| {
        let mut c = series.antiderivative().periodic.scaled(stretch);
        let c0 = c.coeff(0);
        c.set(0, c0 + base);
        c
    };
    Ok(ArclengthInvariants {
        length,
        k_max: opts.k_max,
        cx: coords(&xs, base_point[0]),
        cy: coords(&ys, base_point[1]),
        slope_x: shift / length,
        slope_y: T::zero(),
        base_point,
        theta0,
    })
}

/// Evaluate the arclength parametrization at arbitrary `s` by a Type-2
/// NUFFT of the packed coordinate series.
pub fn invert<T: Real>(inv: &ArclengthInvariants<T>, s_targets: &[T], eps: T) -> Result<Vec<[T; 2]>> {
    let plan = NufftPlan::new(inv.cx.modes(), eps)?;
    invert_with(&plan, inv, s_targets)
}

/// As [`invert`], reusing a plan built for `inv.cx.modes()` modes.
pub fn invert_with<T: Real>(plan: &NufftPlan<T>, inv: &ArclengthInvariants<T>, s_targets: &[T]) -> Result<Vec<[T; 2]>> {
    let scale = T::two_pi() / inv.length;
    let nodes: Vec<T> = s_targets.iter().map(|&s| s * scale).collect();
    let z = plan.type2(&nodes, &inv.packed())?;
    Ok(z.into_iter()
        .zip(s_targets)
        .map(|(z, &s)| [z.re + inv.slope_x * s, z.im + inv.slope_y * s])
        .collect())
}
