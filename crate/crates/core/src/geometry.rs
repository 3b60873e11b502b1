//! Differential geometry of curves sampled on a uniform parameter grid.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{FourierPlan, FourierSeries, SemiPeriodicField, UniformGrid};

/// Trailing-coefficient level above which a sampled curve is reported as
/// under-resolved.
pub const RESOLUTION_WARN_LEVEL: f64 = 1e-10;

/// Coordinate coefficients below this multiple of machine epsilon (relative
/// to the largest) are treated as roundoff and dropped before differentiating.
pub const ROUNDOFF_FILTER_ULPS: f64 = 4.0;

/// Periodicity of a sampled curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    /// `x` and `y` are both `2π`-periodic; the curve is traversed
    /// counterclockwise.
    Closed,
    /// `x(α + 2π) = x(α) + 2π` and `y` is periodic.
    #[serde(rename = "hperiodic")]
    HorizontallyPeriodic,
}

impl CurveKind {
    /// Winding of the tangent angle over one period.
    pub fn turning_number(self) -> i32 {
        match self {
            CurveKind::Closed => 1,
            CurveKind::HorizontallyPeriodic => 0,
        }
    }

    /// Increment of `x` over one period.
    pub fn x_period_shift<T: Real>(self) -> T {
        match self {
            CurveKind::Closed => T::zero(),
            CurveKind::HorizontallyPeriodic => T::two_pi(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CurveKind::Closed => "closed",
            CurveKind::HorizontallyPeriodic => "hperiodic",
        }
    }
}

impl std::str::FromStr for CurveKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "closed" => Ok(CurveKind::Closed),
            "hperiodic" => Ok(CurveKind::HorizontallyPeriodic),
            other => Err(Error::Parse(format!("unknown curve kind '{other}'"))),
        }
    }
}

/// Coordinates of a planar curve at the nodes `α_j = 2πj/n`.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanarCurveSamples<T> {
    grid: UniformGrid,
    x: Vec<T>,
    y: Vec<T>,
    kind: CurveKind,
}

impl<T: Real> PlanarCurveSamples<T> {
    pub fn new(x: Vec<T>, y: Vec<T>, kind: CurveKind) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        let grid = UniformGrid::new(x.len())?;
        if x.iter().chain(&y).any(|v| !v.is_finite()) {
            return Err(Error::Parameter("curve samples must be finite".into()));
        }
        Ok(Self { grid, x, y, kind })
    }

    /// Sample `f(α) -> (x, y)` on `n` nodes.
    pub fn from_fn(n: usize, kind: CurveKind, f: impl Fn(T) -> (T, T)) -> Result<Self> {
        let grid = UniformGrid::new(n)?;
        let (x, y) = grid.nodes::<T>().into_iter().map(f).unzip();
        Self::new(x, y, kind)
    }

    pub fn grid(&self) -> UniformGrid {
        self.grid
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[T] {
        &self.x
    }

    pub fn y(&self) -> &[T] {
        &self.y
    }

    pub fn kind(&self) -> CurveKind {
        self.kind
    }

    /// `x` with the linear drift removed, so it is `2π`-periodic for both
    /// kinds.
    pub fn x_periodic(&self) -> Vec<T> {
        match self.kind {
            CurveKind::Closed => self.x.clone(),
            CurveKind::HorizontallyPeriodic => {
                let nodes = self.grid.nodes::<T>();
                self.x.iter().zip(nodes).map(|(&x, a)| x - a).collect()
            }
        }
    }

    /// Every `stride`-th sample; the result lives on the coarser uniform grid.
    pub fn decimate(&self, stride: usize) -> Result<Self> {
        if stride == 0 || !self.len().is_multiple_of(stride) {
            return Err(Error::Parameter(format!(
                "cannot decimate {} samples by {stride}",
                self.len()
            )));
        }
        let pick = |v: &[T]| v.iter().step_by(stride).copied().collect::<Vec<_>>();
        Self::new(pick(&self.x), pick(&self.y), self.kind)
    }
}

/// Local spacing, curvature, tangent angle and arclength of a sampled curve.
#[derive(Clone, Debug)]
pub struct CurveGeometry<T> {
    pub x_alpha: Vec<T>,
    pub y_alpha: Vec<T>,
    /// `s_α = |X_α|`.
    pub s_alpha: Vec<T>,
    /// Signed curvature, positive for a counterclockwise circle.
    pub kappa: Vec<T>,
    /// `θ(α)` with `θ(0) = atan2(y_α(0), x_α(0))`.
    pub theta: SemiPeriodicField<T>,
    /// `s(α) = ∫₀^α s_α`; its slope is `L/2π`.
    pub arclength: SemiPeriodicField<T>,
    pub s_of_alpha: Vec<T>,
    pub length: T,
}

impl<T: Real> CurveGeometry<T> {
    pub fn len(&self) -> usize {
        self.s_alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s_alpha.is_empty()
    }

    pub fn theta_samples(&self) -> Result<Vec<T>> {
        self.theta.samples(&FourierPlan::new(self.len())?)
    }

    pub fn kappa_max(&self) -> T {
        self.kappa.iter().fold(T::zero(), |m, k| m.max(k.abs()))
    }

    /// `(1/2π) ∫ κ ds`.
    pub fn turning_number(&self) -> T {
        let n = T::from_usize_lossy(self.len());
        self.kappa.iter().zip(&self.s_alpha).map(|(&k, &s)| k * s).sum::<T>() / n
    }
}

pub fn compute_geometry<T: Real>(curve: &PlanarCurveSamples<T>) -> Result<CurveGeometry<T>> {
    let n = curve.len();
    let plan = FourierPlan::new(n)?;
    let cx = plan.forward(&curve.x_periodic())?;
    let cy = plan.forward(curve.y())?;
    warn_if_unresolved(&cx, &cy);
    let level = T::epsilon() * T::lit(ROUNDOFF_FILTER_ULPS);
    let (cx, cy) = (cx.filtered(level), cy.filtered(level));

    let shift = curve.kind().x_period_shift::<T>() / T::two_pi();
    let dcx = cx.differentiate();
    let dcy = cy.differentiate();
    let x_alpha: Vec<T> = plan.inverse(&dcx)?.into_iter().map(|v| v + shift).collect();
    let y_alpha = plan.inverse(&dcy)?;
    let x_aa = plan.inverse(&dcx.differentiate())?;
    let y_aa = plan.inverse(&dcy.differentiate())?;

    let s_alpha: Vec<T> = x_alpha.iter().zip(&y_alpha).map(|(&a, &b)| a.hypot(b)).collect();
    if let Some((node, &min)) = s_alpha
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Less))
    {
        if !(min > T::zero()) {
            return Err(Error::DegenerateCurve {
                min_spacing: min.as_f64(),
                node,
            });
        }
    }

    let kappa: Vec<T> = (0..n)
        .map(|j| {
            let s = s_alpha[j];
            (x_alpha[j] * y_aa[j] - y_alpha[j] * x_aa[j]) / (s * s * s)
        })
        .collect();

    let theta_alpha: Vec<T> = kappa.iter().zip(&s_alpha).map(|(&k, &s)| k * s).collect();
    let mut theta = plan.forward(&theta_alpha)?.antiderivative();
    let theta0 = y_alpha[0].atan2(x_alpha[0]);
    let c0 = theta.periodic.coeff(0);
    theta.periodic.set(0, c0 + theta0);

    let sa = plan.forward(&s_alpha)?;
    let length = sa.mean().re * T::two_pi();
    let arclength = sa.antiderivative();
    let s_of_alpha = arclength.samples(&plan)?;

    Ok(CurveGeometry {
        x_alpha,
        y_alpha,
        s_alpha,
        kappa,
        theta,
        arclength,
        s_of_alpha,
        length,
    })
}

fn warn_if_unresolved<T: Real>(cx: &FourierSeries<T>, cy: &FourierSeries<T>) {
    let from = 3 * cx.modes() / 8;
    let tail = cx.tail_ratio(from).max(cy.tail_ratio(from));
    if tail.as_f64() > RESOLUTION_WARN_LEVEL {
        log::warn!(
            "curve is under-resolved on {} samples: trailing coefficients at {:.1e} of the maximum",
            cx.modes(),
            tail.as_f64()
        );
    }
}

/// Unit normals `n = (-y_s, x_s)` and tangents `t = (x_s, y_s)` at the nodes.
pub fn unit_vectors<T: Real>(geometry: &CurveGeometry<T>) -> (Vec<[T; 2]>, Vec<[T; 2]>) {
    geometry
        .x_alpha
        .iter()
        .zip(&geometry.y_alpha)
        .zip(&geometry.s_alpha)
        .map(|((&xa, &ya), &s)| {
            let (tx, ty) = (xa / s, ya / s);
            ([-ty, tx], [tx, ty])
        })
        .unzip()
}
