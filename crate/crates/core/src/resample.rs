//! Step 3: evaluate the arclength parametrization at the targets generated
//! by an evolved spacing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::SpacingState;
use crate::geometry::{CurveKind, PlanarCurveSamples};
use crate::invariants::{invert, ArclengthInvariants};
use crate::scalar::Real;
use crate::spectral::{forward_coeffs, FourierPlan, UniformGrid};

/// Where a refined curve came from.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub n1: Option<usize>,
    pub n2: usize,
    pub n3: usize,
    pub monitor: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RefinedCurve<T> {
    pub grid: UniformGrid,
    pub x: Vec<T>,
    pub y: Vec<T>,
    /// Physical arclength `s(α_j)·L/2π` of each output node.
    pub s_targets: Vec<T>,
    /// `s_α` interpolated to the output grid, in rescaled units.
    pub s_alpha: Vec<T>,
    pub kind: CurveKind,
    pub provenance: Provenance,
}

impl<T: Real> RefinedCurve<T> {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn with_source(mut self, n1: Option<usize>, monitor: Option<String>) -> Self {
        self.provenance.n1 = n1;
        self.provenance.monitor = monitor;
        self
    }

    pub fn to_curve(&self) -> Result<PlanarCurveSamples<T>> {
        PlanarCurveSamples::new(self.x.clone(), self.y.clone(), self.kind)
    }

    /// Distance between consecutive nodes, wrapping around for closed curves.
    pub fn node_spacing(&self) -> Vec<T> {
        let n = self.len();
        let last = match self.kind {
            CurveKind::Closed => n,
            CurveKind::HorizontallyPeriodic => n - 1,
        };
        (0..last)
            .map(|j| {
                let i = (j + 1) % n;
                (self.x[i] - self.x[j]).hypot(self.y[i] - self.y[j])
            })
            .collect()
    }
}

/// Fourier-interpolate `s_α` to `n3` nodes, integrate to `s(α)`, rescale to
/// the physical length and invert the invariants there.
pub fn refine<T: Real>(
    inv: &ArclengthInvariants<T>,
    spacing: &SpacingState<T>,
    n3: usize,
    eps: T,
) -> Result<RefinedCurve<T>> {
    let n2 = spacing.len();
    if n3 < n2 {
        return Err(Error::UnderResolution { n3, n2 });
    }
    let grid = UniformGrid::new(n3)?;
    let plan = FourierPlan::new(n3)?;
    let series = forward_coeffs(&spacing.s_alpha)?.without_nyquist();
    let s_alpha = plan.inverse(&series)?;
    let mut s = series.antiderivative().samples(&plan)?;
    s[0] = T::zero();
    let scale = inv.length / T::two_pi();
    let s_targets: Vec<T> = s.iter().map(|&v| v * scale).collect();
    if let Some(j) = s_targets.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(Error::MonotonicityLoss {
            t: spacing.t.as_f64(),
            detail: format!("arclength targets not increasing at node {}", j + 1),
        });
    }
    let pts = invert(inv, &s_targets, eps)?;
    let (x, y) = pts.into_iter().map(|p| (p[0], p[1])).unzip();
    Ok(RefinedCurve {
        grid,
        x,
        y,
        s_targets,
        s_alpha,
        kind: inv.kind(),
        provenance: Provenance {
            n1: None,
            n2,
            n3,
            monitor: None,
        },
    })
}
