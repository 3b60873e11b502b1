//! Error metrics between two sets of arclength invariants, and the error
//! table produced by the convergence studies.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariants::ArclengthInvariants;
use crate::scalar::Real;
use crate::spectral::FourierSeries;

/// Relative length mismatch above which the comparison is flagged.
pub const LENGTH_MISMATCH_WARN: f64 = 1e-8;

/// `(l2_rel, linf_rel)` of `test` against `reference`.
///
/// `l2_rel` is `‖Δc‖₂/‖c_ref‖₂` over both coordinate series, zero-padded to
/// the wider band (Plancherel). `linf_rel` is the largest pointwise distance
/// between the two parametrizations at `dense_n` uniform fractions of their
/// lengths, divided by the largest coordinate magnitude of the reference.
pub fn compare_invariants<T: Real>(
    reference: &ArclengthInvariants<T>,
    test: &ArclengthInvariants<T>,
    dense_n: usize,
) -> Result<(T, T)> {
    let dl = ((test.length - reference.length) / reference.length).abs();
    if dl.as_f64() > LENGTH_MISMATCH_WARN {
        warn!(
            "lengths differ by {:.3e} (relative); the mismatch is part of the error",
            dl.as_f64()
        );
    }
    let m = reference.cx.modes().max(test.cx.modes());
    let pad = |c: &FourierSeries<T>| c.with_modes(m);
    let dx = pad(&reference.cx)?.sub(&pad(&test.cx)?)?;
    let dy = pad(&reference.cy)?.sub(&pad(&test.cy)?)?;
    let norm = reference.cx.l2_norm().hypot(reference.cy.l2_norm());
    if norm == T::zero() {
        return Err(Error::Parameter("reference invariants are identically zero".into()));
    }
    let l2 = dx.l2_norm().hypot(dy.l2_norm()) / norm;

    let min_dense = 2 * reference.k_max.max(test.k_max);
    if dense_n < min_dense {
        return Err(Error::DownsampleForbidden {
            modes: min_dense,
            n_out: dense_n,
        });
    }
    let a = reference.sample_uniform(dense_n)?;
    let b = test.sample_uniform(dense_n)?;
    let scale = a.iter().fold(T::zero(), |m, p| m.max(p[0].abs()).max(p[1].abs()));
    let dist = a
        .iter()
        .zip(&b)
        .fold(T::zero(), |m, (p, q)| m.max((p[0] - q[0]).hypot(p[1] - q[1])));
    Ok((l2, dist / scale))
}

/// Default dense grid for [`compare_invariants`]: four points per retained
/// mode of the wider band.
pub fn default_dense_n<T>(reference: &ArclengthInvariants<T>, test: &ArclengthInvariants<T>) -> usize {
    4 * reference.k_max.max(test.k_max)
}

/// One row of a convergence table. Columns that a study does not produce
/// are `None`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    /// Sample size: `N1` for Step-1 and arclength errors, `N3` for refined.
    pub n: Option<usize>,
    pub dt: Option<f64>,
    /// Relative L∞ error of the arclength parametrization from `n` samples.
    pub err_arc_linf: Option<f64>,
    /// Relative L² coefficient error of invariants re-extracted from the
    /// refined `n`-point curve.
    pub err_ref_l2: Option<f64>,
    pub err_ref_linf: Option<f64>,
    /// Equidistribution residual at `t = 1`.
    pub residual: Option<f64>,
}

/// Rows sorted by `n`, then by decreasing `dt`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ErrorTable {
    pub study: String,
    pub rows: Vec<ErrorRow>,
}

impl ErrorTable {
    pub fn new(study: impl Into<String>, mut rows: Vec<ErrorRow>) -> Result<Self> {
        for r in &rows {
            let cols = [r.err_arc_linf, r.err_ref_l2, r.err_ref_linf, r.residual];
            if cols.iter().flatten().any(|e| !(*e >= 0.0)) {
                return Err(Error::Parameter(format!("negative or NaN error in row {r:?}")));
            }
        }
        rows.sort_by(|a, b| {
            a.n.cmp(&b.n)
                .then(b.dt.partial_cmp(&a.dt).unwrap_or(std::cmp::Ordering::Equal))
        });
        Ok(Self {
            study: study.into(),
            rows,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Values of one column, in row order, skipping missing entries.
    pub fn column(&self, f: impl Fn(&ErrorRow) -> Option<f64>) -> Vec<f64> {
        self.rows.iter().filter_map(f).collect()
    }
}

/// Least-squares slope of `log y` against `log x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::CurveKind;
    use crate::invariants::{extract, ExtractOptions};
    use crate::scalar::Complex;
    use crate::validation::ExampleCurve;

    fn droplet_invariants(n: usize) -> ArclengthInvariants<f64> {
        let c = ExampleCurve::droplet(0.6).unwrap().sample(n).unwrap();
        extract(&c, &ExtractOptions::for_curve(n, CurveKind::Closed, 1e-15)).unwrap()
    }

    #[test]
    fn identical_inputs_give_zero() {
        let a = droplet_invariants(64);
        let (l2, linf) = compare_invariants(&a, &a, 128).unwrap();
        assert_eq!((l2, linf), (0.0, 0.0));
    }

    #[test]
    fn single_coefficient_perturbation_is_exact() {
        let a = droplet_invariants(64);
        let mut b = a.clone();
        let delta = 1e-6;
        let c = b.cx.coeff(3);
        b.cx.set(3, c + Complex::new(delta, 0.0));
        let (l2, _) = compare_invariants(&a, &b, 128).unwrap();
        let want = delta / a.cx.l2_norm().hypot(a.cy.l2_norm());
        assert!((l2 - want).abs() < 1e-12 * want);
    }

    #[test]
    fn band_mismatch_is_zero_padded() {
        let fine = droplet_invariants(256);
        let coarse = droplet_invariants(64);
        let (l2, linf) = compare_invariants(&fine, &coarse, default_dense_n(&fine, &coarse)).unwrap();
        // Dropped reference modes count fully.
        let tail: f64 = fine
            .cx
            .iter()
            .chain(fine.cy.iter())
            .filter(|(k, _)| *k < -32 || *k >= 32)
            .map(|(_, c)| c.norm_sqr())
            .sum();
        let norm = fine.cx.l2_norm().hypot(fine.cy.l2_norm());
        assert!(l2 >= tail.sqrt() / norm);
        assert!(linf > 0.0 && linf < 1e-3);
        assert!(compare_invariants(&fine, &coarse, 64).is_err());
    }

    #[test]
    fn table_is_sorted_and_validated() {
        let row = |n, e| ErrorRow {
            n: Some(n),
            err_arc_linf: Some(e),
            ..Default::default()
        };
        let t = ErrorTable::new("x", vec![row(64, 1e-3), row(32, 1e-2)]).unwrap();
        assert_eq!(t.rows[0].n, Some(32));
        assert!(ErrorTable::new("x", vec![row(8, -1.0)]).is_err());
    }

    #[test]
    fn slope_of_power_law() {
        let x = [1.0, 2.0, 4.0, 8.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powi(4)).collect();
        assert!((loglog_slope(&x, &y).unwrap() - 4.0).abs() < 1e-12);
    }
}
