//! Convergence studies: Step-1 accuracy against analytic truth, RK4 order of
//! the spacing evolution, and refined versus direct arclength accuracy.

use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::examples::ExampleCurve;
use super::metrics::{compare_invariants, default_dense_n, ErrorRow, ErrorTable};
use super::truth::ArclengthTruth;
use crate::error::{Error, Result};
use crate::evolution::{equidistribution_residual, evolve, EvolutionRun, EvolveOptions, SpacingState};
use crate::invariants::{extract, invert, ArclengthInvariants, ExtractOptions};
use crate::monitor::{normalize, Monitor};
use crate::resample::refine;

/// Studies measure errors rather than reject inputs, so the closure check
/// of [`extract`] is effectively disabled.
const STUDY_CLOSURE_TOL: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyKind {
    Step1Convergence,
    Rk4Convergence,
    Refinement,
}

impl StudyKind {
    pub fn label(self) -> &'static str {
        match self {
            StudyKind::Step1Convergence => "step1_convergence",
            StudyKind::Rk4Convergence => "rk4_convergence",
            StudyKind::Refinement => "refinement",
        }
    }
}

impl FromStr for StudyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "step1" | "step1_convergence" => Ok(StudyKind::Step1Convergence),
            "rk4" | "rk4_convergence" => Ok(StudyKind::Rk4Convergence),
            "refinement" => Ok(StudyKind::Refinement),
            other => Err(Error::Parameter(format!("unknown study '{other}'"))),
        }
    }
}

/// Relative L∞ error of `inv` against the analytic curve, at the nodes of
/// `truth`: the larger of `max|Δx|/max|x|` and `max|Δy|/max|y|`.
pub fn step1_error(inv: &ArclengthInvariants<f64>, truth: &ArclengthTruth, eps: f64) -> Result<f64> {
    let (params, s): (Vec<f64>, Vec<f64>) = truth.nodes().unzip();
    let got = invert(inv, &s, eps)?;
    let (mut ex, mut ey, mut mx, mut my) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for (p, g) in params.iter().zip(&got) {
        let (x, y) = truth.curve().point(*p);
        mx = mx.max(x.abs());
        my = my.max(y.abs());
        ex = ex.max((g[0] - x).abs());
        ey = ey.max((g[1] - y).abs());
    }
    Ok((ex / mx).max(ey / my))
}

/// Step-1 error against analytic truth over a sweep of `N1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Step1Study {
    pub example: ExampleCurve<f64>,
    pub sweep: Vec<usize>,
    /// Nodes of the truth table.
    pub truth_n: usize,
    pub eps: f64,
}

impl Step1Study {
    /// Droplet with `ε_P = 2/7`, `N1 ∈ {32, …, 256}`.
    pub fn preset() -> Self {
        Self {
            example: ExampleCurve::Droplet {
                eps: 2.0 / 7.0,
                eta0: 0.0,
            },
            sweep: vec![32, 64, 96, 128, 160, 192, 256],
            truth_n: 2048,
            eps: 1e-15,
        }
    }

    pub fn run(&self) -> Result<ErrorTable> {
        let truth = ArclengthTruth::new(&self.example, self.truth_n);
        let rows = self
            .sweep
            .par_iter()
            .map(|&n| {
                let curve = self.example.sample(n)?;
                let opts =
                    ExtractOptions::for_curve(n, self.example.kind(), self.eps).with_closure_tol(STUDY_CLOSURE_TOL);
                let inv = extract(&curve, &opts)?;
                Ok(ErrorRow {
                    n: Some(n),
                    err_arc_linf: Some(step1_error(&inv, &truth, self.eps)?),
                    ..Default::default()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ErrorTable::new(StudyKind::Step1Convergence.label(), rows)
    }
}

/// Equidistribution residual at `t = 1` over a sweep of `dt`.
#[derive(Clone, Debug, PartialEq)]
pub struct Rk4Study {
    pub monitor: Monitor<f64>,
    pub n2: usize,
    pub sweep: Vec<f64>,
    pub eps: f64,
}

impl Rk4Study {
    /// `φ₀` on `N2 = 128`, `dt ∈ {4e-3, 2e-3, 1e-3, 5e-4}`.
    pub fn preset() -> Self {
        Self {
            monitor: Monitor::phi0(),
            n2: 128,
            sweep: vec![4e-3, 2e-3, 1e-3, 5e-4],
            eps: 1e-15,
        }
    }

    pub fn run(&self) -> Result<ErrorTable> {
        let phi = normalize(&self.monitor, self.n2)?;
        let rows = self
            .sweep
            .par_iter()
            .map(|&dt| {
                let run = evolve(&phi, &EvolveOptions::new(self.n2, dt, self.eps))?;
                Ok(ErrorRow {
                    n: Some(self.n2),
                    dt: Some(dt),
                    residual: Some(equidistribution_residual(&run.state, &phi)?),
                    ..Default::default()
                })
            })
            .collect::<Result<Vec<_>>>()?;
        ErrorTable::new(StudyKind::Rk4Convergence.label(), rows)
    }
}

/// Refined-representation accuracy against a full-resolution reference.
///
/// For each `N` of the sweep the table holds the error of invariants
/// extracted directly from `N` samples of the example against the analytic
/// curve (`err_arc_linf`, as in [`Step1Study`]) and
/// of invariants re-extracted from the refined `N`-point curve
/// (`err_ref_l2`, `err_ref_linf`). The refined curve is computed at
/// `max(N, N2)` points and decimated when `N < N2`.
#[derive(Clone, Debug, PartialEq)]
pub struct RefinementStudy {
    pub example: ExampleCurve<f64>,
    pub monitor: Monitor<f64>,
    pub monitor_name: String,
    /// `N1` and `N_up` of the reference extraction.
    pub n_ref: usize,
    pub nup_ref: usize,
    pub n2: usize,
    pub dt: f64,
    /// `N_up` used to re-extract invariants from refined curves.
    pub nup_refined: usize,
    pub sweep: Vec<usize>,
    /// Nodes of the analytic truth table for `err_arc_linf`.
    pub truth_n: usize,
    pub eps: f64,
}

impl RefinementStudy {
    /// `droplet` (`ε_P = 1.7`, `φ₁`) or `peakons` (`ε_R = 1e-2`, `φ₂`) at
    /// full resolution.
    pub fn preset(example: &str) -> Result<Self> {
        match example {
            "droplet" => Ok(Self {
                example: ExampleCurve::pinched_droplet(1.7)?,
                monitor: Monitor::phi1(),
                monitor_name: "phi1".into(),
                n_ref: 32768,
                nup_ref: 65536,
                n2: 2048,
                dt: 1e-4,
                nup_refined: 65536,
                sweep: vec![256, 512, 1024, 2048],
                truth_n: 4096,
                eps: 1e-15,
            }),
            "peakons" => Ok(Self {
                example: ExampleCurve::peakons(1e-2)?,
                monitor: Monitor::phi2(),
                monitor_name: "phi2".into(),
                n_ref: 16384,
                nup_ref: 65536,
                n2: 2048,
                dt: 5e-5,
                nup_refined: 32768,
                sweep: vec![256, 512, 1024, 2048],
                truth_n: 4096,
                eps: 1e-15,
            }),
            other => Err(Error::Parameter(format!("no refinement preset for '{other}'"))),
        }
    }

    fn extract_options(&self, n_up: usize, k_max: usize) -> ExtractOptions<f64> {
        ExtractOptions::new(n_up, k_max, self.eps).with_closure_tol(STUDY_CLOSURE_TOL)
    }

    pub fn reference(&self) -> Result<ArclengthInvariants<f64>> {
        let curve = self.example.sample(self.n_ref)?;
        extract(&curve, &self.extract_options(self.nup_ref, self.n_ref / 2))
    }

    pub fn evolve(&self) -> Result<EvolutionRun<f64>> {
        let phi = normalize(&self.monitor, self.n2)?;
        evolve(&phi, &EvolveOptions::new(self.n2, self.dt, self.eps))
    }

    /// Table for a given reference and evolved spacing.
    pub fn run_with(&self, reference: &ArclengthInvariants<f64>, spacing: &SpacingState<f64>) -> Result<ErrorTable> {
        let truth = ArclengthTruth::new(&self.example, self.truth_n);
        let rows = self
            .sweep
            .par_iter()
            .map(|&n| self.row(reference, spacing, &truth, n))
            .collect::<Result<Vec<_>>>()?;
        ErrorTable::new(StudyKind::Refinement.label(), rows)
    }

    fn row(
        &self,
        reference: &ArclengthInvariants<f64>,
        spacing: &SpacingState<f64>,
        truth: &ArclengthTruth,
        n: usize,
    ) -> Result<ErrorRow> {
        let kind = self.example.kind();
        let direct = extract(
            &self.example.sample(n)?,
            &ExtractOptions::for_curve(n, kind, self.eps).with_closure_tol(STUDY_CLOSURE_TOL),
        )?;
        let arc_linf = step1_error(&direct, truth, self.eps)?;

        let n3 = n.max(spacing.len());
        if !n3.is_multiple_of(n) {
            return Err(Error::Parameter(format!("sweep size {n} does not divide N3 = {n3}")));
        }
        let refined = refine(reference, spacing, n3, self.eps)?.to_curve()?.decimate(n3 / n)?;
        let k_max = reference.k_max.min(self.nup_refined / 2);
        let re = extract(&refined, &self.extract_options(self.nup_refined, k_max))?;
        let (l2, linf) = compare_invariants(reference, &re, default_dense_n(reference, &re))?;
        Ok(ErrorRow {
            n: Some(n),
            err_arc_linf: Some(arc_linf),
            err_ref_l2: Some(l2),
            err_ref_linf: Some(linf),
            ..Default::default()
        })
    }

    pub fn run(&self) -> Result<ErrorTable> {
        let reference = self.reference()?;
        let run = self.evolve()?;
        self.run_with(&reference, &run.state)
    }
}

/// A configured study.
#[derive(Clone, Debug, PartialEq)]
pub enum Study {
    Step1(Step1Study),
    Rk4(Rk4Study),
    Refinement(RefinementStudy),
}

impl Study {
    pub fn kind(&self) -> StudyKind {
        match self {
            Study::Step1(_) => StudyKind::Step1Convergence,
            Study::Rk4(_) => StudyKind::Rk4Convergence,
            Study::Refinement(_) => StudyKind::Refinement,
        }
    }
}

pub fn run_study(study: &Study) -> Result<ErrorTable> {
    match study {
        Study::Step1(s) => s.run(),
        Study::Rk4(s) => s.run(),
        Study::Refinement(s) => s.run(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for k in [
            StudyKind::Step1Convergence,
            StudyKind::Rk4Convergence,
            StudyKind::Refinement,
        ] {
            assert_eq!(k.label().parse::<StudyKind>().unwrap(), k);
        }
        assert_eq!("rk4".parse::<StudyKind>().unwrap(), StudyKind::Rk4Convergence);
        assert!("fig".parse::<StudyKind>().is_err());
    }

    #[test]
    fn small_step1_sweep_decays() {
        let study = Step1Study {
            sweep: vec![32, 64, 128],
            truth_n: 256,
            ..Step1Study::preset()
        };
        let t = run_study(&Study::Step1(study)).unwrap();
        let e = t.column(|r| r.err_arc_linf);
        assert!(e[0] > e[1] && e[1] > e[2], "{e:?}");
    }

    #[test]
    fn small_refinement_table() {
        let study = RefinementStudy {
            example: ExampleCurve::pinched_droplet(0.8).unwrap(),
            monitor: Monitor::phi0(),
            monitor_name: "phi0".into(),
            n_ref: 1024,
            nup_ref: 2048,
            n2: 128,
            dt: 1e-2,
            nup_refined: 2048,
            sweep: vec![64, 128, 256],
            truth_n: 512,
            eps: 1e-15,
        };
        let t = study.run().unwrap();
        assert_eq!(t.len(), 3);
        for r in &t.rows {
            assert!(r.err_ref_l2.unwrap() >= 0.0 && r.err_arc_linf.unwrap() > 0.0);
        }
        let l2 = t.column(|r| r.err_ref_l2);
        assert!(l2[2] < l2[0]);
    }
}
