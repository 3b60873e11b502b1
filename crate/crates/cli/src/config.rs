//! Pipeline configuration: a JSON file whose fields can each be overridden
//! on the command line.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use equiparam::geometry::CurveKind;
use equiparam::invariants::MAX_DEFAULT_NUP;
use equiparam::nufft::{MAX_EPS, MIN_EPS};
use equiparam::{Error, Result};

/// Where the input curve comes from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CurveSource {
    Example {
        example: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        param: Option<f64>,
    },
    File {
        file: PathBuf,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub curve: CurveSource,
    /// Builtin monitor name or path to a monitor file.
    pub monitor: String,
    #[serde(default)]
    pub n1: Option<usize>,
    #[serde(default)]
    pub n_up: Option<usize>,
    #[serde(default)]
    pub k_max: Option<usize>,
    pub n2: usize,
    #[serde(default)]
    pub n3: Option<usize>,
    pub dt: f64,
    #[serde(default = "default_eps")]
    pub eps_rel: f64,
    /// Directory receiving `invariants.json`, `spacing.json`, `refined.csv`
    /// and `report.json`.
    #[serde(default = "default_out")]
    pub out_dir: PathBuf,
}

fn default_eps() -> f64 {
    1e-15
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

/// Resolved sizes after defaults are applied.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sizes {
    pub n1: usize,
    pub n_up: usize,
    pub k_max: usize,
    pub n2: usize,
    pub n3: usize,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg: Self = equiparam::io::read_json(path)?;
        // Relative paths inside the file are relative to the file.
        let base = path.parent().unwrap_or(Path::new(""));
        if let CurveSource::File { file } = &mut cfg.curve {
            if file.is_relative() {
                *file = base.join(&*file);
            }
        }
        let monitor = base.join(&cfg.monitor);
        if monitor.is_file() {
            cfg.monitor = monitor.to_string_lossy().into_owned();
        }
        Ok(cfg)
    }

    /// Apply defaults for the unset sizes of a curve with `n1` samples and
    /// check every constraint between them.
    pub fn resolve(&self, n1: usize, kind: CurveKind) -> Result<Sizes> {
        if let Some(want) = self.n1 {
            if want != n1 {
                return Err(Error::Parameter(format!(
                    "n1 = {want} but the input curve has {n1} samples"
                )));
            }
        }
        let (n_up, k_max) = step1_sizes(n1, self.n_up, self.k_max, kind);
        let sizes = Sizes {
            n1,
            n_up,
            k_max,
            n2: self.n2,
            n3: self.n3.unwrap_or(self.n2),
        };
        sizes.validate()?;
        validate_dt(self.dt)?;
        validate_eps(self.eps_rel)?;
        Ok(sizes)
    }
}

/// Default `(n_up, k_max)` for a curve with `n1` samples.
pub fn step1_sizes(n1: usize, n_up: Option<usize>, k_max: Option<usize>, kind: CurveKind) -> (usize, usize) {
    let n_up = n_up.unwrap_or(match kind {
        CurveKind::Closed => 2 * n1,
        CurveKind::HorizontallyPeriodic => (16 * n1).min(MAX_DEFAULT_NUP).max(n1),
    });
    (n_up, k_max.unwrap_or(n1 / 2))
}

impl Sizes {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("n1", self.n1), ("n_up", self.n_up), ("n2", self.n2), ("n3", self.n3)] {
            if v == 0 || v % 2 != 0 {
                return Err(Error::Parameter(format!("{name} = {v} must be even and positive")));
            }
        }
        if self.n3 < self.n2 {
            return Err(Error::Parameter(format!(
                "n3 = {} must be >= n2 = {}",
                self.n3, self.n2
            )));
        }
        if self.n_up < self.n1 {
            return Err(Error::Parameter(format!(
                "n_up = {} must be >= n1 = {}",
                self.n_up, self.n1
            )));
        }
        if self.k_max == 0 || self.k_max > self.n_up / 2 {
            return Err(Error::Parameter(format!(
                "k_max = {} must be in [1, n_up/2 = {}]",
                self.k_max,
                self.n_up / 2
            )));
        }
        Ok(())
    }
}

pub fn validate_dt(dt: f64) -> Result<()> {
    if !(dt > 0.0 && dt <= 0.25) {
        return Err(Error::Parameter(format!("dt = {dt} must be in (0, 0.25]")));
    }
    Ok(())
}

pub fn validate_eps(eps: f64) -> Result<()> {
    if !(MIN_EPS..=MAX_EPS).contains(&eps) {
        return Err(Error::Parameter(format!(
            "eps_rel = {eps:e} must be in [{MIN_EPS:e}, {MAX_EPS:e}]"
        )));
    }
    Ok(())
}
