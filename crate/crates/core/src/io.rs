//! Text file formats, all in double precision.
//!
//! * curves: CSV with columns `alpha,x,y`, preceded by `# kind=closed` or
//!   `# kind=hperiodic` and optionally other `# key=value` lines;
//! * invariants, spacings and monitors: JSON;
//! * error tables: CSV with one row per sample size, empty cells for
//!   columns a study does not produce.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::SpacingState;
use crate::geometry::{CurveKind, PlanarCurveSamples};
use crate::invariants::ArclengthInvariants;
use crate::monitor::{Monitor, MonitorSpec};
use crate::resample::RefinedCurve;
use crate::scalar::Complex;
use crate::spectral::{FourierSeries, UniformGrid};
use crate::validation::{ErrorRow, ErrorTable};

fn parse_err(path: Option<&Path>, e: impl std::fmt::Display) -> Error {
    match path {
        Some(p) => Error::Parse(format!("{}: {e}", p.display())),
        None => Error::Parse(e.to_string()),
    }
}

fn with_path(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(with_path(path))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(with_path(dir))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(with_path(path))?))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let f = BufReader::new(open(path)?);
    serde_json::from_reader(f).map_err(|e| parse_err(Some(path), e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| parse_err(Some(path), e))?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

#[derive(Serialize, Deserialize)]
struct CurveRow {
    alpha: f64,
    x: f64,
    y: f64,
}

/// Parse a curve file from any reader.
pub fn parse_curve(reader: impl Read) -> Result<PlanarCurveSamples<f64>> {
    let mut reader = BufReader::new(reader);
    let mut kind = CurveKind::Closed;
    let mut body = String::new();
    let mut line = String::new();
    while reader.read_line(&mut line)? > 0 {
        match line.trim().strip_prefix('#') {
            Some(comment) => {
                if let Some(v) = comment.trim().strip_prefix("kind=") {
                    kind = v.trim().parse()?;
                }
            }
            None => body.push_str(&line),
        }
        line.clear();
    }
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(body.as_bytes());
    let headers = rdr.headers().map_err(|e| parse_err(None, e))?;
    if !["x", "y"].iter().all(|h| headers.iter().any(|c| c == *h)) {
        return Err(parse_err(
            None,
            format!("expected columns alpha,x,y, found {headers:?}"),
        ));
    }
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for row in rdr.deserialize::<CurveRow>() {
        let row = row.map_err(|e| parse_err(None, e))?;
        x.push(row.x);
        y.push(row.y);
    }
    PlanarCurveSamples::new(x, y, kind)
}

pub fn read_curve(path: &Path) -> Result<PlanarCurveSamples<f64>> {
    parse_curve(open(path)?).map_err(|e| match e {
        Error::Parse(m) => parse_err(Some(path), m),
        other => other,
    })
}

/// Write a curve with its grid parameter; `comments` become extra
/// `# key=value` header lines.
pub fn write_curve_to(mut w: impl Write, curve: &PlanarCurveSamples<f64>, comments: &[(String, String)]) -> Result<()> {
    writeln!(w, "# kind={}", curve.kind().label())?;
    for (k, v) in comments {
        writeln!(w, "# {k}={v}")?;
    }
    let mut wtr = csv::Writer::from_writer(w);
    let grid = curve.grid();
    for (j, (&x, &y)) in curve.x().iter().zip(curve.y()).enumerate() {
        wtr.serialize(CurveRow {
            alpha: grid.node(j),
            x,
            y,
        })
        .map_err(|e| parse_err(None, e))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_curve(path: &Path, curve: &PlanarCurveSamples<f64>, comments: &[(String, String)]) -> Result<()> {
    let mut w = create(path)?;
    write_curve_to(&mut w, curve, comments)?;
    w.flush()?;
    Ok(())
}

/// A refined curve is written as a curve file whose header records its
/// provenance.
pub fn write_refined(path: &Path, refined: &RefinedCurve<f64>) -> Result<()> {
    let p = &refined.provenance;
    let mut comments = Vec::new();
    if let Some(n1) = p.n1 {
        comments.push(("N1".to_string(), n1.to_string()));
    }
    comments.push(("N2".to_string(), p.n2.to_string()));
    comments.push(("N3".to_string(), p.n3.to_string()));
    if let Some(m) = &p.monitor {
        comments.push(("monitor".to_string(), m.clone()));
    }
    write_curve(path, &refined.to_curve()?, &comments)
}

/// On-disk form of [`ArclengthInvariants`]; coefficients are `[re, im]`
/// pairs for `k = -k_max ..= k_max - 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantsFile {
    #[serde(rename = "L")]
    pub length: f64,
    pub k_max: usize,
    pub theta0: f64,
    pub base_point: [f64; 2],
    pub slope_x: f64,
    pub slope_y: f64,
    pub cx: Vec<[f64; 2]>,
    pub cy: Vec<[f64; 2]>,
}

impl From<&ArclengthInvariants<f64>> for InvariantsFile {
    fn from(inv: &ArclengthInvariants<f64>) -> Self {
        let pairs = |s: &FourierSeries<f64>| s.coeffs().iter().map(|c| [c.re, c.im]).collect();
        Self {
            length: inv.length,
            k_max: inv.k_max,
            theta0: inv.theta0,
            base_point: inv.base_point,
            slope_x: inv.slope_x,
            slope_y: inv.slope_y,
            cx: pairs(&inv.cx),
            cy: pairs(&inv.cy),
        }
    }
}

impl TryFrom<InvariantsFile> for ArclengthInvariants<f64> {
    type Error = Error;

    fn try_from(f: InvariantsFile) -> Result<Self> {
        let series = |v: Vec<[f64; 2]>| -> Result<FourierSeries<f64>> {
            if v.len() != 2 * f.k_max {
                return Err(Error::Parse(format!(
                    "expected {} coefficients, found {}",
                    2 * f.k_max,
                    v.len()
                )));
            }
            FourierSeries::new(v.into_iter().map(|[re, im]| Complex::new(re, im)).collect())
        };
        if !(f.length > 0.0) {
            return Err(Error::Parse(format!("length {} must be positive", f.length)));
        }
        Ok(ArclengthInvariants {
            length: f.length,
            k_max: f.k_max,
            cx: series(f.cx)?,
            cy: series(f.cy)?,
            slope_x: f.slope_x,
            slope_y: f.slope_y,
            base_point: f.base_point,
            theta0: f.theta0,
        })
    }
}

pub fn read_invariants(path: &Path) -> Result<ArclengthInvariants<f64>> {
    read_json::<InvariantsFile>(path)?.try_into()
}

pub fn write_invariants(path: &Path, inv: &ArclengthInvariants<f64>) -> Result<()> {
    write_json(path, &InvariantsFile::from(inv))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacingFile {
    #[serde(rename = "N2")]
    pub n2: usize,
    pub t: f64,
    pub s_alpha: Vec<f64>,
}

pub fn read_spacing(path: &Path) -> Result<SpacingState<f64>> {
    let f: SpacingFile = read_json(path)?;
    if f.s_alpha.len() != f.n2 {
        return Err(parse_err(
            Some(path),
            format!("N2 = {} but {} values of s_alpha", f.n2, f.s_alpha.len()),
        ));
    }
    SpacingState::new(f.t, f.s_alpha)
}

pub fn write_spacing(path: &Path, state: &SpacingState<f64>) -> Result<()> {
    write_json(
        path,
        &SpacingFile {
            n2: state.len(),
            t: state.t,
            s_alpha: state.s_alpha.clone(),
        },
    )
}

/// Monitor file: a builtin name, a Gaussian superposition, or samples on a
/// uniform grid of `s' ∈ [0, 2π)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MonitorFile {
    Builtin { builtin: String },
    Gaussians(MonitorSpec<f64>),
    Samples { samples: Vec<f64> },
}

impl MonitorFile {
    pub fn into_monitor(self) -> Result<Monitor<f64>> {
        match self {
            MonitorFile::Builtin { builtin } => Monitor::builtin(&builtin),
            MonitorFile::Gaussians(spec) => {
                spec.validate()?;
                Ok(Monitor::Gaussians(spec))
            }
            MonitorFile::Samples { samples } => {
                UniformGrid::new(samples.len())?;
                Monitor::from_samples(&samples)
            }
        }
    }
}

pub fn read_monitor(path: &Path) -> Result<Monitor<f64>> {
    read_json::<MonitorFile>(path)?.into_monitor()
}

/// A builtin monitor name or a monitor file.
pub fn load_monitor(source: &str) -> Result<Monitor<f64>> {
    match Monitor::builtin(source) {
        Ok(m) => Ok(m),
        Err(_) if Path::new(source).exists() => read_monitor(Path::new(source)),
        Err(e) => Err(e),
    }
}

pub fn write_error_table_to(w: impl Write, table: &ErrorTable) -> Result<()> {
    let mut w = w;
    writeln!(w, "# study={}", table.study)?;
    let mut wtr = csv::Writer::from_writer(w);
    for row in &table.rows {
        wtr.serialize(row).map_err(|e| parse_err(None, e))?;
    }
    if table.rows.is_empty() {
        wtr.write_record(["n", "dt", "err_arc_linf", "err_ref_l2", "err_ref_linf", "residual"])
            .map_err(|e| parse_err(None, e))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_error_table(path: &Path, table: &ErrorTable) -> Result<()> {
    let mut w = create(path)?;
    write_error_table_to(&mut w, table)?;
    w.flush()?;
    Ok(())
}

pub fn read_error_table(path: &Path) -> Result<ErrorTable> {
    let text = std::fs::read_to_string(path)?;
    let mut study = String::new();
    let mut body = String::new();
    for line in text.lines() {
        match line.trim().strip_prefix('#') {
            Some(c) => {
                if let Some(v) = c.trim().strip_prefix("study=") {
                    study = v.to_string();
                }
            }
            None => {
                body.push_str(line);
                body.push('\n');
            }
        }
    }
    let mut rdr = csv::Reader::from_reader(body.as_bytes());
    let rows = rdr
        .deserialize::<ErrorRow>()
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| parse_err(Some(path), e))?;
    ErrorTable::new(study, rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariants::{extract, ExtractOptions};
    use crate::validation::ExampleCurve;

    #[test]
    fn curve_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        let c = ExampleCurve::peakons(0.1).unwrap().sample(32).unwrap();
        write_curve(&p, &c, &[("note".into(), "x".into())]).unwrap();
        let back = read_curve(&p).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn curve_without_kind_defaults_to_closed() {
        let text = "alpha,x,y\n0,1,0\n1.5707963267948966,0,1\n3.141592653589793,-1,0\n4.71238898038469,0,-1\n";
        let c = parse_curve(text.as_bytes()).unwrap();
        assert_eq!(c.kind(), CurveKind::Closed);
        assert_eq!(c.len(), 4);
        assert!(parse_curve("alpha,x,y\n0,1\n".as_bytes()).is_err());
        assert!(parse_curve("# kind=spiral\nalpha,x,y\n".as_bytes()).is_err());
    }

    #[test]
    fn invariants_and_spacing_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let c = ExampleCurve::droplet(0.4).unwrap().sample(64).unwrap();
        let inv = extract(&c, &ExtractOptions::for_curve(64, CurveKind::Closed, 1e-14)).unwrap();
        let p = dir.path().join("inv.json");
        write_invariants(&p, &inv).unwrap();
        assert_eq!(read_invariants(&p).unwrap(), inv);

        let s = SpacingState::new(1.0, vec![0.5, 1.5, 1.25, 0.75]).unwrap();
        let q = dir.path().join("sub/s.json");
        write_spacing(&q, &s).unwrap();
        assert_eq!(read_spacing(&q).unwrap(), s);
    }

    #[test]
    fn monitor_files() {
        let parse = |s: &str| serde_json::from_str::<MonitorFile>(s).unwrap().into_monitor();
        assert_eq!(parse(r#"{"builtin": "phi1"}"#).unwrap(), Monitor::phi1());
        let g = parse(r#"{"constant": 1.0, "gaussians": [{"amplitude": 2.0, "center": 1.0, "width": 3.0}]}"#).unwrap();
        assert!((g.eval(1.0) - 3.0).abs() < 1e-12);
        assert!(parse(r#"{"samples": [1.0, 2.0, 1.0, 0.5]}"#).is_ok());
        assert!(parse(r#"{"constant": 1.0, "gaussians": [{"amplitude": 2.0, "center": 7.0, "width": 3.0}]}"#).is_err());
        assert!(load_monitor("phi2").is_ok());
        assert!(load_monitor("/nonexistent/monitor.json").is_err());
    }

    #[test]
    fn error_table_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let t = ErrorTable::new(
            "refinement",
            vec![ErrorRow {
                n: Some(256),
                err_arc_linf: Some(1.5e-3),
                err_ref_l2: Some(2.25e-9),
                ..Default::default()
            }],
        )
        .unwrap();
        let p = dir.path().join("t.csv");
        write_error_table(&p, &t).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("# study=refinement\nn,dt,err_arc_linf"));
        assert_eq!(read_error_table(&p).unwrap(), t);
    }
}
