//! `equiparam`: command-line driver for the three-step reparametrization.

mod config;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use serde::Serialize;

use equiparam::evolution::{equidistribution_residual, evolve, EvolveOptions};
use equiparam::geometry::{compute_geometry, PlanarCurveSamples};
use equiparam::invariants::{extract, ArclengthInvariants, ExtractOptions};
use equiparam::io;
use equiparam::monitor::normalize;
use equiparam::resample::refine;
use equiparam::validation::{
    compare_invariants, default_dense_n, run_study, ExampleCurve, RefinementStudy, Rk4Study, Step1Study, Study,
    StudyKind,
};
use equiparam::{Error, Result};

use config::{step1_sizes, validate_dt, validate_eps, CurveSource, PipelineConfig, Sizes};

#[derive(Parser)]
#[command(
    name = "equiparam",
    version,
    about = "Equidistributing reparametrization of periodic planar curves"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Step 1: arclength invariants of a sampled curve.
    Extract(ExtractArgs),
    /// Step 2: evolve the local spacing for a monitor.
    Evolve(EvolveArgs),
    /// Step 3: evaluate invariants at the targets of an evolved spacing.
    Resample(ResampleArgs),
    /// Compare two sets of invariants (or invariants and a curve file).
    Validate(ValidateArgs),
    /// Run all three steps from a configuration file.
    Pipeline(PipelineArgs),
    /// Convergence study producing an error table.
    Study(StudyArgs),
    /// Write a builtin example curve and its invariants.
    Demo(DemoArgs),
}

#[derive(Args)]
struct ExtractArgs {
    /// Input curve file.
    #[arg(long, conflicts_with = "demo", required_unless_present = "demo")]
    input: Option<PathBuf>,
    /// Builtin example (circle, droplet, peakons) sampled at --n1 points.
    #[arg(long)]
    demo: Option<String>,
    /// Parameter of the builtin example (droplet ε_P, peakon ε_R).
    #[arg(long)]
    param: Option<f64>,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    nup: Option<usize>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long, default_value_t = 1e-15)]
    eps: f64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct EvolveArgs {
    /// Invariants of the curve; used to report physical node spacings.
    #[arg(long)]
    inv: Option<PathBuf>,
    /// Builtin monitor (phi0, phi1, phi2, uniform) or monitor file.
    #[arg(long)]
    monitor: String,
    #[arg(long)]
    n2: usize,
    #[arg(long)]
    dt: f64,
    #[arg(long, default_value_t = 1e-15)]
    eps: f64,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct ResampleArgs {
    #[arg(long)]
    inv: PathBuf,
    #[arg(long)]
    spacing: PathBuf,
    #[arg(long)]
    n3: usize,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args)]
struct ValidateArgs {
    /// Reference invariants.
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Invariants file (.json) or curve file, which is re-extracted.
    #[arg(long)]
    test: PathBuf,
    /// Points of the uniform grid for the L∞ comparison (default 4·k_max).
    #[arg(long)]
    dense: Option<usize>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    n1: Option<usize>,
    #[arg(long)]
    nup: Option<usize>,
    #[arg(long)]
    kmax: Option<usize>,
    #[arg(long)]
    n2: Option<usize>,
    #[arg(long)]
    n3: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    monitor: Option<String>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct StudyArgs {
    /// step1 | rk4 | refinement
    kind: String,
    /// Example curve (step1, refinement).
    #[arg(long)]
    example: Option<String>,
    #[arg(long)]
    param: Option<f64>,
    /// Comma-separated N1 sweep (step1).
    #[arg(long, value_delimiter = ',')]
    n1: Vec<usize>,
    /// Comma-separated N3 sweep (refinement).
    #[arg(long, value_delimiter = ',')]
    n3: Vec<usize>,
    /// Comma-separated time-step sweep (rk4), or the single step (refinement).
    #[arg(long, value_delimiter = ',')]
    dt: Vec<f64>,
    #[arg(long)]
    monitor: Option<String>,
    #[arg(long)]
    n2: Option<usize>,
    /// Reference N1 and N_up (refinement).
    #[arg(long)]
    nref: Option<usize>,
    #[arg(long)]
    nup_ref: Option<usize>,
    /// N_up for re-extracting refined curves (refinement).
    #[arg(long)]
    nup_refined: Option<usize>,
    #[arg(long, default_value_t = 1e-15)]
    eps: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DemoArgs {
    /// circle, droplet or peakons
    name: String,
    #[arg(long)]
    param: Option<f64>,
    #[arg(long, default_value_t = 64)]
    n: usize,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

fn exit_code(e: &Error) -> u8 {
    match e.category() {
        "parameter" => 2,
        "numerical" => 3,
        "io" => 4,
        _ => 5,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Extract(a) => cmd_extract(a),
        Command::Evolve(a) => cmd_evolve(a),
        Command::Resample(a) => cmd_resample(a),
        Command::Validate(a) => cmd_validate(a),
        Command::Pipeline(a) => cmd_pipeline(a),
        Command::Study(a) => cmd_study(a),
        Command::Demo(a) => cmd_demo(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error[{}]: {}", e.category(), e.to_string().replace('\n', " "));
            ExitCode::from(exit_code(&e))
        }
    }
}

fn example_curve(name: &str, param: Option<f64>) -> Result<ExampleCurve<f64>> {
    ExampleCurve::from_name(name, param)
}

fn extract_options(sizes: &Sizes, eps: f64) -> ExtractOptions<f64> {
    ExtractOptions::new(sizes.n_up, sizes.k_max, eps)
}

fn cmd_extract(a: ExtractArgs) -> Result<()> {
    validate_eps(a.eps)?;
    let curve = match (&a.input, &a.demo) {
        (Some(path), _) => io::read_curve(path)?,
        (None, Some(name)) => example_curve(name, a.param)?.sample(a.n1.unwrap_or(256))?,
        (None, None) => unreachable!("clap requires one source"),
    };
    if let Some(n1) = a.n1.filter(|&n| n != curve.len()) {
        return Err(Error::Parameter(format!(
            "n1 = {n1} but the input curve has {} samples",
            curve.len()
        )));
    }
    let (n_up, k_max) = step1_sizes(curve.len(), a.nup, a.kmax, curve.kind());
    let sizes = Sizes {
        n1: curve.len(),
        n_up,
        k_max,
        n2: 2,
        n3: 2,
    };
    sizes.validate()?;
    let inv = extract(&curve, &extract_options(&sizes, a.eps))?;
    io::write_invariants(&a.output, &inv)?;
    println!(
        "extract: N1 = {}, N_up = {}, k_max = {}, L = {:.15}",
        sizes.n1, sizes.n_up, sizes.k_max, inv.length
    );
    Ok(())
}

fn cmd_evolve(a: EvolveArgs) -> Result<()> {
    validate_dt(a.dt)?;
    validate_eps(a.eps)?;
    let monitor = io::load_monitor(&a.monitor)?;
    let phi = normalize(&monitor, a.n2)?;
    let run = evolve(&phi, &EvolveOptions::new(a.n2, a.dt, a.eps))?;
    io::write_spacing(&a.output, &run.state)?;
    let residual = equidistribution_residual(&run.state, &phi)?;
    println!(
        "evolve: {} steps, residual = {residual:.3e}, mean drift = {:.3e}, min s_alpha = {:.6e}",
        run.steps, run.max_mean_drift, run.min_s_alpha
    );
    if let Some(path) = &a.inv {
        let inv = io::read_invariants(path)?;
        let unit = inv.length / a.n2 as f64;
        let (lo, hi) = run
            .state
            .s_alpha
            .iter()
            .fold((f64::INFINITY, 0.0_f64), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        println!(
            "evolve: physical node spacing in [{:.6e}, {:.6e}] (L = {})",
            lo * unit,
            hi * unit,
            inv.length
        );
    }
    Ok(())
}

fn cmd_resample(a: ResampleArgs) -> Result<()> {
    let inv = io::read_invariants(&a.inv)?;
    let spacing = io::read_spacing(&a.spacing)?;
    let refined = refine(&inv, &spacing, a.n3, 1e-15)?;
    io::write_refined(&a.output, &refined)?;
    println!("resample: N2 = {}, N3 = {}", spacing.len(), a.n3);
    Ok(())
}

#[derive(Serialize)]
struct ValidationReport {
    l2_rel: f64,
    linf_rel: f64,
    dense_n: usize,
    length_ref: f64,
    length_test: f64,
}

fn load_test_invariants(path: &Path, reference: &ArclengthInvariants<f64>) -> Result<ArclengthInvariants<f64>> {
    let is_curve = path.extension().is_some_and(|e| e == "csv");
    if !is_curve {
        return io::read_invariants(path);
    }
    let curve = io::read_curve(path)?;
    let n_up = (2 * curve.len()).max(2 * reference.k_max);
    extract(&curve, &ExtractOptions::new(n_up, reference.k_max, 1e-15))
}

fn cmd_validate(a: ValidateArgs) -> Result<()> {
    let reference = io::read_invariants(&a.reference)?;
    let test = load_test_invariants(&a.test, &reference)?;
    let dense_n = a.dense.unwrap_or_else(|| default_dense_n(&reference, &test));
    let (l2_rel, linf_rel) = compare_invariants(&reference, &test, dense_n)?;
    let report = ValidationReport {
        l2_rel,
        linf_rel,
        dense_n,
        length_ref: reference.length,
        length_test: test.length,
    };
    println!("validate: l2_rel = {l2_rel:.3e}, linf_rel = {linf_rel:.3e}");
    if let Some(out) = &a.output {
        io::write_json(out, &report)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct PipelineReport {
    n1: usize,
    n_up: usize,
    k_max: usize,
    n2: usize,
    n3: usize,
    dt: f64,
    eps_rel: f64,
    monitor: String,
    length: f64,
    kappa_max: f64,
    steps: usize,
    residual: f64,
    max_mean_drift: f64,
    min_s_alpha: f64,
    min_node_spacing_input: f64,
    min_node_spacing_refined: f64,
}

fn min_node_spacing(curve: &PlanarCurveSamples<f64>) -> f64 {
    let (x, y) = (curve.x(), curve.y());
    let n = x.len();
    let shift = curve.kind().x_period_shift::<f64>();
    (0..n)
        .map(|j| {
            let (i, dx) = if j + 1 == n { (0, shift) } else { (j + 1, 0.0) };
            (x[i] + dx - x[j]).hypot(y[i] - y[j])
        })
        .fold(f64::INFINITY, f64::min)
}

fn cmd_pipeline(a: PipelineArgs) -> Result<()> {
    let mut cfg = PipelineConfig::load(&a.config)?;
    cfg.n1 = a.n1.or(cfg.n1);
    cfg.n_up = a.nup.or(cfg.n_up);
    cfg.k_max = a.kmax.or(cfg.k_max);
    cfg.n2 = a.n2.unwrap_or(cfg.n2);
    cfg.n3 = a.n3.or(cfg.n3);
    cfg.dt = a.dt.unwrap_or(cfg.dt);
    cfg.eps_rel = a.eps.unwrap_or(cfg.eps_rel);
    cfg.monitor = a.monitor.unwrap_or(cfg.monitor);
    cfg.out_dir = a.out_dir.unwrap_or(cfg.out_dir);
    run_pipeline(&cfg)
}

fn run_pipeline(cfg: &PipelineConfig) -> Result<()> {
    let curve = match &cfg.curve {
        CurveSource::File { file } => io::read_curve(file)?,
        CurveSource::Example { example, param } => {
            let n1 = cfg
                .n1
                .ok_or_else(|| Error::Parameter("n1 is required for a builtin curve".into()))?;
            example_curve(example, *param)?.sample(n1)?
        }
    };
    let sizes = cfg.resolve(curve.len(), curve.kind())?;
    let eps = cfg.eps_rel;
    let monitor = io::load_monitor(&cfg.monitor)?;

    info!(
        "step 1: N1 = {}, N_up = {}, k_max = {}",
        sizes.n1, sizes.n_up, sizes.k_max
    );
    let geometry = compute_geometry(&curve)?;
    let inv = extract(&curve, &extract_options(&sizes, eps))?;
    info!("step 2: N2 = {}, dt = {}", sizes.n2, cfg.dt);
    let phi = normalize(&monitor, sizes.n2)?;
    let run = evolve(&phi, &EvolveOptions::new(sizes.n2, cfg.dt, eps))?;
    info!("step 3: N3 = {}", sizes.n3);
    let refined = refine(&inv, &run.state, sizes.n3, eps)?.with_source(Some(sizes.n1), Some(cfg.monitor.clone()));

    let dir = &cfg.out_dir;
    io::write_invariants(&dir.join("invariants.json"), &inv)?;
    io::write_spacing(&dir.join("spacing.json"), &run.state)?;
    io::write_refined(&dir.join("refined.csv"), &refined)?;
    let report = PipelineReport {
        n1: sizes.n1,
        n_up: sizes.n_up,
        k_max: sizes.k_max,
        n2: sizes.n2,
        n3: sizes.n3,
        dt: cfg.dt,
        eps_rel: eps,
        monitor: cfg.monitor.clone(),
        length: inv.length,
        kappa_max: geometry.kappa_max(),
        steps: run.steps,
        residual: equidistribution_residual(&run.state, &phi)?,
        max_mean_drift: run.max_mean_drift,
        min_s_alpha: run.min_s_alpha,
        min_node_spacing_input: min_node_spacing(&curve.decimate_to(sizes.n3)?),
        min_node_spacing_refined: min_node_spacing(&refined.to_curve()?),
    };
    io::write_json(&dir.join("report.json"), &report)?;
    println!(
        "pipeline: L = {:.15}, residual = {:.3e}, mean drift = {:.3e}, min s_alpha = {:.6e}; wrote {}",
        report.length,
        report.residual,
        report.max_mean_drift,
        report.min_s_alpha,
        dir.display()
    );
    Ok(())
}

/// Sampling helper: the input curve at `n` points, decimated when it is a
/// multiple of `n` and kept as is otherwise.
trait DecimateTo: Sized {
    fn decimate_to(&self, n: usize) -> Result<Self>;
}

impl DecimateTo for PlanarCurveSamples<f64> {
    fn decimate_to(&self, n: usize) -> Result<Self> {
        if self.len() > n && self.len().is_multiple_of(n) {
            self.decimate(self.len() / n)
        } else {
            Ok(self.clone())
        }
    }
}

fn cmd_study(a: StudyArgs) -> Result<()> {
    let kind: StudyKind = a.kind.parse()?;
    validate_eps(a.eps)?;
    let study = match kind {
        StudyKind::Step1Convergence => {
            let mut s = Step1Study::preset();
            if let Some(name) = &a.example {
                s.example = match name.as_str() {
                    "droplet" => ExampleCurve::droplet(a.param.unwrap_or(2.0 / 7.0))?,
                    other => example_curve(other, a.param)?,
                };
            }
            if !a.n1.is_empty() {
                s.sweep = a.n1.clone();
            }
            s.eps = a.eps;
            Study::Step1(s)
        }
        StudyKind::Rk4Convergence => {
            let mut s = Rk4Study::preset();
            if let Some(m) = &a.monitor {
                s.monitor = io::load_monitor(m)?;
            }
            s.n2 = a.n2.unwrap_or(s.n2);
            if !a.dt.is_empty() {
                for &dt in &a.dt {
                    validate_dt(dt)?;
                }
                s.sweep = a.dt.clone();
            }
            s.eps = a.eps;
            Study::Rk4(s)
        }
        StudyKind::Refinement => {
            let name = a.example.as_deref().unwrap_or("droplet");
            let mut s = RefinementStudy::preset(name)?;
            if a.param.is_some() {
                s.example = example_curve(name, a.param)?;
            }
            if let Some(m) = &a.monitor {
                s.monitor = io::load_monitor(m)?;
                s.monitor_name = m.clone();
            }
            if !a.n3.is_empty() {
                s.sweep = a.n3.clone();
            }
            match a.dt.as_slice() {
                [] => {}
                [dt] => {
                    validate_dt(*dt)?;
                    s.dt = *dt;
                }
                _ => return Err(Error::Parameter("refinement takes a single --dt".into())),
            }
            s.n2 = a.n2.unwrap_or(s.n2);
            s.n_ref = a.nref.unwrap_or(s.n_ref);
            s.nup_ref = a.nup_ref.unwrap_or(s.nup_ref);
            s.nup_refined = a.nup_refined.unwrap_or(s.nup_refined);
            s.eps = a.eps;
            let sizes = Sizes {
                n1: s.n_ref,
                n_up: s.nup_ref,
                k_max: s.n_ref / 2,
                n2: s.n2,
                n3: s.n2,
            };
            sizes.validate()?;
            Study::Refinement(s)
        }
    };
    let table = run_study(&study)?;
    match &a.output {
        Some(path) => io::write_error_table(path, &table)?,
        None => io::write_error_table_to(std::io::stdout().lock(), &table)?,
    }
    Ok(())
}

fn cmd_demo(a: DemoArgs) -> Result<()> {
    let example = example_curve(&a.name, a.param)?;
    let curve = example.sample(a.n)?;
    let dir = &a.out_dir;
    let stem = example.name();
    let curve_path = dir.join(format!("{stem}.csv"));
    io::write_curve(&curve_path, &curve, &[])?;
    let inv = extract(&curve, &ExtractOptions::for_curve(a.n, curve.kind(), 1e-15))?;
    io::write_invariants(&dir.join(format!("{stem}_invariants.json")), &inv)?;
    println!(
        "demo: wrote {} ({} points, L = {:.15})",
        curve_path.display(),
        a.n,
        inv.length
    );

    // The uniform monitor leaves the spacing unchanged, so the full pipeline
    // must reproduce the uniformly sampled arclength parametrization.
    let phi = normalize(&equiparam::monitor::Monitor::uniform(), a.n)?;
    let run = evolve(&phi, &EvolveOptions::new(a.n, 0.25, 1e-15))?;
    let refined = refine(&inv, &run.state, a.n, 1e-15)?;
    let direct = inv.sample_uniform(a.n)?;
    let scale = direct.iter().fold(0.0_f64, |m, p| m.max(p[0].abs()).max(p[1].abs()));
    let dev = direct.iter().enumerate().fold(0.0_f64, |m, (j, p)| {
        m.max((p[0] - refined.x[j]).hypot(p[1] - refined.y[j]))
    }) / scale;
    let verdict = if dev < 1e-12 { "PASS" } else { "FAIL" };
    println!("demo: identity pipeline deviation = {dev:.3e} {verdict}");
    if verdict == "FAIL" {
        return Err(Error::Resolution(format!("identity pipeline deviates by {dev:.3e}")));
    }
    Ok(())
}
