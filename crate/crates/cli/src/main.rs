//! `lame`: command-line driver for the Navier-Lame spectral toolkit.
//!
//! Structured results go to standard output (or `--out`) as JSON, sweeps as
//! CSV, plots as SVG. Failures print `{stage, message, hint}` JSON on
//! standard error and exit with 1 (invalid input) or 2 (numerical failure).
//!
//! Environment: `LAME_THREADS` caps the worker threads; `LAME_OUTPUT_DIR`
//! is the base directory for relative output paths.

mod args;
mod svg;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use lame_spectrum::kernel::{isoperimetric_audit, HeatTraceCoefficients, DEFAULT_BALL_TOL};
use lame_spectrum::oracles::{disk_dirichlet_spectrum, disk_m_max_for, interval_spectrum_1d, weyl_count_audit};
use lame_spectrum::spectrum::{Provenance, Spectrum};
use lame_spectrum::trace::{
    end_to_end_recover, fit_asymptotics, fit_curve, sample_window, select_window, RecoverOptions, WindowOptions,
    DEFAULT_SAMPLES, DEFAULT_TRUNCATION_TOL, DEFAULT_WINDOW_RATIO,
};
use lame_spectrum::{fem, io, mesh, symbol, BoundaryCondition, Domain, Error, GeometricData, LameParameters};

#[derive(Parser)]
#[command(name = "lame", version, about = "Spectra, heat traces and geometry recovery for the Navier-Lame operator")]
#[command(arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Copy)]
struct Material {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    tau: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    mu: f64,
}

impl Material {
    fn params(self) -> lame_spectrum::Result<LameParameters> {
        LameParameters::new(self.tau, self.mu)
    }
}

#[derive(clap::Args, Clone, Copy)]
struct FitArgs {
    /// Truncation tolerance defining the start of the fit window.
    #[arg(long, default_value_t = DEFAULT_TRUNCATION_TOL)]
    tol: f64,
    /// Window width `t_max / t_min` (before the `1/lambda_10` cap).
    #[arg(long, default_value_t = DEFAULT_WINDOW_RATIO)]
    window_ratio: f64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
}

impl FitArgs {
    fn options(self, ball_tol: f64) -> lame_spectrum::Result<RecoverOptions> {
        if !(self.tol > 0.0) || !(ball_tol > 0.0) {
            return Err(Error::InvalidInput("tolerances must be > 0".into()));
        }
        Ok(RecoverOptions {
            window: WindowOptions {
                tol: self.tol,
                ratio: self.window_ratio,
            },
            n_samples: self.samples,
            ball_tol,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Randomized closed-form vs dense checks of the symbol calculus.
    SymbolCheck {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        draws: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Heat-trace coefficient densities, optionally the two-term trace.
    Coeffs {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        material: Material,
        #[arg(long, default_value = "dirichlet")]
        bc: BoundaryCondition,
        /// Volume and boundary measure for the two-term trace.
        #[arg(long, requires = "boundary")]
        volume: Option<f64>,
        #[arg(long, requires = "volume")]
        boundary: Option<f64>,
        #[arg(long, requires = "volume")]
        t: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Triangulate a planar domain.
    Mesh {
        /// disk:R, square:L, rect:LX,LY, ellipse:A,B or polygon:x,y;x,y;...
        #[arg(long)]
        domain: String,
        #[arg(long)]
        h: f64,
        /// Plain-text mesh instead of JSON.
        #[arg(long)]
        text: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lowest eigenvalues by P1 finite elements.
    Eigs {
        #[arg(long)]
        domain: String,
        #[command(flatten)]
        material: Material,
        #[arg(long, default_value = "dirichlet")]
        bc: BoundaryCondition,
        #[arg(long)]
        k: usize,
        /// 1 for a single mesh, at least 3 for Richardson extrapolation.
        #[arg(long, default_value_t = 1)]
        levels: usize,
        /// Target edge length of the (coarsest) mesh.
        #[arg(long, default_value_t = 0.1)]
        h: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact interval spectrum.
    OracleInterval {
        #[arg(long)]
        length: f64,
        #[command(flatten)]
        material: Material,
        #[arg(long, default_value = "dirichlet")]
        bc: BoundaryCondition,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Clamped-disk spectrum from the Bessel determinant.
    OracleDisk {
        #[arg(long = "R", alias = "radius", default_value_t = 1.0)]
        radius: f64,
        #[command(flatten)]
        material: Material,
        #[arg(long)]
        lambda_max: f64,
        /// Highest angular index; defaults to the smallest complete value.
        #[arg(long)]
        m_max: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit the two-term heat-trace model to a spectrum.
    TraceFit {
        #[arg(long)]
        spectrum: PathBuf,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recover volume and boundary measure, with the ball audit.
    Recover {
        #[arg(long)]
        spectrum: PathBuf,
        /// Domain document with the true geometry.
        #[arg(long)]
        truth: Option<PathBuf>,
        /// Write an SVG of the fit.
        #[arg(long)]
        plot: Option<PathBuf>,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long, default_value_t = DEFAULT_BALL_TOL)]
        ball_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Counting function against the Weyl prediction, as CSV.
    Weyl {
        #[arg(long)]
        spectrum: PathBuf,
        #[arg(long)]
        truth: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Isoperimetric verdict: can this spectrum belong to a ball?
    AuditBall {
        #[arg(long)]
        spectrum: PathBuf,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long, default_value_t = DEFAULT_BALL_TOL)]
        ball_tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure with the pipeline stage it happened in.
struct Failure {
    stage: String,
    error: Error,
    io: Option<String>,
}

impl Failure {
    fn new(stage: &str, error: Error) -> Self {
        Self {
            stage: stage.to_string(),
            error,
            io: None,
        }
    }

    fn io(stage: &str, path: &Path, e: std::io::Error) -> Self {
        Self {
            stage: stage.to_string(),
            error: Error::InvalidInput(format!("{}: {e}", path.display())),
            io: Some(path.display().to_string()),
        }
    }

    fn exit_code(&self) -> u8 {
        match self.error.root() {
            Error::NonConvergence(_)
            | Error::Factorization { .. }
            | Error::SingularMatrix { .. }
            | Error::RankDeficientFit(_)
            | Error::InconsistentFit(_)
            | Error::IncompleteSpectrum(_) => 2,
            _ => 1,
        }
    }

    fn report(&self) -> ErrorReport {
        let stage = match &self.error {
            Error::Stage { stage, .. } => format!("{}/{stage}", self.stage),
            _ => self.stage.clone(),
        };
        ErrorReport {
            stage,
            message: self.error.to_string(),
            hint: hint(self.error.root(), self.io.is_some()).to_string(),
        }
    }
}

#[derive(Serialize)]
struct ErrorReport {
    stage: String,
    message: String,
    hint: String,
}

fn hint(e: &Error, io: bool) -> &'static str {
    if io {
        return "check that the file exists and is readable/writable";
    }
    match e {
        Error::InvalidParameters(_) => "use tau > 0 and tau + mu > 0",
        Error::EmptyWindow(_) => "supply more eigenvalues or raise --tol",
        Error::EmptyInterior => "use a smaller --h so interior nodes remain",
        Error::Format(_) => "inputs must be JSON documents with \"schema_version\": 1",
        Error::Consistency(_) => "make the spectrum metadata agree with the requested run",
        Error::IncompleteSpectrum(_) => "raise --m-max or lower --lambda-max",
        Error::NonConvergence(_) | Error::Factorization { .. } => "change the mesh size or the number of eigenvalues",
        Error::RankDeficientFit(_) => "widen the fit window with --window-ratio or add eigenvalues",
        Error::InconsistentFit(_) => "the spectrum does not follow the two-term model in the window; check bc and parameters",
        Error::Mesh(_) | Error::DegenerateDomain(_) => "check the domain specification",
        _ => "see --help for the expected arguments",
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

trait Stage<T> {
    fn stage(self, stage: &str) -> Outcome<T>;
}

impl<T> Stage<T> for lame_spectrum::Result<T> {
    fn stage(self, stage: &str) -> Outcome<T> {
        self.map_err(|e| Failure::new(stage, e))
    }
}

fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os("LAME_OUTPUT_DIR") {
        Some(dir) if path.is_relative() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Outcome<()> {
    match out {
        None => {
            print!("{text}");
            Ok(())
        }
        Some(p) => write_file(p, text),
    }
}

fn write_file(path: &Path, text: &str) -> Outcome<()> {
    let path = resolve(path);
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::io("output", dir, e))?;
    }
    std::fs::write(&path, text).map_err(|e| Failure::io("output", &path, e))
}

fn read_file(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::io("input", path, e))
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn load_spectrum(path: &Path) -> Outcome<Spectrum> {
    io::spectrum_from_json(&read_file(path)?).stage("input")
}

fn load_truth(path: &Option<PathBuf>) -> Outcome<Option<Domain>> {
    path.as_ref()
        .map(|p| io::domain_from_json(&read_file(p)?).stage("truth"))
        .transpose()
}

fn planar(spec: &str) -> Outcome<lame_spectrum::Domain2D> {
    match args::parse_domain(spec).stage("domain")? {
        Domain::Planar(d) => Ok(d),
        Domain::Interval { .. } => Err(Failure::new(
            "domain",
            Error::InvalidInput("finite elements need a planar domain; use oracle-interval for intervals".into()),
        )),
    }
}

#[derive(Serialize)]
struct CoeffsReport {
    #[serde(flatten)]
    coefficients: HeatTraceCoefficients,
    #[serde(skip_serializing_if = "Option::is_none")]
    trace: Option<f64>,
}

#[derive(Serialize)]
struct TraceFitReport {
    schema_version: u64,
    fit: lame_spectrum::FitResult,
    samples: Vec<lame_spectrum::TraceSample>,
}

#[derive(Serialize)]
struct BallVerdict {
    schema_version: u64,
    ratio: f64,
    ratio_uncertainty: f64,
    ball_ratio: f64,
    tol: f64,
    is_ball: bool,
    verdict: String,
    warnings: Vec<String>,
}

fn run(cli: Cli) -> Outcome<()> {
    match cli.command {
        Command::SymbolCheck { n, draws, seed, out } => {
            let report = symbol::symbol_check(n, draws, seed).stage("symbol-check")?;
            emit(&out, &json(&report))?;
            if !report.pass {
                return Err(Failure::new(
                    "symbol-check",
                    Error::NonConvergence(format!(
                        "symbol identities failed: max_rel_err = {:e}",
                        report.max_rel_err
                    )),
                ));
            }
            Ok(())
        }
        Command::Coeffs {
            n,
            material,
            bc,
            volume,
            boundary,
            t,
            out,
        } => {
            if n == 0 {
                return Err(Failure::new("coeffs", Error::InvalidInput("n must be >= 1".into())));
            }
            let params = material.params().stage("coeffs")?;
            let coefficients = HeatTraceCoefficients::new(params, n, bc);
            let trace = match (volume, boundary, t) {
                (Some(v), Some(b), Some(t)) => {
                    let geom = GeometricData::new(n, v, b).stage("coeffs")?;
                    Some(lame_spectrum::kernel::theoretical_trace(params, n, &geom, bc, t).stage("coeffs")?)
                }
                _ => None,
            };
            emit(&out, &json(&CoeffsReport { coefficients, trace }))
        }
        Command::Mesh { domain, h, text, out } => {
            let d = planar(&domain)?;
            let m = mesh::generate_mesh(&d, h).stage("mesh")?;
            let report = m.validate().stage("mesh")?;
            eprintln!("{}", serde_json::to_string(&report).expect("report serializes"));
            emit(&out, &if text { m.to_text() } else { io::mesh_to_json(&m) })
        }
        Command::Eigs {
            domain,
            material,
            bc,
            k,
            levels,
            h,
            out,
        } => {
            let d = planar(&domain)?;
            let params = material.params().stage("eigs")?;
            if k == 0 {
                return Err(Failure::new("eigs", Error::InvalidInput("k must be >= 1".into())));
            }
            let spectrum = match levels {
                1 => {
                    let m = mesh::generate_mesh(&d, h).stage("mesh")?;
                    fem::fem_spectrum(&m, params, bc, k).stage("eigs")?
                }
                2 => {
                    return Err(Failure::new(
                        "eigs",
                        Error::InvalidInput("--levels must be 1 or at least 3".into()),
                    ))
                }
                _ => {
                    let study = fem::convergence_study(&d, params, bc, k, levels, h).stage("eigs")?;
                    for w in &study.warnings {
                        eprintln!("warning: {w}");
                    }
                    study.extrapolated
                }
            };
            emit(&out, &io::spectrum_to_json(&spectrum))
        }
        Command::OracleInterval {
            length,
            material,
            bc,
            k,
            out,
        } => {
            let params = material.params().stage("oracle-interval")?;
            let s = interval_spectrum_1d(params, length, bc, k).stage("oracle-interval")?;
            emit(&out, &io::spectrum_to_json(&s))
        }
        Command::OracleDisk {
            radius,
            material,
            lambda_max,
            m_max,
            out,
        } => {
            let params = material.params().stage("oracle-disk")?;
            if !(radius > 0.0) {
                return Err(Failure::new("oracle-disk", Error::InvalidInput("R must be > 0".into())));
            }
            let m_max = m_max.unwrap_or_else(|| disk_m_max_for(params, radius, lambda_max));
            let s = disk_dirichlet_spectrum(params, radius, m_max, lambda_max).stage("oracle-disk")?;
            emit(&out, &io::spectrum_to_json(&s))
        }
        Command::TraceFit { spectrum, fit, out } => {
            let s = load_spectrum(&spectrum)?;
            let opts = fit.options(DEFAULT_BALL_TOL).stage("trace-fit")?;
            let window = select_window(&s, &opts.window).stage("window")?;
            let samples = sample_window(&s, window, opts.n_samples).stage("sampling")?;
            let fit = fit_asymptotics(&samples, s.dim).stage("fit")?;
            emit(
                &out,
                &json(&TraceFitReport {
                    schema_version: io::SCHEMA_VERSION,
                    fit,
                    samples,
                }),
            )
        }
        Command::Recover {
            spectrum,
            truth,
            plot,
            fit,
            ball_tol,
            out,
        } => {
            let mut s = load_spectrum(&spectrum)?;
            if let Some(t) = load_truth(&truth)? {
                if t.dim() != s.dim {
                    return Err(Failure::new(
                        "truth",
                        Error::Consistency(format!("truth is {}-dimensional, spectrum {}", t.dim(), s.dim)),
                    ));
                }
                s.domain_meta = Some(t);
            }
            let opts = fit.options(ball_tol).stage("recover")?;
            let r = end_to_end_recover(&s, s.params, s.dim, s.bc, &opts).stage("recover")?;
            if let Some(p) = plot {
                let samples = sample_window(&s, r.fit.window, opts.n_samples).stage("plot")?;
                let title = format!(
                    "a0 = {:.6e}, a1 = {:.6e} ({} samples)",
                    r.fit.a0_hat, r.fit.a1_hat, r.fit.n_samples
                );
                write_file(&p, &svg::fit_plot(&fit_curve(&samples, &r.fit, s.dim), &title))?;
            }
            emit(&out, &io::recovered_to_json(&r))
        }
        Command::Weyl {
            spectrum,
            truth,
            points,
            out,
        } => {
            let mut s = load_spectrum(&spectrum)?;
            if let Some(t) = load_truth(&truth)? {
                s.domain_meta = Some(t);
            }
            let geom = s
                .domain_meta
                .as_ref()
                .ok_or_else(|| {
                    Failure::new(
                        "weyl",
                        Error::InvalidInput("the spectrum has no domain; pass --truth".into()),
                    )
                })?
                .geometric_data()
                .stage("weyl")?;
            if points == 0 {
                return Err(Failure::new("weyl", Error::InvalidInput("points must be >= 1".into())));
            }
            let top = *s.eigenvalues.last().expect("spectra are non-empty");
            let mut csv = String::from("eta,count,leading,boundary,count_over_leading\n");
            for i in 1..=points {
                let eta = top * i as f64 / points as f64;
                let a = weyl_count_audit(s.counting_function(eta), s.params, &geom, s.bc, eta);
                let _ = writeln!(
                    csv,
                    "{eta},{},{},{},{}",
                    a.count,
                    a.leading,
                    a.boundary,
                    a.count as f64 / a.leading
                );
            }
            emit(&out, &csv)
        }
        Command::AuditBall {
            spectrum,
            fit,
            ball_tol,
            out,
        } => {
            let s = load_spectrum(&spectrum)?;
            let opts = fit.options(ball_tol).stage("audit-ball")?;
            let r = end_to_end_recover(&s, s.params, s.dim, s.bc, &opts).stage("audit-ball")?;
            let audit = isoperimetric_audit(&r.geometry, ball_tol);
            let verdict = if audit.is_ball_within_tol {
                "consistent with a ball".to_string()
            } else {
                "not a ball".to_string()
            };
            let mut warnings = r.warnings.clone();
            if matches!(s.provenance, Provenance::Fem { extrapolated: false, .. }) {
                warnings.push("single-mesh finite element spectrum".into());
            }
            emit(
                &out,
                &json(&BallVerdict {
                    schema_version: io::SCHEMA_VERSION,
                    ratio: audit.ratio,
                    ratio_uncertainty: r.ratio_uncertainty,
                    ball_ratio: audit.ball_ratio,
                    tol: ball_tol,
                    is_ball: audit.is_ball_within_tol,
                    verdict,
                    warnings,
                }),
            )
        }
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("LAME_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    return ExitCode::SUCCESS;
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = e.print();
                    return ExitCode::from(1);
                }
                _ => {
                    let report = ErrorReport {
                        stage: "arguments".into(),
                        message: e.kind().to_string(),
                        hint: e.render().to_string().lines().next().unwrap_or_default().to_string(),
                    };
                    eprintln!("{}", serde_json::to_string(&report).expect("report serializes"));
                    return ExitCode::from(1);
                }
            }
        }
    };
    configure_threads();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", serde_json::to_string(&f.report()).expect("report serializes"));
            ExitCode::from(f.exit_code())
        }
    }
}
