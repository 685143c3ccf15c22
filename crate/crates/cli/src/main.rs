use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};

use grl_core::cocycle::phase::{
    cluster_set_c1, cluster_set_c2, max_angular_gap, phase_cocycle_iterate, PhaseSetup, SyntheticPhaseField,
};
use grl_core::cocycle::{case3_verdict, theta_birkhoff, theta_haar_sampled, theta_haar, DEFAULT_SKIP_THRESHOLD};
use grl_core::gabor::{
    dependence_residual, fourier_dual_config, gaussian_gram_closed_form, gram_matrix, gram_matrix_zak,
    zak_gram_resolution, GaborConfig, ResidualMethod,
};
use grl_core::numerics::torus::circle_dist;
use grl_core::numerics::{inner_product, Coordinate, QuadratureSpec, TorusPoint};
use grl_core::orbit::{classify, subgroup_closure, Gamma};
use grl_core::remark;
use grl_core::trigpoly::TrigPolynomial;
use grl_core::windows::Window;
use grl_core::zak::{
    default_truncation, locate_zero_set, quasi_periodicity_residual, zak_transform, DEFAULT_TAIL,
};
use grl_core::GrlError;

const DEFAULT_MAX_GRID: usize = 1 << 24;

#[derive(Parser)]
#[command(name = "grl", version, about = "Gabor systems with one off-lattice point: Gram certificates, Zak transforms, orbit cocycles")]
struct Cli {
    /// Write the primary output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads; 1 keeps every reduction order fixed.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum GramKind {
    Time,
    Zak,
    ClosedForm,
}

#[derive(Clone, Copy, ValueEnum)]
enum ResidualKind {
    Time,
    Zak,
}

#[derive(Clone, Copy, ValueEnum)]
enum ThetaKind {
    Birkhoff,
    Haar,
    HaarSample,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Classify the orbit of γ and describe its closure.
    Classify {
        /// Comma-separated coordinates of γ, e.g. "0,sqrt2".
        #[arg(long, conflicts_with = "config")]
        gamma: Option<String>,
        /// Take γ = (−α, β) from a configuration file.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        bound: i64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Gram matrix of a configuration with its eigenvalue certificate.
    Gram {
        #[arg(long)]
        config: PathBuf,
        /// gaussian, hermite:N or csv:PATH
        #[arg(long, default_value = "gaussian")]
        window: String,
        #[arg(long, value_enum, default_value_t = GramKind::Time)]
        method: GramKind,
        /// Gauss nodes per unit panel (time domain) or Zak grid resolution.
        #[arg(long)]
        points: Option<usize>,
    },
    /// Distance from the off-lattice atom to the span of the others.
    Residual {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = "gaussian")]
        window: String,
        #[arg(long, value_enum, default_value_t = ResidualKind::Time)]
        method: ResidualKind,
    },
    /// Zak transform of a window on a uniform grid.
    Zak {
        #[arg(long, default_value = "gaussian")]
        window: String,
        #[arg(long, default_value_t = 1)]
        dimension: usize,
        #[arg(long, default_value_t = 128)]
        resolution: usize,
        /// Lattice truncation K; chosen from the decay bound when omitted.
        #[arg(long)]
        truncation: Option<usize>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Log-growth functional Θ at a base point.
    Theta {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        gamma: String,
        #[arg(long)]
        lambda: String,
        #[arg(long, value_enum, default_value_t = ThetaKind::Birkhoff)]
        method: ThetaKind,
        #[arg(long, default_value_t = 1_000_000)]
        n: u64,
        #[arg(long, default_value_t = 16)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_SKIP_THRESHOLD)]
        delta: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Check the n-fold phase identity on a synthetic propagated field.
    PhaseCheck {
        /// Polynomial file; the constant 1 when omitted.
        #[arg(long)]
        poly: Option<PathBuf>,
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        t: String,
        #[arg(long)]
        omega: String,
        #[arg(long, default_value_t = 0.0)]
        theta0: f64,
        #[arg(long, default_value_t = 64)]
        n: usize,
        #[arg(long, default_value_t = DEFAULT_SKIP_THRESHOLD)]
        delta: f64,
    },
    /// The two cluster-set descriptions for given α, β, ω.
    Cluster {
        #[arg(long)]
        alpha: String,
        #[arg(long)]
        beta: String,
        #[arg(long)]
        omega: String,
        #[arg(long, default_value_t = 1000)]
        n_max: u64,
    },
    /// Fourier-dual configuration (x, y) ↦ (−y, x).
    Dual {
        #[arg(long)]
        config: PathBuf,
    },
    /// Θ profile of the first worked example against its closed form.
    Remark1 {
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Minimum modulus and Θ over t for the second worked example.
    Remark2 {
        #[arg(long, default_value_t = 32)]
        points: usize,
        #[arg(long, default_value_t = 1024)]
        resolution: usize,
    },
}

enum CliError {
    Core(GrlError),
    Usage(String),
}

impl From<GrlError> for CliError {
    fn from(e: GrlError) -> Self {
        CliError::Core(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Core(GrlError::Io(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Core(GrlError::from(e))
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e {
                GrlError::InvalidArgument(_) | GrlError::Unsupported(_) | GrlError::Io(_) | GrlError::Parse(_) => 2,
                GrlError::AmbiguousClassification { .. } => 4,
                GrlError::NumericalFailure { .. }
                | GrlError::InsufficientSupport(_)
                | GrlError::Truncation { .. }
                | GrlError::PhaseUndefined { .. } => 3,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Core(GrlError::NumericalFailure {
                message,
                location: Some(loc),
            }) => format!("numerical failure: {message} at {loc:?}"),
            CliError::Core(e) => e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if cli.threads == 0 {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(2);
    }
    if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build_global() {
        eprintln!("error: cannot start worker threads: {e}");
        return ExitCode::from(2);
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Classify { gamma, config, bound, tol } => {
            let g = match (gamma, config) {
                (Some(s), _) => Gamma::parse(s)?,
                (None, Some(path)) => Gamma::from_config(&GaborConfig::load(path)?),
                (None, None) => return Err(CliError::Usage("classify needs --gamma or --config".into())),
            };
            let cls = classify(&g, *bound, *tol)?;
            let h = subgroup_closure(&g, &cls)?;
            let report = json!({
                "gamma": g.coords.iter().map(ToString::to_string).collect::<Vec<_>>(),
                "verdict": cls.verdict,
                "relations": cls.relations,
                "annihilator_basis": h.annihilator_basis,
                "component_count": h.component_count,
                "connected_directions": h.connected_directions,
                "numerical_relations": cls.numerical_relations,
                "search": cls.search,
                "advisories": cls.advisories,
            });
            emit_json(out, &report)
        }
        Command::Gram { config, window, method, points } => {
            let cfg = GaborConfig::load(config)?;
            let w = Window::parse(window, cfg.dimension())?;
            let g = match method {
                GramKind::Time => gram_matrix(&w, &cfg, &QuadratureSpec::gauss(points.unwrap_or(16)))?,
                GramKind::Zak => {
                    let m = points.unwrap_or_else(|| zak_gram_resolution(cfg.dimension()));
                    check_grid(cfg.dimension(), m)?;
                    gram_matrix_zak(&w, &cfg, m)?
                }
                GramKind::ClosedForm => gaussian_gram_closed_form(&w, &cfg)?,
            };
            emit_json(out, &serde_json::to_value(&g)?)
        }
        Command::Residual { config, window, method } => {
            let cfg = GaborConfig::load(config)?;
            let w = Window::parse(window, cfg.dimension())?;
            let m = match method {
                ResidualKind::Time => ResidualMethod::TimeDomain,
                ResidualKind::Zak => ResidualMethod::ZakDomain,
            };
            let r = dependence_residual(&w, &cfg, m)?;
            emit_json(out, &serde_json::to_value(&r)?)
        }
        Command::Zak {
            window,
            dimension,
            resolution,
            truncation,
            format,
        } => {
            let w = Window::parse(window, *dimension)?;
            check_grid(*dimension, *resolution)?;
            let k = match truncation {
                Some(k) => *k,
                None => default_truncation(&w, DEFAULT_TAIL)?,
            };
            let z = zak_transform(&w, *resolution, k)?;
            match format {
                Format::Csv => {
                    let mut buf = Vec::new();
                    z.write_csv(&mut buf)?;
                    emit_bytes(out, &buf)
                }
                Format::Json => {
                    let zeros = locate_zero_set(&z, None)?;
                    let report = json!({
                        "dimension": z.dimension,
                        "resolution": z.resolution,
                        "truncation": z.truncation,
                        "tail_bound": z.tail_bound,
                        "max_abs": z.max_abs(),
                        "grid_l2_squared": z.grid_l2_squared(),
                        "quasi_periodicity_residual": quasi_periodicity_residual(&z)?,
                        "zero_threshold": zeros.threshold,
                        "zero_count": zeros.points.len(),
                        "zeros": zeros.points.iter().take(1000).collect::<Vec<_>>(),
                    });
                    emit_json(out, &report)
                }
            }
        }
        Command::Theta {
            poly,
            gamma,
            lambda,
            method,
            n,
            points,
            delta,
            tol,
        } => {
            let p = load_poly(poly)?;
            let g = Gamma::parse(gamma)?;
            let lam = TorusPoint::new(&parse_floats(lambda)?)?;
            let est = match method {
                ThetaKind::Birkhoff => theta_birkhoff(&p, &lam, &g, *n, *delta)?,
                ThetaKind::Haar | ThetaKind::HaarSample => {
                    let cls = classify(&g, 50, 1e-9)?;
                    let h = subgroup_closure(&g, &cls)?;
                    if matches!(method, ThetaKind::Haar) {
                        theta_haar(&p, &lam, &h, &QuadratureSpec::gauss(*points).refined(), f64::MIN_POSITIVE)?
                    } else {
                        theta_haar_sampled(&p, &lam, &h, *points, *delta)?
                    }
                }
            };
            let verdict = case3_verdict(&est, *tol).ok();
            let report = json!({
                "value": est.value,
                "method": est.method,
                "skipped_fraction": est.skipped_fraction,
                "reliable": est.reliable,
                "case3": verdict,
                "interpretation": verdict.map(|v| v.interpretation()),
            });
            emit_json(out, &report)
        }
        Command::PhaseCheck {
            poly,
            alpha,
            beta,
            t,
            omega,
            theta0,
            n,
            delta,
        } => {
            let alpha = Coordinate::parse_list(alpha)?;
            let beta = Coordinate::parse_list(beta)?;
            let d = alpha.len();
            let p = match poly {
                Some(path) => load_poly(path)?,
                None => TrigPolynomial::constant(2 * d, Complex64::new(1.0, 0.0)),
            };
            let setup = PhaseSetup::new(parse_floats(t)?, parse_floats(omega)?, alpha, beta)?;
            let field = SyntheticPhaseField::build(*theta0, &p, setup.clone(), *n, *delta)?;
            let mut worst: f64 = 0.0;
            let mut steps = Vec::with_capacity(n + 1);
            for k in 0..=*n {
                let synthetic = field.value(k)?;
                let formula = phase_cocycle_iterate(*theta0, &p, &setup, k, *delta)?;
                let err = circle_dist(synthetic, formula);
                worst = worst.max(err);
                steps.push(json!({"n": k, "synthetic": synthetic, "formula": formula, "mismatch": err}));
            }
            let report = json!({
                "alpha_beta": setup.alpha_beta()?.to_string(),
                "max_mismatch": worst,
                "steps": steps,
            });
            emit_json(out, &report)
        }
        Command::Cluster { alpha, beta, omega, n_max } => {
            let alpha = Coordinate::parse_list(alpha)?;
            let beta = Coordinate::parse_list(beta)?;
            let om = TorusPoint::new(&parse_floats(omega)?)?;
            let ab = inner_product(&alpha, &beta)?;
            let c1 = cluster_set_c1(&ab);
            let c2 = cluster_set_c2(&alpha, &beta, &om, *n_max)?;
            let report = json!({
                "alpha_beta": ab.to_string(),
                "c1": c1,
                "c2": {
                    "n_max": n_max,
                    "count": c2.len(),
                    "max_angular_gap": max_angular_gap(&c2),
                    "points": c2.iter().take(1000).map(|z| [z.re, z.im]).collect::<Vec<_>>(),
                },
            });
            emit_json(out, &report)
        }
        Command::Dual { config } => {
            let cfg = GaborConfig::load(config)?;
            let text = fourier_dual_config(&cfg).to_json()?;
            emit_bytes(out, format!("{text}\n").as_bytes())
        }
        Command::Remark1 { points } => {
            let rows = remark::first_profile(*points, &remark::default_quadrature())?;
            let mut buf = Vec::new();
            remark::write_first_csv(&rows, &mut buf)?;
            emit_bytes(out, &buf)?;
            summary(
                out,
                &format!("max |theta_quadrature - theta_closed_form| = {:.3e}", remark::max_profile_error(&rows)),
            );
            Ok(())
        }
        Command::Remark2 { points, resolution } => {
            let rows = remark::second_profile(*points, &remark::default_quadrature())?;
            let m = remark::second_polynomial().min_modulus(*resolution)?;
            let mut buf = Vec::new();
            remark::write_second_csv(&rows, &mut buf)?;
            emit_bytes(out, &buf)?;
            let worst = rows.iter().map(|r| r.theta.abs()).fold(0.0, f64::max);
            summary(
                out,
                &format!("min |p| = {:.12} (certified >= {:.6}); max |theta| = {:.3e}", m.min, m.lower_bound, worst),
            );
            Ok(())
        }
    }
}

fn max_grid() -> CliResult<usize> {
    match std::env::var("GRL_MAX_GRID") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("GRL_MAX_GRID must be a positive integer, got {s:?}"))),
        Err(_) => Ok(DEFAULT_MAX_GRID),
    }
}

fn check_grid(d: usize, m: usize) -> CliResult<()> {
    let budget = max_grid()?;
    let size = m.checked_pow(2 * d as u32);
    match size {
        Some(s) if s <= budget => Ok(()),
        _ => Err(CliError::Usage(format!(
            "grid {m}^{} exceeds the budget of {budget} values (set GRL_MAX_GRID to raise it)",
            2 * d
        ))),
    }
}

fn parse_floats(text: &str) -> CliResult<Vec<f64>> {
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("expected a comma-separated list of numbers, got {text:?}")))
        })
        .collect()
}

fn load_poly(path: &Path) -> CliResult<TrigPolynomial> {
    Ok(TrigPolynomial::from_json(&fs::read_to_string(path)?)?)
}

fn emit_json(out: Option<&Path>, v: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    emit_bytes(out, text.as_bytes())
}

fn emit_bytes(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(p) => fs::write(p, bytes)?,
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

/// Human-readable summary: standard output when the data went to a file,
/// standard error otherwise so piped CSV stays clean.
fn summary(out: Option<&Path>, line: &str) {
    if out.is_some() {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}
