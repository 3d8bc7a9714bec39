//! Command-line front end: `families`, `build`, `sample`, `verify`, `surface`.

pub mod config;
pub mod grid;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use thiserror::Error;

use crate::families::{Family, FamilyError, FieldError, XPolySolution};
use crate::verifier::{self, VerifyError, VerifyOptions, DEFAULT_FD_STEP};
pub use config::{Config, Constants, ParamValue};
pub use grid::{default_box, parse_box, GridSpec, DEFAULT_MAX_POINTS};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Build(FamilyError),
    #[error(transparent)]
    Verify(VerifyError),
    #[error("evaluation failed at {point:?}: {source}")]
    Eval { point: Vec<f64>, source: FieldError },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Build(e) if e.is_input_error() => 2,
            CliError::Build(_) => 3,
            CliError::Verify(VerifyError::Field(_) | VerifyError::FrameMismatch) => 3,
            CliError::Verify(_) => 2,
            CliError::Eval { .. } => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> CliError {
        CliError::Verify(e)
    }
}

#[derive(Parser, Debug)]
#[command(name = "stablerange", version, about = "Exact x-polynomial solutions of the short-wave and KZ equations")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// List the solution families with their parameters and constants.
    Families,
    /// Construct a solution and write its term data as JSON.
    Build {
        #[arg(long)]
        config: PathBuf,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a solution on a rectangular grid and write CSV.
    Sample {
        #[arg(long)]
        config: PathBuf,
        /// e.g. "t=0:1:11,x=-1:1:21,y=0.2:2:19"
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_POINTS)]
        max_points: usize,
    },
    /// Check the PDE residual at seeded random points.
    Verify {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        /// e.g. "t=0:1,x=-1:1,y=-2:2"; unspecified coordinates keep their defaults.
        #[arg(long = "box")]
        sample_box: Option<String>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides the config tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_FD_STEP)]
        fd_step: f64,
    },
    /// Print the singular surface at time `t`.
    Surface {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        t: f64,
    },
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code. Diagnostics go to standard error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match dispatch(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cmd: Cmd) -> Result<i32, CliError> {
    match cmd {
        Cmd::Families => {
            print!("{}", families_listing());
            Ok(0)
        }
        Cmd::Build { config, out } => {
            let sol = load(&config)?.build()?;
            let mut text = serde_json::to_string_pretty(&sol.to_doc()).expect("documents serialize");
            text.push('\n');
            emit(out.as_deref(), &text)?;
            Ok(0)
        }
        Cmd::Sample {
            config,
            grid,
            out,
            max_points,
        } => {
            let cfg = load(&config)?;
            let sol = cfg.build()?;
            let spec = GridSpec::parse(&grid, sol.equation().has_z(), max_points)?;
            let text = sample_csv(&sol, &spec, cfg.pole_guard())?;
            emit(out.as_deref(), &text)?;
            Ok(0)
        }
        Cmd::Verify {
            config,
            samples,
            sample_box,
            seed,
            tol,
            report,
            fd_step,
        } => {
            let cfg = load(&config)?;
            let sol = cfg.build()?;
            let has_z = sol.equation().has_z();
            let sample_box = match sample_box {
                Some(s) => parse_box(&s, has_z)?,
                None => default_box(),
            };
            let tolerance = tol.unwrap_or(cfg.tolerance());
            if !(tolerance.is_finite() && tolerance > 0.0) {
                return Err(CliError::Config(format!("--tol must be positive, got {tolerance}")));
            }
            if !(fd_step.is_finite() && fd_step > 0.0) {
                return Err(CliError::Config(format!("--fd-step must be positive, got {fd_step}")));
            }
            if samples == 0 {
                return Err(CliError::Config("--samples must be at least 1".into()));
            }
            let o = VerifyOptions {
                samples,
                seed: seed.unwrap_or(cfg.seed()),
                tolerance,
                pole_guard: cfg.pole_guard(),
                sample_box,
                fd_step,
                record_points: 0,
            };
            let r = verifier::verify(&sol, &o)?;
            if let Some(path) = report {
                let mut text = serde_json::to_string_pretty(&r).expect("reports serialize");
                text.push('\n');
                write_file(&path, &text)?;
            }
            let verdict = |b: bool| if b { "pass" } else { "FAIL" };
            println!(
                "{}: pde {:e} {}, coefficient system {:e} {}, finite differences {:e} {}",
                r.family,
                r.max_rel_residual,
                verdict(r.pass),
                r.coeff_system.max_rel_residual,
                verdict(r.coeff_system.pass),
                r.finite_difference.max_deviation,
                verdict(r.finite_difference.pass),
            );
            Ok(if r.all_pass() { 0 } else { 1 })
        }
        Cmd::Surface { config, t } => {
            if !t.is_finite() {
                return Err(CliError::Config(format!("--t must be finite, got {t}")));
            }
            let sol = load(&config)?.build()?;
            let s = sol.surface(t).map_err(|source| CliError::Eval {
                point: vec![t],
                source,
            })?;
            println!("{s}");
            Ok(0)
        }
    }
}

fn load(path: &Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Config::from_json(&text)
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn families_listing() -> String {
    let mut s = String::new();
    for f in Family::ALL {
        let list = |v: &[&str]| if v.is_empty() { "-".to_string() } else { v.join(",") };
        let _ = writeln!(
            s,
            "{:<22} required: {:<18} optional: {:<36} constants: {}{}{}",
            f.name(),
            list(f.required_params()),
            list(f.optional_params()),
            list(f.required_constants()),
            if f.optional_constants().is_empty() { "" } else { " optional " },
            f.optional_constants().join(","),
        );
    }
    s
}

/// CSV of `u` on the grid; points inside the pole guard give `nan`.
pub fn sample_csv(sol: &XPolySolution, spec: &GridSpec, guard: f64) -> Result<String, CliError> {
    let has_z = sol.equation().has_z();
    let pts = spec.points();
    let pool = verifier::thread_pool()?;
    let vals: Vec<Result<f64, CliError>> = pool.install(|| {
        pts.par_iter()
            .map(|&p| match sol.eval(p, guard) {
                Ok(v) => Ok(v),
                Err(FieldError::Pole { .. }) => Ok(f64::NAN),
                Err(source) => Err(CliError::Eval {
                    point: p[..if has_z { 4 } else { 3 }].to_vec(),
                    source,
                }),
            })
            .collect()
    });
    let mut s = String::with_capacity(pts.len() * 48);
    s.push_str(if has_z { "t,x,y,z,u\n" } else { "t,x,y,u\n" });
    for (p, v) in pts.iter().zip(vals) {
        let v = v?;
        let n = if has_z { 4 } else { 3 };
        for c in &p[..n] {
            let _ = write!(s, "{c:?},");
        }
        if v.is_nan() {
            s.push_str("nan\n");
        } else {
            let _ = writeln!(s, "{v:?}");
        }
    }
    Ok(s)
}
