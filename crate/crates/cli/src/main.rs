//! `ptcubic`: eigenvalues, discriminant grids and the verification suite
//! for the imaginary cubic oscillator.

mod output;

use std::f64::consts::PI;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use ptcubic::spectral::grid::{verify_upper_half_plane, Rect};
use ptcubic::spectral::scan::scan_real_eigenvalues;
use ptcubic::{shoot, verify, wkb, SolverConfig};
use serde::Serialize;

use output::{Failure, Output};

/// Smallest imaginary part the grid command accepts.
const GRID_IM_FLOOR: f64 = 0.05;

#[derive(Debug, Parser)]
#[command(name = "ptcubic", version, about = "Spectral toolkit for H = p^2 + i x^3")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "lowercase")]
enum Command {
    /// Semiclassical levels as CSV: n, lambda0, action_check_residual.
    Wkb {
        #[arg(long, default_value_t = 10)]
        n_max: u32,
        #[command(flatten)]
        common: Common,
    },
    /// The lowest eigenvalues as a JSON array.
    Eigen {
        #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
        n_max: u32,
        #[command(flatten)]
        common: Common,
    },
    /// |h| over a rectangle in the upper half plane as CSV.
    Grid {
        #[command(flatten)]
        region: Region,
        #[command(flatten)]
        common: Common,
    },
    /// Runs every invariant check; exit status 1 if any fails.
    Verify {
        /// Print the JSON report to stdout instead of the table.
        #[arg(long)]
        json: bool,
        #[command(flatten)]
        region: Region,
        #[command(flatten)]
        common: Common,
    },
    /// Boundary data f(0), f'(0) for the recessive solution at `mu`.
    F0 {
        /// Spectral parameter as `RE,IM`.
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        mu: Complex64,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Args, Serialize)]
struct Common {
    /// Output file; a `<out>.manifest.json` is written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
}

#[derive(Debug, Args, Serialize)]
struct Region {
    #[arg(long, allow_hyphen_values = true)]
    re_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    re_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    im_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    im_max: Option<f64>,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Wkb { .. } => "wkb",
            Command::Eigen { .. } => "eigen",
            Command::Grid { .. } => "grid",
            Command::Verify { .. } => "verify",
            Command::F0 { .. } => "f0",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Command::Wkb { common, .. }
            | Command::Eigen { common, .. }
            | Command::Grid { common, .. }
            | Command::Verify { common, .. }
            | Command::F0 { common, .. } => common,
        }
    }

    fn region(&self) -> Option<&Region> {
        match self {
            Command::Grid { region, .. } | Command::Verify { region, .. } => Some(region),
            _ => None,
        }
    }
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| format!("expected RE,IM, got {s:?}"))?;
    let re: f64 = re.trim().parse().map_err(|e| format!("real part {re:?}: {e}"))?;
    let im: f64 = im.trim().parse().map_err(|e| format!("imaginary part {im:?}: {e}"))?;
    Ok(Complex64::new(re, im))
}

/// Defaults, then the config file, then flags.
fn resolve_config(command: &Command) -> Result<SolverConfig, Failure> {
    let mut cfg = SolverConfig::default();
    let common = command.common();
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::usage(format!("cannot read config {}: {e}", path.display())))?;
        cfg.apply_text(&text).map_err(Failure::from)?;
    }
    if let Some(v) = common.rel_tol {
        cfg.rel_tol = v;
    }
    if let Some(v) = common.abs_tol {
        cfg.abs_tol = v;
    }
    if let Some(r) = command.region() {
        let pairs = [
            (&mut cfg.re_min, r.re_min),
            (&mut cfg.re_max, r.re_max),
            (&mut cfg.im_min, r.im_min),
            (&mut cfg.im_max, r.im_max),
        ];
        for (slot, v) in pairs {
            if let Some(v) = v {
                *slot = v;
            }
        }
        if let Some(v) = r.nx {
            cfg.nx = v;
        }
        if let Some(v) = r.ny {
            cfg.ny = v;
        }
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    let cfg = resolve_config(&cli.command)?;
    let out = Output::new(cli.command.common().out.clone(), cli.command.name(), &cfg, &cli.command);

    match &cli.command {
        Command::Wkb { n_max, .. } => {
            let mut csv = String::from("n,lambda0,action_check_residual\n");
            for n in 0..=*n_max {
                let level = wkb::wkb_eigenvalue(n);
                let target = (2.0 * f64::from(n) + 1.0) * PI;
                let action = wkb::action_integral(level.lambda0)?;
                let residual = (action - target).norm() / target;
                csv.push_str(&format!("{n},{:.16e},{residual:.16e}\n", level.lambda0));
            }
            out.emit(csv.as_bytes())?;
        }
        Command::Eigen { n_max, .. } => {
            cfg.validate()?;
            let records = scan_real_eigenvalues(*n_max as usize, &cfg)?;
            out.emit_json(&records)?;
        }
        Command::Grid { .. } => {
            cfg.validate().map_err(|e| Failure::usage(e.to_string()))?;
            if cfg.im_min < GRID_IM_FLOOR {
                return Err(Failure::usage(format!(
                    "grid region must satisfy im_min >= {GRID_IM_FLOOR}, got {}",
                    cfg.im_min
                )));
            }
            let region = Rect::from_config(&cfg).map_err(|e| Failure::usage(e.to_string()))?;
            let scan = verify_upper_half_plane(region, (cfg.nx, cfg.ny), &cfg)?;
            let mut csv = String::from("re,im,abs_h,arg_h\n");
            for p in &scan.points {
                csv.push_str(&format!(
                    "{:.16e},{:.16e},{:.16e},{:.16e}\n",
                    p.lambda.re, p.lambda.im, p.abs_h, p.arg_h
                ));
            }
            out.emit(csv.as_bytes())?;
            let summary = serde_json::json!({
                "max_abs_h": scan.max_abs_h,
                "argmax": [scan.argmax_point.re, scan.argmax_point.im],
                "violations": scan.violations.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
            });
            out.side(&serde_json::to_string(&summary).expect("summary serializes"));
        }
        Command::Verify { json, .. } => {
            let report = verify::run(&cfg);
            if *json {
                let text = serde_json::to_string_pretty(&report).expect("report serializes");
                println!("{text}");
            } else {
                print!("{}", output::report_table(&report));
            }
            if out.has_file() {
                out.emit_json(&report)?;
            }
            if !report.passed {
                let failing: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
                eprintln!("{}", serde_json::json!({ "failed": failing }));
                return Ok(ExitCode::from(1));
            }
        }
        Command::F0 { mu, .. } => {
            cfg.validate()?;
            let data = shoot::integrate_f(*mu, &cfg)?;
            out.emit_json(&data)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(failure) => failure.report(),
    }
}
