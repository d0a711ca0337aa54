//! Writers, run manifests and error reporting.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use ptcubic::verify::Report;
use ptcubic::{Error, SolverConfig};
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub command: &'a str,
    pub config: &'a SolverConfig,
    pub version: &'static str,
    pub timestamp: String,
    pub input: serde_json::Value,
}

/// Single writer for a command's primary output. With `--out` the data goes
/// to the file plus a manifest and side information goes to stdout;
/// otherwise data goes to stdout and side information to stderr.
pub struct Output<'a> {
    path: Option<PathBuf>,
    manifest: RunManifest<'a>,
}

impl<'a> Output<'a> {
    pub fn new(
        path: Option<PathBuf>,
        command: &'a str,
        config: &'a SolverConfig,
        input: &impl Serialize,
    ) -> Self {
        let manifest = RunManifest {
            command,
            config,
            version: env!("CARGO_PKG_VERSION"),
            timestamp: chrono::Utc::now().to_rfc3339(),
            input: serde_json::to_value(input).unwrap_or(serde_json::Value::Null),
        };
        Self { path, manifest }
    }

    pub fn has_file(&self) -> bool {
        self.path.is_some()
    }

    pub fn emit(&self, data: &[u8]) -> Result<(), Failure> {
        let Some(path) = &self.path else {
            std::io::stdout()
                .write_all(data)
                .map_err(|e| Failure::usage(format!("cannot write to stdout: {e}")))?;
            return Ok(());
        };
        let unwritable = |p: &PathBuf, e: std::io::Error| Failure::usage(format!("cannot write {}: {e}", p.display()));
        std::fs::write(path, data).map_err(|e| unwritable(path, e))?;
        let mut manifest_path = path.clone().into_os_string();
        manifest_path.push(".manifest.json");
        let manifest_path = PathBuf::from(manifest_path);
        let mut text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        text.push('\n');
        std::fs::write(&manifest_path, text).map_err(|e| unwritable(&manifest_path, e))
    }

    pub fn emit_json(&self, value: &impl Serialize) -> Result<(), Failure> {
        let mut text = serde_json::to_string_pretty(value).expect("output serializes");
        text.push('\n');
        self.emit(text.as_bytes())
    }

    pub fn side(&self, line: &str) {
        if self.has_file() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
}

#[derive(Debug)]
pub struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    pub fn usage(message: String) -> Self {
        Self { code: 2, kind: "usage", message }
    }

    pub fn report(&self) -> ExitCode {
        let body = serde_json::json!({
            "error": { "kind": self.kind, "message": self.message }
        });
        eprintln!("{body}");
        ExitCode::from(self.code)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let kind = match &e {
            Error::Config(_) => "config",
            Error::Domain(_) => "domain",
            Error::Quadrature { .. } => "quadrature",
            Error::Singularity(_) => "singularity",
            Error::Branch { .. } => "branch",
            Error::StepCollapse { .. } => "step_collapse",
            Error::TooManySteps(_) => "too_many_steps",
            Error::Pole(_) => "pole",
            Error::InconsistentBracket { .. } => "inconsistent_bracket",
            Error::RefinementExhausted { .. } => "refinement_exhausted",
            Error::ContourNearZero { .. } => "contour_near_zero",
            Error::NonIntegerWinding { .. } => "non_integer_winding",
            Error::Pairing { .. } => "pairing",
        };
        let code = if matches!(e, Error::Config(_) | Error::Domain(_)) { 2 } else { 3 };
        Self { code, kind, message: e.to_string() }
    }
}

pub fn report_table(report: &Report) -> String {
    let mut s = String::new();
    if let Some(c) = &report.constants {
        let _ = writeln!(
            s,
            "K = {:.16}  K' = {:.16}  |K - K'| = {:.3e}\n",
            c.k,
            c.k_prime,
            (c.k - c.k_prime).abs()
        );
    }
    let width = report.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &report.checks {
        let _ = write!(
            s,
            "{}  {:<width$}  {:>12.4e} {} {:<10.3e}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.relation,
            c.threshold,
        );
        if let Some(d) = &c.detail {
            let _ = write!(s, "  {d}");
        }
        s.push('\n');
    }
    let failed = report.failures().count();
    let _ = writeln!(
        s,
        "\n{} of {} checks passed in {:.2} s",
        report.checks.len() - failed,
        report.checks.len(),
        report.elapsed_seconds
    );
    s
}
