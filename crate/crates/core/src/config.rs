use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Execution;

/// Numerical knobs shared by the integrator, the eigenvalue scan and the
/// half-plane grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Relative tolerance of the Runge–Kutta step controller.
    pub rel_tol: f64,
    /// Absolute tolerance, applied to the renormalized mantissas.
    pub abs_tol: f64,
    /// Lower bound on the start abscissa.
    pub z0_min: f64,
    /// Start abscissa must satisfy `z0^3 >= z0_dominance * |mu|` ...
    pub z0_dominance: f64,
    /// ... plus this additive margin.
    pub z0_margin: f64,
    /// Sector margin `delta` for Liouville–Green decompositions.
    pub delta: f64,
    /// Mantissa modulus that triggers renormalization of the ODE state.
    pub renorm_threshold: f64,
    pub max_steps: usize,
    /// Width at which root refinement stops.
    pub root_tol: f64,
    /// Step of the central difference for `dW/dlambda`.
    pub fd_step: f64,
    /// Location tolerance used by the simple-zero certificate.
    pub simplicity_tol: f64,
    /// Left end of the real-axis eigenvalue scan.
    pub scan_start: f64,
    /// Maximum bisection depth when a scan cell needs refining.
    pub max_refine_depth: usize,
    /// Smallest normalized |W| tolerated on an argument-principle contour.
    pub contour_min_rel: f64,
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
    pub execution: Execution,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            z0_min: 8.0,
            z0_dominance: 10.0,
            z0_margin: 2.0,
            delta: 0.1 * PI,
            renorm_threshold: 2f64.powi(30),
            max_steps: 500_000,
            root_tol: 1e-10,
            fd_step: 1e-5,
            simplicity_tol: 1e-5,
            scan_start: 0.2,
            max_refine_depth: 20,
            contour_min_rel: 1e-6,
            re_min: 0.5,
            re_max: 20.0,
            im_min: 0.1,
            im_max: 10.0,
            nx: 60,
            ny: 40,
            execution: Execution::Parallel,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("rel_tol", self.rel_tol),
            ("abs_tol", self.abs_tol),
            ("z0_min", self.z0_min),
            ("z0_dominance", self.z0_dominance),
            ("delta", self.delta),
            ("root_tol", self.root_tol),
            ("fd_step", self.fd_step),
            ("simplicity_tol", self.simplicity_tol),
            ("scan_start", self.scan_start),
            ("contour_min_rel", self.contour_min_rel),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.z0_dominance < crate::lg::DOMINANCE {
            return Err(Error::Config(format!(
                "z0_dominance must be at least {}",
                crate::lg::DOMINANCE
            )));
        }
        if self.z0_margin < 0.0 || !self.z0_margin.is_finite() {
            return Err(Error::Config("z0_margin must be non-negative".into()));
        }
        if self.delta >= PI {
            return Err(Error::Config("delta must be below pi".into()));
        }
        if !(self.renorm_threshold > 1.0 && self.renorm_threshold <= 2f64.powi(30)) {
            return Err(Error::Config("renorm_threshold must lie in (1, 2^30]".into()));
        }
        if self.max_steps == 0 || self.nx == 0 || self.ny == 0 {
            return Err(Error::Config("max_steps, nx and ny must be at least 1".into()));
        }
        if !(self.re_min <= self.re_max && self.im_min <= self.im_max) {
            return Err(Error::Config("region bounds are inverted".into()));
        }
        Ok(())
    }

    /// Sets one field from its textual `key = value` form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value
                .parse()
                .map_err(|_| Error::Config(format!("cannot parse {key} = {value:?}")))
        }
        match key {
            "rel_tol" => self.rel_tol = num(key, value)?,
            "abs_tol" => self.abs_tol = num(key, value)?,
            "z0_min" => self.z0_min = num(key, value)?,
            "z0_dominance" => self.z0_dominance = num(key, value)?,
            "z0_margin" => self.z0_margin = num(key, value)?,
            "delta" => self.delta = num(key, value)?,
            "renorm_threshold" => self.renorm_threshold = num(key, value)?,
            "max_steps" => self.max_steps = num(key, value)?,
            "root_tol" => self.root_tol = num(key, value)?,
            "fd_step" => self.fd_step = num(key, value)?,
            "simplicity_tol" => self.simplicity_tol = num(key, value)?,
            "scan_start" => self.scan_start = num(key, value)?,
            "max_refine_depth" => self.max_refine_depth = num(key, value)?,
            "contour_min_rel" => self.contour_min_rel = num(key, value)?,
            "re_min" => self.re_min = num(key, value)?,
            "re_max" => self.re_max = num(key, value)?,
            "im_min" => self.im_min = num(key, value)?,
            "im_max" => self.im_max = num(key, value)?,
            "nx" => self.nx = num(key, value)?,
            "ny" => self.ny = num(key, value)?,
            "execution" => {
                self.execution = match value {
                    "parallel" => Execution::Parallel,
                    "sequential" => Execution::Sequential,
                    _ => return Err(Error::Config(format!("unknown execution mode {value:?}"))),
                }
            }
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    /// Applies `key = value` lines; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (number, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`, got {raw:?}", number + 1))
            })?;
            self.set(key.trim(), value.trim()).map_err(|e| match e {
                Error::Config(m) => Error::Config(format!("line {}: {m}", number + 1)),
                other => other,
            })?;
        }
        Ok(())
    }

    /// Start abscissa for a given spectral parameter modulus.
    pub fn z0_for(&self, mu_abs: f64) -> f64 {
        self.z0_min
            .max((self.z0_dominance * mu_abs).cbrt() + self.z0_margin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = SolverConfig::default();
        c.validate().unwrap();
        assert_eq!(c.rel_tol, 1e-10);
        assert_eq!(c.abs_tol, 1e-12);
    }

    #[test]
    fn z0_rule() {
        let c = SolverConfig::default();
        assert_eq!(c.z0_for(1.0), 8.0);
        assert!((c.z0_for(1000.0) - (1e4f64.cbrt() + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn set_by_key() {
        let mut c = SolverConfig::default();
        c.set("rel_tol", "1e-8").unwrap();
        c.set("execution", "sequential").unwrap();
        assert_eq!(c.rel_tol, 1e-8);
        assert_eq!(c.execution, Execution::Sequential);
        assert!(c.set("bogus", "1").is_err());
        assert!(c.set("nx", "-3").is_err());
    }

    #[test]
    fn text_form() {
        let mut c = SolverConfig::default();
        c.apply_text("# tolerances\nrel_tol = 1e-9\n\nnx=3  # coarse\n").unwrap();
        assert_eq!(c.rel_tol, 1e-9);
        assert_eq!(c.nx, 3);
        let e = c.apply_text("nx 3").unwrap_err();
        assert!(e.to_string().contains("line 1"));
        assert!(c.apply_text("ny = x").unwrap_err().to_string().contains("line 1"));
    }

    #[test]
    fn rejects_bad_values() {
        let c = SolverConfig { rel_tol: 0.0, ..SolverConfig::default() };
        assert!(c.validate().is_err());
        let c = SolverConfig { re_min: 5.0, re_max: 1.0, ..SolverConfig::default() };
        assert!(c.validate().is_err());
    }
}
