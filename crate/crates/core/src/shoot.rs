//! Shooting for the recessive solution of `f'' = (z^3 + mu) f`.
//!
//! The solution is started at `z0` on the positive real axis from its
//! asymptotic expansion and integrated inward to `0`, where the boundary
//! data `F0 = f(0, mu)`, `F1 = f'(0, mu)` are read off. Inward the wanted
//! solution is the dominant one, so the integration is stable.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::lg::{error_control_variation, ErrorEnvelope, LgParams};
use crate::ode::{integrate_linear, Integration, LinearState, Tolerances};
use crate::scaled::ScaledComplex;

const MAX_SERIES_TERMS: usize = 246;
const BLOCK: usize = 6;

/// `f(z)` and `f'(z)` of the recessive solution, normalized by
/// `f ~ z^{-3/4} exp(-(2/5) z^{5/2})`, from the asymptotic series of the
/// logarithmic derivative.
///
/// With `f'/f = sum_k b_k z^{(3-k)/2}` the Riccati equation
/// `P' + P^2 = z^3 + mu` gives `b_0 = -1` and
/// `2 b_m = sum_{k=1}^{m-1} b_k b_{m-k} + (8-m)/2 b_{m-5} - mu [m = 6]`.
/// The series is asymptotic and is truncated before it starts to grow. All powers are principal, which is valid for
/// `|arg z| < 3 pi / 5`.
pub fn recessive_asymptotics(z: Complex64, mu: Complex64) -> Result<(ScaledComplex, ScaledComplex)> {
    if z.norm() < 4.0 || z.arg().abs() >= 0.6 * PI {
        return Err(Error::Domain(format!(
            "asymptotic start point z = {z} must satisfy |z| >= 4 and |arg z| < 3pi/5"
        )));
    }
    if 4.0 * mu.norm() > z.norm().powi(3) {
        return Err(Error::Domain(format!(
            "asymptotic start point z = {z} too close to the turning points of mu = {mu}"
        )));
    }
    let s = z.sqrt();
    let s_inv = s.inv();
    let mut b: Vec<Complex64> = Vec::with_capacity(MAX_SERIES_TERMS);
    b.push(Complex64::new(-1.0, 0.0));
    for m in 1..6 {
        let mut r: Complex64 = (1..m).map(|k| b[k] * b[m - k]).sum();
        if m == 5 {
            r += 1.5 * b[0];
        }
        b.push(r / 2.0);
    }
    // Terms up to k = 5 are closed form: P = -z^{3/2} - (3/4) / z, and
    // ln f = -(2/5) z^{5/2} - (3/4) ln z.
    let mut p = -s.powu(3) + b[5] * s_inv * s_inv;
    let mut ln_f = -0.4 * s.powu(5) - 0.75 * z.ln();

    // Powers of mu enter every sixth coefficient, so single terms rise and
    // fall within blocks of six. Truncation decisions are taken per block:
    // stop once a block is below rounding, or before the first block whose
    // largest term exceeds that of the previous block.
    let mut power = s_inv * s_inv * s_inv; // s^{3-k} at k = 6
    let mut previous_block = f64::INFINITY;
    let mut m = 6;
    while m + BLOCK <= MAX_SERIES_TERMS {
        let mut terms = [Complex64::default(); BLOCK];
        let mut block_max: f64 = 0.0;
        for (j, term) in terms.iter_mut().enumerate() {
            let k = m + j;
            let mut r: Complex64 = (1..k).map(|i| b[i] * b[k - i]).sum();
            r += (8.0 - k as f64) / 2.0 * b[k - 5];
            if k == 6 {
                r -= mu;
            }
            let bk = r / 2.0;
            b.push(bk);
            *term = bk * power;
            power *= s_inv;
            block_max = block_max.max(term.norm());
        }
        if block_max > previous_block {
            break;
        }
        for (j, term) in terms.iter().enumerate() {
            p += term;
            // z^{(5-k)/2} / ((5-k)/2) = s^{5-k} * 2 / (5-k)
            ln_f += term * s * s * (2.0 / (5.0 - (m + j) as f64));
        }
        if block_max <= 1e-18 * p.norm() {
            break;
        }
        previous_block = block_max;
        m += BLOCK;
    }
    let value = ScaledComplex::from_log(ln_f);
    Ok((value, value.scale(p)))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryData {
    pub mu: Complex64,
    /// `f(0)` (for the direct route: `psi(0)`).
    pub f0: ScaledComplex,
    /// `f'(0)` (for the direct route: `psi'(0)` in the real variable).
    pub f1: ScaledComplex,
    pub z0_used: f64,
    /// Liouville–Green variation bound at the start abscissa.
    pub envelope: ErrorEnvelope,
    /// Accumulated local error estimate of the integrator.
    pub integrator_error: f64,
    pub steps: usize,
}

pub(crate) fn tolerances(config: &SolverConfig) -> Tolerances {
    Tolerances {
        rel: config.rel_tol,
        abs: config.abs_tol,
        renorm_threshold: config.renorm_threshold,
        max_steps: config.max_steps,
    }
}

fn start_state(value: ScaledComplex, derivative: ScaledComplex) -> LinearState {
    // Both share the log-scale of the value.
    let s = value.log_scale();
    let dy = derivative.mantissa() * (derivative.log_scale() - s).exp();
    LinearState::new(value.mantissa(), dy, s)
}

struct Pass {
    data: BoundaryData,
    samples: Vec<(f64, LinearState)>,
}

fn shoot_real_ray(mu: Complex64, z0: f64, stops: &[f64], config: &SolverConfig) -> Result<Pass> {
    if !mu.is_finite() {
        return Err(Error::Domain(format!("spectral parameter {mu} is not finite")));
    }
    let params = LgParams::ray_local(mu, config.delta, z0)?;
    let envelope = error_control_variation(z0, &params)?;
    let (value, derivative) = recessive_asymptotics(Complex64::new(z0, 0.0), mu)?;
    let run: Integration = integrate_linear(
        |x| Complex64::new(x * x * x, 0.0) + mu,
        z0,
        0.0,
        start_state(value, derivative),
        stops,
        &tolerances(config),
    )?;
    Ok(Pass {
        data: BoundaryData {
            mu,
            f0: run.end.value(),
            f1: run.end.derivative(),
            z0_used: z0,
            envelope,
            integrator_error: run.error_estimate,
            steps: run.steps,
        },
        samples: run.samples,
    })
}

/// `F0(mu)`, `F1(mu)` with the start abscissa from the configured rule.
pub fn integrate_f(mu: Complex64, config: &SolverConfig) -> Result<BoundaryData> {
    integrate_f_from(mu, config.z0_for(mu.norm()), config)
}

/// As [`integrate_f`] with an explicit start abscissa.
pub fn integrate_f_from(mu: Complex64, z0: f64, config: &SolverConfig) -> Result<BoundaryData> {
    Ok(shoot_real_ray(mu, z0, &[], config)?.data)
}

/// Values of `f(x, mu)` at the requested abscissae, all in `[0, z0]`, from
/// a single integration pass.
pub fn solution_trace(
    mu: Complex64,
    sample_points: &[f64],
    config: &SolverConfig,
) -> Result<Vec<(f64, ScaledComplex)>> {
    if sample_points.is_empty() {
        return Ok(Vec::new());
    }
    let z0 = config.z0_for(mu.norm());
    Ok(shoot_real_ray(mu, z0, sample_points, config)?
        .samples
        .into_iter()
        .map(|(x, s)| (x, s.value()))
        .collect())
}

/// The two solutions `psi_+`, `psi_-` of `psi'' = (i x^3 - lambda) psi`
/// that decay as `x -> +∞` and `x -> -∞` respectively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    /// Rotated parameter `mu` with `psi(x) = f(c x, mu)`.
    pub fn mu(self, lambda: Complex64) -> Complex64 {
        match self {
            Side::Plus => Complex64::from_polar(1.0, 0.8 * PI) * lambda,
            Side::Minus => Complex64::from_polar(1.0, -0.8 * PI) * lambda,
        }
    }

    /// `c = dz/dx`: `alpha` for `psi_+` and `-1/alpha` for `psi_-`,
    /// with `alpha = exp(i pi / 10)`.
    pub fn chain_factor(self) -> Complex64 {
        match self {
            Side::Plus => Complex64::from_polar(1.0, 0.1 * PI),
            Side::Minus => -Complex64::from_polar(1.0, -0.1 * PI),
        }
    }

    /// Sign of the real abscissa where the solution decays.
    fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn conj(self) -> Self {
        match self {
            Side::Plus => Side::Minus,
            Side::Minus => Side::Plus,
        }
    }
}

fn shoot_psi(lambda: Complex64, side: Side, stops: &[f64], config: &SolverConfig) -> Result<Pass> {
    if !lambda.is_finite() {
        return Err(Error::Domain(format!("spectral parameter {lambda} is not finite")));
    }
    let mu = side.mu(lambda);
    let x0 = config.z0_for(lambda.norm());
    let c = side.chain_factor();
    let start = c * (side.sign() * x0);
    let params = LgParams::ray_local(mu, config.delta, x0)?;
    let envelope = error_control_variation(x0, &params)?;
    let (value, derivative) = recessive_asymptotics(start, mu)?;
    let run = integrate_linear(
        |x| Complex64::new(0.0, x * x * x) - lambda,
        side.sign() * x0,
        0.0,
        start_state(value, derivative.scale(c)),
        stops,
        &tolerances(config),
    )?;
    Ok(Pass {
        data: BoundaryData {
            mu,
            f0: run.end.value(),
            f1: run.end.derivative(),
            z0_used: x0,
            envelope,
            integrator_error: run.error_estimate,
            steps: run.steps,
        },
        samples: run.samples,
    })
}

/// `psi_±(0)` and `psi_±'(0)` by integrating the untransformed equation
/// along the real `x` axis from `±X0`. Agrees with `F0(mu)`, `c F1(mu)` of
/// [`Side::mu`] and [`Side::chain_factor`].
pub fn integrate_psi_direct(lambda: Complex64, side: Side, config: &SolverConfig) -> Result<BoundaryData> {
    Ok(shoot_psi(lambda, side, &[], config)?.data)
}

/// Values of `psi_±` at real abscissae between `0` and `±X0`.
pub fn psi_trace(
    lambda: Complex64,
    side: Side,
    sample_points: &[f64],
    config: &SolverConfig,
) -> Result<Vec<(f64, ScaledComplex)>> {
    if sample_points.is_empty() {
        return Ok(Vec::new());
    }
    Ok(shoot_psi(lambda, side, sample_points, config)?
        .samples
        .into_iter()
        .map(|(x, s)| (x, s.value()))
        .collect())
}

/// `W[f, g]` at each sample, where `f` is the recessive solution and `g`
/// the solution with `g(0) = 0`, `g'(0) = 1` integrated outward. Used to
/// check that the inward and outward passes describe one linear ODE.
pub fn wronskian_profile(
    mu: Complex64,
    sample_points: &[f64],
    config: &SolverConfig,
) -> Result<Vec<(f64, ScaledComplex)>> {
    let z0 = config.z0_for(mu.norm());
    let f = shoot_real_ray(mu, z0, sample_points, config)?;
    let g = integrate_linear(
        |x| Complex64::new(x * x * x, 0.0) + mu,
        0.0,
        z0,
        LinearState::new(Complex64::default(), Complex64::new(1.0, 0.0), 0.0),
        sample_points,
        &tolerances(config),
    )?;
    Ok(f.samples
        .iter()
        .zip(&g.samples)
        .map(|((x, fs), (_, gs))| {
            let w = (fs.value() * gs.derivative()).sub(&(fs.derivative() * gs.value()));
            (*x, w)
        })
        .collect())
}
