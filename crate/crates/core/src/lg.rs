//! Liouville–Green approximation of the solution of `f'' = (z^3 + lambda) f`
//! that decays along the positive real axis.
//!
//! With the split `q = z^3 + lambda0`, `q~ = lambda - lambda0` the
//! approximant is `q^{-1/4} exp(-xi)` with `xi' = q^{1/2}`, and its relative
//! error on `[x, ∞)` is bounded by `exp(V) - 1` where `V` is the variation
//! of the error-control function from `x` to infinity.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_geometric, QuadOptions};
use crate::scaled::ScaledComplex;
use crate::wkb;

/// Required dominance `z0^3 >= DOMINANCE |lambda|` of the cubic term at the
/// start abscissa.
pub const DOMINANCE: f64 = 10.0;

/// The tail expansion of `xi` is used once `x^3 >= TAIL_RATIO |lambda0|`.
const TAIL_RATIO: f64 = 4.0;

/// Where the phase integral `xi` is normalized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseAnchor {
    /// `xi(0) = -K lambda0^{5/6}`; requires `lambda0` in the sector
    /// `|arg| <= pi - delta` so that `q` has no zero on `[0, ∞)`.
    Origin,
    /// `xi(x) - (2/5) x^{5/2} -> 0` as `x -> ∞`, evaluated from the tail
    /// expansion. Only the ray `[z0, ∞)` needs to be free of zeros of `q`.
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LgParams {
    pub lambda: Complex64,
    pub lambda0: Complex64,
    pub delta: f64,
    pub z0: f64,
    pub anchor: PhaseAnchor,
}

impl LgParams {
    /// Decomposition anchored at the origin. `lambda0` must be zero or lie
    /// in `|arg lambda0| <= pi - delta`.
    pub fn new(lambda: Complex64, lambda0: Complex64, delta: f64, z0: f64) -> Result<Self> {
        check_common(lambda, delta, z0)?;
        check_sector(lambda0, delta)?;
        Ok(Self {
            lambda,
            lambda0,
            delta,
            z0,
            anchor: PhaseAnchor::Origin,
        })
    }

    /// `lambda0 = lambda` with the phase normalized at infinity. Valid for
    /// any complex `lambda`, since only `[z0, ∞)` is used.
    pub fn ray_local(lambda: Complex64, delta: f64, z0: f64) -> Result<Self> {
        check_common(lambda, delta, z0)?;
        Ok(Self {
            lambda,
            lambda0: lambda,
            delta,
            z0,
            anchor: PhaseAnchor::Infinity,
        })
    }
}

fn check_common(lambda: Complex64, delta: f64, z0: f64) -> Result<()> {
    if !(delta > 0.0 && delta < PI) {
        return Err(Error::Domain(format!("sector margin delta = {delta} outside (0, pi)")));
    }
    if !(z0.is_finite() && z0 > 0.0) {
        return Err(Error::Domain(format!("start abscissa z0 = {z0} must be positive")));
    }
    if z0.powi(3) < DOMINANCE * lambda.norm() {
        return Err(Error::Domain(format!(
            "z0 = {z0} violates z0^3 >= {DOMINANCE} |lambda| for |lambda| = {}",
            lambda.norm()
        )));
    }
    Ok(())
}

fn check_sector(lambda0: Complex64, delta: f64) -> Result<()> {
    if lambda0 != Complex64::default() && lambda0.arg().abs() > PI - delta {
        return Err(Error::Domain(format!(
            "lambda0 = {lambda0} outside the sector |arg| <= pi - {delta}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEnvelope {
    /// `lambda`-independent part of the variation.
    pub v: f64,
    /// Coefficient of `|lambda - lambda0|`.
    pub v_tilde: f64,
    pub total_v: f64,
    /// `exp(total_v) - 1`, the bound on the relative error.
    pub epsilon_max: f64,
}

fn quad_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-12,
        max_intervals: 4000,
    }
}

/// `xi(z) = (2/5) z^{5/2} - ∫_z^∞ (sqrt(t^3 + lambda0) - t^{3/2}) dt` along
/// the ray through `z`, summed from the binomial expansion in
/// `lambda0 / t^3`. Requires `|lambda0| < |z|^3`.
pub fn xi_tail(z: Complex64, lambda0: Complex64) -> Result<Complex64> {
    let u = lambda0 / z.powu(3);
    if u.norm() >= 0.5 {
        return Err(Error::Domain(format!(
            "tail expansion of xi needs |lambda0| < |z|^3 / 2 (z = {z}, lambda0 = {lambda0})"
        )));
    }
    let mut coeff = 1.0;
    let mut power = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.4, 0.0);
    for k in 1..400 {
        let kf = k as f64;
        coeff *= (1.5 - kf) / kf;
        power *= u;
        let term = power * (coeff / (3.0 * kf - 2.5));
        sum -= term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    Ok(z.powf(2.5) * sum)
}

/// Phase integral `xi(x, lambda0) = xi(0, lambda0) + ∫_0^x sqrt(t^3 + lambda0) dt`
/// with `xi(0, lambda0) = -K lambda0^{5/6}`; `(2/5) x^{5/2}` for `lambda0 = 0`.
pub fn xi_phase(x: f64, lambda0: Complex64, delta: f64) -> Result<Complex64> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::Domain(format!("xi_phase needs x >= 0, got {x}")));
    }
    if lambda0 == Complex64::default() {
        return Ok(Complex64::new(0.4 * x.powf(2.5), 0.0));
    }
    check_sector(lambda0, delta)?;
    if x.powi(3) >= TAIL_RATIO * lambda0.norm() {
        return xi_tail(Complex64::new(x, 0.0), lambda0);
    }
    let origin = -lambda0.powf(5.0 / 6.0) * wkb::k();
    let q = integrate(
        |t| (Complex64::new(t * t * t, 0.0) + lambda0).sqrt(),
        0.0,
        x,
        &quad_opts(),
    )?;
    Ok(origin + q.value)
}

fn xi_for(x: f64, params: &LgParams) -> Result<Complex64> {
    match params.anchor {
        PhaseAnchor::Origin => xi_phase(x, params.lambda0, params.delta),
        PhaseAnchor::Infinity => {
            if x.powi(3) < TAIL_RATIO * params.lambda0.norm() {
                return Err(Error::Singularity(format!(
                    "x = {x} too close to the zeros of q for an infinity-anchored phase"
                )));
            }
            xi_tail(Complex64::new(x, 0.0), params.lambda0)
        }
    }
}

fn q_at(x: f64, params: &LgParams) -> Result<Complex64> {
    let q = Complex64::new(x * x * x, 0.0) + params.lambda0;
    if q.norm() == 0.0 || !(x > 0.0 || params.lambda0 != Complex64::default()) {
        return Err(Error::Singularity(format!("q = x^3 + lambda0 vanishes at x = {x}")));
    }
    Ok(q)
}

/// `q(x)^{-1/4} exp(-xi(x, lambda0))` in scaled form.
pub fn lg_approximant(x: f64, params: &LgParams) -> Result<ScaledComplex> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::Domain(format!("lg_approximant needs x >= 0, got {x}")));
    }
    let q = q_at(x, params)?;
    let xi = xi_for(x, params)?;
    Ok(ScaledComplex::new(
        q.powf(-0.25) * Complex64::from_polar(1.0, -xi.im),
        -xi.re,
    ))
}

/// Value and derivative of the approximant at `z0`, sharing one log-scale.
/// The derivative is `-(q^{1/2} + q'/(4q))` times the value.
pub fn lg_initial_data(params: &LgParams) -> Result<(ScaledComplex, ScaledComplex)> {
    let z0 = params.z0;
    let value = lg_approximant(z0, params)?;
    let q = q_at(z0, params)?;
    let log_derivative = -(q.sqrt() + 3.0 * z0 * z0 / (q * 4.0));
    Ok((value, value.scale(log_derivative)))
}

/// Variation bounds `v`, `v~` on `[x, ∞)` and the resulting envelope.
pub fn error_control_variation(x: f64, params: &LgParams) -> Result<ErrorEnvelope> {
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::Domain(format!("variation needs x >= 0, got {x}")));
    }
    let lambda0 = params.lambda0;
    let l0 = lambda0.norm();
    if l0 == 0.0 && x == 0.0 {
        return Err(Error::Singularity("q = t^3 vanishes at the lower limit t = 0".into()));
    }
    if params.anchor == PhaseAnchor::Infinity
        && lambda0.arg().abs() > PI - params.delta
        && x.powi(3) <= 2.0 * l0
    {
        return Err(Error::Singularity(format!(
            "q may vanish on [{x}, ∞) for lambda0 = {lambda0}"
        )));
    }

    let upper = 1e3f64.max(10.0 * x.max(params.z0));
    let first = x.max(l0.cbrt()).max(1.0);
    let modq = |t: f64| (Complex64::new(t * t * t, 0.0) + lambda0).norm();
    let opts = quad_opts();
    let part = |f: &dyn Fn(f64) -> f64| -> Result<f64> {
        Ok(integrate_geometric(|t| Complex64::new(f(t), 0.0), x, upper, first, &opts)?
            .value
            .re)
    };
    let v1 = part(&|t| t.powi(4) * modq(t).powf(-2.5))?;
    let v2 = part(&|t| t * modq(t).powf(-1.5))?;
    let vt = part(&|t| modq(t).powf(-0.5))?;

    // |1 + u|^{-p} ≈ 1 - p Re u for u = lambda0 / t^3 beyond the cutoff.
    let t = upper;
    let re = lambda0.re;
    let tail1 = 0.4 * t.powf(-2.5) - 2.5 * re * t.powf(-5.5) / 5.5;
    let tail2 = 0.4 * t.powf(-2.5) - 1.5 * re * t.powf(-5.5) / 5.5;
    let tail_t = 2.0 * t.powf(-0.5) - 0.5 * re * t.powf(-3.5) / 3.5;

    let v = 45.0 / 16.0 * (v1 + tail1) + 1.5 * (v2 + tail2);
    let v_tilde = vt + tail_t;
    let total_v = v + (params.lambda - lambda0).norm() * v_tilde;
    Ok(ErrorEnvelope {
        v,
        v_tilde,
        total_v,
        epsilon_max: total_v.exp_m1(),
    })
}
