//! Semiclassical objects for `H = p^2 + i x^3`: the action constant `K`,
//! the quantization rule, the turning points and the action integral along
//! the polygonal chain `x_- -> 0 -> x_+`.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{integrate, integrate_real, QuadOptions};

/// Upper limit of the numerical part of the `K'` integral; the rest is summed
/// from the large-`t` expansion of the integrand.
const K_PRIME_CUTOFF: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WkbConstants {
    /// `K = 2 ∫_0^1 sqrt(1 - t^3) dt`
    pub k: f64,
    /// `K' = ∫_0^∞ (sqrt(t^3 + 1) - t^{3/2}) dt`
    pub k_prime: f64,
    /// Combined absolute error estimate of both quadratures.
    pub quadrature_error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WkbPrediction {
    pub n: u32,
    pub lambda0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TurningPoints {
    pub x_plus: Complex64,
    pub x_minus: Complex64,
    pub x_zero: Complex64,
    pub lambda: f64,
}

fn quad_opts() -> QuadOptions {
    QuadOptions {
        abs_tol: 1e-13,
        rel_tol: 1e-14,
        max_intervals: 4000,
    }
}

/// Computes `K` and `K'` by independent quadratures.
pub fn constant_k() -> Result<WkbConstants> {
    let opts = quad_opts();
    // t = 1 - s^2 removes the square-root endpoint at t = 1:
    // sqrt(1 - t^3) dt = 2 s^2 sqrt(1 + t + t^2) ds.
    let (half_k, err_k) = integrate_real(
        |s| {
            let t = 1.0 - s * s;
            2.0 * s * s * (1.0 + t + t * t).sqrt()
        },
        0.0,
        1.0,
        &opts,
    )?;

    // t = s^2 smooths the t^{3/2} term at the origin; the difference is
    // evaluated in the cancellation-free form 1 / (sqrt(t^3+1) + t^{3/2}).
    let (head, err_head) = integrate_real(
        |s| {
            let s3 = s * s * s;
            2.0 * s / ((s3 * s3 + 1.0).sqrt() + s3)
        },
        0.0,
        K_PRIME_CUTOFF.sqrt(),
        &opts,
    )?;
    let t = K_PRIME_CUTOFF;
    // ∫_T^∞ Σ_k binom(1/2,k) t^{3/2-3k} dt, k = 1..3
    let tail = t.powf(-0.5) - t.powf(-3.5) / (8.0 * 3.5) + t.powf(-6.5) / (16.0 * 6.5);

    Ok(WkbConstants {
        k: 2.0 * half_k,
        k_prime: head + tail,
        quadrature_error: 2.0 * err_k + err_head + t.powf(-9.5),
    })
}

/// `K`, computed once per process.
pub fn k() -> f64 {
    static K: OnceLock<f64> = OnceLock::new();
    *K.get_or_init(|| constant_k().expect("K quadrature converges").k)
}

/// Semiclassical eigenvalue `((2n+1) pi / (sqrt(3) K))^{6/5}`.
pub fn wkb_eigenvalue(n: u32) -> WkbPrediction {
    let lambda0 = ((2.0 * f64::from(n) + 1.0) * PI / (3f64.sqrt() * k())).powf(1.2);
    WkbPrediction { n, lambda0 }
}

/// The three roots of `i x^3 = lambda`.
pub fn turning_points(lambda: f64) -> Result<TurningPoints> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::Domain(format!(
            "turning points need lambda > 0, got {lambda}"
        )));
    }
    let r = lambda.cbrt();
    Ok(TurningPoints {
        x_plus: Complex64::from_polar(r, -PI / 6.0),
        x_minus: Complex64::from_polar(r, -5.0 * PI / 6.0),
        x_zero: Complex64::new(0.0, r),
        lambda,
    })
}

const BRANCH_SAMPLES: usize = 256;

/// `∫_0^end sqrt(lambda - i x^3) dx` along the straight segment, with the
/// square root continued from its principal value at `x = 0`. `end` is a
/// turning point, so the integrand has a square-root zero there.
fn segment_action(lambda: f64, end: Complex64, name: &'static str) -> Result<Complex64> {
    let i = Complex64::i();
    let radicand = |s: f64| Complex64::new(lambda, 0.0) - i * (end * s).powu(3);

    // Walk the segment and record where the principal root jumps.
    let mut sign = 1.0;
    let mut prev = radicand(0.0).sqrt();
    let mut pieces: Vec<(f64, f64, f64)> = Vec::new();
    let mut start = 0.0;
    for j in 1..=BRANCH_SAMPLES {
        let s = j as f64 / BRANCH_SAMPLES as f64;
        let r = radicand(s);
        if j < BRANCH_SAMPLES && r.norm() < 1e-12 * lambda {
            return Err(Error::Branch {
                segment: name,
                detail: format!("radicand vanishes inside the segment at s = {s}"),
            });
        }
        let p = r.sqrt();
        if j < BRANCH_SAMPLES && (p * sign - prev).norm() > (p * sign + prev).norm() {
            // The principal cut was crossed between the last two samples;
            // locate the crossing by bisection on the sign of Im r.
            let (mut a, mut b) = (s - 1.0 / BRANCH_SAMPLES as f64, s);
            let ima = radicand(a).im;
            if radicand(a).re >= 0.0 || ima * r.im > 0.0 {
                return Err(Error::Branch {
                    segment: name,
                    detail: format!("root jumps near s = {s} without crossing the cut"),
                });
            }
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if radicand(m).im * ima > 0.0 {
                    a = m;
                } else {
                    b = m;
                }
            }
            pieces.push((start, b, sign));
            start = b;
            sign = -sign;
        }
        prev = p * sign;
    }
    pieces.push((start, 1.0, sign));

    let opts = quad_opts();
    let last = pieces.len() - 1;
    let mut total = Complex64::default();
    for (idx, &(a, b, sgn)) in pieces.iter().enumerate() {
        let q = if idx == last {
            // s = 1 - u^2 smooths the turning-point endpoint.
            let width = (1.0 - a).sqrt();
            integrate(
                |u| radicand(1.0 - u * u).sqrt() * (2.0 * u * sgn),
                0.0,
                width,
                &opts,
            )?
        } else {
            integrate(|s| radicand(s).sqrt() * sgn, a, b, &opts)?
        };
        total += q.value;
    }
    Ok(total * end)
}

/// `2 ∫ p dx` over `x_- -> 0 -> x_+` with `p = sqrt(lambda - i x^3)`.
pub fn action_integral(lambda: f64) -> Result<Complex64> {
    let tp = turning_points(lambda)?;
    let plus = segment_action(lambda, tp.x_plus, "0 -> x_plus")?;
    let minus = segment_action(lambda, tp.x_minus, "x_minus -> 0")?;
    Ok((plus - minus) * 2.0)
}
