//! Dormand–Prince 5(4) integration of `y'' = Q(x) y` for complex `y`.
//!
//! The state `(y, y')` is kept as a pair of mantissas that share one real
//! log-scale. After every accepted step the pair is rescaled by a power of
//! two whenever the larger modulus leaves `[1/threshold, threshold]`, so the
//! integration can follow solutions that grow or decay by hundreds of
//! orders of magnitude. Because the equation is linear the rescaling is
//! exact and the step controller sees relative errors only.

use std::f64::consts::LN_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scaled::{pow2, ScaledComplex};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

// Proportional-integral controller constants.
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const MAX_SHRINK: f64 = 5.0;
const MAX_GROW: f64 = 0.1;

#[derive(Debug, Clone, Copy)]
pub struct Tolerances {
    pub rel: f64,
    pub abs: f64,
    pub renorm_threshold: f64,
    pub max_steps: usize,
}

/// `(y, y')` sharing one log-scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearState {
    pub y: Complex64,
    pub dy: Complex64,
    pub log_scale: f64,
}

impl LinearState {
    pub fn new(y: Complex64, dy: Complex64, log_scale: f64) -> Self {
        Self { y, dy, log_scale }
    }

    pub fn value(&self) -> ScaledComplex {
        ScaledComplex::new(self.y, self.log_scale)
    }

    pub fn derivative(&self) -> ScaledComplex {
        ScaledComplex::new(self.dy, self.log_scale)
    }

    /// Rescales by a power of two; returns the mantissa factor applied.
    fn renormalize(&mut self, threshold: f64) -> f64 {
        let m = self.y.norm().max(self.dy.norm());
        if m == 0.0 || !m.is_finite() || (m <= threshold && m >= threshold.recip()) {
            return 1.0;
        }
        let e = m.log2().floor() as i32;
        let factor = pow2(-e);
        self.y *= factor;
        self.dy *= factor;
        self.log_scale += f64::from(e) * LN_2;
        factor
    }
}

#[derive(Debug, Clone)]
pub struct Integration {
    pub end: LinearState,
    /// States at the requested stop abscissae, in the order requested.
    pub samples: Vec<(f64, LinearState)>,
    pub steps: usize,
    pub rejected: usize,
    /// Sum of the weighted local error estimates of the accepted steps,
    /// in units of relative error.
    pub error_estimate: f64,
}

type Pair = (Complex64, Complex64);

#[inline]
fn rhs<Q: Fn(f64) -> Complex64>(q: &Q, x: f64, u: Pair) -> Pair {
    (u.1, q(x) * u.0)
}

#[inline]
fn axpy(u: Pair, terms: &[(f64, Pair)], h: f64) -> Pair {
    let mut out = u;
    for &(c, k) in terms {
        out.0 += k.0 * (c * h);
        out.1 += k.1 * (c * h);
    }
    out
}

/// Integrates `y'' = q(x) y` from `x0` to `x1` (either direction), stopping
/// exactly at every abscissa in `stops` that lies in the closed interval.
pub fn integrate_linear<Q>(
    q: Q,
    x0: f64,
    x1: f64,
    init: LinearState,
    stops: &[f64],
    tol: &Tolerances,
) -> Result<Integration>
where
    Q: Fn(f64) -> Complex64,
{
    let dir = if x1 >= x0 { 1.0 } else { -1.0 };
    let (lo, hi) = if dir > 0.0 { (x0, x1) } else { (x1, x0) };
    for &s in stops {
        if !(lo..=hi).contains(&s) {
            return Err(Error::Domain(format!(
                "stop abscissa {s} outside integration interval [{lo}, {hi}]"
            )));
        }
    }
    // Stops in integration order, keeping the caller's indices.
    let mut order: Vec<usize> = (0..stops.len()).collect();
    order.sort_by(|&a, &b| (dir * stops[a]).total_cmp(&(dir * stops[b])));
    let mut samples: Vec<Option<(f64, LinearState)>> = vec![None; stops.len()];
    let mut next_stop = 0;

    let mut state = init;
    state.renormalize(tol.renorm_threshold);
    let mut x = x0;
    while next_stop < order.len() && stops[order[next_stop]] == x0 {
        samples[order[next_stop]] = Some((x0, state));
        next_stop += 1;
    }

    let span = (x1 - x0).abs();
    let mut h = if span == 0.0 {
        0.0
    } else {
        let rate = q(x0).norm().sqrt().max(1.0);
        (0.5 * tol.rel.powf(0.2) / rate).min(span)
    };
    let mut facold: f64 = 1e-4;
    let mut steps = 0;
    let mut rejected = 0;
    let mut error_estimate = 0.0;
    let mut k1 = rhs(&q, x, (state.y, state.dy));

    while (x1 - x) * dir > 0.0 {
        if steps + rejected >= tol.max_steps {
            return Err(Error::TooManySteps(tol.max_steps));
        }
        let target = if next_stop < order.len() {
            stops[order[next_stop]]
        } else {
            x1
        };
        let mut landing = false;
        if (x + dir * h - target) * dir >= 0.0 {
            h = (target - x).abs();
            landing = true;
        }
        if h <= 16.0 * f64::EPSILON * x.abs().max(1.0) {
            return Err(Error::StepCollapse { at: x, step: h });
        }
        let hs = dir * h;
        let u = (state.y, state.dy);
        let k2 = rhs(&q, x + C2 * hs, axpy(u, &[(A21, k1)], hs));
        let k3 = rhs(&q, x + C3 * hs, axpy(u, &[(A31, k1), (A32, k2)], hs));
        let k4 = rhs(&q, x + C4 * hs, axpy(u, &[(A41, k1), (A42, k2), (A43, k3)], hs));
        let k5 = rhs(
            &q,
            x + C5 * hs,
            axpy(u, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)], hs),
        );
        let x_new = if landing { target } else { x + hs };
        let k6 = rhs(
            &q,
            x_new,
            axpy(u, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)], hs),
        );
        let u_new = axpy(
            u,
            &[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)],
            hs,
        );
        let k7 = rhs(&q, x_new, u_new);
        let e = axpy(
            (Complex64::default(), Complex64::default()),
            &[(E1, k1), (E3, k3), (E4, k4), (E5, k5), (E6, k6), (E7, k7)],
            hs,
        );
        let sc0 = tol.abs + tol.rel * u.0.norm().max(u_new.0.norm());
        let sc1 = tol.abs + tol.rel * u.1.norm().max(u_new.1.norm());
        let err = (0.5 * ((e.0.norm() / sc0).powi(2) + (e.1.norm() / sc1).powi(2))).sqrt();
        if !err.is_finite() {
            h *= 0.2;
            rejected += 1;
            continue;
        }

        let fac11 = err.powf(EXPO1);
        if err <= 1.0 {
            let fac = (fac11 / facold.powf(BETA) / SAFETY).clamp(MAX_GROW, MAX_SHRINK);
            facold = err.max(1e-4);
            steps += 1;
            error_estimate += err * tol.rel;
            x = x_new;
            state.y = u_new.0;
            state.dy = u_new.1;
            let factor = state.renormalize(tol.renorm_threshold);
            k1 = (k7.0 * factor, k7.1 * factor);
            if landing {
                while next_stop < order.len() && stops[order[next_stop]] == target {
                    samples[order[next_stop]] = Some((target, state));
                    next_stop += 1;
                }
            }
            h /= fac;
        } else {
            rejected += 1;
            h /= (fac11 / SAFETY).min(MAX_SHRINK);
        }
    }

    Ok(Integration {
        end: state,
        samples: samples
            .into_iter()
            .map(|s| s.expect("every stop is reached"))
            .collect(),
        steps,
        rejected,
        error_estimate,
    })
}
