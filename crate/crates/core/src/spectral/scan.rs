//! Real-axis eigenvalue search.
//!
//! The phase `theta` of `conj(psi) psi'` at `x = 0` advances by about `pi`
//! between consecutive eigenvalues, which sit at `theta = pi/2 mod pi`. The
//! scan samples `theta` on a grid a quarter of the smallest semiclassical
//! spacing wide, subdivides any cell whose phase jump is too large to
//! unwrap, and refines every crossing on the sign-definite normalized
//! Wronskian.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{constants, h_function, real_discriminant, wronskian, RealDiscriminant};
use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::par;
use crate::shoot::Side;
use crate::wkb::{self, wkb_eigenvalue};

/// Bracket width at which bisection hands over to false position.
const BISECTION_WIDTH: f64 = 1e-2;
const MAX_REFINE_ITERATIONS: usize = 300;
/// How many semiclassical levels past the requested count the scan may
/// extend before giving up.
const MAX_EXTRA_LEVELS: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueRecord {
    pub order_index: usize,
    pub lambda: f64,
    pub wkb_index: u32,
    pub wkb_lambda0: f64,
    /// Normalized Wronskian at `lambda`, in `[0, 1]`.
    pub residual_w: f64,
    /// Central-difference derivative of the normalized Wronskian.
    pub dw_dlambda_mag: f64,
    pub simple: bool,
    /// `|h(lambda) + 1/omega|`.
    pub h_phase_residual: f64,
}

/// Index of the semiclassical level nearest to `lambda`.
pub(crate) fn nearest_wkb_index(lambda: f64) -> u32 {
    let k = wkb::k();
    let guess = ((3f64.sqrt() * k * lambda.max(0.0).powf(5.0 / 6.0) / PI - 1.0) / 2.0).round();
    let centre = guess.max(0.0) as u32;
    let lo = centre.saturating_sub(1);
    (lo..=centre + 1)
        .min_by(|&a, &b| {
            let da = (wkb_eigenvalue(a).lambda0 - lambda).abs();
            let db = (wkb_eigenvalue(b).lambda0 - lambda).abs();
            da.total_cmp(&db)
        })
        .unwrap_or(0)
}

/// Number of crossings of `pi/2 + k pi` going from `a` to `b`.
fn crossings(a: f64, b: f64) -> i64 {
    let index = |t: f64| ((t - FRAC_PI_2) / PI).floor() as i64;
    (index(b) - index(a)).abs()
}

fn wrap(d: f64) -> f64 {
    let r = d.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

struct Cell {
    a: RealDiscriminant,
    b: RealDiscriminant,
}

/// Brackets of phase crossings inside one cell, refining until each
/// sub-cell can be unwrapped unambiguously.
fn cell_brackets(
    cell: Cell,
    side: Side,
    depth: usize,
    config: &SolverConfig,
    out: &mut Vec<(f64, f64)>,
) -> Result<()> {
    let d = wrap(cell.b.phase - cell.a.phase);
    if d.abs() > FRAC_PI_2 {
        if depth >= config.max_refine_depth {
            return Err(Error::RefinementExhausted {
                lo: cell.a.lambda,
                hi: cell.b.lambda,
                depth,
            });
        }
        let mid = real_discriminant(0.5 * (cell.a.lambda + cell.b.lambda), side, config)?;
        cell_brackets(Cell { a: cell.a, b: mid }, side, depth + 1, config, out)?;
        return cell_brackets(Cell { a: mid, b: cell.b }, side, depth + 1, config, out);
    }
    match crossings(cell.a.phase, cell.a.phase + d) {
        0 => Ok(()),
        1 => {
            out.push((cell.a.lambda, cell.b.lambda));
            Ok(())
        }
        // Unreachable while |d| <= pi/2, kept for safety under edits.
        _ => Err(Error::RefinementExhausted {
            lo: cell.a.lambda,
            hi: cell.b.lambda,
            depth,
        }),
    }
}

fn brackets_in(lo: f64, hi: f64, step: f64, side: Side, config: &SolverConfig) -> Result<Vec<(f64, f64)>> {
    let cells = ((hi - lo) / step).ceil().max(1.0) as usize;
    let nodes: Vec<f64> = (0..=cells)
        .map(|i| if i == cells { hi } else { lo + step * i as f64 })
        .collect();
    let samples = par::try_map(config.execution, &nodes, |&l| real_discriminant(l, side, config))?;
    let pairs: Vec<(RealDiscriminant, RealDiscriminant)> =
        samples.windows(2).map(|w| (w[0], w[1])).collect();
    let per_cell = par::try_map(config.execution, &pairs, |&(a, b)| {
        let mut out = Vec::new();
        cell_brackets(Cell { a, b }, side, 0, config, &mut out)?;
        Ok(out)
    })?;
    Ok(per_cell.into_iter().flatten().collect())
}

/// The first `n_max` real eigenvalues with certificates, sorted.
pub fn scan_real_eigenvalues(n_max: usize, config: &SolverConfig) -> Result<Vec<EigenvalueRecord>> {
    scan_real_eigenvalues_with(n_max, Side::Plus, config)
}

/// As [`scan_real_eigenvalues`], with the discriminant built from the
/// chosen side. The two sides are related by complex conjugation, so both
/// must give the same spectrum.
pub fn scan_real_eigenvalues_with(
    n_max: usize,
    side: Side,
    config: &SolverConfig,
) -> Result<Vec<EigenvalueRecord>> {
    if n_max == 0 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    config.validate()?;
    let level = |n: u32| wkb_eigenvalue(n).lambda0;
    let step = (level(1) - level(0)) / 4.0;
    let mut lo = config.scan_start;
    let mut n_hi = n_max as u32;
    let mut brackets = Vec::new();
    loop {
        let hi = 0.5 * (level(n_hi - 1) + level(n_hi));
        if hi > lo {
            brackets.extend(brackets_in(lo, hi, step, side, config)?);
            lo = hi;
        }
        if brackets.len() >= n_max {
            break;
        }
        if n_hi >= n_max as u32 + MAX_EXTRA_LEVELS {
            return Err(Error::RefinementExhausted {
                lo: config.scan_start,
                hi,
                depth: brackets.len(),
            });
        }
        n_hi += 1;
    }
    brackets.truncate(n_max);
    let mut records = par::try_map(config.execution, &brackets, |&b| refine_root_with(b, side, config))?;
    records.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    for (i, r) in records.iter_mut().enumerate() {
        r.order_index = i;
    }
    Ok(records)
}

/// Refines a bracket of the real discriminant to a certified root.
pub fn refine_root(bracket: (f64, f64), config: &SolverConfig) -> Result<EigenvalueRecord> {
    refine_root_with(bracket, Side::Plus, config)
}

pub fn refine_root_with(bracket: (f64, f64), side: Side, config: &SolverConfig) -> Result<EigenvalueRecord> {
    let f = |l: f64| real_discriminant(l, side, config).map(|d| d.w_hat);
    let (mut a, mut b) = if bracket.0 <= bracket.1 {
        bracket
    } else {
        (bracket.1, bracket.0)
    };
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa * fb > 0.0 {
        return Err(Error::InconsistentBracket { lo: a, hi: b });
    }
    let mut root = None;
    if fa == 0.0 {
        root = Some(a);
    } else if fb == 0.0 {
        root = Some(b);
    }

    let mut iterations = 0;
    // +1 when the last step kept b, -1 when it kept a.
    let mut kept = 0i8;
    while root.is_none() && b - a > config.root_tol {
        iterations += 1;
        if iterations > MAX_REFINE_ITERATIONS {
            return Err(Error::RefinementExhausted {
                lo: a,
                hi: b,
                depth: iterations,
            });
        }
        let polishing = b - a <= BISECTION_WIDTH;
        let mut x = if polishing {
            (a * fb - b * fa) / (fb - fa)
        } else {
            0.5 * (a + b)
        };
        if !(x > a && x < b) {
            x = 0.5 * (a + b);
        }
        let fx = f(x)?;
        if fx == 0.0 {
            root = Some(x);
        } else if fx * fb < 0.0 {
            a = x;
            fa = fx;
            if polishing && kept == 1 {
                fb *= 0.5;
            }
            kept = 1;
        } else {
            b = x;
            fb = fx;
            if polishing && kept == -1 {
                fa *= 0.5;
            }
            kept = -1;
        }
    }
    let lambda = root.unwrap_or(0.5 * (a + b));
    certify(lambda, side, config)
}

fn certify(lambda: f64, side: Side, config: &SolverConfig) -> Result<EigenvalueRecord> {
    let residual_w = real_discriminant(lambda, side, config)?.w_hat.abs();
    let step = config.fd_step;
    let up = real_discriminant(lambda + step, side, config)?.w_hat;
    let down = real_discriminant(lambda - step, side, config)?.w_hat;
    let dw_dlambda_mag = ((up - down) / (2.0 * step)).abs();
    let h = h_function(Complex64::new(lambda, 0.0), config)?
        .h
        .map(|h| h.to_complex())
        .unwrap_or_default();
    let wkb_index = nearest_wkb_index(lambda);
    Ok(EigenvalueRecord {
        order_index: 0,
        lambda,
        wkb_index,
        wkb_lambda0: wkb_eigenvalue(wkb_index).lambda0,
        residual_w,
        dw_dlambda_mag,
        simple: dw_dlambda_mag * config.simplicity_tol > 10.0 * residual_w,
        h_phase_residual: (h - constants().target).norm(),
    })
}

/// Secant iteration on the two-sided Wronskian in the complex plane,
/// started at a real root estimate. The imaginary part of the result
/// measures how far the numerical zero is from the real axis.
pub fn polish_complex_root(start: f64, config: &SolverConfig) -> Result<Complex64> {
    let w = |l: Complex64| -> Result<crate::scaled::ScaledComplex> {
        wronskian(l, config)?
            .w
            .ok_or_else(|| Error::Domain("missing Wronskian".into()))
    };
    let mut l0 = Complex64::new(start, 1e-4);
    let mut l1 = Complex64::new(start, -1e-4);
    let mut w0 = w(l0)?;
    let mut w1 = w(l1)?;
    for _ in 0..50 {
        if w1.is_zero() {
            break;
        }
        let r = w0.ratio(&w1);
        let l2 = l1 - (l1 - l0) / (1.0 - r);
        if !l2.is_finite() {
            break;
        }
        l0 = l1;
        w0 = w1;
        l1 = l2;
        w1 = w(l1)?;
        if (l1 - l0).norm() <= config.root_tol {
            break;
        }
    }
    Ok(l1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn crossing_count() {
        assert_eq!(crossings(1.0, 2.0), 1);
        assert_eq!(crossings(2.0, 1.0), 1);
        assert_eq!(crossings(0.0, 1.0), 0);
        assert_eq!(crossings(-2.0, -1.0), 1);
    }

    #[test]
    fn nearest_level() {
        assert_eq!(nearest_wkb_index(1.15), 0);
        assert_eq!(nearest_wkb_index(4.1), 1);
        assert_eq!(nearest_wkb_index(37.47), 9);
        assert_eq!(nearest_wkb_index(0.01), 0);
    }

    #[test]
    fn refine_first_bracket() {
        let r = refine_root((1.0, 1.3), &cfg()).unwrap();
        assert!((r.lambda - 1.156_267_071_988).abs() < 1e-8, "{}", r.lambda);
        assert!(r.simple);
        assert!(r.h_phase_residual < 1e-6);
        assert_eq!(r.wkb_index, 0);
    }

    #[test]
    fn bracket_without_sign_change() {
        assert!(matches!(
            refine_root((2.0, 2.5), &cfg()),
            Err(Error::InconsistentBracket { .. })
        ));
    }

    #[test]
    fn first_four_levels() {
        let expected = [1.156_267_071_988, 4.109_228_752_810, 7.562_273_854_978, 11.314_421_820_196];
        let records = scan_real_eigenvalues(4, &cfg()).unwrap();
        assert_eq!(records.len(), 4);
        for (r, e) in records.iter().zip(expected) {
            assert!((r.lambda - e).abs() < 1e-8, "{} vs {e}", r.lambda);
        }
    }

    #[test]
    fn complex_polish_stays_real() {
        let l = polish_complex_root(4.109_228_75, &cfg()).unwrap();
        assert!(l.im.abs() < 1e-8, "{l}");
        assert!((l.re - 4.109_228_752_810).abs() < 1e-8);
    }
}
