//! Zero counting by the argument principle on a rectangle.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{grid::Rect, wronskian};
use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::par;

/// Largest phase increment accepted between neighbouring contour samples.
const MAX_PHASE_STEP: f64 = PI / 4.0;
/// Initial sample spacing along each edge.
const INITIAL_SPACING: f64 = 0.25;
const MAX_ROUNDS: usize = 30;
/// Accepted distance of the raw winding from the nearest integer.
const INTEGER_SLACK: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Winding {
    /// Total phase change of `W` divided by `2 pi`.
    pub winding: f64,
    pub zeros: u32,
    /// Smallest normalized `|W|` met on the contour.
    pub min_normalized_w: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy)]
struct Sample {
    lambda: Complex64,
    arg: f64,
}

fn wrap(d: f64) -> f64 {
    let r = d.rem_euclid(2.0 * PI);
    if r > PI {
        r - 2.0 * PI
    } else {
        r
    }
}

/// Winding number of `W` around the boundary of `rect`.
pub fn winding_number(rect: Rect, config: &SolverConfig) -> Result<Winding> {
    if rect.re_min >= rect.re_max || rect.im_min >= rect.im_max {
        return Err(Error::Domain(format!("degenerate contour {rect:?}")));
    }
    let mut min_norm = f64::INFINITY;
    let mut evaluations = 0;
    let mut eval = |points: &[Complex64]| -> Result<Vec<Sample>> {
        let out = par::try_map(config.execution, points, |&l| {
            let s = wronskian(l, config)?;
            Ok((l, s.w.expect("wronskian fills w").arg(), s.w_normalized.unwrap_or(0.0)))
        })?;
        evaluations += out.len();
        out.into_iter()
            .map(|(lambda, arg, norm)| {
                min_norm = min_norm.min(norm);
                if norm < config.contour_min_rel {
                    return Err(Error::ContourNearZero { at: lambda, relative: norm });
                }
                Ok(Sample { lambda, arg })
            })
            .collect()
    };

    let corners = rect.corners();
    let mut path = Vec::new();
    for k in 0..4 {
        let (a, b) = (corners[k], corners[(k + 1) % 4]);
        let n = ((b - a).norm() / INITIAL_SPACING).ceil().max(4.0) as usize;
        path.extend((0..n).map(|i| a + (b - a) * (i as f64 / n as f64)));
    }
    let mut samples = eval(&path)?;

    for _ in 0..MAX_ROUNDS {
        let len = samples.len();
        let coarse: Vec<usize> = (0..len)
            .filter(|&i| wrap(samples[(i + 1) % len].arg - samples[i].arg).abs() > MAX_PHASE_STEP)
            .collect();
        if coarse.is_empty() {
            let total: f64 = (0..len)
                .map(|i| wrap(samples[(i + 1) % len].arg - samples[i].arg))
                .sum();
            let winding = total / (2.0 * PI);
            let rounded = winding.round();
            if (winding - rounded).abs() > INTEGER_SLACK || rounded < 0.0 {
                return Err(Error::NonIntegerWinding { winding });
            }
            return Ok(Winding {
                winding,
                zeros: rounded as u32,
                min_normalized_w: min_norm,
                evaluations,
            });
        }
        let mids: Vec<Complex64> = coarse
            .iter()
            .map(|&i| 0.5 * (samples[i].lambda + samples[(i + 1) % len].lambda))
            .collect();
        let new = eval(&mids)?;
        let mut merged = Vec::with_capacity(len + new.len());
        let mut next = coarse.iter().zip(new).peekable();
        for (i, s) in samples.into_iter().enumerate() {
            merged.push(s);
            if let Some((_, m)) = next.next_if(|(&j, _)| j == i) {
                merged.push(m);
            }
        }
        samples = merged;
    }
    Err(Error::RefinementExhausted {
        lo: rect.re_min,
        hi: rect.re_max,
        depth: MAX_ROUNDS,
    })
}

/// Number of zeros of `W`, with multiplicity, inside `rect`.
pub fn count_zeros_argument_principle(rect: Rect, config: &SolverConfig) -> Result<u32> {
    Ok(winding_number(rect, config)?.zeros)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isolates_the_first_level() {
        let cfg = SolverConfig::default();
        assert_eq!(count_zeros_argument_principle(Rect::new(0.5, 2.0, -0.5, 0.5).unwrap(), &cfg).unwrap(), 1);
        assert_eq!(count_zeros_argument_principle(Rect::new(2.0, 3.0, -0.5, 0.5).unwrap(), &cfg).unwrap(), 0);
    }

    #[test]
    fn contour_through_a_root_is_rejected() {
        let cfg = SolverConfig::default();
        let r = Rect::new(1.156_267_071_988, 2.0, -0.5, 0.0).unwrap();
        let e = winding_number(r, &cfg).unwrap_err();
        assert!(matches!(e, Error::ContourNearZero { .. }), "{e:?}");
    }
}
