//! Comparison of computed levels with the semiclassical prediction, and
//! the large-`lambda` form of `h`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{h_function, scan::nearest_wkb_index, EigenvalueRecord};
use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::par;
use crate::wkb::{self, wkb_eigenvalue};

/// Real parameters at which the large-`lambda` form of `h` is sampled.
pub const H_SAMPLES: [f64; 3] = [50.0, 100.0, 200.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WkbDifference {
    pub n: u32,
    pub lambda: f64,
    pub lambda0: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HAsymptoticSample {
    pub lambda: f64,
    pub h: Complex64,
    pub h0: Complex64,
    /// `|h - h0| lambda^{5/6}`.
    pub scaled_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WkbComparison {
    pub differences: Vec<WkbDifference>,
    /// `|lambda_n - lambda_n^0|` strictly decreases from `n = 3` on.
    pub decreasing_from_3: bool,
    pub h_samples: Vec<HAsymptoticSample>,
    /// No scaled deviation exceeds twice the first one.
    pub h_bounded: bool,
}

/// `exp(-2 pi i/5) exp(i sqrt(3) K lambda^{5/6})`.
pub fn h_leading(lambda: f64) -> Complex64 {
    Complex64::from_polar(1.0, -0.4 * PI + 3f64.sqrt() * wkb::k() * lambda.powf(5.0 / 6.0))
}

pub fn compare_wkb(records: &[EigenvalueRecord], config: &SolverConfig) -> Result<WkbComparison> {
    let mut differences: Vec<WkbDifference> = Vec::with_capacity(records.len());
    for r in records {
        let n = nearest_wkb_index(r.lambda);
        if let Some(prev) = differences.iter().find(|d| d.n == n) {
            return Err(Error::Pairing {
                first: prev.lambda,
                second: r.lambda,
                n,
            });
        }
        let lambda0 = wkb_eigenvalue(n).lambda0;
        differences.push(WkbDifference {
            n,
            lambda: r.lambda,
            lambda0,
            difference: (r.lambda - lambda0).abs(),
        });
    }
    differences.sort_by_key(|d| d.n);
    let tail: Vec<f64> = differences.iter().filter(|d| d.n >= 3).map(|d| d.difference).collect();
    let decreasing_from_3 = tail.len() >= 2 && tail.windows(2).all(|w| w[1] < w[0]);

    let h_samples = par::try_map(config.execution, &H_SAMPLES, |&lambda| {
        let h = h_function(Complex64::new(lambda, 0.0), config)?
            .h
            .expect("h_function fills h")
            .to_complex();
        let h0 = h_leading(lambda);
        Ok(HAsymptoticSample {
            lambda,
            h,
            h0,
            scaled_deviation: (h - h0).norm() * lambda.powf(5.0 / 6.0),
        })
    })?;
    let first = h_samples[0].scaled_deviation;
    let h_bounded = h_samples.iter().all(|s| s.scaled_deviation <= 2.0 * first);
    Ok(WkbComparison {
        differences,
        decreasing_from_3,
        h_samples,
        h_bounded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(lambda: f64) -> EigenvalueRecord {
        EigenvalueRecord {
            order_index: 0,
            lambda,
            wkb_index: 0,
            wkb_lambda0: 0.0,
            residual_w: 0.0,
            dw_dlambda_mag: 1.0,
            simple: true,
            h_phase_residual: 0.0,
        }
    }

    #[test]
    fn duplicate_pairing_is_an_error() {
        let cfg = SolverConfig::default();
        let e = compare_wkb(&[record(1.15), record(1.2)], &cfg).unwrap_err();
        assert!(matches!(e, Error::Pairing { n: 0, .. }));
    }

    #[test]
    fn ground_state_offset_and_h_bound() {
        let cfg = SolverConfig::default();
        let c = compare_wkb(&[record(1.156_267_071_988)], &cfg).unwrap();
        assert!((c.differences[0].difference - 0.062).abs() < 1e-3);
        assert!(c.h_bounded);
        for s in &c.h_samples {
            assert!((s.scaled_deviation - 0.12447).abs() < 1e-3, "{s:?}");
        }
    }
}
