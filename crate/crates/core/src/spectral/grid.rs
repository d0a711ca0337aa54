//! `|h|` over a rectangle of the upper half-plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::h_function;
use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let r = Self {
            re_min,
            re_max,
            im_min,
            im_max,
        };
        let finite = [re_min, re_max, im_min, im_max].iter().all(|v| v.is_finite());
        if !finite || re_min > re_max || im_min > im_max {
            return Err(Error::Domain(format!("invalid rectangle {r:?}")));
        }
        Ok(r)
    }

    pub fn from_config(config: &SolverConfig) -> Result<Self> {
        Self::new(config.re_min, config.re_max, config.im_min, config.im_max)
    }

    /// Counter-clockwise corners starting at the lower left.
    pub fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub lambda: Complex64,
    pub abs_h: f64,
    pub arg_h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridScan {
    pub region: Rect,
    pub grid_shape: (usize, usize),
    pub max_abs_h: f64,
    pub argmax_point: Complex64,
    /// Grid points with `|h| >= 1`.
    pub violations: Vec<Complex64>,
    /// Row-major in the imaginary part: all real parts for the lowest
    /// imaginary part first.
    pub points: Vec<GridPoint>,
}

fn nodes(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
        .collect()
}

/// Evaluates `|h|` on an `nx` by `ny` grid spanning `region` inclusively.
pub fn verify_upper_half_plane(
    region: Rect,
    grid_shape: (usize, usize),
    config: &SolverConfig,
) -> Result<GridScan> {
    let (nx, ny) = grid_shape;
    if nx == 0 || ny == 0 {
        return Err(Error::Domain("grid needs at least one point per direction".into()));
    }
    if region.im_min.is_nan() || region.im_min <= 0.0 {
        return Err(Error::Domain(format!(
            "grid must lie strictly above the real axis, got im_min = {}",
            region.im_min
        )));
    }
    let xs = nodes(region.re_min, region.re_max, nx);
    let ys = nodes(region.im_min, region.im_max, ny);
    let lambdas: Vec<Complex64> = ys
        .iter()
        .flat_map(|&y| xs.iter().map(move |&x| Complex64::new(x, y)))
        .collect();
    let points = par::try_map(config.execution, &lambdas, |&lambda| {
        let h = h_function(lambda, config)?.h.expect("h_function fills h");
        Ok(GridPoint {
            lambda,
            abs_h: h.abs(),
            arg_h: h.arg(),
        })
    })?;
    let mut max_abs_h = f64::NEG_INFINITY;
    let mut argmax_point = lambdas[0];
    for p in &points {
        if p.abs_h > max_abs_h {
            max_abs_h = p.abs_h;
            argmax_point = p.lambda;
        }
    }
    let violations = points.iter().filter(|p| p.abs_h >= 1.0).map(|p| p.lambda).collect();
    Ok(GridScan {
        region,
        grid_shape,
        max_abs_h,
        argmax_point,
        violations,
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_grid_contracts() {
        let cfg = SolverConfig::default();
        let scan = verify_upper_half_plane(Rect::new(0.5, 6.0, 0.1, 3.0).unwrap(), (5, 4), &cfg).unwrap();
        assert_eq!(scan.points.len(), 20);
        assert!(scan.max_abs_h < 1.0);
        assert!(scan.violations.is_empty());
        assert_eq!(scan.points[1].lambda.im, 0.1);
    }

    #[test]
    fn single_point_grid() {
        let cfg = SolverConfig::default();
        let scan = verify_upper_half_plane(Rect::new(2.0, 2.0, 1.0, 1.0).unwrap(), (1, 1), &cfg).unwrap();
        assert_eq!(scan.points.len(), 1);
        assert_eq!(scan.argmax_point, Complex64::new(2.0, 1.0));
    }

    #[test]
    fn rejects_axis() {
        let cfg = SolverConfig::default();
        assert!(verify_upper_half_plane(Rect::new(1.0, 2.0, 0.0, 1.0).unwrap(), (2, 2), &cfg).is_err());
        assert!(Rect::new(2.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn near_axis_is_nearly_unimodular() {
        let h = h_function(Complex64::new(3.0, 1e-3), &SolverConfig::default()).unwrap().h.unwrap();
        let a = h.abs();
        assert!(a < 1.0 && (a - 1.0).abs() < 1e-2, "{a}");
    }
}
