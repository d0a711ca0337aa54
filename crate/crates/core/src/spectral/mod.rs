//! Eigenvalue detection for `H = p^2 + i x^3`.
//!
//! `lambda` is an eigenvalue exactly when the solutions `psi_+` and `psi_-`
//! decaying at `±∞` are proportional. Three equivalent detectors are
//! provided: the Wronskian `W = psi_+ psi_-' - psi_+' psi_-` at `x = 0`,
//! the ratio `h = psi_+(0) / psi_-(0)` against its eigen-value `-1/omega`,
//! and the Stokes multiplier `C`. All are assembled from [`integrate_f`]
//! at rotated parameters.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::scaled::ScaledComplex;
use crate::shoot::{integrate_f, BoundaryData, Side};

pub mod asymptotics;
pub mod grid;
pub mod scan;
pub mod winding;

pub use asymptotics::{compare_wkb, HAsymptoticSample, WkbComparison, WkbDifference};
pub use grid::{verify_upper_half_plane, GridPoint, GridScan, Rect};
pub use scan::{
    polish_complex_root, refine_root, refine_root_with, scan_real_eigenvalues, scan_real_eigenvalues_with,
    EigenvalueRecord,
};
pub use winding::{count_zeros_argument_principle, winding_number, Winding};

/// Ratios collapse to plain complex numbers only while the net scale stays
/// below `e^30`.
const COLLAPSE_LOG_SCALE: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constants {
    /// `exp(2 pi i / 5)`
    pub omega: Complex64,
    /// `exp(i pi / 10)`
    pub alpha: Complex64,
    /// `-1/omega`, the value of `h` at an eigenvalue.
    pub target: Complex64,
}

pub fn constants() -> Constants {
    let omega = Complex64::from_polar(1.0, 0.4 * PI);
    Constants {
        omega,
        alpha: Complex64::from_polar(1.0, 0.1 * PI),
        target: -omega.inv(),
    }
}

/// A ratio of scaled quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ratio {
    Plain(Complex64),
    /// Magnitude beyond `e^{±30}`; kept in scaled form.
    Scaled(ScaledComplex),
}

impl Ratio {
    pub fn from_scaled(s: ScaledComplex) -> Self {
        if s.ln_abs().abs() < COLLAPSE_LOG_SCALE {
            Ratio::Plain(s.to_complex())
        } else {
            Ratio::Scaled(s)
        }
    }

    pub fn scaled(&self) -> ScaledComplex {
        match *self {
            Ratio::Plain(z) => ScaledComplex::from_complex(z),
            Ratio::Scaled(s) => s,
        }
    }

    /// Plain value; overflows to infinity or underflows to zero if scaled.
    pub fn to_complex(&self) -> Complex64 {
        self.scaled().to_complex()
    }

    pub fn abs(&self) -> f64 {
        self.scaled().abs()
    }

    pub fn arg(&self) -> f64 {
        self.scaled().arg()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscriminantSample {
    pub lambda: Complex64,
    /// Wronskian of `psi_+`, `psi_-` at 0.
    pub w: Option<ScaledComplex>,
    /// `|W| / (|psi_+ psi_-'| + |psi_+' psi_-|)`; small near eigenvalues
    /// independently of the overall scale.
    pub w_normalized: Option<f64>,
    pub h: Option<Ratio>,
    pub c: Option<Ratio>,
    /// `|C| |F0(lambda)| / (|F0(omega^3 lambda)| + |F0(omega^{-3} lambda)|)`.
    pub c_normalized: Option<f64>,
}

impl DiscriminantSample {
    fn empty(lambda: Complex64) -> Self {
        Self {
            lambda,
            w: None,
            w_normalized: None,
            h: None,
            c: None,
            c_normalized: None,
        }
    }
}

/// Boundary data of `psi_±` at `x = 0`: value and `x`-derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsiData {
    pub value: ScaledComplex,
    pub derivative: ScaledComplex,
}

impl PsiData {
    fn from_boundary(d: &BoundaryData, side: Side) -> Self {
        Self {
            value: d.f0,
            derivative: d.f1.scale(side.chain_factor()),
        }
    }
}

pub fn psi_at_origin(lambda: Complex64, side: Side, config: &SolverConfig) -> Result<PsiData> {
    let d = integrate_f(side.mu(lambda), config)?;
    Ok(PsiData::from_boundary(&d, side))
}

fn both_sides(lambda: Complex64, config: &SolverConfig) -> Result<(PsiData, PsiData)> {
    Ok((
        psi_at_origin(lambda, Side::Plus, config)?,
        psi_at_origin(lambda, Side::Minus, config)?,
    ))
}

fn wronskian_parts(p: &PsiData, m: &PsiData) -> (ScaledComplex, f64) {
    let a = p.value * m.derivative;
    let b = p.derivative * m.value;
    let w = a.sub(&b);
    let size = a.ln_abs().max(b.ln_abs());
    let norm = (w.ln_abs() - size).exp() / (1.0 + (a.ln_abs().min(b.ln_abs()) - size).exp());
    (w, norm)
}

/// `W(lambda)` from independent integrations of both sides.
pub fn wronskian(lambda: Complex64, config: &SolverConfig) -> Result<DiscriminantSample> {
    let (p, m) = both_sides(lambda, config)?;
    let (w, norm) = wronskian_parts(&p, &m);
    Ok(DiscriminantSample {
        w: Some(w),
        w_normalized: Some(norm),
        ..DiscriminantSample::empty(lambda)
    })
}

/// Sign-definite normalized Wronskian for real `lambda`, computed from one
/// side only.
///
/// For real `lambda` the PT symmetry gives `psi_-(x) = conj(psi_+(-x))`, so
/// `W = -2 Re(conj(psi_+) psi_+') = 2 Re(conj(psi_-) psi_-')`. The result is
/// `W / (|psi_+ psi_-'| + |psi_+' psi_-|)`, which lies in `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RealDiscriminant {
    pub lambda: f64,
    pub w_hat: f64,
    /// Phase of `conj(psi) psi'` for the chosen side; eigenvalues sit at
    /// `pi/2 mod pi`.
    pub phase: f64,
}

pub fn real_discriminant(lambda: f64, side: Side, config: &SolverConfig) -> Result<RealDiscriminant> {
    let psi = psi_at_origin(Complex64::new(lambda, 0.0), side, config)?;
    let z = psi.value.conj() * psi.derivative;
    let phase = z.arg();
    let cos = phase.cos();
    let w_hat = match side {
        Side::Plus => -cos,
        Side::Minus => cos,
    };
    Ok(RealDiscriminant { lambda, w_hat, phase })
}

/// `h(lambda) = F0(e^{4 pi i/5} lambda) / F0(e^{-4 pi i/5} lambda)`.
pub fn h_function(lambda: Complex64, config: &SolverConfig) -> Result<DiscriminantSample> {
    let p = integrate_f(Side::Plus.mu(lambda), config)?;
    let m = integrate_f(Side::Minus.mu(lambda), config)?;
    if m.f0.is_zero() {
        return Err(Error::Pole(format!("psi_-(0) vanishes at lambda = {lambda}")));
    }
    Ok(DiscriminantSample {
        h: Some(Ratio::from_scaled(p.f0 / m.f0)),
        ..DiscriminantSample::empty(lambda)
    })
}

/// `C(lambda) = [F0(omega^3 lambda) + omega F0(omega^{-3} lambda)] / F0(lambda)`.
pub fn stokes_multiplier(lambda: Complex64, config: &SolverConfig) -> Result<DiscriminantSample> {
    let omega = constants().omega;
    // omega^3 = e^{-4 pi i/5}, so the two rotated values are psi_∓(0).
    let minus = integrate_f(Side::Minus.mu(lambda), config)?.f0;
    let plus = integrate_f(Side::Plus.mu(lambda), config)?.f0;
    let base = integrate_f(lambda, config)?.f0;
    if base.is_zero() {
        return Err(Error::Pole(format!("f(0, lambda) vanishes at lambda = {lambda}")));
    }
    let weighted = plus.scale(omega);
    let num = minus.add(&weighted);
    let size = minus.ln_abs().max(weighted.ln_abs());
    let c = num / base;
    let c_normalized = (num.ln_abs() - size).exp();
    Ok(DiscriminantSample {
        c: Some(Ratio::from_scaled(c)),
        c_normalized: Some(c_normalized),
        ..DiscriminantSample::empty(lambda)
    })
}

/// All three detectors at one point.
pub fn discriminants(lambda: Complex64, config: &SolverConfig) -> Result<DiscriminantSample> {
    let w = wronskian(lambda, config)?;
    let h = h_function(lambda, config)?;
    let c = stokes_multiplier(lambda, config)?;
    Ok(DiscriminantSample {
        lambda,
        w: w.w,
        w_normalized: w.w_normalized,
        h: h.h,
        c: c.c,
        c_normalized: c.c_normalized,
    })
}
