//! Complex numbers carried as `mantissa * exp(log_scale)`.
//!
//! Boundary values of the shooting problem grow like `exp(K |mu|^{5/6})` and
//! the starting data decay like `exp(-(2/5) z0^{5/2})`; neither fits in an
//! `f64` once `|mu|` reaches a few hundred. Every quantity that can over- or
//! underflow is therefore stored with a separate real log-scale, and only
//! collapsed to a plain `Complex64` for ratios whose net scale is modest.

use std::f64::consts::LN_2;
use std::fmt;
use std::ops::{Div, Mul, Neg};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Binary exponent bounding the mantissa modulus: `2^-30 <= |m| <= 2^30`.
pub const MANTISSA_RANGE_EXP: i32 = 30;

#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaledComplex {
    mantissa: Complex64,
    log_scale: f64,
}

impl ScaledComplex {
    pub const ZERO: Self = Self {
        mantissa: Complex64::new(0.0, 0.0),
        log_scale: 0.0,
    };

    /// Builds `mantissa * exp(log_scale)` and renormalizes the mantissa into range.
    pub fn new(mantissa: Complex64, log_scale: f64) -> Self {
        Self {
            mantissa,
            log_scale,
        }
        .normalized()
    }

    pub fn from_complex(z: Complex64) -> Self {
        Self::new(z, 0.0)
    }

    /// `exp(ln)` without materializing the exponential of the real part.
    pub fn from_log(ln: Complex64) -> Self {
        Self::new(Complex64::from_polar(1.0, ln.im), ln.re)
    }

    pub fn mantissa(&self) -> Complex64 {
        self.mantissa
    }

    pub fn log_scale(&self) -> f64 {
        self.log_scale
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa == Complex64::new(0.0, 0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.mantissa.is_finite() && self.log_scale.is_finite()
    }

    /// Natural log of the modulus; `-inf` for zero.
    pub fn ln_abs(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.mantissa.norm().ln() + self.log_scale
        }
    }

    /// Modulus as a plain float. Overflows to `inf` or underflows to zero
    /// when the scale is out of `f64` range.
    pub fn abs(&self) -> f64 {
        self.ln_abs().exp()
    }

    pub fn arg(&self) -> f64 {
        self.mantissa.arg()
    }

    /// Principal logarithm `ln|z| + i arg z`.
    pub fn ln(&self) -> Complex64 {
        Complex64::new(self.ln_abs(), self.arg())
    }

    /// Collapses to a plain complex number (may overflow).
    pub fn to_complex(&self) -> Complex64 {
        self.mantissa * self.log_scale.exp()
    }

    pub fn conj(&self) -> Self {
        Self {
            mantissa: self.mantissa.conj(),
            log_scale: self.log_scale,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self::new(self.mantissa * factor, self.log_scale)
    }

    pub fn recip(&self) -> Self {
        Self::new(self.mantissa.inv(), -self.log_scale)
    }

    /// Sum of two scaled values, aligned on the larger scale.
    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let s = self.log_scale.max(other.log_scale);
        let m = self.mantissa * (self.log_scale - s).exp()
            + other.mantissa * (other.log_scale - s).exp();
        Self::new(m, s)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&-*other)
    }

    /// `self / other` collapsed to a plain complex number.
    pub fn ratio(&self, other: &Self) -> Complex64 {
        (*self / *other).to_complex()
    }

    /// `|a - b| / max(|a|, |b|)`, evaluated without leaving the scaled form.
    pub fn relative_distance(&self, other: &Self) -> f64 {
        let diff = self.sub(other).ln_abs();
        let size = self.ln_abs().max(other.ln_abs());
        if size == f64::NEG_INFINITY {
            return 0.0;
        }
        (diff - size).exp()
    }

    fn normalized(self) -> Self {
        let m = self.mantissa;
        if m.re == 0.0 && m.im == 0.0 {
            return Self::ZERO;
        }
        if !m.is_finite() {
            return self;
        }
        let modulus = m.norm();
        let lo = 2f64.powi(-MANTISSA_RANGE_EXP);
        let hi = 2f64.powi(MANTISSA_RANGE_EXP);
        if (lo..=hi).contains(&modulus) {
            return self;
        }
        let e = modulus.log2().floor() as i32;
        // Powers of two rescale exactly and keep the phase.
        let factor = pow2(-e);
        Self {
            mantissa: m * factor,
            log_scale: self.log_scale + f64::from(e) * LN_2,
        }
    }
}

/// `2^e` computed exactly for the exponents that occur in renormalization.
pub(crate) fn pow2(e: i32) -> f64 {
    // Split so that each factor stays a normal float.
    if e.abs() <= 1000 {
        2f64.powi(e)
    } else {
        2f64.powi(e / 2) * 2f64.powi(e - e / 2)
    }
}

impl Mul for ScaledComplex {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self::new(self.mantissa * rhs.mantissa, self.log_scale + rhs.log_scale)
    }
}

impl Div for ScaledComplex {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        Self::new(self.mantissa / rhs.mantissa, self.log_scale - rhs.log_scale)
    }
}

impl Neg for ScaledComplex {
    type Output = Self;
    fn neg(self) -> Self {
        Self {
            mantissa: -self.mantissa,
            log_scale: self.log_scale,
        }
    }
}

impl fmt::Debug for ScaledComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({} {:+}i)·e^{}",
            self.mantissa.re, self.mantissa.im, self.log_scale
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_is_canonical() {
        let z = ScaledComplex::new(Complex64::new(0.0, 0.0), 17.0);
        assert_eq!(z, ScaledComplex::ZERO);
        assert_eq!(z.ln_abs(), f64::NEG_INFINITY);
    }

    #[test]
    fn values_beyond_f64_range() {
        let big = ScaledComplex::from_log(Complex64::new(2000.0, 0.3));
        let small = ScaledComplex::from_log(Complex64::new(-1990.0, 0.1));
        let prod = big * small;
        assert!((prod.ln_abs() - 10.0).abs() < 1e-12);
        assert!((prod.arg() - 0.4).abs() < 1e-14);
        let q = big.ratio(&ScaledComplex::from_log(Complex64::new(1999.0, 0.3)));
        assert!((q - Complex64::new(std::f64::consts::E, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn renormalization_is_exact_power_of_two() {
        let m = Complex64::new(3.0 * 2f64.powi(40), -2f64.powi(39));
        let s = ScaledComplex::new(m, 0.0);
        let back = s.mantissa() * 2f64.powi(41);
        assert_eq!(back, m);
        assert!((s.log_scale() - 41.0 * LN_2).abs() < 1e-12);
    }

    #[test]
    fn addition_with_disparate_scales() {
        let a = ScaledComplex::from_log(Complex64::new(800.0, 0.0));
        let b = ScaledComplex::from_log(Complex64::new(0.0, 0.0));
        let s = a.add(&b);
        assert!((s.ln_abs() - 800.0).abs() < 1e-12);
        assert_eq!(a.sub(&a), ScaledComplex::ZERO);
    }

    proptest! {
        #[test]
        fn mantissa_stays_in_range(re in -1e200f64..1e200, im in -1e200f64..1e200, s in -1e3f64..1e3) {
            prop_assume!(re != 0.0 || im != 0.0);
            let z = ScaledComplex::new(Complex64::new(re, im), s);
            let m = z.mantissa().norm();
            prop_assert!(m >= 2f64.powi(-30) && m <= 2f64.powi(30));
            let expected = Complex64::new(re, im).norm().ln() + s;
            prop_assert!((z.ln_abs() - expected).abs() <= 1e-12 * expected.abs().max(1.0));
        }

        #[test]
        fn product_and_quotient_agree(a in -300f64..300.0, b in -3f64..3.0, c in -300f64..300.0, d in -3f64..3.0) {
            let x = ScaledComplex::from_log(Complex64::new(a, b));
            let y = ScaledComplex::from_log(Complex64::new(c, d));
            let back = (x * y) / y;
            prop_assert!(back.relative_distance(&x) < 1e-13);
        }
    }
}
