//! Reference values computed without the shooting machinery.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// `K = (2/3) B(1/3, 3/2)` from the substitution `s = t^3`.
pub fn k_from_beta() -> f64 {
    2.0 / 3.0 * statrs::function::beta::beta(1.0 / 3.0, 1.5)
}

/// Eigenvalues of `p^2 + i x^3` from a truncated harmonic-oscillator basis
/// with length scale `scale`.
///
/// The matrix is assembled with a few extra basis functions so that the
/// products `x^3` and `p^2` are exact on the retained block. Conjugating by
/// `diag(i^n)` makes it real, so a real Schur decomposition suffices.
/// Returns the real eigenvalues in increasing order, dropping the spurious
/// ones produced by the truncation.
pub fn basis_eigenvalues(size: usize, scale: f64) -> Vec<f64> {
    let m = size + 4;
    let mut x = DMatrix::<f64>::zeros(m, m);
    let mut a = DMatrix::<f64>::zeros(m, m);
    for n in 0..m - 1 {
        let s = ((n + 1) as f64).sqrt();
        x[(n, n + 1)] = s / 2f64.sqrt() * scale;
        x[(n + 1, n)] = x[(n, n + 1)];
        a[(n, n + 1)] = s;
    }
    // p = (a - a^T) / (i sqrt(2) L), so p^2 = -(a - a^T)^2 / (2 L^2).
    let d = &a - a.transpose();
    let p2 = -(&d * &d) / (2.0 * scale * scale);
    let x3 = &x * &x * &x;

    let i_pow = |k: i64| -> Complex64 {
        match k.rem_euclid(4) {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    };
    let real = DMatrix::<f64>::from_fn(size, size, |r, c| {
        let h = Complex64::new(p2[(r, c)], x3[(r, c)]);
        let v = h * i_pow(c as i64 - r as i64);
        assert!(v.im.abs() <= 1e-9 * (1.0 + v.norm()), "similarity must give a real matrix");
        v.re
    });
    let mut eigs: Vec<f64> = real
        .complex_eigenvalues()
        .iter()
        .filter(|z| z.im.abs() < 1e-6 * (1.0 + z.re.abs()) && z.re > 0.0)
        .map(|z| z.re)
        .collect();
    eigs.sort_by(f64::total_cmp);
    eigs
}

/// Lowest levels from two basis sizes, keeping only those on which they
/// agree to `agreement`.
pub fn reference_levels(count: usize, agreement: f64) -> Vec<f64> {
    let a = basis_eigenvalues(200, 0.8);
    let b = basis_eigenvalues(250, 0.8);
    a.iter()
        .zip(&b)
        .take(count)
        .map(|(x, y)| {
            assert!((x - y).abs() < agreement, "basis truncation not converged: {x} vs {y}");
            *x
        })
        .collect()
}
