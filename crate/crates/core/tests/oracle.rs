mod common;

use common::oracle::{basis_eigenvalues, k_from_beta, reference_levels};
use ptcubic::spectral::scan_real_eigenvalues;
use ptcubic::{wkb, SolverConfig};

#[test]
fn action_constant_matches_beta_identity() {
    let c = wkb::constant_k().unwrap();
    assert!((c.k - k_from_beta()).abs() < 1e-12);
    assert!((c.k_prime - k_from_beta()).abs() < 1e-12);
}

#[test]
fn basis_oracle_is_converged() {
    let levels = reference_levels(5, 1e-8);
    let frozen = [1.156_267_07, 4.109_228_75, 7.562_273_85, 11.314_421_82, 15.291_553_75];
    for (l, f) in levels.iter().zip(frozen) {
        assert!((l - f).abs() < 1e-7, "{l} vs {f}");
    }
}

#[test]
fn basis_oracle_has_four_levels_below_12() {
    let real_low = basis_eigenvalues(200, 0.8).into_iter().filter(|&l| l < 12.0).count();
    assert_eq!(real_low, 4);
}

#[test]
fn shooting_matches_basis_oracle() {
    let reference = reference_levels(4, 1e-8);
    let records = scan_real_eigenvalues(4, &SolverConfig::default()).unwrap();
    for (r, e) in records.iter().zip(&reference) {
        assert!((r.lambda - e).abs() < 1e-6, "{} vs {e}", r.lambda);
    }
}
