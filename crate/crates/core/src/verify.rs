//! The full suite of numerical checks, each reported with its measured
//! value, threshold and verdict.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::error::Result;
use crate::lg::{error_control_variation, lg_approximant, xi_phase, LgParams};
use crate::par;
use crate::shoot::{
    integrate_f, integrate_f_from, integrate_psi_direct, solution_trace, wronskian_profile, Side,
};
use crate::spectral::{
    compare_wkb, constants, count_zeros_argument_principle, h_function, polish_complex_root,
    scan_real_eigenvalues, scan_real_eigenvalues_with, stokes_multiplier, verify_upper_half_plane,
    EigenvalueRecord, Rect,
};
use crate::wkb::{self, action_integral, constant_k, turning_points, wkb_eigenvalue, WkbConstants};

/// Allowance for integrator error on top of the analytic envelope.
pub const ENVELOPE_BUDGET: f64 = 1e-8;
/// Seed of the random real sample used by the unimodularity check.
pub const UNIMODULARITY_SEED: u64 = 0x5eed_c0b1;
/// Levels scanned by the suite; the semiclassical comparison runs to `n = 10`.
pub const SCAN_LEVELS: usize = 11;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    /// `"<"` or `">"`: the relation `measured` must satisfy.
    pub relation: String,
    pub passed: bool,
    pub detail: Option<String>,
}

impl Check {
    pub fn below(name: &str, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            threshold,
            relation: "<".into(),
            passed: measured < threshold,
            detail: None,
        }
    }

    pub fn above(name: &str, measured: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            threshold,
            relation: ">".into(),
            passed: measured > threshold,
            detail: None,
        }
    }

    fn failed(name: &str, err: &crate::Error) -> Self {
        Self {
            name: name.into(),
            measured: f64::NAN,
            threshold: f64::NAN,
            relation: "<".into(),
            passed: false,
            detail: Some(err.to_string()),
        }
    }

    fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub constants: Option<WkbConstants>,
    pub eigenvalues: Vec<EigenvalueRecord>,
    pub checks: Vec<Check>,
    pub passed: bool,
    pub elapsed_seconds: f64,
}

impl Report {
    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

struct Suite {
    checks: Vec<Check>,
}

impl Suite {
    fn run(&mut self, name: &str, f: impl FnOnce() -> Result<Vec<Check>>) {
        match f() {
            Ok(cs) => self.checks.extend(cs),
            Err(e) => self.checks.push(Check::failed(name, &e)),
        }
    }
}

/// Largest value, propagating NaN; `-inf` for an empty input.
fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(f64::NEG_INFINITY, |m, v| if m.is_nan() || v.is_nan() { f64::NAN } else { m.max(v) })
}

/// Runs every check with the given configuration.
pub fn run(config: &SolverConfig) -> Report {
    let start = Instant::now();
    let mut suite = Suite { checks: Vec::new() };
    let constants_value = constant_k().ok();

    if let Err(e) = config.validate() {
        suite.checks.push(Check::failed("config.valid", &e));
        return Report {
            constants: constants_value,
            eigenvalues: Vec::new(),
            checks: suite.checks,
            passed: false,
            elapsed_seconds: start.elapsed().as_secs_f64(),
        };
    }

    wkb_checks(&mut suite);
    lg_checks(&mut suite, config);
    shoot_checks(&mut suite, config);
    let eigenvalues = spectral_checks(&mut suite, config);

    let passed = suite.checks.iter().all(|c| c.passed);
    Report {
        constants: constants_value,
        eigenvalues,
        checks: suite.checks,
        passed,
        elapsed_seconds: start.elapsed().as_secs_f64(),
    }
}

fn wkb_checks(suite: &mut Suite) {
    suite.run("wkb.k_equals_k_prime", || {
        let c = constant_k()?;
        Ok(vec![
            Check::below("wkb.k_equals_k_prime", (c.k - c.k_prime).abs(), 1e-10)
                .with_detail(format!("K = {:.16}, K' = {:.16}", c.k, c.k_prime)),
            Check::below("wkb.k_quadrature_error", c.quadrature_error, 1e-12),
        ])
    });
    suite.run("wkb.action_identity", || {
        let mut worst: f64 = 0.0;
        let mut imag: f64 = 0.0;
        for lambda in [0.5, 1.0, 5.0, 20.0] {
            let a = action_integral(lambda)?;
            let closed = 3f64.sqrt() * wkb::k() * lambda.powf(5.0 / 6.0);
            worst = worst.max((a.re - closed).abs() / closed);
            imag = imag.max(a.im.abs());
        }
        Ok(vec![
            Check::below("wkb.action_identity", worst, 1e-8),
            Check::below("wkb.action_imaginary_part", imag, 1e-9),
        ])
    });
    suite.run("wkb.quantization", || {
        let worst = max_of((0..=50).map(|n| {
            let l = wkb_eigenvalue(n).lambda0;
            let target = (2.0 * f64::from(n) + 1.0) * PI;
            (3f64.sqrt() * wkb::k() * l.powf(5.0 / 6.0) - target).abs() / target
        }));
        Ok(vec![Check::below("wkb.quantization", worst, 1e-10)])
    });
    suite.run("wkb.turning_points", || {
        let mut worst: f64 = 0.0;
        for lambda in [0.5, 1.0, 5.0, 8.0, 20.0] {
            let tp = turning_points(lambda)?;
            for x in [tp.x_plus, tp.x_minus, tp.x_zero] {
                let r = Complex64::i() * x * x * x - lambda;
                worst = worst.max(r.norm() / lambda);
            }
        }
        Ok(vec![Check::below("wkb.turning_points", worst, 1e-12)])
    });
}

fn lg_checks(suite: &mut Suite, config: &SolverConfig) {
    let delta = config.delta;
    suite.run("lg.xi_limit", || {
        let one = Complex64::new(1.0, 0.0);
        let x = 1e6;
        let d = xi_phase(x, one, delta)? - Complex64::new(0.4 * x.powf(2.5), 0.0);
        // At moderate x the gap follows -lambda0 x^{-1/2}.
        let x50 = xi_phase(50.0, one, delta)? - Complex64::new(0.4 * 50f64.powf(2.5), 0.0);
        Ok(vec![
            Check::below("lg.xi_limit", d.norm(), 1e-3),
            Check::below("lg.xi_tail_rate", (x50.re + 50f64.powf(-0.5)).abs(), 1e-6),
        ])
    });
    suite.run("lg.variation_decay", || {
        let p = LgParams::new(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), delta, 8.0)?;
        let near = error_control_variation(100.0, &p)?;
        let far = error_control_variation(1e7, &p)?;
        Ok(vec![
            Check::below("lg.variation_decay_v", near.v, 1e-3),
            Check::below("lg.variation_decay_v_tilde", far.v_tilde, 1e-3),
        ])
    });
    suite.run("lg.variation_scaling", || {
        let mut scaled = Vec::new();
        for l in [10.0f64, 100.0, 1000.0] {
            let z0 = (20.0 * l).cbrt();
            let p = LgParams::new(Complex64::new(l, 0.0), Complex64::new(l, 0.0), delta, z0)?;
            scaled.push(error_control_variation(0.0, &p)?.v * l.powf(5.0 / 6.0));
        }
        let spread = max_of(scaled.iter().map(|s| (s - scaled[0]).abs() / scaled[0]));
        Ok(vec![Check::below("lg.variation_scaling", spread, 1e-6)
            .with_detail(format!("v(0, l0) l0^(5/6) = {:.10}", scaled[0]))])
    });
    suite.run("lg.monotone_variation", || {
        let p = LgParams::new(Complex64::new(3.0, 1.0), Complex64::new(2.0, 1.0), delta, 8.0)?;
        let xs: Vec<f64> = (0..=20).map(|i| 0.5 * f64::from(i)).collect();
        let env = xs
            .iter()
            .map(|&x| error_control_variation(x, &p))
            .collect::<Result<Vec<_>>>()?;
        let worst = max_of(env.windows(2).map(|w| w[1].total_v - w[0].total_v));
        Ok(vec![Check::below("lg.monotone_variation", worst, 1e-14)])
    });
    suite.run("lg.envelope_certification", || {
        let mut checks = Vec::new();
        for lambda in [1.0, 5.0, 10.0] {
            checks.push(envelope_check(lambda, config)?);
        }
        Ok(checks)
    });
}

/// Largest ratio of the observed relative deviation from the
/// Liouville–Green approximant to its certified envelope over `[2, z0]`.
pub fn envelope_ratio(lambda: f64, config: &SolverConfig) -> Result<(f64, f64)> {
    let mu = Complex64::new(lambda, 0.0);
    let z0 = config.z0_for(lambda);
    let params = LgParams::new(mu, mu, config.delta, z0)?;
    let n = ((z0 - 2.0) / 0.25).floor() as usize;
    let xs: Vec<f64> = (0..=n).map(|i| 2.0 + 0.25 * i as f64).chain([z0]).collect();
    let trace = solution_trace(mu, &xs, config)?;
    let mut worst_ratio: f64 = 0.0;
    let mut worst_dev: f64 = 0.0;
    for (x, f) in trace {
        let approx = lg_approximant(x, &params)?;
        let dev = (f.ratio(&approx) - 1.0).norm();
        let bound = error_control_variation(x, &params)?.epsilon_max + ENVELOPE_BUDGET;
        worst_ratio = worst_ratio.max(dev / bound);
        worst_dev = worst_dev.max(dev);
    }
    Ok((worst_ratio, worst_dev))
}

fn envelope_check(lambda: f64, config: &SolverConfig) -> Result<Check> {
    let (ratio, dev) = envelope_ratio(lambda, config)?;
    Ok(Check::below(&format!("lg.envelope_certification[lambda={lambda}]"), ratio, 1.0)
        .with_detail(format!("largest relative deviation {dev:.3e}")))
}

fn shoot_checks(suite: &mut Suite, config: &SolverConfig) {
    suite.run("shoot.wronskian_constancy", || {
        let xs: Vec<f64> = (0..=16).map(|i| 0.5 * f64::from(i)).collect();
        let mut worst: f64 = 0.0;
        for mu in [Complex64::new(2.0, 0.0), Complex64::from_polar(3.0, 0.8 * PI)] {
            let w = wronskian_profile(mu, &xs, config)?;
            worst = worst.max(max_of(w.iter().map(|(_, v)| v.relative_distance(&w[0].1))));
        }
        Ok(vec![Check::below("shoot.wronskian_constancy", worst, 1e-7)])
    });
    suite.run("shoot.conjugation", || {
        let mus: Vec<Complex64> = (0..10)
            .map(|i| Complex64::from_polar(0.5 + 3.0 * f64::from(i), -2.5 + 0.55 * f64::from(i)))
            .collect();
        let devs = par::try_map(config.execution, &mus, |&mu| {
            let a = integrate_f(mu, config)?;
            let b = integrate_f(mu.conj(), config)?;
            Ok(a.f0.conj().relative_distance(&b.f0).max(a.f1.conj().relative_distance(&b.f1)))
        })?;
        Ok(vec![Check::below("shoot.conjugation", max_of(devs), 1e-9)])
    });
    suite.run("shoot.direct_route", || {
        let mut worst: f64 = 0.0;
        for lambda in [Complex64::new(1.0, 0.0), Complex64::new(2.0, 1.0), Complex64::new(5.0, 0.0)] {
            for side in [Side::Plus, Side::Minus] {
                let direct = integrate_psi_direct(lambda, side, config)?;
                let reduced = integrate_f(side.mu(lambda), config)?;
                worst = worst
                    .max(direct.f0.relative_distance(&reduced.f0))
                    .max(direct.f1.relative_distance(&reduced.f1.scale(side.chain_factor())));
            }
        }
        let two = Complex64::new(2.0, 0.0);
        let p = integrate_psi_direct(two, Side::Plus, config)?;
        let m = integrate_psi_direct(two, Side::Minus, config)?;
        Ok(vec![
            Check::below("shoot.direct_route", worst, 1e-7),
            Check::below("shoot.pt_reflection", p.f0.conj().relative_distance(&m.f0), 1e-8),
        ])
    });
    suite.run("shoot.start_independence", || {
        let a = integrate_f_from(Complex64::new(5.0, 0.0), 8.0, config)?;
        let b = integrate_f_from(Complex64::new(5.0, 0.0), 12.0, config)?;
        Ok(vec![Check::below("shoot.start_independence", a.f0.relative_distance(&b.f0), 1e-8)])
    });
    suite.run("shoot.determinism", || {
        let mu = Complex64::new(3.0, 1.0);
        let same = integrate_f(mu, config)? == integrate_f(mu, config)?;
        Ok(vec![Check::below("shoot.determinism", if same { 0.0 } else { 1.0 }, 0.5)])
    });
    suite.run("shoot.growth_rate", || {
        let (ratios, _) = growth_rate_ratios(config)?;
        let predicted = 2f64.powf(-5.0 / 6.0);
        let worst = max_of(ratios.iter().map(|r| (r / predicted).ln().abs()));
        Ok(vec![Check::below("shoot.growth_rate", worst, 2f64.ln())
            .with_detail(format!("consecutive ratios {ratios:.4?}, predicted {predicted:.4}"))])
    });
}

/// Parameters at which the growth of `F0` is compared with
/// `K lambda^{5/6} - (1/4) ln lambda`.
pub const GROWTH_SAMPLES: [f64; 4] = [25.0, 50.0, 100.0, 200.0];

/// Ratios of consecutive deviations `log|F0| - (K lambda^{5/6} - ln(lambda)/4)`
/// over [`GROWTH_SAMPLES`], together with the deviations.
pub fn growth_rate_ratios(config: &SolverConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let devs = par::try_map(config.execution, &GROWTH_SAMPLES, |&l| {
        let d = integrate_f(Complex64::new(l, 0.0), config)?;
        Ok(d.f0.ln_abs() - (wkb::k() * l.powf(5.0 / 6.0) - 0.25 * l.ln()))
    })?;
    let ratios = devs.windows(2).map(|w| (w[1] / w[0]).abs()).collect();
    Ok((ratios, devs))
}

fn spectral_checks(suite: &mut Suite, config: &SolverConfig) -> Vec<EigenvalueRecord> {
    let records = match scan_real_eigenvalues(SCAN_LEVELS, config) {
        Ok(r) => r,
        Err(e) => {
            suite.checks.push(Check::failed("spectral.scan", &e));
            return Vec::new();
        }
    };
    let first: Vec<EigenvalueRecord> = records.iter().take(4).copied().collect();
    suite.checks.push(Check::above(
        "spectral.smallest_positive",
        records.iter().map(|r| r.lambda).fold(f64::INFINITY, f64::min),
        0.0,
    ));
    suite.checks.push(Check::below(
        "spectral.all_simple",
        records.iter().filter(|r| !r.simple).count() as f64,
        0.5,
    ));
    suite.checks.push(Check::above(
        "spectral.simplicity_margin",
        records
            .iter()
            .map(|r| r.dw_dlambda_mag / r.residual_w.max(f64::MIN_POSITIVE))
            .fold(f64::INFINITY, f64::min),
        1e3,
    ));
    suite.checks.push(Check::below(
        "spectral.h_at_roots",
        max_of(records.iter().map(|r| r.h_phase_residual)),
        1e-6,
    ));
    suite.run("spectral.stokes_at_roots", || {
        let cs = par::try_map(config.execution, &records, |r| {
            Ok(stokes_multiplier(Complex64::new(r.lambda, 0.0), config)?
                .c_normalized
                .unwrap_or(f64::NAN))
        })?;
        Ok(vec![Check::below("spectral.stokes_at_roots", max_of(cs), 1e-6)])
    });
    suite.run("spectral.realness", || {
        let polished = par::try_map(config.execution, &first, |r| polish_complex_root(r.lambda, config))?;
        Ok(vec![
            Check::below("spectral.realness", max_of(polished.iter().map(|l| l.im.abs())), 1e-8),
            Check::below(
                "spectral.complex_polish_agreement",
                max_of(polished.iter().zip(&first).map(|(l, r)| (l.re - r.lambda).abs())),
                1e-8,
            ),
        ])
    });
    suite.run("spectral.pt_pairing", || {
        let mirrored = scan_real_eigenvalues_with(first.len(), Side::Minus, config)?;
        Ok(vec![Check::below(
            "spectral.pt_pairing",
            max_of(mirrored.iter().zip(&first).map(|(a, b)| (a.lambda - b.lambda).abs())),
            1e-9,
        )])
    });
    suite.run("spectral.argument_principle", || {
        let rect = Rect::new(0.2, 12.0, -1.0, 1.0)?;
        let zeros = count_zeros_argument_principle(rect, config)?;
        let real = records.iter().filter(|r| r.lambda > 0.2 && r.lambda < 12.0).count();
        let one = count_zeros_argument_principle(Rect::new(0.5, 2.0, -0.5, 0.5)?, config)?;
        let none = count_zeros_argument_principle(Rect::new(2.0, 3.0, -0.5, 0.5)?, config)?;
        Ok(vec![
            Check::below("spectral.argument_principle", (f64::from(zeros) - real as f64).abs(), 0.5)
                .with_detail(format!("{zeros} zeros inside, {real} real roots")),
            Check::below("spectral.isolate_first", (f64::from(one) - 1.0).abs(), 0.5),
            Check::below("spectral.empty_gap", f64::from(none), 0.5),
        ])
    });
    suite.run("spectral.unimodularity", || {
        let mut rng = ChaCha8Rng::seed_from_u64(UNIMODULARITY_SEED);
        let samples: Vec<f64> = (0..50).map(|_| rng.random_range(0.5..50.0)).collect();
        let devs = par::try_map(config.execution, &samples, |&l| {
            let h = h_function(Complex64::new(l, 0.0), config)?.h.expect("h is filled");
            Ok((h.abs() - 1.0).abs())
        })?;
        Ok(vec![Check::below("spectral.unimodularity", max_of(devs), 1e-8)])
    });
    suite.run("spectral.contraction", || {
        let rect = Rect::from_config(config)?;
        let scan = verify_upper_half_plane(rect, (config.nx, config.ny), config)?;
        Ok(vec![Check::below("spectral.contraction", scan.max_abs_h, 1.0).with_detail(format!(
            "max |h| at {}, {} violations",
            scan.argmax_point,
            scan.violations.len()
        ))])
    });
    suite.run("spectral.vertical_decrease", || {
        let mut values = Vec::new();
        for im in [0.1, 1.0, 5.0] {
            values.push(h_function(Complex64::new(3.0, im), config)?.h.expect("h is filled").abs());
        }
        let worst = max_of(values.windows(2).map(|w| w[1] - w[0]));
        let strip = h_function(Complex64::new(3.0, 1e-3), config)?.h.expect("h is filled").abs();
        Ok(vec![
            Check::below("spectral.vertical_decrease", worst, 0.0)
                .with_detail(format!("|h| = {values:.6?}")),
            Check::below("spectral.near_axis", (strip - 1.0).abs(), 1e-2),
        ])
    });
    suite.run("spectral.stokes_symmetry", || {
        let lambda = Complex64::new(1.0, 1.0);
        let a = stokes_multiplier(lambda, config)?.c.expect("c is filled").to_complex();
        let b = stokes_multiplier(lambda.conj(), config)?.c.expect("c is filled").to_complex();
        Ok(vec![Check::below(
            "spectral.stokes_symmetry",
            (b - constants().omega * a.conj()).norm() / a.norm(),
            1e-8,
        )])
    });
    suite.run("spectral.wkb_asymptotics", || {
        let cmp = compare_wkb(&records, config)?;
        let diffs: Vec<f64> = cmp.differences.iter().map(|d| d.difference).collect();
        let worst_step = max_of(
            cmp.differences
                .windows(2)
                .filter(|w| w[0].n >= 3)
                .map(|w| w[1].difference - w[0].difference),
        );
        let h_spread = cmp.h_samples.iter().map(|s| s.scaled_deviation).fold(0.0, f64::max)
            / cmp.h_samples[0].scaled_deviation;
        Ok(vec![
            Check::below("spectral.wkb_decrease", worst_step, 0.0)
                .with_detail(format!("|lambda_n - lambda_n^0| = {diffs:.5?}")),
            Check::below("spectral.h_asymptotic_bounded", h_spread, 2.0),
        ])
    });
    records
}
