//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64;
use ptcubic::spectral::{
    compare_wkb, constants, count_zeros_argument_principle, h_function, polish_complex_root,
    scan_real_eigenvalues, stokes_multiplier, verify_upper_half_plane, Rect,
};
use ptcubic::{verify, wkb, Execution, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    summary: String,
}

fn criterion(
    id: u32,
    title: &str,
    budget: Duration,
    f: impl FnOnce() -> Result<Outcome, ptcubic::Error>,
) -> bool {
    let start = Instant::now();
    let result = f();
    let elapsed = start.elapsed();
    let (passed, summary) = match result {
        Ok(o) => (o.passed && elapsed < budget, o.summary),
        Err(e) => (false, format!("error: {e}")),
    };
    println!(
        "[{}] {id}. {title}: {summary} ({:.2}s, budget {}s)",
        if passed { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    passed
}

fn main() -> ExitCode {
    let config = SolverConfig::default();
    let cfg = &config;
    let mut all = true;

    all &= criterion(1, "constants", Duration::from_secs(1), || {
        let c = wkb::constant_k()?;
        let beta = common::oracle::k_from_beta();
        let diff = (c.k - c.k_prime).abs();
        let oracle = (c.k - beta).abs();
        Ok(Outcome {
            passed: diff < 1e-10 && oracle < 1e-12,
            summary: format!("K = {:.13}, |K - K'| = {diff:.2e}, |K - (2/3)B(1/3,3/2)| = {oracle:.2e}", c.k),
        })
    });

    all &= criterion(2, "action identity", Duration::from_secs(5), || {
        let mut worst: f64 = 0.0;
        for lambda in [0.5, 1.0, 5.0, 20.0] {
            let a = wkb::action_integral(lambda)?;
            let closed = 3f64.sqrt() * wkb::k() * lambda.powf(5.0 / 6.0);
            worst = worst.max((a - closed).norm() / closed);
        }
        Ok(Outcome {
            passed: worst < 1e-8,
            summary: format!("max relative deviation {worst:.2e}"),
        })
    });

    let mut first_four = Vec::new();
    all &= criterion(3, "eigenvalues vs basis oracle", Duration::from_secs(60), || {
        let reference = common::oracle::reference_levels(4, 1e-8);
        let records = scan_real_eigenvalues(4, cfg)?;
        let worst = records
            .iter()
            .zip(&reference)
            .map(|(r, e)| (r.lambda - e).abs())
            .fold(0.0, f64::max);
        let mut imag: f64 = 0.0;
        for r in &records {
            imag = imag.max(polish_complex_root(r.lambda, cfg)?.im.abs());
        }
        let positive = records.iter().all(|r| r.lambda > 0.0);
        let values: Vec<String> = records.iter().map(|r| format!("{:.9}", r.lambda)).collect();
        first_four = records;
        Ok(Outcome {
            passed: worst < 1e-6 && imag < 1e-8 && positive && first_four.len() == 4,
            summary: format!("[{}], max |diff| {worst:.2e}, max |Im| {imag:.2e}", values.join(", ")),
        })
    });

    all &= criterion(4, "detector agreement and simplicity", Duration::from_secs(60), || {
        let target = constants().target;
        let mut h_res: f64 = 0.0;
        let mut c_res: f64 = 0.0;
        for r in &first_four {
            let l = Complex64::new(r.lambda, 0.0);
            let h = h_function(l, cfg)?.h.expect("h").to_complex();
            h_res = h_res.max((h - target).norm());
            c_res = c_res.max(stokes_multiplier(l, cfg)?.c_normalized.expect("c"));
        }
        let simple = !first_four.is_empty() && first_four.iter().all(|r| r.simple);
        Ok(Outcome {
            passed: h_res < 1e-6 && c_res < 1e-6 && simple,
            summary: format!("max |h + 1/omega| {h_res:.2e}, max normalized |C| {c_res:.2e}, all simple: {simple}"),
        })
    });

    all &= criterion(5, "semiclassical asymptotics", Duration::from_secs(300), || {
        let records = scan_real_eigenvalues(11, cfg)?;
        let cmp = compare_wkb(&records, cfg)?;
        let diffs: Vec<f64> = cmp.differences.iter().map(|d| d.difference).collect();
        let tail: Vec<f64> = cmp.differences.iter().filter(|d| d.n >= 3 && d.n <= 10).map(|d| d.difference).collect();
        let decreasing = tail.len() == 8 && tail.windows(2).all(|w| w[1] < w[0]);
        Ok(Outcome {
            passed: decreasing,
            summary: format!("|lambda_n - lambda_n^0| = {diffs:.5?}"),
        })
    });

    all &= criterion(6, "unbroken PT symmetry", Duration::from_secs(300), || {
        let scan = verify_upper_half_plane(Rect::new(0.5, 20.0, 0.1, 10.0)?, (60, 40), cfg)?;
        let mut rng = ChaCha8Rng::seed_from_u64(verify::UNIMODULARITY_SEED);
        let mut unimodular: f64 = 0.0;
        for _ in 0..50 {
            let l = rng.random_range(0.5..50.0);
            let h = h_function(Complex64::new(l, 0.0), cfg)?.h.expect("h");
            unimodular = unimodular.max((h.abs() - 1.0).abs());
        }
        let zeros = count_zeros_argument_principle(Rect::new(0.2, 12.0, -1.0, 1.0)?, cfg)?;
        let real = scan_real_eigenvalues(5, cfg)?.iter().filter(|r| r.lambda > 0.2 && r.lambda < 12.0).count();
        Ok(Outcome {
            passed: scan.max_abs_h < 1.0 && scan.violations.is_empty() && unimodular < 1e-8 && zeros as usize == real,
            summary: format!(
                "max |h| on grid {:.4} at {}, max ||h|-1| on axis {unimodular:.2e}, {zeros} zeros vs {real} real roots",
                scan.max_abs_h, scan.argmax_point
            ),
        })
    });

    all &= criterion(7, "growth of f(0, lambda)", Duration::from_secs(60), || {
        let (ratios, devs) = verify::growth_rate_ratios(cfg)?;
        let predicted = 2f64.powf(-5.0 / 6.0);
        let ok = ratios.iter().all(|r| *r > predicted / 2.0 && *r < predicted * 2.0);
        let shrinking = devs.windows(2).all(|w| w[1].abs() < w[0].abs());
        let shown: Vec<String> = devs.iter().map(|d| format!("{d:.4e}")).collect();
        Ok(Outcome {
            passed: ok && shrinking,
            summary: format!("deviations [{}], ratios {ratios:.4?} vs {predicted:.4}", shown.join(", ")),
        })
    });

    all &= criterion(8, "envelope certification", Duration::from_secs(60), || {
        let mut worst: f64 = 0.0;
        for lambda in [1.0, 5.0, 10.0] {
            worst = worst.max(verify::envelope_ratio(lambda, cfg)?.0);
        }
        Ok(Outcome {
            passed: worst < 1.0,
            summary: format!("max deviation / envelope {worst:.3}"),
        })
    });

    all &= criterion(9, "full verify suite, single-threaded", Duration::from_secs(300), || {
        let sequential = SolverConfig {
            execution: Execution::Sequential,
            ..SolverConfig::default()
        };
        let report = verify::run(&sequential);
        let failing: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        Ok(Outcome {
            passed: report.passed,
            summary: format!("{} checks, failing: {failing:?}", report.checks.len()),
        })
    });

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
