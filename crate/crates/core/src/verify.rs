//! Self-checks behind `platoon-fdi verify`.
//!
//! Each check recomputes a library quantity by a second route (dense linear
//! algebra, brute-force quadrature, closed-form limits) and reports the
//! worst disagreement.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::blender::n_eff;
use crate::driver::{DriverKind, FaultScenario};
use crate::error::Result;
use crate::identifier::{
    hypothesis_bank, identify, update_cost, CostLedger, DetectorModel, IdentifierConfig, TailSignal,
};
use crate::lti::{alpha, beta, delta_recursion, driver_tf, g_sb, gamma};
use crate::lti::{default_h2_grid, h2_distance, log_grid};
use crate::platoon::{
    simulate, Architecture, ControllerGains, Disturbances, PlatoonConfig, ReferenceProfile, Segment, SegmentMode,
};
use crate::scenario::{catalog, parse_scenario};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name,
            passed,
            detail: detail.into(),
        }
    }
}

fn rel_err(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm().max(1e-300)
}

fn random_point(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))
}

fn tridiagonal(n: usize, diag: Complex64, last: Complex64, off: Complex64) -> DMatrix<Complex64> {
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            if i + 1 == n {
                last
            } else {
                diag
            }
        } else if i.abs_diff(j) == 1 {
            off
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Three-term determinant recursion against LU determinants.
pub fn determinant_recursion(seed: u64) -> Result<Check> {
    let g = ControllerGains::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for n in 1..=8 {
        let d = delta_recursion(g, n)?;
        for _ in 0..20 {
            let s = random_point(&mut rng);
            let a = alpha(g).eval_complex(s);
            let m = tridiagonal(n, a, a, beta(g).eval_complex(s));
            worst = worst.max(rel_err(d.eval_complex(s), m.determinant()));
        }
    }
    Ok(Check::new(
        "determinant recursion",
        worst < 1e-9,
        format!("max rel err {worst:.2e}"),
    ))
}

/// SB head-to-tail response against a dense solve of the follower equations.
pub fn sb_transfer(seed: u64) -> Result<Check> {
    let g = ControllerGains::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for n in 2..=8 {
        let tf = g_sb(g, n)?;
        for _ in 0..10 {
            let s = Complex64::new(0.0, rng.gen_range(0.01..10.0));
            let b = beta(g).eval_complex(s);
            let m = tridiagonal(n - 1, alpha(g).eval_complex(s), gamma(g).eval_complex(s), b);
            let mut rhs = DVector::from_element(n - 1, Complex64::new(0.0, 0.0));
            rhs[0] = -b;
            let Some(x) = m.lu().solve(&rhs) else {
                continue;
            };
            worst = worst.max(rel_err(tf.eval(s)?, x[n - 2]));
        }
    }
    Ok(Check::new(
        "SB transfer function",
        worst < 1e-8,
        format!("max rel err {worst:.2e}"),
    ))
}

/// Guards and the equal-weight midpoint of the effective-length formula.
pub fn effective_length() -> Check {
    let guards = n_eff(1.0, 0.0, 2, 10) == 2.0 && n_eff(0.0, 1.0, 2, 10) == 10.0;
    let mid = (n_eff(0.5 + 1e-6, 0.5 - 1e-6, 2, 10) - 6.0).abs();
    Check::new(
        "effective length",
        guards && mid < 1e-3,
        format!("guards exact: {guards}, equal-weight offset {mid:.2e}"),
    )
}

/// Unit DC gain of both driver models and a positive, grid-stable H2 gap.
pub fn driver_models() -> Result<Check> {
    let a = driver_tf(&DriverKind::Attentive.params());
    let d = driver_tf(&DriverKind::Distracted.params());
    let dc = (a.dc_gain()? - 1.0).abs().max((d.dc_gain()? - 1.0).abs());
    let coarse = h2_distance(&a, &d, &default_h2_grid())?;
    let fine = h2_distance(&a, &d, &log_grid(1e-3, 1e3, 16384))?;
    let drift = (coarse - fine).abs() / fine;
    Ok(Check::new(
        "driver models",
        dc < 1e-6 && coarse > 0.0 && drift < 0.01,
        format!("DC gain err {dc:.1e}, H2 gap {coarse:.4e}, grid drift {drift:.2e}"),
    ))
}

/// Constant residual drives the cost to `αc + βc/λ`.
pub fn cost_limit() -> Result<Check> {
    let cfg = IdentifierConfig::default();
    let bank = hypothesis_bank(2);
    let mut ledger = CostLedger::new(&bank);
    let (c, dt) = (0.3, 1e-3);
    let steps = (10.0 / cfg.lambda / dt).round() as usize;
    let residuals = vec![c; bank.len()];
    for _ in 0..steps {
        update_cost(&mut ledger, &residuals, dt, &cfg)?;
    }
    let expect = cfg.alpha * c + cfg.beta * c / cfg.lambda;
    let got = ledger.entries()[0].j;
    let rel = (got - expect).abs() / expect;
    Ok(Check::new(
        "cost limit",
        rel < 1e-3,
        format!("J {got:.6} vs {expect:.6}, rel {rel:.2e}"),
    ))
}

/// Every shipped scenario re-parses from its own serialization.
pub fn catalog_round_trip() -> Check {
    let specs = catalog();
    let bad: Vec<&str> = specs
        .iter()
        .filter(|s| parse_scenario(&s.to_toml()).map(|t| &t != *s).unwrap_or(true))
        .map(|s| s.name.as_str())
        .collect();
    Check::new(
        "catalog round trip",
        specs.len() == 7 && bad.is_empty(),
        format!("{} specs, mismatches: {bad:?}", specs.len()),
    )
}

/// Noiseless six-vehicle acceleration runs: each true hypothesis must end
/// with the strictly smallest cost.
pub fn self_consistency() -> Result<Check> {
    let reference = ReferenceProfile::new(
        0.0,
        vec![Segment {
            duration: 10.0,
            mode: SegmentMode::Accelerate { rate: 2.0 },
        }],
    )?;
    let cfg = IdentifierConfig::default();
    let bank = hypothesis_bank(6);
    let mut failures = Vec::new();
    for arch in [Architecture::PredecessorFollowing, Architecture::SymmetricBidirectional] {
        let config = PlatoonConfig::uniform(6, 10.0, ControllerGains::default(), arch)?;
        let model = DetectorModel {
            config: config.clone(),
            reference: reference.clone(),
            a_saf: 2.0,
            horizon: 15.0,
            dt: 1e-3,
        };
        for h in bank.iter().filter(|h| h.k >= 2) {
            let fault = FaultScenario {
                k: h.k,
                t_f: 5.0,
                driver: h.d,
                a_saf: 2.0,
            };
            let trace = simulate(&config, &reference, &Disturbances::Zero, 15.0, 1e-3, Some(&fault))?;
            let errs = trace.tracking_errors(&config, &reference)?;
            let measured = TailSignal {
                dt: 1e-3,
                pos: errs.iter().map(|e| e.pos[5]).collect(),
                vel: errs.iter().map(|e| e.vel[5]).collect(),
            };
            let res = identify(&model, &measured, &bank, &cfg)?;
            let strict = res.final_ledger.as_ref().is_some_and(|l| {
                let own = l.entries().iter().find(|e| e.hypothesis == *h).map(|e| e.j);
                own.is_some_and(|j| l.entries().iter().all(|e| e.hypothesis == *h || e.j > j))
            });
            if !strict {
                failures.push(format!("{arch} {h}"));
            }
        }
    }
    Ok(Check::new(
        "self-consistency",
        failures.is_empty(),
        format!("{} runs, failures: {failures:?}", 2 * (bank.len() - 2)),
    ))
}

/// All checks; `full` adds the simulation-based ones.
pub fn run_all(full: bool) -> Result<Vec<Check>> {
    let mut out = vec![
        determinant_recursion(1)?,
        sb_transfer(2)?,
        effective_length(),
        driver_models()?,
        cost_limit()?,
        catalog_round_trip(),
    ];
    if full {
        out.push(self_consistency()?);
    }
    Ok(out)
}
