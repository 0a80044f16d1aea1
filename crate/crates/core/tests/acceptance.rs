//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;
use platoon_fdi::blender::n_eff;
use platoon_fdi::driver::{DriverKind, DriverState, FaultScenario};
use platoon_fdi::identifier::{
    hypothesis_bank, identify, update_cost, CostLedger, DetectorModel, IdentifierConfig, TailSignal,
};
use platoon_fdi::lti::{
    alpha, beta, default_h2_grid, delta_recursion, driver_tf, g_pf, g_sb, gamma, h2_distance, log_grid, simulate_tf,
};
use platoon_fdi::platoon::{
    simulate, simulate_with_leader, Architecture, ControllerGains, Disturbances, PlatoonConfig, PrescribedLeader,
    ReferenceProfile,
};
use platoon_fdi::scenario::{catalog, run, RunMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn verdict(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn catalog_spec(name: &str) -> platoon_fdi::scenario::ScenarioSpec {
    catalog()
        .into_iter()
        .find(|s| s.name == name)
        .expect("shipped scenario")
}

/// Full bank on the six maneuver/architecture cases.
fn full_bank() -> Outcome {
    let mut fast = 0;
    let mut lines = Vec::new();
    let mut ok = true;
    for name in [
        "s1_accel",
        "s2_cruise",
        "s3_brake",
        "s4_accel_sb",
        "s5_cruise_sb",
        "s6_brake_sb",
    ] {
        let spec = catalog_spec(name);
        let out = run(&spec, RunMode::FullBank).map_err(|e| e.to_string())?;
        let r = &out.report;
        let lag = match (r.convergence_time, r.t_hat_f) {
            (Some(c), Some(t)) => c - t,
            _ => f64::INFINITY,
        };
        if lag <= 5.0 {
            fast += 1;
        }
        let secs = r.wall_clock.as_secs_f64();
        ok &= r.correct && secs < 60.0;
        lines.push(format!(
            "{name}: {} lag {lag:.3} s, {secs:.1} s",
            r.identified.map_or("-".into(), |h| h.to_string())
        ));
    }
    ok &= fast >= 5;
    verdict(ok, format!("{fast}/6 converged within 5 s; {}", lines.join("; ")))
}

/// Blending on the acceleration case.
fn blending() -> Outcome {
    let spec = catalog_spec("s7_accel_blend");
    let b = spec.blend.expect("blend section");
    let out = run(&spec, RunMode::Blending).map_err(|e| e.to_string())?;
    let res = out.blend.ok_or("nothing detected")?;
    let ok = b.n1 == 2 && b.n2 == 10 && b.window == 0.1 && res.n_fin == 7 && res.driver == DriverKind::Distracted;
    verdict(
        ok,
        format!(
            "median N_eff {:.3} -> {}, driver {}, {} models",
            res.n_eff, res.n_fin, res.driver, res.models_evaluated
        ),
    )
}

/// True hypothesis has the strictly smallest final cost at N = 6.
fn self_consistency() -> Outcome {
    let n = 6;
    let bank = hypothesis_bank(n);
    let cfg = IdentifierConfig::default();
    let maneuvers = [("accel", 5.0), ("cruise", 20.0), ("brake", 32.5)];
    let reference = catalog_spec("s1_accel").reference;
    let mut runs = 0;
    let mut failures = Vec::new();
    for arch in [Architecture::PredecessorFollowing, Architecture::SymmetricBidirectional] {
        let config = PlatoonConfig::uniform(n, 10.0, ControllerGains::default(), arch).unwrap();
        for (label, t_f) in maneuvers {
            let horizon = t_f + 20.0;
            let model = DetectorModel {
                config: config.clone(),
                reference: reference.clone(),
                a_saf: 2.0,
                horizon,
                dt: 1e-3,
            };
            for truth in bank.iter().filter(|h| h.k >= 2) {
                let fault = FaultScenario {
                    k: truth.k,
                    t_f,
                    driver: truth.d,
                    a_saf: 2.0,
                };
                let trace = simulate(&config, &reference, &Disturbances::Zero, horizon, 1e-3, Some(&fault)).unwrap();
                let errs = trace.tracking_errors(&config, &reference).unwrap();
                let measured = TailSignal {
                    dt: 1e-3,
                    pos: errs.iter().map(|e| e.pos[n - 1]).collect(),
                    vel: errs.iter().map(|e| e.vel[n - 1]).collect(),
                };
                let res = identify(&model, &measured, &bank, &cfg).map_err(|e| e.to_string())?;
                runs += 1;
                let ledger = res
                    .final_ledger
                    .ok_or_else(|| format!("{arch} {label} {truth}: not detected"))?;
                let own = ledger.entries().iter().find(|e| e.hypothesis == *truth).unwrap().j;
                let strict = ledger.entries().iter().all(|e| e.hypothesis == *truth || e.j > own);
                if !strict {
                    failures.push(format!("{arch} {label} {truth}"));
                }
            }
        }
    }
    verdict(failures.is_empty(), format!("{runs} runs, failures {failures:?}"))
}

/// Determinant recursion and SB transfer function against dense references.
fn determinants() -> Outcome {
    let g = ControllerGains::default();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let rel = |a: Complex64, b: Complex64| (a - b).norm() / b.norm();
    let mut det_err: f64 = 0.0;
    for n in 1..=8 {
        let d = delta_recursion(g, n).unwrap();
        for _ in 0..20 {
            let s = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let a = alpha(g).eval_complex(s);
            let m = tridiag_dense(n, a, a, beta(g).eval_complex(s));
            det_err = det_err.max(rel(d.eval_complex(s), cofactor_det(&m)));
        }
    }
    let mut tf_err: f64 = 0.0;
    for n in 2..=8 {
        let tf = g_sb(g, n).unwrap();
        for _ in 0..10 {
            let s = Complex64::new(0.0, rng.gen_range(0.01..10.0));
            let b = beta(g).eval_complex(s);
            let mut diag = vec![alpha(g).eval_complex(s); n - 1];
            diag[n - 2] = gamma(g).eval_complex(s);
            let mut rhs = vec![Complex64::new(0.0, 0.0); n - 1];
            rhs[0] = -b;
            let x = thomas(&diag, b, &rhs);
            tf_err = tf_err.max(rel(tf.eval(s).unwrap(), x[n - 2]));
        }
    }
    verdict(
        det_err < 1e-9 && tf_err < 1e-8,
        format!("determinant rel err {det_err:.2e}, SB transfer rel err {tf_err:.2e}"),
    )
}

/// PF platoon simulation against the chain transfer function.
fn time_frequency() -> Outcome {
    let dt: f64 = 1e-3;
    let horizon: f64 = 30.0;
    let steps = (horizon / dt).round() as usize;
    let t: Vec<f64> = (0..=steps).map(|i| i as f64 * dt).collect();
    let leader = PrescribedLeader {
        pos: t.iter().map(|t| t * t * (-t).exp()).collect(),
        vel: t.iter().map(|t| (2.0 * t - t * t) * (-t).exp()).collect(),
    };
    let reference = ReferenceProfile::cruise(15.0);
    let mut worst: f64 = 0.0;
    for n in 2..=6 {
        let config =
            PlatoonConfig::uniform(n, 10.0, ControllerGains::default(), Architecture::PredecessorFollowing).unwrap();
        let trace = simulate_with_leader(&config, &reference, &leader, horizon, dt).unwrap();
        let errs = trace.tracking_errors(&config, &reference).unwrap();
        let tail: Vec<f64> = errs.iter().map(|e| e.pos[n - 1]).collect();
        let predicted = simulate_tf(
            &g_pf(ControllerGains::default(), n - 1).unwrap(),
            &leader.pos[..tail.len()],
            dt,
        )
        .unwrap();
        worst = worst.max(rms_rel(&tail, &predicted));
    }
    verdict(worst < 1e-3, format!("max RMS relative error {worst:.2e} for N = 2..6"))
}

/// Effective length guards, midpoint and root-solve agreement.
fn effective_length() -> Outcome {
    let guards = n_eff(1.0, 0.0, 2, 10) == 2.0 && n_eff(0.0, 1.0, 2, 10) == 10.0;
    let mid = (n_eff(0.5 + 1e-6, 0.5 - 1e-6, 2, 10) - 6.0).abs();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let w1: f64 = rng.gen_range(0.01..0.99);
        if (w1 - 0.5).abs() < 1e-3 {
            continue;
        }
        let got = n_eff(w1, 1.0 - w1, 2, 10);
        let want = n_eff_by_root(w1, 1.0 - w1, 2, 10);
        worst = worst.max((got - want).abs() / want);
    }
    let spot = (n_eff(0.7, 0.3, 2, 10) - n_eff_by_root(0.7, 0.3, 2, 10)).abs();
    verdict(
        guards && mid < 1e-3 && worst < 1e-8 && spot < 1e-8,
        format!("guards exact {guards}, midpoint offset {mid:.1e}, root-solve rel err {worst:.1e}"),
    )
}

/// Driver DC gain, dead time, frequency response and H2 separation.
fn driver_models() -> Outcome {
    let dt = 1e-3;
    let mut notes = Vec::new();
    let mut ok = true;
    for kind in DriverKind::ALL {
        let p = kind.params();
        let tf = driver_tf(&p);
        let dc = (tf.dc_gain().unwrap() - 1.0).abs();
        // Unit step through the sampled realization.
        let mut st = DriverState::new(&p, dt).unwrap();
        let first = (0..10_000).find(|_| st.step(1.0, dt).unwrap() != 0.0).unwrap();
        let dead = (first as f64 - 1.0 - p.t_d / dt).abs();
        // Steady-state sine response.
        let mut fr_err: f64 = 0.0;
        for omega in [0.1, 0.3, 1.0] {
            let period = 2.0 * std::f64::consts::PI / omega;
            let settle = 150.0;
            let total = ((settle + 2.0 * period) / dt).round() as usize;
            let mut st = DriverState::new(&p, dt).unwrap();
            let (mut ys, mut ts) = (Vec::new(), Vec::new());
            for i in 0..total {
                let t = i as f64 * dt;
                let y = st.step((omega * t).sin(), dt).unwrap();
                if t >= settle {
                    ys.push(y);
                    ts.push(t);
                }
            }
            let got = sine_gain(&ys, &ts, omega);
            let want = tf.eval(Complex64::new(0.0, omega)).unwrap();
            fr_err = fr_err.max((got - want).norm() / want.norm());
        }
        ok &= dc < 1e-6 && dead <= 1.0 && fr_err < 0.01;
        notes.push(format!(
            "{kind}: DC err {dc:.0e}, dead-time off {dead} samples, response err {fr_err:.2e}"
        ));
    }
    let (a, d) = (
        driver_tf(&DriverKind::Attentive.params()),
        driver_tf(&DriverKind::Distracted.params()),
    );
    let coarse = h2_distance(&a, &d, &default_h2_grid()).unwrap();
    let fine = h2_distance(&a, &d, &log_grid(1e-3, 1e3, 16384)).unwrap();
    let drift = (coarse - fine).abs() / fine;
    ok &= coarse > 0.0 && drift < 0.01;
    notes.push(format!("H2 gap {coarse:.4e}, refinement drift {drift:.1e}"));
    verdict(ok, notes.join("; "))
}

/// Recursive forgetting integral against direct summation, and the
/// constant-residual limit.
fn cost_machinery() -> Outcome {
    let cfg = IdentifierConfig::default();
    let dt = 1e-3;
    let bank = hypothesis_bank(1);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let r: Vec<f64> = (0..2000).map(|_| rng.gen_range(0.0..2.0)).collect();
    let direct = direct_integral(&r, cfg.lambda, dt);
    let mut ledger = CostLedger::new(&bank);
    let mut worst: f64 = 0.0;
    for (i, &ri) in r.iter().enumerate() {
        update_cost(&mut ledger, &[ri, ri], dt, &cfg).unwrap();
        worst = worst.max((ledger.entries()[0].integral - direct[i]).abs());
    }
    let c = 0.25;
    let mut ledger = CostLedger::new(&bank);
    for _ in 0..(10.0 / cfg.lambda / dt).round() as usize {
        update_cost(&mut ledger, &[c, c], dt, &cfg).unwrap();
    }
    let limit = cfg.alpha * c + cfg.beta * c / cfg.lambda;
    let rel = (ledger.entries()[0].j - limit).abs() / limit;
    verdict(
        worst < 1e-10 && rel < 1e-3,
        format!("recursion vs direct {worst:.1e}, limit rel err {rel:.2e}"),
    )
}

/// Noisy tail measurements over 100 seeds.
fn noise_robustness() -> Outcome {
    let mut spec = catalog_spec("s1_accel");
    spec.noise.sigma = 0.01;
    let mut correct = 0;
    let mut wrong = Vec::new();
    for seed in 0..100 {
        spec.noise.seed = seed;
        let out = run(&spec, RunMode::FullBank).map_err(|e| e.to_string())?;
        if out.report.correct {
            correct += 1;
        } else {
            wrong.push(format!(
                "{seed}:{}",
                out.report.identified.map_or("-".into(), |h| h.to_string())
            ));
        }
    }
    verdict(correct >= 95, format!("{correct}/100 correct, misses {wrong:?}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("full-bank identification", full_bank),
        ("blending identification", blending),
        ("exhaustive self-consistency", self_consistency),
        ("determinant oracle", determinants),
        ("time/frequency equivalence", time_frequency),
        ("effective length formula", effective_length),
        ("driver models", driver_models),
        ("cost machinery", cost_machinery),
        ("noise robustness", noise_robustness),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let started = Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "criterion {}: {tag} {name} ({:.1} s) {detail}",
            i + 1,
            started.elapsed().as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
