//! Scenario files, the shipped catalog, and end-to-end runs with CSV and
//! text-report output.
//!
//! A scenario is a TOML document:
//!
//! ```toml
//! name = "s1_accel"
//! dt = 0.001            # optional, default 1 ms
//! horizon = 25.0        # optional, default t_f + 20 s
//!
//! [platoon]
//! n = 10
//! gap = 10.0            # or `gaps = [...]`, one per vehicle
//! architecture = "pf"   # or "sb"
//!
//! [reference]
//! initial_speed = 0.0
//! [[reference.segments]]
//! duration = 10.0
//! mode = "accelerate"
//! rate = 2.0
//!
//! [fault]               # optional
//! k = 4
//! t_f = 5.0
//! driver = "distracted"
//!
//! [identifier]          # optional, every key defaulted
//! [blend]               # optional; enables the blending mode
//! [noise]               # optional: sigma (m), seed
//! [output]              # optional: dir, stride
//! ```

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::blender::{blend, BlendConfig, BlendResult};
use crate::driver::{DriverKind, FaultScenario, DEFAULT_A_SAF};
use crate::error::{Error, Result};
use crate::identifier::{
    hypothesis_bank, identify, DetectorModel, Hypothesis, IdentificationResult, IdentifierConfig, TailSignal,
};
use crate::platoon::{
    simulate, Architecture, ControllerGains, Disturbances, PlatoonConfig, ReferenceProfile, SbFaultMode, SimTrace,
};

/// Extra simulated time after the fault when no horizon is given (s).
pub const DEFAULT_TAIL_TIME: f64 = 20.0;

fn default_dt() -> f64 {
    1e-3
}

fn default_gap() -> f64 {
    10.0
}

fn default_k0() -> f64 {
    ControllerGains::default().k0
}

fn default_b0() -> f64 {
    ControllerGains::default().b0
}

fn default_stride() -> usize {
    10
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlatoonSection {
    pub n: usize,
    #[serde(default = "default_gap")]
    pub gap: f64,
    /// Per-vehicle gaps; overrides `gap`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gaps: Option<Vec<f64>>,
    pub architecture: Architecture,
    #[serde(default = "default_k0")]
    pub k0: f64,
    #[serde(default = "default_b0")]
    pub b0: f64,
    #[serde(default)]
    pub sb_fault_mode: SbFaultMode,
}

impl PlatoonSection {
    pub fn to_config(&self) -> Result<PlatoonConfig> {
        let gains = ControllerGains::new(self.k0, self.b0)?;
        let gaps = self.gaps.clone().unwrap_or_else(|| vec![self.gap; self.n]);
        let mut cfg = PlatoonConfig::new(gaps, gains, self.architecture)?;
        cfg.sb_fault_mode = self.sb_fault_mode;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseSection {
    /// Standard deviation of additive tail measurement noise (m, m/s).
    pub sigma: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default)]
    pub dir: Option<PathBuf>,
    /// Every `stride`-th sample goes to the trace and identification CSVs.
    #[serde(default = "default_stride")]
    pub stride: usize,
}

impl Default for OutputSection {
    fn default() -> Self {
        OutputSection {
            dir: None,
            stride: default_stride(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    #[serde(default = "default_dt")]
    dt: f64,
    #[serde(default)]
    horizon: Option<f64>,
    platoon: PlatoonSection,
    reference: ReferenceProfile,
    #[serde(default)]
    fault: Option<FaultScenario>,
    #[serde(default)]
    identifier: IdentifierConfig,
    #[serde(default)]
    blend: Option<BlendConfig>,
    #[serde(default)]
    noise: NoiseSection,
    #[serde(default)]
    output: OutputSection,
}

/// A validated scenario with every default filled in.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSpec {
    pub name: String,
    pub dt: f64,
    pub horizon: f64,
    pub platoon: PlatoonSection,
    pub reference: ReferenceProfile,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault: Option<FaultScenario>,
    pub identifier: IdentifierConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub blend: Option<BlendConfig>,
    pub noise: NoiseSection,
    pub output: OutputSection,
}

fn field(path: &str, e: impl std::fmt::Display) -> Error {
    Error::Scenario(format!("{path}: {e}"))
}

/// Parses and validates a scenario document.
pub fn parse_scenario(text: &str) -> Result<ScenarioSpec> {
    let raw: RawScenario = toml::from_str(text).map_err(|e| Error::Scenario(e.to_string().trim_end().to_owned()))?;
    let horizon = raw.horizon.unwrap_or_else(|| match raw.fault {
        Some(f) => f.t_f + DEFAULT_TAIL_TIME,
        None => raw.reference.breakpoints().last().copied().unwrap_or(0.0) + DEFAULT_TAIL_TIME,
    });
    let spec = ScenarioSpec {
        name: raw.name,
        dt: raw.dt,
        horizon,
        platoon: raw.platoon,
        reference: raw.reference,
        fault: raw.fault,
        identifier: raw.identifier,
        blend: raw.blend,
        noise: raw.noise,
        output: raw.output,
    };
    spec.validate()?;
    Ok(spec)
}

impl ScenarioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(field("name", "must be non-empty and free of path separators"));
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(field("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(field("horizon", format!("must be positive, got {}", self.horizon)));
        }
        if let Some(g) = &self.platoon.gaps {
            if g.len() != self.platoon.n {
                return Err(field(
                    "platoon.gaps",
                    format!("expected {} entries, got {}", self.platoon.n, g.len()),
                ));
            }
        }
        self.platoon.to_config().map_err(|e| field("platoon", e))?;
        self.reference.validate().map_err(|e| field("reference", e))?;
        if let Some(f) = &self.fault {
            if f.k < 1 || f.k > self.platoon.n {
                return Err(field("fault.k", format!("{} is outside 1..={}", f.k, self.platoon.n)));
            }
            f.validate(self.platoon.n).map_err(|e| field("fault", e))?;
            if f.t_f >= self.horizon {
                return Err(field(
                    "fault.t_f",
                    format!("{} must precede horizon {}", f.t_f, self.horizon),
                ));
            }
        }
        self.identifier.validate().map_err(|e| field("identifier", e))?;
        if let Some(b) = &self.blend {
            b.validate().map_err(|e| field("blend", e))?;
            if b.n2 > self.platoon.n {
                return Err(field(
                    "blend.n2",
                    format!("{} exceeds platoon size {}", b.n2, self.platoon.n),
                ));
            }
        }
        if !(self.noise.sigma >= 0.0 && self.noise.sigma.is_finite()) {
            return Err(field("noise.sigma", "must be finite and >= 0"));
        }
        if self.output.stride == 0 {
            return Err(field("output.stride", "must be >= 1"));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario fields are TOML-representable")
    }

    pub fn a_saf(&self) -> f64 {
        self.fault.map_or(DEFAULT_A_SAF, |f| f.a_saf)
    }

    pub fn truth(&self) -> Option<Hypothesis> {
        self.fault.map(|f| Hypothesis { k: f.k, d: f.driver })
    }

    pub fn output_dir(&self) -> PathBuf {
        self.output
            .dir
            .clone()
            .unwrap_or_else(|| Path::new("out").join(&self.name))
    }

    pub fn default_mode(&self) -> RunMode {
        if self.blend.is_some() {
            RunMode::Both
        } else {
            RunMode::FullBank
        }
    }

    pub fn detector_model(&self) -> Result<DetectorModel> {
        Ok(DetectorModel {
            config: self.platoon.to_config()?,
            reference: self.reference.clone(),
            a_saf: self.a_saf(),
            horizon: self.horizon,
            dt: self.dt,
        })
    }
}

const CATALOG: [(&str, &str); 7] = [
    ("s1_accel.scn", include_str!("../scenarios/s1_accel.scn")),
    ("s2_cruise.scn", include_str!("../scenarios/s2_cruise.scn")),
    ("s3_brake.scn", include_str!("../scenarios/s3_brake.scn")),
    ("s4_accel_sb.scn", include_str!("../scenarios/s4_accel_sb.scn")),
    ("s5_cruise_sb.scn", include_str!("../scenarios/s5_cruise_sb.scn")),
    ("s6_brake_sb.scn", include_str!("../scenarios/s6_brake_sb.scn")),
    ("s7_accel_blend.scn", include_str!("../scenarios/s7_accel_blend.scn")),
];

/// The shipped scenario files as `(file name, text)`.
pub fn catalog_sources() -> &'static [(&'static str, &'static str)] {
    &CATALOG
}

/// The shipped scenarios: three maneuvers for each architecture, plus the
/// blending variant of the acceleration case.
pub fn catalog() -> Vec<ScenarioSpec> {
    CATALOG
        .iter()
        .map(|(file, text)| parse_scenario(text).unwrap_or_else(|e| panic!("shipped scenario {file} is invalid: {e}")))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunMode {
    FullBank,
    Blending,
    Both,
}

impl FromStr for RunMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full-bank" | "full" => Ok(RunMode::FullBank),
            "blending" | "blend" => Ok(RunMode::Blending),
            "both" => Ok(RunMode::Both),
            other => Err(Error::Scenario(format!(
                "mode: unknown `{other}` (full-bank, blending, both)"
            ))),
        }
    }
}

impl RunMode {
    fn bank(self) -> bool {
        matches!(self, RunMode::FullBank | RunMode::Both)
    }

    fn blending(self) -> bool {
        matches!(self, RunMode::Blending | RunMode::Both)
    }
}

/// One row of the identification CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct IdRow {
    pub t: f64,
    pub costs: Vec<f64>,
    pub selected: Hypothesis,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub name: String,
    pub mode: RunMode,
    pub truth: Option<Hypothesis>,
    pub identified: Option<Hypothesis>,
    pub correct: bool,
    /// First identification row.
    pub t_hat_f: Option<f64>,
    /// Start of the final run of correct selections.
    pub convergence_time: Option<f64>,
    pub blend_n_eff: Option<f64>,
    pub blend_n_fin: Option<usize>,
    pub blend_identified: Option<Hypothesis>,
    pub models_evaluated: usize,
    pub simulation_runs: usize,
    pub wall_clock: Duration,
}

/// What a report can learn from identification rows alone.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RowSummary {
    pub first_t: Option<f64>,
    pub last: Option<Hypothesis>,
    pub correct_since: Option<f64>,
}

/// Folds identification rows into the report's decision fields.
pub fn summarize_rows<'a>(
    rows: impl IntoIterator<Item = &'a (f64, Hypothesis)>,
    truth: Option<Hypothesis>,
) -> RowSummary {
    rows.into_iter().fold(RowSummary::default(), |mut s, &(t, h)| {
        s.first_t.get_or_insert(t);
        s.last = Some(h);
        s.correct_since = if Some(h) == truth {
            s.correct_since.or(Some(t))
        } else {
            None
        };
        s
    })
}

/// Everything a run produces, held in memory.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub report: RunReport,
    pub trace_csv: String,
    pub identification_csv: String,
    pub blend_csv: Option<String>,
    pub report_text: String,
    pub bank: Option<IdentificationResult>,
    pub blend: Option<BlendResult>,
}

/// 17 significant digits.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_text(header: Vec<String>, rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).map_err(|e| Error::Io(e.to_string()))?;
    for r in rows {
        w.write_record(&r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

fn strided(len: usize, stride: usize) -> impl Iterator<Item = usize> {
    // The last sample is always kept.
    (0..len).filter(move |&i| i % stride == 0 || i + 1 == len)
}

fn trace_csv(trace: &SimTrace, stride: usize) -> Result<String> {
    let n = trace.states.first().map_or(0, |s| s.n());
    let mut header = vec!["t".to_owned()];
    for prefix in ["p", "v", "u"] {
        header.extend((1..=n).map(|i| format!("{prefix}_{i}")));
    }
    let rows = strided(trace.len(), stride).map(|i| {
        let s = &trace.states[i];
        let mut r = vec![num(s.t)];
        r.extend(s.positions.iter().map(|&x| num(x)));
        r.extend(s.velocities.iter().map(|&x| num(x)));
        r.extend(trace.controls[i].iter().map(|&x| num(x)));
        r
    });
    csv_text(header, rows)
}

/// Rows from detection on; earlier costs only warm up the ledger.
pub fn identification_rows(result: &IdentificationResult, stride: usize) -> Vec<IdRow> {
    let Some(t_hat) = result.t_hat_f else {
        return Vec::new();
    };
    let first = result
        .selections
        .iter()
        .enumerate()
        .position(|(i, _)| result.time_at(i) >= t_hat - 0.5 * result.dt)
        .unwrap_or(result.selections.len());
    let len = result.selections.len() - first;
    strided(len, stride)
        .map(|j| {
            let i = first + j;
            IdRow {
                t: result.time_at(i),
                costs: result.costs.iter().map(|c| c[i]).collect(),
                selected: result.selections[i],
            }
        })
        .collect()
}

fn identification_csv(hyps: &[Hypothesis], rows: &[IdRow]) -> Result<String> {
    let mut header = vec!["t".to_owned()];
    header.extend(hyps.iter().map(|h| format!("J_{}{}", h.k, h.d.letter())));
    header.push("k_hat".to_owned());
    header.push("d_hat".to_owned());
    csv_text(
        header,
        rows.iter().map(|r| {
            let mut v = vec![num(r.t)];
            v.extend(r.costs.iter().map(|&x| num(x)));
            v.push(r.selected.k.to_string());
            v.push(r.selected.d.letter().to_string());
            v
        }),
    )
}

fn blend_csv(b: &BlendResult) -> Result<String> {
    let header = ["t", "W1", "W2", "N_eff", "N_eff_smoothed"].map(str::to_owned).to_vec();
    csv_text(
        header,
        b.windows.iter().map(|w| {
            vec![
                num(w.weights.t),
                num(w.weights.w1),
                num(w.weights.w2),
                num(w.n_eff),
                num(w.n_eff_smoothed),
            ]
        }),
    )
}

/// Reads `(t, k̂, d̂)` back from an identification CSV.
pub fn parse_identification_csv(text: &str) -> Result<Vec<(f64, Hypothesis)>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let bad = |e: &dyn std::fmt::Display| Error::Io(format!("identification csv: {e}"));
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(&e))?;
        let n = rec.len();
        if n < 3 {
            return Err(bad(&"too few columns"));
        }
        let t: f64 = rec[0].parse().map_err(|e| bad(&e))?;
        let k: usize = rec[n - 2].parse().map_err(|e| bad(&e))?;
        let d: DriverKind = rec[n - 1].parse().map_err(|e| bad(&e))?;
        out.push((t, Hypothesis { k, d }));
    }
    Ok(out)
}

fn tail_measurement(spec: &ScenarioSpec, trace: &SimTrace, config: &PlatoonConfig) -> Result<TailSignal> {
    let n = config.n();
    let errs = trace.tracking_errors(config, &spec.reference)?;
    let mut pos: Vec<f64> = errs.iter().map(|e| e.pos[n - 1]).collect();
    let mut vel: Vec<f64> = errs.iter().map(|e| e.vel[n - 1]).collect();
    if spec.noise.sigma > 0.0 {
        let normal = Normal::new(0.0, spec.noise.sigma).map_err(|e| field("noise.sigma", e))?;
        let mut rng = ChaCha8Rng::seed_from_u64(spec.noise.seed);
        for (p, v) in pos.iter_mut().zip(vel.iter_mut()) {
            *p += normal.sample(&mut rng);
            *v += normal.sample(&mut rng);
        }
    }
    Ok(TailSignal { dt: spec.dt, pos, vel })
}

/// Simulates the scenario, runs the requested identifiers, and renders all
/// artifacts in memory.
pub fn run(spec: &ScenarioSpec, mode: RunMode) -> Result<RunOutcome> {
    spec.validate()?;
    let started = Instant::now();
    let config = spec.platoon.to_config()?;
    let trace = simulate(
        &config,
        &spec.reference,
        &Disturbances::Zero,
        spec.horizon,
        spec.dt,
        spec.fault.as_ref(),
    )?;
    let measured = tail_measurement(spec, &trace, &config)?;
    let model = spec.detector_model()?;
    let truth = spec.truth();

    let bank = if mode.bank() {
        Some(identify(
            &model,
            &measured,
            &hypothesis_bank(config.n()),
            &spec.identifier,
        )?)
    } else {
        None
    };
    let blended = if mode.blending() {
        let cfg = spec
            .blend
            .ok_or_else(|| field("blend", "blending mode needs a [blend] section"))?;
        blend(&model, &measured, &cfg, &spec.identifier)?
    } else {
        None
    };

    // The decision rows come from the bank when it ran, else from the
    // blender's second step.
    let decision = bank.as_ref().or(blended.as_ref().map(|b| &b.driver_result));
    let (rows, hyps) = match decision {
        Some(r) => (identification_rows(r, spec.output.stride), r.hypotheses.clone()),
        None => (Vec::new(), hypothesis_bank(config.n())),
    };
    let identification_csv = identification_csv(&hyps, &rows)?;
    let pairs: Vec<(f64, Hypothesis)> = rows.iter().map(|r| (r.t, r.selected)).collect();
    let summary = summarize_rows(&pairs, truth);
    let correct = match truth {
        Some(_) => summary.last.is_some() && summary.last == truth,
        None => summary.last.is_none(),
    };
    let mut models_evaluated = 0;
    let mut simulation_runs = 0;
    if let Some(b) = &bank {
        models_evaluated += b.models_evaluated;
        simulation_runs += b.simulation_runs;
    }
    if let Some(b) = &blended {
        models_evaluated += b.models_evaluated;
        simulation_runs += b.simulation_runs;
    }
    let report = RunReport {
        name: spec.name.clone(),
        mode,
        truth,
        identified: summary.last,
        correct,
        t_hat_f: summary.first_t,
        convergence_time: if correct && truth.is_some() {
            summary.correct_since
        } else {
            None
        },
        blend_n_eff: blended.as_ref().map(|b| b.n_eff),
        blend_n_fin: blended.as_ref().map(|b| b.n_fin),
        blend_identified: blended.as_ref().map(BlendResult::hypothesis),
        models_evaluated,
        simulation_runs,
        wall_clock: started.elapsed(),
    };
    let blend_csv = blended.as_ref().map(blend_csv).transpose()?;
    Ok(RunOutcome {
        report_text: render_report(spec, &report),
        trace_csv: trace_csv(&trace, spec.output.stride)?,
        identification_csv,
        blend_csv,
        report,
        bank,
        blend: blended,
    })
}

fn opt<T: std::fmt::Display>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_owned(), |v| v.to_string())
}

fn render_report(spec: &ScenarioSpec, r: &RunReport) -> String {
    let mut s = String::new();
    let mode = match r.mode {
        RunMode::FullBank => "full-bank",
        RunMode::Blending => "blending",
        RunMode::Both => "both",
    };
    let _ = writeln!(s, "scenario      {}", r.name);
    let _ = writeln!(s, "mode          {mode}");
    let _ = writeln!(
        s,
        "platoon       N={} {} k0={} b0={}",
        spec.platoon.n, spec.platoon.architecture, spec.platoon.k0, spec.platoon.b0
    );
    let _ = writeln!(s, "horizon       {} s at dt={} s", spec.horizon, spec.dt);
    if let Some(f) = spec.fault {
        let _ = writeln!(
            s,
            "fault         k={} t_f={} s driver={} a_saf={} m/s^2",
            f.k, f.t_f, f.driver, f.a_saf
        );
    } else {
        let _ = writeln!(s, "fault         none");
    }
    let _ = writeln!(s, "noise         sigma={} seed={}", spec.noise.sigma, spec.noise.seed);
    let _ = writeln!(s);
    let _ = writeln!(s, "detected at   {}", opt(r.t_hat_f.map(|t| format!("{t:.3} s"))));
    let _ = writeln!(s, "identified    {}", opt(r.identified));
    let _ = writeln!(s, "truth         {}", opt(r.truth));
    let _ = writeln!(s, "correct       {}", r.correct);
    let _ = writeln!(
        s,
        "converged at  {}",
        opt(r.convergence_time.map(|t| format!("{t:.3} s")))
    );
    if r.blend_n_fin.is_some() {
        let _ = writeln!(s);
        let _ = writeln!(s, "blend N_eff   {}", opt(r.blend_n_eff.map(|x| format!("{x:.3}"))));
        let _ = writeln!(s, "blend N_fin   {}", opt(r.blend_n_fin));
        let _ = writeln!(s, "blend result  {}", opt(r.blend_identified));
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "models        {}", r.models_evaluated);
    let _ = writeln!(s, "simulations   {}", r.simulation_runs);
    let _ = writeln!(s, "wall clock    {:.2} s", r.wall_clock.as_secs_f64());
    s
}

/// Writes `trace.csv`, `identification.csv`, `blend.csv` (when blending
/// ran) and `report.txt` into `dir`.
pub fn write_artifacts(outcome: &RunOutcome, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("trace.csv"), &outcome.trace_csv)?;
    fs::write(dir.join("identification.csv"), &outcome.identification_csv)?;
    if let Some(b) = &outcome.blend_csv {
        fs::write(dir.join("blend.csv"), b)?;
    }
    fs::write(dir.join("report.txt"), &outcome.report_text)?;
    Ok(())
}

/// Runs several scenarios on the global thread pool, each writing into
/// `out_root/<name>`. `mode` overrides every spec's default mode.
pub fn run_many(specs: &[ScenarioSpec], out_root: &Path, mode: Option<RunMode>) -> Vec<(String, Result<RunReport>)> {
    specs
        .par_iter()
        .map(|spec| {
            let result = run(spec, mode.unwrap_or(spec.default_mode())).and_then(|o| {
                write_artifacts(&o, &out_root.join(&spec.name))?;
                Ok(o.report)
            });
            (spec.name.clone(), result)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "tiny"
[platoon]
n = 3
architecture = "pf"
[reference]
initial_speed = 10.0
segments = []
[fault]
k = 2
t_f = 1.0
driver = "attentive"
"#;

    #[test]
    fn defaults_are_filled() {
        let s = parse_scenario(MINIMAL).unwrap();
        assert_eq!(s.dt, 1e-3);
        assert_eq!(s.horizon, 21.0);
        assert_eq!(
            (s.identifier.alpha, s.identifier.beta, s.identifier.lambda),
            (0.6, 0.4, 0.1)
        );
        assert_eq!(s.a_saf(), 2.0);
        assert_eq!(s.platoon.gap, 10.0);
        assert_eq!(s.output.stride, 10);
        assert_eq!(s.default_mode(), RunMode::FullBank);
    }

    #[test]
    fn unknown_key_is_rejected_with_location() {
        let text = MINIMAL.replace("n = 3", "n = 3\nspeed_limit = 4");
        let e = parse_scenario(&text).unwrap_err().to_string();
        assert!(e.contains("speed_limit"), "{e}");
        assert!(e.contains("line"), "{e}");
    }

    #[test]
    fn fault_index_is_checked() {
        let text = MINIMAL.replace("k = 2", "k = 7");
        let e = parse_scenario(&text).unwrap_err().to_string();
        assert!(e.contains("fault.k"), "{e}");
    }

    #[test]
    fn modes_parse() {
        assert_eq!("full-bank".parse::<RunMode>().unwrap(), RunMode::FullBank);
        assert_eq!("blending".parse::<RunMode>().unwrap(), RunMode::Blending);
        assert!("fast".parse::<RunMode>().is_err());
    }

    #[test]
    fn fold_tracks_last_streak() {
        let a = Hypothesis {
            k: 3,
            d: DriverKind::Attentive,
        };
        let b = Hypothesis {
            k: 4,
            d: DriverKind::Distracted,
        };
        let rows = [(1.0, a), (2.0, b), (3.0, a), (4.0, b), (5.0, b)];
        let s = summarize_rows(&rows, Some(b));
        assert_eq!(s.first_t, Some(1.0));
        assert_eq!(s.last, Some(b));
        assert_eq!(s.correct_since, Some(4.0));
    }

    #[test]
    fn catalog_round_trips() {
        for spec in catalog() {
            let text = spec.to_toml();
            let again = parse_scenario(&text).unwrap_or_else(|e| panic!("{}: {e}\n{text}", spec.name));
            assert_eq!(again, spec);
            assert_eq!(again.to_toml(), text);
        }
    }

    #[test]
    fn stride_keeps_last_sample() {
        assert_eq!(strided(7, 3).collect::<Vec<_>>(), vec![0, 3, 6]);
        assert_eq!(strided(8, 3).collect::<Vec<_>>(), vec![0, 3, 6, 7]);
    }
}
