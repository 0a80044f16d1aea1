//! Two-step identification by blending two boundary chain models.
//!
//! Step one fits `W1·G1 + W2·G2` to the tail deviation over short sliding
//! windows, where `G_i = T^{N_i−1}·H` are the shortest and longest possible
//! post-fault chains, and converts the weights into an effective chain
//! length. Step two runs the cost bank over just the two driver classes at
//! the recovered fault location.

use serde::{Deserialize, Serialize};

use crate::driver::{DriverKind, DriverParams, DriverState};
use crate::error::{invalid, Error, Result};
use crate::identifier::{
    detect_fault_time, identify, DetectorModel, Hypothesis, IdentificationResult, IdentifierConfig, OutputChannel,
    TailSignal,
};
use crate::lti::{chain_tf, compose_fault_tf, simulate_tf};
use crate::platoon::{fault_step, Architecture, ControllerGains, ReferenceProfile};

/// Guard width for the effective-length formula.
pub const N_EFF_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum IntegerizeMode {
    /// Round half away from zero.
    #[default]
    DirectRounding,
    /// Floor or ceiling, whichever chain reproduces the measurement better.
    ErrorMinimization,
}

/// Takeover onset used to build the boundary-model input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum BlendOnset {
    Known {
        t_f: f64,
    },
    Detected,
    /// Least-squares fit of onset and a single weight pair over the span,
    /// searched within `lookback` seconds before detection.
    Fitted {
        lookback: f64,
    },
}

impl Default for BlendOnset {
    fn default() -> Self {
        BlendOnset::Fitted { lookback: 8.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlendConfig {
    /// Shortest post-fault chain length.
    pub n1: usize,
    /// Longest post-fault chain length.
    pub n2: usize,
    /// Fit window (s).
    pub window: f64,
    /// Time after detection covered by the fit (s).
    pub span: f64,
    /// Driver model inside the boundary models.
    pub driver: DriverKind,
    pub integerize: IntegerizeMode,
    pub onset: BlendOnset,
}

impl Default for BlendConfig {
    fn default() -> Self {
        BlendConfig {
            n1: 2,
            n2: 10,
            window: 0.1,
            span: 8.0,
            driver: DriverKind::Distracted,
            integerize: IntegerizeMode::DirectRounding,
            onset: BlendOnset::default(),
        }
    }
}

impl BlendConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n1 < 2 || self.n2 <= self.n1 {
            return Err(invalid(
                "blend",
                format!("need N2 > N1 >= 2, got N1={} N2={}", self.n1, self.n2),
            ));
        }
        if !(self.window > 0.0 && self.window.is_finite()) {
            return Err(invalid("window", "must be positive"));
        }
        if !(self.span >= self.window) {
            return Err(invalid("span", "must cover at least one window"));
        }
        if let BlendOnset::Fitted { lookback } = self.onset {
            if !(lookback >= 0.0) {
                return Err(invalid("lookback", "must be >= 0"));
            }
        }
        Ok(())
    }
}

/// Weight pair on the unit simplex, stamped with the end time of its window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlendWeights {
    pub t: f64,
    pub w1: f64,
    pub w2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlendWindow {
    pub weights: BlendWeights,
    pub n_eff: f64,
    /// Median of this and the neighbouring windows.
    pub n_eff_smoothed: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlendResult {
    pub windows: Vec<BlendWindow>,
    pub t_hat_f: f64,
    pub onset: f64,
    /// Median of the smoothed per-window lengths.
    pub n_eff: f64,
    pub n_fin: usize,
    /// `N − N_fin + 1`.
    pub k_hat: usize,
    pub driver: DriverKind,
    pub driver_result: IdentificationResult,
    pub models_evaluated: usize,
    pub simulation_runs: usize,
}

impl BlendResult {
    pub fn hypothesis(&self) -> Hypothesis {
        Hypothesis {
            k: self.k_hat,
            d: self.driver,
        }
    }
}

/// Boundary-model input.
#[derive(Debug, Clone, Copy)]
pub enum BoundaryInput<'a> {
    /// Raw input, passed through `T^{N−1}·H`.
    Raw(&'a [f64]),
    /// Input already shaped by `H`; only the chain is applied.
    DriverShaped(&'a [f64]),
}

/// Responses `(ŷ1, ŷ2)` of the two boundary models.
pub fn boundary_outputs(
    config: &BlendConfig,
    gains: ControllerGains,
    architecture: Architecture,
    input: BoundaryInput<'_>,
    dt: f64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    config.validate()?;
    let out = |n: usize| chain_output(n, config, gains, architecture, input, dt);
    Ok((out(config.n1)?, out(config.n2)?))
}

fn chain_output(
    n: usize,
    config: &BlendConfig,
    gains: ControllerGains,
    architecture: Architecture,
    input: BoundaryInput<'_>,
    dt: f64,
) -> Result<Vec<f64>> {
    match input {
        BoundaryInput::Raw(u) => {
            let tf = compose_fault_tf(gains, n - 1, &config.driver.params(), architecture)?;
            simulate_tf(&tf, u, dt)
        }
        BoundaryInput::DriverShaped(u) => simulate_tf(&chain_tf(gains, n - 1, architecture)?, u, dt),
    }
}

/// Closed-form constrained least squares for `y ≈ W1·ŷ1 + (1 − W1)·ŷ2`.
pub fn fit_weights(y: &[f64], y1: &[f64], y2: &[f64]) -> Result<(f64, f64)> {
    if y.is_empty() {
        return Err(Error::Empty);
    }
    if y1.len() != y.len() || y2.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            actual: y1.len().min(y2.len()),
        });
    }
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..y.len() {
        let d = y1[i] - y2[i];
        num += (y[i] - y2[i]) * d;
        den += d * d;
    }
    if !(den > 0.0) {
        return Err(Error::IndeterminateFit);
    }
    let w1 = (num / den).clamp(0.0, 1.0);
    Ok((w1, 1.0 - w1))
}

/// Effective chain length from blend weights:
///
/// `N_eff = 1 + (N2−N1)·ln(W1·r^{(N1−1)/(N2−N1)} + W2·r^{(N2−1)/(N2−N1)}) / ln r`,
/// `r = W1/W2`, with guards at the simplex corners and at `r = 1`.
pub fn n_eff(w1: f64, w2: f64, n1: usize, n2: usize) -> f64 {
    let (n1f, n2f) = (n1 as f64, n2 as f64);
    if w2 < N_EFF_EPS {
        return n1f;
    }
    if w1 < N_EFF_EPS {
        return n2f;
    }
    let ln_r = (w1 / w2).ln();
    if ln_r.abs() < N_EFF_EPS {
        return 0.5 * (n1f + n2f);
    }
    let span = n2f - n1f;
    // Summed in log space; r^p overflows for extreme weights.
    let a = w1.ln() + (n1f - 1.0) / span * ln_r;
    let b = w2.ln() + (n2f - 1.0) / span * ln_r;
    let hi = a.max(b);
    let log_sum = hi + ((a - hi).exp() + (b - hi).exp()).ln();
    (1.0 + span * log_sum / ln_r).clamp(n1f, n2f)
}

/// Round half away from zero, clamped to `[n1, n2]`. In error-minimization
/// mode `error_of(n)` scores the candidate lengths `floor` and `ceil`.
pub fn integerize(
    n_eff: f64,
    n1: usize,
    n2: usize,
    mode: IntegerizeMode,
    error_of: Option<&dyn Fn(usize) -> Result<f64>>,
) -> Result<usize> {
    if !n_eff.is_finite() {
        return Err(Error::NonFinite("n_eff"));
    }
    let clamp = |n: f64| (n as usize).clamp(n1, n2);
    match mode {
        IntegerizeMode::DirectRounding => Ok(clamp(n_eff.round())),
        IntegerizeMode::ErrorMinimization => {
            let f = error_of.ok_or(Error::MissingContext)?;
            let lo = clamp(n_eff.floor());
            let hi = clamp(n_eff.ceil());
            if lo == hi {
                return Ok(lo);
            }
            Ok(if f(hi)? < f(lo)? { hi } else { lo })
        }
    }
}

/// Step two: cost bank over `(k̂, Attentive)` and `(k̂, Distracted)`.
pub fn second_step_driver(
    model: &DetectorModel,
    n_fin: usize,
    measured: &TailSignal,
    config: &IdentifierConfig,
) -> Result<(DriverKind, IdentificationResult)> {
    let n = model.config.n();
    if n_fin < 1 || n_fin > n {
        return Err(Error::IndexOutOfRange { index: n_fin, max: n });
    }
    let k = n - n_fin + 1;
    let hyps: Vec<Hypothesis> = DriverKind::ALL.into_iter().map(|d| Hypothesis { k, d }).collect();
    let result = identify(model, measured, &hyps, config)?;
    let d = result.final_selection().map_or(DriverKind::Attentive, |h| h.d);
    Ok((d, result))
}

/// Head-vehicle deviation predicted by the takeover protocol: braking at
/// `a_saf` instead of tracking the reference acceleration, corrected by the
/// driver model reacting to the lost relative velocity. Zero before `onset`.
///
/// This is the `H`-shaped signal the boundary chains propagate to the tail.
pub fn takeover_head_deviation(
    reference: &ReferenceProfile,
    a_saf: f64,
    driver: &DriverParams,
    onset: f64,
    len: usize,
    dt: f64,
) -> Result<Vec<f64>> {
    let mut out = vec![0.0; len];
    let start = fault_step(onset, dt);
    let mut state = DriverState::new(driver, dt)?;
    let (mut p, mut v) = (0.0, 0.0);
    for (i, slot) in out.iter_mut().enumerate().skip(start) {
        *slot = p;
        let t = i as f64 * dt;
        let a = state.step(-v, dt)? - a_saf - reference.sample(t).2;
        p += v * dt + 0.5 * a * dt * dt;
        v += a * dt;
    }
    Ok(out)
}

struct Fitter<'a> {
    config: &'a BlendConfig,
    model: &'a DetectorModel,
    deviation: &'a [f64],
    /// Fit range `[from, to)`.
    from: usize,
    to: usize,
    runs: usize,
}

impl Fitter<'_> {
    fn outputs(&mut self, onset: f64) -> Result<(Vec<f64>, Vec<f64>)> {
        let m = &self.model;
        let head = takeover_head_deviation(
            &m.reference,
            m.a_saf,
            &self.config.driver.params(),
            onset,
            self.to,
            m.dt,
        )?;
        // Outputs vanish before the onset, so simulate from there.
        let s = fault_step(onset, m.dt).min(self.to);
        let (y1, y2) = boundary_outputs(
            self.config,
            m.config.gains,
            m.config.architecture,
            BoundaryInput::DriverShaped(&head[s..]),
            m.dt,
        )?;
        self.runs += 2;
        let pad = |y: Vec<f64>| {
            let mut v = vec![0.0; s];
            v.extend(y);
            v
        };
        Ok((pad(y1), pad(y2)))
    }

    fn residual(&mut self, onset: f64) -> Result<f64> {
        let (y1, y2) = self.outputs(onset)?;
        let r = self.from..self.to;
        let (w1, w2) = match fit_weights(&self.deviation[r.clone()], &y1[r.clone()], &y2[r.clone()]) {
            Ok(w) => w,
            Err(Error::IndeterminateFit) => return Ok(f64::INFINITY),
            Err(e) => return Err(e),
        };
        Ok(r.map(|i| (self.deviation[i] - w1 * y1[i] - w2 * y2[i]).powi(2)).sum())
    }

    fn fit_onset(&mut self, lo: usize, hi: usize) -> Result<usize> {
        let dt = self.model.dt;
        let mut best = (f64::INFINITY, hi);
        let mut step = ((0.1 / dt).round() as usize).max(1);
        let (mut a, mut b) = (lo, hi);
        loop {
            let mut m = a;
            while m <= b {
                let e = self.residual(m as f64 * dt)?;
                if e < best.0 {
                    best = (e, m);
                }
                m += step;
            }
            if step == 1 {
                break;
            }
            a = best.1.saturating_sub(step).max(lo);
            b = (best.1 + step).min(hi);
            step = (step / 10).max(1);
        }
        Ok(best.1)
    }
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn smooth3(x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|i| {
            if i == 0 || i + 1 == x.len() {
                x[i]
            } else {
                median(&mut [x[i - 1], x[i], x[i + 1]])
            }
        })
        .collect()
}

/// Runs both steps against a tail measurement. `None` when no fault is
/// detected.
pub fn blend(
    model: &DetectorModel,
    measured: &TailSignal,
    config: &BlendConfig,
    id_config: &IdentifierConfig,
) -> Result<Option<BlendResult>> {
    config.validate()?;
    id_config.validate()?;
    if config.n2 > model.config.n() {
        return Err(invalid(
            "blend",
            format!("N2={} exceeds platoon size {}", config.n2, model.config.n()),
        ));
    }
    let dt = model.dt;
    let nominal = model.nominal()?;
    let Some(t_hat) = detect_fault_time(
        measured,
        &nominal,
        id_config.detection_threshold,
        OutputChannel::PositionError,
    )?
    else {
        return Ok(None);
    };
    let deviation: Vec<f64> = measured.pos.iter().zip(&nominal.pos).map(|(y, n)| y - n).collect();
    let det = fault_step(t_hat, dt).min(deviation.len() - 1);
    let to = (det + (config.span / dt).round() as usize).min(deviation.len());
    let mut fitter = Fitter {
        config,
        model,
        deviation: &deviation,
        from: det,
        to,
        runs: 1,
    };
    let onset = match config.onset {
        BlendOnset::Known { t_f } => t_f,
        BlendOnset::Detected => t_hat,
        BlendOnset::Fitted { lookback } => {
            let lo = det.saturating_sub((lookback / dt).round() as usize);
            fitter.fit_onset(lo, det)? as f64 * dt
        }
    };
    let (y1, y2) = fitter.outputs(onset)?;

    let w = ((config.window / dt).round() as usize).max(1);
    let hop = (w / 2).max(1);
    let mut weights = Vec::new();
    let mut start = det;
    while start + w <= to {
        let r = start..start + w;
        match fit_weights(&deviation[r.clone()], &y1[r.clone()], &y2[r]) {
            Ok((w1, w2)) => weights.push(BlendWeights {
                t: (start + w) as f64 * dt,
                w1,
                w2,
            }),
            Err(Error::IndeterminateFit) => {}
            Err(e) => return Err(e),
        }
        start += hop;
    }
    if weights.is_empty() {
        return Err(Error::IndeterminateFit);
    }
    let raw: Vec<f64> = weights
        .iter()
        .map(|b| n_eff(b.w1, b.w2, config.n1, config.n2))
        .collect();
    let smoothed = smooth3(&raw);
    let windows: Vec<BlendWindow> = weights
        .iter()
        .zip(raw.iter().zip(&smoothed))
        .map(|(&weights, (&n_eff, &n_eff_smoothed))| BlendWindow {
            weights,
            n_eff,
            n_eff_smoothed,
        })
        .collect();
    let n_eff_med = median(&mut smoothed.clone());

    let mut models_evaluated = 2;
    let mut extra_runs = 0;
    let n_fin = match config.integerize {
        IntegerizeMode::DirectRounding => integerize(n_eff_med, config.n1, config.n2, config.integerize, None)?,
        IntegerizeMode::ErrorMinimization => {
            let head = takeover_head_deviation(&model.reference, model.a_saf, &config.driver.params(), onset, to, dt)?;
            let err = |n: usize| -> Result<f64> {
                let y = chain_output(
                    n,
                    config,
                    model.config.gains,
                    model.config.architecture,
                    BoundaryInput::DriverShaped(&head),
                    dt,
                )?;
                Ok((det..to).map(|i| (deviation[i] - y[i]).powi(2)).sum())
            };
            let lo = n_eff_med.floor();
            if lo != n_eff_med.ceil() {
                models_evaluated += 2;
                extra_runs += 2;
            }
            integerize(n_eff_med, config.n1, config.n2, config.integerize, Some(&err))?
        }
    };
    let (driver, driver_result) = second_step_driver(model, n_fin, measured, id_config)?;
    models_evaluated += driver_result.models_evaluated;
    Ok(Some(BlendResult {
        windows,
        t_hat_f: t_hat,
        onset,
        n_eff: n_eff_med,
        n_fin,
        k_hat: model.config.n() - n_fin + 1,
        driver,
        simulation_runs: fitter.runs + extra_runs + driver_result.simulation_runs,
        driver_result,
        models_evaluated,
    }))
}
