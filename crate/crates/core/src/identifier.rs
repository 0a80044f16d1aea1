//! Multi-model fault identifier.
//!
//! Every hypothesis `(k, d)` is simulated with the detector's own copy of
//! the platoon model, its tail output is compared to the measured tail, and
//! the hypothesis with the smallest forgetting-factor cost wins.

use std::fmt;

use rayon::prelude::*;

use crate::driver::{DriverKind, FaultScenario};
use crate::error::{invalid, Error, Result};
use crate::platoon::{
    fault_step, simulate, simulate_tail, simulate_tail_from, steps_for, Disturbances, PlatoonConfig, PlatoonState,
    ReferenceProfile,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hypothesis {
    pub k: usize,
    pub d: DriverKind,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.k, self.d.letter())
    }
}

/// All `2N` hypotheses, ordered by `k` then Attentive before Distracted.
pub fn hypothesis_bank(n: usize) -> Vec<Hypothesis> {
    (1..=n)
        .flat_map(|k| DriverKind::ALL.into_iter().map(move |d| Hypothesis { k, d }))
        .collect()
}

/// Which tail quantities enter the residual norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputChannel {
    /// Tail position tracking error `p̃_N` (m).
    #[default]
    PositionError,
    /// Tail velocity error `ṗ̃_N` (m/s).
    VelocityError,
    /// Both, summed in the squared norm.
    Both,
}

/// Sampled tail measurements on a uniform grid starting at `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TailSignal {
    pub dt: f64,
    pub pos: Vec<f64>,
    pub vel: Vec<f64>,
}

impl TailSignal {
    pub fn len(&self) -> usize {
        self.pos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pos.is_empty()
    }

    /// The selected channels at sample `i`.
    pub fn channel(&self, channel: OutputChannel, i: usize) -> ChannelSample {
        match channel {
            OutputChannel::PositionError => ChannelSample::One(self.pos[i]),
            OutputChannel::VelocityError => ChannelSample::One(self.vel[i]),
            OutputChannel::Both => ChannelSample::Two(self.pos[i], self.vel[i]),
        }
    }

    /// `‖self − other‖²` on the selected channels at sample `i`.
    pub fn sq_dist(&self, other: &TailSignal, channel: OutputChannel, i: usize) -> f64 {
        let dp = self.pos[i] - other.pos[i];
        let dv = self.vel[i] - other.vel[i];
        match channel {
            OutputChannel::PositionError => dp * dp,
            OutputChannel::VelocityError => dv * dv,
            OutputChannel::Both => dp * dp + dv * dv,
        }
    }

    fn check_grid(&self, other: &TailSignal) -> Result<()> {
        if self.len() != other.len() || self.vel.len() != other.vel.len() {
            return Err(Error::GridMismatch(self.len(), other.len()));
        }
        if (self.dt - other.dt).abs() > 1e-12 * self.dt {
            return Err(invalid("dt", format!("grids differ: {} vs {}", self.dt, other.dt)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelSample {
    One(f64),
    Two(f64, f64),
}

/// How each hypothesis's takeover onset is chosen.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case")]
pub enum OnsetPolicy {
    /// Fault time supplied from outside; every hypothesis uses it.
    Known { t_f: f64 },
    /// Every hypothesis uses the detected time.
    Detected,
    /// Per hypothesis, the least-squares onset within `lookback` seconds
    /// before detection. The fit runs until `window` seconds after the
    /// measured deviation first exceeds `level`.
    Aligned { level: f64, window: f64, lookback: f64 },
}

impl Default for OnsetPolicy {
    fn default() -> Self {
        OnsetPolicy::Aligned {
            level: 0.5,
            window: 2.0,
            lookback: 8.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IdentifierConfig {
    /// Weight on the instantaneous squared residual.
    pub alpha: f64,
    /// Weight on the forgotten residual integral.
    pub beta: f64,
    /// Forgetting rate (1/s).
    pub lambda: f64,
    /// Detection threshold on the residual against the nominal run.
    pub detection_threshold: f64,
    pub channel: OutputChannel,
    pub onset: OnsetPolicy,
}

impl Default for IdentifierConfig {
    fn default() -> Self {
        IdentifierConfig {
            alpha: 0.6,
            beta: 0.4,
            lambda: 0.1,
            detection_threshold: 0.05,
            channel: OutputChannel::PositionError,
            onset: OnsetPolicy::default(),
        }
    }
}

impl IdentifierConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("lambda", self.lambda)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "identifier",
                    reason: format!("{name} must be positive, got {v}"),
                });
            }
        }
        if !(self.detection_threshold >= 0.0) {
            return Err(invalid("detection_threshold", "must be >= 0"));
        }
        if let OnsetPolicy::Aligned {
            level,
            window,
            lookback,
        } = self.onset
        {
            if !(level > 0.0 && window > 0.0 && lookback >= 0.0) {
                return Err(invalid("onset", "level and window must be positive, lookback >= 0"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CostEntry {
    pub hypothesis: Hypothesis,
    /// Latest `‖e‖²`.
    pub residual_sq: f64,
    /// Exponentially forgotten integral of `‖e‖²`.
    pub integral: f64,
    /// `α‖e‖² + β·integral`.
    pub j: f64,
}

/// Per-hypothesis running cost.
#[derive(Debug, Clone, PartialEq)]
pub struct CostLedger {
    entries: Vec<CostEntry>,
}

impl CostLedger {
    pub fn new(hypotheses: &[Hypothesis]) -> Self {
        CostLedger {
            entries: hypotheses
                .iter()
                .map(|&hypothesis| CostEntry {
                    hypothesis,
                    residual_sq: 0.0,
                    integral: 0.0,
                    j: 0.0,
                })
                .collect(),
        }
    }

    pub fn entries(&self) -> &[CostEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn costs(&self) -> impl Iterator<Item = f64> + '_ {
        self.entries.iter().map(|e| e.j)
    }
}

/// One cost step: `I ← e^{−λ·dt}·I + dt·‖e‖²`, `J ← α‖e‖² + β·I`.
///
/// `residuals_sq[i]` is `‖e‖²` for the ledger's `i`-th hypothesis.
pub fn update_cost(ledger: &mut CostLedger, residuals_sq: &[f64], dt: f64, config: &IdentifierConfig) -> Result<()> {
    if !(dt >= 0.0) {
        return Err(invalid("dt", format!("must be >= 0, got {dt}")));
    }
    if residuals_sq.len() != ledger.entries.len() {
        return Err(Error::DimensionMismatch {
            expected: ledger.entries.len(),
            actual: residuals_sq.len(),
        });
    }
    let decay = (-config.lambda * dt).exp();
    for (e, &r) in ledger.entries.iter_mut().zip(residuals_sq) {
        e.residual_sq = r;
        e.integral = decay * e.integral + dt * r;
        e.j = config.alpha * r + config.beta * e.integral;
    }
    Ok(())
}

/// Hypothesis of minimal cost; ties go to the smaller `k`, then Attentive.
pub fn select(ledger: &CostLedger) -> Result<Hypothesis> {
    ledger
        .entries
        .iter()
        .min_by(|a, b| a.j.total_cmp(&b.j).then(a.hypothesis.cmp(&b.hypothesis)))
        .map(|e| e.hypothesis)
        .ok_or(Error::Empty)
}

/// `(k, J_{k,d})` for a fixed driver class, ordered by `k`.
pub fn cost_profile(ledger: &CostLedger, d: DriverKind) -> Vec<(usize, f64)> {
    let mut out: Vec<(usize, f64)> = ledger
        .entries
        .iter()
        .filter(|e| e.hypothesis.d == d)
        .map(|e| (e.hypothesis.k, e.j))
        .collect();
    out.sort_by_key(|p| p.0);
    out
}

/// Number of strict local minima of a profile (end points count when lower
/// than their single neighbour).
pub fn local_minima(profile: &[(usize, f64)]) -> usize {
    let j: Vec<f64> = profile.iter().map(|p| p.1).collect();
    (0..j.len())
        .filter(|&i| {
            let left = i == 0 || j[i] < j[i - 1];
            let right = i + 1 == j.len() || j[i] < j[i + 1];
            left && right
        })
        .count()
}

/// Earliest time the measured tail departs from the nominal prediction by
/// more than `threshold`; `None` if it never does.
pub fn detect_fault_time(
    measured: &TailSignal,
    nominal: &TailSignal,
    threshold: f64,
    channel: OutputChannel,
) -> Result<Option<f64>> {
    measured.check_grid(nominal)?;
    Ok(first_exceedance(measured, nominal, threshold, channel, 0).map(|i| i as f64 * measured.dt))
}

fn first_exceedance(a: &TailSignal, b: &TailSignal, level: f64, channel: OutputChannel, from: usize) -> Option<usize> {
    let l2 = level * level;
    (from..a.len()).find(|&i| a.sq_dist(b, channel, i) > l2)
}

/// What the detector knows: the platoon, its reference, and the takeover
/// deceleration. Fault location, driver class and fault time are unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectorModel {
    pub config: PlatoonConfig,
    pub reference: ReferenceProfile,
    pub a_saf: f64,
    pub horizon: f64,
    pub dt: f64,
}

impl DetectorModel {
    pub fn steps(&self) -> usize {
        steps_for(self.horizon, self.dt)
    }

    /// No-fault prediction of the tail.
    pub fn nominal(&self) -> Result<TailSignal> {
        self.tail(None)
    }

    fn tail(&self, fault: Option<&FaultScenario>) -> Result<TailSignal> {
        let (pos, vel) = simulate_tail(
            &self.config,
            &self.reference,
            &Disturbances::Zero,
            self.horizon,
            self.dt,
            fault,
        )?;
        Ok(TailSignal { dt: self.dt, pos, vel })
    }
}

/// Tail prediction under hypothesis `h` with takeover at `onset`.
pub fn predict_hypothesis(model: &DetectorModel, h: Hypothesis, onset: f64) -> Result<TailSignal> {
    if h.k < 1 || h.k > model.config.n() {
        return Err(Error::IndexOutOfRange {
            index: h.k,
            max: model.config.n(),
        });
    }
    if !(onset < model.horizon) {
        return Err(invalid(
            "onset",
            format!("{onset} must precede horizon {}", model.horizon),
        ));
    }
    let fault = FaultScenario {
        k: h.k,
        t_f: onset.max(0.0),
        driver: h.d,
        a_saf: model.a_saf,
    };
    model.tail(Some(&fault))
}

#[derive(Debug, Clone, PartialEq)]
pub struct IdentificationResult {
    pub hypotheses: Vec<Hypothesis>,
    /// Detected fault time.
    pub t_hat_f: Option<f64>,
    /// Takeover onset used for each hypothesis.
    pub onsets: Vec<f64>,
    /// First sample of cost accumulation.
    pub start_index: usize,
    pub dt: f64,
    /// Selected hypothesis at every sample from `start_index` on.
    pub selections: Vec<Hypothesis>,
    /// `costs[h][i]` is `J` of hypothesis `h` at sample `start_index + i`.
    pub costs: Vec<Vec<f64>>,
    pub final_ledger: Option<CostLedger>,
    /// Distinct models whose outputs were compared against the measurement.
    pub models_evaluated: usize,
    /// Platoon simulations run, alignment searches included.
    pub simulation_runs: usize,
}

impl IdentificationResult {
    pub fn final_selection(&self) -> Option<Hypothesis> {
        self.selections.last().copied()
    }

    pub fn time_at(&self, i: usize) -> f64 {
        (self.start_index + i) as f64 * self.dt
    }

    /// First time from which the selection equals `truth` through the end.
    pub fn convergence_time(&self, truth: Hypothesis) -> Option<f64> {
        if self.final_selection() != Some(truth) {
            return None;
        }
        let last_wrong = self.selections.iter().rposition(|h| *h != truth);
        let t = match last_wrong {
            Some(i) => self.time_at(i + 1),
            None => self.time_at(0),
        };
        // Selections before detection are not reported as decisions.
        Some(self.t_hat_f.map_or(t, |d| t.max(d)))
    }
}

fn onset_index(t: f64, dt: f64) -> usize {
    fault_step(t, dt)
}

/// Cached nominal run; hypothesis predictions resume from it at their onset.
struct Predictor<'a> {
    model: &'a DetectorModel,
    states: Vec<PlatoonState>,
    nominal: TailSignal,
}

impl<'a> Predictor<'a> {
    fn new(model: &'a DetectorModel) -> Result<Self> {
        let trace = simulate(
            &model.config,
            &model.reference,
            &Disturbances::Zero,
            model.horizon,
            model.dt,
            None,
        )?;
        let errs = trace.tracking_errors(&model.config, &model.reference)?;
        let n = model.config.n();
        let nominal = TailSignal {
            dt: model.dt,
            pos: errs.iter().map(|e| e.pos[n - 1]).collect(),
            vel: errs.iter().map(|e| e.vel[n - 1]).collect(),
        };
        Ok(Predictor {
            model,
            states: trace.states,
            nominal,
        })
    }

    /// Samples `0..=end` of the tail under `h` with takeover at sample `m`.
    fn predict(&self, h: Hypothesis, m: usize, end: usize) -> Result<TailSignal> {
        let dt = self.model.dt;
        let fault = FaultScenario {
            k: h.k,
            t_f: m as f64 * dt,
            driver: h.d,
            a_saf: self.model.a_saf,
        };
        let (pos, vel) = simulate_tail_from(
            &self.model.config,
            &self.model.reference,
            &self.states[m],
            m,
            end as f64 * dt,
            dt,
            Some(&fault),
        )?;
        let mut out = TailSignal {
            dt,
            pos: self.nominal.pos[..m].to_vec(),
            vel: self.nominal.vel[..m].to_vec(),
        };
        out.pos.extend(pos);
        out.vel.extend(vel);
        Ok(out)
    }

    /// Least-squares onset for `h` over samples `lo..=end`, searched on
    /// `lo..=hi` coarse to fine.
    fn fit_onset(
        &self,
        h: Hypothesis,
        measured: &TailSignal,
        channel: OutputChannel,
        (lo, hi, end): (usize, usize, usize),
        runs: &mut usize,
    ) -> Result<usize> {
        let mut sse = |m: usize| -> Result<f64> {
            let pred = self.predict(h, m, end)?;
            *runs += 1;
            Ok((lo..=end).map(|i| measured.sq_dist(&pred, channel, i)).sum())
        };
        let coarse = ((0.25 / self.model.dt).round() as usize).max(1);
        let mut grid: Vec<usize> = (lo..=hi).step_by(coarse).collect();
        if grid.last() != Some(&hi) {
            grid.push(hi);
        }
        let errs: Vec<f64> = grid.iter().map(|&m| sse(m)).collect::<Result<_>>()?;
        // The error surface can have several basins; refine the best few.
        let mut starts: Vec<usize> = (0..grid.len())
            .filter(|&i| (i == 0 || errs[i] <= errs[i - 1]) && (i + 1 == grid.len() || errs[i] <= errs[i + 1]))
            .collect();
        starts.sort_by(|&a, &b| errs[a].total_cmp(&errs[b]).then(a.cmp(&b)));
        starts.truncate(3);
        let mut best = (f64::INFINITY, lo);
        for i in starts {
            let mut local = (errs[i], grid[i]);
            let mut step = coarse;
            while step > 1 {
                let fine = (step / 10).max(1);
                let centre = local.1;
                for m in (centre.saturating_sub(step).max(lo)..=(centre + step).min(hi)).step_by(fine) {
                    if m == centre {
                        continue;
                    }
                    let e = sse(m)?;
                    if e < local.0 || (e == local.0 && m < local.1) {
                        local = (e, m);
                    }
                }
                step = fine;
            }
            if local.0 < best.0 || (local.0 == best.0 && local.1 < best.1) {
                best = local;
            }
        }
        Ok(best.1)
    }
}

/// Runs the hypothesis bank against a tail measurement.
pub fn identify(
    model: &DetectorModel,
    measured: &TailSignal,
    hypotheses: &[Hypothesis],
    config: &IdentifierConfig,
) -> Result<IdentificationResult> {
    config.validate()?;
    if hypotheses.is_empty() {
        return Err(Error::Empty);
    }
    let predictor = Predictor::new(model)?;
    let nominal = &predictor.nominal;
    measured.check_grid(nominal)?;
    let dt = model.dt;
    let last = measured.len() - 1;
    let t_hat_f = detect_fault_time(measured, nominal, config.detection_threshold, config.channel)?;

    let mut simulation_runs = 1;
    let empty = |simulation_runs| IdentificationResult {
        hypotheses: hypotheses.to_vec(),
        t_hat_f,
        onsets: Vec::new(),
        start_index: measured.len(),
        dt,
        selections: Vec::new(),
        costs: vec![Vec::new(); hypotheses.len()],
        final_ledger: None,
        models_evaluated: 0,
        simulation_runs,
    };
    let onset_steps: Vec<usize> = match config.onset {
        OnsetPolicy::Known { t_f } => {
            if !(t_f >= 0.0 && t_f < model.horizon) {
                return Err(invalid("t_f", format!("{t_f} outside [0, horizon)")));
            }
            vec![onset_index(t_f, dt).min(last); hypotheses.len()]
        }
        OnsetPolicy::Detected => match t_hat_f {
            Some(t) => vec![onset_index(t, dt).min(last); hypotheses.len()],
            None => return Ok(empty(simulation_runs)),
        },
        OnsetPolicy::Aligned {
            level,
            window,
            lookback,
        } => {
            let Some(t) = t_hat_f else {
                return Ok(empty(simulation_runs));
            };
            let det = onset_index(t, dt).min(last);
            let crossing = first_exceedance(measured, nominal, level, config.channel, det).unwrap_or(last);
            let end = (crossing + (window / dt).round() as usize).min(last);
            let lo = det.saturating_sub((lookback / dt).round() as usize);
            let fitted: Vec<(usize, usize)> = hypotheses
                .par_iter()
                .map(|&h| {
                    let mut runs = 0;
                    let m = predictor.fit_onset(h, measured, config.channel, (lo, det, end), &mut runs)?;
                    Ok((m, runs))
                })
                .collect::<Result<_>>()?;
            simulation_runs += fitted.iter().map(|f| f.1).sum::<usize>();
            fitted.into_iter().map(|f| f.0).collect()
        }
    };
    let onsets: Vec<f64> = onset_steps.iter().map(|&m| m as f64 * dt).collect();

    let predictions: Vec<TailSignal> = hypotheses
        .par_iter()
        .zip(onset_steps.par_iter())
        .map(|(&h, &m)| predictor.predict(h, m, last))
        .collect::<Result<_>>()?;
    simulation_runs += predictions.len();

    let start_index = onset_steps.iter().copied().min().unwrap_or(0);
    let mut ledger = CostLedger::new(hypotheses);
    let mut selections = Vec::with_capacity(measured.len() - start_index);
    let mut costs = vec![Vec::with_capacity(measured.len() - start_index); hypotheses.len()];
    let mut r = vec![0.0; hypotheses.len()];
    for i in start_index..measured.len() {
        for (slot, p) in r.iter_mut().zip(&predictions) {
            *slot = measured.sq_dist(p, config.channel, i);
        }
        update_cost(&mut ledger, &r, dt, config)?;
        for (c, e) in costs.iter_mut().zip(ledger.entries()) {
            c.push(e.j);
        }
        selections.push(select(&ledger)?);
    }
    Ok(IdentificationResult {
        hypotheses: hypotheses.to_vec(),
        t_hat_f,
        onsets,
        start_index,
        dt,
        selections,
        costs,
        final_ledger: Some(ledger),
        models_evaluated: hypotheses.len(),
        simulation_runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(k: usize, d: DriverKind) -> Hypothesis {
        Hypothesis { k, d }
    }

    #[test]
    fn bank_enumerates_each_pair_once() {
        let b = hypothesis_bank(4);
        assert_eq!(b.len(), 8);
        let mut s = b.clone();
        s.sort();
        s.dedup();
        assert_eq!(s.len(), 8);
        assert_eq!(b[0], h(1, DriverKind::Attentive));
        assert_eq!(b[1], h(1, DriverKind::Distracted));
    }

    #[test]
    fn zero_residual_zero_cost() {
        let cfg = IdentifierConfig::default();
        let mut l = CostLedger::new(&hypothesis_bank(2));
        for _ in 0..100 {
            update_cost(&mut l, &[0.0; 4], 1e-3, &cfg).unwrap();
        }
        assert!(l.costs().all(|j| j == 0.0));
    }

    #[test]
    fn update_rejects_negative_dt() {
        let cfg = IdentifierConfig::default();
        let mut l = CostLedger::new(&hypothesis_bank(1));
        assert!(update_cost(&mut l, &[1.0, 1.0], -1e-3, &cfg).is_err());
        assert!(update_cost(&mut l, &[1.0], 1e-3, &cfg).is_err());
    }

    #[test]
    fn select_examples() {
        let cfg = IdentifierConfig {
            alpha: 1.0,
            ..IdentifierConfig::default()
        };
        let hyps = [
            h(3, DriverKind::Attentive),
            h(4, DriverKind::Distracted),
            h(4, DriverKind::Attentive),
        ];
        let mut l = CostLedger::new(&hyps);
        update_cost(&mut l, &[5.0, 1.0, 2.0], 0.0, &cfg).unwrap();
        assert_eq!(select(&l).unwrap(), h(4, DriverKind::Distracted));

        let single = [h(7, DriverKind::Distracted)];
        let l = CostLedger::new(&single);
        assert_eq!(select(&l).unwrap(), single[0]);

        let tie = [h(5, DriverKind::Distracted), h(3, DriverKind::Attentive)];
        let mut l = CostLedger::new(&tie);
        update_cost(&mut l, &[2.0, 2.0], 1e-3, &cfg).unwrap();
        assert_eq!(select(&l).unwrap(), h(3, DriverKind::Attentive));

        assert_eq!(select(&CostLedger::new(&[])), Err(Error::Empty));
    }

    #[test]
    fn profile_and_minima() {
        let cfg = IdentifierConfig::default();
        let mut l = CostLedger::new(&hypothesis_bank(5));
        let r: Vec<f64> = hypothesis_bank(5)
            .iter()
            .map(|h| (h.k as f64 - 3.0).powi(2) + if h.d == DriverKind::Attentive { 1.0 } else { 0.0 })
            .collect();
        update_cost(&mut l, &r, 1e-3, &cfg).unwrap();
        let p = cost_profile(&l, DriverKind::Distracted);
        assert_eq!(p.len(), 5);
        assert_eq!(p.iter().map(|x| x.0).collect::<Vec<_>>(), vec![1, 2, 3, 4, 5]);
        assert_eq!(local_minima(&p), 1);
        assert_eq!(p[2].1, 0.0);
    }

    #[test]
    fn detection_degenerate_threshold() {
        let nominal = TailSignal {
            dt: 0.1,
            pos: vec![0.0; 6],
            vel: vec![0.0; 6],
        };
        let mut m = nominal.clone();
        m.pos[3] = 1e-9;
        let t = detect_fault_time(&m, &nominal, 0.0, OutputChannel::PositionError).unwrap();
        assert!((t.unwrap() - 0.3).abs() < 1e-12);
        assert_eq!(
            detect_fault_time(&nominal, &nominal, 0.0, OutputChannel::PositionError).unwrap(),
            None
        );
        let short = TailSignal {
            dt: 0.1,
            pos: vec![0.0; 5],
            vel: vec![0.0; 5],
        };
        assert!(matches!(
            detect_fault_time(&short, &nominal, 0.0, OutputChannel::PositionError),
            Err(Error::GridMismatch(5, 6))
        ));
    }

    #[test]
    fn config_validation() {
        assert!(IdentifierConfig::default().validate().is_ok());
        let bad = IdentifierConfig {
            lambda: 0.0,
            ..IdentifierConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
