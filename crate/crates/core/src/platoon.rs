//! Fixed-step simulation of a platoon of double integrators under PF or SB
//! linear control.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::driver::{takeover_control, DriverState, FaultScenario};
use crate::error::{invalid, Error, Result};

/// PD gains on the relative position and velocity errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ControllerGains {
    /// Position-error gain (1/s²).
    pub k0: f64,
    /// Velocity-error gain (1/s).
    pub b0: f64,
}

impl ControllerGains {
    pub fn new(k0: f64, b0: f64) -> Result<Self> {
        if !(k0 > 0.0 && k0.is_finite()) {
            return Err(invalid("k0", format!("must be positive, got {k0}")));
        }
        if !(b0 > 0.0 && b0.is_finite()) {
            return Err(invalid("b0", format!("must be positive, got {b0}")));
        }
        Ok(ControllerGains { k0, b0 })
    }
}

impl Default for ControllerGains {
    fn default() -> Self {
        ControllerGains { k0: 1.0, b0: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Architecture {
    #[serde(rename = "pf")]
    PredecessorFollowing,
    #[serde(rename = "sb")]
    SymmetricBidirectional,
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Architecture::PredecessorFollowing => "PF",
            Architecture::SymmetricBidirectional => "SB",
        })
    }
}

impl FromStr for Architecture {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pf" | "predecessor-following" => Ok(Architecture::PredecessorFollowing),
            "sb" | "symmetric-bidirectional" => Ok(Architecture::SymmetricBidirectional),
            other => Err(invalid("architecture", format!("unknown architecture `{other}`"))),
        }
    }
}

/// What a comm fault at vehicle `k` does to the SB coupling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SbFaultMode {
    /// Only `k` stops using its predecessor; `k−1` keeps its rear coupling to `k`.
    #[default]
    PredecessorLinkOnly,
    /// `k−1` also loses its rear coupling and behaves as a chain tail.
    BothDirections,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlatoonConfig {
    n: usize,
    gaps: Vec<f64>,
    cumulative: Vec<f64>,
    pub gains: ControllerGains,
    pub architecture: Architecture,
    pub sb_fault_mode: SbFaultMode,
}

impl PlatoonConfig {
    /// `gaps[i−1]` is the desired distance between vehicles `i−1` and `i`.
    pub fn new(gaps: Vec<f64>, gains: ControllerGains, architecture: Architecture) -> Result<Self> {
        let n = gaps.len();
        if n < 2 {
            return Err(invalid("n", format!("platoon needs at least 2 vehicles, got {n}")));
        }
        if let Some(g) = gaps.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
            return Err(invalid("gaps", format!("all gaps must be positive, got {g}")));
        }
        let mut cumulative = Vec::with_capacity(n + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        for g in &gaps {
            acc += g;
            cumulative.push(acc);
        }
        Ok(PlatoonConfig {
            n,
            gaps,
            cumulative,
            gains,
            architecture,
            sb_fault_mode: SbFaultMode::default(),
        })
    }

    pub fn uniform(n: usize, gap: f64, gains: ControllerGains, architecture: Architecture) -> Result<Self> {
        Self::new(vec![gap; n], gains, architecture)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn gaps(&self) -> &[f64] {
        &self.gaps
    }

    /// `δ(i, j)` for `i ≤ j`, built from the stored adjacent gaps.
    pub fn gap_between(&self, i: usize, j: usize) -> Result<f64> {
        if i > j {
            return Err(invalid("gap", format!("need i <= j, got ({i}, {j})")));
        }
        if j > self.n {
            return Err(Error::IndexOutOfRange { index: j, max: self.n });
        }
        Ok(self.cumulative[j] - self.cumulative[i])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum SegmentMode {
    Accelerate { rate: f64 },
    Cruise,
    Brake { rate: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub duration: f64,
    #[serde(flatten)]
    pub mode: SegmentMode,
}

impl Segment {
    fn accel(&self) -> f64 {
        match self.mode {
            SegmentMode::Accelerate { rate } => rate,
            SegmentMode::Cruise => 0.0,
            SegmentMode::Brake { rate } => -rate,
        }
    }
}

/// Piecewise-constant-acceleration trajectory of the virtual lead vehicle,
/// starting at position 0. The last velocity is held after the final segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceProfile {
    pub initial_speed: f64,
    pub segments: Vec<Segment>,
}

impl ReferenceProfile {
    pub fn new(initial_speed: f64, segments: Vec<Segment>) -> Result<Self> {
        let r = ReferenceProfile {
            initial_speed,
            segments,
        };
        r.validate()?;
        Ok(r)
    }

    pub fn cruise(speed: f64) -> Self {
        ReferenceProfile {
            initial_speed: speed,
            segments: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !self.initial_speed.is_finite() {
            return Err(Error::NonFinite("initial speed"));
        }
        for s in &self.segments {
            if !(s.duration > 0.0 && s.duration.is_finite()) {
                return Err(invalid(
                    "segment",
                    format!("duration must be positive, got {}", s.duration),
                ));
            }
            match s.mode {
                SegmentMode::Accelerate { rate } | SegmentMode::Brake { rate }
                    if !(rate >= 0.0 && rate.is_finite()) =>
                {
                    return Err(invalid("segment", format!("rate must be >= 0, got {rate}")));
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Start time of every segment, plus the end of the last one.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = vec![0.0];
        let mut t = 0.0;
        for s in &self.segments {
            t += s.duration;
            out.push(t);
        }
        out
    }

    /// `(p0*(t), ṗ0*(t), p̈0*(t))`.
    pub fn sample(&self, t: f64) -> (f64, f64, f64) {
        let (mut p, mut v, mut t0) = (0.0, self.initial_speed, 0.0);
        for s in &self.segments {
            let a = s.accel();
            if t < t0 + s.duration {
                let tau = t - t0;
                return (p + v * tau + 0.5 * a * tau * tau, v + a * tau, a);
            }
            p += v * s.duration + 0.5 * a * s.duration * s.duration;
            v += a * s.duration;
            t0 += s.duration;
        }
        (p + v * (t - t0), v, 0.0)
    }

    pub fn position(&self, t: f64) -> f64 {
        self.sample(t).0
    }

    pub fn velocity(&self, t: f64) -> f64 {
        self.sample(t).1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlatoonState {
    pub t: f64,
    pub positions: Vec<f64>,
    pub velocities: Vec<f64>,
}

impl PlatoonState {
    /// Perfect formation on the desired trajectories at time `t`.
    pub fn formed(config: &PlatoonConfig, reference: &ReferenceProfile, t: f64) -> Self {
        let (p0, v0, _) = reference.sample(t);
        PlatoonState {
            t,
            positions: (1..=config.n).map(|i| p0 - config.cumulative[i]).collect(),
            velocities: vec![v0; config.n],
        }
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    fn check(&self, n: usize) -> Result<()> {
        if self.positions.len() != n || self.velocities.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                actual: self.positions.len().min(self.velocities.len()),
            });
        }
        Ok(())
    }
}

/// Tracking errors `p̃_i = p_i − p_i*` and their rates, vehicles 1..N.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackingErrors {
    pub pos: Vec<f64>,
    pub vel: Vec<f64>,
}

/// `p_i*(t) = p0*(t) − Σ_{j≤i} δ(j−1, j)`; `i = 0` is the reference itself.
pub fn desired_trajectory(config: &PlatoonConfig, reference: &ReferenceProfile, i: usize, t: f64) -> Result<f64> {
    if i > config.n {
        return Err(Error::IndexOutOfRange {
            index: i,
            max: config.n,
        });
    }
    if !(t >= 0.0) {
        return Err(invalid("t", format!("must be >= 0, got {t}")));
    }
    Ok(reference.position(t) - config.cumulative[i])
}

pub fn tracking_error(state: &PlatoonState, config: &PlatoonConfig, reference: &ReferenceProfile) -> Result<Vec<f64>> {
    Ok(tracking_errors(state, config, reference)?.pos)
}

pub fn tracking_errors(
    state: &PlatoonState,
    config: &PlatoonConfig,
    reference: &ReferenceProfile,
) -> Result<TrackingErrors> {
    state.check(config.n)?;
    let mut e = TrackingErrors {
        pos: vec![0.0; config.n],
        vel: vec![0.0; config.n],
    };
    fill_errors(state, config, reference.sample(state.t), &mut e);
    Ok(e)
}

fn fill_errors(state: &PlatoonState, config: &PlatoonConfig, (p0, v0, _): (f64, f64, f64), e: &mut TrackingErrors) {
    for i in 0..config.n {
        e.pos[i] = state.positions[i] - (p0 - config.cumulative[i + 1]);
        e.vel[i] = state.velocities[i] - v0;
    }
}

fn pd(g: ControllerGains, e: &TrackingErrors, i: usize, j: Option<usize>) -> f64 {
    // j = None is the virtual reference vehicle, whose error is zero.
    let (pj, vj) = j.map_or((0.0, 0.0), |j| (e.pos[j], e.vel[j]));
    -g.k0 * (e.pos[i] - pj) - g.b0 * (e.vel[i] - vj)
}

fn check_errors(e: &TrackingErrors, n: usize) -> Result<()> {
    if e.pos.len() != n || e.vel.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: e.pos.len().min(e.vel.len()),
        });
    }
    Ok(())
}

/// PF law `u_i = −k0(p̃_i − p̃_{i−1}) − b0(ṗ̃_i − ṗ̃_{i−1})`, with `p̃_0 ≡ 0`.
pub fn pf_control(errors: &TrackingErrors, config: &PlatoonConfig) -> Result<Vec<f64>> {
    if config.architecture != Architecture::PredecessorFollowing {
        return Err(Error::WrongArchitecture { expected: "PF" });
    }
    check_errors(errors, config.n)?;
    Ok((0..config.n)
        .map(|i| pd(config.gains, errors, i, i.checked_sub(1)))
        .collect())
}

/// SB law: front and rear PD terms for vehicles 1..N−1, front only for N.
pub fn sb_control(errors: &TrackingErrors, config: &PlatoonConfig) -> Result<Vec<f64>> {
    if config.architecture != Architecture::SymmetricBidirectional {
        return Err(Error::WrongArchitecture { expected: "SB" });
    }
    check_errors(errors, config.n)?;
    let n = config.n;
    Ok((0..n)
        .map(|i| {
            let front = pd(config.gains, errors, i, i.checked_sub(1));
            if i + 1 < n {
                front + pd(config.gains, errors, i, Some(i + 1))
            } else {
                front
            }
        })
        .collect())
}

/// Advances every vehicle one step of `p̈ = u + w` by classical RK4 with the
/// inputs held over the step.
pub fn step(state: &PlatoonState, controls: &[f64], disturbances: &[f64], dt: f64) -> Result<PlatoonState> {
    let n = state.n();
    if controls.len() != n || disturbances.len() != n || state.velocities.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            actual: controls.len().min(disturbances.len()),
        });
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", "must be positive"));
    }
    let mut next = state.clone();
    step_in_place(&mut next, controls, disturbances, dt)?;
    Ok(next)
}

fn step_in_place(state: &mut PlatoonState, controls: &[f64], disturbances: &[f64], dt: f64) -> Result<()> {
    for i in 0..state.positions.len() {
        let a = controls[i] + disturbances[i];
        if !a.is_finite() {
            return Err(Error::NonFinite("vehicle input"));
        }
        let v = state.velocities[i];
        // RK4 stages for (ṗ, v̇) = (v, a) with constant a.
        let k1 = v;
        let k2 = v + 0.5 * dt * a;
        let k3 = v + 0.5 * dt * a;
        let k4 = v + dt * a;
        state.positions[i] += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        state.velocities[i] += dt * a;
    }
    state.t += dt;
    Ok(())
}

/// External accelerations acting on the vehicles.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Disturbances {
    #[default]
    Zero,
    /// Precomputed samples, `samples[step][vehicle]`; missing steps read as 0.
    Samples(Vec<Vec<f64>>),
    /// First-order low-pass filtered Gaussian noise per vehicle with
    /// stationary standard deviation `sigma` (m/s²).
    BandLimited { sigma: f64, cutoff_hz: f64, seed: u64 },
}

impl Disturbances {
    fn realize(&self, n: usize, steps: usize, dt: f64) -> Result<Option<Vec<Vec<f64>>>> {
        match self {
            Disturbances::Zero => Ok(None),
            Disturbances::Samples(s) => {
                let mut out = s.clone();
                for row in &out {
                    if row.len() != n {
                        return Err(Error::DimensionMismatch {
                            expected: n,
                            actual: row.len(),
                        });
                    }
                }
                out.resize(steps, vec![0.0; n]);
                Ok(Some(out))
            }
            Disturbances::BandLimited { sigma, cutoff_hz, seed } => {
                if !(*sigma >= 0.0 && *cutoff_hz > 0.0) {
                    return Err(invalid("disturbance", "need sigma >= 0 and cutoff > 0"));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let normal = Normal::new(0.0, 1.0).expect("unit normal");
                let a = (-2.0 * std::f64::consts::PI * cutoff_hz * dt).exp();
                let gain = sigma * (1.0 - a * a).sqrt();
                let mut x = vec![0.0; n];
                let mut out = Vec::with_capacity(steps);
                for _ in 0..steps {
                    for xi in x.iter_mut() {
                        *xi = a * *xi + gain * normal.sample(&mut rng);
                    }
                    out.push(x.clone());
                }
                Ok(Some(out))
            }
        }
    }
}

/// Uniformly sampled simulation record. Entry `n` is at `t = n·dt`; the
/// controls and disturbances at `n` act over `[t_n, t_{n+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub dt: f64,
    pub states: Vec<PlatoonState>,
    pub controls: Vec<Vec<f64>>,
    pub disturbances: Vec<Vec<f64>>,
}

impl SimTrace {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }

    pub fn tracking_errors(&self, config: &PlatoonConfig, reference: &ReferenceProfile) -> Result<Vec<TrackingErrors>> {
        self.states
            .iter()
            .map(|s| tracking_errors(s, config, reference))
            .collect()
    }
}

/// Sample index at which a fault at `t_f` takes effect.
pub fn fault_step(t_f: f64, dt: f64) -> usize {
    (t_f / dt - 1e-9).ceil().max(0.0) as usize
}

pub fn steps_for(horizon: f64, dt: f64) -> usize {
    (horizon / dt).round() as usize
}

/// Vehicle 1 driven along a prescribed error trajectory instead of its
/// controller. `pos[n]`, `vel[n]` are `p̃_1`, `ṗ̃_1` at `t = n·dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrescribedLeader {
    pub pos: Vec<f64>,
    pub vel: Vec<f64>,
}

/// Shared simulation loop. `observe` sees every sample with the inputs that
/// will be applied over the following step.
#[allow(clippy::too_many_arguments)]
pub(crate) fn run<F>(
    config: &PlatoonConfig,
    reference: &ReferenceProfile,
    disturbances: &Disturbances,
    horizon: f64,
    dt: f64,
    fault: Option<&FaultScenario>,
    leader: Option<&PrescribedLeader>,
    start: Option<(usize, &PlatoonState)>,
    mut observe: F,
) -> Result<()>
where
    F: FnMut(&PlatoonState, &TrackingErrors, &[f64], &[f64]),
{
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", "must be positive"));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(invalid("horizon", "must be positive"));
    }
    reference.validate()?;
    let n = config.n;
    let steps = steps_for(horizon, dt);
    if let Some(f) = fault {
        f.validate(n)?;
        if f.t_f >= horizon {
            return Err(invalid(
                "t_f",
                format!("fault time {} must precede horizon {horizon}", f.t_f),
            ));
        }
    }
    if let Some(l) = leader {
        if l.pos.len() < steps + 1 || l.vel.len() < steps + 1 {
            return Err(Error::DimensionMismatch {
                expected: steps + 1,
                actual: l.pos.len().min(l.vel.len()),
            });
        }
    }
    let w_all = disturbances.realize(n, steps + 1, dt)?;
    let zeros = vec![0.0; n];
    let fault_at = fault.map(|f| fault_step(f.t_f, dt));
    let mut driver = match fault {
        Some(f) => Some(DriverState::new(&f.driver.params(), dt)?),
        None => None,
    };

    let (first, mut state) = match start {
        Some((i, s)) => {
            if s.n() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    actual: s.n(),
                });
            }
            if let Some(nf) = fault_at {
                if i > nf {
                    return Err(invalid("start", "resume point lies after the fault"));
                }
            }
            (i, s.clone())
        }
        None => (0, PlatoonState::formed(config, reference, 0.0)),
    };
    let mut u = vec![0.0; n];
    let mut errors = TrackingErrors {
        pos: vec![0.0; n],
        vel: vec![0.0; n],
    };
    for step_idx in first..=steps {
        state.t = step_idx as f64 * dt;
        let sample = reference.sample(state.t);
        let (p0, v0, _) = sample;
        if let Some(l) = leader {
            state.positions[0] = l.pos[step_idx] + p0 - config.cumulative[1];
            state.velocities[0] = l.vel[step_idx] + v0;
        }
        fill_errors(&state, config, sample, &mut errors);
        let faulted = matches!(fault_at, Some(nf) if step_idx >= nf);
        compute_controls(config, &errors, fault.filter(|_| faulted), &mut u);
        if let (true, Some(f), Some(d)) = (faulted, fault, driver.as_mut()) {
            let ahead = if f.k >= 2 { state.velocities[f.k - 2] } else { v0 };
            let u_drv = d.step(ahead - state.velocities[f.k - 1], dt)?;
            u[f.k - 1] = takeover_control(u_drv, f.a_saf);
        }
        if leader.is_some() {
            u[0] = 0.0;
        }
        let w = w_all.as_ref().map_or(&zeros[..], |w| &w[step_idx][..]);
        observe(&state, &errors, &u, w);
        if step_idx < steps {
            step_in_place(&mut state, &u, w, dt)?;
        }
    }
    Ok(())
}

fn compute_controls(config: &PlatoonConfig, e: &TrackingErrors, fault: Option<&FaultScenario>, u: &mut [f64]) {
    let n = config.n;
    let g = config.gains;
    for (i, ui) in u.iter_mut().enumerate().take(n) {
        let front = pd(g, e, i, i.checked_sub(1));
        *ui = match config.architecture {
            Architecture::PredecessorFollowing => front,
            Architecture::SymmetricBidirectional => {
                let mut has_rear = i + 1 < n;
                if let Some(f) = fault {
                    // Vehicle index i is vehicle i+1; k−1 sits at index k−2.
                    if config.sb_fault_mode == SbFaultMode::BothDirections && i + 2 == f.k {
                        has_rear = false;
                    }
                }
                if has_rear {
                    front + pd(g, e, i, Some(i + 1))
                } else {
                    front
                }
            }
        };
    }
}

/// Full trajectory from a perfectly formed start at `t = 0`.
pub fn simulate(
    config: &PlatoonConfig,
    reference: &ReferenceProfile,
    disturbances: &Disturbances,
    horizon: f64,
    dt: f64,
    fault: Option<&FaultScenario>,
) -> Result<SimTrace> {
    let mut trace = SimTrace {
        dt,
        states: Vec::new(),
        controls: Vec::new(),
        disturbances: Vec::new(),
    };
    run(
        config,
        reference,
        disturbances,
        horizon,
        dt,
        fault,
        None,
        None,
        |s, _, u, w| {
            trace.states.push(s.clone());
            trace.controls.push(u.to_vec());
            trace.disturbances.push(w.to_vec());
        },
    )?;
    Ok(trace)
}

/// Trajectory with vehicle 1 pinned to a prescribed error signal; the
/// remaining vehicles run their nominal controllers.
pub fn simulate_with_leader(
    config: &PlatoonConfig,
    reference: &ReferenceProfile,
    leader: &PrescribedLeader,
    horizon: f64,
    dt: f64,
) -> Result<SimTrace> {
    let mut trace = SimTrace {
        dt,
        states: Vec::new(),
        controls: Vec::new(),
        disturbances: Vec::new(),
    };
    run(
        config,
        reference,
        &Disturbances::Zero,
        horizon,
        dt,
        None,
        Some(leader),
        None,
        |s, _, u, w| {
            trace.states.push(s.clone());
            trace.controls.push(u.to_vec());
            trace.disturbances.push(w.to_vec());
        },
    )?;
    Ok(trace)
}

/// Tail vehicle's `(p̃_N, ṗ̃_N)` at every sample, without storing the trace.
pub fn simulate_tail(
    config: &PlatoonConfig,
    reference: &ReferenceProfile,
    disturbances: &Disturbances,
    horizon: f64,
    dt: f64,
    fault: Option<&FaultScenario>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = config.n;
    let mut pos = Vec::new();
    let mut vel = Vec::new();
    run(
        config,
        reference,
        disturbances,
        horizon,
        dt,
        fault,
        None,
        None,
        |_, e, _, _| {
            pos.push(e.pos[n - 1]);
            vel.push(e.vel[n - 1]);
        },
    )?;
    Ok((pos, vel))
}

/// Like [`simulate_tail`] but resumed at sample `start_step` from `state`,
/// which must be the platoon's state at that sample. Returns samples
/// `start_step..=steps`. A fault, if any, must not start before the resume
/// point; the driver starts at rest.
pub fn simulate_tail_from(
    config: &PlatoonConfig,
    reference: &ReferenceProfile,
    state: &PlatoonState,
    start_step: usize,
    horizon: f64,
    dt: f64,
    fault: Option<&FaultScenario>,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let n = config.n;
    let mut pos = Vec::new();
    let mut vel = Vec::new();
    run(
        config,
        reference,
        &Disturbances::Zero,
        horizon,
        dt,
        fault,
        None,
        Some((start_step, state)),
        |_, e, _, _| {
            pos.push(e.pos[n - 1]);
            vel.push(e.vel[n - 1]);
        },
    )?;
    Ok((pos, vel))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::DriverKind;

    fn cfg(n: usize, arch: Architecture) -> PlatoonConfig {
        PlatoonConfig::uniform(n, 5.0, ControllerGains::default(), arch).unwrap()
    }

    fn errs(pos: Vec<f64>) -> TrackingErrors {
        let vel = vec![0.0; pos.len()];
        TrackingErrors { pos, vel }
    }

    #[test]
    fn config_validation() {
        assert!(PlatoonConfig::new(
            vec![5.0],
            ControllerGains::default(),
            Architecture::PredecessorFollowing
        )
        .is_err());
        assert!(PlatoonConfig::new(
            vec![5.0, -1.0],
            ControllerGains::default(),
            Architecture::PredecessorFollowing
        )
        .is_err());
        assert!(ControllerGains::new(0.0, 1.0).is_err());
        assert!(ControllerGains::new(1.0, -1.0).is_err());
    }

    #[test]
    fn gaps_are_mutually_consistent() {
        let c = PlatoonConfig::new(
            vec![3.0, 4.5, 6.0, 2.5],
            ControllerGains::default(),
            Architecture::PredecessorFollowing,
        )
        .unwrap();
        for i in 0..=4 {
            for j in i..=4 {
                for k in j..=4 {
                    let lhs = c.gap_between(i, k).unwrap();
                    let rhs = c.gap_between(i, j).unwrap() + c.gap_between(j, k).unwrap();
                    assert!((lhs - rhs).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn desired_trajectory_examples() {
        let r = ReferenceProfile::cruise(10.0);
        let c = PlatoonConfig::uniform(3, 5.0, ControllerGains::default(), Architecture::PredecessorFollowing).unwrap();
        assert_eq!(desired_trajectory(&c, &r, 0, 2.0).unwrap(), 20.0);
        assert_eq!(desired_trajectory(&c, &r, 3, 2.0).unwrap(), 5.0);
        assert!(desired_trajectory(&c, &r, 4, 2.0).is_err());
    }

    #[test]
    fn reference_is_continuous() {
        let r = ReferenceProfile::new(
            0.0,
            vec![
                Segment {
                    duration: 10.0,
                    mode: SegmentMode::Accelerate { rate: 2.0 },
                },
                Segment {
                    duration: 20.0,
                    mode: SegmentMode::Cruise,
                },
                Segment {
                    duration: 5.0,
                    mode: SegmentMode::Brake { rate: 2.0 },
                },
            ],
        )
        .unwrap();
        for &b in &r.breakpoints()[1..] {
            let (pa, va, _) = r.sample(b - 1e-9);
            let (pb, vb, _) = r.sample(b + 1e-9);
            assert!((pa - pb).abs() < 1e-6 && (va - vb).abs() < 1e-6);
        }
        assert_eq!(r.velocity(10.0), 20.0);
        assert_eq!(r.velocity(40.0), 10.0);
        assert_eq!(r.position(10.0), 100.0);
    }

    #[test]
    fn pf_examples() {
        let c = cfg(3, Architecture::PredecessorFollowing);
        assert_eq!(pf_control(&errs(vec![0.0; 3]), &c).unwrap(), vec![0.0; 3]);
        let u = pf_control(&errs(vec![0.0, 1.0, 1.0]), &c).unwrap();
        assert_eq!(u[1], -1.0);
        let u = pf_control(&errs(vec![2.0; 3]), &c).unwrap();
        assert_eq!(&u[1..], &[0.0, 0.0]);
        assert!(sb_control(&errs(vec![0.0; 3]), &c).is_err());
    }

    #[test]
    fn sb_examples() {
        let c = cfg(3, Architecture::SymmetricBidirectional);
        let u = sb_control(&errs(vec![0.0, 1.0, 0.0]), &c).unwrap();
        assert_eq!((u[1], u[2]), (-2.0, 1.0));
        let u = sb_control(&errs(vec![0.7; 3]), &c).unwrap();
        assert_eq!(&u[1..], &[0.0, 0.0]);
        assert!(pf_control(&errs(vec![0.0; 3]), &c).is_err());
    }

    #[test]
    fn step_is_exact_for_constant_input() {
        let s = PlatoonState {
            t: 0.0,
            positions: vec![1.0],
            velocities: vec![3.0],
        };
        let next = step(&s, &[0.0], &[0.0], 0.1).unwrap();
        assert!((next.positions[0] - 1.3).abs() < 1e-15);
        let next = step(&s, &[2.0], &[0.0], 0.5).unwrap();
        assert!((next.velocities[0] - 4.0).abs() < 1e-15);
        assert!((next.positions[0] - (1.0 + 1.5 + 0.25)).abs() < 1e-15);
        assert!(step(&s, &[f64::NAN], &[0.0], 0.1).is_err());
    }

    #[test]
    fn rejects_bad_fault() {
        let c = cfg(4, Architecture::PredecessorFollowing);
        let r = ReferenceProfile::cruise(20.0);
        let f = FaultScenario {
            k: 5,
            t_f: 1.0,
            driver: DriverKind::Attentive,
            a_saf: 2.0,
        };
        assert!(simulate(&c, &r, &Disturbances::Zero, 5.0, 1e-3, Some(&f)).is_err());
        let f = FaultScenario { k: 2, t_f: 6.0, ..f };
        assert!(simulate(&c, &r, &Disturbances::Zero, 5.0, 1e-3, Some(&f)).is_err());
    }

    #[test]
    fn trace_lengths_agree() {
        let c = cfg(4, Architecture::SymmetricBidirectional);
        let r = ReferenceProfile::cruise(20.0);
        let t = simulate(&c, &r, &Disturbances::Zero, 1.0, 1e-2, None).unwrap();
        assert_eq!(t.len(), 101);
        assert_eq!(t.controls.len(), 101);
        assert_eq!(t.disturbances.len(), 101);
    }

    #[test]
    fn band_limited_noise_is_seeded() {
        let d = Disturbances::BandLimited {
            sigma: 0.1,
            cutoff_hz: 1.0,
            seed: 3,
        };
        let a = d.realize(3, 100, 1e-3).unwrap();
        let b = d.realize(3, 100, 1e-3).unwrap();
        assert_eq!(a, b);
    }
}
