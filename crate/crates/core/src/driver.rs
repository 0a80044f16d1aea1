//! Human-driver models, the communication fault, and the takeover law.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lti::{self, delay_samples, Canonical};

/// Parameters of `K(1 + T_z s)/(1 + 2γT_w s + T_w² s²)·e^{−T_d s}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriverParams {
    /// Steady-state velocity matching ratio.
    pub k: f64,
    /// Anticipation time constant (s).
    pub t_z: f64,
    /// Natural-frequency time constant (s).
    pub t_w: f64,
    /// Damping factor.
    pub gamma: f64,
    /// Reaction delay (s).
    pub t_d: f64,
}

impl DriverParams {
    pub fn new(k: f64, t_z: f64, t_w: f64, gamma: f64, t_d: f64) -> Result<Self> {
        for (name, v) in [("K", k), ("T_z", t_z), ("T_w", t_w), ("gamma", gamma), ("T_d", t_d)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter {
                    name: "driver",
                    reason: format!("{name} must be positive, got {v}"),
                });
            }
        }
        if gamma >= 2.0 {
            return Err(invalid("driver", format!("gamma must lie in (0, 2), got {gamma}")));
        }
        Ok(DriverParams {
            k,
            t_z,
            t_w,
            gamma,
            t_d,
        })
    }
}

/// The two canonical driver behaviour classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DriverKind {
    Attentive,
    Distracted,
}

impl DriverKind {
    pub const ALL: [DriverKind; 2] = [DriverKind::Attentive, DriverKind::Distracted];

    pub fn params(self) -> DriverParams {
        match self {
            DriverKind::Attentive => DriverParams {
                k: 1.0,
                t_z: 5.41,
                t_w: 4.15,
                gamma: 0.54,
                t_d: 0.324,
            },
            DriverKind::Distracted => DriverParams {
                k: 1.0,
                t_z: 6.96,
                t_w: 4.76,
                gamma: 0.65,
                t_d: 0.512,
            },
        }
    }

    pub fn letter(self) -> char {
        match self {
            DriverKind::Attentive => 'A',
            DriverKind::Distracted => 'D',
        }
    }
}

impl fmt::Display for DriverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DriverKind::Attentive => "attentive",
            DriverKind::Distracted => "distracted",
        })
    }
}

impl FromStr for DriverKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "attentive" | "a" | "att" => Ok(DriverKind::Attentive),
            "distracted" | "d" | "dist" => Ok(DriverKind::Distracted),
            other => Err(invalid("driver", format!("unknown driver kind `{other}`"))),
        }
    }
}

/// A communication loss at vehicle `k` followed by a human takeover.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaultScenario {
    /// Vehicle that loses its predecessor link (1-based).
    pub k: usize,
    /// Fault time (s).
    pub t_f: f64,
    pub driver: DriverKind,
    /// Constant safe deceleration applied by the driver (m/s²).
    #[serde(default = "default_a_saf")]
    pub a_saf: f64,
}

/// Safe deceleration used when none is configured (m/s²).
pub const DEFAULT_A_SAF: f64 = 2.0;

fn default_a_saf() -> f64 {
    DEFAULT_A_SAF
}

impl FaultScenario {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.k < 1 || self.k > n {
            return Err(Error::IndexOutOfRange { index: self.k, max: n });
        }
        if !(self.t_f >= 0.0 && self.t_f.is_finite()) {
            return Err(invalid("t_f", format!("must be finite and >= 0, got {}", self.t_f)));
        }
        if !(self.a_saf >= 0.0 && self.a_saf.is_finite()) {
            return Err(invalid("a_saf", format!("must be finite and >= 0, got {}", self.a_saf)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkStatus {
    Active,
    Failed,
}

/// Status of the directed link from vehicle `from` to its neighbour `to`.
///
/// Only the `k−1 → k` link fails, from `t_f` on.
pub fn link_status(scenario: &FaultScenario, from: usize, to: usize, t: f64) -> Result<LinkStatus> {
    if from.abs_diff(to) != 1 {
        return Err(Error::NotAdjacent(from, to));
    }
    if to == scenario.k && from + 1 == scenario.k && t >= scenario.t_f {
        Ok(LinkStatus::Failed)
    } else {
        Ok(LinkStatus::Active)
    }
}

/// `u_k = u_drv − a_saf`, the faulted vehicle's command after takeover.
pub fn takeover_control(u_drv: f64, a_saf: f64) -> f64 {
    u_drv - a_saf
}

/// Discrete driver: canonical realization of the rational part plus an
/// integer-sample delay line.
#[derive(Debug, Clone)]
pub struct DriverState {
    system: Canonical,
    x: Vec<f64>,
    delay_line: VecDeque<f64>,
    dt: f64,
}

impl DriverState {
    /// Driver at rest, with the delay line sized `round(T_d/dt)`.
    pub fn new(params: &DriverParams, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(invalid("dt", "must be positive"));
        }
        let tf = lti::driver_tf(params);
        let system = Canonical::from_tf(&tf)?;
        let n = delay_samples(params.t_d, dt);
        Ok(DriverState {
            x: vec![0.0; system.order()],
            system,
            delay_line: VecDeque::from(vec![0.0; n]),
            dt,
        })
    }

    pub fn delay_len(&self) -> usize {
        self.delay_line.len()
    }

    /// Feeds the relative velocity `v_{k−1} − v_k` at the current sample and
    /// returns the commanded acceleration at that sample, then advances one
    /// step.
    pub fn step(&mut self, relative_velocity: f64, dt: f64) -> Result<f64> {
        if (dt - self.dt).abs() > 1e-12 * self.dt {
            return Err(Error::DtMismatch {
                expected: self.dt,
                actual: dt,
            });
        }
        if !relative_velocity.is_finite() {
            return Err(Error::NonFinite("driver input"));
        }
        let delayed = match self.delay_line.pop_front() {
            Some(v) => {
                self.delay_line.push_back(relative_velocity);
                v
            }
            None => relative_velocity,
        };
        let y = self.system.output(&self.x, delayed);
        self.system.rk4_step(&mut self.x, delayed, dt);
        Ok(y)
    }
}

/// Free-function form of [`DriverState::step`].
pub fn driver_step(state: &mut DriverState, relative_velocity: f64, dt: f64) -> Result<f64> {
    state.step(relative_velocity, dt)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_parameters() {
        let a = DriverKind::Attentive.params();
        assert_eq!((a.k, a.t_z, a.t_w, a.gamma, a.t_d), (1.0, 5.41, 4.15, 0.54, 0.324));
        let d = DriverKind::Distracted.params();
        assert_eq!((d.k, d.t_z, d.t_w, d.gamma, d.t_d), (1.0, 6.96, 4.76, 0.65, 0.512));
        for p in [a, d] {
            assert_eq!(DriverParams::new(p.k, p.t_z, p.t_w, p.gamma, p.t_d).unwrap(), p);
        }
    }

    #[test]
    fn params_validation() {
        assert!(DriverParams::new(1.0, 1.0, 1.0, 2.0, 0.1).is_err());
        assert!(DriverParams::new(1.0, 1.0, 1.0, 0.5, 0.0).is_err());
        assert!(DriverParams::new(-1.0, 1.0, 1.0, 0.5, 0.1).is_err());
    }

    #[test]
    fn zero_history_zero_output() {
        let mut s = DriverState::new(&DriverKind::Attentive.params(), 1e-3).unwrap();
        for _ in 0..1000 {
            assert_eq!(s.step(0.0, 1e-3).unwrap(), 0.0);
        }
    }

    #[test]
    fn delay_line_length() {
        let s = DriverState::new(&DriverKind::Attentive.params(), 1e-3).unwrap();
        assert_eq!(s.delay_len(), 324);
        let s = DriverState::new(&DriverKind::Distracted.params(), 1e-3).unwrap();
        assert_eq!(s.delay_len(), 512);
    }

    #[test]
    fn dt_mismatch() {
        let mut s = DriverState::new(&DriverKind::Attentive.params(), 1e-3).unwrap();
        assert!(matches!(s.step(1.0, 2e-3), Err(Error::DtMismatch { .. })));
    }

    #[test]
    fn takeover() {
        assert_eq!(takeover_control(0.0, 2.0), -2.0);
        assert_eq!(takeover_control(0.7, 0.0), 0.7);
        assert_eq!(takeover_control(1.5, 2.0), -0.5);
    }

    #[test]
    fn link_states() {
        let f = FaultScenario {
            k: 4,
            t_f: 10.0,
            driver: DriverKind::Distracted,
            a_saf: 2.0,
        };
        assert_eq!(link_status(&f, 3, 4, 9.9).unwrap(), LinkStatus::Active);
        assert_eq!(link_status(&f, 3, 4, 10.0).unwrap(), LinkStatus::Failed);
        assert_eq!(link_status(&f, 4, 3, 12.0).unwrap(), LinkStatus::Active);
        assert_eq!(link_status(&f, 4, 5, 12.0).unwrap(), LinkStatus::Active);
        assert_eq!(link_status(&f, 1, 3, 0.0), Err(Error::NotAdjacent(1, 3)));
    }

    #[test]
    fn fault_validation() {
        let f = FaultScenario {
            k: 12,
            t_f: 1.0,
            driver: DriverKind::Attentive,
            a_saf: 2.0,
        };
        assert!(f.validate(10).is_err());
        assert!(FaultScenario { k: 0, ..f }.validate(10).is_err());
        assert!(FaultScenario { k: 10, ..f }.validate(10).is_ok());
        assert!(FaultScenario { k: 3, t_f: -1.0, ..f }.validate(10).is_err());
    }

    #[test]
    fn parse_kind() {
        assert_eq!("Distracted".parse::<DriverKind>().unwrap(), DriverKind::Distracted);
        assert_eq!("a".parse::<DriverKind>().unwrap(), DriverKind::Attentive);
        assert!("sleepy".parse::<DriverKind>().is_err());
    }
}
