//! Controllable-canonical state-space realizations and their fixed-step
//! time-domain simulation.

use super::tf::RationalTF;
use crate::error::{invalid, Error, Result};

/// Controllable-canonical realization of a proper rational transfer function.
///
/// For `den = s^n + a_{n-1}s^{n-1} + … + a_0` the state obeys
/// `x_i' = x_{i+1}` for `i < n-1` and `x_{n-1}' = u − Σ a_i x_i`; the output is
/// `y = Σ c_i x_i + d·u`.
#[derive(Debug, Clone, PartialEq)]
pub struct Canonical {
    a: Vec<f64>,
    c: Vec<f64>,
    d: f64,
}

impl Canonical {
    pub fn from_tf(tf: &RationalTF) -> Result<Self> {
        if !tf.is_proper() {
            return Err(Error::Improper {
                num: tf.num().degree(),
                den: tf.den().degree(),
            });
        }
        let lead = tf.den().leading();
        let den: Vec<f64> = tf.den().coeffs().iter().map(|c| c / lead).collect();
        let mut num: Vec<f64> = tf.num().coeffs().iter().map(|c| c / lead).collect();
        let n = den.len() - 1;
        num.resize(n + 1, 0.0);
        // Split off the direct feedthrough term.
        let d = num[n];
        let c: Vec<f64> = (0..n).map(|i| num[i] - d * den[i]).collect();
        Ok(Canonical {
            a: den[..n].to_vec(),
            c,
            d,
        })
    }

    pub fn order(&self) -> usize {
        self.a.len()
    }

    pub fn output(&self, x: &[f64], u: f64) -> f64 {
        self.c.iter().zip(x).map(|(c, x)| c * x).sum::<f64>() + self.d * u
    }

    fn derivative(&self, x: &[f64], u: f64, out: &mut [f64]) {
        let n = self.a.len();
        if n > 0 {
            out[..n - 1].copy_from_slice(&x[1..]);
            out[n - 1] = u - self.a.iter().zip(x).map(|(a, x)| a * x).sum::<f64>();
        }
    }

    /// One classical RK4 step with `u` held over the interval.
    pub fn rk4_step(&self, x: &mut [f64], u: f64, dt: f64) {
        let n = self.a.len();
        if n == 0 {
            return;
        }
        // Driver realizations are second order; avoid heap traffic for them.
        let mut stack = [0.0; 40];
        let mut heap = Vec::new();
        let buf: &mut [f64] = if n <= 8 {
            &mut stack[..5 * n]
        } else {
            heap.resize(5 * n, 0.0);
            &mut heap
        };
        let (k1, rest) = buf.split_at_mut(n);
        let (k2, rest) = rest.split_at_mut(n);
        let (k3, rest) = rest.split_at_mut(n);
        let (k4, tmp) = rest.split_at_mut(n);
        self.derivative(x, u, k1);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * dt * k1[i];
        }
        self.derivative(tmp, u, k2);
        for i in 0..n {
            tmp[i] = x[i] + 0.5 * dt * k2[i];
        }
        self.derivative(tmp, u, k3);
        for i in 0..n {
            tmp[i] = x[i] + dt * k3[i];
        }
        self.derivative(tmp, u, k4);
        for i in 0..n {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
    }
}

/// Number of whole samples representing `delay` at step `dt`.
pub fn delay_samples(delay: f64, dt: f64) -> usize {
    (delay / dt).round() as usize
}

/// Simulates `tf` on a sampled input from rest.
///
/// The rational part is integrated with RK4 under zero-order-hold input;
/// the transport delay is applied as an integer-sample shift. `y[n]` is the
/// output at `t = n·dt`.
pub fn simulate_tf(tf: &RationalTF, input: &[f64], dt: f64) -> Result<Vec<f64>> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(invalid("dt", "must be positive"));
    }
    let sys = Canonical::from_tf(tf)?;
    let shift = delay_samples(tf.delay(), dt);
    let mut x = vec![0.0; sys.order()];
    let mut y = Vec::with_capacity(input.len());
    for n in 0..input.len() {
        let u = if n >= shift { input[n - shift] } else { 0.0 };
        y.push(sys.output(&x, u));
        sys.rk4_step(&mut x, u, dt);
    }
    Ok(y)
}
