use num_complex::Complex64;

use super::poly::Poly;
use crate::error::{invalid, Error, Result};

/// Rational transfer function `num(s)/den(s) · e^{-s·delay}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalTF {
    num: Poly,
    den: Poly,
    delay: f64,
}

impl RationalTF {
    pub fn new(num: Poly, den: Poly) -> Result<Self> {
        Self::with_delay(num, den, 0.0)
    }

    pub fn with_delay(num: Poly, den: Poly, delay: f64) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DegenerateDenominator);
        }
        if !(delay >= 0.0 && delay.is_finite()) {
            return Err(invalid("delay", format!("must be finite and >= 0, got {delay}")));
        }
        Ok(RationalTF { num, den, delay })
    }

    /// Unit gain, no delay.
    pub fn identity() -> Self {
        RationalTF {
            num: Poly::one(),
            den: Poly::one(),
            delay: 0.0,
        }
    }

    pub fn num(&self) -> &Poly {
        &self.num
    }

    pub fn den(&self) -> &Poly {
        &self.den
    }

    pub fn delay(&self) -> f64 {
        self.delay
    }

    pub fn is_proper(&self) -> bool {
        self.num.degree() <= self.den.degree()
    }

    pub fn is_strictly_proper(&self) -> bool {
        self.num.is_zero() || self.num.degree() < self.den.degree()
    }

    /// Series connection; delays add.
    pub fn series(&self, other: &RationalTF) -> RationalTF {
        RationalTF {
            num: &self.num * &other.num,
            den: &self.den * &other.den,
            delay: self.delay + other.delay,
        }
    }

    pub fn powi(&self, n: u32) -> RationalTF {
        RationalTF {
            num: self.num.powi(n),
            den: self.den.powi(n),
            delay: self.delay * n as f64,
        }
    }

    pub fn scale(&self, k: f64) -> RationalTF {
        RationalTF {
            num: self.num.scale(k),
            den: self.den.clone(),
            delay: self.delay,
        }
    }

    /// Same rational part with the denominator made monic.
    pub fn normalized(&self) -> RationalTF {
        let lead = self.den.leading();
        RationalTF {
            num: self.num.scale(1.0 / lead),
            den: self.den.scale(1.0 / lead),
            delay: self.delay,
        }
    }

    pub fn dc_gain(&self) -> Result<f64> {
        let d = self.den.eval(0.0);
        if d == 0.0 {
            return Err(Error::AtPole { re: 0.0, im: 0.0 });
        }
        Ok(self.num.eval(0.0) / d)
    }

    /// Evaluates the full response at a complex point, delay included.
    pub fn eval(&self, s: Complex64) -> Result<Complex64> {
        let d = self.den.eval_complex(s);
        let scale = self.den.norm().max(f64::MIN_POSITIVE);
        if d.norm() <= 1e-14 * scale * (1.0 + s.norm()).powi(self.den.degree() as i32) {
            return Err(Error::AtPole { re: s.re, im: s.im });
        }
        Ok(self.num.eval_complex(s) / d * (-s * self.delay).exp())
    }
}

/// `num(jω)/den(jω)·e^{-jω·delay}` at every grid frequency.
pub fn freq_response(tf: &RationalTF, omegas: &[f64]) -> Result<Vec<Complex64>> {
    omegas.iter().map(|&w| tf.eval(Complex64::new(0.0, w))).collect()
}

/// `n` logarithmically spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Default H2 quadrature grid: 4096 log-spaced points on [1e-3, 1e3] rad/s.
pub fn default_h2_grid() -> Vec<f64> {
    log_grid(1e-3, 1e3, 4096)
}

/// `(1/π)∫|A(jω) − B(jω)|² dω` by the trapezoidal rule over `omegas`.
pub fn h2_distance(a: &RationalTF, b: &RationalTF, omegas: &[f64]) -> Result<f64> {
    if !a.is_strictly_proper() || !b.is_strictly_proper() {
        return Err(Error::NotStrictlyProper);
    }
    if omegas.len() < 2 {
        return Err(invalid("omegas", "need at least two grid points"));
    }
    let fa = freq_response(a, omegas)?;
    let fb = freq_response(b, omegas)?;
    let sq: Vec<f64> = fa.iter().zip(&fb).map(|(x, y)| (x - y).norm_sqr()).collect();
    let integral: f64 = omegas
        .windows(2)
        .zip(sq.windows(2))
        .map(|(w, v)| 0.5 * (w[1] - w[0]) * (v[0] + v[1]))
        .sum();
    Ok(integral / std::f64::consts::PI)
}
