use nalgebra::DMatrix;
use num_complex::Complex64;

use super::poly::Poly;
use super::tf::RationalTF;
use crate::error::{Error, Result};
use crate::platoon::ControllerGains;

/// Poles with multiplicities. Roots closer than the clustering tolerance are
/// merged and reported at their centroid.
#[derive(Debug, Clone, PartialEq)]
pub struct PoleSet {
    poles: Vec<(Complex64, usize)>,
}

impl PoleSet {
    pub fn from_points(points: impl IntoIterator<Item = Complex64>) -> Self {
        Self::clustered(points.into_iter().collect(), 0.0)
    }

    fn clustered(roots: Vec<Complex64>, tol: f64) -> Self {
        let mut groups: Vec<Vec<Complex64>> = Vec::new();
        for r in roots {
            match groups.iter_mut().find(|g| (g[0] - r).norm() <= tol) {
                Some(g) => g.push(r),
                None => groups.push(vec![r]),
            }
        }
        let mut poles: Vec<(Complex64, usize)> = groups
            .into_iter()
            .map(|g| {
                let m = g.len();
                let c = g.iter().sum::<Complex64>() / m as f64;
                (c, m)
            })
            .collect();
        poles.sort_by(|a, b| a.0.re.total_cmp(&b.0.re).then(a.0.im.total_cmp(&b.0.im)));
        PoleSet { poles }
    }

    pub fn iter(&self) -> impl Iterator<Item = &(Complex64, usize)> {
        self.poles.iter()
    }

    /// Every pole repeated by its multiplicity.
    pub fn points(&self) -> Vec<Complex64> {
        self.poles
            .iter()
            .flat_map(|(p, m)| std::iter::repeat_n(*p, *m))
            .collect()
    }

    pub fn count(&self) -> usize {
        self.poles.iter().map(|(_, m)| m).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    pub fn max_real(&self) -> f64 {
        self.poles.iter().map(|(p, _)| p.re).fold(f64::NEG_INFINITY, f64::max)
    }

    /// Largest distance from any pole to its nearest conjugate partner.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let pts = self.points();
        pts.iter()
            .map(|p| pts.iter().map(|q| (q - p.conj()).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    }
}

/// Roots of `p` from the eigenvalues of its companion matrix.
pub fn roots(p: &Poly) -> Result<Vec<Complex64>> {
    let n = p.degree();
    if n < 1 || p.is_zero() {
        return Err(Error::DegenerateDenominator);
    }
    let c = p.monic();
    let coeffs = c.coeffs();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -coeffs[i];
    }
    Ok(m.complex_eigenvalues().iter().copied().collect())
}

/// `|p(z)| / ‖p‖` at a candidate root.
pub fn relative_residual(p: &Poly, z: Complex64) -> f64 {
    let scale = p
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| c.abs() * z.norm().powi(i as i32))
        .sum::<f64>()
        .max(p.norm());
    p.eval_complex(z).norm() / scale
}

/// Poles of `tf`, each checked by back-substitution into the denominator.
pub fn poles(tf: &RationalTF) -> Result<PoleSet> {
    let den = tf.den();
    let rs = roots(den)?;
    for r in &rs {
        let res = relative_residual(den, *r);
        if !(res < 1e-6) {
            return Err(Error::PoleResidual { residual: res });
        }
    }
    let scale = rs.iter().map(|r| r.norm()).fold(1.0, f64::max);
    Ok(PoleSet::clustered(rs, 1e-7 * scale))
}

/// `min_{i,j} |a_i − b_j|`.
pub fn pole_separation(a: &PoleSet, b: &PoleSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Empty);
    }
    let mut best = f64::INFINITY;
    for (p, _) in a.iter() {
        for (q, _) in b.iter() {
            best = best.min((p - q).norm());
        }
    }
    Ok(best)
}

/// Closed-form sine pattern `−b0 ± j·sqrt(2k0 − b0²/2)·sin(iπ/(2n))`,
/// `i = 1..n`, sometimes quoted for SB chains of `n` vehicles.
pub fn sine_pole_pattern(g: ControllerGains, n: usize) -> Vec<Complex64> {
    let w = (2.0 * g.k0 - 0.5 * g.b0 * g.b0).max(0.0).sqrt();
    (1..=n)
        .flat_map(|i| {
            let im = w * (i as f64 * std::f64::consts::PI / (2.0 * n as f64)).sin();
            [Complex64::new(-g.b0, im), Complex64::new(-g.b0, -im)]
        })
        .collect()
}

/// For each pattern point, the distance to the nearest computed pole; returns
/// the worst one. Zero would mean the pattern is contained in the poles.
pub fn pattern_mismatch(pattern: &[Complex64], computed: &PoleSet) -> f64 {
    pattern
        .iter()
        .map(|p| {
            computed
                .iter()
                .map(|(q, _)| (p - q).norm())
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max)
}
