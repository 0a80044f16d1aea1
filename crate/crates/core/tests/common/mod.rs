//! Reference computations shared by the integration tests. None of these
//! call into the library's numerics.

#![allow(dead_code)]

use num_complex::Complex64;

/// Determinant by Laplace expansion along the first row.
pub fn cofactor_det(m: &[Vec<Complex64>]) -> Complex64 {
    let n = m.len();
    match n {
        0 => Complex64::new(1.0, 0.0),
        1 => m[0][0],
        _ => (0..n)
            .map(|j| {
                let minor: Vec<Vec<Complex64>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, v)| *v)
                            .collect()
                    })
                    .collect();
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                m[0][j] * sign * cofactor_det(&minor)
            })
            .sum(),
    }
}

/// Dense `n×n` tridiagonal matrix: `diag` on the diagonal except `last` in
/// the bottom-right corner, `off` on both off-diagonals.
pub fn tridiag_dense(n: usize, diag: Complex64, last: Complex64, off: Complex64) -> Vec<Vec<Complex64>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (i == j, i.abs_diff(j) == 1) {
                    (true, _) if i + 1 == n => last,
                    (true, _) => diag,
                    (_, true) => off,
                    _ => Complex64::new(0.0, 0.0),
                })
                .collect()
        })
        .collect()
}

/// Thomas algorithm for a tridiagonal system with constant off-diagonals.
pub fn thomas(diag: &[Complex64], off: Complex64, rhs: &[Complex64]) -> Vec<Complex64> {
    let n = diag.len();
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    c[0] = off / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - off * c[i - 1];
        c[i] = off / m;
        d[i] = (rhs[i] - off * d[i - 1]) / m;
    }
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Bisection on a sign-changing bracket.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    assert!(flo * f(hi) <= 0.0, "no sign change on [{lo}, {hi}]");
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Effective length as the root of `W1·x^{N1−1} + W2·x^{N2−1} = x^{N−1}`
/// at `x = (W1/W2)^{1/(N2−N1)}`, clamped to `[N1, N2]`.
pub fn n_eff_by_root(w1: f64, w2: f64, n1: usize, n2: usize) -> f64 {
    let (a, b) = (n1 as f64, n2 as f64);
    let x = (w1 / w2).powf(1.0 / (b - a));
    let rhs = w1 * x.powf(a - 1.0) + w2 * x.powf(b - 1.0);
    let root = bisect(|n| x.powf(n - 1.0) - rhs, -100.0, 100.0);
    root.clamp(a, b)
}

/// Forgetting integral by direct summation of every past term.
pub fn direct_integral(r: &[f64], lambda: f64, dt: f64) -> Vec<f64> {
    (0..r.len())
        .map(|n| (0..=n).map(|j| (-lambda * (n - j) as f64 * dt).exp() * dt * r[j]).sum())
        .collect()
}

/// Least-squares fit of `a·sin(ωt) + b·cos(ωt)`; returns the complex gain
/// `a + jb` relative to a unit `sin(ωt)` input.
pub fn sine_gain(y: &[f64], t: &[f64], omega: f64) -> Complex64 {
    let (mut ss, mut sc, mut cc, mut ys, mut yc) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&y, &t) in y.iter().zip(t) {
        let (s, c) = (omega * t).sin_cos();
        ss += s * s;
        sc += s * c;
        cc += c * c;
        ys += y * s;
        yc += y * c;
    }
    let det = ss * cc - sc * sc;
    Complex64::new((ys * cc - yc * sc) / det, (yc * ss - ys * sc) / det)
}

pub fn rms_rel(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    let den: f64 = b.iter().map(|y| y * y).sum();
    (num / den).sqrt()
}
