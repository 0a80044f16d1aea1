//! First-to-last transfer functions of PF and SB vehicle chains.

use super::poly::Poly;
use super::tf::RationalTF;
use crate::driver::DriverParams;
use crate::error::{invalid, Result};
use crate::platoon::{Architecture, ControllerGains};

/// Diagonal term of an interior SB row, `s² + 2b0 s + 2k0`.
pub fn alpha(g: ControllerGains) -> Poly {
    Poly::quadratic(2.0 * g.k0, 2.0 * g.b0, 1.0)
}

/// Off-diagonal coupling, `−(b0 s + k0)`.
pub fn beta(g: ControllerGains) -> Poly {
    Poly::linear(-g.k0, -g.b0)
}

/// Diagonal term of the last SB row, `s² + b0 s + k0`.
pub fn gamma(g: ControllerGains) -> Poly {
    Poly::quadratic(g.k0, g.b0, 1.0)
}

/// Single PD link `T(s) = (b0 s + k0)/(s² + b0 s + k0)`.
pub fn t_link(g: ControllerGains) -> RationalTF {
    RationalTF::new(Poly::linear(g.k0, g.b0), gamma(g)).expect("gamma is never zero")
}

/// `T(s)^m`, the PF chain across `m` links.
pub fn g_pf(g: ControllerGains, links: usize) -> Result<RationalTF> {
    if links < 1 {
        return Err(invalid("links", "PF chain needs at least one link"));
    }
    Ok(t_link(g).powi(links as u32))
}

/// Determinant of the `n×n` tridiagonal matrix with `α` on the diagonal and
/// `β` off it, via `Δ_n = αΔ_{n−1} − β²Δ_{n−2}`, `Δ_0 = 1`, `Δ_1 = α`.
pub fn delta_recursion(g: ControllerGains, n: usize) -> Result<Poly> {
    if n < 1 {
        return Err(invalid("n", "determinant order must be >= 1"));
    }
    Ok(delta(g, n))
}

fn delta(g: ControllerGains, n: usize) -> Poly {
    let a = alpha(g);
    let b2 = beta(g).powi(2);
    let mut prev = Poly::one();
    let mut cur = a.clone();
    for _ in 1..n {
        let next = &(&a * &cur) - &(&b2 * &prev);
        prev = cur;
        cur = next;
    }
    if n == 0 {
        prev
    } else {
        cur
    }
}

/// Determinant of the `(N−1)`-dimensional SB follower subsystem:
/// `E = γΔ_{N−2} − β²Δ_{N−3}`, with `E = γ` when `N = 2`.
pub fn sb_denominator(g: ControllerGains, n_vehicles: usize) -> Result<Poly> {
    if n_vehicles < 2 {
        return Err(invalid("n", "SB chain needs at least two vehicles"));
    }
    let gm = gamma(g);
    if n_vehicles == 2 {
        return Ok(gm);
    }
    let b2 = beta(g).powi(2);
    let d1 = delta(g, n_vehicles - 2);
    let d2 = delta(g, n_vehicles - 3);
    Ok(&(&gm * &d1) - &(&b2 * &d2))
}

/// `γα^{n−1} − β²α^{n−2}`.
///
/// Only equals a chain determinant if every leading principal minor were a
/// pure power of `α`, which the recursion contradicts for `n ≥ 2`. Kept for
/// comparison against [`sb_denominator`].
pub fn sb_denominator_power_form(g: ControllerGains, n: usize) -> Result<Poly> {
    if n < 2 {
        return Err(invalid("n", "power form needs n >= 2"));
    }
    let a = alpha(g);
    let b2 = beta(g).powi(2);
    Ok(&(&gamma(g) * &a.powi(n as u32 - 1)) - &(&b2 * &a.powi(n as u32 - 2)))
}

/// SB first-to-last transfer function `p̃_N/p̃_1` for an `N`-vehicle chain
/// whose head is driven externally: `(−β)^{N−1} / E_{N−1}`.
pub fn g_sb(g: ControllerGains, n_vehicles: usize) -> Result<RationalTF> {
    let den = sb_denominator(g, n_vehicles)?;
    let num = (-&beta(g)).powi(n_vehicles as u32 - 1);
    RationalTF::new(num, den)
}

/// Head-to-tail chain across `links` links for either architecture.
pub fn chain_tf(g: ControllerGains, links: usize, arch: Architecture) -> Result<RationalTF> {
    match arch {
        Architecture::PredecessorFollowing => g_pf(g, links),
        Architecture::SymmetricBidirectional => {
            if links < 1 {
                return Err(invalid("links", "SB chain needs at least one link"));
            }
            g_sb(g, links + 1)
        }
    }
}

/// Driver transfer function `K(1 + T_z s)/(1 + 2γT_w s + T_w² s²)·e^{−T_d s}`.
pub fn driver_tf(p: &DriverParams) -> RationalTF {
    RationalTF::with_delay(
        Poly::linear(p.k, p.k * p.t_z),
        Poly::quadratic(1.0, 2.0 * p.gamma * p.t_w, p.t_w * p.t_w),
        p.t_d,
    )
    .expect("driver parameters are validated on construction")
}

/// Post-fault model: chain across `remaining_links` links behind the taken-over
/// vehicle, in series with the driver model.
pub fn compose_fault_tf(
    g: ControllerGains,
    remaining_links: usize,
    driver: &DriverParams,
    arch: Architecture,
) -> Result<RationalTF> {
    Ok(chain_tf(g, remaining_links, arch)?.series(&driver_tf(driver)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::driver::DriverKind;

    fn g() -> ControllerGains {
        ControllerGains::new(1.0, 2.0).unwrap()
    }

    #[test]
    fn link_coefficients() {
        let t = t_link(g());
        assert_eq!(t.num().coeffs(), &[1.0, 2.0]);
        assert_eq!(t.den().coeffs(), &[1.0, 2.0, 1.0]);
        assert_eq!(t.dc_gain().unwrap(), 1.0);
    }

    #[test]
    fn link_rolls_off() {
        let t = t_link(g());
        let hi = t.eval(num_complex::Complex64::new(0.0, 1e6)).unwrap();
        assert!(hi.norm() < 1e-5);
    }

    #[test]
    fn pf_rejects_zero_links() {
        assert!(g_pf(g(), 0).is_err());
        assert_eq!(g_pf(g(), 1).unwrap(), t_link(g()));
    }

    #[test]
    fn recursion_initial_terms() {
        assert_eq!(delta_recursion(g(), 1).unwrap(), alpha(g()));
        let d2 = &alpha(g()).powi(2) - &beta(g()).powi(2);
        assert_eq!(delta_recursion(g(), 2).unwrap(), d2);
        assert!(delta_recursion(g(), 0).is_err());
    }

    #[test]
    fn two_vehicle_sb_is_single_link() {
        let sb = g_sb(g(), 2).unwrap();
        assert_eq!(sb.num(), t_link(g()).num());
        assert_eq!(sb.den(), t_link(g()).den());
        assert!(g_sb(g(), 1).is_err());
    }

    #[test]
    fn power_form_differs_from_determinant() {
        let gg = g();
        for n in 3..8 {
            let a = sb_denominator(gg, n).unwrap();
            let b = sb_denominator_power_form(gg, n).unwrap();
            assert_ne!(a, b, "n = {n}");
        }
    }

    #[test]
    fn fault_tf_carries_driver_delay() {
        let d = DriverKind::Distracted.params();
        let tf = compose_fault_tf(g(), 1, &d, Architecture::PredecessorFollowing).unwrap();
        assert_eq!(tf.delay(), 0.512);
        let expected = t_link(g()).series(&driver_tf(&d));
        assert_eq!(tf, expected);
        for m in 1..8 {
            for arch in [Architecture::PredecessorFollowing, Architecture::SymmetricBidirectional] {
                let tf = compose_fault_tf(g(), m, &d, arch).unwrap();
                assert!((tf.dc_gain().unwrap() - 1.0).abs() < 1e-12);
            }
        }
        assert!(compose_fault_tf(g(), 0, &d, Architecture::PredecessorFollowing).is_err());
    }
}
