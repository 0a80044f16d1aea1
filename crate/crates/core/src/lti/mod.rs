//! Polynomial and rational transfer-function toolbox.

mod chain;
mod poles;
mod poly;
mod realization;
mod tf;

pub use chain::{
    alpha, beta, chain_tf, compose_fault_tf, delta_recursion, driver_tf, g_pf, g_sb, gamma, sb_denominator,
    sb_denominator_power_form, t_link,
};
pub use poles::{pattern_mismatch, pole_separation, poles, relative_residual, roots, sine_pole_pattern, PoleSet};
pub use poly::Poly;
pub use realization::{delay_samples, simulate_tf, Canonical};
pub use tf::{default_h2_grid, freq_response, h2_distance, log_grid, RationalTF};
