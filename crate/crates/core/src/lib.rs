//! Numerics for sign-changing cluster states of the semiclassical
//! Schrödinger–Poisson equation
//!
//! ```text
//! -ε²Δv + v + φ[v²] v = f(v),   φ[g](x) = ∫ g(y) / |x - y|^{N-2} dy,   N ∈ [3, 6]
//! ```
//!
//! in the finite-dimensional reduction picture: the positive ground state
//! `w` of `Δw - w + f(w) = 0` is the building block, signed copies of it are
//! placed on symmetric point configurations shrinking at rate `ε log(1/ε²)`,
//! and the leading-order reduced energy of such a configuration is maximized
//! over its single radius parameter.
//!
//! Module map:
//!
//! * [`ground_state`]: radial shooting for `w`, interpolation, exponential tail fit.
//! * [`radial_poisson`]: Newton potentials of radial densities and the kernels `Ψ_β`.
//! * [`interaction_constants`]: `γ₀`, `C₁`, `C₂`, self energies, gradient norms.
//! * [`peak_configurations`]: the four signed configuration families and their
//!   distance spectra and admissible radius ranges.
//! * [`reduced_energy`]: the reduced functional, the model function `α_{ε,C}`
//!   and their maximizers, ε-sweeps.
//! * [`ansatz_residual`]: pointwise residual brackets of the multi-peak ansatz.
//! * [`oracle_quadrature`]: brute-force two-peak integrals used to certify the
//!   interaction constants.
//!
//! Batch evaluations go through [`parallel::Execution`]; rayon is used when
//! the `parallel` feature is on (default).

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ansatz_residual;
pub mod error;
pub mod ground_state;
pub mod interaction_constants;
pub mod ode;
pub mod oracle_quadrature;
pub mod parallel;
pub mod peak_configurations;
pub mod quadrature;
pub mod radial_poisson;
pub mod reduced_energy;

pub use error::{Error, Result};
pub use ground_state::{
    solve_ground_state, Nonlinearity, ProfileShape, RadialProfile, SolverOptions, TailParams,
};
pub use interaction_constants::{InteractionConstants, ReductionParameters};
pub use parallel::Execution;
pub use peak_configurations::{Family, PeakConfiguration, PolytopeKind};

/// Surface measure of the unit sphere `S^{n-1} ⊂ ℝⁿ` (`a_n` in the text).
pub fn unit_sphere_area(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (n as f64 - 2.0) * unit_sphere_area(n - 2),
    }
}

/// `log(1/ε²)`, the length scale of every admissible range.
pub fn log_inv_eps2(eps: f64) -> f64 {
    -2.0 * eps.ln()
}

/// Formats `x` with 12 significant digits, in plain decimal unless the
/// magnitude is extreme.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let e = x.abs().log10().floor() as i32;
    if !(-30..=15).contains(&e) {
        return format!("{x:.11e}");
    }
    let decimals = (11 - e).max(0) as usize;
    format!("{x:.decimals$}")
}
