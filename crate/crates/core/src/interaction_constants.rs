//! Scalar constants of the energy expansion.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground_state::{energy_i, Nonlinearity, RadialProfile};
use crate::quadrature::{adaptive, AdaptiveOptions};
use crate::radial_poisson::{NewtonPotential, RadialDensity};
use crate::unit_sphere_area;

/// Every constant of the reduced energy for one `(p, N)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionConstants {
    pub dimension: usize,
    pub exponent: f64,
    /// `½∫ f(w) e^{x₁} dx`.
    pub gamma0: f64,
    /// Plain tail fit, the amplitude used by the interpolant.
    #[serde(rename = "A_N")]
    pub a_tail: f64,
    /// Tail amplitude with the Bessel envelope divided out.
    #[serde(rename = "A_N_limit")]
    pub a_limit: f64,
    #[serde(rename = "I_w")]
    pub energy: f64,
    /// `∫ w²`.
    pub mass2: f64,
    /// Self Coulomb energy `∫ w² φ[w²]`.
    #[serde(rename = "D")]
    pub self_coulomb: f64,
    #[serde(rename = "C2")]
    pub c2: f64,
    #[serde(rename = "G1")]
    pub g1: f64,
    #[serde(rename = "a_N")]
    pub sphere_area: f64,
}

impl InteractionConstants {
    pub fn compute(profile: &RadialProfile) -> Result<Self> {
        let density = RadialDensity::square_of(profile);
        let mass2 = density.mass();
        let self_coulomb = compute_self_coulomb(profile);
        Ok(Self {
            dimension: profile.dimension(),
            exponent: profile.nonlinearity().exponent(),
            gamma0: compute_gamma0(profile)?,
            a_tail: profile.tail().amplitude,
            a_limit: profile.limit_amplitude(),
            energy: energy_i(profile),
            mass2,
            self_coulomb,
            c2: 0.25 * mass2 * mass2,
            g1: compute_g1(profile),
            sphere_area: unit_sphere_area(profile.dimension()),
        })
    }

    /// `C₁ = ℓ D / 4` for `ℓ` peaks.
    pub fn c1(&self, peaks: usize) -> f64 {
        0.25 * peaks as f64 * self.self_coulomb
    }
}

/// `σ_{N-2} ∫₀^π e^{r cos θ} sin^{N-2}θ dθ`, the spherical integral of `e^{r x₁}`.
pub fn angular_factor(dimension: usize, r: f64) -> f64 {
    let n = dimension as i32;
    let est = adaptive(
        |t: f64| (r * t.cos()).exp() * t.sin().powi(n - 2),
        0.0,
        std::f64::consts::PI,
        AdaptiveOptions::with_rel_tol(1e-14),
    );
    unit_sphere_area(dimension - 1) * est.value
}

/// Closed form of [`angular_factor`] for `N = 3`.
pub fn angular_factor_3d(r: f64) -> f64 {
    if r == 0.0 {
        4.0 * std::f64::consts::PI
    } else {
        4.0 * std::f64::consts::PI * r.sinh() / r
    }
}

/// `γ₀ = ½ ∫₀^∞ f(w) r^{N-1} A(r) dr`.
pub fn compute_gamma0(profile: &RadialProfile) -> Result<f64> {
    let nl = profile.nonlinearity();
    gamma0_with(profile, |w| nl.f(w))
}

/// `γ₀` with `f` replaced by an arbitrary source term.
pub fn gamma0_with<F: Fn(f64) -> f64>(profile: &RadialProfile, source: F) -> Result<f64> {
    let n = profile.dimension();
    let a_n = unit_sphere_area(n);
    let big_r = profile.r_max();
    let integrand = |r: f64, w: f64| source(w) * angular_factor(n, r) * r.powi(n as i32 - 1);
    let at_end = integrand(big_r, profile.values()[profile.values().len() - 1]).abs();
    let peak = profile
        .grid()
        .iter()
        .zip(profile.values())
        .step_by(10)
        .map(|(&r, &w)| integrand(r, w).abs())
        .fold(0.0, f64::max);
    if peak > 0.0 && at_end > 1e-12 * peak {
        return Err(Error::TailUnderresolved {
            r_max: big_r,
            ratio: at_end / peak,
        });
    }
    Ok(0.5 * profile.radial_integral(|r, w, _, _| source(w) * angular_factor(n, r)) / a_n)
}

pub fn compute_c2(profile: &RadialProfile) -> f64 {
    let m = RadialDensity::square_of(profile).mass();
    0.25 * m * m
}

/// `D = ∫ w² φ[w²]`.
pub fn compute_self_coulomb(profile: &RadialProfile) -> f64 {
    let phi = NewtonPotential::new(RadialDensity::square_of(profile));
    profile.radial_integral(|r, w, _, _| w * w * phi.value(r))
}

pub fn compute_c1(profile: &RadialProfile, peaks: usize) -> Result<f64> {
    if peaks == 0 {
        return Err(Error::InvalidInput("C₁ needs at least one peak".into()));
    }
    Ok(0.25 * peaks as f64 * compute_self_coulomb(profile))
}

/// `∫ (|∇∂₁w|² + (∂₁w)²)`, using the angular average
/// `⟨|∇∂₁w|²⟩ = (w''² + (N-1) w'²/r²) / N`.
pub fn compute_g1(profile: &RadialProfile) -> f64 {
    let n = profile.dimension() as f64;
    profile.radial_integral(|r, _, dw, d2w| {
        let u = dw / r;
        (d2w * d2w + (n - 1.0) * u * u + dw * dw) / n
    })
}

/// `∫ (∂₁w)² = (1/N) ∫ |∇w|²`.
pub fn first_partial_norm(profile: &RadialProfile) -> f64 {
    let n = profile.dimension() as f64;
    profile.radial_integral(|_, _, dw, _| dw * dw) / n
}

/// Exponents of the reduction: `β ∈ (σ, 1)`, `τ = β⁴(1+σ)`, `μ ∈ (0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionParameters {
    pub beta: f64,
    pub sigma: f64,
    pub tau: f64,
    pub mu: f64,
}

impl ReductionParameters {
    pub const DEFAULT_BETA: f64 = 0.95;
    pub const DEFAULT_MU: f64 = 0.5;
    /// Cap on `σ` so that the default `β` lies in `(σ, 1)`.
    pub const SIGMA_CAP: f64 = 0.9;

    pub fn new(beta: f64, sigma: f64, mu: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(Error::InvalidInput(format!("σ = {sigma} outside (0, 1)")));
        }
        if !(beta > sigma && beta < 1.0) {
            return Err(Error::InvalidInput(format!("β = {beta} outside (σ, 1) = ({sigma}, 1)")));
        }
        if !(mu > 0.0 && mu < 1.0) {
            return Err(Error::InvalidInput(format!("μ = {mu} outside (0, 1)")));
        }
        Ok(Self {
            beta,
            sigma,
            tau: beta.powi(4) * (1.0 + sigma),
            mu,
        })
    }

    /// Defaults for `f`: `σ` is its Hölder exponent capped at [`Self::SIGMA_CAP`].
    pub fn for_nonlinearity(nl: &Nonlinearity) -> Self {
        let sigma = nl.holder_sigma().min(Self::SIGMA_CAP);
        Self::new(Self::DEFAULT_BETA, sigma, Self::DEFAULT_MU).expect("defaults are admissible")
    }

    /// Exponent `β²(β²+σ)` of the residual bound.
    pub fn residual_exponent(&self) -> f64 {
        let b2 = self.beta * self.beta;
        b2 * (b2 + self.sigma)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground_state::{solve_ground_state, SolverOptions};
    use approx::assert_relative_eq;
    use std::sync::OnceLock;

    fn cubic_3d() -> &'static RadialProfile {
        static P: OnceLock<RadialProfile> = OnceLock::new();
        P.get_or_init(|| {
            solve_ground_state(Nonlinearity::power(3.0).unwrap(), 3, &SolverOptions::default()).unwrap()
        })
    }

    #[test]
    fn angular_factor_closed_form_n3() {
        for r in [0.0, 0.5, 3.0, 12.0, 25.0] {
            assert_relative_eq!(angular_factor(3, r), angular_factor_3d(r), max_relative = 1e-12);
        }
        assert_relative_eq!(angular_factor(5, 0.0), unit_sphere_area(5), max_relative = 1e-13);
    }

    #[test]
    fn gamma0_matches_tail_amplitude() {
        // w = G * f(w) with G ~ ½(2π)^{-(N-1)/2} r^{-(N-1)/2} e^{-r}.
        let p = cubic_3d();
        let g = compute_gamma0(p).unwrap();
        assert_relative_eq!(g, 2.0 * std::f64::consts::PI * p.limit_amplitude(), max_relative = 1e-6);
        assert_eq!(gamma0_with(p, |_| 0.0).unwrap(), 0.0);
    }

    #[test]
    fn slow_decay_flags_tail() {
        let opts = SolverOptions::default();
        let p = solve_ground_state(Nonlinearity::power(1.8).unwrap(), 5, &opts).unwrap();
        assert!(matches!(compute_gamma0(&p), Err(Error::TailUnderresolved { .. })));
    }

    #[test]
    fn c2_homogeneity_and_c1_linearity() {
        let p = cubic_3d();
        let c2 = compute_c2(p);
        assert_relative_eq!(compute_c2(&p.scaled(1.3)), 1.3f64.powi(4) * c2, max_relative = 1e-12);
        assert_eq!(compute_c2(&p.scaled(0.0)), 0.0);
        let c = InteractionConstants::compute(p).unwrap();
        assert_eq!(c.c1(1), c.self_coulomb / 4.0);
        assert_relative_eq!(c.c1(5) / c.c1(1), 5.0, max_relative = 1e-15);
        assert!(compute_c1(p, 0).is_err());
    }

    #[test]
    fn g1_is_positive_and_vanishes_for_zero() {
        let p = cubic_3d();
        assert!(compute_g1(p) > first_partial_norm(p));
        assert_eq!(compute_g1(&p.scaled(0.0)), 0.0);
    }

    #[test]
    fn constants_round_trip_through_json() {
        let c = InteractionConstants::compute(cubic_3d()).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"C2\"") && s.contains("\"gamma0\""));
        let back: InteractionConstants = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn reduction_parameters() {
        let nl = Nonlinearity::power(3.0).unwrap();
        let r = ReductionParameters::for_nonlinearity(&nl);
        assert_eq!(r.sigma, 0.9);
        assert_eq!(r.tau, 0.95f64.powi(4) * 1.9);
        let weak = ReductionParameters::for_nonlinearity(&Nonlinearity::power(1.5).unwrap());
        assert_eq!(weak.sigma, 0.5);
        assert!(ReductionParameters::new(0.4, 0.5, 0.5).is_err());
        assert!(ReductionParameters::new(0.95, 0.5, 1.0).is_err());
    }
}
