//! Brute-force two-peak integrals at `ε = 1`.
//!
//! Two peaks at `0` and `d e₁` make every integrand axisymmetric, so
//! `∫_{ℝᴺ} g dx = σ_{N-2} ∫ dt ∫₀^∞ g(t, ρ) ρ^{N-2} dρ` with `t` the axial and
//! `ρ` the transverse coordinate. The domain is truncated at
//! `|t - d/2|, ρ ≤ d/2 + 30`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ground_state::{Nonlinearity, RadialProfile};
use crate::quadrature::{adaptive_with_breaks, AdaptiveOptions};
use crate::radial_poisson::{NewtonPotential, RadialDensity};
use crate::unit_sphere_area;

/// Margin beyond the two peaks kept in the truncated domain.
pub const TRUNCATION_MARGIN: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OracleOptions {
    pub rel_tol: f64,
    /// Absolute accuracy below which refinement stops.
    pub abs_tol: f64,
    /// Uniform panels per axis before adaptive refinement.
    pub panels: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 0.0,
            panels: 8,
        }
    }
}

impl OracleOptions {
    /// Same tolerance with twice the initial panels.
    pub fn refined(self) -> Self {
        Self {
            panels: 2 * self.panels,
            ..self
        }
    }
}

fn check_separation(d: f64, allow_zero: bool) -> Result<()> {
    let ok = if allow_zero { d >= 0.0 } else { d > 0.0 };
    if ok && d.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidInput(format!("separation d = {d} must be {}", if allow_zero { ">= 0" } else { "> 0" })))
    }
}

fn breaks(lo: f64, hi: f64, panels: usize, extra: &[f64]) -> Vec<f64> {
    let mut b: Vec<f64> = (0..=panels).map(|i| lo + (hi - lo) * i as f64 / panels as f64).collect();
    b.extend(extra.iter().copied().filter(|&x| x > lo && x < hi));
    // Peaks sit at the graded points; the integrands vary on an O(1) scale.
    for &c in extra {
        for off in [-4.0, -1.0, 1.0, 4.0] {
            let x = c + off;
            if x > lo && x < hi {
                b.push(x);
            }
        }
    }
    b.sort_by(|a, c| a.total_cmp(c));
    b.dedup();
    b
}

/// `∫_{ℝᴺ} g(|x|, |x - d e₁|) dx` on the truncated axisymmetric domain.
///
/// `kinks` lists radii about either peak where `g` is not smooth; every
/// transverse slice gets a break where it crosses them.
pub fn axisymmetric_integral<G>(dimension: usize, d: f64, opts: OracleOptions, kinks: &[f64], g: G) -> Result<f64>
where
    G: Fn(f64, f64) -> f64,
{
    if dimension < 2 {
        return Err(Error::InvalidInput(format!("dimension {dimension} < 2")));
    }
    let half = 0.5 * d + TRUNCATION_MARGIN;
    let (t_lo, t_hi) = (0.5 * d - half, 0.5 * d + half);
    let t_breaks = breaks(t_lo, t_hi, opts.panels, &[0.0, d]);
    let mut rho_breaks = breaks(0.0, half, opts.panels, &[0.0]);
    rho_breaks.extend(kinks.iter().copied().filter(|&k| k > 0.0 && k < half));
    rho_breaks.sort_by(|a, b| a.total_cmp(b));
    let k = dimension as i32 - 2;
    // Each slice reports the error it could not refine away, weighted like its value.
    let integrate = |inner_opts: AdaptiveOptions, outer_opts: AdaptiveOptions, residual: &mut f64| {
        adaptive_with_breaks(
            |rho| {
                let rho2 = rho * rho;
                let mut slice_breaks = t_breaks.clone();
                for &k in kinks {
                    if k > rho {
                        let s = (k * k - rho2).sqrt();
                        slice_breaks.extend([-s, s, d - s, d + s].into_iter().filter(|&t| t > t_lo && t < t_hi));
                    }
                }
                slice_breaks.sort_by(|a, b| a.total_cmp(b));
                let inner = adaptive_with_breaks(
                    |t| {
                        let r1 = (t * t + rho2).sqrt();
                        let r2 = ((t - d) * (t - d) + rho2).sqrt();
                        g(r1, r2)
                    },
                    &slice_breaks,
                    inner_opts,
                );
                let weight = rho.powi(k);
                if !inner.converged {
                    *residual = residual.max(inner.abs_err * weight);
                }
                inner.value * weight
            },
            &rho_breaks,
            outer_opts,
        )
    };
    // A coarse pass fixes the absolute scale, so transverse slices far out
    // in the tails are not refined to their own relative accuracy.
    let coarse = AdaptiveOptions {
        rel_tol: 1e-3,
        abs_tol: 1e-300,
        max_depth: 4,
    };
    let scale = integrate(coarse, coarse, &mut 0.0).value.abs();
    let inner_opts = AdaptiveOptions {
        rel_tol: 0.1 * opts.rel_tol,
        abs_tol: (0.1 * (opts.rel_tol * scale).max(opts.abs_tol) / (half * half.powi(k))).max(1e-300),
        max_depth: 18,
    };
    let outer_opts = AdaptiveOptions {
        rel_tol: opts.rel_tol,
        abs_tol: (opts.rel_tol * scale).max(opts.abs_tol).max(1e-300),
        max_depth: 18,
    };
    let mut residual = 0.0f64;
    let est = integrate(inner_opts, outer_opts, &mut residual);
    let budget = 10.0 * (opts.rel_tol * est.value.abs()).max(opts.abs_tol);
    if !est.converged || residual * half > budget {
        return Err(Error::QuadratureNotConverged(format!(
            "axisymmetric integral at d = {d}: error estimate {:.3e} (slices {:.3e}) for value {:.6e}",
            est.abs_err,
            residual * half,
            est.value
        )));
    }
    Ok(unit_sphere_area(dimension - 1) * est.value)
}

/// `∫ f(w(|x|)) w(|x - d e₁|) dx`.
pub fn two_peak_interaction(profile: &RadialProfile, d: f64) -> Result<f64> {
    two_peak_interaction_with(profile, d, OracleOptions::default())
}

pub fn two_peak_interaction_with(profile: &RadialProfile, d: f64, opts: OracleOptions) -> Result<f64> {
    check_separation(d, true)?;
    let nl = profile.nonlinearity();
    axisymmetric_integral(profile.dimension(), d, opts, &[profile.tail().switch_radius], |r1, r2| {
        nl.f(profile.evaluate_w(r1)) * profile.evaluate_w(r2)
    })
}

/// `∫ f(w_{P_1}) w_{P_2}` for peaks at distance `separation` and scale `ε`,
/// i.e. `ε^N` times the `ε = 1` value at `separation / ε`.
pub fn scaled_two_peak_interaction(profile: &RadialProfile, eps: f64, separation: f64) -> Result<f64> {
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!("ε = {eps} must be positive")));
    }
    Ok(eps.powi(profile.dimension() as i32) * two_peak_interaction(profile, separation / eps)?)
}

/// `F(a + b) - F(a) - F(b) - f(a) b - f(b) a`, free of first-order cancellation.
fn f_excess(nl: &Nonlinearity, a: f64, b: f64) -> f64 {
    let (big, small) = if a.abs() >= b.abs() { (a, b) } else { (b, a) };
    if small == 0.0 {
        return 0.0;
    }
    // F(big + small) - F(big) - f(big) small = ∫₀^small [f(big + s) - f(big)] ds,
    // with f(big + s) - f(big) = f(big) ((1 + s/big)^p - 1) kept to full precision.
    let rule = crate::quadrature::gl8();
    let (fb, p) = (nl.f(big), nl.exponent());
    let shift = rule.integrate(0.0, small, |s| fb * (p * (s / big).ln_1p()).exp_m1());
    shift - nl.antiderivative(small) - nl.f(small) * big
}

/// `H = ∫ [F(λ₁w₁ + λ₂w₂) - F(w₁) - F(w₂) - 2λ₁λ₂ f(w₁) w₂]`.
///
/// The reflection swapping the peaks turns `2 f(w₁) w₂` into
/// `f(w₁) w₂ + f(w₂) w₁` under the integral, which is what is integrated.
///
/// The integrand is second order in the smaller peak, so the profile's own
/// interpolation error sets a looser default tolerance. Far apart, `H` is
/// resolved to `10⁻¹² w(d)`, the scale it is compared against.
pub fn h_two_peak(profile: &RadialProfile, d: f64, signs: (i8, i8)) -> Result<f64> {
    let opts = OracleOptions {
        rel_tol: 1e-6,
        abs_tol: 1e-12 * profile.evaluate_w(d),
        ..OracleOptions::default()
    };
    h_two_peak_with(profile, d, signs, opts)
}

pub fn h_two_peak_with(profile: &RadialProfile, d: f64, signs: (i8, i8), opts: OracleOptions) -> Result<f64> {
    check_separation(d, false)?;
    let nl = profile.nonlinearity();
    let (l1, l2) = (signs.0 as f64, signs.1 as f64);
    axisymmetric_integral(profile.dimension(), d, opts, &[profile.tail().switch_radius], |r1, r2| {
        let (w1, w2) = (profile.evaluate_w(r1), profile.evaluate_w(r2));
        f_excess(&nl, l1 * w1, l2 * w2)
    })
}

/// `∫∫ w²(x) w²(y - d e₁) |x - y|^{2-N}`, as `∫ w²(x) φ[w²](|x - d e₁|)`.
pub fn pair_coulomb_energy(profile: &RadialProfile, d: f64) -> Result<f64> {
    pair_coulomb_energy_with(profile, d, OracleOptions::default())
}

pub fn pair_coulomb_energy_with(profile: &RadialProfile, d: f64, opts: OracleOptions) -> Result<f64> {
    check_separation(d, true)?;
    let phi = NewtonPotential::new(RadialDensity::square_of(profile));
    axisymmetric_integral(profile.dimension(), d, opts, &[profile.tail().switch_radius], |r1, r2| {
        let w = profile.evaluate_w(r1);
        w * w * phi.value(r2)
    })
}

/// `∫ [½(|∇w_P|² + w_P²) - F(w_P)]` for two signed peaks at distance `d`.
///
/// Integrating the cross gradient term by parts against the limit equation
/// leaves `2 I[w] - λ₁λ₂ ∫ f(w₁) w₂ - H`.
pub fn schrodinger_energy_two_peak(profile: &RadialProfile, d: f64, signs: (i8, i8)) -> Result<f64> {
    check_separation(d, false)?;
    let i = crate::ground_state::energy_i(profile);
    let cross = two_peak_interaction(profile, d)?;
    let h = h_two_peak(profile, d, signs)?;
    Ok(2.0 * i - (signs.0 * signs.1) as f64 * cross - h)
}
