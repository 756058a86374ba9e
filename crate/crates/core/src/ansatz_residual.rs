//! Residual of the signed multi-peak ansatz `w_P = Σ λ_i w((x - P_i)/ε)`.
//!
//! Each peak solves the rescaled limit equation, so the Laplacian drops out:
//!
//! ```text
//! S_ε[w_P] = f(w_P) - Σ λ_i f(w_{P_i}) - φ[w_P²] w_P.
//! ```
//!
//! The self parts of `φ[w_P²]` are exact radial potentials. The cross parts
//! `φ[w_{P_i} w_{P_j}]` are only bracketed, by `0` below and the envelope of
//! [`crate::radial_poisson::cross_potential_bound`] above.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ground_state::RadialProfile;
use crate::interaction_constants::ReductionParameters;
use crate::parallel::Execution;
use crate::peak_configurations::{distance, PeakConfiguration};
use crate::radial_poisson::{NewtonPotential, RadialDensity};

/// Points per ordered pair on the segment joining two peaks.
pub const SEGMENT_POINTS: usize = 33;
/// Quasi-random points in the enclosing ball.
pub const BALL_POINTS: usize = 512;

/// Profile with the two radial potentials the residual needs.
#[derive(Debug, Clone)]
pub struct ResidualKernel {
    profile: RadialProfile,
    phi_w2: NewtonPotential,
    phi_w: NewtonPotential,
}

impl ResidualKernel {
    pub fn new(profile: &RadialProfile) -> Self {
        Self {
            phi_w2: NewtonPotential::new(RadialDensity::square_of(profile)),
            phi_w: NewtonPotential::new(RadialDensity::profile(profile)),
            profile: profile.clone(),
        }
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    /// `φ[w²]` at rescaled radius `ρ`.
    pub fn self_potential(&self, rho: f64) -> f64 {
        self.phi_w2.value(rho)
    }

    /// `φ[w]` at rescaled radius `ρ`.
    pub fn profile_potential(&self, rho: f64) -> f64 {
        self.phi_w.value(rho)
    }
}

/// `w_P` for a configuration at radius `r` and scale `ε`.
#[derive(Debug, Clone)]
pub struct MultiPeakAnsatz<'a> {
    cfg: &'a PeakConfiguration,
    kernel: &'a ResidualKernel,
    centers: Vec<Vec<f64>>,
    r: f64,
    eps: f64,
    /// `w(|P_i - P_j| / (2ε))`, row-major.
    half_gap_w: Vec<f64>,
}

/// Bracket `[low, high]` of `S_ε[w_P](x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResidualBracket {
    pub low: f64,
    pub high: f64,
}

impl ResidualBracket {
    pub fn magnitude(&self) -> f64 {
        self.low.abs().max(self.high.abs())
    }

    pub fn width(&self) -> f64 {
        self.high - self.low
    }
}

impl<'a> MultiPeakAnsatz<'a> {
    pub fn new(cfg: &'a PeakConfiguration, kernel: &'a ResidualKernel, r: f64, eps: f64) -> Result<Self> {
        if !(r > 0.0 && eps > 0.0 && eps < 1.0) {
            return Err(Error::DomainViolation {
                value: if r > 0.0 { eps } else { r },
                reason: "need r > 0 and ε ∈ (0, 1)".into(),
            });
        }
        if kernel.profile.dimension() != cfg.dimension() {
            return Err(Error::InvalidInput(format!(
                "profile dimension {} differs from configuration dimension {}",
                kernel.profile.dimension(),
                cfg.dimension()
            )));
        }
        let centers: Vec<Vec<f64>> = cfg.points().iter().map(|b| b.iter().map(|c| r * c).collect()).collect();
        let l = centers.len();
        let mut half_gap_w = vec![0.0; l * l];
        for i in 0..l {
            for j in 0..l {
                if i != j {
                    half_gap_w[i * l + j] = kernel.profile.evaluate_w(0.5 * distance(&centers[i], &centers[j]) / eps);
                }
            }
        }
        Ok(Self {
            cfg,
            kernel,
            centers,
            r,
            eps,
            half_gap_w,
        })
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    fn rescaled_distances(&self, x: &[f64]) -> Vec<f64> {
        self.centers.iter().map(|c| distance(x, c) / self.eps).collect()
    }

    /// `Σ λ_i w(|x - P_i|/ε)`.
    pub fn value(&self, x: &[f64]) -> f64 {
        self.rescaled_distances(x)
            .iter()
            .zip(self.cfg.signs())
            .map(|(&rho, &s)| s as f64 * self.kernel.profile.evaluate_w(rho))
            .sum()
    }

    /// `Σ w_{P_i}(x)^{e}`, the spatial weight of the residual bound.
    pub fn peak_weight(&self, x: &[f64], exponent: f64) -> f64 {
        self.rescaled_distances(x)
            .iter()
            .map(|&rho| self.kernel.profile.evaluate_w(rho).powf(exponent))
            .sum()
    }

    /// `min_i |x - P_i| / ε`.
    pub fn nearest_rescaled(&self, x: &[f64]) -> f64 {
        self.rescaled_distances(x).into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Interval containing `S_ε[w_P](x)`.
    pub fn residual_bracket(&self, x: &[f64]) -> ResidualBracket {
        let profile = &self.kernel.profile;
        let nl = profile.nonlinearity();
        let rho = self.rescaled_distances(x);
        let signs: Vec<f64> = self.cfg.signs().iter().map(|&s| s as f64).collect();
        let w: Vec<f64> = rho.iter().map(|&r| profile.evaluate_w(r)).collect();
        let v: f64 = w.iter().zip(&signs).map(|(a, s)| a * s).sum();
        let local = nl.f(v) - w.iter().zip(&signs).map(|(a, s)| s * nl.f(*a)).sum::<f64>();

        let e2 = self.eps * self.eps;
        let self_part: f64 = e2 * rho.iter().map(|&r| self.kernel.self_potential(r)).sum::<f64>();
        let phi_w: Vec<f64> = rho.iter().map(|&r| self.kernel.profile_potential(r)).collect();
        let l = w.len();
        let mut plus = 0.0;
        let mut minus = 0.0;
        for i in 0..l {
            for j in 0..l {
                if i == j {
                    continue;
                }
                let bound = e2 * self.half_gap_w[i * l + j] * (phi_w[i] + phi_w[j]);
                if signs[i] * signs[j] > 0.0 {
                    plus += bound;
                } else {
                    minus += bound;
                }
            }
        }
        let pot_low = (self_part - minus).max(0.0);
        let pot_high = self_part + plus;
        let (a, b) = (-pot_high * v, -pot_low * v);
        ResidualBracket {
            low: local + a.min(b),
            high: local + a.max(b),
        }
    }

    /// Segment points for every ordered pair, then Halton points in the ball
    /// of radius `2r + 10ε`.
    pub fn sample_points(&self) -> Vec<Vec<f64>> {
        let n = self.cfg.dimension();
        let l = self.centers.len();
        let mut out = Vec::with_capacity(l * l * SEGMENT_POINTS + BALL_POINTS + l);
        if l == 1 {
            // No segments: sample the radial profile of the lone peak.
            for k in 0..SEGMENT_POINTS {
                let mut p = self.centers[0].clone();
                p[0] += self.eps * 10.0 * k as f64 / (SEGMENT_POINTS - 1) as f64;
                out.push(p);
            }
        }
        for i in 0..l {
            for j in 0..l {
                if i == j {
                    continue;
                }
                for k in 0..SEGMENT_POINTS {
                    let t = k as f64 / (SEGMENT_POINTS - 1) as f64;
                    out.push(
                        self.centers[i]
                            .iter()
                            .zip(&self.centers[j])
                            .map(|(a, b)| a + t * (b - a))
                            .collect(),
                    );
                }
            }
        }
        let radius = 2.0 * self.r + 10.0 * self.eps;
        out.extend(halton_ball(n, BALL_POINTS, radius));
        out
    }
}

/// First `count` points of the Halton sequence that fall in the ball of
/// radius `radius` in `ℝᴺ`.
pub fn halton_ball(dimension: usize, count: usize, radius: f64) -> Vec<Vec<f64>> {
    const PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];
    let mut out = Vec::with_capacity(count);
    let mut index = 1u64;
    while out.len() < count {
        let p: Vec<f64> = PRIMES[..dimension]
            .iter()
            .map(|&b| 2.0 * radical_inverse(index, b) - 1.0)
            .collect();
        index += 1;
        if p.iter().map(|c| c * c).sum::<f64>() <= 1.0 {
            out.push(p.into_iter().map(|c| c * radius).collect());
        }
    }
    out
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut x = 0.0;
    while i > 0 {
        x += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    x
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualSample {
    pub x: Vec<f64>,
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub eps: f64,
    pub r: f64,
    /// `sup |S| / (ε^{β²(β²+σ)} Σ w_{P_i}^{1-β²})` over the samples.
    #[serde(rename = "C_hat")]
    pub c_hat: f64,
    /// `sup |S|` over the samples.
    pub sup_residual: f64,
    /// Sample-set lower bound for `‖S‖_{*,P}`.
    pub weighted_norm: f64,
    pub in_gamma: bool,
    pub samples: Vec<ResidualSample>,
}

/// Evaluates the residual on the standard sample set and the empirical
/// constant of the pointwise bound.
pub fn residual_bound_check(
    ansatz: &MultiPeakAnsatz<'_>,
    params: &ReductionParameters,
    execution: Execution,
) -> ResidualReport {
    let points = ansatz.sample_points();
    let brackets = execution.map(&points, |x| ansatz.residual_bracket(x));
    let b2 = params.beta * params.beta;
    let scale = ansatz.eps.powf(params.residual_exponent());
    let ratios = execution.map_range(points.len(), |i| {
        let weight = ansatz.peak_weight(&points[i], 1.0 - b2);
        if weight > 0.0 {
            brackets[i].magnitude() / (scale * weight)
        } else {
            0.0
        }
    });
    let c_hat = ratios.iter().copied().fold(0.0, f64::max);
    let magnitudes: Vec<f64> = brackets.iter().map(ResidualBracket::magnitude).collect();
    let sup_residual = magnitudes.iter().copied().fold(0.0, f64::max);
    let weighted = weighted_norm(&magnitudes, &points, ansatz, params.mu);
    ResidualReport {
        eps: ansatz.eps,
        r: ansatz.r,
        c_hat,
        sup_residual,
        weighted_norm: weighted,
        in_gamma: ansatz.cfg.gamma_membership(ansatz.r, ansatz.eps, params),
        samples: points
            .into_iter()
            .zip(brackets)
            .map(|(x, b)| ResidualSample {
                x,
                low: b.low,
                high: b.high,
            })
            .collect(),
    }
}

/// `max_k e^{μ min_i |x_k - P_i|/ε} |v_k|`, a lower bound of `‖v‖_{*,P}`.
pub fn weighted_norm(values: &[f64], points: &[Vec<f64>], ansatz: &MultiPeakAnsatz<'_>, mu: f64) -> f64 {
    values
        .iter()
        .zip(points)
        .map(|(v, x)| (mu * ansatz.nearest_rescaled(x)).exp() * v.abs())
        .fold(0.0, f64::max)
}

/// `ε²Δw_P - w_P + f(w_P)` for a single peak, evaluated with the
/// interpolated `w, w', w''` rather than the ODE identity.
pub fn single_peak_equation_defect(profile: &RadialProfile, rho: f64) -> f64 {
    let n = profile.dimension() as f64;
    let nl = profile.nonlinearity();
    let w = profile.evaluate_w(rho);
    let lap = profile.evaluate_d2w(rho) + (n - 1.0) / rho * profile.evaluate_dw(rho);
    lap - w + nl.f(w)
}
