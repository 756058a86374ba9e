//! Newton potentials of radial densities.
//!
//! For radial `g` the spherical average of `|x - sω|^{2-N}` is
//! `max(|x|, s)^{2-N}`, so
//!
//! ```text
//! φ[g](r) = a_N ( r^{2-N} ∫₀ʳ g s^{N-1} ds + ∫ᵣ^∞ g s ds ).
//! ```
//!
//! The general kernels `Ψ_β[g](x) = ∫ |x-y|^{-β} g(y) dy` have no such
//! reduction and are integrated over radius and polar angle.

use crate::error::{Error, Result};
use crate::ground_state::{ProfileShape, RadialProfile};
use crate::quadrature::{adaptive_with_breaks, gl8, AdaptiveOptions};
use crate::unit_sphere_area;

/// A nonnegative radial density tabulated on a grid, zero beyond it.
///
/// Values between nodes come from cubic Hermite interpolation with
/// node slopes.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialDensity {
    dimension: usize,
    grid: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl RadialDensity {
    /// Samples `g` (returning value and derivative) on `grid`.
    pub fn from_fn<G>(dimension: usize, grid: Vec<f64>, g: G) -> Result<Self>
    where
        G: Fn(f64) -> (f64, f64),
    {
        let (values, slopes) = grid.iter().map(|&r| g(r)).unzip();
        Self::new(dimension, grid, values, slopes)
    }

    /// Builds a density from samples alone; slopes by three-point differences.
    pub fn from_samples(dimension: usize, grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() < 3 || grid.len() != values.len() {
            return Err(Error::InvalidInput("density needs at least 3 aligned samples".into()));
        }
        let n = grid.len();
        let slopes = (0..n)
            .map(|i| {
                let (a, b, c) = if i == 0 {
                    (0, 1, 2)
                } else if i == n - 1 {
                    (n - 3, n - 2, n - 1)
                } else {
                    (i - 1, i, i + 1)
                };
                lagrange_slope(
                    [grid[a], grid[b], grid[c]],
                    [values[a], values[b], values[c]],
                    grid[i],
                )
            })
            .collect();
        Self::new(dimension, grid, values, slopes)
    }

    /// `g = G(w, w')` on the profile grid, with `G` returning value and slope.
    pub fn from_profile<G>(profile: &RadialProfile, g: G) -> Result<Self>
    where
        G: Fn(f64, f64) -> (f64, f64),
    {
        let values = profile.values().iter().zip(profile.derivative());
        let (values, slopes) = values.map(|(&w, &dw)| g(w, dw)).unzip();
        Self::new(profile.dimension(), profile.grid().to_vec(), values, slopes)
    }

    /// `w²`.
    pub fn square_of(profile: &RadialProfile) -> Self {
        Self::from_profile(profile, |w, dw| (w * w, 2.0 * w * dw)).expect("w² is a valid density")
    }

    /// `w`.
    pub fn profile(profile: &RadialProfile) -> Self {
        Self::from_profile(profile, |w, dw| (w, dw)).expect("w is a valid density")
    }

    pub fn zero(dimension: usize, grid: Vec<f64>) -> Result<Self> {
        let n = grid.len();
        Self::new(dimension, grid, vec![0.0; n], vec![0.0; n])
    }

    fn new(dimension: usize, grid: Vec<f64>, values: Vec<f64>, slopes: Vec<f64>) -> Result<Self> {
        if !(3..=6).contains(&dimension) {
            return Err(Error::InvalidInput(format!("dimension {dimension} outside [3, 6]")));
        }
        if grid.len() < 2 || values.len() != grid.len() || slopes.len() != grid.len() {
            return Err(Error::InvalidInput("density grid and samples must align".into()));
        }
        if grid[0] < 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("density grid must be nonnegative and increasing".into()));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(Error::InvalidInput(format!("density value {v} is not finite and nonnegative")));
        }
        if slopes.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput("density slopes must be finite".into()));
        }
        Ok(Self {
            dimension,
            grid,
            values,
            slopes,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support_radius(&self) -> f64 {
        *self.grid.last().expect("non-empty grid")
    }

    /// Interpolated `g(r)`; zero outside the grid.
    pub fn value(&self, r: f64) -> f64 {
        let n = self.grid.len();
        if r < self.grid[0] || r > self.grid[n - 1] {
            return 0.0;
        }
        let i = self.grid.partition_point(|&g| g <= r).saturating_sub(1).min(n - 2);
        let h = self.grid[i + 1] - self.grid[i];
        let t = (r - self.grid[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.values[i]
            + (t3 - 2.0 * t2 + t) * h * self.slopes[i]
            + (-2.0 * t3 + 3.0 * t2) * self.values[i + 1]
            + (t3 - t2) * h * self.slopes[i + 1]
    }

    /// `∫_a^b g(s) s^k ds` by 8-point Gauss–Legendre on each grid cell.
    fn moment_between(&self, a: f64, b: f64, k: i32) -> f64 {
        let rule = gl8();
        let lo = a.max(self.grid[0]);
        let hi = b.min(self.support_radius());
        if hi <= lo {
            return 0.0;
        }
        let first = self.grid.partition_point(|&g| g <= lo).saturating_sub(1);
        let mut total = 0.0;
        let mut i = first;
        while i + 1 < self.grid.len() && self.grid[i] < hi {
            let x0 = self.grid[i].max(lo);
            let x1 = self.grid[i + 1].min(hi);
            if x1 > x0 {
                total += rule.integrate(x0, x1, |s| self.value(s) * s.powi(k));
            }
            i += 1;
        }
        total
    }

    /// `∫_{ℝᴺ} g`.
    pub fn mass(&self) -> f64 {
        let n = self.dimension as i32;
        unit_sphere_area(self.dimension) * self.moment_between(0.0, f64::INFINITY, n - 1)
    }

    /// `g(|·|/ε)` as a density on the grid scaled by `ε`.
    pub fn rescaled(&self, eps: f64) -> Self {
        Self {
            dimension: self.dimension,
            grid: self.grid.iter().map(|r| r * eps).collect(),
            values: self.values.clone(),
            slopes: self.slopes.iter().map(|d| d / eps).collect(),
        }
    }

    /// Pointwise sum of two densities on the same grid.
    pub fn sum(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid || self.dimension != other.dimension {
            return Err(Error::InvalidInput("densities live on different grids".into()));
        }
        Ok(Self {
            dimension: self.dimension,
            grid: self.grid.clone(),
            values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
            slopes: self.slopes.iter().zip(&other.slopes).map(|(a, b)| a + b).collect(),
        })
    }
}

fn lagrange_slope(x: [f64; 3], y: [f64; 3], at: f64) -> f64 {
    let [x0, x1, x2] = x;
    let [y0, y1, y2] = y;
    y0 * ((at - x1) + (at - x2)) / ((x0 - x1) * (x0 - x2))
        + y1 * ((at - x0) + (at - x2)) / ((x1 - x0) * (x1 - x2))
        + y2 * ((at - x0) + (at - x1)) / ((x2 - x0) * (x2 - x1))
}

fn point_options() -> AdaptiveOptions {
    AdaptiveOptions {
        rel_tol: 1e-11,
        abs_tol: 1e-300,
        max_depth: 40,
    }
}

/// `φ[g](r)` by adaptive quadrature of the representation formula.
pub fn newton_potential(g: &RadialDensity, r: f64) -> Result<f64> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidInput(format!("radius must be finite and nonnegative, got {r}")));
    }
    let n = g.dimension as i32;
    let big_r = g.support_radius();
    let mut breaks: Vec<f64> = g.grid.iter().step_by(100).copied().collect();
    breaks.push(big_r);
    let split = r.min(big_r);
    let inner_breaks: Vec<f64> = breaks.iter().copied().filter(|&b| b < split).chain([split]).collect();
    let outer_breaks: Vec<f64> = [split].into_iter().chain(breaks.iter().copied().filter(|&b| b > split)).collect();
    let outer = adaptive_with_breaks(|s| g.value(s) * s, &outer_breaks, point_options());
    if !outer.converged {
        return Err(Error::NotIntegrable(format!("outer potential integral at r = {r}")));
    }
    let mut value = outer.value;
    if r > 0.0 {
        let inner = adaptive_with_breaks(|s| g.value(s) * s.powi(n - 1), &inner_breaks, point_options());
        if !inner.converged {
            return Err(Error::NotIntegrable(format!("inner potential integral at r = {r}")));
        }
        value += r.powi(2 - n) * inner.value;
    }
    Ok(unit_sphere_area(g.dimension) * value)
}

/// Tabulated `φ[g]`: cumulative integrals at the grid nodes plus a partial
/// cell, so each evaluation costs two 8-point rules.
#[derive(Debug, Clone)]
pub struct NewtonPotential {
    density: RadialDensity,
    inner: Vec<f64>,
    outer: Vec<f64>,
    a_n: f64,
}

impl NewtonPotential {
    pub fn new(density: RadialDensity) -> Self {
        let n = density.dimension as i32;
        let m = density.grid.len();
        let rule = gl8();
        let mut inner = vec![0.0; m];
        let mut outer = vec![0.0; m];
        for i in 1..m {
            let (a, b) = (density.grid[i - 1], density.grid[i]);
            inner[i] = inner[i - 1] + rule.integrate(a, b, |s| density.value(s) * s.powi(n - 1));
        }
        for i in (0..m - 1).rev() {
            let (a, b) = (density.grid[i], density.grid[i + 1]);
            outer[i] = outer[i + 1] + rule.integrate(a, b, |s| density.value(s) * s);
        }
        let a_n = unit_sphere_area(density.dimension);
        Self {
            density,
            inner,
            outer,
            a_n,
        }
    }

    pub fn density(&self) -> &RadialDensity {
        &self.density
    }

    /// `∫_{ℝᴺ} g`.
    pub fn mass(&self) -> f64 {
        self.a_n * self.inner[self.inner.len() - 1]
    }

    /// `(∫₀ʳ g s^{N-1}, ∫ᵣ^∞ g s)`.
    fn partials(&self, r: f64) -> (f64, f64) {
        let g = &self.density;
        let m = g.grid.len();
        if r >= g.grid[m - 1] {
            return (self.inner[m - 1], 0.0);
        }
        if r <= g.grid[0] {
            return (0.0, self.outer[0]);
        }
        let n = g.dimension as i32;
        let i = g.grid.partition_point(|&x| x <= r).saturating_sub(1).min(m - 2);
        let rule = gl8();
        let (a, b) = (g.grid[i], g.grid[i + 1]);
        let inner = self.inner[i] + rule.integrate(a, r, |s| g.value(s) * s.powi(n - 1));
        let outer = self.outer[i + 1] + rule.integrate(r, b, |s| g.value(s) * s);
        (inner, outer)
    }

    pub fn value(&self, r: f64) -> f64 {
        let n = self.density.dimension as i32;
        let (inner, outer) = self.partials(r);
        if r == 0.0 {
            return self.a_n * outer;
        }
        self.a_n * (r.powi(2 - n) * inner + outer)
    }

    /// `φ'(r) = (2-N) a_N r^{1-N} ∫₀ʳ g s^{N-1} ds`.
    pub fn derivative(&self, r: f64) -> f64 {
        if r == 0.0 {
            return 0.0;
        }
        let n = self.density.dimension as i32;
        let (inner, _) = self.partials(r);
        (2 - n) as f64 * self.a_n * r.powi(1 - n) * inner
    }
}

/// `Ψ_β[g](|x|) = ∫ |x - y|^{-β} g(|y|) dy` by radius × polar-angle quadrature.
pub fn psi_beta(g: &RadialDensity, beta: usize, x_norm: f64) -> Result<f64> {
    let n = g.dimension;
    if beta < 1 || beta > n - 1 {
        return Err(Error::InvalidInput(format!("β = {beta} outside [1, {}]", n - 1)));
    }
    if !(x_norm > 0.0 && x_norm.is_finite()) {
        return Err(Error::InvalidInput(format!("|x| must be positive, got {x_norm}")));
    }
    let sigma = unit_sphere_area(n - 1);
    let r = x_norm;
    let big_r = g.support_radius();
    let mut breaks = vec![0.0];
    let cells: Vec<f64> = g.grid.iter().step_by(100).copied().collect();
    if r < big_r {
        // Graded approach to the near-singular shell s = r from both sides.
        let mut left = Vec::new();
        let mut right = Vec::new();
        let mut h = 0.5 * r.min(big_r - r);
        while h > 1e-10 * r {
            left.push(r - h);
            right.push(r + h);
            h *= 0.5;
        }
        breaks.extend(cells.iter().copied().filter(|&c| c > 0.0 && c < r - 0.5 * r.min(big_r - r)));
        breaks.extend(left);
        breaks.push(r);
        breaks.extend(right.into_iter().rev());
        breaks.extend(cells.iter().copied().filter(|&c| c > r + 0.5 * r.min(big_r - r) && c < big_r));
    } else {
        breaks.extend(cells.iter().copied().filter(|&c| c > 0.0 && c < big_r));
    }
    breaks.push(big_r);
    let mut failure = None;
    let outer = adaptive_with_breaks(
        |s| {
            if s == 0.0 {
                return 0.0;
            }
            let gs = g.value(s);
            if gs == 0.0 {
                return 0.0;
            }
            match angular_kernel(n, beta, r, s) {
                Ok(k) => gs * s.powi(n as i32 - 1) * k,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        },
        &breaks,
        AdaptiveOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-300,
            max_depth: 40,
        },
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if !outer.converged {
        return Err(Error::NotIntegrable(format!("Ψ_{beta} radial integral at |x| = {r}")));
    }
    Ok(sigma * outer.value)
}

/// `∫₀^π (r² + s² - 2rs cos θ)^{-β/2} sin^{N-2}θ dθ`.
fn angular_kernel(n: usize, beta: usize, r: f64, s: f64) -> Result<f64> {
    let gap = (r - s).abs();
    let rs = r * s;
    let power = -0.5 * beta as f64;
    let integrand = |theta: f64| {
        let half = (0.5 * theta).sin();
        let d2 = gap * gap + 4.0 * rs * half * half;
        d2.powf(power) * theta.sin().powi(n as i32 - 2)
    };
    let scale = gap / rs.sqrt();
    let mut breaks = vec![0.0];
    if scale < 0.5 {
        let mut t = scale.max(1e-14) * 0.25;
        while t < 0.5 {
            breaks.push(t);
            t *= 2.0;
        }
    }
    breaks.push(std::f64::consts::PI);
    let est = adaptive_with_breaks(
        integrand,
        &breaks,
        AdaptiveOptions {
            rel_tol: 1e-12,
            abs_tol: 1e-300,
            max_depth: 40,
        },
    );
    if !est.converged {
        return Err(Error::NotIntegrable(format!(
            "angular kernel at r = {r}, s = {s}, β = {beta}"
        )));
    }
    Ok(est.value)
}

/// Envelope `w(d/2) (φ[w](|x|) + φ[w](|x - d e₁|))` bounding
/// `φ[w(·) w(· - d e₁)](x)` in rescaled variables (peaks at `0` and `d e₁`).
///
/// Pointwise `w_i w_j ≤ w(d/2)(w_i + w_j)` because one of the two distances
/// is at least `d/2`.
pub fn cross_potential_bound<P: ProfileShape>(
    profile: &P,
    phi_w: &NewtonPotential,
    d: f64,
    x: &[f64],
) -> Result<f64> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::DomainViolation {
            value: d,
            reason: "peak separation must be positive".into(),
        });
    }
    let r_i = x.iter().map(|c| c * c).sum::<f64>().sqrt();
    let r_j = x
        .iter()
        .enumerate()
        .map(|(k, c)| if k == 0 { (c - d) * (c - d) } else { c * c })
        .sum::<f64>()
        .sqrt();
    Ok(profile.value(0.5 * d) * (phi_w.value(r_i) + phi_w.value(r_j)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground_state::{solve_ground_state, Nonlinearity, SolverOptions};
    use approx::assert_relative_eq;

    fn gaussian(dim: usize) -> RadialDensity {
        let grid: Vec<f64> = (0..=1200).map(|i| i as f64 * 0.01).collect();
        RadialDensity::from_fn(dim, grid, |r| ((-r * r).exp(), -2.0 * r * (-r * r).exp())).unwrap()
    }

    /// Closed form for N = 3: φ[e^{-|y|²}](r) = π^{3/2} erf(r) / r.
    fn gaussian_potential_3d(r: f64) -> f64 {
        // erf via its Taylor series; adequate for r ≤ 3.
        let mut term = r;
        let mut sum = r;
        for k in 1..80 {
            term *= -r * r / k as f64;
            sum += term / (2 * k + 1) as f64;
        }
        let erf = 2.0 / std::f64::consts::PI.sqrt() * sum;
        std::f64::consts::PI.powf(1.5) * erf / r
    }

    #[test]
    fn gaussian_potential_matches_closed_form() {
        let g = gaussian(3);
        let table = NewtonPotential::new(g.clone());
        for r in [0.3, 1.0, 2.5] {
            let exact = gaussian_potential_3d(r);
            assert_relative_eq!(newton_potential(&g, r).unwrap(), exact, max_relative = 1e-9);
            assert_relative_eq!(table.value(r), exact, max_relative = 1e-9);
        }
        assert_relative_eq!(table.value(0.0), 2.0 * std::f64::consts::PI, max_relative = 1e-9);
        assert_relative_eq!(g.mass(), std::f64::consts::PI.powf(1.5), max_relative = 1e-10);
    }

    #[test]
    fn zero_density_has_zero_potential() {
        let g = RadialDensity::zero(4, (0..50).map(|i| i as f64 * 0.1).collect()).unwrap();
        for r in [0.0, 1.0, 10.0] {
            assert_eq!(newton_potential(&g, r).unwrap(), 0.0);
        }
        assert_eq!(psi_beta(&g, 1, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn psi_reduces_to_newton_kernel() {
        for dim in [3, 4, 5] {
            let g = gaussian(dim);
            for r in [0.5, 2.0, 15.0] {
                let a = psi_beta(&g, dim - 2, r).unwrap();
                let b = newton_potential(&g, r).unwrap();
                assert_relative_eq!(a, b, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn narrow_bump_is_point_mass() {
        let grid: Vec<f64> = (0..=400).map(|i| i as f64 * 0.0005).collect();
        let width = 0.02f64;
        let raw = RadialDensity::from_fn(3, grid.clone(), |r| {
            let e = (-(r / width).powi(2)).exp();
            (e, -2.0 * r / (width * width) * e)
        })
        .unwrap();
        let c = 1.0 / raw.mass();
        let bump = RadialDensity::from_fn(3, grid, |r| {
            let e = c * (-(r / width).powi(2)).exp();
            (e, -2.0 * r / (width * width) * e)
        })
        .unwrap();
        for r in [1.0, 3.0] {
            let v = psi_beta(&bump, 2, r).unwrap() * r * r;
            // Second-moment correction ~ width²/r².
            assert!((v - 1.0).abs() < 2.0 * width * width / (r * r), "{v}");
        }
    }

    #[test]
    fn tabulated_and_adaptive_routes_agree_on_ground_state() {
        let p = solve_ground_state(Nonlinearity::power(3.0).unwrap(), 3, &SolverOptions::default()).unwrap();
        let g = RadialDensity::square_of(&p);
        let table = NewtonPotential::new(g.clone());
        for r in [0.0, 0.37, 4.0, 24.99, 50.0] {
            assert_relative_eq!(table.value(r), newton_potential(&g, r).unwrap(), max_relative = 1e-9);
        }
        assert_relative_eq!(table.value(50.0) * 50.0, g.mass(), max_relative = 1e-9);
    }

    #[test]
    fn potential_is_nonincreasing_and_linear() {
        let g = gaussian(4);
        let table = NewtonPotential::new(g.clone());
        let rs: Vec<f64> = (0..200).map(|i| i as f64 * 0.07).collect();
        assert!(rs.windows(2).all(|w| table.value(w[1]) <= table.value(w[0])));
        let two = NewtonPotential::new(g.sum(&g).unwrap());
        for &r in &rs {
            assert_relative_eq!(two.value(r), 2.0 * table.value(r), max_relative = 1e-14);
        }
    }

    #[test]
    fn rescaling_identity() {
        let g = gaussian(3);
        let eps = 0.25;
        let small = NewtonPotential::new(g.rescaled(eps));
        let base = NewtonPotential::new(g);
        for x in [0.1, 0.4, 2.0] {
            assert_relative_eq!(small.value(x), eps * eps * base.value(x / eps), max_relative = 1e-12);
        }
    }

    #[test]
    fn cross_bound_rejects_coincident_peaks() {
        let p = solve_ground_state(Nonlinearity::power(3.0).unwrap(), 3, &SolverOptions::default()).unwrap();
        let phi = NewtonPotential::new(RadialDensity::profile(&p));
        assert!(cross_potential_bound(&p, &phi, 0.0, &[0.0, 0.0, 0.0]).is_err());
        let near = cross_potential_bound(&p, &phi, 10.0, &[5.0, 0.0, 0.0]).unwrap();
        let far = cross_potential_bound(&p, &phi, 20.0, &[10.0, 0.0, 0.0]).unwrap();
        assert!(far < near * (-4.0f64).exp());
    }

    #[test]
    fn density_rejects_negative_values() {
        let grid = vec![0.0, 1.0, 2.0];
        assert!(RadialDensity::from_samples(3, grid, vec![1.0, -0.5, 0.0]).is_err());
    }
}
