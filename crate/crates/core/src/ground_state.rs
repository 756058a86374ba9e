//! Radial ground state of `Δw - w + f(w) = 0` in `ℝᴺ`.
//!
//! The center value `a = w(0)` is found by bisection between trajectories
//! that cross zero (overshoot) and trajectories whose slope turns positive
//! while still positive (undershoot). The outward shot is accurate only up
//! to the radius where the two bracketing trajectories separate; beyond it
//! the profile is continued by integrating the same equation inward from
//! `R_max`, where the decaying solution is the dominant mode, and matching
//! the amplitude to the outward value.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{self, Tolerance};
use crate::quadrature::gl8;
use crate::unit_sphere_area;

/// Version tag written into profile caches.
pub const SOLVER_VERSION: &str = "spcluster-shoot-1";

/// Odd power nonlinearity `f(t) = |t|^{p-1} t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Nonlinearity {
    exponent: f64,
    holder_sigma: f64,
}

impl Nonlinearity {
    pub fn power(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(Error::InvalidInput(format!("power exponent must exceed 1, got {p}")));
        }
        Ok(Self {
            exponent: p,
            holder_sigma: (p - 1.0).min(1.0),
        })
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// Hölder exponent of `f'` near the origin.
    pub fn holder_sigma(&self) -> f64 {
        self.holder_sigma
    }

    #[inline]
    pub fn f(&self, t: f64) -> f64 {
        t.abs().powf(self.exponent - 1.0) * t
    }

    #[inline]
    pub fn df(&self, t: f64) -> f64 {
        self.exponent * t.abs().powf(self.exponent - 1.0)
    }

    /// `F(t) = ∫₀ᵗ f = |t|^{p+1} / (p+1)`.
    #[inline]
    pub fn antiderivative(&self, t: f64) -> f64 {
        t.abs().powf(self.exponent + 1.0) / (self.exponent + 1.0)
    }

    /// Sobolev exponent `(N+2)/(N-2)`.
    pub fn critical_exponent(dimension: usize) -> f64 {
        (dimension as f64 + 2.0) / (dimension as f64 - 2.0)
    }

    pub fn check_admissible(&self, dimension: usize) -> Result<()> {
        if !(3..=6).contains(&dimension) {
            return Err(Error::InvalidInput(format!(
                "dimension must lie in [3, 6], got {dimension}"
            )));
        }
        let critical = Self::critical_exponent(dimension);
        if self.exponent >= critical {
            return Err(Error::Supercritical {
                exponent: self.exponent,
                dimension,
                critical,
            });
        }
        Ok(())
    }
}

/// Shooting and tabulation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub r_max: f64,
    pub grid_step: f64,
    pub shoot_tol: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub scan_lo: f64,
    pub scan_hi: f64,
    pub r_start: f64,
    /// Relative separation of the bracketing shots at which the outward
    /// trajectory stops being trusted.
    pub trust_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            r_max: 25.0,
            grid_step: 0.01,
            shoot_tol: 1e-12,
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            scan_lo: 1.0,
            scan_hi: 20.0,
            r_start: 1e-6,
            trust_tol: 1e-8,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = self.r_max > 0.0
            && self.grid_step > 0.0
            && self.grid_step < self.r_max
            && self.shoot_tol > 0.0
            && self.rel_tol > 0.0
            && self.abs_tol >= 0.0
            && self.scan_lo > 0.0
            && self.scan_hi > self.scan_lo
            && self.r_start > 0.0
            && self.r_start < self.grid_step
            && self.trust_tol > 0.0
            && self.r_max <= 200.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("inconsistent solver options {self:?}")))
        }
    }
}

/// Asymptotic tail `A_N r^{-(N-1)/2} e^{-r}` and where it takes over.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailParams {
    pub amplitude: f64,
    pub switch_radius: f64,
    pub fit_residual: f64,
}

/// Bookkeeping from the shooting run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShootingDiagnostics {
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub bisection_steps: usize,
    pub match_radius: f64,
    /// Relative jump of `w'` where the outward and inward branches meet.
    pub slope_mismatch: f64,
}

/// Anything that behaves like a decaying radial peak profile.
pub trait ProfileShape: Sync {
    fn dimension(&self) -> usize;
    fn value(&self, r: f64) -> f64;
    fn slope(&self, r: f64) -> f64;
}

/// Tabulated radial ground state.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    dimension: usize,
    nonlinearity: Nonlinearity,
    grid: Vec<f64>,
    values: Vec<f64>,
    derivative: Vec<f64>,
    second: Vec<f64>,
    tail: TailParams,
    options: SolverOptions,
    diagnostics: Option<ShootingDiagnostics>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shot {
    Overshoot,
    Undershoot,
    Decayed,
}

struct Trajectory {
    values: Vec<f64>,
    slopes: Vec<f64>,
}

struct Shooter<'a> {
    nl: Nonlinearity,
    dim: f64,
    opts: &'a SolverOptions,
    grid: Vec<f64>,
}

impl Shooter<'_> {
    fn rhs(&self) -> impl Fn(f64, &[f64; 2]) -> [f64; 2] + '_ {
        move |r, y| [y[1], -(self.dim - 1.0) / r * y[1] + y[0] - self.nl.f(y[0])]
    }

    fn tol(&self) -> Tolerance {
        Tolerance {
            rel: self.opts.rel_tol,
            abs: self.opts.abs_tol,
        }
    }

    fn seed(&self, a: f64) -> [f64; 2] {
        let c = a - self.nl.f(a);
        let r = self.opts.r_start;
        [a + c * r * r / (2.0 * self.dim), c * r / self.dim]
    }

    /// Integrates outward node by node; stops at the first event.
    fn shoot(&self, a: f64, mut record: Option<&mut Trajectory>) -> Shot {
        let f = self.rhs();
        let tol = self.tol();
        let mut y = self.seed(a);
        let mut r = self.opts.r_start;
        let mut h = self.opts.grid_step * 0.1;
        if let Some(t) = record.as_deref_mut() {
            t.values.push(a);
            t.slopes.push(0.0);
        }
        for &node in &self.grid[1..] {
            let out = ode::advance(&f, r, y, node, h, tol);
            y = out.y;
            h = out.next_h;
            r = node;
            if y[0] < 0.0 {
                return Shot::Overshoot;
            }
            if y[1] > 0.0 {
                return Shot::Undershoot;
            }
            if let Some(t) = record.as_deref_mut() {
                t.values.push(y[0]);
                t.slopes.push(y[1]);
            }
        }
        if y[0] < 1e-3 * a {
            Shot::Decayed
        } else {
            Shot::Undershoot
        }
    }

    fn trajectory(&self, a: f64) -> Trajectory {
        let mut t = Trajectory {
            values: Vec::with_capacity(self.grid.len()),
            slopes: Vec::with_capacity(self.grid.len()),
        };
        self.shoot(a, Some(&mut t));
        t
    }

    /// Inward integration from `R_max` down to node `stop` with amplitude `c`.
    fn inward(&self, c: f64, stop: usize) -> Trajectory {
        let f = self.rhs();
        let tol = Tolerance {
            rel: self.opts.rel_tol,
            abs: 1e-300,
        };
        let n = self.grid.len();
        let big_r = self.grid[n - 1];
        let k = big_r.powf(-(self.dim - 1.0) / 2.0) * (-big_r).exp();
        let mut y = [c * k, -c * k * (1.0 + (self.dim - 1.0) / (2.0 * big_r))];
        let mut values = vec![0.0; n];
        let mut slopes = vec![0.0; n];
        values[n - 1] = y[0];
        slopes[n - 1] = y[1];
        let mut h = self.opts.grid_step;
        for i in (stop..n - 1).rev() {
            let out = ode::advance(&f, self.grid[i + 1], y, self.grid[i], h, tol);
            y = out.y;
            h = out.next_h;
            values[i] = y[0];
            slopes[i] = y[1];
        }
        Trajectory { values, slopes }
    }
}

/// Solves for the radial ground state and tabulates it on a uniform grid.
pub fn solve_ground_state(
    nl: Nonlinearity,
    dimension: usize,
    opts: &SolverOptions,
) -> Result<RadialProfile> {
    nl.check_admissible(dimension)?;
    opts.validate()?;
    let cells = (opts.r_max / opts.grid_step).round() as usize;
    let grid: Vec<f64> = (0..=cells).map(|i| i as f64 * opts.grid_step).collect();
    let shooter = Shooter {
        nl,
        dim: dimension as f64,
        opts,
        grid,
    };

    let (mut lo, mut hi) = find_bracket(&shooter)?;
    let mut steps = 0;
    while hi - lo > opts.shoot_tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        steps += 1;
        match shooter.shoot(mid, None) {
            Shot::Overshoot => hi = mid,
            Shot::Undershoot => lo = mid,
            Shot::Decayed => {
                lo = mid;
                hi = mid;
            }
        }
    }
    let a = 0.5 * (lo + hi);

    let mid = shooter.trajectory(a);
    let low = shooter.trajectory(lo);
    let high = shooter.trajectory(hi);
    let n = shooter.grid.len();
    let reach = mid.values.len().min(low.values.len()).min(high.values.len());
    let mut trusted = 0;
    for i in 1..reach {
        let gap = (high.values[i] - low.values[i]).abs();
        if gap > opts.trust_tol * mid.values[i] || mid.slopes[i] >= 0.0 {
            break;
        }
        trusted = i;
    }
    if trusted + 1 < n && shooter.grid[trusted] < 2.0 {
        return Err(Error::TailNotResolved(format!(
            "outward shot separates already at r = {:.3}",
            shooter.grid[trusted]
        )));
    }

    let mut values = mid.values[..=trusted].to_vec();
    let mut slopes = mid.slopes[..=trusted].to_vec();
    let mut match_radius = shooter.grid[trusted];
    let mut slope_mismatch = 0.0;
    if trusted + 1 < n {
        let (tail, mismatch) = match_inward(&shooter, trusted, values[trusted], slopes[trusted])?;
        values.extend_from_slice(&tail.values[trusted + 1..]);
        slopes.extend_from_slice(&tail.slopes[trusted + 1..]);
        slope_mismatch = mismatch;
    } else {
        match_radius = opts.r_max;
    }

    let profile = RadialProfile::assemble(
        dimension,
        nl,
        shooter.grid,
        values,
        slopes,
        *opts,
        Some(ShootingDiagnostics {
            bracket_lo: lo,
            bracket_hi: hi,
            bisection_steps: steps,
            match_radius,
            slope_mismatch,
        }),
    )?;
    profile.check_solution_invariants()?;
    Ok(profile)
}

fn find_bracket(shooter: &Shooter<'_>) -> Result<(f64, f64)> {
    let (lo, hi) = (shooter.opts.scan_lo, shooter.opts.scan_hi);
    let mut points = 16;
    while points <= 1024 {
        let ratio = hi / lo;
        let mut previous: Option<(f64, Shot)> = None;
        for j in 0..=points {
            let a = lo * ratio.powf(j as f64 / points as f64);
            if j == 0 && a <= 1.0 {
                // a = 1 is the constant solution; it belongs to neither class.
                previous = Some((a, Shot::Undershoot));
                continue;
            }
            let shot = shooter.shoot(a, None);
            if let Some((pa, ps)) = previous {
                if ps == Shot::Undershoot && shot != Shot::Undershoot {
                    return Ok((pa, a));
                }
            }
            previous = Some((a, shot));
        }
        points *= 4;
    }
    Err(Error::NoBracket { lo, hi })
}

/// Finds the inward amplitude whose value meets the outward shot at node
/// `node`; returns the inward branch and the relative slope mismatch.
fn match_inward(
    shooter: &Shooter<'_>,
    node: usize,
    w_out: f64,
    dw_out: f64,
) -> Result<(Trajectory, f64)> {
    let n = shooter.grid.len();
    let big_r = shooter.grid[n - 1];
    let r_m = shooter.grid[node];
    let d = shooter.dim;
    // Linear decay profile ratio gives the starting guess.
    let guess = w_out / (r_m.powf(-(d - 1.0) / 2.0) * (-r_m).exp())
        * (big_r / r_m).powf(0.0);
    let residual = |log_c: f64| {
        let t = shooter.inward(log_c.exp(), node);
        (t.values[node].ln() - w_out.ln(), t)
    };
    let mut x0 = guess.ln();
    let (mut g0, _) = residual(x0);
    let mut x1 = x0 - g0;
    for _ in 0..60 {
        let (g1, t1) = residual(x1);
        if g1.abs() < 1e-14 || (g1 - g0) == 0.0 {
            let mismatch = ((t1.slopes[node] - dw_out) / dw_out).abs();
            return Ok((t1, mismatch));
        }
        let x2 = x1 - g1 * (x1 - x0) / (g1 - g0);
        x0 = x1;
        g0 = g1;
        x1 = x2;
    }
    Err(Error::TailNotResolved(
        "inward tail amplitude matching did not converge".into(),
    ))
}

/// Fits `A_N` on the decayed part of a sampled profile.
fn fit_tail_samples(dimension: usize, grid: &[f64], values: &[f64]) -> Result<TailParams> {
    let half = (dimension as f64 - 1.0) / 2.0;
    let start = grid
        .iter()
        .zip(values)
        .position(|(&r, &w)| r > 0.0 && w < 1e-4)
        .ok_or_else(|| {
            Error::TailNotResolved(format!(
                "profile never decays below 1e-4 before r = {}",
                grid.last().copied().unwrap_or(0.0)
            ))
        })?;
    let q: Vec<f64> = grid[start..]
        .iter()
        .zip(&values[start..])
        .map(|(&r, &w)| w * r.powf(half) * r.exp())
        .collect();
    if q.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::TailNotResolved(
            "non-positive values in the decayed region".into(),
        ));
    }
    let mut qmax = q[q.len() - 1];
    let mut qmin = qmax;
    let mut first = None;
    for j in (0..q.len()).rev() {
        qmax = qmax.max(q[j]);
        qmin = qmin.min(q[j]);
        if qmax / qmin < 1.01 {
            first = Some(j);
        } else {
            break;
        }
    }
    let j = match first {
        Some(j) if q.len() - j >= 8 => j,
        _ => {
            return Err(Error::TailNotResolved(
                "no window where r^{(N-1)/2} e^r w varies by less than 1%".into(),
            ))
        }
    };
    let window = &q[j..];
    let amplitude = window.iter().sum::<f64>() / window.len() as f64;
    let fit_residual = window
        .iter()
        .map(|v| (v / amplitude - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(TailParams {
        amplitude,
        switch_radius: grid[start + j],
        fit_residual,
    })
}

/// `√(2r/π) eʳ K_ν(r)` from its asymptotic series; exact for half-integer `ν`.
pub fn bessel_k_envelope(nu: f64, r: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..40 {
        let odd = (2 * k - 1) as f64;
        let next = term * (mu - odd * odd) / (k as f64 * 8.0 * r);
        if next == 0.0 {
            break;
        }
        if next.abs() >= term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// Refits the exponential tail of a profile from its grid data.
pub fn fit_tail(profile: &RadialProfile) -> Result<TailParams> {
    fit_tail_samples(profile.dimension, &profile.grid, &profile.values)
}

/// Relative errors of the Nehari and Pohozaev identities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResiduals {
    pub nehari: f64,
    pub pohozaev: f64,
}

/// Evaluates both solitary-wave identities by radial quadrature.
pub fn identity_residuals(profile: &RadialProfile) -> IdentityResiduals {
    let n = profile.dimension as f64;
    let nl = profile.nonlinearity;
    let grad = profile.radial_integral(|_, _, dw, _| dw * dw);
    let mass = profile.radial_integral(|_, w, _, _| w * w);
    let fw = profile.radial_integral(|_, w, _, _| nl.f(w) * w);
    let big_f = profile.radial_integral(|_, w, _, _| nl.antiderivative(w));
    let nehari_lhs = grad + mass;
    let poho_lhs = 0.5 * (n - 2.0) * grad + 0.5 * n * mass;
    let poho_rhs = n * big_f;
    IdentityResiduals {
        nehari: relative_gap(nehari_lhs, fw),
        pohozaev: relative_gap(poho_lhs, poho_rhs),
    }
}

fn relative_gap(lhs: f64, rhs: f64) -> f64 {
    let scale = lhs.abs().max(rhs.abs());
    if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    }
}

/// `I[w] = ½∫(|∇w|² + w²) - ∫F(w)`.
pub fn energy_i(profile: &RadialProfile) -> f64 {
    let nl = profile.nonlinearity;
    profile.radial_integral(|_, w, dw, _| 0.5 * (dw * dw + w * w) - nl.antiderivative(w))
}

impl RadialProfile {
    /// Builds a profile from samples; the tail is fitted from the samples and
    /// `w''` is reconstructed by central differences of `w'`.
    pub fn from_samples(
        dimension: usize,
        nonlinearity: Nonlinearity,
        grid: Vec<f64>,
        values: Vec<f64>,
        derivative: Vec<f64>,
    ) -> Result<Self> {
        if grid.len() < 3 || grid.len() != values.len() || grid.len() != derivative.len() {
            return Err(Error::InvalidInput("grid, values and derivative must align".into()));
        }
        if grid[0] < 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput("grid must be nonnegative and strictly increasing".into()));
        }
        let second = finite_difference(&grid, &derivative);
        let tail = fit_tail_samples(dimension, &grid, &values)?;
        Ok(Self {
            dimension,
            nonlinearity,
            grid,
            values,
            derivative,
            second,
            tail,
            options: SolverOptions::default(),
            diagnostics: None,
        })
    }

    fn assemble(
        dimension: usize,
        nonlinearity: Nonlinearity,
        grid: Vec<f64>,
        values: Vec<f64>,
        derivative: Vec<f64>,
        options: SolverOptions,
        diagnostics: Option<ShootingDiagnostics>,
    ) -> Result<Self> {
        let tail = fit_tail_samples(dimension, &grid, &values)?;
        let second = ode_second_derivative(dimension, nonlinearity, &grid, &values, &derivative);
        Ok(Self {
            dimension,
            nonlinearity,
            grid,
            values,
            derivative,
            second,
            tail,
            options,
            diagnostics,
        })
    }

    fn check_solution_invariants(&self) -> Result<()> {
        if let Some(i) = self.values.windows(2).position(|w| w[1] >= w[0]) {
            return Err(Error::TailNotResolved(format!(
                "profile not strictly decreasing near r = {}",
                self.grid[i]
            )));
        }
        let last = *self.values.last().unwrap_or(&0.0);
        if !(last > 0.0 && last < 1e-10) {
            return Err(Error::TailNotResolved(format!(
                "w(R_max) = {last:e} is not below 1e-10; increase r_max"
            )));
        }
        if self.tail.fit_residual > 1e-2 {
            return Err(Error::TailNotResolved(format!(
                "tail fit residual {} exceeds 1%",
                self.tail.fit_residual
            )));
        }
        Ok(())
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nonlinearity(&self) -> Nonlinearity {
        self.nonlinearity
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn derivative(&self) -> &[f64] {
        &self.derivative
    }

    /// `w''` at the grid nodes.
    pub fn second_derivative(&self) -> &[f64] {
        &self.second
    }

    pub fn center_value(&self) -> f64 {
        self.values[0]
    }

    pub fn tail(&self) -> TailParams {
        self.tail
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    pub fn diagnostics(&self) -> Option<&ShootingDiagnostics> {
        self.diagnostics.as_ref()
    }

    pub fn r_max(&self) -> f64 {
        *self.grid.last().expect("non-empty grid")
    }

    /// Same profile with values and slopes multiplied by `c` (no longer a solution).
    pub fn scaled(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out.derivative.iter_mut().for_each(|v| *v *= c);
        out.second.iter_mut().for_each(|v| *v *= c);
        out.tail.amplitude *= c;
        out
    }

    /// Limit of `w r^{(N-1)/2} eʳ` as `r → ∞`.
    ///
    /// The plain fit in [`TailParams::amplitude`] carries the `O(1/r)` drift
    /// of `K_{(N-2)/2}` for even `N`; here that factor is divided out over the
    /// fit window before averaging. For `N = 3` both coincide.
    pub fn limit_amplitude(&self) -> f64 {
        let n = self.dimension as f64;
        let nu = 0.5 * (n - 2.0);
        let half = 0.5 * (n - 1.0);
        let (sum, count) = self
            .grid
            .iter()
            .zip(&self.values)
            .filter(|(&r, _)| r >= self.tail.switch_radius)
            .fold((0.0, 0usize), |(s, c), (&r, &w)| {
                (s + w * r.powf(half) * r.exp() / bessel_k_envelope(nu, r), c + 1)
            });
        sum / count as f64
    }

    /// Asymptotic tail value `A_N r^{-(N-1)/2} e^{-r}`.
    pub fn tail_value(&self, r: f64) -> f64 {
        self.tail.amplitude * r.powf(-(self.dimension as f64 - 1.0) / 2.0) * (-r).exp()
    }

    fn locate(&self, r: f64) -> (usize, f64, f64) {
        let n = self.grid.len();
        let i = self.grid.partition_point(|&g| g <= r).saturating_sub(1).min(n - 2);
        let h = self.grid[i + 1] - self.grid[i];
        (i, (r - self.grid[i]) / h, h)
    }

    /// Monotone cubic Hermite value inside cell `i`.
    fn cell_value(&self, i: usize, t: f64, h: f64) -> f64 {
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (mut m0, mut m1) = (self.derivative[i] * h, self.derivative[i + 1] * h);
        let delta = y1 - y0;
        if delta == 0.0 {
            m0 = 0.0;
            m1 = 0.0;
        } else {
            let (a, b) = (m0 / delta, m1 / delta);
            if a < 0.0 || b < 0.0 {
                m0 = if a < 0.0 { 0.0 } else { m0 };
                m1 = if b < 0.0 { 0.0 } else { m1 };
            }
            let s = a * a + b * b;
            if s > 9.0 {
                let tau = 3.0 / s.sqrt();
                m0 *= tau;
                m1 *= tau;
            }
        }
        hermite(y0, y1, m0, m1, t)
    }

    /// Cubic Hermite of `w'` using `w''` slopes.
    fn cell_slope(&self, i: usize, t: f64, h: f64) -> f64 {
        hermite(
            self.derivative[i],
            self.derivative[i + 1],
            self.second[i] * h,
            self.second[i + 1] * h,
            t,
        )
    }

    fn cell_second(&self, i: usize, t: f64, h: f64) -> f64 {
        hermite_derivative(
            self.derivative[i],
            self.derivative[i + 1],
            self.second[i] * h,
            self.second[i + 1] * h,
            t,
        ) / h
    }

    /// `w(r)`: interpolated up to the switch radius, asymptotic tail beyond.
    pub fn evaluate_w(&self, r: f64) -> f64 {
        if r > self.tail.switch_radius {
            return self.tail_value(r);
        }
        if r <= self.grid[0] {
            return self.values[0];
        }
        let (i, t, h) = self.locate(r);
        if t == 0.0 {
            return self.values[i];
        }
        self.cell_value(i, t, h)
    }

    /// `w'(r)`, with the same switch as [`Self::evaluate_w`].
    pub fn evaluate_dw(&self, r: f64) -> f64 {
        if r > self.tail.switch_radius {
            let n = self.dimension as f64;
            return -self.tail_value(r) * (1.0 + (n - 1.0) / (2.0 * r));
        }
        if r <= self.grid[0] {
            return self.derivative[0];
        }
        let (i, t, h) = self.locate(r);
        self.cell_slope(i, t, h)
    }

    /// `w''(r)`, nodal values on the grid and the tail's second derivative beyond.
    pub fn evaluate_d2w(&self, r: f64) -> f64 {
        if r > self.tail.switch_radius {
            let n = self.dimension as f64;
            let k = (n - 1.0) / 2.0;
            let g = 1.0 + k / r;
            return self.tail_value(r) * (g * g + k / (r * r));
        }
        if r <= self.grid[0] {
            return self.second[0];
        }
        let (i, t, h) = self.locate(r);
        if t == 0.0 {
            return self.second[i];
        }
        self.cell_second(i, t, h)
    }

    /// `∫_{r_0}^{R_max} g(r, w, w', w'') a_N r^{N-1} dr` by cell-wise Gauss–Legendre.
    pub fn radial_integral<F>(&self, mut g: F) -> f64
    where
        F: FnMut(f64, f64, f64, f64) -> f64,
    {
        let rule = gl8();
        let n = self.dimension as i32;
        let mut total = 0.0;
        for i in 0..self.grid.len() - 1 {
            let (a, b) = (self.grid[i], self.grid[i + 1]);
            let h = b - a;
            for (r, w) in rule.mapped(a, b) {
                let t = (r - a) / h;
                let wv = self.cell_value(i, t, h);
                let dw = self.cell_slope(i, t, h);
                let d2 = self.cell_second(i, t, h);
                total += w * g(r, wv, dw, d2) * r.powi(n - 1);
            }
        }
        total * unit_sphere_area(self.dimension)
    }

    /// Serializable cache record.
    pub fn to_cache(&self) -> ProfileCache {
        ProfileCache {
            dimension: self.dimension,
            exponent: self.nonlinearity.exponent,
            center_value: self.values[0],
            grid: self.grid.clone(),
            values: self.values.clone(),
            derivative: self.derivative.clone(),
            tail: self.tail,
            solver: SolverRecord {
                tolerances: self.options,
                version: SOLVER_VERSION.to_string(),
                diagnostics: self.diagnostics,
            },
            constants: None,
        }
    }

    pub fn from_cache(cache: &ProfileCache) -> Result<Self> {
        if cache.solver.version != SOLVER_VERSION {
            return Err(Error::Cache(format!(
                "cache written by solver '{}', expected '{SOLVER_VERSION}'",
                cache.solver.version
            )));
        }
        let nl = Nonlinearity::power(cache.exponent)?;
        nl.check_admissible(cache.dimension)?;
        let n = cache.grid.len();
        if n < 3 || cache.values.len() != n || cache.derivative.len() != n {
            return Err(Error::Cache("grid, values and derivative lengths differ".into()));
        }
        let second = ode_second_derivative(cache.dimension, nl, &cache.grid, &cache.values, &cache.derivative);
        Ok(Self {
            dimension: cache.dimension,
            nonlinearity: nl,
            grid: cache.grid.clone(),
            values: cache.values.clone(),
            derivative: cache.derivative.clone(),
            second,
            tail: cache.tail,
            options: cache.solver.tolerances,
            diagnostics: cache.solver.diagnostics,
        })
    }
}

impl ProfileShape for RadialProfile {
    fn dimension(&self) -> usize {
        self.dimension
    }

    fn value(&self, r: f64) -> f64 {
        self.evaluate_w(r)
    }

    fn slope(&self, r: f64) -> f64 {
        self.evaluate_dw(r)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverRecord {
    pub tolerances: SolverOptions,
    pub version: String,
    #[serde(default)]
    pub diagnostics: Option<ShootingDiagnostics>,
}

/// On-disk profile cache. `constants` is filled in by the constants stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCache {
    pub dimension: usize,
    pub exponent: f64,
    pub center_value: f64,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub derivative: Vec<f64>,
    pub tail: TailParams,
    pub solver: SolverRecord,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<crate::interaction_constants::InteractionConstants>,
}

impl ProfileCache {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("cache serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Cache(e.to_string()))
    }
}

fn ode_second_derivative(
    dimension: usize,
    nl: Nonlinearity,
    grid: &[f64],
    values: &[f64],
    derivative: &[f64],
) -> Vec<f64> {
    let n = dimension as f64;
    grid.iter()
        .zip(values.iter().zip(derivative))
        .map(|(&r, (&w, &dw))| {
            if r == 0.0 {
                (w - nl.f(w)) / n
            } else {
                -(n - 1.0) / r * dw + w - nl.f(w)
            }
        })
        .collect()
}

fn finite_difference(grid: &[f64], y: &[f64]) -> Vec<f64> {
    let n = grid.len();
    (0..n)
        .map(|i| {
            let (a, b) = if i == 0 {
                (0, 1)
            } else if i == n - 1 {
                (n - 2, n - 1)
            } else {
                (i - 1, i + 1)
            };
            (y[b] - y[a]) / (grid[b] - grid[a])
        })
        .collect()
}

#[inline]
fn hermite(y0: f64, y1: f64, m0: f64, m1: f64, t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * m0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * m1
}

#[inline]
fn hermite_derivative(y0: f64, y1: f64, m0: f64, m1: f64, t: f64) -> f64 {
    let t2 = t * t;
    (6.0 * t2 - 6.0 * t) * y0 + (3.0 * t2 - 4.0 * t + 1.0) * m0 + (-6.0 * t2 + 6.0 * t) * y1
        + (3.0 * t2 - 2.0 * t) * m1
}
