//! Leading-order reduced functional and its one-radius maximization.
//!
//! ```text
//! M_ε(r) = -γ₀ Σ_{i≠j} λ_i λ_j w(r|B_i-B_j|/ε) + ε² C₂ Σ_{i≠j} (r|B_i-B_j|/ε)^{2-N}
//! α_{ε,C}(ρ) = -γ₀ w(ρ) + C ε² ρ^{2-N}
//! ```

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ground_state::ProfileShape;
use crate::interaction_constants::{InteractionConstants, ReductionParameters};
use crate::log_inv_eps2;
use crate::parallel::Execution;
use crate::peak_configurations::{nested_multiplicity, Family, PeakConfiguration};

/// Points of the uniqueness scan for `α`.
pub const ALPHA_SCAN_POINTS: usize = 10_000;
/// Points of the bracketing scan over `R_ε`.
pub const M_SCAN_POINTS: usize = 2048;
/// Relative bracket width at which golden-section search stops.
pub const GOLDEN_REL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReducedEvaluation {
    pub value: f64,
    /// `γ₀ Σ w` over opposite-sign pairs.
    pub attraction: f64,
    /// `γ₀ Σ w` over same-sign pairs.
    pub repulsion: f64,
    pub coulomb: f64,
    /// Size `ε^{2τ}` of the neglected remainder.
    pub remainder_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaximizerResult {
    pub argmax: f64,
    pub value: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    /// `r_ε · gap / (ε log(1/ε²))` (for `α`, `ρ_ε / log(1/ε²)`).
    pub normalized: f64,
}

/// `(multiplicity, coefficient, gap)` with `M ≈ multiplicity · α_{ε,coefficient}(r·gap/ε)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LeadingReduction {
    pub multiplicity: f64,
    pub coefficient: f64,
    pub gap: f64,
}

/// Profile plus the two constants the leading-order functional needs.
#[derive(Clone, Copy)]
pub struct ReducedModel<'a> {
    profile: &'a dyn ProfileShape,
    gamma0: f64,
    c2: f64,
    params: ReductionParameters,
}

impl std::fmt::Debug for ReducedModel<'_> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReducedModel")
            .field("dimension", &self.profile.dimension())
            .field("gamma0", &self.gamma0)
            .field("c2", &self.c2)
            .field("params", &self.params)
            .finish()
    }
}

impl<'a> ReducedModel<'a> {
    pub fn new(
        profile: &'a dyn ProfileShape,
        constants: &InteractionConstants,
        params: ReductionParameters,
    ) -> Self {
        Self::with_constants(profile, constants.gamma0, constants.c2, params)
    }

    pub fn with_constants(
        profile: &'a dyn ProfileShape,
        gamma0: f64,
        c2: f64,
        params: ReductionParameters,
    ) -> Self {
        Self {
            profile,
            gamma0,
            c2,
            params,
        }
    }

    pub fn dimension(&self) -> usize {
        self.profile.dimension()
    }

    pub fn gamma0(&self) -> f64 {
        self.gamma0
    }

    pub fn c2(&self) -> f64 {
        self.c2
    }

    pub fn params(&self) -> &ReductionParameters {
        &self.params
    }

    fn coulomb_power(&self) -> i32 {
        2 - self.dimension() as i32
    }

    /// `α_{ε,C}(ρ)` without the domain check.
    pub fn alpha_unchecked(&self, rho: f64, eps: f64, c: f64) -> f64 {
        -self.gamma0 * self.profile.value(rho) + c * eps * eps * rho.powi(self.coulomb_power())
    }

    /// `α_{ε,C}(ρ)` on its domain `ρ ≥ β² log(1/ε²)`.
    pub fn alpha(&self, rho: f64, eps: f64, c: f64) -> Result<f64> {
        check_eps(eps)?;
        let lower = self.alpha_lower(eps);
        if !(rho >= lower) {
            return Err(Error::DomainViolation {
                value: rho,
                reason: format!("ρ below β² log(1/ε²) = {lower}"),
            });
        }
        if !(c >= 0.0) {
            return Err(Error::InvalidInput(format!("C must be nonnegative, got {c}")));
        }
        Ok(self.alpha_unchecked(rho, eps, c))
    }

    fn alpha_lower(&self, eps: f64) -> f64 {
        self.params.beta * self.params.beta * log_inv_eps2(eps)
    }

    /// Unique interior maximum of `α_{ε,C}` on `[β² L, L²]`, `L = log(1/ε²)`.
    pub fn maximize_alpha(&self, eps: f64, c: f64) -> Result<MaximizerResult> {
        check_eps(eps)?;
        let l = log_inv_eps2(eps);
        let (lo, hi) = (self.alpha_lower(eps), l * l);
        if !(lo < hi) {
            return Err(Error::NoInteriorMax(format!("empty domain [{lo}, {hi}] at ε = {eps}")));
        }
        let f = |rho: f64| self.alpha_unchecked(rho, eps, c);
        let grid = log_grid(lo, hi, ALPHA_SCAN_POINTS);
        let values: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
        let slopes: Vec<f64> = values.windows(2).map(|w| w[1] - w[0]).collect();
        let changes: Vec<usize> = slopes
            .windows(2)
            .enumerate()
            .filter(|(_, s)| s[0] > 0.0 && s[1] <= 0.0)
            .map(|(i, _)| i + 1)
            .collect();
        let rises = slopes.windows(2).filter(|s| s[0] <= 0.0 && s[1] > 0.0).count();
        if changes.len() != 1 || rises != 0 {
            return Err(Error::NoInteriorMax(format!(
                "discrete slope of α changes sign {} times (+→-) and {rises} times (-→+) on [{lo:.6}, {hi:.6}] at ε = {eps}",
                changes.len()
            )));
        }
        let i = changes[0];
        let (x, v, iterations) = golden_section(f, grid[i - 1], grid[i + 1]);
        Ok(MaximizerResult {
            argmax: x,
            value: v,
            bracket: (lo, hi),
            iterations,
            normalized: x / l,
        })
    }

    /// Leading-order `M_ε` at radius `r`, summed over the full spectrum.
    pub fn reduced_m(&self, cfg: &PeakConfiguration, r: f64, eps: f64) -> ReducedEvaluation {
        let power = self.coulomb_power();
        let scale = r / eps;
        let mut attraction = 0.0;
        let mut repulsion = 0.0;
        let mut coulomb = 0.0;
        for e in &cfg.spectrum().entries {
            let rho = e.multiplier * scale;
            let w = self.profile.value(rho);
            attraction += e.opposite_sign as f64 * w;
            repulsion += e.same_sign as f64 * w;
            coulomb += e.count() as f64 * rho.powi(power);
        }
        let attraction = self.gamma0 * attraction;
        let repulsion = self.gamma0 * repulsion;
        let coulomb = eps * eps * self.c2 * coulomb;
        ReducedEvaluation {
            value: attraction - repulsion + coulomb,
            attraction,
            repulsion,
            coulomb,
            remainder_scale: eps.powf(2.0 * self.params.tau),
        }
    }

    /// The family's one-variable reduction.
    pub fn leading_reduction(&self, cfg: &PeakConfiguration) -> Result<LeadingReduction> {
        let gap = cfg.dominant_gap();
        let multiplicity = match cfg.family() {
            Family::Polygon { k } => 2 * k,
            Family::Polytope { h: _, q, .. } => {
                let k = cfg.len() - 1;
                if crate::peak_configurations::gap_below_one(gap) {
                    q * k
                } else {
                    (q - 2) * k
                }
            }
            Family::Nested { k, m } => nested_multiplicity(*k, *m),
            Family::Rings { q, m1, m2 } => 2 * (q * m1 + q * m2) - 4 * q,
            Family::Raw => return Err(Error::UnknownFamily),
        } as f64;
        let power = self.coulomb_power();
        let sum: f64 = cfg
            .spectrum()
            .entries
            .iter()
            .map(|e| e.count() as f64 * e.multiplier.powi(power))
            .sum();
        Ok(LeadingReduction {
            multiplicity,
            coefficient: self.c2 * gap.powi(-power) * sum / multiplicity,
            gap,
        })
    }

    /// Interior maximizer of `M_ε` over `R_ε`.
    pub fn maximize_m(&self, cfg: &PeakConfiguration, eps: f64) -> Result<MaximizerResult> {
        let (lo, hi) = cfg.admissible_range(eps)?;
        let res = maximize_scanned(|r| self.reduced_m(cfg, r, eps).value, lo, hi, eps)?;
        Ok(MaximizerResult {
            normalized: res.argmax * cfg.dominant_gap() / (eps * log_inv_eps2(eps)),
            ..res
        })
    }

    /// One row per `ε`, evaluated with `execution`; failures are recorded per row.
    pub fn sweep(
        &self,
        cfg: &PeakConfiguration,
        eps_list: &[f64],
        execution: Execution,
    ) -> Result<Vec<SweepRow>> {
        if eps_list.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::InvalidInput("ε list must be strictly decreasing".into()));
        }
        let lead = self.leading_reduction(cfg).ok();
        Ok(execution.map(eps_list, |&eps| self.sweep_row(cfg, eps, lead)))
    }

    fn sweep_row(&self, cfg: &PeakConfiguration, eps: f64, lead: Option<LeadingReduction>) -> SweepRow {
        match self.maximize_m(cfg, eps) {
            Ok(m) => {
                let alpha_pred = lead.map(|l| {
                    l.multiplicity * self.alpha_unchecked(m.argmax * l.gap / eps, eps, l.coefficient)
                });
                SweepRow {
                    eps,
                    r_eps: Some(m.argmax),
                    normalized: Some(m.normalized),
                    m_value: Some(m.value),
                    alpha_pred,
                    status: "ok".into(),
                }
            }
            Err(e) => SweepRow {
                eps,
                r_eps: None,
                normalized: None,
                m_value: None,
                alpha_pred: None,
                status: e.tag().into(),
            },
        }
    }
}

/// One line of an ε-sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub eps: f64,
    pub r_eps: Option<f64>,
    pub normalized: Option<f64>,
    pub m_value: Option<f64>,
    /// `multiplicity · α_{ε,C}(r_ε gap / ε)`, the one-variable prediction of `M`.
    pub alpha_pred: Option<f64>,
    pub status: String,
}

pub const SWEEP_HEADER: &str = "eps,r_eps,normalized,M_value,alpha_pred,status";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let cell = |v: Option<f64>| v.map(crate::fmt_sig).unwrap_or_default();
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            crate::fmt_sig(r.eps),
            cell(r.r_eps),
            cell(r.normalized),
            cell(r.m_value),
            cell(r.alpha_pred),
            r.status
        ));
    }
    out
}

/// `count` geometric values from `start` to `end` inclusive.
pub fn geometric_list(start: f64, end: f64, count: usize) -> Result<Vec<f64>> {
    if !(start > 0.0 && end > 0.0) || count == 0 {
        return Err(Error::InvalidInput(format!(
            "geometric range needs positive endpoints and count ≥ 1, got {start}:{end}:{count}"
        )));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let ratio = (end / start).ln() / (count - 1) as f64;
    Ok((0..count)
        .map(|i| if i == count - 1 { end } else { start * (ratio * i as f64).exp() })
        .collect())
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps < 1.0 {
        Ok(())
    } else {
        Err(Error::DomainViolation {
            value: eps,
            reason: "ε must lie in (0, 1)".into(),
        })
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let ratio = (hi / lo).ln() / (n - 1) as f64;
    (0..n)
        .map(|i| match i {
            0 => lo,
            _ if i == n - 1 => hi,
            _ => lo * (ratio * i as f64).exp(),
        })
        .collect()
}

/// Log-uniform scan of `[lo, hi]` followed by golden-section refinement.
/// The first scan maximum wins ties; a maximum on either endpoint is
/// reported as [`Error::BoundaryMax`].
pub fn maximize_scanned<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, eps: f64) -> Result<MaximizerResult> {
    let grid = log_grid(lo, hi, M_SCAN_POINTS);
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for (i, &x) in grid.iter().enumerate() {
        let v = f(x);
        if v > best_v {
            best = i;
            best_v = v;
        }
    }
    if best == 0 || best == grid.len() - 1 {
        return Err(Error::BoundaryMax { r: grid[best], eps });
    }
    let (x, v, iterations) = golden_section(&f, grid[best - 1], grid[best + 1]);
    Ok(MaximizerResult {
        argmax: x,
        value: v,
        bracket: (lo, hi),
        iterations,
        normalized: f64::NAN,
    })
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64, usize) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    let mut iterations = 0;
    while b - a > GOLDEN_REL_TOL * 0.5 * (a + b) && iterations < 200 {
        iterations += 1;
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x), iterations)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ground_state::{solve_ground_state, Nonlinearity, RadialProfile, SolverOptions};
    use approx::assert_relative_eq;
    use std::sync::OnceLock;

    fn setup() -> &'static (RadialProfile, InteractionConstants) {
        static S: OnceLock<(RadialProfile, InteractionConstants)> = OnceLock::new();
        S.get_or_init(|| {
            let p = solve_ground_state(Nonlinearity::power(3.0).unwrap(), 3, &SolverOptions::default()).unwrap();
            let c = InteractionConstants::compute(&p).unwrap();
            (p, c)
        })
    }

    fn model() -> ReducedModel<'static> {
        let (p, c) = setup();
        ReducedModel::new(p, c, ReductionParameters::for_nonlinearity(&p.nonlinearity()))
    }

    struct PureExp;

    impl ProfileShape for PureExp {
        fn dimension(&self) -> usize {
            3
        }
        fn value(&self, r: f64) -> f64 {
            (-r).exp()
        }
        fn slope(&self, r: f64) -> f64 {
            -(-r).exp()
        }
    }

    #[test]
    fn alpha_limits_and_domain() {
        let m = model();
        let c2 = m.c2();
        assert!(m.alpha(4000.0, 1e-3, c2).unwrap() > 0.0);
        assert!(m.alpha(1e6, 1e-3, c2).unwrap() < 1e-8);
        let lower = 0.95f64.powi(2) * log_inv_eps2(1e-3);
        for rho in [lower, 20.0, 40.0] {
            assert!(m.alpha(rho, 1e-3, 0.0).unwrap() < 0.0);
        }
        assert!(matches!(m.alpha(lower * 0.99, 1e-3, c2), Err(Error::DomainViolation { .. })));
    }

    #[test]
    fn pure_exponential_stationarity() {
        let p = PureExp;
        let params = ReductionParameters::new(0.95, 0.5, 0.5).unwrap();
        let m = ReducedModel::with_constants(&p, 2.0, 5.0, params);
        for eps in [1e-4, 1e-6] {
            let res = m.maximize_alpha(eps, 5.0).unwrap();
            let rho = res.argmax;
            // γ₀ e^{-ρ} = C ε² (N-2) ρ^{-(N-1)}
            let lhs = 2.0 * (-rho).exp();
            let rhs = 5.0 * eps * eps / (rho * rho);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-6);
        }
    }

    #[test]
    fn two_peak_closed_form() {
        let m = model();
        let (p, c) = setup();
        let d = 1.7;
        let cfg = PeakConfiguration::raw(vec![vec![0.0, 0.0, 0.0], vec![d, 0.0, 0.0]], vec![1, 1]).unwrap();
        let (r, eps) = (0.01, 1e-3);
        let rho = d * r / eps;
        let ev = m.reduced_m(&cfg, r, eps);
        let hand = -2.0 * c.gamma0 * p.evaluate_w(rho) + 2.0 * eps * eps * c.c2 / rho;
        assert_relative_eq!(ev.value, hand, max_relative = 1e-14);
        assert_eq!(ev.attraction, 0.0);
        assert_relative_eq!(ev.value, ev.attraction - ev.repulsion + ev.coulomb, max_relative = 1e-15);
    }

    #[test]
    fn sign_flip_and_scaling() {
        let m = model();
        let cfg = PeakConfiguration::polygon(7, 3).unwrap();
        let (r, eps) = (0.03, 1e-3);
        let a = m.reduced_m(&cfg, r, eps);
        let b = m.reduced_m(&cfg.negated(), r, eps);
        assert_eq!(a, b);
        let c = 0.5;
        let s = m.reduced_m(&cfg, c * r, c * eps);
        assert_eq!(s.attraction, a.attraction);
        assert_eq!(s.repulsion, a.repulsion);
        assert_relative_eq!(s.coulomb, c * c * a.coulomb, max_relative = 1e-14);
    }

    #[test]
    fn polygon_matches_one_variable_reduction() {
        let m = model();
        let cfg = PeakConfiguration::polygon(7, 3).unwrap();
        let eps = 1e-3;
        let (lo, hi) = cfg.admissible_range(eps).unwrap();
        let r = 0.5 * (lo + hi);
        let lead = m.leading_reduction(&cfg).unwrap();
        assert_eq!(lead.multiplicity, 14.0);
        let beta = cfg.dominant_gap();
        let chords: f64 = (3..=6)
            .map(|i| {
                let chord = (2.0 - 2.0 * (2.0 * std::f64::consts::PI * (i - 1) as f64 / 7.0).cos()).sqrt();
                beta / chord
            })
            .sum();
        let ck = m.c2() * (1.0 + beta + 0.5 * chords);
        assert_relative_eq!(lead.coefficient, ck, max_relative = 1e-12);
        let ratio = m.reduced_m(&cfg, r, eps).value / (14.0 * m.alpha_unchecked(r * beta / eps, eps, ck));
        assert!((0.8..=1.2).contains(&ratio), "ratio {ratio}");
        assert!(m.reduced_m(&cfg, hi, eps).value > 0.0);
    }

    #[test]
    fn leading_reductions_of_families() {
        let (p, c) = setup();
        let params = ReductionParameters::for_nonlinearity(&p.nonlinearity());
        let m = ReducedModel::new(p, c, params);
        let cube = PeakConfiguration::polytope(crate::PolytopeKind::Hypercube, 4, 4).unwrap();
        let lead = m.leading_reduction(&cube).unwrap();
        assert_eq!(lead.multiplicity, 32.0);
        let rings = PeakConfiguration::rings(3, 2, 3, 3).unwrap();
        let lead = m.leading_reduction(&rings).unwrap();
        assert_eq!((lead.multiplicity, lead.gap), (18.0, rings.dominant_gap()));
        let raw = PeakConfiguration::raw(vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]], vec![1, -1]).unwrap();
        assert!(matches!(m.leading_reduction(&raw), Err(Error::UnknownFamily)));
    }

    #[test]
    fn argmax_invariant_under_positive_scaling() {
        let m = model();
        let cfg = PeakConfiguration::polygon(7, 3).unwrap();
        let eps = 1e-5;
        let (lo, hi) = cfg.admissible_range(eps).unwrap();
        let base = maximize_scanned(|r| m.reduced_m(&cfg, r, eps).value, lo, hi, eps).unwrap();
        let scaled = maximize_scanned(|r| 3.7 * m.reduced_m(&cfg, r, eps).value, lo, hi, eps).unwrap();
        assert_relative_eq!(base.argmax, scaled.argmax, max_relative = 1e-7);
    }

    #[test]
    fn sweep_isolates_failures() {
        let m = model();
        let cfg = PeakConfiguration::polygon(7, 3).unwrap();
        assert!(m.sweep(&cfg, &[], Execution::Sequential).unwrap().is_empty());
        let rows = m.sweep(&cfg, &[0.5, 1e-3, 1e-4], Execution::Parallel).unwrap();
        assert_eq!(rows[0].status, "EmptyRange");
        assert_eq!(rows[1].status, "ok");
        assert_eq!(rows[2].status, "ok");
        let seq = m.sweep(&cfg, &[0.5, 1e-3, 1e-4], Execution::Sequential).unwrap();
        assert_eq!(rows, seq);
        assert!(m.sweep(&cfg, &[1e-4, 1e-3], Execution::Sequential).is_err());
        let csv = sweep_csv(&rows);
        assert!(csv.starts_with(SWEEP_HEADER));
        assert!(csv.lines().nth(1).unwrap().ends_with(",,,,,EmptyRange"));
    }

    #[test]
    fn geometric_lists() {
        let l = geometric_list(1e-3, 1e-7, 5).unwrap();
        assert_eq!(l.len(), 5);
        assert_eq!(l[0], 1e-3);
        assert_eq!(l[4], 1e-7);
        assert_relative_eq!(l[2], 1e-5, max_relative = 1e-12);
        assert!(geometric_list(0.0, 1.0, 3).is_err());
    }
}
