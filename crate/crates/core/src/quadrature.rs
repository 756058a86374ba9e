//! Gauss–Legendre rules and an adaptive composite integrator.
//!
//! The adaptive scheme compares a panel's 32-point estimate with the sum of
//! the estimates on its two halves and splits until the difference falls
//! below the panel's share of the global tolerance.

use std::sync::OnceLock;

/// A Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds the `n`-point rule by Newton iteration on the Legendre recurrence.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess for the i-th root (descending order).
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, half * w))
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        self.mapped(a, b).map(|(x, w)| w * f(x)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (pn, pnm1) = if n == 0 { (1.0, 0.0) } else { (p1, p0) };
    let d = n as f64 * (x * pn - pnm1) / (x * x - 1.0);
    (pn, d)
}

/// The shared 32-point rule.
pub fn gl32() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(32))
}

/// The shared 8-point rule, used for cell-wise integration of interpolants.
pub fn gl8() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(8))
}

#[derive(Debug, Clone, Copy)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            abs_tol: 1e-300,
            max_depth: 30,
        }
    }
}

impl AdaptiveOptions {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub abs_err: f64,
    pub converged: bool,
}

/// Adaptive composite Gauss–Legendre over `[a, b]`.
pub fn adaptive<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, opts: AdaptiveOptions) -> Estimate {
    adaptive_with_breaks(f, &[a, b], opts)
}

/// Adaptive composite Gauss–Legendre over consecutive intervals of `breaks`.
///
/// `breaks` must be nondecreasing. Zero-width intervals are skipped.
pub fn adaptive_with_breaks<F: FnMut(f64) -> f64>(
    mut f: F,
    breaks: &[f64],
    opts: AdaptiveOptions,
) -> Estimate {
    let rule = gl32();
    let panels: Vec<(f64, f64, f64)> = breaks
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[0], w[1], rule.integrate(w[0], w[1], &mut f)))
        .collect();
    let coarse: f64 = panels.iter().map(|p| p.2).sum();
    let scale: f64 = panels.iter().map(|p| p.2.abs()).sum::<f64>().max(coarse.abs());
    let total_width: f64 = panels.iter().map(|p| p.1 - p.0).sum();
    if total_width <= 0.0 {
        return Estimate {
            value: 0.0,
            abs_err: 0.0,
            converged: true,
        };
    }
    let target = (opts.rel_tol * scale).max(opts.abs_tol);
    let mut out = Estimate {
        value: 0.0,
        abs_err: 0.0,
        converged: true,
    };
    for (a, b, whole) in panels {
        let tol = target * (b - a) / total_width;
        refine(&mut f, a, b, whole, tol, opts.max_depth, &mut out);
    }
    out
}

fn refine<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    out: &mut Estimate,
) {
    let rule = gl32();
    let mid = 0.5 * (a + b);
    let left = rule.integrate(a, mid, &mut *f);
    let right = rule.integrate(mid, b, &mut *f);
    let err = (left + right - whole).abs();
    // Differences at the rounding level of the panel sum cannot be refined away.
    let floor = 50.0 * f64::EPSILON * (left.abs() + right.abs());
    if err <= tol.max(floor) || !(mid > a && mid < b) {
        out.value += left + right;
        out.abs_err += err;
        return;
    }
    if depth == 0 {
        out.value += left + right;
        out.abs_err += err;
        out.converged = false;
        return;
    }
    refine(f, a, mid, left, 0.5 * tol, depth - 1, out);
    refine(f, mid, b, right, 0.5 * tol, depth - 1, out);
}
