//! Explicit Dormand–Prince 5(4) integrator with embedded error control.

/// Butcher tableau of the Dormand–Prince 5(4) pair.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights (FSAL: equal to the last row of `A`).
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
/// Embedded fourth-order weights.
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Tolerances for adaptive stepping.
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

/// One Dormand–Prince step of size `h`; returns the fifth-order solution and
/// the embedded error estimate.
pub fn dopri_step<const D: usize, F>(f: &F, t: f64, y: &[f64; D], h: f64) -> ([f64; D], [f64; D])
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let mut k = [[0.0; D]; 7];
    k[0] = f(t, y);
    for s in 1..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = A[s][j];
            if a != 0.0 {
                for d in 0..D {
                    ys[d] += h * a * kj[d];
                }
            }
        }
        k[s] = f(t + C[s] * h, &ys);
    }
    let mut y5 = *y;
    let mut err = [0.0; D];
    for s in 0..7 {
        for d in 0..D {
            y5[d] += h * B5[s] * k[s][d];
            err[d] += h * (B5[s] - B4[s]) * k[s][d];
        }
    }
    (y5, err)
}

/// Outcome of [`advance`].
#[derive(Debug, Clone, Copy)]
pub struct Advance<const D: usize> {
    pub y: [f64; D],
    /// Step size suggested for the next call.
    pub next_h: f64,
    pub steps: usize,
}

/// Integrates from `t0` to `t1` (either direction) with adaptive steps,
/// landing exactly on `t1`.
pub fn advance<const D: usize, F>(
    f: &F,
    t0: f64,
    y0: [f64; D],
    t1: f64,
    h_guess: f64,
    tol: Tolerance,
) -> Advance<D>
where
    F: Fn(f64, &[f64; D]) -> [f64; D],
{
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let span = (t1 - t0).abs();
    let mut t = t0;
    let mut y = y0;
    let mut h = h_guess.abs().min(span).max(span * 1e-12);
    let mut steps = 0;
    let mut last_ok_h = h;
    while dir * (t1 - t) > 0.0 {
        let remaining = (t1 - t).abs();
        let hit_end = h >= remaining;
        let step = if hit_end { remaining } else { h };
        let (y_new, err) = dopri_step(f, t, &y, dir * step);
        let mut norm = 0.0;
        for d in 0..D {
            let sc = tol.abs + tol.rel * y[d].abs().max(y_new[d].abs());
            norm += (err[d] / sc).powi(2);
        }
        let norm = (norm / D as f64).sqrt();
        if norm <= 1.0 || step <= 1e-14 * span.max(1e-300) {
            t = if hit_end { t1 } else { t + dir * step };
            y = y_new;
            steps += 1;
            last_ok_h = step;
            let fac = if norm == 0.0 {
                5.0
            } else {
                (0.9 * norm.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = step * fac;
        } else {
            h = step * (0.9 * norm.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
    Advance {
        y,
        next_h: if h > last_ok_h { h } else { last_ok_h },
        steps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exponential_growth() {
        let f = |_t: f64, y: &[f64; 1]| [y[0]];
        let out = advance(
            &f,
            0.0,
            [1.0],
            3.0,
            0.1,
            Tolerance {
                rel: 1e-11,
                abs: 1e-14,
            },
        );
        assert_relative_eq!(out.y[0], 3.0f64.exp(), max_relative = 1e-9);
    }

    #[test]
    fn backward_harmonic_oscillator() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let out = advance(
            &f,
            2.0,
            [2.0f64.sin(), 2.0f64.cos()],
            0.0,
            0.1,
            Tolerance {
                rel: 1e-11,
                abs: 1e-14,
            },
        );
        assert!(out.y[0].abs() < 1e-9);
        assert_relative_eq!(out.y[1], 1.0, max_relative = 1e-9);
    }

    #[test]
    fn fixed_step_global_error_is_fifth_order() {
        let f = |_t: f64, y: &[f64; 2]| [y[1], -y[0]];
        let run = |n: usize| {
            let h = 4.0 / n as f64;
            let mut y = [0.0, 1.0];
            for i in 0..n {
                y = dopri_step(&f, i as f64 * h, &y, h).0;
            }
            (y[0] - 4.0f64.sin()).abs()
        };
        let ratio = run(40) / run(80);
        assert!((ratio.log2() - 5.0).abs() < 0.3, "observed order {}", ratio.log2());
    }
}
