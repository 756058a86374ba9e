//! Monte Carlo checks of the Poisson pieces of the residual at ε = 1.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spcluster::ansatz_residual::ResidualKernel;
use spcluster::{solve_ground_state, Nonlinearity, ProfileShape, SolverOptions};

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

/// Mean and standard error of `∫_{B(c, R)} g(y) dy` from uniform samples.
fn ball_mc<G: Fn([f64; 3]) -> f64>(rng: &mut ChaCha8Rng, c: [f64; 3], radius: f64, n: usize, g: G) -> (f64, f64) {
    let vol = 4.0 / 3.0 * std::f64::consts::PI * radius.powi(3);
    let (mut s, mut s2, mut taken) = (0.0, 0.0, 0usize);
    while taken < n {
        let u: [f64; 3] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        if norm(u) > 1.0 {
            continue;
        }
        let y = [c[0] + radius * u[0], c[1] + radius * u[1], c[2] + radius * u[2]];
        let v = g(y);
        s += v;
        s2 += v * v;
        taken += 1;
    }
    let mean = s / n as f64;
    let var = (s2 / n as f64 - mean * mean).max(0.0);
    (vol * mean, vol * (var / n as f64).sqrt())
}

#[test]
fn cross_potential_sits_inside_its_bracket() {
    let p = solve_ground_state(Nonlinearity::power(3.0).unwrap(), 3, &SolverOptions::default()).unwrap();
    let kernel = ResidualKernel::new(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for d in [4.0, 7.0, 10.0] {
        let p2 = [d, 0.0, 0.0];
        for x in [[0.0, 0.0, 0.0], [d / 2.0, 0.0, 0.0], [d / 2.0, 1.5, 0.0], [-2.0, 1.0, 1.0]] {
            let (est, se) = ball_mc(&mut rng, [d / 2.0, 0.0, 0.0], d / 2.0 + 9.0, 400_000, |y| {
                let r = norm(sub(x, y)).max(1e-12);
                p.value(norm(y)) * p.value(norm(sub(y, p2))) / r
            });
            let bound = p.value(d / 2.0)
                * (kernel.profile_potential(norm(x)) + kernel.profile_potential(norm(sub(x, p2))));
            assert!(est > 0.0, "d = {d}, x = {x:?}");
            assert!(est - 4.0 * se <= bound, "d = {d}, x = {x:?}: {est} ± {se} > {bound}");
        }
    }
}

#[test]
fn profile_potential_agrees_with_sampling() {
    let p = solve_ground_state(Nonlinearity::power(3.0).unwrap(), 3, &SolverOptions::default()).unwrap();
    let kernel = ResidualKernel::new(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for rho in [0.0, 1.0, 3.0] {
        let x = [rho, 0.0, 0.0];
        let (est, se) = ball_mc(&mut rng, [0.0; 3], 14.0, 400_000, |y| {
            p.value(norm(y)) / norm(sub(x, y)).max(1e-12)
        });
        let exact = kernel.profile_potential(rho);
        assert!((est - exact).abs() < 5.0 * se + 1e-3 * exact, "ρ = {rho}: {est} ± {se} vs {exact}");
    }
}
