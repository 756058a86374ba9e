use std::sync::OnceLock;

use proptest::prelude::*;
use spcluster::ansatz_residual::{MultiPeakAnsatz, ResidualKernel};
use spcluster::reduced_energy::{geometric_list, ReducedModel};
use spcluster::{
    fmt_sig, solve_ground_state, InteractionConstants, Nonlinearity, PeakConfiguration, PolytopeKind,
    RadialProfile, ReductionParameters, SolverOptions,
};

struct Fixture {
    profile: RadialProfile,
    constants: InteractionConstants,
    kernel: ResidualKernel,
}

fn fixture() -> &'static Fixture {
    static F: OnceLock<Fixture> = OnceLock::new();
    F.get_or_init(|| {
        let profile = solve_ground_state(Nonlinearity::power(3.0).unwrap(), 3, &SolverOptions::default()).unwrap();
        let constants = InteractionConstants::compute(&profile).unwrap();
        let kernel = ResidualKernel::new(&profile);
        Fixture {
            profile,
            constants,
            kernel,
        }
    })
}

fn model() -> ReducedModel<'static> {
    let f = fixture();
    ReducedModel::new(&f.profile, &f.constants, ReductionParameters::for_nonlinearity(&f.profile.nonlinearity()))
}

fn family() -> impl Strategy<Value = PeakConfiguration> {
    prop_oneof![
        (7usize..16).prop_map(|k| PeakConfiguration::polygon(k, 3).unwrap()),
        Just(PeakConfiguration::polytope(PolytopeKind::Dodecahedron, 3, 3).unwrap()),
        (8usize..14).prop_map(|k| PeakConfiguration::nested(k, 2, 3).unwrap()),
        (2usize..5).prop_map(|q| PeakConfiguration::rings(q, 2, 3, 3).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sig_formatting_round_trips(x in -1e12f64..1e12, e in -20i32..20) {
        let v = x * 10f64.powi(e);
        let back: f64 = fmt_sig(v).parse().unwrap();
        prop_assert!((back - v).abs() <= 5e-12 * v.abs() + f64::MIN_POSITIVE);
    }

    #[test]
    fn geometric_lists_hit_endpoints(a in -9.0f64..-1.0, span in 0.5f64..6.0, n in 2usize..20) {
        let (start, end) = (10f64.powf(a), 10f64.powf(a - span));
        let l = geometric_list(start, end, n).unwrap();
        prop_assert_eq!(l.len(), n);
        prop_assert_eq!(l[0], start);
        prop_assert_eq!(l[n - 1], end);
        prop_assert!(l.windows(2).all(|w| w[1] < w[0]));
        let r = l[1] / l[0];
        prop_assert!(l.windows(2).all(|w| (w[1] / w[0] / r - 1.0).abs() < 1e-9));
    }

    #[test]
    fn symmetries_preserve_the_signed_set(cfg in family()) {
        for g in cfg.symmetry_generators() {
            let image = cfg.transformed(|x| g.apply(x)).unwrap();
            prop_assert!(cfg.same_signed_set(&image));
        }
    }

    #[test]
    fn spectrum_counts_every_ordered_pair(cfg in family()) {
        let n = cfg.len();
        prop_assert_eq!(cfg.spectrum().total_pairs(), n * (n - 1));
        let gap = cfg.spectrum().min_multiplier().unwrap();
        prop_assert!((gap - cfg.dominant_gap()).abs() < 1e-12);
    }

    #[test]
    fn reduced_energy_is_invariant_under_global_sign_flip(cfg in family(), t in 0.2f64..3.0, e in -8.0f64..-3.0) {
        let eps = 10f64.powf(e);
        let r = t * eps * spcluster::log_inv_eps2(eps);
        let m = model();
        let a = m.reduced_m(&cfg, r, eps);
        let b = m.reduced_m(&cfg.negated(), r, eps);
        prop_assert_eq!(a.value.to_bits(), b.value.to_bits());
    }

    #[test]
    fn interaction_part_depends_on_r_over_eps(cfg in family(), s in 5.0f64..20.0, e in -8.0f64..-3.0, k in 0.1f64..10.0) {
        let m = model();
        let eps = 10f64.powf(e);
        let a = m.reduced_m(&cfg, s * eps, eps);
        let b = m.reduced_m(&cfg, s * eps * k, eps * k);
        prop_assert!((a.attraction - b.attraction).abs() <= 1e-12 * a.attraction.abs() + 1e-300);
        prop_assert!((a.repulsion - b.repulsion).abs() <= 1e-12 * a.repulsion.abs() + 1e-300);
        prop_assert!((b.coulomb / a.coulomb / (k * k) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn residual_brackets_are_ordered(cfg in family(), u in prop::collection::vec(-1.0f64..1.0, 3), e in -5.0f64..-3.0) {
        let f = fixture();
        let eps = 10f64.powf(e);
        let r = 1.1 * eps * spcluster::log_inv_eps2(eps) / cfg.dominant_gap();
        let ansatz = MultiPeakAnsatz::new(&cfg, &f.kernel, r, eps).unwrap();
        let x: Vec<f64> = u.iter().map(|c| c * 1.5 * r).collect();
        let b = ansatz.residual_bracket(&x);
        prop_assert!(b.low <= b.high);
        prop_assert!(b.low.is_finite() && b.high.is_finite());
        // Flipping every sign flips the residual, since f is odd and φ[v²] even in v.
        let flipped_cfg = cfg.negated();
        let flipped = MultiPeakAnsatz::new(&flipped_cfg, &f.kernel, r, eps).unwrap();
        let fb = flipped.residual_bracket(&x);
        prop_assert!((fb.low + b.high).abs() <= 1e-9 * b.magnitude() + 1e-300);
        prop_assert!((fb.high + b.low).abs() <= 1e-9 * b.magnitude() + 1e-300);
    }

    #[test]
    fn profile_is_positive_and_decreasing(r in 0.0f64..24.0, h in 0.01f64..1.0) {
        let p = &fixture().profile;
        prop_assert!(p.evaluate_w(r) > 0.0);
        prop_assert!(p.evaluate_w(r + h) < p.evaluate_w(r));
    }

    #[test]
    fn self_potential_is_radially_decreasing(r in 0.0f64..40.0, h in 0.05f64..2.0) {
        let k = &fixture().kernel;
        prop_assert!(k.self_potential(r + h) < k.self_potential(r));
        prop_assert!(k.profile_potential(r + h) < k.profile_potential(r));
    }
}
