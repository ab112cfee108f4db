use glauberk_core::graph::{
    build_cubic, build_gamma, build_hexagonal, enumerate_flip_sets, BoundaryMode, PeriodicGraph, WindowGraph,
};
use glauberk_core::model::{
    delta_h, density, rate_at_temperature, window_h, EnergyDelta, Interactions, SpinState,
};
use glauberk_core::presets::example_m;
use proptest::prelude::*;

fn graphs() -> Vec<(PeriodicGraph, Vec<(i64, i64)>)> {
    vec![
        (build_cubic(1).unwrap(), vec![(0, 12)]),
        (build_cubic(2).unwrap(), vec![(0, 5), (0, 5)]),
        (build_cubic(3).unwrap(), vec![(0, 3), (0, 3), (0, 3)]),
        (build_hexagonal(), vec![(0, 4), (0, 4)]),
        (example_m().unwrap(), vec![(0, 4)]),
        (build_gamma(&build_cubic(1).unwrap(), 2, 1).unwrap(), vec![(0, 4)]),
    ]
}

fn signs(n: usize, bits: &[bool]) -> Vec<i8> {
    (0..n).map(|i| if bits[i % bits.len()] { 1 } else { -1 }).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    /// Δ equals the Hamiltonian difference on a free window where the
    /// set and its exterior boundary sit away from the rim.
    #[test]
    fn delta_matches_energy_difference(
        gi in 0usize..6,
        k in 1usize..4,
        set_pick in any::<u32>(),
        j_bits in prop::collection::vec(any::<bool>(), 1..97),
        s_bits in prop::collection::vec(any::<bool>(), 1..89),
    ) {
        let (g, ext) = graphs().swap_remove(gi);
        for mode in [BoundaryMode::Free, BoundaryMode::Toroidal] {
            let w = WindowGraph::new(&g, ext.clone(), mode).unwrap();
            let j = Interactions::new(signs(w.num_edges(), &j_bits)).unwrap();
            let s = SpinState::new(signs(w.num_vertices(), &s_bits)).unwrap();
            let cat = enumerate_flip_sets(&w, k, usize::MAX).unwrap();
            let a = cat.set(set_pick as usize % cat.len());
            let d = delta_h(&w, &j, &s, a).unwrap();
            let flipped = s.flipped(a);
            prop_assert_eq!(d.value() as i64, window_h(&w, &j, &flipped) - window_h(&w, &j, &s));
            // antisymmetry, parity, global flip
            prop_assert_eq!(delta_h(&w, &j, &flipped, a).unwrap().value(), -d.value());
            prop_assert_eq!(d.value() % 2, 0);
            prop_assert!(d.value() == 0 || d.value().abs() >= 2);
            prop_assert_eq!(delta_h(&w, &j, &s.negated(), a).unwrap(), d);
            prop_assert_eq!(window_h(&w, &j, &s.negated()), window_h(&w, &j, &s));
            let dg = g.max_degree() as f64 / 2.0;
            let dens = density(&w, &j, &s);
            prop_assert!((-dg..=dg).contains(&dens));
        }
    }

    #[test]
    fn detailed_balance_ratio(half in 1i32..7, temp in 0.05f64..50.0) {
        let d = 2 * half;
        for delta in [d, -d] {
            let ratio = rate_at_temperature(EnergyDelta(delta), temp) / rate_at_temperature(EnergyDelta(-delta), temp);
            let expected = (-2.0 * delta as f64 / temp).exp();
            if expected.is_finite() && expected > 1e-300 {
                prop_assert!(((ratio - expected) / expected).abs() <= 1e-12, "{} vs {}", ratio, expected);
            }
        }
    }

    #[test]
    fn rates_are_probabilities(delta in -40i32..40, temp in 0.0f64..1e3) {
        let c = rate_at_temperature(EnergyDelta(2 * delta), temp);
        prop_assert!((0.0..=1.0).contains(&c));
    }
}
