//! Property-style invariants spanning the library modules.

use proptest::prelude::*;

use qclust_core::cluster::{
    anova_residual, lloyd_kmeans, scatter_stats, ClusterAssignment, LloydInit,
};
use qclust_core::data::DataSet;
use qclust_core::ising::{
    brute_force, complement, decode, encode, energy, ising_full, SpinVector,
};
use qclust_core::kernel::{gram, Kernel};

fn dataset(max_points: usize, max_dim: usize) -> impl Strategy<Value = DataSet> {
    (2..=max_points, 1..=max_dim)
        .prop_flat_map(|(n, m)| {
            proptest::collection::vec(proptest::collection::vec(-10.0..10.0f64, m), n)
        })
        .prop_map(|points| DataSet::from_points(&points).unwrap())
}

fn instance(max_points: usize, max_dim: usize) -> impl Strategy<Value = (DataSet, ClusterAssignment)> {
    dataset(max_points, max_dim).prop_flat_map(|data| {
        let n = data.len();
        let labels = proptest::collection::vec(prop::bool::ANY, n).prop_map(|mut bits| {
            if bits.iter().all(|&b| b) {
                bits[0] = false;
            }
            if bits.iter().all(|&b| !b) {
                bits[0] = true;
            }
            ClusterAssignment::new(bits.iter().map(|&b| if b { 1 } else { 2 }).collect()).unwrap()
        });
        (Just(data), labels)
    })
}

/// `|X s|^2` computed straight from the data, the maximization objective
/// the Ising energy mirrors.
fn split_norm_sq(data: &DataSet, s: &SpinVector) -> f64 {
    (0..data.dim())
        .map(|f| {
            let component: f64 = data
                .points()
                .zip(s.spins())
                .map(|(p, &spin)| p[f] * spin as f64)
                .sum();
            component * component
        })
        .sum()
}

proptest! {
    #[test]
    fn scatter_decomposition_holds((data, assignment) in instance(20, 4)) {
        let stats = scatter_stats(&data, &assignment).unwrap();
        let residual = anova_residual(&data, &assignment).unwrap();
        prop_assert!(residual.abs() <= 1e-9 * stats.s_t.max(1.0),
            "residual {residual}, s_t {}", stats.s_t);
    }

    #[test]
    fn centered_centroids_cancel((data, assignment) in instance(16, 3)) {
        let data = data.center();
        let c = qclust_core::cluster::centroids(&data, &assignment).unwrap();
        let tol = 1e-9 * data.len() as f64 * data.max_abs();
        for f in 0..data.dim() {
            let balance = c.size[0] as f64 * c.mean[0][f] + c.size[1] as f64 * c.mean[1][f];
            prop_assert!(balance.abs() <= tol, "imbalance {balance}");
        }
    }

    #[test]
    fn scatter_is_translation_invariant(
        (data, assignment) in instance(12, 3),
        shift in -50.0..50.0f64,
    ) {
        let shifted = DataSet::from_points(
            &data
                .points()
                .map(|p| p.iter().map(|v| v + shift).collect())
                .collect::<Vec<_>>(),
        )
        .unwrap();
        let s0 = scatter_stats(&data, &assignment).unwrap();
        let s1 = scatter_stats(&shifted, &assignment).unwrap();
        prop_assert!((s0.s_w - s1.s_w).abs() <= 1e-9 * s0.s_w.max(1.0));
        prop_assert!((s0.s_b - s1.s_b).abs() <= 1e-9 * s0.s_b.max(1.0));
    }

    #[test]
    fn codec_round_trips(q in 1usize..=12, raw in any::<usize>()) {
        let index = raw & ((1 << q) - 1);
        let s = decode(index, q).unwrap();
        prop_assert_eq!(s.len(), q);
        prop_assert_eq!(encode(&s), index);
        prop_assert_eq!(decode(complement(index, q), q).unwrap(), s.flipped());
    }

    #[test]
    fn full_model_energy_is_flip_symmetric(
        data in dataset(12, 3),
        raw in any::<usize>(),
    ) {
        let data = data.center();
        let model = ising_full(&gram(&data, &Kernel::Linear).unwrap());
        let index = raw & ((1 << data.len()) - 1);
        let s = decode(index, data.len()).unwrap();
        prop_assert_eq!(
            energy(&model, &s).unwrap(),
            energy(&model, &s.flipped()).unwrap()
        );
    }

    #[test]
    fn lloyd_scatter_never_increases(data in dataset(24, 3), seed in any::<u64>()) {
        match lloyd_kmeans(&data, &LloydInit::Seed(seed), 50) {
            Ok(out) => {
                for w in out.s_w_trace.windows(2) {
                    prop_assert!(w[1] <= w[0] + 1e-9 * w[0].max(1.0),
                        "s_w increased: {} -> {}", w[0], w[1]);
                }
            }
            // Degenerate draws (all points identical) are rejected, not looped on.
            Err(qclust_core::Error::Lloyd(_)) => {}
            Err(other) => prop_assert!(false, "unexpected error {other}"),
        }
    }

    #[test]
    fn ground_states_maximize_the_split_norm(data in dataset(10, 3)) {
        let data = data.center();
        let n = data.len();
        let model = ising_full(&gram(&data, &Kernel::Linear).unwrap());
        let ground = brute_force(&model).unwrap();

        // Independent route: enumerate |X s|^2 directly.
        let mut best = f64::NEG_INFINITY;
        let mut norms = Vec::with_capacity(1 << n);
        for z in 0..(1usize << n) {
            let v = split_norm_sq(&data, &decode(z, n).unwrap());
            best = best.max(v);
            norms.push(v);
        }
        let tol = 1e-9 * best.max(1.0);
        let maximizers: Vec<usize> =
            (0..(1usize << n)).filter(|&z| norms[z] >= best - tol).collect();

        prop_assert_eq!(&ground.states, &maximizers);
        prop_assert!((ground.min_energy - -best).abs() <= tol,
            "min energy {} vs -max norm {}", ground.min_energy, -best);
    }

    #[test]
    fn linear_full_energies_are_non_positive(data in dataset(10, 3)) {
        let data = data.center();
        let n = data.len();
        let model = ising_full(&gram(&data, &Kernel::Linear).unwrap());
        let scale = data.max_abs().powi(2) * n as f64 * n as f64;
        let tol = 1e-9 * scale.max(1.0);
        let mut max_energy = f64::NEG_INFINITY;
        for z in 0..(1usize << n) {
            let e = energy(&model, &decode(z, n).unwrap()).unwrap();
            prop_assert!(e <= tol, "positive energy {e} at {z}");
            max_energy = max_energy.max(e);
        }
        // The maximum is the all-equal split, which costs nothing on
        // centered data.
        let uniform = energy(&model, &decode(0, n).unwrap()).unwrap();
        prop_assert!((max_energy - uniform).abs() <= tol);
        prop_assert!(uniform.abs() <= tol);
    }
}
