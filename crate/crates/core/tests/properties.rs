mod common;

use common::{naive_bootstrap, small_params};
use hyperboot::{
    fixed_point_classify, run_bootstrap, sample_hypergraph, sample_initial_set, threshold_b,
    trajectory_eq1, trajectory_eq2, Hypergraph, ModelParams, RegimeLabel,
};
use proptest::prelude::*;

fn instance() -> impl Strategy<Value = (ModelParams, u64, u64, u32)> {
    (4u32..=30, 2u32..=4, 2u32..=3, 1.0f64..8.0, any::<u64>()).prop_flat_map(|(n, k, r, deg, seed)| {
        let k = k.min(n);
        (Just(small_params(n, k, r, deg)), Just(seed), 0..=n as u64, Just(r))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn engine_matches_naive_recount((params, seed, a, r) in instance()) {
        let g = sample_hypergraph(&params, seed).unwrap().graph;
        let init = sample_initial_set(params.n, a, seed).unwrap();
        let out = run_bootstrap(&g, &init, r, true).unwrap();
        let (set, rounds) = naive_bootstrap(&g, &init, r);
        prop_assert_eq!(&out.infected, &set);
        prop_assert_eq!(out.stopping_time, rounds);
        prop_assert_eq!(out.initial_infected + out.new_infections.iter().sum::<usize>(), out.final_infected_count);
        prop_assert!(out.new_infections.iter().all(|&x| x >= 1));
        prop_assert!(out.stopping_time <= params.n as usize);
        for sizes in out.class_sizes.as_ref().unwrap() {
            prop_assert_eq!(sizes.iter().sum::<usize>(), params.n as usize);
        }
    }

    #[test]
    fn monotone_in_initial_set((params, seed, a, r) in instance(), extra in any::<u64>()) {
        let g = sample_hypergraph(&params, seed).unwrap().graph;
        let small = sample_initial_set(params.n, a, seed).unwrap();
        let mut large = small.clone();
        large.extend(sample_initial_set(params.n, a.min(3), extra).unwrap());
        let a_out = run_bootstrap(&g, &small, r, false).unwrap();
        let b_out = run_bootstrap(&g, &large, r, false).unwrap();
        prop_assert!(a_out.infected.iter().all(|v| b_out.infected.binary_search(v).is_ok()));
    }

    #[test]
    fn monotone_in_edges((params, seed, a, r) in instance(), pick in any::<u64>()) {
        let g = sample_hypergraph(&params, seed).unwrap().graph;
        let init = sample_initial_set(params.n, a, seed).unwrap();
        // Add one k-set that is not yet an edge, if any.
        let k = params.k;
        let candidate = sample_initial_set(params.n, k as u64, pick).unwrap();
        let mut edges: Vec<Vec<u32>> = g.edges().map(|e| e.to_vec()).collect();
        prop_assume!(!edges.contains(&candidate));
        edges.push(candidate);
        let bigger = Hypergraph::from_edges(params.n, k, edges).unwrap();
        let before = run_bootstrap(&g, &init, r, false).unwrap();
        let after = run_bootstrap(&bigger, &init, r, false).unwrap();
        prop_assert!(before.infected.iter().all(|v| after.infected.binary_search(v).is_ok()));
    }

    #[test]
    fn sampling_is_deterministic(n in 10u32..400, k in 2u32..=4, seed in any::<u64>()) {
        let params = small_params(n, k, 2, 3.0);
        let a = sample_hypergraph(&params, seed).unwrap().graph;
        let b = sample_hypergraph(&params, seed).unwrap().graph;
        prop_assert_eq!(a.to_text(), b.to_text());
        prop_assert_eq!(Hypergraph::from_text(&a.to_text()).unwrap(), a);
    }

    #[test]
    fn subcritical_trajectories_have_shrinking_increments(
        k in 2u32..=4, r in 2u32..=4, frac in 0.05f64..0.95, c in 0.0f64..1.0,
    ) {
        // Place p inside the regime window for n = 10^6.
        let n = 1_000_000u32;
        let lo = (10.0f64).ln() - (n as f64).ln();
        let hi = (0.1f64).ln() - (n as f64).ln() / r as f64;
        let density = (lo + c * (hi - lo)).exp();
        let p = density / (n as f64).powi(k as i32 - 2);
        let params = ModelParams::new(n, k, r, p).unwrap();
        // Near the lower edge of the window the fixed point can lie past the
        // recurrence's validity cutoff, where it is truncated by design.
        prop_assume!(params.unit_slope_point() < params.validity_cutoff());
        let b = threshold_b(&params).unwrap().value * hyperboot::infection_multiplicity(k, r) as f64;
        let traj = trajectory_eq2(&params, frac * b, 400).unwrap();
        prop_assert!(traj.cutoff_round.is_none());
        for w in traj.deltas.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12 * b);
        }
        prop_assert!(traj.deltas.iter().all(|&d| d >= 0.0));
        let eq1 = trajectory_eq1(&params, frac * b, 400).unwrap();
        let r = r as usize;
        prop_assert!((eq1.classes[1][r] - traj.classes[1][r]).abs() <= 1e-12 * b);
        for (x, y) in eq1.classes.iter().zip(&traj.classes) {
            prop_assert!((x[r] - y[r]).abs() <= 0.05 * b);
        }
        let cls = fixed_point_classify(&params, frac * b).unwrap();
        prop_assert_eq!(cls.label, RegimeLabel::Subcritical);
        prop_assert!(cls.a_star.unwrap() <= params.unit_slope_point() * (1.0 + 1e-9));
    }
}

#[test]
fn binomial_model_edge_frequencies() {
    // Every k-set of K_8^(3) should appear with probability p, independently.
    for &p in &[0.3, 0.7] {
        let params = ModelParams::new(8, 3, 2, p).unwrap();
        let seeds = 100_000u64;
        let space: Vec<Vec<u32>> = (0..8u32)
            .flat_map(|a| (a + 1..8).flat_map(move |b| (b + 1..8).map(move |c| vec![a, b, c])))
            .collect();
        let index = |e: &[u32]| space.iter().position(|s| s.as_slice() == e).unwrap();
        let m = space.len();
        let mut single = vec![0u64; m];
        let mut joint = vec![0u64; m * m];
        let mut present = Vec::with_capacity(m);
        for seed in 0..seeds {
            let g = sample_hypergraph(&params, seed).unwrap().graph;
            present.clear();
            present.extend(g.edges().map(index));
            for &i in &present {
                single[i] += 1;
                for &j in &present {
                    joint[i * m + j] += 1;
                }
            }
        }
        let n = seeds as f64;
        let se = (p * (1.0 - p) / n).sqrt();
        for (i, &c) in single.iter().enumerate() {
            let f = c as f64 / n;
            assert!((f - p).abs() <= 3.0 * se, "p={p} edge {:?}: freq {f}", space[i]);
        }
        // Sum of squared z-scores of pairwise covariances is chi-square with
        // one degree of freedom per pair under independence.
        let pairs = (m * (m - 1) / 2) as f64;
        let mut chi = 0.0;
        for i in 0..m {
            for j in i + 1..m {
                let cov = joint[i * m + j] as f64 / n - (single[i] as f64 / n) * (single[j] as f64 / n);
                let z = cov / (p * (1.0 - p) / n.sqrt());
                chi += z * z;
            }
        }
        assert!((chi - pairs).abs() <= 5.0 * (2.0 * pairs).sqrt(), "p={p}: chi {chi} vs {pairs}");
    }
}

#[test]
fn mean_edge_count_matches_binomial() {
    let params = ModelParams::new(10_000, 2, 2, 1e-3).unwrap();
    let counts: Vec<f64> = (0..100).map(|s| sample_hypergraph(&params, s).unwrap().graph.edge_count() as f64).collect();
    let mean = counts.iter().sum::<f64>() / 100.0;
    let expected = 49_995_000.0 * 1e-3;
    let se = (49_995_000.0 * 1e-3 * (1.0 - 1e-3) / 100.0f64).sqrt();
    assert!((mean - expected).abs() <= 3.0 * se, "mean {mean}");
}

#[test]
fn initial_set_is_uniform() {
    let mut hits = [0u32; 100];
    for seed in 0..10_000 {
        for v in sample_initial_set(100, 10, seed).unwrap() {
            hits[v as usize] += 1;
        }
    }
    for (v, &h) in hits.iter().enumerate() {
        let f = h as f64 / 10_000.0;
        assert!((f - 0.1).abs() <= 0.01, "vertex {v}: {f}");
    }
}

#[test]
fn r2_intersecting_pair_infects_whole_pair() {
    // For r = 2 two edges meeting in one vertex, each holding an infected
    // vertex, infect all 2k - 3 remaining vertices within two rounds.
    for k in 3..=6u32 {
        let n = 2 * k - 1;
        let first: Vec<u32> = (0..k).collect();
        let second: Vec<u32> = (k - 1..n).collect();
        let g = Hypergraph::from_edges(n, k, [first, second]).unwrap();
        let out = run_bootstrap(&g, &[0, n - 1], 2, false).unwrap();
        assert_eq!(out.final_infected_count, n as usize);
        assert_eq!(out.final_infected_count - 2, 2 * k as usize - 3);
        assert!(out.stopping_time <= 2);
    }
}
