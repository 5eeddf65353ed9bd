use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use snshift::analysis::generators::preferential_attachment;
use snshift::analysis::{oracle_compare, sweep_epsilon};
use snshift::cascade::run;
use snshift::{Graph, Rational, SimConfig64, SimConfigExact};

fn graph_strategy(max_nodes: usize) -> impl Strategy<Value = Graph> {
    (1..=max_nodes).prop_flat_map(|n| {
        prop::collection::vec((0..n, 0..n), 0..4 * n)
            .prop_map(move |edges| Graph::from_edges(n, edges).unwrap())
    })
}

/// Closure built by activating one qualifying node at a time, scanning in a
/// shuffled order each round.
fn shuffled_closure(
    graph: &Graph,
    seeds: &[usize],
    x2: f64,
    eps: f64,
    shuffle_seed: u64,
) -> BTreeSet<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(shuffle_seed);
    let mut active: BTreeSet<usize> = seeds.iter().copied().collect();
    let mut order: Vec<usize> = (0..graph.node_count()).collect();
    loop {
        order.shuffle(&mut rng);
        let next = order.iter().copied().find(|&v| {
            !active.contains(&v) && {
                let d = graph.degree(v) as f64;
                let d2 = graph
                    .neighbors(v)
                    .iter()
                    .filter(|u| active.contains(u))
                    .count() as f64;
                d2 * x2 > eps * d
            }
        });
        match next {
            Some(v) => {
                active.insert(v);
            }
            None => return active,
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn any_activation_order_reaches_the_engine_fixed_point(
        g in graph_strategy(30),
        x2 in 0.0f64..=1.0,
        eps in 0.0f64..=1.0,
        seed_mask in any::<u32>(),
        shuffle_seed in any::<u64>(),
    ) {
        let seeds: Vec<usize> = (0..g.node_count()).filter(|i| seed_mask >> (i % 32) & 1 == 1).collect();
        let cfg = SimConfig64::new(eps, x2).with_p(0.0).with_seeds(seeds.iter().copied());
        let engine: BTreeSet<usize> = run(&g, &cfg).unwrap().terminal_set().into_iter().collect();
        prop_assert_eq!(&engine, &shuffled_closure(&g, &seeds, x2, eps, shuffle_seed));
        prop_assert!(oracle_compare(&g, &seeds, x2, eps));
    }

    #[test]
    fn delta_never_changes_the_trace(
        g in graph_strategy(40),
        x2 in 0.0f64..=1.0,
        eps in 0.0f64..=1.0,
        p in 0.0f64..0.3,
        delta in 1e-6f64..1e6,
        rng_seed in any::<u64>(),
    ) {
        let cfg = SimConfig64::new(eps, x2).with_p(p).with_rng_seed(rng_seed).with_horizon(300);
        let reference = run(&g, &cfg).unwrap().to_csv_string();
        prop_assert_eq!(run(&g, &cfg.with_delta(delta)).unwrap().to_csv_string(), reference);
    }

    #[test]
    fn exact_arithmetic_agrees_with_float_on_dyadic_parameters(
        g in graph_strategy(25),
        x2_quarters in 0i64..=4,
        eps_quarters in 0i64..=4,
        seed in any::<prop::sample::Index>(),
    ) {
        let s = seed.index(g.node_count());
        let float = SimConfig64::new(eps_quarters as f64 / 4.0, x2_quarters as f64 / 4.0)
            .with_p(0.0)
            .with_seeds([s]);
        let exact = SimConfigExact::new(Rational::new(eps_quarters, 4), Rational::new(x2_quarters, 4))
            .with_p(Rational::from_integer(0))
            .with_seeds([s]);
        prop_assert_eq!(run(&g, &float).unwrap(), run(&g, &exact).unwrap());
    }
}

#[test]
fn median_steps_to_90_non_decreasing_in_epsilon() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let graph = preferential_attachment(400, 3, &mut rng);
    let base = SimConfig64::new(0.1, 0.7).with_p(0.002).with_rng_seed(8);
    let sweep = sweep_epsilon(&graph, &base, &[0.1, 0.3, 0.5], 7).unwrap();
    let medians: Vec<f64> = (0..3).map(|i| sweep.median_steps_to_90(i)).collect();
    assert!(medians.windows(2).all(|w| w[0] <= w[1]), "{medians:?}");
}
