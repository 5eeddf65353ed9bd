use std::collections::BTreeSet;

use crate::graph::Graph;
use crate::Scalar;

/// Closure of `seeds` under the diffusive rule with no spontaneous adoption.
///
/// Works by exhaustive passes over all non-adopted nodes, activating each
/// node as soon as it qualifies, until a full pass activates nothing. Kept
/// separate from the engine's synchronous update so the two can be compared.
pub fn fixed_point_oracle<S: Scalar>(
    graph: &Graph,
    seeds: &[usize],
    x2: S,
    epsilon: S,
) -> BTreeSet<usize> {
    let mut active: BTreeSet<usize> = seeds.iter().copied().collect();
    loop {
        let mut changed = false;
        for node in 0..graph.node_count() {
            if active.contains(&node) {
                continue;
            }
            let neighbors = graph.neighbors(node);
            let dual = neighbors.iter().filter(|v| active.contains(v)).count();
            // friends' time on the new site vs. epsilon times their whole span
            let on_new = S::from_count(dual) * x2;
            let span = S::from_count(neighbors.len());
            if on_new > epsilon * span {
                active.insert(node);
                changed = true;
            }
        }
        if !changed {
            return active;
        }
    }
}

/// Whether the engine at `p = 0` and the oracle agree on the final dual set.
pub fn oracle_compare<S: Scalar>(graph: &Graph, seeds: &[usize], x2: S, epsilon: S) -> bool {
    let cfg = crate::SimConfig::new(epsilon, x2)
        .with_p(S::zero())
        .with_seeds(seeds.iter().copied());
    let Ok(trace) = crate::cascade::run(graph, &cfg) else {
        return false;
    };
    let engine: BTreeSet<usize> = trace.terminal_set().into_iter().collect();
    engine == fixed_point_oracle(graph, seeds, x2, epsilon)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> Graph {
        Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn k3_closure() {
        let set = fixed_point_oracle(&k3(), &[0], 0.5, 0.1);
        assert_eq!(set, BTreeSet::from([0, 1, 2]));
    }

    #[test]
    fn no_spread_when_epsilon_covers_novelty() {
        let g =
            Graph::from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0), (0, 3)]).unwrap();
        for (eps, x2) in [(0.5, 0.5), (0.9, 0.3), (1.0, 1.0)] {
            assert_eq!(
                fixed_point_oracle(&g, &[0, 2], x2, eps),
                BTreeSet::from([0, 2])
            );
        }
    }

    #[test]
    fn empty_seeds() {
        assert!(fixed_point_oracle(&k3(), &[], 1.0, 0.0).is_empty());
    }

    #[test]
    fn asynchronous_passes_reach_the_far_end_of_a_path() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        assert_eq!(fixed_point_oracle(&g, &[0], 1.0, 0.4).len(), 5);
        // node 1 has degree 2 and one dual friend: exactly half, not enough at 0.5
        assert_eq!(fixed_point_oracle(&g, &[0], 1.0, 0.5), BTreeSet::from([0]));
    }

    #[test]
    fn compare_trivial_cases() {
        let empty = Graph::from_edges(0, []).unwrap();
        assert!(oracle_compare(&empty, &[], 0.5, 0.1));
        assert!(oracle_compare(&k3(), &[0, 1, 2], 0.5, 0.1));
        assert!(oracle_compare(&k3(), &[0], 0.5, 0.1));
    }
}
