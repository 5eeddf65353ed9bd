//! Random and exhaustive graph families used by the verification harness.

use rand::Rng;

use crate::graph::Graph;

/// G(n, q): each of the n(n-1)/2 possible edges present independently with
/// probability `q`.
pub fn erdos_renyi<R: Rng + ?Sized>(node_count: usize, edge_prob: f64, rng: &mut R) -> Graph {
    let mut edges = Vec::new();
    for u in 0..node_count {
        for v in u + 1..node_count {
            if rng.gen::<f64>() < edge_prob {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(node_count, edges).expect("ids in range")
}

/// Preferential attachment: starts from a clique on `links + 1` nodes, then
/// each new node links to `links` distinct existing nodes chosen with
/// probability proportional to their degree.
pub fn preferential_attachment<R: Rng + ?Sized>(
    node_count: usize,
    links: usize,
    rng: &mut R,
) -> Graph {
    assert!(links >= 1, "each new node needs at least one link");
    let core = (links + 1).min(node_count);
    let mut edges = Vec::new();
    // every edge endpoint, so uniform sampling is degree-proportional
    let mut endpoints = Vec::new();
    for u in 0..core {
        for v in u + 1..core {
            edges.push((u, v));
            endpoints.extend([u, v]);
        }
    }
    for node in core..node_count {
        let mut targets: Vec<usize> = Vec::with_capacity(links);
        while targets.len() < links {
            let t = endpoints[rng.gen_range(0..endpoints.len())];
            if !targets.contains(&t) {
                targets.push(t);
            }
        }
        for t in targets {
            edges.push((node, t));
            endpoints.extend([node, t]);
        }
    }
    Graph::from_edges(node_count, edges).expect("ids in range")
}

/// Every simple undirected graph on `node_count` labelled nodes, one per
/// subset of the possible edges.
pub fn all_graphs(node_count: usize) -> impl Iterator<Item = Graph> {
    let pairs: Vec<(usize, usize)> = (0..node_count)
        .flat_map(|u| (u + 1..node_count).map(move |v| (u, v)))
        .collect();
    assert!(pairs.len() < 32, "too many graphs to enumerate");
    (0u32..1 << pairs.len()).map(move |mask| {
        let edges = pairs
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e);
        Graph::from_edges(node_count, edges).expect("ids in range")
    })
}
