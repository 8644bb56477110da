use std::collections::VecDeque;

use super::build::{ExplanationGraph, NodeId};

/// Local Reaching Centrality of `node`: the mean over all other nodes of
/// (path weight / hop count) along a shortest path, unreachable nodes
/// counting as zero. Among several shortest paths the heaviest is used.
pub fn lrc(graph: &ExplanationGraph, node: NodeId) -> f64 {
    lrc_adjacency(&graph.adjacency(), node)
}

/// LRC of every predicate node, in predicate order.
pub fn lrc_all(graph: &ExplanationGraph) -> Vec<f64> {
    let adj = graph.adjacency();
    (0..graph.n_predicates).map(|v| lrc_adjacency(&adj, v)).collect()
}

/// LRC on a bare adjacency list (`adj[u]` = outgoing `(target, weight)`).
/// The graph is assumed free of directed cycles.
pub fn lrc_adjacency(adj: &[Vec<(NodeId, f64)>], node: NodeId) -> f64 {
    let n = adj.len();
    if n <= 1 {
        return 0.0;
    }
    let mut hops = vec![usize::MAX; n];
    let mut best = vec![0.0f64; n];
    let mut queue = VecDeque::new();
    hops[node] = 0;
    queue.push_back(node);
    // FIFO order finalises every node of layer d before layer d+1 is popped.
    while let Some(u) = queue.pop_front() {
        for &(v, w) in &adj[u] {
            let cand = best[u] + w;
            if hops[v] == usize::MAX {
                hops[v] = hops[u] + 1;
                best[v] = cand;
                queue.push_back(v);
            } else if hops[v] == hops[u] + 1 && cand > best[v] {
                best[v] = cand;
            }
        }
    }
    let total: f64 = (0..n)
        .filter(|&u| u != node && hops[u] != usize::MAX)
        .map(|u| best[u] / hops[u] as f64)
        .sum();
    total / (n - 1) as f64
}
