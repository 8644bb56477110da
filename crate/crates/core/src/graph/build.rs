use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::engine::BagResult;
use crate::predicates::PredicateSet;
use crate::zone::ZoneModel;

/// Node index: predicates occupy `0..n_predicates`, then `Class_0`,
/// `Class_1`.
pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeRecord {
    pub source: NodeId,
    pub target: NodeId,
    pub weight: f64,
}

/// Directed weighted graph for one seed, after bidirectional resolution
/// and cycle pruning.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplanationGraph {
    pub seed: u64,
    pub n_predicates: usize,
    pub edges: BTreeMap<(NodeId, NodeId), f64>,
    /// Edges dropped to break cycles longer than two.
    pub pruned: Vec<EdgeRecord>,
}

impl ExplanationGraph {
    pub fn empty(seed: u64, n_predicates: usize) -> Self {
        ExplanationGraph {
            seed,
            n_predicates,
            edges: BTreeMap::new(),
            pruned: Vec::new(),
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_predicates + 2
    }

    pub fn class_node(&self, class: u8) -> NodeId {
        self.n_predicates + class as usize
    }

    pub fn is_terminal(&self, node: NodeId) -> bool {
        node >= self.n_predicates
    }

    /// Outgoing adjacency lists, targets in ascending order.
    pub fn adjacency(&self) -> Vec<Vec<(NodeId, f64)>> {
        let mut adj = vec![Vec::new(); self.n_nodes()];
        for (&(u, v), &w) in &self.edges {
            adj[u].push((v, w));
        }
        adj
    }

    /// Resolves opposite edge pairs, then prunes residual cycles.
    pub(crate) fn from_accumulated(
        seed: u64,
        n_predicates: usize,
        acc: BTreeMap<(NodeId, NodeId), f64>,
    ) -> Self {
        let mut edges = BTreeMap::new();
        for (&(u, v), &w) in &acc {
            if w <= 0.0 {
                continue;
            }
            match acc.get(&(v, u)).copied().filter(|&r| r > 0.0) {
                // Heavier direction wins; on a tie, the lower source id.
                Some(r) if r > w || (r == w && v < u) => {}
                _ => {
                    edges.insert((u, v), w);
                }
            }
        }
        let mut g = ExplanationGraph {
            seed,
            n_predicates,
            edges,
            pruned: Vec::new(),
        };
        g.prune_cycles();
        g
    }

    fn prune_cycles(&mut self) {
        while let Some(cycle) = self.find_cycle() {
            let (&(u, v), &w) = cycle
                .iter()
                .map(|e| (e, &self.edges[e]))
                .min_by(|a, b| a.1.total_cmp(b.1).then(a.0.cmp(b.0)))
                .expect("cycle has edges");
            log::debug!("seed {}: pruning edge {u} -> {v} (weight {w})", self.seed);
            self.edges.remove(&(u, v));
            self.pruned.push(EdgeRecord {
                source: u,
                target: v,
                weight: w,
            });
        }
        if !self.pruned.is_empty() {
            let total: f64 = self.pruned.iter().map(|e| e.weight).sum();
            log::warn!(
                "seed {}: removed {} edge(s) (total weight {total:.3e}) to break directed cycles",
                self.seed,
                self.pruned.len()
            );
        }
    }

    /// Edges of some directed cycle, found by iterative DFS in node order.
    fn find_cycle(&self) -> Option<Vec<(NodeId, NodeId)>> {
        let adj = self.adjacency();
        let n = self.n_nodes();
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; n];
        let mut parent = vec![usize::MAX; n];
        for root in 0..n {
            if state[root] != 0 {
                continue;
            }
            let mut stack = vec![(root, 0usize)];
            state[root] = 1;
            while let Some(&mut (u, ref mut next)) = stack.last_mut() {
                if *next < adj[u].len() {
                    let v = adj[u][*next].0;
                    *next += 1;
                    match state[v] {
                        0 => {
                            state[v] = 1;
                            parent[v] = u;
                            stack.push((v, 0));
                        }
                        1 => {
                            let mut cycle = vec![(u, v)];
                            let mut x = u;
                            while x != v {
                                let p = parent[x];
                                cycle.push((p, x));
                                x = p;
                            }
                            return Some(cycle);
                        }
                        _ => {}
                    }
                } else {
                    state[u] = 2;
                    stack.pop();
                }
            }
        }
        None
    }
}

/// Chains each bag's ranking `P_1 → … → P_L → Class_c*` with edge weight
/// `impact × VE(zone of the source)`, summing repeated edges across bags.
/// Bags with no surviving predicate contribute nothing.
pub fn build_graph(
    bags: &[BagResult],
    zone_models: &[ZoneModel],
    predicates: &PredicateSet,
    seed: u64,
) -> ExplanationGraph {
    let n = predicates.len();
    let mut acc: BTreeMap<(NodeId, NodeId), f64> = BTreeMap::new();
    for bag in bags {
        let Some(class) = bag.terminal_class else { continue };
        for (l, entry) in bag.entries.iter().enumerate() {
            let ve = zone_models[predicates.predicates[entry.predicate].zone_index].variance_explained;
            let target = match bag.entries.get(l + 1) {
                Some(next) => next.predicate,
                None => n + class as usize,
            };
            *acc.entry((entry.predicate, target)).or_insert(0.0) += entry.impact * ve;
        }
    }
    ExplanationGraph::from_accumulated(seed, n, acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::BagEntry;
    use crate::predicates::{Direction, Predicate};
    use ndarray::Array2;

    fn set(n: usize) -> PredicateSet {
        PredicateSet {
            predicates: (0..n)
                .map(|j| Predicate {
                    zone: "z".into(),
                    zone_index: 0,
                    direction: Direction::Gt,
                    tau: j as f64,
                    quantile_level: 0.5,
                })
                .collect(),
            indicator: Array2::from_elem((1, n), true),
        }
    }

    fn zones(ve: f64) -> Vec<ZoneModel> {
        vec![ZoneModel {
            zone_name: "z".into(),
            indices: vec![0, 1],
            mean: vec![0.0; 2],
            loading: vec![1.0, 0.0],
            variance_explained: ve,
        }]
    }

    fn bag(ranked: &[(usize, f64)], class: u8) -> BagResult {
        BagResult {
            bag: 0,
            entries: ranked
                .iter()
                .map(|&(p, imp)| BagEntry { predicate: p, support: 1, raw_impact: imp, impact: imp })
                .collect(),
            terminal_class: Some(class),
        }
    }

    #[test]
    fn single_bag_chain() {
        let g = build_graph(&[bag(&[(0, 2.0), (1, 4.0)], 1)], &zones(1.0), &set(2), 0);
        assert_eq!(g.edges.len(), 2);
        assert_eq!(g.edges[&(0, 1)], 2.0);
        assert_eq!(g.edges[&(1, 3)], 4.0);
    }

    #[test]
    fn weights_scale_with_variance_explained() {
        let g = build_graph(&[bag(&[(0, 2.0), (1, 4.0)], 0)], &zones(0.5), &set(2), 0);
        assert_eq!(g.edges[&(0, 1)], 1.0);
        assert_eq!(g.edges[&(1, 2)], 2.0);
    }

    #[test]
    fn repeated_edges_accumulate() {
        let g = build_graph(
            &[bag(&[(0, 2.0), (1, 1.0)], 0), bag(&[(0, 3.0), (1, 1.0)], 0)],
            &zones(1.0),
            &set(2),
            0,
        );
        assert_eq!(g.edges[&(0, 1)], 5.0);
    }

    #[test]
    fn opposite_edges_keep_heavier() {
        let g = build_graph(
            &[bag(&[(0, 5.0), (1, 1.0)], 0), bag(&[(1, 3.0), (0, 1.0)], 0)],
            &zones(1.0),
            &set(2),
            0,
        );
        assert_eq!(g.edges.get(&(0, 1)), Some(&5.0));
        assert_eq!(g.edges.get(&(1, 0)), None);
    }

    #[test]
    fn opposite_tie_keeps_lower_source() {
        let g = build_graph(
            &[bag(&[(1, 3.0), (0, 1.0)], 0), bag(&[(0, 3.0), (1, 1.0)], 0)],
            &zones(1.0),
            &set(2),
            0,
        );
        assert!(g.edges.contains_key(&(0, 1)));
        assert!(!g.edges.contains_key(&(1, 0)));
    }

    #[test]
    fn three_cycle_is_pruned_at_lightest_edge() {
        let g = build_graph(
            &[
                bag(&[(0, 3.0), (1, 2.0), (2, 1.0)], 0),
                bag(&[(2, 0.5), (0, 0.1)], 0),
            ],
            &zones(1.0),
            &set(3),
            0,
        );
        assert_eq!(g.pruned.len(), 1);
        assert_eq!((g.pruned[0].source, g.pruned[0].target), (2, 0));
        assert!(g.find_cycle().is_none());
    }

    #[test]
    fn empty_bags_give_empty_graph() {
        let empty = BagResult { bag: 0, entries: vec![], terminal_class: None };
        let g = build_graph(&[empty], &zones(1.0), &set(3), 0);
        assert!(g.edges.is_empty());
        assert_eq!(g.n_nodes(), 5);
    }
}
