use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::build::{EdgeRecord, ExplanationGraph};
use super::ranking::{PredicateRanking, ZoneRanking};
use crate::numfmt::g17;
use crate::predicates::{Direction, PredicateSet};

fn node_label(graph: &ExplanationGraph, predicates: &PredicateSet, node: usize) -> String {
    if graph.is_terminal(node) {
        format!("Class_{}", node - graph.n_predicates)
    } else {
        predicates.predicates[node].label()
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Graphviz rendering. Edge labels carry weights at four decimals.
pub fn to_dot(graph: &ExplanationGraph, predicates: &PredicateSet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "digraph smx_seed_{} {{", graph.seed);
    out.push_str("  rankdir=LR;\n");
    for v in 0..graph.n_nodes() {
        let label = dot_escape(&node_label(graph, predicates, v));
        if graph.is_terminal(v) {
            let _ = writeln!(out, "  n{v} [label=\"{label}\", shape=box];");
        } else {
            let _ = writeln!(out, "  n{v} [label=\"{label}\"];");
        }
    }
    for (&(u, v), &w) in &graph.edges {
        let _ = writeln!(out, "  n{u} -> n{v} [label=\"{w:.4}\"];");
    }
    out.push_str("}\n");
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphNode {
    pub id: usize,
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub zone: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub direction: Option<Direction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<u8>,
}

/// Lossless JSON form of a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub seed: u64,
    pub nodes: Vec<GraphNode>,
    pub edges: Vec<EdgeRecord>,
    pub pruned: Vec<EdgeRecord>,
}

impl GraphJson {
    pub fn to_graph(&self) -> ExplanationGraph {
        let n_predicates = self.nodes.iter().filter(|n| n.class.is_none()).count();
        let mut g = ExplanationGraph::empty(self.seed, n_predicates);
        for e in &self.edges {
            g.edges.insert((e.source, e.target), e.weight);
        }
        g.pruned = self.pruned.clone();
        g
    }
}

pub fn graph_json(graph: &ExplanationGraph, predicates: &PredicateSet) -> GraphJson {
    let nodes = (0..graph.n_nodes())
        .map(|v| {
            if graph.is_terminal(v) {
                GraphNode {
                    id: v,
                    label: node_label(graph, predicates, v),
                    zone: None,
                    direction: None,
                    tau: None,
                    class: Some((v - graph.n_predicates) as u8),
                }
            } else {
                let p = &predicates.predicates[v];
                GraphNode {
                    id: v,
                    label: p.label(),
                    zone: Some(p.zone.clone()),
                    direction: Some(p.direction),
                    tau: Some(p.tau),
                    class: None,
                }
            }
        })
        .collect();
    GraphJson {
        seed: graph.seed,
        nodes,
        edges: graph
            .edges
            .iter()
            .map(|(&(source, target), &weight)| EdgeRecord { source, target, weight })
            .collect(),
        pruned: graph.pruned.clone(),
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// `rank,predicate,zone,direction,tau,lrc_mean,lrc_seed_1..k`
pub fn ranking_csv(ranking: &PredicateRanking, predicates: &PredicateSet) -> String {
    let mut out = String::from("rank,predicate,zone,direction,tau,lrc_mean");
    for k in 1..=ranking.seeds.len() {
        let _ = write!(out, ",lrc_seed_{k}");
    }
    out.push('\n');
    for (i, e) in ranking.entries.iter().enumerate() {
        let p = &predicates.predicates[e.predicate];
        let _ = write!(
            out,
            "{},{},{},{},{},{}",
            i + 1,
            csv_field(&p.label()),
            csv_field(&p.zone),
            p.direction.symbol(),
            g17(p.tau),
            g17(e.mean_lrc)
        );
        for v in &e.per_seed {
            let _ = write!(out, ",{}", g17(*v));
        }
        out.push('\n');
    }
    out
}

/// `rank,zone,ranked,top_predicate,lrc_mean`
pub fn zone_ranking_csv(zones: &ZoneRanking, predicates: &PredicateSet) -> String {
    let mut out = String::from("rank,zone,ranked,top_predicate,lrc_mean\n");
    for (i, z) in zones.zones.iter().enumerate() {
        let top = z
            .top_predicate
            .map(|j| csv_field(&predicates.predicates[j].label()))
            .unwrap_or_default();
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            i + 1,
            csv_field(&z.zone),
            z.ranked,
            top,
            g17(z.mean_lrc)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::aggregate_seeds;
    use crate::predicates::Predicate;
    use ndarray::Array2;

    fn setup() -> (ExplanationGraph, PredicateSet) {
        let preds = PredicateSet {
            predicates: vec![
                Predicate { zone: "Feature 1".into(), zone_index: 0, direction: Direction::Gt, tau: 3.2712, quantile_level: 0.8 },
                Predicate { zone: "Feature 2".into(), zone_index: 1, direction: Direction::Le, tau: -0.1 / 3.0, quantile_level: 0.2 },
            ],
            indicator: Array2::from_elem((1, 2), true),
        };
        let mut g = ExplanationGraph::empty(7, 2);
        g.edges.insert((0, 1), 0.1 + 0.2);
        g.edges.insert((1, 3), 2.0 / 3.0);
        (g, preds)
    }

    #[test]
    fn dot_labels() {
        let (g, p) = setup();
        let dot = to_dot(&g, &p);
        assert!(dot.contains("n0 [label=\"Feature 1 > 3.27\"];"));
        assert!(dot.contains("n1 [label=\"Feature 2 <= -0.03\"];"));
        assert!(dot.contains("n3 [label=\"Class_1\", shape=box];"));
        assert!(dot.contains("n1 -> n3 [label=\"0.6667\"];"));
    }

    #[test]
    fn json_twin_is_lossless() {
        let (g, p) = setup();
        let text = serde_json::to_string(&graph_json(&g, &p)).unwrap();
        let back: GraphJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_graph(), g);
        assert_eq!(back.nodes[1].tau.unwrap().to_bits(), (-0.1f64 / 3.0).to_bits());
    }

    #[test]
    fn ranking_csv_layout() {
        let (g, p) = setup();
        let mut g2 = g.clone();
        g2.seed = 8;
        let r = aggregate_seeds(&[g, g2]);
        let csv = ranking_csv(&r, &p);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "rank,predicate,zone,direction,tau,lrc_mean,lrc_seed_1,lrc_seed_2");
        assert!(lines[1].starts_with(&format!("1,Feature 1 > 3.27,Feature 1,>,{},", g17(3.2712))));
        assert_eq!(lines.len(), 3);
    }
}
