//! Per-seed predicate graphs, Local Reaching Centrality and the
//! predicate/zone rankings derived from it.

mod build;
mod export;
mod lrc;
mod ranking;

pub use build::{build_graph, EdgeRecord, ExplanationGraph, NodeId};
pub use export::{graph_json, ranking_csv, to_dot, zone_ranking_csv, GraphJson};
pub use lrc::{lrc, lrc_adjacency, lrc_all};
pub use ranking::{aggregate_seeds, zone_ranking, PredicateRanking, RankedPredicate, RankedZone, ZoneRanking};
