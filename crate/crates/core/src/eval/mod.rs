//! Explanation quality metrics: top-k masking faithfulness, domain
//! agreement, simplicity, rank-biased overlap stability, the permutation
//! importance baseline and the exact Wilcoxon signed-rank test.

mod curves;
mod pfi;
mod rbo;
mod stability;
mod wilcoxon;

pub use curves::{
    agreement_curve, faithfulness_curve, simplicity_curve, trapezoid_auc, EvalCurve, ZoneRankedList,
    SIMPLICITY_TOP_N,
};
pub use pfi::{pfi, rank_zones_by_variables, PFI_DEFAULT_REPEATS};
pub use rbo::{rbo, RBO_DEFAULT_DEPTH, RBO_DEFAULT_RHO};
pub use stability::{median, stability_study, InstabilityReport, STABILITY_RUNS};
pub use wilcoxon::{wilcoxon_signed_rank, WilcoxonResult, WILCOXON_MAX_N};
