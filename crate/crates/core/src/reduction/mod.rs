//! 3SUM reductions: a static chain whose full-turn queries decide 3SUM′, and
//! a set-independent canonical chain that is folded into place by dynamic
//! queries before being probed the same way.

pub mod canonical;
pub mod dynamic;
pub mod scaling;
pub mod static_chain;
pub mod threesum;
pub mod transcript;

pub use canonical::{
    build_canonical_chain, encode_targets, fold_hinge, plan_fold, CanonicalChain, Feature, Hinge,
    HingeFoldPlan, Region,
};
pub use dynamic::{encode_sets, run_dynamic_reduction, run_dynamic_reduction_jobs};
pub use scaling::{pad_and_scale, ScaledSets};
pub use static_chain::{build_static_chain, run_static_reduction, run_static_reduction_jobs, StaticConstruction};
pub use threesum::{
    single_triple_back, solve_single, solve_threesum_hashed, solve_threesum_oracle, triple_to_single,
    SetsFile, ThreeSumInstance, Triple, VALUE_BOUND,
};
pub use transcript::{Mode, QueryRecord, ReductionTranscript, Verdict};
