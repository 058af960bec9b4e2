//! Atomic propositions over scenes: the concretization layer between raw
//! trajectory geometry and the rule formulas.

mod labels;
mod params;

pub use labels::{
    accelerate, build_label_traces, colliding, dense, eval, eval_named, follower_of, lane_change,
    lane_end, merged_raw, near, predecessor_of, relational, safe_distance_front,
    safe_distance_rear, speed_diff, LabelError, LabelTrace, PropKind, RelationalLabels,
    TraceCache, ALL_KINDS,
};
pub use params::{ParamError, PredicateParams};
