//! `(delta + 1)`-coloring in the sleeping model.

mod cascade;
mod kw;
mod reduce;

pub use cascade::{
    batched_kw_coloring, cascade_p, h_k_coloring, h_k_in, h_star_coloring, h_star_k,
    sleeping_kw_coloring, CascadeLevel, ColoringRun,
};
pub use kw::{
    batched_kw_reduce_in, kw_merge, sleeping_kw_iterative_in, sleeping_kw_reduce_in,
    BlockedColoring, Epsilon, KwOutcome,
};
pub use reduce::{
    color_classes, defect_step_params, defective_coloring_in, linial_coloring_in, linial_from,
    polynomial_reduce_step, proper_step_params, DefectiveColoringResult, ReduceParams,
    ReduceTarget, ReductionLog, PRIME_CAP,
};
