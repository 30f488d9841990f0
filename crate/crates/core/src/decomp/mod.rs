//! Tree decompositions: parsing and validation, the min-fill heuristic, and
//! the conversion to nice decompositions with deferred introduce-edge nodes.

mod minfill;
mod nice;
mod td;

pub use minfill::{min_fill_decompose, min_fill_order};
pub use nice::{
    make_nice_deferred, nice_min_fill, validate_nice, write_nice_debug, NiceDecomposition, NiceNode, NiceViolation,
    NodeKind,
};
pub use td::{
    grid_branched_decomposition, grid_path_decomposition, parse_td, validate_td, write_td, TdViolation,
    TreeDecomposition,
};
