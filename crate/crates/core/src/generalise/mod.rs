//! Turning proof traces into strategy graphs and generalising them.

mod derive;
mod layer;
mod loops;
mod pipeline;
mod pushout;
mod tactics;
mod trace_graph;

pub use derive::{
    derive_class, derive_goal_type, derive_is_match, derive_symb_at_pos, fact_roles, prune_links, DeriveError,
};
pub use layer::{find_repeated_segments, layer, segment_name, LayerError};
pub use loops::{apply_loop1, apply_loop2};
pub use pipeline::{generalise_graph, generalise_pipeline, Snapshot};
pub use pushout::{largest_common_subgraph, pushout_gen, GenError, SegmentMatch};
pub use tactics::gen_tactic;
pub use trace_graph::trace_to_graph;
