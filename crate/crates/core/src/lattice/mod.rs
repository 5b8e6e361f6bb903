//! Goal classes, links and goal types, with their meet/join lattices.

mod class;
mod feature;
mod goal_type;
mod link;
pub mod text;

pub use class::{match_class_feature, merge_labels, GoalClass};
pub use feature::{sem, Conjunct, Datum, Feature, FeatureData, Sem};
pub use goal_type::{gen_map, goal_has_type, Goal, GoalType, LatticeError};
pub use link::{match_link_feature, ClassRef, Link, LinkKey};
