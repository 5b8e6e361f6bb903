//! Goal-typed proof strategies: terms, a rewriting kernel, goal types,
//! strategy graphs and their generalisation from proof traces.

pub mod cli;
pub mod generalise;
pub mod graph;
pub mod kernel;
pub mod lattice;
pub mod lexer;
pub mod term;
