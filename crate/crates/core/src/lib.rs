//! Causal semantics for 1-safe labelled Petri nets.

pub mod canon;
pub mod cli;
pub mod distributability;
pub mod equivalence;
pub mod net;
pub mod semantics;
pub mod transforms;
pub mod unfolding;
