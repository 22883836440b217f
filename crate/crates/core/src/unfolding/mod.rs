//! Processes (occurrence nets folded onto the original net), their
//! enumeration up to a visible-event bound, and visible pomsets.

mod pomset;
mod process;

pub use pomset::{canonicalize, Lpo, OrderError, Pomset};
pub use process::{
    enumerate_processes, extend_process, initial_process, is_maximal, visible_pomset,
    Condition, EnumeratedProcess, Event, Process, ProcessKey, Unfolding,
};

/// Default cap on events per process for a visible bound `k`: `10k + 50`.
pub fn default_event_limit(visible_bound: usize) -> usize {
    visible_bound.saturating_mul(10).saturating_add(50)
}
