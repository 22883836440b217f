use std::collections::{HashSet, VecDeque};

use super::{LabelledNet, Marking, TransIdx};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ContactVerdict {
    /// No contact situation among the `markings` reachable plain markings.
    ContactFree { markings: usize },
    /// At `marking`, `transition` has its preset covered while one of its
    /// postplaces outside the preset is already marked.
    Violation {
        marking: Marking,
        transition: TransIdx,
    },
    LimitExceeded { explored: usize },
}

impl ContactVerdict {
    pub fn is_contact_free(&self) -> bool {
        matches!(self, ContactVerdict::ContactFree { .. })
    }
}

fn contact(net: &LabelledNet, m: &Marking, t: TransIdx) -> bool {
    let pre = net.pre_t(t);
    pre.iter().all(|&p| m.contains(p))
        && net.post_t(t).iter().any(|&p| m.contains(p) && !pre.contains(&p))
}

/// Breadth-first search over reachable plain markings, reporting the first
/// contact situation found.
///
/// Single-transition firings reach every marking that steps reach, because
/// any enabled step can be serialised.
pub fn check_contact_free(net: &LabelledNet, state_limit: usize) -> ContactVerdict {
    let state_limit = state_limit.max(1);
    let init = net.initial_marking().clone();
    let mut seen: HashSet<Marking> = HashSet::from([init.clone()]);
    let mut queue = VecDeque::from([init]);
    while let Some(m) = queue.pop_front() {
        for t in net.transitions() {
            if contact(net, &m, t) {
                return ContactVerdict::Violation {
                    marking: m,
                    transition: t,
                };
            }
        }
        for t in net.transitions() {
            if !net.enabled_at(&m, t) {
                continue;
            }
            let next = net.fire_plain(&m, t);
            if seen.contains(&next) {
                continue;
            }
            if seen.len() >= state_limit {
                return ContactVerdict::LimitExceeded {
                    explored: seen.len(),
                };
            }
            seen.insert(next.clone());
            queue.push_back(next);
        }
    }
    ContactVerdict::ContactFree {
        markings: seen.len(),
    }
}
