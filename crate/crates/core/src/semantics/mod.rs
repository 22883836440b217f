//! Dependency-marking execution of labelled nets.
//!
//! Every token carries the set of visible labels of the transitions that
//! causally contributed to it. Firing a step consumes the preset tokens and
//! produces tokens whose dependencies are the union of the consumed ones plus
//! the firing transition's own label (τ contributes nothing).

mod cycles;
mod reach;

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::net::{DepToken, DependencyMarking, LabelSet, LabelledNet, NetError, TransIdx};

pub(crate) use cycles::scc_ids;
pub use cycles::{check_cycle_dependency, dependency_classes, CycleViolation, DependencyClass};
pub use reach::{explore_reachable, Edge, ReachGraph, DEFAULT_STATE_LIMIT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("step {0} is not enabled")]
    NotEnabled(String),
    #[error("the reachability graph was truncated at the state limit")]
    TruncatedGraph,
    #[error("the reachability graph was built without dependencies")]
    PlainGraph,
    #[error("the step sequence does not return to its first marking: {0}")]
    NotACycle(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("state limit of {0} markings exceeded")]
pub struct LimitExceeded(pub usize);

/// [`explore_reachable`], failing instead of returning a truncated graph.
pub fn explore_complete(
    net: &LabelledNet,
    dependency: bool,
    state_limit: usize,
) -> Result<ReachGraph, LimitExceeded> {
    let g = explore_reachable(net, dependency, state_limit);
    if g.truncated {
        Err(LimitExceeded(state_limit))
    } else {
        Ok(g)
    }
}

/// A nonempty set of transitions fired together.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Step(BTreeSet<TransIdx>);

impl Step {
    pub fn new<I: IntoIterator<Item = TransIdx>>(transitions: I) -> Result<Self, NetError> {
        let set: BTreeSet<TransIdx> = transitions.into_iter().collect();
        if set.is_empty() {
            return Err(NetError::EmptyStep);
        }
        Ok(Step(set))
    }

    pub fn single(t: TransIdx) -> Self {
        Step(BTreeSet::from([t]))
    }

    pub fn from_ids(net: &LabelledNet, ids: &[&str]) -> Result<Self, NetError> {
        let ts = ids
            .iter()
            .map(|id| net.require_transition(id))
            .collect::<Result<Vec<_>, _>>()?;
        Step::new(ts)
    }

    pub fn iter(&self) -> impl Iterator<Item = TransIdx> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, t: TransIdx) -> bool {
        self.0.contains(&t)
    }

    /// `l(G)` as a sorted multiset; τ is written `tau`.
    pub fn labels(&self, net: &LabelledNet) -> Vec<String> {
        let mut ls: Vec<String> = self.iter().map(|t| net.label(t).to_string()).collect();
        ls.sort();
        ls
    }

    pub fn display<'a>(&'a self, net: &'a LabelledNet) -> impl fmt::Display + 'a {
        crate::net::DisplayWith(move |f: &mut fmt::Formatter<'_>| {
            let names: Vec<&str> = self.iter().map(|t| net.transition_name(t)).collect();
            f.write_str(&names.join(","))
        })
    }
}

fn transition_enabled(net: &LabelledNet, m: &DependencyMarking, t: TransIdx) -> bool {
    let pre = net.pre_t(t);
    pre.iter().all(|&p| m.is_marked(p))
        && net
            .post_t(t)
            .iter()
            .all(|&p| !m.is_marked(p) || pre.contains(&p))
}

fn independent(net: &LabelledNet, t: TransIdx, u: TransIdx) -> bool {
    let disjoint = |a: &[_], b: &[_]| a.iter().all(|x| !b.contains(x));
    disjoint(net.pre_t(t), net.pre_t(u)) && disjoint(net.post_t(t), net.post_t(u))
}

/// Whether the step may fire at `m`: every member is enabled (preset marked,
/// no contact on its postset) and members pairwise share neither preplaces
/// nor postplaces.
pub fn step_enabled(net: &LabelledNet, m: &DependencyMarking, step: &Step) -> bool {
    let ts: Vec<TransIdx> = step.iter().collect();
    ts.iter().all(|&t| transition_enabled(net, m, t))
        && ts
            .iter()
            .enumerate()
            .all(|(i, &t)| ts[i + 1..].iter().all(|&u| independent(net, t, u)))
}

/// Fires an enabled step.
pub fn fire_step(
    net: &LabelledNet,
    m: &DependencyMarking,
    step: &Step,
) -> Result<DependencyMarking, SemanticsError> {
    if !step_enabled(net, m, step) {
        return Err(SemanticsError::NotEnabled(step.display(net).to_string()));
    }
    Ok(fire_unchecked(net, m, step))
}

fn fire_unchecked(net: &LabelledNet, m: &DependencyMarking, step: &Step) -> DependencyMarking {
    let mut next = m.clone();
    let mut produced = Vec::new();
    for t in step.iter() {
        let mut deps = net.label_set(t);
        for &p in net.pre_t(t) {
            deps = deps.union(m.deps(p).expect("preset is marked"));
        }
        produced.extend(net.post_t(t).iter().map(|&place| DepToken { place, deps }));
    }
    for t in step.iter() {
        for &p in net.pre_t(t) {
            next.remove(p);
        }
    }
    for tok in produced {
        let fresh = next.insert(tok);
        assert!(fresh, "two tokens on one place: the net is not 1-safe here");
    }
    next
}

/// All transitions that may fire alone at `m`.
pub fn enabled_transitions(net: &LabelledNet, m: &DependencyMarking) -> Vec<TransIdx> {
    net.transitions()
        .filter(|&t| transition_enabled(net, m, t))
        .collect()
}

/// Every enabled step at `m`, singletons first, then by size and members.
pub fn enabled_steps(net: &LabelledNet, m: &DependencyMarking) -> Vec<Step> {
    let enabled = enabled_transitions(net, m);
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn extend(
        net: &LabelledNet,
        enabled: &[TransIdx],
        from: usize,
        current: &mut Vec<TransIdx>,
        out: &mut Vec<Step>,
    ) {
        for i in from..enabled.len() {
            let t = enabled[i];
            if current.iter().all(|&u| independent(net, t, u)) {
                current.push(t);
                out.push(Step(current.iter().copied().collect()));
                extend(net, enabled, i + 1, current, out);
                current.pop();
            }
        }
    }
    extend(net, &enabled, 0, &mut current, &mut out);
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// `M1 -A-> M2`: successors via steps whose label multiset is exactly `labels`.
/// Such steps contain only visible transitions.
pub fn labelled_step(
    net: &LabelledNet,
    m: &DependencyMarking,
    labels: &[&str],
) -> BTreeSet<DependencyMarking> {
    let mut wanted: Vec<&str> = labels.to_vec();
    wanted.sort_unstable();
    if wanted.is_empty() {
        return BTreeSet::new();
    }
    enabled_steps(net, m)
        .into_iter()
        .filter(|g| g.len() == wanted.len() && g.iter().all(|t| net.is_visible(t)))
        .filter(|g| g.labels(net) == wanted)
        .map(|g| fire_unchecked(net, m, &g))
        .collect()
}

/// Reflexive-transitive closure under single τ-transition steps.
pub fn tau_closure(
    net: &LabelledNet,
    from: impl IntoIterator<Item = DependencyMarking>,
) -> BTreeSet<DependencyMarking> {
    let mut seen: HashSet<DependencyMarking> = HashSet::new();
    let mut queue: VecDeque<DependencyMarking> = VecDeque::new();
    for m in from {
        if seen.insert(m.clone()) {
            queue.push_back(m);
        }
    }
    while let Some(m) = queue.pop_front() {
        for t in enabled_transitions(net, &m) {
            if net.is_visible(t) {
                continue;
            }
            let next = fire_unchecked(net, &m, &Step::single(t));
            if seen.insert(next.clone()) {
                queue.push_back(next);
            }
        }
    }
    seen.into_iter().collect()
}

/// `M1 =a1 a2 … an=> M2`: τ-closure around singleton visible steps.
///
/// The τ-closure is finite for finite 1-safe nets since dependency markings
/// range over a finite set.
pub fn weak_step(
    net: &LabelledNet,
    m: &DependencyMarking,
    sigma: &[&str],
) -> BTreeSet<DependencyMarking> {
    let mut current = tau_closure(net, [m.clone()]);
    for &a in sigma {
        let mut after = BTreeSet::new();
        for m in &current {
            after.extend(labelled_step(net, m, &[a]));
        }
        if after.is_empty() {
            return after;
        }
        current = tau_closure(net, after);
    }
    current
}

/// Group dependency sets by their plain places; handy for assertions.
pub fn dependency_view(net: &LabelledNet, m: &DependencyMarking) -> BTreeMap<String, Vec<String>> {
    m.tokens()
        .map(|tok| {
            (
                net.place_name(tok.place).to_owned(),
                net.label_set_names(tok.deps).into_iter().map(str::to_owned).collect(),
            )
        })
        .collect()
}

/// Dependencies of the tokens `t` consumes at `m`, one entry per preplace.
pub(crate) fn consumed_deps(net: &LabelledNet, m: &DependencyMarking, t: TransIdx) -> Vec<LabelSet> {
    net.pre_t(t).iter().filter_map(|&p| m.deps(p)).collect()
}
