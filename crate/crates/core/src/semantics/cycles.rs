//! Dependency behaviour of transitions fired on cycles of the dependency
//! reachability graph.
//!
//! When a firing sequence returns to the dependency marking it started from,
//! every transition fired along it must produce tokens with exactly the
//! dependencies of the tokens it consumed (on 1-safe nets). The checker looks
//! for counterexamples, and [`dependency_classes`] partitions the transitions
//! of a cycle by those dependency sets.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use super::{consumed_deps, fire_step, ReachGraph, SemanticsError, Step};
use crate::net::{DependencyMarking, LabelSet, LabelledNet, TransIdx};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleViolation {
    /// Edge indices of a cycle through the offending edge, starting with it.
    pub cycle: Vec<usize>,
    pub transition: TransIdx,
    pub consumed: Vec<LabelSet>,
    pub produced: Vec<LabelSet>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct DependencyClass {
    pub labels: LabelSet,
    pub transitions: BTreeSet<TransIdx>,
}

fn all_equal(sets: &[LabelSet]) -> bool {
    sets.windows(2).all(|w| w[0] == w[1])
}

fn consistent(consumed: &[LabelSet], produced: &[LabelSet]) -> bool {
    all_equal(consumed)
        && all_equal(produced)
        && match (consumed.first(), produced.first()) {
            (Some(c), Some(p)) => c == p,
            _ => true,
        }
}

fn produced_deps(net: &LabelledNet, after: &DependencyMarking, t: TransIdx) -> Vec<LabelSet> {
    net.post_t(t).iter().filter_map(|&p| after.deps(p)).collect()
}

/// Strongly connected component id per node (iterative Tarjan). Components
/// are numbered sinks first, so every edge goes from a component to one with
/// an equal or smaller id.
pub(crate) fn scc_ids(n: usize, succ: &[Vec<usize>]) -> Vec<usize> {
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![usize::MAX; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next_index;
        low[root] = next_index;
        next_index += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if *pos < succ[v].len() {
                let w = succ[v][*pos];
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = next_index;
                    low[w] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent] = low[parent].min(low[v]);
                }
                if low[v] == index[v] {
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp[w] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
            }
        }
    }
    comp
}

/// Shortest edge path from `from` to `to` (empty when equal).
fn edge_path(graph: &ReachGraph, out: &[Vec<usize>], from: usize, to: usize) -> Option<Vec<usize>> {
    let mut via: Vec<Option<usize>> = vec![None; graph.nodes.len()];
    let mut seen = vec![false; graph.nodes.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v == to {
            let mut path = Vec::new();
            let mut cur = to;
            while cur != from {
                let e = via[cur].expect("bfs parent");
                path.push(e);
                cur = graph.edges[e].source;
            }
            path.reverse();
            return Some(path);
        }
        for &e in &out[v] {
            let w = graph.edges[e].target;
            if !seen[w] {
                seen[w] = true;
                via[w] = Some(e);
                queue.push_back(w);
            }
        }
    }
    None
}

/// Checks every edge that lies on some cycle of a complete dependency graph.
///
/// An edge lies on a cycle exactly when its endpoints share a strongly
/// connected component, so every transition firing on every cycle is covered
/// without enumerating cycles. Each violation carries one witness cycle.
pub fn check_cycle_dependency(
    net: &LabelledNet,
    graph: &ReachGraph,
) -> Result<Vec<CycleViolation>, SemanticsError> {
    if graph.truncated {
        return Err(SemanticsError::TruncatedGraph);
    }
    if !graph.dependency {
        return Err(SemanticsError::PlainGraph);
    }
    let out = graph.successors();
    let succ: Vec<Vec<usize>> = out
        .iter()
        .map(|es| es.iter().map(|&e| graph.edges[e].target).collect())
        .collect();
    let comp = scc_ids(graph.nodes.len(), &succ);

    let mut violations = Vec::new();
    for (ei, e) in graph.edges.iter().enumerate() {
        if comp[e.source] != comp[e.target] {
            continue;
        }
        let before = &graph.nodes[e.source];
        let after = &graph.nodes[e.target];
        for t in e.step.iter() {
            let consumed = consumed_deps(net, before, t);
            let produced = produced_deps(net, after, t);
            if consistent(&consumed, &produced) {
                continue;
            }
            let mut cycle = vec![ei];
            cycle.extend(edge_path(graph, &out, e.target, e.source).expect("same component"));
            violations.push(CycleViolation {
                cycle,
                transition: t,
                consumed,
                produced,
            });
        }
    }
    Ok(violations)
}

/// Partitions the transitions fired along `cycle` by the dependency set of
/// the tokens they produced, or of the tokens they consumed when they produce
/// none. `cycle[i]` is a marking and the step fired from it; the last step
/// must lead back to `cycle[0].0`.
pub fn dependency_classes(
    net: &LabelledNet,
    cycle: &[(DependencyMarking, Step)],
) -> Result<Vec<DependencyClass>, SemanticsError> {
    if cycle.is_empty() {
        return Err(SemanticsError::NotACycle("empty sequence".into()));
    }
    let mut classes: BTreeMap<LabelSet, BTreeSet<TransIdx>> = BTreeMap::new();
    for (i, (m, step)) in cycle.iter().enumerate() {
        let next = fire_step(net, m, step)?;
        let expected = &cycle[(i + 1) % cycle.len()].0;
        if &next != expected {
            return Err(SemanticsError::NotACycle(format!(
                "step {} from position {i} reaches [{}], expected [{}]",
                step.display(net),
                next.display(net),
                expected.display(net)
            )));
        }
        for t in step.iter() {
            let mut sets = produced_deps(net, &next, t);
            if sets.is_empty() {
                sets = consumed_deps(net, m, t);
            }
            if sets.is_empty() {
                sets.push(LabelSet::EMPTY);
            }
            for s in sets {
                classes.entry(s).or_default().insert(t);
            }
        }
    }
    Ok(classes
        .into_iter()
        .map(|(labels, transitions)| DependencyClass {
            labels,
            transitions,
        })
        .collect())
}
