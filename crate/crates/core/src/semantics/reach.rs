use std::collections::{HashMap, VecDeque};
use std::fmt::Write;

use super::{enabled_steps, fire_unchecked, Step};
use crate::net::{DependencyMarking, LabelledNet, Marking};

pub const DEFAULT_STATE_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub source: usize,
    pub step: Step,
    /// Label multiset of the step, sorted; τ is written `tau`.
    pub labels: Vec<String>,
    pub target: usize,
}

/// Reachability graph over dependency markings, or over plain markings when
/// built with `dependency = false` (every token then has empty dependencies).
///
/// Node 0 is the root `M0 × {∅}`. Nodes are numbered in breadth-first
/// discovery order.
#[derive(Debug, Clone)]
pub struct ReachGraph {
    pub dependency: bool,
    pub nodes: Vec<DependencyMarking>,
    pub edges: Vec<Edge>,
    /// Set when exploration stopped at the state limit.
    pub truncated: bool,
    /// `(2^|visible labels| + 1)^|S|` for dependency graphs, `2^|S|` for plain
    /// ones; `None` if it does not fit in 128 bits.
    pub bound: Option<u128>,
    index: HashMap<DependencyMarking, usize>,
}

impl ReachGraph {
    pub fn root(&self) -> &DependencyMarking {
        &self.nodes[0]
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn index_of(&self, m: &DependencyMarking) -> Option<usize> {
        self.index.get(m).copied()
    }

    pub fn marking(&self, i: usize) -> Marking {
        self.nodes[i].places()
    }

    pub fn bound_respected(&self) -> bool {
        match self.bound {
            Some(b) => (self.nodes.len() as u128) <= b,
            None => true,
        }
    }

    /// Outgoing edges per node, in edge order.
    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nodes.len()];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.source].push(i);
        }
        out
    }

    /// Deterministic text dump: node lines, then edge lines.
    pub fn dump(&self, net: &LabelledNet) -> String {
        let mut out = String::new();
        for (i, m) in self.nodes.iter().enumerate() {
            let body = m.display(net).to_string();
            if body.is_empty() {
                let _ = writeln!(out, "node {i}:");
            } else {
                let _ = writeln!(out, "node {i}: {body}");
            }
        }
        for e in self.sorted_edges() {
            let _ = writeln!(
                out,
                "edge {} -[{}|{}]-> {}",
                e.source,
                e.step.display(net),
                e.labels.join(","),
                e.target
            );
        }
        out
    }

    /// Tab-separated records, one per node and per edge.
    pub fn dump_tsv(&self, net: &LabelledNet) -> String {
        let mut out = String::new();
        for (i, m) in self.nodes.iter().enumerate() {
            let _ = write!(out, "node\t{i}");
            for tok in m.tokens() {
                let _ = write!(
                    out,
                    "\t{}{{{}}}",
                    net.place_name(tok.place),
                    net.label_set_names(tok.deps).join(",")
                );
            }
            out.push('\n');
        }
        for e in self.sorted_edges() {
            let _ = writeln!(
                out,
                "edge\t{}\t{}\t{}\t{}",
                e.source,
                e.step.display(net),
                e.labels.join(","),
                e.target
            );
        }
        out
    }

    fn sorted_edges(&self) -> Vec<&Edge> {
        let mut edges: Vec<&Edge> = self.edges.iter().collect();
        edges.sort_by(|a, b| {
            (a.source, a.step.len(), &a.step, a.target).cmp(&(b.source, b.step.len(), &b.step, b.target))
        });
        edges
    }
}

fn state_bound(net: &LabelledNet, dependency: bool) -> Option<u128> {
    let per_place: u128 = if dependency {
        1u128
            .checked_shl(net.visible_labels().len() as u32)?
            .checked_add(1)?
    } else {
        2
    };
    per_place.checked_pow(u32::try_from(net.place_count()).ok()?)
}

/// Breadth-first closure of the root under every enabled step.
///
/// All enabled steps (singletons and larger independent sets) produce edges;
/// nodes are deduplicated by value. At most `state_limit` nodes are created;
/// hitting the limit returns the partial graph with `truncated` set.
pub fn explore_reachable(net: &LabelledNet, dependency: bool, state_limit: usize) -> ReachGraph {
    let state_limit = state_limit.max(1);
    let root = net.initial_dependency_marking();
    let mut graph = ReachGraph {
        dependency,
        nodes: vec![root.clone()],
        edges: Vec::new(),
        truncated: false,
        bound: state_bound(net, dependency),
        index: HashMap::from([(root, 0)]),
    };
    let mut queue = VecDeque::from([0usize]);
    'outer: while let Some(i) = queue.pop_front() {
        let m = graph.nodes[i].clone();
        for step in enabled_steps(net, &m) {
            let mut next = fire_unchecked(net, &m, &step);
            if !dependency {
                next = next.forget_deps();
            }
            let target = match graph.index.get(&next) {
                Some(&j) => j,
                None => {
                    if graph.nodes.len() >= state_limit {
                        graph.truncated = true;
                        break 'outer;
                    }
                    let j = graph.nodes.len();
                    graph.index.insert(next.clone(), j);
                    graph.nodes.push(next);
                    queue.push_back(j);
                    j
                }
            };
            let labels = step.labels(net);
            graph.edges.push(Edge {
                source: i,
                step,
                labels,
                target,
            });
        }
    }
    graph
}
