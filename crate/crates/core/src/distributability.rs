//! Distributed nets: the concurrency relation, component-based
//! distributability check, and fully reachable pure M substructures.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write;

use crate::net::{LabelledNet, Marking, Node, PlaceIdx, TransIdx};
use crate::semantics::{explore_complete, LimitExceeded};

/// Unordered pairs of distinct transitions that can fire together from some
/// reachable marking. Each pair is stored with the smaller index first.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ConcurrencyRelation {
    pub pairs: BTreeSet<(TransIdx, TransIdx)>,
}

impl ConcurrencyRelation {
    pub fn contains(&self, t: TransIdx, u: TransIdx) -> bool {
        self.pairs.contains(&(t.min(u), t.max(u)))
    }

    pub fn names<'a>(&self, net: &'a LabelledNet) -> BTreeSet<(&'a str, &'a str)> {
        self.pairs
            .iter()
            .map(|&(t, u)| {
                let (x, y) = (net.transition_name(t), net.transition_name(u));
                (x.min(y), x.max(y))
            })
            .collect()
    }
}

pub fn concurrency_relation(
    net: &LabelledNet,
    state_limit: usize,
) -> Result<ConcurrencyRelation, LimitExceeded> {
    let g = explore_complete(net, false, state_limit)?;
    let mut pairs = BTreeSet::new();
    // Every subset of an enabled step is itself an enabled step, so the
    // two-element edges already cover all pairs.
    for e in g.edges.iter().filter(|e| e.step.len() == 2) {
        let ts: Vec<TransIdx> = e.step.iter().collect();
        pairs.insert((ts[0], ts[1]));
    }
    Ok(ConcurrencyRelation { pairs })
}

/// An assignment of every place and transition to a location.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Distribution {
    pub location_of: BTreeMap<Node, usize>,
}

impl Distribution {
    /// Members of every location, places first, each group in index order.
    pub fn locations(&self) -> BTreeMap<usize, Vec<Node>> {
        let mut out: BTreeMap<usize, Vec<Node>> = BTreeMap::new();
        for (&n, &loc) in &self.location_of {
            out.entry(loc).or_default().push(n);
        }
        out
    }

    /// Returns the first violated clause, if any: a node without location,
    /// a transition away from one of its preplaces, or two concurrent
    /// transitions sharing a location.
    pub fn violation(&self, net: &LabelledNet, conc: &ConcurrencyRelation) -> Option<String> {
        let nodes = net
            .places()
            .map(Node::Place)
            .chain(net.transitions().map(Node::Transition));
        for n in nodes {
            if !self.location_of.contains_key(&n) {
                return Some(format!("{} has no location", net.node_name(n)));
            }
        }
        for t in net.transitions() {
            let here = self.location_of[&Node::Transition(t)];
            for &p in net.pre_t(t) {
                if self.location_of[&Node::Place(p)] != here {
                    return Some(format!(
                        "{} is not co-located with its preplace {}",
                        net.transition_name(t),
                        net.place_name(p)
                    ));
                }
            }
        }
        for &(t, u) in &conc.pairs {
            if self.location_of[&Node::Transition(t)] == self.location_of[&Node::Transition(u)] {
                return Some(format!(
                    "concurrent {} and {} share a location",
                    net.transition_name(t),
                    net.transition_name(u)
                ));
            }
        }
        None
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DistributabilityVerdict {
    Distributed(Distribution),
    /// Consecutive transitions share a preplace; the end points are concurrent.
    Chain(Vec<TransIdx>),
}

impl DistributabilityVerdict {
    pub fn is_distributed(&self) -> bool {
        matches!(self, DistributabilityVerdict::Distributed(_))
    }

    pub fn render(&self, net: &LabelledNet) -> String {
        let mut out = String::new();
        match self {
            DistributabilityVerdict::Distributed(d) => {
                out.push_str("DISTRIBUTED\n");
                for (loc, members) in d.locations() {
                    let names: Vec<&str> = members.iter().map(|&n| net.node_name(n)).collect();
                    let _ = writeln!(out, "loc {loc}: {}", names.join(" "));
                }
            }
            DistributabilityVerdict::Chain(chain) => {
                let names: Vec<&str> = chain.iter().map(|&t| net.transition_name(t)).collect();
                out.push_str("NOT DISTRIBUTED\n");
                let _ = writeln!(out, "chain: {}", names.join(" -> "));
                let _ = writeln!(out, "concurrent: ({}, {})", names[0], names[names.len() - 1]);
            }
        }
        out
    }

    pub fn render_tsv(&self, net: &LabelledNet) -> String {
        let mut out = String::new();
        match self {
            DistributabilityVerdict::Distributed(d) => {
                out.push_str("verdict\tdistributed\n");
                for (loc, members) in d.locations() {
                    for n in members {
                        let kind = match n {
                            Node::Place(_) => "place",
                            Node::Transition(_) => "transition",
                        };
                        let _ = writeln!(out, "loc\t{loc}\t{kind}\t{}", net.node_name(n));
                    }
                }
            }
            DistributabilityVerdict::Chain(chain) => {
                out.push_str("verdict\tnot_distributed\n");
                for (i, &t) in chain.iter().enumerate() {
                    let _ = writeln!(out, "chain\t{i}\t{}", net.transition_name(t));
                }
                let _ = writeln!(
                    out,
                    "concurrent\t{}\t{}",
                    net.transition_name(chain[0]),
                    net.transition_name(chain[chain.len() - 1])
                );
            }
        }
        out
    }
}

fn shares_preplace(net: &LabelledNet, t: TransIdx, u: TransIdx) -> bool {
    net.pre_t(t).iter().any(|p| net.pre_t(u).contains(p))
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut root = x;
    while parent[root] != root {
        root = parent[root];
    }
    let mut x = x;
    while parent[x] != root {
        let next = parent[x];
        parent[x] = root;
        x = next;
    }
    root
}

/// Components of the shared-preplace graph, as a component id per
/// transition. Ids are dense and ordered by each component's first
/// transition.
fn components(net: &LabelledNet) -> Vec<usize> {
    let n = net.transition_count();
    let mut parent: Vec<usize> = (0..n).collect();
    for p in net.places() {
        let post = net.post_p(p);
        for w in post.windows(2) {
            let (a, b) = (find(&mut parent, w[0].0), find(&mut parent, w[1].0));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut ids = BTreeMap::new();
    (0..n)
        .map(|t| {
            let root = find(&mut parent, t);
            let next = ids.len();
            *ids.entry(root).or_insert(next)
        })
        .collect()
}

/// Breadth-first shortest path in the shared-preplace graph.
fn chain_between(net: &LabelledNet, from: TransIdx, to: TransIdx) -> Vec<TransIdx> {
    let mut prev: BTreeMap<TransIdx, TransIdx> = BTreeMap::new();
    let mut queue = VecDeque::from([from]);
    let mut seen = BTreeSet::from([from]);
    while let Some(t) = queue.pop_front() {
        if t == to {
            break;
        }
        for u in net.transitions() {
            if !seen.contains(&u) && shares_preplace(net, t, u) {
                seen.insert(u);
                prev.insert(u, t);
                queue.push_back(u);
            }
        }
    }
    let mut path = vec![to];
    while let Some(&p) = prev.get(path.last().expect("nonempty")) {
        path.push(p);
    }
    path.reverse();
    path
}

/// A net is distributed iff no concurrent pair is connected through shared
/// preplaces. Returns a shortest such chain, or a distribution with one
/// location per component.
pub fn check_distributed(
    net: &LabelledNet,
    state_limit: usize,
) -> Result<DistributabilityVerdict, LimitExceeded> {
    let conc = concurrency_relation(net, state_limit)?;
    Ok(verdict_from(net, &conc))
}

pub fn verdict_from(net: &LabelledNet, conc: &ConcurrencyRelation) -> DistributabilityVerdict {
    let comp = components(net);
    if let Some(&(t, u)) = conc.pairs.iter().find(|(t, u)| comp[t.0] == comp[u.0]) {
        return DistributabilityVerdict::Chain(chain_between(net, t, u));
    }
    let mut location_of = BTreeMap::new();
    for t in net.transitions() {
        location_of.insert(Node::Transition(t), comp[t.0]);
    }
    let mut fresh = comp.iter().max().map_or(0, |m| m + 1);
    for p in net.places() {
        let loc = match net.post_p(p).first() {
            Some(t) => comp[t.0],
            None => {
                fresh += 1;
                fresh - 1
            }
        };
        location_of.insert(Node::Place(p), loc);
    }
    DistributabilityVerdict::Distributed(Distribution { location_of })
}

/// Two transitions in conflict with a common third but not with each other,
/// all three jointly enabled at a reachable marking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PureMWitness {
    pub left: TransIdx,
    pub middle: TransIdx,
    pub right: TransIdx,
    pub marking: Marking,
}

impl PureMWitness {
    pub fn render(&self, net: &LabelledNet) -> String {
        format!(
            "({}, {}, {}) @ {}",
            net.transition_name(self.left),
            net.transition_name(self.middle),
            net.transition_name(self.right),
            self.marking.display(net)
        )
    }
}

/// All pure M triples, `left` before `right` by name, each with the first
/// covering marking in breadth-first order.
pub fn find_pure_m(net: &LabelledNet, state_limit: usize) -> Result<Vec<PureMWitness>, LimitExceeded> {
    let g = explore_complete(net, false, state_limit)?;
    let markings: Vec<Marking> = (0..g.node_count()).map(|i| g.marking(i)).collect();
    let mut out = Vec::new();
    let mut ts: Vec<TransIdx> = net.transitions().collect();
    ts.sort_by_key(|&t| net.transition_name(t));
    for &l in &ts {
        for &m in &ts {
            for &r in &ts {
                if net.transition_name(l) >= net.transition_name(r) || m == l || m == r {
                    continue;
                }
                if !shares_preplace(net, l, m)
                    || !shares_preplace(net, m, r)
                    || shares_preplace(net, l, r)
                {
                    continue;
                }
                let need: BTreeSet<PlaceIdx> = [l, m, r]
                    .iter()
                    .flat_map(|&t| net.pre_t(t).iter().copied())
                    .collect();
                if let Some(marking) = markings.iter().find(|mk| need.iter().all(|&p| mk.contains(p))) {
                    out.push(PureMWitness {
                        left: l,
                        middle: m,
                        right: r,
                        marking: marking.clone(),
                    });
                }
            }
        }
    }
    Ok(out)
}
