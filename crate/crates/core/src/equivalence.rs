//! Bounded completed-pomset-trace comparison and local deadlock detection.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::canon::{canonical_form, CanonicalGraph};
use crate::net::{LabelSet, LabelledNet, Marking, PlaceIdx, TransIdx};
use crate::semantics::{explore_complete, scc_ids, LimitExceeded, ReachGraph};
use crate::unfolding::{canonicalize, Lpo, Pomset};

/// Visible pomsets of a net's processes up to `bound` visible events.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundedObservation {
    /// From maximal processes with at most `bound` visible events.
    pub complete: BTreeSet<Pomset>,
    /// From non-maximal or saturated processes with exactly `bound` visible
    /// events.
    pub partial: BTreeSet<Pomset>,
    pub bound: usize,
    pub divergent: bool,
    /// Smallest pomset of a saturated process, when divergent.
    pub divergence_witness: Option<Pomset>,
}

/// The part of a process its observations depend on: visible events with
/// their causal order, and each end place with the visible events below it.
/// Two processes with isomorphic frontiers and equal event counts yield the
/// same pomset, the same maximality and saturation, and extend alike.
#[derive(Debug, Clone)]
struct Frontier {
    labels: Vec<String>,
    /// Strict visible predecessors of each visible event.
    below: Vec<BTreeSet<usize>>,
    end: BTreeMap<PlaceIdx, BTreeSet<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
enum Vertex {
    Event(String),
    Place(PlaceIdx),
}

impl Frontier {
    fn initial(net: &LabelledNet) -> Self {
        Frontier {
            labels: Vec::new(),
            below: Vec::new(),
            end: net.initial_marking().iter().map(|p| (p, BTreeSet::new())).collect(),
        }
    }

    fn marking(&self) -> Marking {
        Marking(self.end.keys().copied().collect())
    }

    fn extend(&self, net: &LabelledNet, t: TransIdx) -> Frontier {
        let mut next = self.clone();
        let mut anc = BTreeSet::new();
        for p in net.pre_t(t) {
            anc.extend(next.end.remove(p).expect("enabled"));
        }
        if net.is_visible(t) {
            next.labels.push(net.label(t).to_string());
            next.below.push(anc.clone());
            anc.insert(next.labels.len() - 1);
        }
        for &q in net.post_t(t) {
            next.end.insert(q, anc.clone());
        }
        next
    }

    fn key(&self) -> CanonicalGraph<Vertex> {
        let n = self.labels.len();
        let mut labels: Vec<Vertex> = self.labels.iter().cloned().map(Vertex::Event).collect();
        let mut edges = Vec::new();
        for (v, below) in self.below.iter().enumerate() {
            edges.extend(below.iter().map(|&u| (u, v)));
        }
        for (i, (&p, anc)) in self.end.iter().enumerate() {
            labels.push(Vertex::Place(p));
            edges.extend(anc.iter().map(|&u| (u, n + i)));
        }
        canonical_form(&labels, &edges)
    }

    fn pomset(&self) -> Pomset {
        let pairs: Vec<(usize, usize)> = self
            .below
            .iter()
            .enumerate()
            .flat_map(|(v, below)| below.iter().map(move |&u| (u, v)))
            .collect();
        canonicalize(&Lpo::new(self.labels.clone(), &pairs).expect("causal order is acyclic"))
    }
}

/// Observations of every process with at most `bound` visible and
/// `event_limit` events. Equal to classifying each process of
/// [`enumerate_processes`](crate::unfolding::enumerate_processes), but
/// processes are merged by frontier and event count, so silent choices
/// inside loops do not multiply the work.
pub fn bounded_observation(net: &LabelledNet, bound: usize, event_limit: usize) -> BoundedObservation {
    let mut obs = BoundedObservation {
        complete: BTreeSet::new(),
        partial: BTreeSet::new(),
        bound,
        divergent: false,
        divergence_witness: None,
    };
    let start = Frontier::initial(net);
    let mut layer = HashMap::from([(start.key(), start)]);
    // Layer i holds the frontiers of processes with exactly i events.
    for events in 0.. {
        if layer.is_empty() {
            break;
        }
        let mut next = HashMap::new();
        for f in layer.values() {
            let visible = f.labels.len();
            let marking = f.marking();
            let mut maximal = true;
            let mut saturated = false;
            for t in net.transitions() {
                if !net.enabled_at(&marking, t) {
                    continue;
                }
                maximal = false;
                if net.is_visible(t) && visible >= bound {
                    continue;
                }
                if events >= event_limit {
                    saturated = true;
                    continue;
                }
                let g = f.extend(net, t);
                next.entry(g.key()).or_insert(g);
            }
            let pomset = f.pomset();
            if saturated {
                obs.divergent = true;
                if obs.divergence_witness.as_ref().is_none_or(|w| pomset < *w) {
                    obs.divergence_witness = Some(pomset.clone());
                }
            }
            if maximal {
                obs.complete.insert(pomset);
            } else if visible == bound {
                obs.partial.insert(pomset);
            }
        }
        layer = next;
    }
    obs
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum WitnessKind {
    Complete,
    Partial,
    Divergence,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::A => "A",
            Side::B => "B",
        })
    }
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WitnessKind::Complete => "complete",
            WitnessKind::Partial => "partial",
            WitnessKind::Divergence => "divergence",
        })
    }
}

/// A pomset observed by one side only (for divergence: a pomset of a
/// saturated process of the divergent side).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub pomset: Pomset,
    pub side: Side,
    pub kind: WitnessKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceVerdict {
    pub bound: usize,
    pub witness: Option<Witness>,
}

impl EquivalenceVerdict {
    pub fn equivalent(&self) -> bool {
        self.witness.is_none()
    }

    pub fn to_tsv(&self) -> String {
        match &self.witness {
            None => format!("verdict\tequivalent\t{}\n", self.bound),
            Some(w) => format!(
                "verdict\tinequivalent\t{}\nwitness\t{}\t{}\n{}",
                self.bound,
                w.side,
                w.kind,
                w.pomset.to_tsv()
            ),
        }
    }
}

impl fmt::Display for EquivalenceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(f, "EQUIVALENT (bound {})", self.bound),
            Some(w) => write!(
                f,
                "INEQUIVALENT (bound {})\nwitness ({}, {}):\n{}",
                self.bound, w.side, w.kind, w.pomset
            ),
        }
    }
}

fn smallest_difference(a: &BTreeSet<Pomset>, b: &BTreeSet<Pomset>) -> Option<(Pomset, Side)> {
    let only_a = a.difference(b).next().map(|p| (p.clone(), Side::A));
    let only_b = b.difference(a).next().map(|p| (p.clone(), Side::B));
    match (only_a, only_b) {
        (Some(x), Some(y)) => Some(if y.0 < x.0 { y } else { x }),
        (x, y) => x.or(y),
    }
}

pub fn compare_observations(a: &BoundedObservation, b: &BoundedObservation) -> EquivalenceVerdict {
    let bound = a.bound;
    let found = smallest_difference(&a.complete, &b.complete)
        .map(|(p, s)| (p, s, WitnessKind::Complete))
        .or_else(|| {
            smallest_difference(&a.partial, &b.partial).map(|(p, s)| (p, s, WitnessKind::Partial))
        })
        .or_else(|| match (a.divergent, b.divergent) {
            (true, false) => Some((a.divergence_witness.clone()?, Side::A, WitnessKind::Divergence)),
            (false, true) => Some((b.divergence_witness.clone()?, Side::B, WitnessKind::Divergence)),
            _ => None,
        });
    EquivalenceVerdict {
        bound,
        witness: found.map(|(pomset, side, kind)| Witness { pomset, side, kind }),
    }
}

/// Compares bounded observations of two nets at the same bound.
pub fn compare(a: &LabelledNet, b: &LabelledNet, bound: usize, event_limit: usize) -> EquivalenceVerdict {
    compare_observations(
        &bounded_observation(a, bound, event_limit),
        &bounded_observation(b, bound, event_limit),
    )
}

/// A reachable marking at which a previously enabled visible label can never
/// occur again while the net still keeps performing visible actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDeadlockWitness {
    pub trace: Vec<TransIdx>,
    pub marking: Marking,
    pub dead_label: String,
    pub live_labels: BTreeSet<String>,
}

impl LocalDeadlockWitness {
    pub fn render(&self, net: &LabelledNet) -> String {
        let trace: Vec<&str> = self.trace.iter().map(|&t| net.transition_name(t)).collect();
        let live: Vec<&str> = self.live_labels.iter().map(String::as_str).collect();
        format!(
            "trace: [{}]\nmarking: {}\ndead: {}\nlive: {}",
            trace.join(", "),
            self.marking.display(net),
            self.dead_label,
            live.join(",")
        )
    }

    pub fn render_tsv(&self, net: &LabelledNet) -> String {
        let trace: Vec<&str> = self.trace.iter().map(|&t| net.transition_name(t)).collect();
        let live: Vec<&str> = self.live_labels.iter().map(String::as_str).collect();
        let marking: Vec<&str> = self.marking.iter().map(|p| net.place_name(p)).collect();
        format!(
            "deadlock\t{}\t{}\t{}\t{}\n",
            trace.join(","),
            marking.join(","),
            self.dead_label,
            live.join(",")
        )
    }
}

/// Singleton-step successor lists of the plain reach graph.
fn single_steps(g: &ReachGraph) -> Vec<Vec<(TransIdx, usize)>> {
    let mut out = vec![Vec::new(); g.node_count()];
    for e in g.edges.iter().filter(|e| e.step.len() == 1) {
        let t = e.step.iter().next().expect("singleton");
        out[e.source].push((t, e.target));
    }
    out
}

fn backward_closure(preds: &[Vec<usize>], to: usize) -> Vec<bool> {
    let mut seen = vec![false; preds.len()];
    seen[to] = true;
    let mut stack = vec![to];
    while let Some(j) = stack.pop() {
        for &i in &preds[j] {
            if !seen[i] {
                seen[i] = true;
                stack.push(i);
            }
        }
    }
    seen
}

/// Shortest firing sequence from `from` to `to`, if any.
fn path(succ: &[Vec<(TransIdx, usize)>], from: usize, to: usize) -> Option<Vec<TransIdx>> {
    let mut prev: Vec<Option<(usize, TransIdx)>> = vec![None; succ.len()];
    let mut seen = vec![false; succ.len()];
    seen[from] = true;
    let mut queue = VecDeque::from([from]);
    while let Some(i) = queue.pop_front() {
        if i == to {
            let mut out = Vec::new();
            let mut cur = to;
            while let Some((j, t)) = prev[cur] {
                out.push(t);
                cur = j;
            }
            out.reverse();
            return Some(out);
        }
        for &(t, j) in &succ[i] {
            if !seen[j] {
                seen[j] = true;
                prev[j] = Some((i, t));
                queue.push_back(j);
            }
        }
    }
    None
}

/// Local deadlocks over the plain reach graph: a reachable marking `M` and a
/// visible label `x` such that
/// - `x` is enabled at some marking from which `M` is reachable,
/// - no marking reachable from `M` enables an `x`-transition, and
/// - some visible label can still occur infinitely often from `M` (it labels
///   a transition on a cycle reachable from `M`).
///
/// The last clause keeps ordinary termination (every remaining visible
/// action eventually ceasing) from counting as a deadlock.
pub fn find_local_deadlock(
    net: &LabelledNet,
    state_limit: usize,
) -> Result<Vec<LocalDeadlockWitness>, LimitExceeded> {
    let g = explore_complete(net, false, state_limit)?;
    let n = g.node_count();
    let succ = single_steps(&g);
    let plain: Vec<Vec<usize>> = succ.iter().map(|v| v.iter().map(|&(_, j)| j).collect()).collect();
    let comp = scc_ids(n, &plain);
    let comps = comp.iter().max().map_or(0, |c| c + 1);

    let mut enabled = vec![LabelSet::EMPTY; n];
    let mut comp_enabled = vec![LabelSet::EMPTY; comps];
    let mut comp_recurrent = vec![false; comps];
    for i in 0..n {
        for &(t, j) in &succ[i] {
            enabled[i] = enabled[i].union(net.label_set(t));
            if comp[j] == comp[i] && net.is_visible(t) {
                comp_recurrent[comp[i]] = true;
            }
        }
        comp_enabled[comp[i]] = comp_enabled[comp[i]].union(enabled[i]);
    }
    let mut comp_succ: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); comps];
    for i in 0..n {
        for &j in &plain[i] {
            if comp[j] != comp[i] {
                comp_succ[comp[i]].insert(comp[j]);
            }
        }
    }
    // Sinks come first, so successors are final before their predecessors.
    let mut live = comp_enabled.clone();
    let mut recurrent = comp_recurrent;
    for c in 0..comps {
        for &d in &comp_succ[c] {
            debug_assert!(d < c);
            live[c] = live[c].union(live[d]);
            recurrent[c] |= recurrent[d];
        }
    }
    let mut past = comp_enabled;
    for c in (0..comps).rev() {
        for &d in &comp_succ[c] {
            past[d] = past[d].union(past[c]);
        }
    }

    let mut preds = vec![Vec::new(); n];
    for (i, js) in plain.iter().enumerate() {
        for &j in js {
            preds[j].push(i);
        }
    }

    let mut out = Vec::new();
    for (m, &c) in comp.iter().enumerate() {
        if !recurrent[c] {
            continue;
        }
        let dead: Vec<usize> = past[c].iter().filter(|&x| !live[c].contains(x)).collect();
        if dead.is_empty() {
            continue;
        }
        let live_labels: BTreeSet<String> = net
            .label_set_names(live[c])
            .into_iter()
            .map(str::to_owned)
            .collect();
        let reaches_m = backward_closure(&preds, m);
        for x in dead {
            let anc = (0..n)
                .find(|&a| reaches_m[a] && enabled[a].contains(x))
                .expect("a dead label was enabled at some ancestor");
            let mut trace = path(&succ, 0, anc).expect("every node is reachable");
            trace.extend(path(&succ, anc, m).expect("ancestor reaches the marking"));
            out.push(LocalDeadlockWitness {
                trace,
                marking: g.marking(m),
                dead_label: net.visible_labels()[x].clone(),
                live_labels: live_labels.clone(),
            });
        }
    }
    Ok(out)
}
