use std::collections::{BTreeMap, HashSet, VecDeque};
use std::fmt::Write;

use super::pomset::{canonicalize, Lpo, Pomset};
use crate::canon::{canonical_form, CanonicalGraph};
use crate::net::{Label, LabelledNet, Marking, NetError, Node, PlaceIdx, TransIdx};

/// A condition of the occurrence net; folds onto `place`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Condition {
    pub place: PlaceIdx,
    pub pre: Option<usize>,
    pub post: Option<usize>,
}

/// An event of the occurrence net; folds onto `transition`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub transition: TransIdx,
    pub preset: Vec<usize>,
    pub postset: Vec<usize>,
}

/// A finite process: an occurrence net given by its conditions and events,
/// each carrying its fold target in the original net.
///
/// Events are stored in creation order, so every event's causal predecessors
/// have smaller indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Process {
    pub conditions: Vec<Condition>,
    pub events: Vec<Event>,
}

/// Isomorphism-class key of a process: canonical form of its flow graph
/// with every element labelled by its causal depth and fold target.
pub type ProcessKey = CanonicalGraph<(usize, Node)>;

/// The process with one condition per initially marked place and no events.
pub fn initial_process(net: &LabelledNet) -> Process {
    Process {
        conditions: net
            .initial_marking()
            .iter()
            .map(|place| Condition {
                place,
                pre: None,
                post: None,
            })
            .collect(),
        events: Vec::new(),
    }
}

/// Replays `t` on the end of `process`, or `None` if `t` cannot fire at the
/// marking the end folds onto.
pub fn extend_process(net: &LabelledNet, process: &Process, t: TransIdx) -> Option<Process> {
    let end = process.end_by_place();
    if !net.enabled_at(&Marking(end.keys().copied().collect()), t) {
        return None;
    }
    let mut next = process.clone();
    let e = next.events.len();
    let preset: Vec<usize> = net.pre_t(t).iter().map(|p| end[p]).collect();
    for &c in &preset {
        next.conditions[c].post = Some(e);
    }
    let mut postset = Vec::new();
    for &place in net.post_t(t) {
        postset.push(next.conditions.len());
        next.conditions.push(Condition {
            place,
            pre: Some(e),
            post: None,
        });
    }
    next.events.push(Event {
        transition: t,
        preset,
        postset,
    });
    Some(next)
}

/// A finite process is maximal iff nothing is enabled at the marking its end
/// folds onto.
pub fn is_maximal(net: &LabelledNet, process: &Process) -> bool {
    let m = process.end_marking();
    net.transitions().all(|t| !net.enabled_at(&m, t))
}

/// The causal order of the process restricted to its visible events.
pub fn visible_pomset(net: &LabelledNet, process: &Process) -> Pomset {
    canonicalize(&process.visible_lpo(net))
}

impl Process {
    pub fn event_count(&self) -> usize {
        self.events.len()
    }

    pub fn visible_count(&self, net: &LabelledNet) -> usize {
        self.events
            .iter()
            .filter(|e| net.is_visible(e.transition))
            .count()
    }

    /// Conditions without a post-event.
    pub fn end(&self) -> Vec<usize> {
        (0..self.conditions.len())
            .filter(|&c| self.conditions[c].post.is_none())
            .collect()
    }

    fn end_by_place(&self) -> BTreeMap<PlaceIdx, usize> {
        let mut out = BTreeMap::new();
        for c in self.end() {
            out.entry(self.conditions[c].place).or_insert(c);
        }
        out
    }

    /// The plain marking the end folds onto.
    pub fn end_marking(&self) -> Marking {
        Marking(self.end().into_iter().map(|c| self.conditions[c].place).collect())
    }

    /// Strict causal predecessors of every event, as bitsets.
    fn event_ancestors(&self) -> Vec<Vec<u64>> {
        let words = self.events.len().div_ceil(64).max(1);
        let mut anc: Vec<Vec<u64>> = Vec::with_capacity(self.events.len());
        for e in &self.events {
            let mut set = vec![0u64; words];
            for &c in &e.preset {
                if let Some(p) = self.conditions[c].pre {
                    set[p / 64] |= 1 << (p % 64);
                    for (w, bits) in set.iter_mut().zip(&anc[p]) {
                        *w |= bits;
                    }
                }
            }
            anc.push(set);
        }
        anc
    }

    /// Visible events with their labels, ordered by the reflexive-transitive
    /// closure of the flow.
    pub fn visible_lpo(&self, net: &LabelledNet) -> Lpo {
        let anc = self.event_ancestors();
        let visible: Vec<usize> = (0..self.events.len())
            .filter(|&e| net.is_visible(self.events[e].transition))
            .collect();
        let labels = visible
            .iter()
            .map(|&e| net.label(self.events[e].transition).to_string())
            .collect();
        let mut pairs = Vec::new();
        for (i, &u) in visible.iter().enumerate() {
            for (j, &v) in visible.iter().enumerate() {
                if anc[v][u / 64] & (1 << (u % 64)) != 0 {
                    pairs.push((i, j));
                }
            }
        }
        Lpo::new(labels, &pairs).expect("process flow is acyclic")
    }

    pub fn key(&self) -> ProcessKey {
        let nc = self.conditions.len();
        // Causal depth is preserved by isomorphisms; seeding the colours with
        // it spares colour refinement one round per element of long chains.
        let mut depth = vec![0usize; nc];
        let mut event_depth = Vec::with_capacity(self.events.len());
        for e in &self.events {
            let d = e.preset.iter().map(|&c| depth[c]).max().unwrap_or(0) + 1;
            for &c in &e.postset {
                depth[c] = d;
            }
            event_depth.push(d);
        }
        let mut labels: Vec<(usize, Node)> = self
            .conditions
            .iter()
            .zip(&depth)
            .map(|(c, &d)| (d, Node::Place(c.place)))
            .collect();
        labels.extend(
            self.events
                .iter()
                .zip(&event_depth)
                .map(|(e, &d)| (d, Node::Transition(e.transition))),
        );
        let mut edges = Vec::new();
        for (i, e) in self.events.iter().enumerate() {
            edges.extend(e.preset.iter().map(|&c| (c, nc + i)));
            edges.extend(e.postset.iter().map(|&c| (nc + i, c)));
        }
        canonical_form(&labels, &edges)
    }

    /// The occurrence net as a labelled net (conditions `c<i>`, events
    /// `e<i>`, initial marking = conditions without pre-event) plus the fold
    /// map from its element ids to ids of `net`.
    pub fn occurrence_net(
        &self,
        net: &LabelledNet,
    ) -> Result<(LabelledNet, BTreeMap<String, String>), NetError> {
        let mut b = LabelledNet::builder();
        let mut fold = BTreeMap::new();
        for (i, c) in self.conditions.iter().enumerate() {
            let id = format!("c{i}");
            b.place(&id, c.pre.is_none())?;
            fold.insert(id, net.place_name(c.place).to_owned());
        }
        for (i, e) in self.events.iter().enumerate() {
            let id = format!("e{i}");
            b.transition(&id, net.label(e.transition).clone())?;
            fold.insert(id.clone(), net.transition_name(e.transition).to_owned());
            for &c in &e.preset {
                b.arc(&format!("c{c}"), &id)?;
            }
            for &c in &e.postset {
                b.arc(&id, &format!("c{c}"))?;
            }
        }
        Ok((b.build()?, fold))
    }

    /// Checks that this is a well-formed process of `net`.
    pub fn validate(&self, net: &LabelledNet) -> Result<(), String> {
        for (i, c) in self.conditions.iter().enumerate() {
            if c.place.0 >= net.place_count() {
                return Err(format!("condition c{i} folds onto no place"));
            }
            let pre_links = self
                .events
                .iter()
                .filter(|e| e.postset.contains(&i))
                .count();
            let post_links = self.events.iter().filter(|e| e.preset.contains(&i)).count();
            if pre_links > 1 || post_links > 1 {
                return Err(format!("condition c{i} is branched"));
            }
            if (pre_links == 1) != c.pre.is_some() || (post_links == 1) != c.post.is_some() {
                return Err(format!("condition c{i} has inconsistent links"));
            }
        }
        for (i, e) in self.events.iter().enumerate() {
            if e.transition.0 >= net.transition_count() {
                return Err(format!("event e{i} folds onto no transition"));
            }
            for &c in &e.preset {
                if self.conditions[c].post != Some(i) {
                    return Err(format!("event e{i} does not own its precondition c{c}"));
                }
                // Creation order doubles as the acyclicity witness.
                if matches!(self.conditions[c].pre, Some(p) if p >= i) {
                    return Err(format!("flow is not acyclic at e{i}"));
                }
            }
            for &c in &e.postset {
                if self.conditions[c].pre != Some(i) {
                    return Err(format!("event e{i} does not own its postcondition c{c}"));
                }
            }
            let folded = |cs: &[usize]| {
                let mut v: Vec<PlaceIdx> = cs.iter().map(|&c| self.conditions[c].place).collect();
                v.sort();
                v
            };
            // One condition per arc, since the flow relation is a set.
            if folded(&e.preset) != net.pre_t(e.transition) {
                return Err(format!("event e{i} preset does not fold onto the transition preset"));
            }
            if folded(&e.postset) != net.post_t(e.transition) {
                return Err(format!("event e{i} postset does not fold onto the transition postset"));
            }
        }
        let mut initial: Vec<PlaceIdx> = self
            .conditions
            .iter()
            .filter(|c| c.pre.is_none())
            .map(|c| c.place)
            .collect();
        initial.sort();
        let m0: Vec<PlaceIdx> = net.initial_marking().iter().collect();
        if initial != m0 {
            return Err("initial conditions are not in bijection with M0".into());
        }
        Ok(())
    }

    /// Human-readable listing of the events.
    pub fn describe(&self, net: &LabelledNet) -> String {
        let mut out = String::new();
        for (i, e) in self.events.iter().enumerate() {
            let cs = |v: &[usize]| {
                v.iter()
                    .map(|&c| format!("c{c}:{}", net.place_name(self.conditions[c].place)))
                    .collect::<Vec<_>>()
                    .join(" ")
            };
            let label = match net.label(e.transition) {
                Label::Tau => String::new(),
                Label::Visible(l) => format!(" [{l}]"),
            };
            let _ = writeln!(
                out,
                "e{i}: {}{label} ({}) -> ({})",
                net.transition_name(e.transition),
                cs(&e.preset),
                cs(&e.postset)
            );
        }
        out
    }
}

#[derive(Debug, Clone)]
pub struct EnumeratedProcess {
    pub process: Process,
    pub maximal: bool,
    /// Could still have been extended, but the event limit was reached.
    pub saturated: bool,
}

#[derive(Debug, Clone)]
pub struct Unfolding {
    pub processes: Vec<EnumeratedProcess>,
    /// Some branch hit the event limit.
    pub diverged: bool,
}

/// All processes with at most `visible_bound` visible events and at most
/// `event_limit` events, one per isomorphism class, in breadth-first order.
pub fn enumerate_processes(net: &LabelledNet, visible_bound: usize, event_limit: usize) -> Unfolding {
    let start = initial_process(net);
    let mut seen: HashSet<ProcessKey> = HashSet::from([start.key()]);
    let mut queue = VecDeque::from([start]);
    let mut processes = Vec::new();
    let mut diverged = false;
    while let Some(p) = queue.pop_front() {
        let visible = p.visible_count(net);
        let mut maximal = true;
        let mut saturated = false;
        for t in net.transitions() {
            let Some(q) = extend_process(net, &p, t) else {
                continue;
            };
            maximal = false;
            if net.is_visible(t) && visible >= visible_bound {
                continue;
            }
            if p.event_count() >= event_limit {
                saturated = true;
                continue;
            }
            if seen.insert(q.key()) {
                queue.push_back(q);
            }
        }
        diverged |= saturated;
        processes.push(EnumeratedProcess {
            process: p,
            maximal,
            saturated,
        });
    }
    Unfolding {
        processes,
        diverged,
    }
}
