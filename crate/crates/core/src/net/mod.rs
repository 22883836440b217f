//! Labelled Petri nets, markings and dependency markings.
//!
//! A [`LabelledNet`] is immutable once built. Element ids are kept sorted so
//! that two nets with the same places, transitions, arcs, initial marking and
//! labelling compare equal regardless of declaration order.

mod contact;
mod parse;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

pub use contact::{check_contact_free, ContactVerdict};
pub use parse::{parse_net, serialize_net};

/// The reserved spelling of the invisible action.
pub const TAU: &str = "tau";

/// Visible label sets are stored as bitmasks, so a net may use at most this
/// many distinct visible labels.
pub const MAX_VISIBLE_LABELS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}, column {column}: {source}")]
    AtLine {
        line: usize,
        column: usize,
        #[source]
        source: Box<NetError>,
    },
    #[error("unknown id `{0}`")]
    UnknownId(String),
    #[error("unknown transition `{0}`")]
    UnknownTransition(String),
    #[error("duplicate declaration of `{0}`")]
    DuplicateDeclaration(String),
    #[error("duplicate arc {0} -> {1}")]
    DuplicateArc(String, String),
    #[error("arc {0} -> {1} must connect a place and a transition")]
    ArcKind(String, String),
    #[error("invalid id `{0}`")]
    InvalidId(String),
    #[error("`{TAU}` is reserved for the invisible label")]
    ReservedLabel,
    #[error("more than {MAX_VISIBLE_LABELS} distinct visible labels")]
    TooManyLabels,
    #[error("a step must contain at least one transition")]
    EmptyStep,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PlaceIdx(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransIdx(pub usize);

/// Either kind of net element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Place(PlaceIdx),
    Transition(TransIdx),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Label {
    Tau,
    Visible(String),
}

impl Label {
    pub fn visible(name: impl Into<String>) -> Self {
        Label::Visible(name.into())
    }

    pub fn is_tau(&self) -> bool {
        matches!(self, Label::Tau)
    }

    pub fn as_visible(&self) -> Option<&str> {
        match self {
            Label::Tau => None,
            Label::Visible(s) => Some(s),
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Tau => f.write_str(TAU),
            Label::Visible(s) => f.write_str(s),
        }
    }
}

/// A set of visible labels, as a bitmask over [`LabelledNet::visible_labels`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LabelSet(u64);

impl LabelSet {
    pub const EMPTY: LabelSet = LabelSet(0);

    pub fn singleton(index: usize) -> Self {
        LabelSet(1 << index)
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn from_bits(bits: u64) -> Self {
        LabelSet(bits)
    }

    pub fn union(self, other: LabelSet) -> LabelSet {
        LabelSet(self.0 | other.0)
    }

    pub fn is_subset(self, other: LabelSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_disjoint(self, other: LabelSet) -> bool {
        self.0 & other.0 == 0
    }

    pub fn contains(self, index: usize) -> bool {
        self.0 & (1 << index) != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        (0..64).filter(move |i| self.contains(*i))
    }
}

/// A plain marking: the set of places holding a token.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Marking(pub BTreeSet<PlaceIdx>);

impl Marking {
    pub fn contains(&self, p: PlaceIdx) -> bool {
        self.0.contains(&p)
    }

    pub fn iter(&self) -> impl Iterator<Item = PlaceIdx> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn display<'a>(&'a self, net: &'a LabelledNet) -> impl fmt::Display + 'a {
        DisplayWith(move |f: &mut fmt::Formatter<'_>| {
            f.write_str("{")?;
            for (i, p) in self.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                f.write_str(net.place_name(p))?;
            }
            f.write_str("}")
        })
    }
}

/// A token together with the visible labels it causally depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DepToken {
    pub place: PlaceIdx,
    pub deps: LabelSet,
}

/// A marking in which each token carries its causal history as a label set.
///
/// Stored as a place-keyed map, so a place holds at most one token and two
/// dependency markings are the same state iff they are equal values.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DependencyMarking {
    tokens: BTreeMap<PlaceIdx, LabelSet>,
}

impl DependencyMarking {
    pub fn new() -> Self {
        Self::default()
    }

    /// Every place of `marking` with an empty dependency set.
    pub fn independent(marking: &Marking) -> Self {
        DependencyMarking {
            tokens: marking.iter().map(|p| (p, LabelSet::EMPTY)).collect(),
        }
    }

    /// Returns `false` (leaving the marking unchanged) if the place already
    /// holds a token.
    pub fn insert(&mut self, token: DepToken) -> bool {
        if self.tokens.contains_key(&token.place) {
            return false;
        }
        self.tokens.insert(token.place, token.deps);
        true
    }

    pub fn deps(&self, p: PlaceIdx) -> Option<LabelSet> {
        self.tokens.get(&p).copied()
    }

    pub fn tokens(&self) -> impl Iterator<Item = DepToken> + '_ {
        self.tokens
            .iter()
            .map(|(&place, &deps)| DepToken { place, deps })
    }

    pub fn remove(&mut self, p: PlaceIdx) -> Option<LabelSet> {
        self.tokens.remove(&p)
    }

    pub fn is_marked(&self, p: PlaceIdx) -> bool {
        self.tokens.contains_key(&p)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// The plain marking underneath (first projection).
    pub fn places(&self) -> Marking {
        Marking(self.tokens.keys().copied().collect())
    }

    /// Same tokens with all dependencies dropped.
    pub fn forget_deps(&self) -> Self {
        DependencyMarking::independent(&self.places())
    }

    pub fn display<'a>(&'a self, net: &'a LabelledNet) -> impl fmt::Display + 'a {
        DisplayWith(move |f: &mut fmt::Formatter<'_>| {
            for (i, tok) in self.tokens().enumerate() {
                if i > 0 {
                    f.write_str(" ; ")?;
                }
                write!(
                    f,
                    "{} {{{}}}",
                    net.place_name(tok.place),
                    net.label_set_names(tok.deps).join(",")
                )?;
            }
            Ok(())
        })
    }
}

impl FromIterator<DepToken> for DependencyMarking {
    fn from_iter<I: IntoIterator<Item = DepToken>>(iter: I) -> Self {
        let mut m = DependencyMarking::new();
        for tok in iter {
            m.insert(tok);
        }
        m
    }
}

pub(crate) struct DisplayWith<F>(pub F);

impl<F: Fn(&mut fmt::Formatter<'_>) -> fmt::Result> fmt::Display for DisplayWith<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        (self.0)(f)
    }
}

/// A finite labelled net `(S, T, F, M0, l)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelledNet {
    places: Vec<String>,
    transitions: Vec<String>,
    labels: Vec<Label>,
    initial: Marking,
    visible: Vec<String>,
    label_index: Vec<Option<usize>>,
    pre_t: Vec<Vec<PlaceIdx>>,
    post_t: Vec<Vec<PlaceIdx>>,
    pre_p: Vec<Vec<TransIdx>>,
    post_p: Vec<Vec<TransIdx>>,
    ids: BTreeMap<String, Node>,
}

impl LabelledNet {
    pub fn builder() -> NetBuilder {
        NetBuilder::default()
    }

    pub fn place_count(&self) -> usize {
        self.places.len()
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.len()
    }

    pub fn places(&self) -> impl Iterator<Item = PlaceIdx> {
        (0..self.places.len()).map(PlaceIdx)
    }

    pub fn transitions(&self) -> impl Iterator<Item = TransIdx> {
        (0..self.transitions.len()).map(TransIdx)
    }

    pub fn place_name(&self, p: PlaceIdx) -> &str {
        &self.places[p.0]
    }

    pub fn transition_name(&self, t: TransIdx) -> &str {
        &self.transitions[t.0]
    }

    pub fn node_name(&self, n: Node) -> &str {
        match n {
            Node::Place(p) => self.place_name(p),
            Node::Transition(t) => self.transition_name(t),
        }
    }

    pub fn node(&self, id: &str) -> Option<Node> {
        self.ids.get(id).copied()
    }

    pub fn place(&self, id: &str) -> Option<PlaceIdx> {
        match self.node(id)? {
            Node::Place(p) => Some(p),
            Node::Transition(_) => None,
        }
    }

    pub fn transition(&self, id: &str) -> Option<TransIdx> {
        match self.node(id)? {
            Node::Transition(t) => Some(t),
            Node::Place(_) => None,
        }
    }

    /// Looks up a transition, failing with [`NetError::UnknownTransition`].
    pub fn require_transition(&self, id: &str) -> Result<TransIdx, NetError> {
        self.transition(id)
            .ok_or_else(|| NetError::UnknownTransition(id.to_owned()))
    }

    pub fn label(&self, t: TransIdx) -> &Label {
        &self.labels[t.0]
    }

    /// Position of the transition's label in [`Self::visible_labels`], or
    /// `None` for τ.
    pub fn label_index(&self, t: TransIdx) -> Option<usize> {
        self.label_index[t.0]
    }

    /// `{l(t)} \ {τ}` as a label set.
    pub fn label_set(&self, t: TransIdx) -> LabelSet {
        self.label_index[t.0]
            .map(LabelSet::singleton)
            .unwrap_or_default()
    }

    pub fn is_visible(&self, t: TransIdx) -> bool {
        self.label_index[t.0].is_some()
    }

    /// The distinct visible labels used by the net, sorted.
    pub fn visible_labels(&self) -> &[String] {
        &self.visible
    }

    pub fn visible_label_index(&self, name: &str) -> Option<usize> {
        self.visible.binary_search_by(|l| l.as_str().cmp(name)).ok()
    }

    pub fn label_set_names(&self, set: LabelSet) -> Vec<&str> {
        set.iter().map(|i| self.visible[i].as_str()).collect()
    }

    pub fn initial_marking(&self) -> &Marking {
        &self.initial
    }

    pub fn pre_t(&self, t: TransIdx) -> &[PlaceIdx] {
        &self.pre_t[t.0]
    }

    pub fn post_t(&self, t: TransIdx) -> &[PlaceIdx] {
        &self.post_t[t.0]
    }

    pub fn pre_p(&self, p: PlaceIdx) -> &[TransIdx] {
        &self.pre_p[p.0]
    }

    pub fn post_p(&self, p: PlaceIdx) -> &[TransIdx] {
        &self.post_p[p.0]
    }

    /// `•x` by id.
    pub fn preset(&self, id: &str) -> Result<BTreeSet<&str>, NetError> {
        Ok(match self.node(id).ok_or_else(|| NetError::UnknownId(id.to_owned()))? {
            Node::Place(p) => self.pre_p(p).iter().map(|&t| self.transition_name(t)).collect(),
            Node::Transition(t) => self.pre_t(t).iter().map(|&p| self.place_name(p)).collect(),
        })
    }

    /// `x•` by id.
    pub fn postset(&self, id: &str) -> Result<BTreeSet<&str>, NetError> {
        Ok(match self.node(id).ok_or_else(|| NetError::UnknownId(id.to_owned()))? {
            Node::Place(p) => self.post_p(p).iter().map(|&t| self.transition_name(t)).collect(),
            Node::Transition(t) => self.post_t(t).iter().map(|&p| self.place_name(p)).collect(),
        })
    }

    /// Preset of a set of elements.
    pub fn preset_of<'a, I: IntoIterator<Item = &'a str>>(
        &self,
        ids: I,
    ) -> Result<BTreeSet<&str>, NetError> {
        let mut out = BTreeSet::new();
        for id in ids {
            out.extend(self.preset(id)?);
        }
        Ok(out)
    }

    /// Postset of a set of elements.
    pub fn postset_of<'a, I: IntoIterator<Item = &'a str>>(
        &self,
        ids: I,
    ) -> Result<BTreeSet<&str>, NetError> {
        let mut out = BTreeSet::new();
        for id in ids {
            out.extend(self.postset(id)?);
        }
        Ok(out)
    }

    /// The end of the net: places without post-transitions.
    pub fn net_end(&self) -> BTreeSet<PlaceIdx> {
        self.places().filter(|&p| self.post_p(p).is_empty()).collect()
    }

    /// All arcs as `(from, to)` node pairs, sorted.
    pub fn arcs(&self) -> Vec<(Node, Node)> {
        let mut arcs = Vec::new();
        for t in self.transitions() {
            arcs.extend(self.pre_t(t).iter().map(|&p| (Node::Place(p), Node::Transition(t))));
            arcs.extend(self.post_t(t).iter().map(|&p| (Node::Transition(t), Node::Place(p))));
        }
        arcs.sort();
        arcs
    }

    pub fn marking_from_ids<'a, I: IntoIterator<Item = &'a str>>(
        &self,
        ids: I,
    ) -> Result<Marking, NetError> {
        ids.into_iter()
            .map(|id| self.place(id).ok_or_else(|| NetError::UnknownId(id.to_owned())))
            .collect::<Result<_, _>>()
            .map(Marking)
    }

    pub fn label_set_from_names<'a, I: IntoIterator<Item = &'a str>>(
        &self,
        names: I,
    ) -> Result<LabelSet, NetError> {
        let mut set = LabelSet::EMPTY;
        for name in names {
            let i = self
                .visible_label_index(name)
                .ok_or_else(|| NetError::UnknownId(name.to_owned()))?;
            set = set.union(LabelSet::singleton(i));
        }
        Ok(set)
    }

    /// Builds a dependency marking from `(place, [labels])` pairs.
    pub fn dep_marking(&self, tokens: &[(&str, &[&str])]) -> Result<DependencyMarking, NetError> {
        let mut m = DependencyMarking::new();
        for (place, labels) in tokens {
            let p = self
                .place(place)
                .ok_or_else(|| NetError::UnknownId((*place).to_owned()))?;
            let deps = self.label_set_from_names(labels.iter().copied())?;
            m.insert(DepToken { place: p, deps });
        }
        Ok(m)
    }

    /// `M0 × {∅}`.
    pub fn initial_dependency_marking(&self) -> DependencyMarking {
        DependencyMarking::independent(&self.initial)
    }

    /// Whether `t` may fire alone at the plain marking `m`: its preset is
    /// covered and no postplace outside the preset is already marked.
    pub fn enabled_at(&self, m: &Marking, t: TransIdx) -> bool {
        self.pre_t(t).iter().all(|&p| m.contains(p))
            && self
                .post_t(t)
                .iter()
                .all(|&p| !m.contains(p) || self.pre_t(t).contains(&p))
    }

    /// Classical successor of a plain marking; assumes [`Self::enabled_at`].
    pub fn fire_plain(&self, m: &Marking, t: TransIdx) -> Marking {
        let mut next = m.0.clone();
        for p in self.pre_t(t) {
            next.remove(p);
        }
        next.extend(self.post_t(t).iter().copied());
        Marking(next)
    }
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

/// Incremental construction of a [`LabelledNet`] with structural validation.
#[derive(Debug, Clone, Default)]
pub struct NetBuilder {
    places: BTreeMap<String, bool>,
    transitions: BTreeMap<String, Label>,
    arcs: BTreeSet<(String, String)>,
}

impl NetBuilder {
    pub fn place(&mut self, id: &str, marked: bool) -> Result<&mut Self, NetError> {
        self.check_fresh(id)?;
        self.places.insert(id.to_owned(), marked);
        Ok(self)
    }

    pub fn transition(&mut self, id: &str, label: Label) -> Result<&mut Self, NetError> {
        self.check_fresh(id)?;
        if let Label::Visible(l) = &label {
            if l == TAU {
                return Err(NetError::ReservedLabel);
            }
            if !valid_id(l) {
                return Err(NetError::InvalidId(l.clone()));
            }
        }
        self.transitions.insert(id.to_owned(), label);
        Ok(self)
    }

    pub fn arc(&mut self, from: &str, to: &str) -> Result<&mut Self, NetError> {
        let from_place = self.kind_of(from)?;
        let to_place = self.kind_of(to)?;
        if from_place == to_place {
            return Err(NetError::ArcKind(from.to_owned(), to.to_owned()));
        }
        if !self.arcs.insert((from.to_owned(), to.to_owned())) {
            return Err(NetError::DuplicateArc(from.to_owned(), to.to_owned()));
        }
        Ok(self)
    }

    pub fn has_id(&self, id: &str) -> bool {
        self.places.contains_key(id) || self.transitions.contains_key(id)
    }

    fn check_fresh(&self, id: &str) -> Result<(), NetError> {
        if !valid_id(id) {
            return Err(NetError::InvalidId(id.to_owned()));
        }
        if self.has_id(id) {
            return Err(NetError::DuplicateDeclaration(id.to_owned()));
        }
        Ok(())
    }

    /// `true` for places, `false` for transitions.
    fn kind_of(&self, id: &str) -> Result<bool, NetError> {
        if self.places.contains_key(id) {
            Ok(true)
        } else if self.transitions.contains_key(id) {
            Ok(false)
        } else {
            Err(NetError::UnknownId(id.to_owned()))
        }
    }

    pub fn build(&self) -> Result<LabelledNet, NetError> {
        let places: Vec<String> = self.places.keys().cloned().collect();
        let transitions: Vec<String> = self.transitions.keys().cloned().collect();
        let labels: Vec<Label> = self.transitions.values().cloned().collect();

        let visible: Vec<String> = labels
            .iter()
            .filter_map(|l| l.as_visible().map(str::to_owned))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        if visible.len() > MAX_VISIBLE_LABELS {
            return Err(NetError::TooManyLabels);
        }
        let label_index = labels
            .iter()
            .map(|l| l.as_visible().map(|v| visible.binary_search_by(|x| x.as_str().cmp(v)).unwrap()))
            .collect();

        let mut ids = BTreeMap::new();
        for (i, p) in places.iter().enumerate() {
            ids.insert(p.clone(), Node::Place(PlaceIdx(i)));
        }
        for (i, t) in transitions.iter().enumerate() {
            ids.insert(t.clone(), Node::Transition(TransIdx(i)));
        }

        let mut pre_t = vec![Vec::new(); transitions.len()];
        let mut post_t = vec![Vec::new(); transitions.len()];
        let mut pre_p = vec![Vec::new(); places.len()];
        let mut post_p = vec![Vec::new(); places.len()];
        for (from, to) in &self.arcs {
            match (ids[from], ids[to]) {
                (Node::Place(p), Node::Transition(t)) => {
                    pre_t[t.0].push(p);
                    post_p[p.0].push(t);
                }
                (Node::Transition(t), Node::Place(p)) => {
                    post_t[t.0].push(p);
                    pre_p[p.0].push(t);
                }
                _ => unreachable!("arc kinds are checked on insertion"),
            }
        }
        for v in pre_t.iter_mut().chain(post_t.iter_mut()) {
            v.sort();
        }
        for v in pre_p.iter_mut().chain(post_p.iter_mut()) {
            v.sort();
        }

        let initial = Marking(
            self.places
                .values()
                .enumerate()
                .filter(|(_, &marked)| marked)
                .map(|(i, _)| PlaceIdx(i))
                .collect(),
        );

        Ok(LabelledNet {
            places,
            transitions,
            labels,
            initial,
            visible,
            label_index,
            pre_t,
            post_t,
            pre_p,
            post_p,
            ids,
        })
    }
}
