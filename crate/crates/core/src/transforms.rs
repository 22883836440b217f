//! Built-in example nets and the τ-refinement of a transition.

use std::str::FromStr;

use crate::net::{Label, LabelledNet, NetError, Node};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Builtin {
    PureM,
    RepeatedPureM,
    Centralised,
    Deadlocking,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [
        Builtin::PureM,
        Builtin::RepeatedPureM,
        Builtin::Centralised,
        Builtin::Deadlocking,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::PureM => "pure_m",
            Builtin::RepeatedPureM => "repeated_pure_m",
            Builtin::Centralised => "centralised",
            Builtin::Deadlocking => "deadlocking",
        }
    }
}

impl FromStr for Builtin {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s)
            .ok_or_else(|| {
                let names: Vec<&str> = Builtin::ALL.iter().map(|b| b.name()).collect();
                format!("unknown example `{s}` (expected one of {})", names.join(", "))
            })
    }
}

type Spec<'a> = (&'a [(&'a str, bool)], &'a [(&'a str, Option<&'a str>)], &'a [(&'a str, &'a str)]);

fn assemble((places, transitions, arcs): Spec<'_>) -> LabelledNet {
    let mut b = LabelledNet::builder();
    for &(p, marked) in places {
        b.place(p, marked).expect("built-in place");
    }
    for &(t, label) in transitions {
        let label = label.map_or(Label::Tau, Label::visible);
        b.transition(t, label).expect("built-in transition");
    }
    for &(x, y) in arcs {
        b.arc(x, y).expect("built-in arc");
    }
    b.build().expect("built-in net")
}

pub fn builtin(which: Builtin) -> LabelledNet {
    let abc = [("a", Some("a")), ("b", Some("b")), ("c", Some("c"))];
    match which {
        Builtin::PureM => assemble((
            &[("p", true), ("q", true)],
            &abc,
            &[("p", "a"), ("p", "b"), ("q", "b"), ("q", "c")],
        )),
        Builtin::RepeatedPureM => assemble((
            &[("p", true), ("q", true)],
            &abc,
            &[
                ("p", "a"),
                ("p", "b"),
                ("q", "b"),
                ("q", "c"),
                ("a", "p"),
                ("c", "q"),
            ],
        )),
        Builtin::Centralised => assemble((
            &[
                ("px2", true),
                ("qy2", true),
                ("l", true),
                ("pa", false),
                ("pb", false),
                ("qc", false),
            ],
            &[
                ("tau_a", None),
                ("tau_b", None),
                ("tau_c", None),
                ("a", Some("a")),
                ("b", Some("b")),
                ("c", Some("c")),
            ],
            &[
                ("px2", "tau_a"),
                ("px2", "tau_b"),
                ("qy2", "tau_b"),
                ("qy2", "tau_c"),
                ("l", "tau_a"),
                ("l", "tau_b"),
                ("l", "tau_c"),
                ("tau_a", "l"),
                ("tau_b", "l"),
                ("tau_c", "l"),
                ("tau_a", "pa"),
                ("tau_b", "pb"),
                ("tau_c", "qc"),
                ("pa", "a"),
                ("a", "px2"),
                ("pb", "b"),
                ("qc", "c"),
                ("c", "qy2"),
            ],
        )),
        Builtin::Deadlocking => assemble((
            &[("pa", true), ("pb", false), ("qb", false), ("qc", true)],
            &[
                ("a", Some("a")),
                ("b", Some("b")),
                ("c", Some("c")),
                ("tau1", None),
                ("tau2", None),
            ],
            &[
                ("pa", "a"),
                ("a", "pa"),
                ("qc", "c"),
                ("c", "qc"),
                ("pa", "tau1"),
                ("tau1", "pb"),
                ("qc", "tau2"),
                ("tau2", "qb"),
                ("pb", "b"),
                ("qb", "b"),
            ],
        )),
    }
}

/// Ids introduced by [`refine_transition`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefinementRecord {
    pub target: String,
    pub new_place: String,
    pub new_tau: String,
}

fn fresh(net: &LabelledNet, taken: &[&str], base: String) -> String {
    let free = |id: &str| net.node(id).is_none() && !taken.contains(&id);
    if free(&base) {
        return base;
    }
    (2..)
        .map(|i| format!("{base}_{i}"))
        .find(|id| free(id))
        .expect("some suffix is free")
}

/// Inserts a τ-transition and a fresh place in front of `target`: the arcs
/// `p -> target` become `p -> tau_target`, followed by
/// `tau_target -> s_target -> target`.
pub fn refine_transition(
    net: &LabelledNet,
    target: &str,
) -> Result<(LabelledNet, RefinementRecord), NetError> {
    let t = net.require_transition(target)?;
    let new_place = fresh(net, &[], format!("s_{target}"));
    let new_tau = fresh(net, &[&new_place], format!("tau_{target}"));

    let mut b = LabelledNet::builder();
    for p in net.places() {
        b.place(net.place_name(p), net.initial_marking().contains(p))?;
    }
    b.place(&new_place, false)?;
    for u in net.transitions() {
        b.transition(net.transition_name(u), net.label(u).clone())?;
    }
    b.transition(&new_tau, Label::Tau)?;
    for (x, y) in net.arcs() {
        if y == Node::Transition(t) {
            b.arc(net.node_name(x), &new_tau)?;
        } else {
            b.arc(net.node_name(x), net.node_name(y))?;
        }
    }
    b.arc(&new_tau, &new_place)?;
    b.arc(&new_place, target)?;
    let record = RefinementRecord {
        target: target.to_owned(),
        new_place,
        new_tau,
    };
    Ok((b.build()?, record))
}
