//! One PASS/FAIL line per acceptance criterion. Exits nonzero if any fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use causalnet::distributability::{check_distributed, find_pure_m, DistributabilityVerdict};
use causalnet::equivalence::{bounded_observation, compare, find_local_deadlock, WitnessKind};
use causalnet::net::{check_contact_free, parse_net, serialize_net, LabelledNet, TransIdx};
use causalnet::semantics::{check_cycle_dependency, explore_complete, explore_reachable};
use causalnet::transforms::{builtin, refine_transition, Builtin};
use causalnet::unfolding::default_event_limit;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

const PURE_M: Builtin = Builtin::PureM;
const REPEATED: Builtin = Builtin::RepeatedPureM;
const CENTRAL: Builtin = Builtin::Centralised;
const DEADLOCKING: Builtin = Builtin::Deadlocking;

fn names(net: &LabelledNet, ts: &[TransIdx]) -> Vec<String> {
    ts.iter().map(|&t| net.transition_name(t).to_owned()).collect()
}

fn state_space() -> Outcome {
    let mut out = Vec::new();
    let code = causalnet::cli::run(["causalnet", "example", REPEATED.name()], &mut out, &mut Vec::new());
    ensure!(code == 0, "example exited {code}");
    let dir = std::env::temp_dir().join(format!("causalnet-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let path = dir.join("repeated.net");
    std::fs::write(&path, &out).map_err(|e| e.to_string())?;
    let mut reach = Vec::new();
    let code = causalnet::cli::run(
        ["causalnet", "reach", "--dependency", path.to_str().unwrap()],
        &mut reach,
        &mut Vec::new(),
    );
    std::fs::remove_dir_all(&dir).ok();
    ensure!(code == 0, "reach exited {code}");
    let text = String::from_utf8(reach).unwrap();
    ensure!(text.starts_with("markings: 5\nbound: 81\n"), "reach printed:\n{text}");
    let g = explore_reachable(&builtin(REPEATED), true, 1_000);
    ensure!(g.node_count() == 5 && g.bound == Some(81), "library: {} markings, bound {:?}", g.node_count(), g.bound);
    Ok("5 dependency markings, bound 81".into())
}

fn distributability() -> Outcome {
    for b in [PURE_M, REPEATED] {
        let net = builtin(b);
        match check_distributed(&net, 10_000).unwrap() {
            DistributabilityVerdict::Chain(chain) => {
                ensure!(names(&net, &chain) == ["a", "b", "c"], "{}: chain {:?}", b.name(), names(&net, &chain));
            }
            DistributabilityVerdict::Distributed(_) => return Err(format!("{} reported distributed", b.name())),
        }
        let text = check_distributed(&net, 10_000).unwrap().render(&net);
        ensure!(text.contains("concurrent: (a, c)"), "{}: {text}", b.name());
        let m = find_pure_m(&net, 10_000).unwrap();
        ensure!(m.len() == 1, "{}: {} pure M triples", b.name(), m.len());
        ensure!(
            names(&net, &[m[0].left, m[0].middle, m[0].right]) == ["a", "b", "c"],
            "{}: triple {}",
            b.name(),
            m[0].render(&net)
        );
    }
    for b in [CENTRAL, DEADLOCKING] {
        let net = builtin(b);
        let DistributabilityVerdict::Distributed(d) = check_distributed(&net, 10_000).unwrap() else {
            return Err(format!("{} reported not distributed", b.name()));
        };
        let loc = |n| d.location_of[&n];
        for t in net.transitions() {
            let here = loc(causalnet::net::Node::Transition(t));
            for &p in net.pre_t(t) {
                ensure!(
                    loc(causalnet::net::Node::Place(p)) == here,
                    "{}: {} and its preplace {} are split",
                    b.name(),
                    net.transition_name(t),
                    net.place_name(p)
                );
            }
        }
        // Two transitions are concurrent when some reachable marking enables
        // them together as one step.
        let g = explore_reachable(&net, false, 10_000);
        ensure!(!g.truncated, "{}: truncated", b.name());
        for e in &g.edges {
            let ts: Vec<TransIdx> = e.step.iter().collect();
            for (i, &t) in ts.iter().enumerate() {
                for &u in &ts[i + 1..] {
                    ensure!(
                        loc(causalnet::net::Node::Transition(t)) != loc(causalnet::net::Node::Transition(u)),
                        "{}: concurrent {} and {} share a location",
                        b.name(),
                        net.transition_name(t),
                        net.transition_name(u)
                    );
                }
            }
        }
        ensure!(find_pure_m(&net, 10_000).unwrap().is_empty(), "{}: pure M found", b.name());
    }
    Ok("pure_m and repeated_pure_m chain a,b,c with (a, c) concurrent; centralised and deadlocking distributed".into())
}

fn causality_separation() -> Outcome {
    let (repeated, central) = (builtin(REPEATED), builtin(CENTRAL));
    let v = compare(&repeated, &central, 4, default_event_limit(4));
    let Some(w) = &v.witness else {
        return Err("repeated_pure_m and centralised equivalent at bound 4".into());
    };
    ensure!(
        w.pomset.orders("a", "c") || w.pomset.orders("c", "a"),
        "witness does not order a and c:\n{}",
        w.pomset
    );
    let mut seen = 0;
    for k in 0..=6 {
        let obs = bounded_observation(&repeated, k, default_event_limit(k));
        for p in obs.complete.iter().chain(&obs.partial) {
            ensure!(!p.orders("a", "c") && !p.orders("c", "a"), "repeated_pure_m at bound {k} orders a and c:\n{p}");
            seen += 1;
        }
    }
    Ok(format!("witness ({}, {}); {seen} repeated_pure_m pomsets for k <= 6 keep a and c unordered", w.side, w.kind))
}

fn local_deadlock() -> Outcome {
    let net = builtin(DEADLOCKING);
    let ws = find_local_deadlock(&net, 10_000).unwrap();
    ensure!(
        ws.iter().any(|w| w.dead_label == "a" && w.live_labels.contains("c") && names(&net, &w.trace) == ["tau1"]),
        "no matching witness among {} found",
        ws.len()
    );
    for b in [PURE_M, REPEATED, CENTRAL] {
        let found = find_local_deadlock(&builtin(b), 10_000).unwrap();
        ensure!(found.is_empty(), "{}: {} witnesses", b.name(), found.len());
    }
    Ok("deadlocking strands a after tau1 with c live; the others have none".into())
}

fn refinement_suite(corpus: &[LabelledNet]) -> Outcome {
    let repeated = builtin(REPEATED);
    let mut cases: Vec<(&LabelledNet, String)> = ["a", "b", "c"].iter().map(|t| (&repeated, t.to_string())).collect();
    for net in corpus {
        for t in net.transitions() {
            cases.push((net, net.transition_name(t).to_owned()));
        }
    }
    for (i, (net, t)) in cases.iter().enumerate() {
        let (refined, rec) = refine_transition(net, t).map_err(|e| format!("case {i}: {e}"))?;
        let ctx = || format!("case {i}, refining {t}:\n{}", serialize_net(net));
        ensure!(parse_net(&serialize_net(&refined)).as_ref() == Ok(&refined), "round trip fails, {}", ctx());
        ensure!(
            refined.preset(&rec.new_tau).unwrap() == net.preset(t).unwrap()
                && refined.preset(t).unwrap() == BTreeSet::from([rec.new_place.as_str()])
                && refined.postset(t).unwrap() == net.postset(t).unwrap(),
            "unexpected structure, {}",
            ctx()
        );
        ensure!(check_contact_free(&refined, 100_000).is_contact_free(), "contact, {}", ctx());
        let before = check_distributed(net, 100_000).unwrap().is_distributed();
        let after = check_distributed(&refined, 100_000).unwrap().is_distributed();
        ensure!(before == after, "verdict kind changed, {}", ctx());
        let v = compare(net, &refined, 3, default_event_limit(3));
        ensure!(v.equivalent(), "{v}\n{}", ctx());
    }
    Ok(format!("{} refinements (repeated_pure_m and {} corpus nets), zero failures", cases.len(), corpus.len()))
}

fn cycle_suite(corpus: &[LabelledNet]) -> Outcome {
    let nets: Vec<LabelledNet> = Builtin::ALL.into_iter().map(builtin).collect();
    let mut edges = 0;
    for (i, net) in nets.iter().chain(corpus).enumerate() {
        let g = explore_complete(net, true, 1_000_000).map_err(|e| format!("net {i}: {e}"))?;
        let v = check_cycle_dependency(net, &g).map_err(|e| e.to_string())?;
        ensure!(v.is_empty(), "net {i}: {} violations\n{}", v.len(), serialize_net(net));
        edges += g.edges.len();
    }
    Ok(format!("{} nets, {edges} edges checked, zero violations", nets.len() + corpus.len()))
}

fn oracles() -> Outcome {
    let enabled = common::oracle::step_sweep(7, 1000)?;
    let (same, different) = common::oracle::iso_sweep(11, 500)?;
    Ok(format!("1000 step triples ({enabled} enabled); 500 LPO pairs ({same} isomorphic, {different} not)"))
}

fn self_equivalence(corpus: &[LabelledNet]) -> Outcome {
    for (i, net) in corpus.iter().enumerate() {
        for k in 0..=4 {
            let v = compare(net, net, k, default_event_limit(k));
            ensure!(v.equivalent(), "net {i} at bound {k}: {v}");
        }
    }
    let (repeated, central) = (builtin(REPEATED), builtin(CENTRAL));
    let mut refuted = Vec::new();
    for k in 0..=5 {
        let v = compare(&repeated, &central, k, default_event_limit(k));
        let Some(w) = v.witness.filter(|w| w.kind == WitnessKind::Complete) else {
            continue;
        };
        let a = bounded_observation(&repeated, k + 1, default_event_limit(k + 1));
        let b = bounded_observation(&central, k + 1, default_event_limit(k + 1));
        ensure!(
            a.complete.contains(&w.pomset) != b.complete.contains(&w.pomset),
            "complete witness at bound {k} lost at {}:\n{}",
            k + 1,
            w.pomset
        );
        refuted.push(k);
    }
    ensure!(!refuted.is_empty(), "no complete refutation of repeated_pure_m against centralised for k <= 5");
    Ok(format!("{} nets self-equivalent for k <= 4; complete refutations at k = {refuted:?} persist", corpus.len()))
}

fn main() -> ExitCode {
    let corpus = common::standard_corpus();
    let criteria: [Criterion; 8] = [
        ("dependency state space of repeated_pure_m", Box::new(state_space)),
        ("distributability verdicts", Box::new(distributability)),
        ("causality separation", Box::new(causality_separation)),
        ("local deadlock", Box::new(local_deadlock)),
        ("refinement suite", Box::new(|| refinement_suite(&corpus))),
        ("cycle dependency suite", Box::new(|| cycle_suite(&corpus))),
        ("oracle equivalence", Box::new(oracles)),
        ("self-equivalence and monotonicity", Box::new(|| self_equivalence(&corpus))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(std::panic::AssertUnwindSafe(check))
            .unwrap_or_else(|_| Err("panicked".into()));
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail} ({ms} ms)", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why} ({ms} ms)", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
