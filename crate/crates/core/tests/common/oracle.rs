//! Direct transcriptions of the step rules and a brute-force LPO
//! isomorphism test.

use std::collections::{BTreeMap, BTreeSet};

use causalnet::net::{DepToken, DependencyMarking, LabelledNet};
use causalnet::semantics::{fire_step, step_enabled, Step};
use causalnet::unfolding::{canonicalize, Lpo};
use rand::seq::SliceRandom;
use rand::Rng;

pub type Tokens = BTreeMap<String, BTreeSet<String>>;

pub fn ids(net: &LabelledNet, f: impl Fn(&str) -> BTreeSet<String>) -> Vec<(String, BTreeSet<String>)> {
    net.transitions()
        .map(|t| net.transition_name(t).to_owned())
        .map(|t| {
            let s = f(&t);
            (t, s)
        })
        .collect()
}

pub fn pre(net: &LabelledNet, x: &str) -> BTreeSet<String> {
    net.preset(x).unwrap().into_iter().map(str::to_owned).collect()
}

pub fn post(net: &LabelledNet, x: &str) -> BTreeSet<String> {
    net.postset(x).unwrap().into_iter().map(str::to_owned).collect()
}

/// Enabling, clause by clause.
pub fn oracle_enabled(net: &LabelledNet, m: &Tokens, g: &BTreeSet<String>) -> bool {
    let marked: BTreeSet<String> = m.keys().cloned().collect();
    for t in g {
        let (p, q) = (pre(net, t), post(net, t));
        if !p.is_subset(&marked) {
            return false;
        }
        if marked.difference(&p).any(|s| q.contains(s)) {
            return false;
        }
    }
    for t in g {
        for u in g {
            if t != u
                && (!pre(net, t).is_disjoint(&pre(net, u)) || !post(net, t).is_disjoint(&post(net, u)))
            {
                return false;
            }
        }
    }
    true
}

/// Firing, clause by clause.
pub fn oracle_fire(net: &LabelledNet, m: &Tokens, g: &BTreeSet<String>) -> Tokens {
    let consumed: BTreeSet<String> = g.iter().flat_map(|t| pre(net, t)).collect();
    let mut out: Tokens = m
        .iter()
        .filter(|(s, _)| !consumed.contains(*s))
        .map(|(s, d)| (s.clone(), d.clone()))
        .collect();
    for t in g {
        let idx = net.transition(t).unwrap();
        let mut deps: BTreeSet<String> = net.label(idx).as_visible().map(str::to_owned).into_iter().collect();
        for s in pre(net, t) {
            deps.extend(m[&s].iter().cloned());
        }
        for s in post(net, t) {
            out.insert(s, deps.clone());
        }
    }
    out
}

pub fn to_tokens(net: &LabelledNet, m: &DependencyMarking) -> Tokens {
    m.tokens()
        .map(|tok| {
            (
                net.place_name(tok.place).to_owned(),
                net.label_set_names(tok.deps).into_iter().map(str::to_owned).collect(),
            )
        })
        .collect()
}

/// Checks `count` random (net, dependency marking, step) triples against the
/// transcription. Returns how many of them were enabled, or the first
/// disagreement.
pub fn step_sweep(seed: u64, count: usize) -> Result<usize, String> {
    let mut rng = super::rng(seed);
    let mut checked = 0;
    let mut enabled_seen = 0;
    while checked < count {
        let net = super::random_net(&mut rng, 4, 4);
        let labels = net.visible_labels().to_vec();
        let mut m = DependencyMarking::new();
        for p in net.places() {
            if rng.gen_bool(0.6) {
                let names: Vec<&str> = labels.iter().filter(|_| rng.gen_bool(0.4)).map(String::as_str).collect();
                m.insert(DepToken {
                    place: p,
                    deps: net.label_set_from_names(names).unwrap(),
                });
            }
        }
        let mut g: BTreeSet<String> = net
            .transitions()
            .filter(|_| rng.gen_bool(0.4))
            .map(|t| net.transition_name(t).to_owned())
            .collect();
        if g.is_empty() {
            let t = net.transitions().next().unwrap();
            g.insert(net.transition_name(t).to_owned());
        }
        let step = Step::from_ids(&net, &g.iter().map(String::as_str).collect::<Vec<_>>()).unwrap();
        let tokens = to_tokens(&net, &m);
        let expected = oracle_enabled(&net, &tokens, &g);
        let fired = fire_step(&net, &m, &step);
        let agrees = step_enabled(&net, &m, &step) == expected
            && match &fired {
                Ok(next) => expected && to_tokens(&net, next) == oracle_fire(&net, &tokens, &g),
                Err(_) => !expected,
            };
        if !agrees {
            return Err(format!(
                "step {g:?} at {} on\n{}",
                m.display(&net),
                causalnet::net::serialize_net(&net)
            ));
        }
        enabled_seen += usize::from(expected);
        checked += 1;
    }
    Ok(enabled_seen)
}

/// Backtracking search for a label- and order-preserving bijection.
pub fn brute_isomorphic(a: &Lpo, b: &Lpo) -> bool {
    fn extend(a: &Lpo, b: &Lpo, map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let i = map.len();
        if i == a.len() {
            return true;
        }
        for j in 0..b.len() {
            if used[j] || a.label(i) != b.label(j) {
                continue;
            }
            if (0..i).all(|k| a.less(k, i) == b.less(map[k], j) && a.less(i, k) == b.less(j, map[k])) {
                map.push(j);
                used[j] = true;
                if extend(a, b, map, used) {
                    return true;
                }
                map.pop();
                used[j] = false;
            }
        }
        false
    }
    let mut la = a.labels().to_vec();
    let mut lb = b.labels().to_vec();
    la.sort();
    lb.sort();
    la == lb && extend(a, b, &mut Vec::new(), &mut vec![false; b.len()])
}

pub fn random_lpo(rng: &mut impl Rng, n: usize, alphabet: &[&str], density: f64) -> Lpo {
    let labels: Vec<String> = (0..n).map(|_| alphabet[rng.gen_range(0..alphabet.len())].to_owned()).collect();
    let mut pos: Vec<usize> = (0..n).collect();
    pos.shuffle(rng);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if pos[i] < pos[j] && rng.gen_bool(density) {
                pairs.push((i, j));
            }
        }
    }
    Lpo::new(labels, &pairs).unwrap()
}

pub fn permuted(rng: &mut impl Rng, o: &Lpo) -> Lpo {
    let n = o.len();
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut labels = vec![String::new(); n];
    for v in 0..n {
        labels[perm[v]] = o.label(v).to_owned();
    }
    let pairs: Vec<(usize, usize)> = o.covers().into_iter().map(|(u, v)| (perm[u], perm[v])).collect();
    Lpo::new(labels, &pairs).unwrap()
}

/// Flips one random pair of the closure, keeping the result a partial order.
pub fn perturbed(rng: &mut impl Rng, o: &Lpo) -> Lpo {
    let n = o.len();
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (0..n).map(move |v| (u, v)))
        .filter(|&(u, v)| o.less(u, v))
        .collect();
    if n < 2 {
        return o.clone();
    }
    if !pairs.is_empty() && rng.gen_bool(0.5) {
        let i = rng.gen_range(0..pairs.len());
        pairs.remove(i);
    } else {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if u != v && !o.less(v, u) {
            pairs.push((u, v));
        }
    }
    Lpo::new(o.labels().to_vec(), &pairs).unwrap()
}

/// Compares canonical-form equality with [`brute_isomorphic`] on `rounds`
/// pairs of random LPOs. Returns the isomorphic and non-isomorphic counts,
/// or the first disagreement.
pub fn iso_sweep(seed: u64, rounds: usize) -> Result<(usize, usize), String> {
    let mut rng = super::rng(seed);
    let (mut same, mut different) = (0, 0);
    for round in 0..rounds {
        let n = rng.gen_range(0..=8);
        let alphabet: &[&str] = if round % 3 == 0 { &["a"] } else { &["a", "b"] };
        let density = rng.gen_range(0.1..0.6);
        let a = random_lpo(&mut rng, n, alphabet, density);
        let b = match round % 3 {
            0 => permuted(&mut rng, &a),
            1 => {
                let near = perturbed(&mut rng, &a);
                permuted(&mut rng, &near)
            }
            _ => random_lpo(&mut rng, n, alphabet, density),
        };
        let iso = brute_isomorphic(&a, &b);
        if (canonicalize(&a) == canonicalize(&b)) != iso {
            return Err(format!("{a:?}\n{b:?}"));
        }
        if iso {
            same += 1;
        } else {
            different += 1;
        }
    }
    Ok((same, different))
}
