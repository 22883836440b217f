#![allow(dead_code)]

pub mod oracle;

use causalnet::net::{check_contact_free, Label, LabelledNet};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SEED: u64 = 0x5eed_2024;
pub const CORPUS_SIZE: usize = 100;

/// A random net with up to `max_places` places and `max_transitions`
/// transitions, labels drawn from {a, b, c} or τ.
pub fn random_net(rng: &mut impl Rng, max_places: usize, max_transitions: usize) -> LabelledNet {
    random_net_with(rng, max_places, max_transitions, 0.35)
}

/// [`random_net`] with a chosen probability for each possible arc.
pub fn random_net_with(
    rng: &mut impl Rng,
    max_places: usize,
    max_transitions: usize,
    arc_probability: f64,
) -> LabelledNet {
    let np = rng.gen_range(1..=max_places);
    let nt = rng.gen_range(1..=max_transitions);
    let mut b = LabelledNet::builder();
    for i in 0..np {
        b.place(&format!("p{i}"), rng.gen_bool(0.5)).unwrap();
    }
    for i in 0..nt {
        let label = if rng.gen_bool(0.2) {
            Label::Tau
        } else {
            Label::visible(["a", "b", "c"][rng.gen_range(0..3)])
        };
        b.transition(&format!("t{i}"), label).unwrap();
    }
    for i in 0..np {
        for j in 0..nt {
            if rng.gen_bool(arc_probability) {
                b.arc(&format!("p{i}"), &format!("t{j}")).unwrap();
            }
            if rng.gen_bool(arc_probability) {
                b.arc(&format!("t{j}"), &format!("p{i}")).unwrap();
            }
        }
    }
    b.build().unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn presets_nonempty(net: &LabelledNet) -> bool {
    net.transitions().all(|t| !net.pre_t(t).is_empty())
}

/// The first `count` contact-free nets without preset-less transitions drawn
/// from a seeded generator.
pub fn corpus(seed: u64, count: usize) -> Vec<LabelledNet> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let net = random_net(&mut r, 4, 4);
        if presets_nonempty(&net) && check_contact_free(&net, 10_000).is_contact_free() {
            out.push(net);
        }
    }
    out
}

pub fn standard_corpus() -> Vec<LabelledNet> {
    corpus(CORPUS_SEED, CORPUS_SIZE)
}
