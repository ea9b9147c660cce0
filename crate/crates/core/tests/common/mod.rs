#![allow(dead_code)]

use std::sync::OnceLock;

use catt_core::{
    AccumulatorParams, Backend, Component, DigestSet, DomainMaterial, KeyFile, SchemeId,
    SigningKeyPair,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub const TEST_BITS: u32 = 512;

pub fn params() -> &'static AccumulatorParams {
    static P: OnceLock<AccumulatorParams> = OnceLock::new();
    P.get_or_init(|| AccumulatorParams::setup(b"core-tests", TEST_BITS).unwrap())
}

pub fn key() -> &'static SigningKeyPair {
    static K: OnceLock<SigningKeyPair> = OnceLock::new();
    K.get_or_init(|| SigningKeyPair::generate(b"core-tests", TEST_BITS).unwrap())
}

pub fn material() -> DomainMaterial {
    DomainMaterial::none()
        .with_params(params().clone())
        .with_key(KeyFile::Private(key().clone()))
}

pub fn backend(scheme: SchemeId) -> Backend {
    Backend::new(scheme, &material()).unwrap()
}

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn random_component(rng: &mut impl Rng) -> Component {
    let id = format!("component-{:016x}", rng.gen::<u64>());
    let len = rng.gen_range(0..48);
    let payload: Vec<u8> = (0..len).map(|_| rng.gen()).collect();
    Component::new(id, payload).unwrap()
}

pub fn random_components(rng: &mut impl Rng, n: usize) -> Vec<Component> {
    (0..n).map(|_| random_component(rng)).collect()
}

pub fn digests(cs: &[Component]) -> DigestSet {
    cs.iter().map(Component::digest).collect()
}

pub fn shuffled<T: Clone>(rng: &mut impl Rng, items: &[T]) -> Vec<T> {
    let mut v = items.to_vec();
    v.shuffle(rng);
    v
}
