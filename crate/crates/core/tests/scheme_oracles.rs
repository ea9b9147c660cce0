//! Accumulator, aggregate-signature and integrated proofs checked against
//! reference computations written directly on num-bigint and sha2.

mod common;

use std::collections::BTreeSet;

use catt_core::aggsig::{fdh, SignatureWitness};
use catt_core::integrated::accumulator_message;
use catt_core::{
    Accumulator, AccumulatorAttestation, Aggregator, ComponentDigest, DigestSet, FixedUint,
    Integrated, IntegratedAttestation, KeyFile, MembershipWitness,
};
use common::{digests, key, params, random_components, rng};
use num_bigint::BigUint;
use num_traits::One;
use rand::Rng;
use sha2::{Digest as _, Sha256};

fn tagged(tag: u8, parts: &[&[u8]]) -> [u8; 32] {
    let mut h = Sha256::new();
    h.update([tag]);
    for p in parts {
        h.update(p);
    }
    h.finalize().into()
}

/// Miller–Rabin with the first twenty primes as fixed bases.
fn reference_is_prime(n: &BigUint) -> bool {
    let bases = [
        2u32, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71,
    ];
    if bases.iter().any(|&b| *n == BigUint::from(b)) {
        return true;
    }
    if bases.iter().any(|&b| (n % b) == BigUint::ZERO) {
        return false;
    }
    let n1 = n - 1u32;
    let s = n1.trailing_zeros().unwrap();
    let d = &n1 >> s;
    'outer: for b in bases {
        let mut x = BigUint::from(b).modpow(&d, n);
        if x.is_one() || x == n1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&BigUint::from(2u32), n);
            if x == n1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn reference_prime(d: &ComponentDigest) -> BigUint {
    for ctr in 0u64.. {
        let h = tagged(0x03, &[&d.0, &ctr.to_be_bytes()]);
        let mut c = h[..16].to_vec();
        c[0] |= 0x80;
        c[15] |= 0x01;
        let c = BigUint::from_bytes_be(&c);
        if reference_is_prime(&c) {
            return c;
        }
    }
    unreachable!()
}

fn reference_fdh(d: &ComponentDigest, n: &BigUint) -> BigUint {
    let width = n.bits().div_ceil(8) as usize;
    let mut buf = Vec::new();
    for ctr in 0u64.. {
        if buf.len() >= width {
            break;
        }
        buf.extend(tagged(0x05, &[&d.0, &ctr.to_be_bytes()]));
    }
    buf.truncate(width);
    let v = BigUint::from_bytes_be(&buf) % (BigUint::one() << (n.bits() - 1));
    v.max(BigUint::from(2u32))
}

fn fixed(v: &BigUint, modulus: &BigUint) -> FixedUint {
    FixedUint::new(v.clone(), modulus.bits().div_ceil(8) as usize)
}

fn private_exponent() -> BigUint {
    // Key file: magic(4) version kind, then length-prefixed N, e, d.
    let bytes = KeyFile::Private(key().clone()).to_bytes();
    let mut at = 6;
    let mut fields = Vec::new();
    for _ in 0..3 {
        let len = u64::from_be_bytes(bytes[at..at + 8].try_into().unwrap()) as usize;
        at += 8;
        fields.push(BigUint::from_bytes_be(&bytes[at..at + len]));
        at += len;
    }
    assert_eq!(at, bytes.len());
    assert_eq!(&fields[0], key().public().modulus());
    fields.pop().unwrap()
}

// Accumulator

#[test]
fn accumulator_matches_reference_exponentiation() {
    let acc = Accumulator::new(params().clone());
    let n = params().modulus();
    let mut r = rng(20);
    for size in [0, 1, 2, 5, 17] {
        let set = digests(&random_components(&mut r, size));
        let exponent = set
            .iter()
            .map(reference_prime)
            .fold(BigUint::one(), |a, p| a * p);
        let expected = params().generator().modpow(&exponent, n);
        assert_eq!(acc.attest(&set).value().value(), &expected, "size {size}");
        for d in &set {
            assert_eq!(acc.prime(d), reference_prime(d));
        }
    }
}

#[test]
fn accumulator_value_size_is_constant() {
    let acc = Accumulator::new(params().clone());
    let mut r = rng(21);
    let width = params().modulus().bits().div_ceil(8) as usize;
    let all = random_components(&mut r, 1000);
    for n in [1usize, 10, 100, 1000] {
        let p = acc.attest(&digests(&all[..n]));
        assert_eq!(p.value().to_bytes().len(), width, "n = {n}");
    }
}

#[test]
fn accumulator_witness_soundness() {
    let acc = Accumulator::new(params().clone());
    let mut r = rng(22);
    for n in [1usize, 2, 7, 16, 32] {
        let cs = random_components(&mut r, n);
        let p = acc.attest(&digests(&cs));
        for c in &cs {
            let w = acc.witness(&p, &c.digest()).unwrap();
            assert!(acc.verify_inclusion(&p, &w));
            // The witness raised to the member's prime is the accumulator value.
            let lifted = w
                .witness
                .value()
                .modpow(&reference_prime(&c.digest()), params().modulus());
            assert_eq!(&lifted, p.value().value());
        }
        // A witness cannot be reused for a different component.
        let w = acc.witness(&p, &cs[0].digest()).unwrap();
        let outsider = random_components(&mut r, 1)[0].digest();
        let forged = MembershipWitness {
            member: outsider,
            witness: w.witness.clone(),
        };
        assert!(!acc.verify_inclusion(&p, &forged));
    }
}

#[test]
fn accumulator_compose_and_include_avoid_generator() {
    let acc = Accumulator::new(params().clone());
    let mut r = rng(23);
    let a = acc.attest(&digests(&random_components(&mut r, 5)));
    let b = acc.attest(&digests(&random_components(&mut r, 5)));
    let extra = random_components(&mut r, 1).remove(0);
    acc.counters().reset();
    let composed = acc.compose(&a, &b).unwrap();
    let included = acc.include(&a, &extra).unwrap();
    let counts = acc.counters().snapshot();
    assert_eq!(counts.generator_exps, 0);
    assert_eq!(counts.modular_exps, 6);
    assert!(acc.verify(&composed, &a.members().union(b.members())));
    assert!(acc.verify(
        &included,
        &a.members().union(&[extra.digest()].into_iter().collect())
    ));
}

#[test]
fn accumulator_value_perturbation_rejected() {
    let acc = Accumulator::new(params().clone());
    let set = digests(&random_components(&mut rng(24), 4));
    let p = acc.attest(&set);
    let n = params().modulus();
    let bumped = (p.value().value() + 1u32) % n;
    let tampered =
        AccumulatorAttestation::from_parts(*p.params_digest(), fixed(&bumped, n), set.clone());
    assert!(!acc.verify(&tampered, &set));
}

// Aggregate signatures

#[test]
fn rsa_identity_holds() {
    let pk = key().public();
    let d = private_exponent();
    let e = pk.exponent();
    let n = pk.modulus();
    let mut r = rng(30);
    for _ in 0..50 {
        let m = BigUint::from_bytes_be(&r.gen::<[u8; 32]>()) % n;
        assert_eq!(m.modpow(e, n).modpow(&d, n), m);
        assert_eq!(key().sign_raw(&m), m.modpow(&d, n));
    }
}

#[test]
fn fdh_matches_reference_without_collisions() {
    let n = key().public().modulus();
    let mut r = rng(31);
    let mut seen = BTreeSet::new();
    for _ in 0..1000 {
        let d = ComponentDigest(r.gen());
        let v = fdh(&d, n);
        assert_eq!(v, reference_fdh(&d, n));
        assert!(v >= BigUint::from(2u32) && &v < n);
        assert!(seen.insert(v), "collision");
    }
}

#[test]
fn aggregate_matches_reference() {
    let s = Aggregator::signer(key().clone());
    let pk = key().public();
    let n = pk.modulus();
    let d = private_exponent();
    let set = digests(&random_components(&mut rng(32), 9));
    let p = s.attest(&set).unwrap();
    let mut product = BigUint::one();
    let mut hashed = BigUint::one();
    for m in &set {
        let h = reference_fdh(m, n);
        let sig = h.modpow(&d, n);
        assert_eq!(p.signatures()[m].value(), &sig);
        product = product * &sig % n;
        hashed = hashed * h % n;
    }
    assert_eq!(p.aggregate().value(), &product);
    assert_eq!(product.modpow(pk.exponent(), n), hashed);
}

#[test]
fn aggregate_unforgeable_by_verifier() {
    let signer = Aggregator::signer(key().clone());
    let verifier = Aggregator::verifier(key().public().clone());
    let n = key().public().modulus();
    let mut r = rng(33);
    for _ in 0..50 {
        let k = r.gen_range(1..6);
        let cs = random_components(&mut r, k);
        let set = digests(&cs);
        let p = signer.attest(&set).unwrap();
        assert!(verifier.verify(&p, &set));
        assert!(verifier.attest(&set).is_err());

        // Swap in an unsigned member, keeping the old signature.
        let outsider = random_components(&mut r, 1)[0].digest();
        let mut sigs = p.signatures().clone();
        let (victim, sig) = sigs.pop_first().unwrap();
        sigs.insert(outsider, sig);
        let forged = catt_core::AggregateAttestation::from_parts(
            *p.key_digest(),
            p.aggregate().clone(),
            sigs,
        );
        let mut forged_set = set.clone();
        forged_set.remove(&victim);
        forged_set.insert(outsider);
        assert!(!verifier.verify(&forged, &forged_set));

        // A random aggregate does not verify either.
        let junk = BigUint::from_bytes_be(&r.gen::<[u8; 32]>()) % n;
        let junk = catt_core::AggregateAttestation::from_parts(
            *p.key_digest(),
            fixed(&junk, n),
            p.signatures().clone(),
        );
        assert!(!verifier.verify(&junk, &set));
        let w = SignatureWitness {
            member: outsider,
            signature: p.signatures().values().next().unwrap().clone(),
        };
        assert!(!verifier.verify_inclusion(&p, &w));
    }
}

#[test]
fn private_exponent_never_serialized() {
    let d = private_exponent().to_bytes_be();
    let backends = [
        catt_core::Backend::new(catt_core::SchemeId::Aggregate, &common::material()).unwrap(),
        catt_core::Backend::new(catt_core::SchemeId::Integrated, &common::material()).unwrap(),
    ];
    for b in backends {
        let set = digests(&random_components(&mut rng(34), 6));
        let bytes = catt_core::serialize_proof(&b.attest(&set).unwrap());
        assert!(!bytes.windows(d.len()).any(|w| w == d.as_slice()));
        assert!(!bytes.windows(8).any(|w| w == &d[..8]));
    }
    let public = KeyFile::Public(key().public().clone()).to_bytes();
    assert!(!public.windows(8).any(|w| w == &d[..8]));
}

// Integrated

#[test]
fn integrated_matches_layered_reference() {
    let i = Integrated::signer(params().clone(), key().clone());
    let n = params().modulus();
    let sn = key().public().modulus();
    let d = private_exponent();
    let mut r = rng(40);
    for size in [0, 1, 4, 11] {
        let set = digests(&random_components(&mut r, size));
        let p = i.attest(&set).unwrap();
        let root = ComponentDigest(catt_core::merkle::compute_root(&set));
        let acc = params().generator().modpow(&reference_prime(&root), n);
        assert_eq!(p.acc_value().value(), &acc);
        let acc_bytes = fixed(&acc, n).to_bytes();
        let message = ComponentDigest(tagged(0x05, &[&acc_bytes]));
        assert_eq!(message, accumulator_message(p.acc_value()));
        assert_eq!(
            p.signature().value(),
            &reference_fdh(&message, sn).modpow(&d, sn)
        );
        assert_eq!(i.root_witness(), params().generator());
    }
}

#[test]
fn integrated_layer_independence() {
    let i = Integrated::signer(params().clone(), key().clone());
    let n = params().modulus();
    let mut r = rng(41);
    for _ in 0..20 {
        let k = r.gen_range(1..8);
        let cs = random_components(&mut r, k);
        let set = digests(&cs);
        let p = i.attest(&set).unwrap();
        let report = i.verify_layers(&p, &set);
        assert!(report.merkle_ok && report.accumulator_ok && report.signature_ok);

        // Wrong component set: only the Merkle layer fails.
        let mut other = set.clone();
        other.insert(random_components(&mut r, 1)[0].digest());
        let report = i.verify_layers(&p, &other);
        assert!(!report.merkle_ok && report.accumulator_ok && report.signature_ok);

        // Wrong params digest: only the accumulator layer fails.
        let mut pd = *p.params_digest();
        pd[0] ^= 1;
        let t = IntegratedAttestation::from_parts(
            p.merkle().clone(),
            pd,
            p.acc_value().clone(),
            *p.key_digest(),
            p.signature().clone(),
        );
        let report = i.verify_layers(&t, &set);
        assert!(report.merkle_ok && !report.accumulator_ok && report.signature_ok);

        // Bad signature: only the signature layer fails.
        let sig = (p.signature().value() + 1u32) % key().public().modulus();
        let t = IntegratedAttestation::from_parts(
            p.merkle().clone(),
            *p.params_digest(),
            p.acc_value().clone(),
            *p.key_digest(),
            fixed(&sig, key().public().modulus()),
        );
        let report = i.verify_layers(&t, &set);
        assert!(report.merkle_ok && report.accumulator_ok && !report.signature_ok);

        // A changed accumulator value breaks the accumulator layer and,
        // since the signature covers it, the signature layer.
        let v = (p.acc_value().value() + 1u32) % n;
        let t = IntegratedAttestation::from_parts(
            p.merkle().clone(),
            *p.params_digest(),
            fixed(&v, n),
            *p.key_digest(),
            p.signature().clone(),
        );
        let report = i.verify_layers(&t, &set);
        assert!(report.merkle_ok && !report.accumulator_ok && !report.signature_ok);
    }
}

#[test]
fn integrated_include_chain() {
    let i = Integrated::signer(params().clone(), key().clone());
    let cs = random_components(&mut rng(42), 10);
    let mut p = i.attest(&DigestSet::default()).unwrap();
    for (k, c) in cs.iter().enumerate() {
        p = i.include(&p, c).unwrap();
        let so_far = digests(&cs[..=k]);
        assert!(i.verify(&p, &so_far));
        assert_eq!(p, i.attest(&so_far).unwrap());
        for c in &cs[..=k] {
            let path = i.witness(&p, &c.digest()).unwrap();
            assert!(i.verify_inclusion(&p, &c.digest(), &path));
        }
    }
}
