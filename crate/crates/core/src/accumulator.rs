//! RSA accumulator attestation.
//!
//! A set is represented by `g^(∏ prime(d)) mod N`, where `prime` maps each
//! member digest to a distinct 128-bit prime and `N` is a product of two
//! safe primes. Whoever knows the factorization of `N` can forge
//! membership, so parameters come from a trusted setup whose secret is
//! discarded after [`AccumulatorParams::setup`].

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::component::{Component, ComponentDigest, DigestSet};
use crate::encoding::{byte_len, FixedUint, Reader, Writer};
use crate::error::{Error, Result};
use crate::hash::{Digest, HashSuite};
use crate::metrics::OpCounters;
use crate::primes::{generate_safe_prime, hash_to_prime, random_bits, seeded_rng};

pub const PARAMS_MAGIC: &[u8; 4] = b"CATP";

/// Modulus sizes accepted by [`AccumulatorParams::setup`].
pub const SUPPORTED_BITS: [u32; 3] = [512, 1024, 2048];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AccumulatorParams {
    modulus: BigUint,
    generator: BigUint,
    bit_length: u32,
}

impl AccumulatorParams {
    /// Deterministic trusted setup: both safe primes and the generator are
    /// drawn from a ChaCha20 stream keyed by `seed` and `bit_length`.
    pub fn setup(seed: &[u8], bit_length: u32) -> Result<Self> {
        if !SUPPORTED_BITS.contains(&bit_length) {
            return Err(Error::InvalidParameter(format!(
                "unsupported modulus size {bit_length}"
            )));
        }
        let mut rng = seeded_rng(
            b"catt/accumulator-setup",
            &[&bit_length.to_be_bytes()[..], seed].concat(),
        );
        let half = u64::from(bit_length / 2);
        let p = generate_safe_prime(&mut rng, half);
        let q = loop {
            let q = generate_safe_prime(&mut rng, half);
            if q != p {
                break q;
            }
        };
        let modulus = &p * &q;
        debug_assert_eq!(modulus.bits(), u64::from(bit_length));
        let generator = loop {
            let h = random_bits(&mut rng, u64::from(bit_length) + 64) % &modulus;
            let g = h.modpow(&BigUint::from(2u32), &modulus);
            if g > BigUint::one() && g.gcd(&modulus).is_one() {
                break g;
            }
        };
        Ok(Self {
            modulus,
            generator,
            bit_length,
        })
    }

    /// Parameters from explicit values. Used for fixtures and decoding.
    pub fn from_parts(modulus: BigUint, generator: BigUint, bit_length: u32) -> Result<Self> {
        if modulus < BigUint::from(3u32) || modulus.is_even() {
            return Err(Error::InvalidParameter(
                "modulus must be odd and > 2".into(),
            ));
        }
        if generator <= BigUint::one() || generator >= modulus {
            return Err(Error::InvalidParameter("generator out of range".into()));
        }
        if !generator.gcd(&modulus).is_one() {
            return Err(Error::InvalidParameter(
                "generator not coprime to modulus".into(),
            ));
        }
        if u64::from(bit_length) != modulus.bits() {
            return Err(Error::InvalidParameter(
                "bit length does not match modulus".into(),
            ));
        }
        Ok(Self {
            modulus,
            generator,
            bit_length,
        })
    }

    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn generator(&self) -> &BigUint {
        &self.generator
    }

    pub fn bit_length(&self) -> u32 {
        self.bit_length
    }

    /// Byte width of every group element under these parameters.
    pub fn element_len(&self) -> usize {
        byte_len(&self.modulus)
    }

    /// `"CATP" ‖ bit_length (u32 BE) ‖ N ‖ g`, integers minimal and
    /// length-prefixed.
    pub fn to_bytes(&self) -> Vec<u8> {
        Writer::new()
            .raw(PARAMS_MAGIC)
            .u32(self.bit_length)
            .biguint(&self.modulus)
            .biguint(&self.generator)
            .finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        if r.take(4).ok() != Some(PARAMS_MAGIC.as_slice()) {
            return Err(Error::NotAProof);
        }
        let bit_length = r.u32()?;
        let modulus = r.biguint()?;
        let generator = r.biguint()?;
        r.finish()?;
        Self::from_parts(modulus, generator, bit_length)
            .map_err(|_| Error::Malformed("invalid accumulator parameters"))
    }

    pub fn digest(&self) -> Digest {
        HashSuite::plain(&self.to_bytes())
    }
}

/// Maps member digests to the prime exponents that get accumulated.
pub trait PrimeMap {
    fn prime(&self, d: &ComponentDigest) -> BigUint;
}

/// The production mapping, [`hash_to_prime`].
#[derive(Debug, Clone, Copy, Default)]
pub struct HashToPrime;

impl PrimeMap for HashToPrime {
    fn prime(&self, d: &ComponentDigest) -> BigUint {
        hash_to_prime(d)
    }
}

/// Fixed table of primes, for hand-checkable fixtures.
impl PrimeMap for BTreeMap<ComponentDigest, BigUint> {
    fn prime(&self, d: &ComponentDigest) -> BigUint {
        self.get(d)
            .cloned()
            .expect("digest missing from injected prime table")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AccumulatorAttestation {
    params_digest: Digest,
    value: FixedUint,
    members: DigestSet,
}

impl AccumulatorAttestation {
    pub fn params_digest(&self) -> &Digest {
        &self.params_digest
    }

    /// The constant-size accumulated value.
    pub fn value(&self) -> &FixedUint {
        &self.value
    }

    pub fn members(&self) -> &DigestSet {
        &self.members
    }

    pub fn from_parts(params_digest: Digest, value: FixedUint, members: DigestSet) -> Self {
        Self {
            params_digest,
            value,
            members,
        }
    }

    pub(crate) fn encode_into(&self, w: &mut Writer) {
        w.raw(&self.params_digest)
            .fixed(&self.value)
            .digest_set(&self.members);
    }

    pub(crate) fn decode_from(r: &mut Reader<'_>) -> Result<Self> {
        let params_digest = r.take(32)?.try_into().unwrap();
        let value = r.fixed()?;
        let members = r.digest_set()?;
        Ok(Self {
            params_digest,
            value,
            members,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MembershipWitness {
    pub member: ComponentDigest,
    pub witness: FixedUint,
}

impl MembershipWitness {
    pub(crate) fn encode_into(&self, w: &mut Writer) {
        w.digest(&self.member).fixed(&self.witness);
    }

    pub(crate) fn decode_from(r: &mut Reader<'_>) -> Result<Self> {
        Ok(Self {
            member: r.digest()?,
            witness: r.fixed()?,
        })
    }
}

/// Accumulator backend bound to one set of parameters.
#[derive(Debug, Clone)]
pub struct Accumulator<P = HashToPrime> {
    params: AccumulatorParams,
    params_digest: Digest,
    primes: P,
    counters: OpCounters,
}

impl Accumulator<HashToPrime> {
    pub fn new(params: AccumulatorParams) -> Self {
        Self::with_prime_map(params, HashToPrime)
    }
}

impl<P: PrimeMap> Accumulator<P> {
    pub fn with_prime_map(params: AccumulatorParams, primes: P) -> Self {
        let params_digest = params.digest();
        Self {
            params,
            params_digest,
            primes,
            counters: OpCounters::default(),
        }
    }

    pub fn params(&self) -> &AccumulatorParams {
        &self.params
    }

    pub fn params_digest(&self) -> &Digest {
        &self.params_digest
    }

    pub fn counters(&self) -> &OpCounters {
        &self.counters
    }

    pub fn prime(&self, d: &ComponentDigest) -> BigUint {
        self.counters.prime_derivation();
        self.primes.prime(d)
    }

    fn element(&self, value: BigUint) -> FixedUint {
        FixedUint::new(value, self.params.element_len())
    }

    /// `g^(∏ prime(d) for d in members) mod N`, one exponentiation per member.
    fn raise_generator<'a>(&self, members: impl Iterator<Item = &'a ComponentDigest>) -> BigUint {
        let n = &self.params.modulus;
        let mut members = members.peekable();
        let Some(first) = members.next() else {
            return self.params.generator.clone();
        };
        self.counters.generator_exp();
        let mut value = self.params.generator.modpow(&self.prime(first), n);
        for d in members {
            value = self.raise(&value, d);
        }
        value
    }

    fn raise(&self, base: &BigUint, d: &ComponentDigest) -> BigUint {
        self.counters.modular_exp();
        base.modpow(&self.prime(d), &self.params.modulus)
    }

    pub fn attest(&self, set: &DigestSet) -> AccumulatorAttestation {
        AccumulatorAttestation {
            params_digest: self.params_digest,
            value: self.element(self.raise_generator(set.iter())),
            members: set.clone(),
        }
    }

    pub fn verify(&self, p: &AccumulatorAttestation, set: &DigestSet) -> bool {
        p.params_digest == self.params_digest
            && p.members == *set
            && p.value.width() == self.params.element_len()
            && *p.value.value() == self.raise_generator(set.iter())
    }

    /// Structural checks that cost no exponentiation.
    fn check(&self, p: &AccumulatorAttestation) -> Result<()> {
        if p.params_digest != self.params_digest {
            return Err(Error::DomainMismatch("accumulator parameters differ"));
        }
        let v = p.value.value();
        if p.value.width() != self.params.element_len() || v.is_zero() || *v >= self.params.modulus
        {
            return Err(Error::CorruptProof("accumulator value out of range"));
        }
        if p.members.is_empty() && *v != self.params.generator {
            return Err(Error::CorruptProof(
                "empty accumulator must equal the generator",
            ));
        }
        Ok(())
    }

    /// Raises `a`'s value by the primes of members only `b` has. The
    /// generator is never touched.
    pub fn compose(
        &self,
        a: &AccumulatorAttestation,
        b: &AccumulatorAttestation,
    ) -> Result<AccumulatorAttestation> {
        self.check(a)?;
        self.check(b)?;
        let mut value = a.value.value().clone();
        for d in b.members.difference(&a.members) {
            value = self.raise(&value, d);
        }
        Ok(AccumulatorAttestation {
            params_digest: self.params_digest,
            value: self.element(value),
            members: a.members.union(&b.members),
        })
    }

    /// One exponentiation for a new member; identity for an existing one.
    pub fn include_digest(
        &self,
        p: &AccumulatorAttestation,
        d: ComponentDigest,
    ) -> Result<AccumulatorAttestation> {
        self.check(p)?;
        if p.members.contains(&d) {
            return Ok(p.clone());
        }
        let value = self.raise(p.value.value(), &d);
        let mut members = p.members.clone();
        members.insert(d);
        Ok(AccumulatorAttestation {
            params_digest: self.params_digest,
            value: self.element(value),
            members,
        })
    }

    pub fn include(
        &self,
        p: &AccumulatorAttestation,
        c: &Component,
    ) -> Result<AccumulatorAttestation> {
        self.include_digest(p, c.digest())
    }

    /// `g` raised to every member prime except `d`'s. O(n).
    pub fn witness(
        &self,
        p: &AccumulatorAttestation,
        d: &ComponentDigest,
    ) -> Result<MembershipWitness> {
        if !p.members.contains(d) {
            return Err(Error::NotAMember(*d));
        }
        let value = self.raise_generator(p.members.iter().filter(|m| *m != d));
        Ok(MembershipWitness {
            member: *d,
            witness: self.element(value),
        })
    }

    pub fn verify_inclusion(&self, p: &AccumulatorAttestation, w: &MembershipWitness) -> bool {
        p.params_digest == self.params_digest
            && w.witness.width() == self.params.element_len()
            && *w.witness.value() < self.params.modulus
            && self.raise(w.witness.value(), &w.member) == *p.value.value()
    }

    /// Accumulates a single element from scratch: `g^prime(d) mod N`.
    pub(crate) fn commit_single(&self, d: &ComponentDigest) -> FixedUint {
        self.element(self.raise_generator(std::iter::once(d)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fixture() -> (
        Accumulator<BTreeMap<ComponentDigest, BigUint>>,
        ComponentDigest,
        ComponentDigest,
    ) {
        let d3 = ComponentDigest([3; 32]);
        let d5 = ComponentDigest([5; 32]);
        let table = BTreeMap::from([(d3, BigUint::from(3u32)), (d5, BigUint::from(5u32))]);
        let params = AccumulatorParams::from_parts(35u32.into(), 2u32.into(), 6).unwrap();
        (Accumulator::with_prime_map(params, table), d3, d5)
    }

    fn set(ds: &[ComponentDigest]) -> DigestSet {
        ds.iter().copied().collect()
    }

    #[test]
    fn toy_fixture_values() {
        let (acc, d3, d5) = fixture();
        let both = acc.attest(&set(&[d3, d5]));
        assert_eq!(*both.value().value(), BigUint::from(8u32));
        assert_eq!(
            *acc.attest(&DigestSet::new()).value().value(),
            BigUint::from(2u32)
        );

        let w3 = acc.witness(&both, &d3).unwrap();
        assert_eq!(*w3.witness.value(), BigUint::from(32u32));
        assert!(acc.verify_inclusion(&both, &w3));
        let forged = MembershipWitness {
            member: d5,
            witness: w3.witness.clone(),
        };
        assert!(!acc.verify_inclusion(&both, &forged));

        let only3 = acc.attest(&set(&[d3]));
        let only5 = acc.attest(&set(&[d5]));
        assert_eq!(*only3.value().value(), BigUint::from(8u32));
        assert_eq!(*only5.value().value(), BigUint::from(32u32));
        assert_eq!(acc.compose(&only3, &only5).unwrap(), both);
        assert_eq!(acc.include_digest(&only3, d5).unwrap(), both);

        let single_w = acc.witness(&only3, &d3).unwrap();
        assert_eq!(*single_w.witness.value(), BigUint::from(2u32));
    }

    #[test]
    fn params_validation_and_codec() {
        assert!(AccumulatorParams::from_parts(35u32.into(), 1u32.into(), 6).is_err());
        assert!(AccumulatorParams::from_parts(35u32.into(), 7u32.into(), 6).is_err());
        assert!(AccumulatorParams::from_parts(35u32.into(), 2u32.into(), 512).is_err());
        let p = AccumulatorParams::from_parts(35u32.into(), 2u32.into(), 6).unwrap();
        assert_eq!(AccumulatorParams::from_bytes(&p.to_bytes()).unwrap(), p);
        assert!(matches!(
            AccumulatorParams::setup(b"x", 768),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn domain_mismatch_and_corrupt() {
        let (acc, d3, _) = fixture();
        let p = acc.attest(&set(&[d3]));
        let other = AccumulatorAttestation::from_parts([9; 32], p.value.clone(), p.members.clone());
        assert!(matches!(
            acc.compose(&p, &other),
            Err(Error::DomainMismatch(_))
        ));
        let big = AccumulatorAttestation::from_parts(
            *acc.params_digest(),
            FixedUint::new(40u32.into(), 1),
            p.members.clone(),
        );
        assert!(matches!(
            acc.include_digest(&big, d3),
            Err(Error::CorruptProof(_))
        ));
    }

    #[test]
    fn witness_for_non_member() {
        let (acc, d3, d5) = fixture();
        let p = acc.attest(&set(&[d3]));
        assert_eq!(acc.witness(&p, &d5), Err(Error::NotAMember(d5)));
    }
}
