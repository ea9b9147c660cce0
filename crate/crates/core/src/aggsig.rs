//! Same-key RSA full-domain-hash signatures aggregated by multiplication.
//!
//! Each member digest `d` is signed as `σ = fdh(d)^d_priv mod N`. The
//! aggregate is `∏ σ mod N` and satisfies `aggregate^e ≡ ∏ fdh(d) (mod N)`.
//! Individual signatures stay in the proof so that overlapping proofs can
//! be merged without dividing anything out.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::component::{Component, ComponentDigest, DigestSet};
use crate::encoding::{byte_len, FixedUint, Reader, Writer};
use crate::error::{Error, Result};
use crate::hash::{Digest, HashSuite, Tag, DIGEST_LEN};
use crate::metrics::OpCounters;
use crate::primes::{generate_prime, seeded_rng};

pub const KEY_MAGIC: &[u8; 4] = b"CATK";
pub const KEY_VERSION: u8 = 0x01;
pub const PUBLIC_EXPONENT: u32 = 65537;

/// Modulus sizes accepted by [`SigningKeyPair::generate`].
pub const SUPPORTED_BITS: [u32; 3] = [512, 1024, 2048];

const KIND_PUBLIC: u8 = 0x00;
const KIND_PRIVATE: u8 = 0x01;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PublicKey {
    modulus: BigUint,
    exponent: BigUint,
}

impl PublicKey {
    pub fn modulus(&self) -> &BigUint {
        &self.modulus
    }

    pub fn exponent(&self) -> &BigUint {
        &self.exponent
    }

    pub fn element_len(&self) -> usize {
        byte_len(&self.modulus)
    }

    /// `"CATK" ‖ 0x01 ‖ 0x00 ‖ N ‖ e`.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.header(KIND_PUBLIC).finish()
    }

    fn header(&self, kind: u8) -> Writer {
        let mut w = Writer::new();
        w.raw(KEY_MAGIC)
            .u8(KEY_VERSION)
            .u8(kind)
            .biguint(&self.modulus)
            .biguint(&self.exponent);
        w
    }

    pub fn digest(&self) -> Digest {
        HashSuite::plain(&self.to_bytes())
    }
}

/// RSA key pair. The private exponent never appears in a proof.
#[derive(Clone, PartialEq, Eq)]
pub struct SigningKeyPair {
    public: PublicKey,
    private_exponent: BigUint,
}

impl std::fmt::Debug for SigningKeyPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SigningKeyPair")
            .field("public", &self.public)
            .finish_non_exhaustive()
    }
}

impl SigningKeyPair {
    /// Deterministic key generation from `seed`, `e = 65537`.
    pub fn generate(seed: &[u8], bit_length: u32) -> Result<Self> {
        if !SUPPORTED_BITS.contains(&bit_length) {
            return Err(Error::InvalidParameter(format!(
                "unsupported modulus size {bit_length}"
            )));
        }
        let mut rng = seeded_rng(
            b"catt/signing-keygen",
            &[&bit_length.to_be_bytes()[..], seed].concat(),
        );
        let e = BigUint::from(PUBLIC_EXPONENT);
        let half = u64::from(bit_length / 2);
        loop {
            let p = generate_prime(&mut rng, half);
            let q = generate_prime(&mut rng, half);
            if p == q {
                continue;
            }
            let phi = (&p - 1u32) * (&q - 1u32);
            let Some(d) = e.modinv(&phi) else { continue };
            let modulus = p * q;
            debug_assert_eq!(modulus.bits(), u64::from(bit_length));
            return Ok(Self {
                public: PublicKey {
                    modulus,
                    exponent: e,
                },
                private_exponent: d,
            });
        }
    }

    /// Key from explicit values, for fixtures and decoding. Only range
    /// checks are possible without the factorization.
    pub fn from_parts(
        modulus: BigUint,
        exponent: BigUint,
        private_exponent: BigUint,
    ) -> Result<Self> {
        let public = PublicKey::from_parts(modulus, exponent)?;
        if private_exponent <= BigUint::one() || private_exponent >= public.modulus {
            return Err(Error::InvalidParameter(
                "private exponent out of range".into(),
            ));
        }
        Ok(Self {
            public,
            private_exponent,
        })
    }

    pub fn public(&self) -> &PublicKey {
        &self.public
    }

    /// `"CATK" ‖ 0x01 ‖ 0x01 ‖ N ‖ e ‖ d`.
    pub fn to_bytes(&self) -> Vec<u8> {
        self.public
            .header(KIND_PRIVATE)
            .biguint(&self.private_exponent)
            .finish()
    }

    /// Raw RSA signing primitive: `m^d mod N`.
    pub fn sign_raw(&self, m: &BigUint) -> BigUint {
        m.modpow(&self.private_exponent, &self.public.modulus)
    }
}

impl PublicKey {
    pub fn from_parts(modulus: BigUint, exponent: BigUint) -> Result<Self> {
        if modulus < BigUint::from(3u32) || modulus.is_even() {
            return Err(Error::InvalidParameter(
                "modulus must be odd and > 2".into(),
            ));
        }
        if exponent <= BigUint::one() || exponent.is_even() {
            return Err(Error::InvalidParameter(
                "public exponent must be odd and > 1".into(),
            ));
        }
        Ok(Self { modulus, exponent })
    }
}

/// Either half of a key file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KeyFile {
    Public(PublicKey),
    Private(SigningKeyPair),
}

impl KeyFile {
    pub fn public(&self) -> &PublicKey {
        match self {
            KeyFile::Public(pk) => pk,
            KeyFile::Private(k) => k.public(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            KeyFile::Public(pk) => pk.to_bytes(),
            KeyFile::Private(k) => k.to_bytes(),
        }
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        if r.take(4).ok() != Some(KEY_MAGIC.as_slice()) {
            return Err(Error::NotAProof);
        }
        let version = r.u8()?;
        if version != KEY_VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let kind = r.u8()?;
        let modulus = r.biguint()?;
        let exponent = r.biguint()?;
        let bad = |_| Error::Malformed("invalid key material");
        let key = match kind {
            KIND_PUBLIC => KeyFile::Public(PublicKey::from_parts(modulus, exponent).map_err(bad)?),
            KIND_PRIVATE => {
                let d = r.biguint()?;
                KeyFile::Private(SigningKeyPair::from_parts(modulus, exponent, d).map_err(bad)?)
            }
            _ => return Err(Error::Malformed("unknown key kind")),
        };
        r.finish()?;
        Ok(key)
    }
}

/// Maps a digest to the integer that gets signed.
pub trait MessageEncoder {
    fn encode(&self, d: &ComponentDigest, modulus: &BigUint) -> BigUint;
}

/// The production encoding, [`fdh`].
#[derive(Debug, Clone, Copy, Default)]
pub struct FullDomainHash;

impl MessageEncoder for FullDomainHash {
    fn encode(&self, d: &ComponentDigest, modulus: &BigUint) -> BigUint {
        fdh(d, modulus)
    }
}

/// Fixed table of encoded values, for hand-checkable fixtures.
impl MessageEncoder for BTreeMap<ComponentDigest, BigUint> {
    fn encode(&self, d: &ComponentDigest, _modulus: &BigUint) -> BigUint {
        self.get(d)
            .cloned()
            .expect("digest missing from injected message table")
    }
}

/// Full-domain hash of `d` into `[2, N)`.
///
/// `H(0x05 ‖ d ‖ ctr as u64 BE)` blocks for `ctr = 0, 1, …` are concatenated
/// to the byte width of `N`, then masked to one bit fewer than `N` so the
/// result is below `N`. Values 0 and 1 are lifted to 2.
pub fn fdh(d: &ComponentDigest, modulus: &BigUint) -> BigUint {
    let width = byte_len(modulus);
    let mut buf = Vec::with_capacity(width.next_multiple_of(DIGEST_LEN));
    let mut ctr = 0u64;
    while buf.len() < width {
        buf.extend_from_slice(&HashSuite::tagged(
            Tag::Fdh,
            &[d.as_bytes(), &ctr.to_be_bytes()],
        ));
        ctr += 1;
    }
    buf.truncate(width);
    let mask = (BigUint::one() << (modulus.bits() - 1)) - 1u32;
    (BigUint::from_bytes_be(&buf) & mask).max(BigUint::from(2u32))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AggregateAttestation {
    key_digest: Digest,
    aggregate: FixedUint,
    signatures: BTreeMap<ComponentDigest, FixedUint>,
    members: DigestSet,
}

impl AggregateAttestation {
    pub fn key_digest(&self) -> &Digest {
        &self.key_digest
    }

    /// The compact aggregate signature.
    pub fn aggregate(&self) -> &FixedUint {
        &self.aggregate
    }

    pub fn signatures(&self) -> &BTreeMap<ComponentDigest, FixedUint> {
        &self.signatures
    }

    pub fn members(&self) -> &DigestSet {
        &self.members
    }

    pub fn from_parts(
        key_digest: Digest,
        aggregate: FixedUint,
        signatures: BTreeMap<ComponentDigest, FixedUint>,
    ) -> Self {
        let members = signatures.keys().copied().collect();
        Self {
            key_digest,
            aggregate,
            signatures,
            members,
        }
    }

    pub(crate) fn encode_into(&self, w: &mut Writer) {
        w.raw(&self.key_digest)
            .fixed(&self.aggregate)
            .len(self.signatures.len());
        for (d, sig) in &self.signatures {
            w.digest(d).fixed(sig);
        }
    }

    pub(crate) fn decode_from(r: &mut Reader<'_>) -> Result<Self> {
        let key_digest = r.take(32)?.try_into().unwrap();
        let aggregate = r.fixed()?;
        let n = r.len(DIGEST_LEN + 9)?;
        let mut signatures = BTreeMap::new();
        let mut prev: Option<ComponentDigest> = None;
        for _ in 0..n {
            let d = r.digest()?;
            if prev.is_some_and(|p| p >= d) {
                return Err(Error::Malformed("digests not strictly ascending"));
            }
            prev = Some(d);
            signatures.insert(d, r.fixed()?);
        }
        Ok(Self::from_parts(key_digest, aggregate, signatures))
    }
}

/// A member's individual signature, which doubles as its inclusion witness.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SignatureWitness {
    pub member: ComponentDigest,
    pub signature: FixedUint,
}

impl SignatureWitness {
    pub(crate) fn encode_into(&self, w: &mut Writer) {
        w.digest(&self.member).fixed(&self.signature);
    }

    pub(crate) fn decode_from(r: &mut Reader<'_>) -> Result<Self> {
        Ok(Self {
            member: r.digest()?,
            signature: r.fixed()?,
        })
    }
}

/// Signature backend. Built with a key pair it can attest; built with a
/// public key alone it can verify and compose.
#[derive(Debug, Clone)]
pub struct Aggregator<E = FullDomainHash> {
    public: PublicKey,
    key_digest: Digest,
    signer: Option<SigningKeyPair>,
    encoder: E,
    counters: OpCounters,
}

impl Aggregator<FullDomainHash> {
    pub fn signer(key: SigningKeyPair) -> Self {
        Self::with_encoder(key.public.clone(), Some(key), FullDomainHash)
    }

    pub fn verifier(public: PublicKey) -> Self {
        Self::with_encoder(public, None, FullDomainHash)
    }
}

impl<E: MessageEncoder> Aggregator<E> {
    pub fn with_encoder(public: PublicKey, signer: Option<SigningKeyPair>, encoder: E) -> Self {
        if let Some(k) = &signer {
            assert_eq!(k.public, public, "key pair does not match public key");
        }
        let key_digest = public.digest();
        Self {
            public,
            key_digest,
            signer,
            encoder,
            counters: OpCounters::default(),
        }
    }

    pub fn public(&self) -> &PublicKey {
        &self.public
    }

    pub fn key_digest(&self) -> &Digest {
        &self.key_digest
    }

    pub fn counters(&self) -> &OpCounters {
        &self.counters
    }

    pub fn can_sign(&self) -> bool {
        self.signer.is_some()
    }

    fn modulus(&self) -> &BigUint {
        &self.public.modulus
    }

    fn element(&self, v: BigUint) -> FixedUint {
        FixedUint::new(v, self.public.element_len())
    }

    pub fn encode(&self, d: &ComponentDigest) -> BigUint {
        self.encoder.encode(d, self.modulus())
    }

    /// `encode(d)^d_priv mod N`.
    pub fn sign(&self, d: &ComponentDigest) -> Result<FixedUint> {
        let key = self
            .signer
            .as_ref()
            .ok_or(Error::Configuration("signing requires the private key"))?;
        self.counters.signature();
        self.counters.modular_exp();
        Ok(self.element(key.sign_raw(&self.encode(d))))
    }

    /// `σ^e ≡ encode(d) (mod N)`.
    pub fn verify_signature(&self, d: &ComponentDigest, sig: &FixedUint) -> bool {
        sig.width() == self.public.element_len()
            && sig.value() < self.modulus()
            && sig.value().modpow(&self.public.exponent, self.modulus()) == self.encode(d)
    }

    fn product<'a>(&self, values: impl Iterator<Item = &'a BigUint>) -> BigUint {
        values.fold(BigUint::one(), |acc, v| (acc * v) % self.modulus())
    }

    fn assemble(&self, signatures: BTreeMap<ComponentDigest, FixedUint>) -> AggregateAttestation {
        let aggregate = self.element(self.product(signatures.values().map(FixedUint::value)));
        AggregateAttestation::from_parts(self.key_digest, aggregate, signatures)
    }

    pub fn attest(&self, set: &DigestSet) -> Result<AggregateAttestation> {
        let signatures = set
            .iter()
            .map(|d| Ok((*d, self.sign(d)?)))
            .collect::<Result<_>>()?;
        Ok(self.assemble(signatures))
    }

    pub fn verify(&self, p: &AggregateAttestation, set: &DigestSet) -> bool {
        if p.key_digest != self.key_digest
            || p.members != *set
            || p.aggregate.width() != self.public.element_len()
        {
            return false;
        }
        if *p.aggregate.value() != self.product(p.signatures.values().map(FixedUint::value)) {
            return false;
        }
        if !p
            .signatures
            .iter()
            .all(|(d, s)| self.verify_signature(d, s))
        {
            return false;
        }
        let expected = self.product(
            set.iter()
                .map(|d| self.encode(d))
                .collect::<Vec<_>>()
                .iter(),
        );
        p.aggregate
            .value()
            .modpow(&self.public.exponent, self.modulus())
            == expected
    }

    fn check(&self, p: &AggregateAttestation) -> Result<()> {
        if p.key_digest != self.key_digest {
            return Err(Error::DomainMismatch("signing keys differ"));
        }
        let width = self.public.element_len();
        let in_range = |v: &FixedUint| {
            v.width() == width && v.value() < self.modulus() && !v.value().is_zero()
        };
        if !in_range(&p.aggregate) || !p.signatures.values().all(in_range) {
            return Err(Error::CorruptProof("signature value out of range"));
        }
        if *p.aggregate.value() != self.product(p.signatures.values().map(FixedUint::value)) {
            return Err(Error::CorruptProof(
                "aggregate is not the product of member signatures",
            ));
        }
        Ok(())
    }

    /// Union of the member signature maps; overlaps are kept once.
    pub fn compose(
        &self,
        a: &AggregateAttestation,
        b: &AggregateAttestation,
    ) -> Result<AggregateAttestation> {
        self.check(a)?;
        self.check(b)?;
        let mut signatures = a.signatures.clone();
        for (d, s) in &b.signatures {
            signatures.entry(*d).or_insert_with(|| s.clone());
        }
        Ok(self.assemble(signatures))
    }

    /// One new signature and one multiplication.
    pub fn include_digest(
        &self,
        p: &AggregateAttestation,
        d: ComponentDigest,
    ) -> Result<AggregateAttestation> {
        self.check(p)?;
        if p.members.contains(&d) {
            return Ok(p.clone());
        }
        let sig = self.sign(&d)?;
        let aggregate = self.element((p.aggregate.value() * sig.value()) % self.modulus());
        let mut signatures = p.signatures.clone();
        signatures.insert(d, sig);
        Ok(AggregateAttestation::from_parts(
            self.key_digest,
            aggregate,
            signatures,
        ))
    }

    pub fn include(&self, p: &AggregateAttestation, c: &Component) -> Result<AggregateAttestation> {
        self.include_digest(p, c.digest())
    }

    pub fn witness(
        &self,
        p: &AggregateAttestation,
        d: &ComponentDigest,
    ) -> Result<SignatureWitness> {
        let signature = p.signatures.get(d).ok_or(Error::NotAMember(*d))?;
        Ok(SignatureWitness {
            member: *d,
            signature: signature.clone(),
        })
    }

    /// The individual signature verifies and is the one the proof carries.
    pub fn verify_inclusion(&self, p: &AggregateAttestation, w: &SignatureWitness) -> bool {
        p.key_digest == self.key_digest
            && p.signatures.get(&w.member) == Some(&w.signature)
            && self.verify_signature(&w.member, &w.signature)
    }
}
