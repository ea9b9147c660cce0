//! Layered Merkle → accumulator → signature attestation.
//!
//! The Merkle root is accumulated as a single element, and the accumulator
//! value is signed. The membership witness for the root in a one-element
//! accumulator is the generator itself, so it is not stored.
//!
//! Each layer is checked against the stored value of the layer beneath it,
//! which keeps a failure localized in the [`LayerReport`].

use num_bigint::BigUint;

use crate::accumulator::{Accumulator, AccumulatorParams, HashToPrime, PrimeMap};
use crate::aggsig::{Aggregator, FullDomainHash, MessageEncoder, PublicKey, SigningKeyPair};
use crate::component::{Component, ComponentDigest, DigestSet};
use crate::encoding::{FixedUint, Reader, Writer};
use crate::error::{Error, Result};
use crate::hash::{Digest, HashSuite, Tag};
use crate::merkle::{self, MerkleAttestation, MerkleInclusionPath};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntegratedAttestation {
    merkle: MerkleAttestation,
    params_digest: Digest,
    acc_value: FixedUint,
    key_digest: Digest,
    signature: FixedUint,
}

/// Per-layer verification outcome.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LayerReport {
    pub merkle_ok: bool,
    pub accumulator_ok: bool,
    pub signature_ok: bool,
}

impl LayerReport {
    pub fn overall(&self) -> bool {
        self.merkle_ok && self.accumulator_ok && self.signature_ok
    }
}

impl IntegratedAttestation {
    pub fn merkle(&self) -> &MerkleAttestation {
        &self.merkle
    }

    pub fn members(&self) -> &DigestSet {
        self.merkle.leaves()
    }

    pub fn params_digest(&self) -> &Digest {
        &self.params_digest
    }

    pub fn acc_value(&self) -> &FixedUint {
        &self.acc_value
    }

    pub fn key_digest(&self) -> &Digest {
        &self.key_digest
    }

    pub fn signature(&self) -> &FixedUint {
        &self.signature
    }

    pub fn from_parts(
        merkle: MerkleAttestation,
        params_digest: Digest,
        acc_value: FixedUint,
        key_digest: Digest,
        signature: FixedUint,
    ) -> Self {
        Self {
            merkle,
            params_digest,
            acc_value,
            key_digest,
            signature,
        }
    }

    pub(crate) fn encode_into(&self, w: &mut Writer) {
        let mut layer = Writer::new();
        self.merkle.encode_into(&mut layer);
        w.bytes(&layer.finish());
        w.bytes(
            &Writer::new()
                .raw(&self.params_digest)
                .fixed(&self.acc_value)
                .finish(),
        );
        w.bytes(
            &Writer::new()
                .raw(&self.key_digest)
                .fixed(&self.signature)
                .finish(),
        );
    }

    pub(crate) fn decode_from(r: &mut Reader<'_>) -> Result<Self> {
        let mut layer = Reader::new(r.bytes()?);
        let merkle = MerkleAttestation::decode_from(&mut layer)?;
        layer.finish()?;

        let mut layer = Reader::new(r.bytes()?);
        let params_digest = layer.take(32)?.try_into().unwrap();
        let acc_value = layer.fixed()?;
        layer.finish()?;

        let mut layer = Reader::new(r.bytes()?);
        let key_digest = layer.take(32)?.try_into().unwrap();
        let signature = layer.fixed()?;
        layer.finish()?;

        Ok(Self {
            merkle,
            params_digest,
            acc_value,
            key_digest,
            signature,
        })
    }
}

/// The digest that gets signed: `H(0x05 ‖ acc_value bytes)`.
pub fn accumulator_message(acc_value: &FixedUint) -> ComponentDigest {
    ComponentDigest(HashSuite::tagged(Tag::Fdh, &[&acc_value.to_bytes()]))
}

#[derive(Debug, Clone)]
pub struct Integrated<P = HashToPrime, E = FullDomainHash> {
    accumulator: Accumulator<P>,
    signer: Aggregator<E>,
}

impl Integrated {
    pub fn signer(params: AccumulatorParams, key: SigningKeyPair) -> Self {
        Self::from_backends(Accumulator::new(params), Aggregator::signer(key))
    }

    pub fn verifier(params: AccumulatorParams, public: PublicKey) -> Self {
        Self::from_backends(Accumulator::new(params), Aggregator::verifier(public))
    }
}

impl<P: PrimeMap, E: MessageEncoder> Integrated<P, E> {
    pub fn from_backends(accumulator: Accumulator<P>, signer: Aggregator<E>) -> Self {
        Self {
            accumulator,
            signer,
        }
    }

    pub fn accumulator(&self) -> &Accumulator<P> {
        &self.accumulator
    }

    pub fn aggregator(&self) -> &Aggregator<E> {
        &self.signer
    }

    /// Commits a Merkle layer: accumulate its root, then sign the value.
    fn seal(&self, merkle: MerkleAttestation) -> Result<IntegratedAttestation> {
        let acc_value = self
            .accumulator
            .commit_single(&ComponentDigest(*merkle.root()));
        let signature = self.signer.sign(&accumulator_message(&acc_value))?;
        Ok(IntegratedAttestation {
            merkle,
            params_digest: *self.accumulator.params_digest(),
            acc_value,
            key_digest: *self.signer.key_digest(),
            signature,
        })
    }

    pub fn attest(&self, set: &DigestSet) -> Result<IntegratedAttestation> {
        self.seal(merkle::attest(set))
    }

    fn accumulator_ok(&self, p: &IntegratedAttestation) -> bool {
        p.params_digest == *self.accumulator.params_digest()
            && p.acc_value
                == self
                    .accumulator
                    .commit_single(&ComponentDigest(*p.merkle.root()))
    }

    fn signature_ok(&self, p: &IntegratedAttestation) -> bool {
        p.key_digest == *self.signer.key_digest()
            && self
                .signer
                .verify_signature(&accumulator_message(&p.acc_value), &p.signature)
    }

    pub fn verify_layers(&self, p: &IntegratedAttestation, set: &DigestSet) -> LayerReport {
        LayerReport {
            merkle_ok: merkle::verify(&p.merkle, set),
            accumulator_ok: self.accumulator_ok(p),
            signature_ok: self.signature_ok(p),
        }
    }

    pub fn verify(&self, p: &IntegratedAttestation, set: &DigestSet) -> bool {
        self.verify_layers(p, set).overall()
    }

    fn check_domain(&self, p: &IntegratedAttestation) -> Result<()> {
        if p.params_digest != *self.accumulator.params_digest() {
            return Err(Error::DomainMismatch("accumulator parameters differ"));
        }
        if p.key_digest != *self.signer.key_digest() {
            return Err(Error::DomainMismatch("signing keys differ"));
        }
        Ok(())
    }

    pub fn compose(
        &self,
        a: &IntegratedAttestation,
        b: &IntegratedAttestation,
    ) -> Result<IntegratedAttestation> {
        self.check_domain(a)?;
        self.check_domain(b)?;
        self.seal(merkle::compose(&a.merkle, &b.merkle)?)
    }

    /// Merkle include, then one hash-to-prime, one exponentiation and one
    /// signature over the new root.
    pub fn include_digest(
        &self,
        p: &IntegratedAttestation,
        d: ComponentDigest,
    ) -> Result<IntegratedAttestation> {
        self.check_domain(p)?;
        if p.members().contains(&d) {
            merkle::include_digest(&p.merkle, d)?;
            return Ok(p.clone());
        }
        self.seal(merkle::include_digest(&p.merkle, d)?)
    }

    pub fn include(
        &self,
        p: &IntegratedAttestation,
        c: &Component,
    ) -> Result<IntegratedAttestation> {
        self.include_digest(p, c.digest())
    }

    pub fn replace(
        &self,
        p: &IntegratedAttestation,
        old: &ComponentDigest,
        new: ComponentDigest,
    ) -> Result<IntegratedAttestation> {
        self.check_domain(p)?;
        self.seal(merkle::replace(&p.merkle, old, new)?)
    }

    pub fn witness(
        &self,
        p: &IntegratedAttestation,
        d: &ComponentDigest,
    ) -> Result<MerkleInclusionPath> {
        merkle::inclusion_path(&p.merkle, d)
    }

    /// Individual verification: the path reaches the stored root and the
    /// upper layers vouch for that root.
    pub fn verify_inclusion(
        &self,
        p: &IntegratedAttestation,
        d: &ComponentDigest,
        path: &MerkleInclusionPath,
    ) -> bool {
        merkle::verify_inclusion(p.merkle.root(), d, path)
            && self.accumulator_ok(p)
            && self.signature_ok(p)
    }

    /// Witness of the root in its one-element accumulator: the generator.
    pub fn root_witness(&self) -> &BigUint {
        self.accumulator.params().generator()
    }
}
