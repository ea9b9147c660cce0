//! Scheme-agnostic dispatch over the four backends.

use crate::accumulator::{Accumulator, AccumulatorParams};
use crate::aggsig::{Aggregator, KeyFile};
use crate::component::{Component, ComponentDigest, DigestSet};
use crate::envelope::{Proof, SchemeId, Witness};
use crate::error::{Error, Result};
use crate::hash::Digest;
use crate::integrated::{Integrated, LayerReport};
use crate::merkle;

/// Trust-domain material: accumulator parameters and/or a signing key.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DomainMaterial {
    pub params: Option<AccumulatorParams>,
    pub key: Option<KeyFile>,
}

impl DomainMaterial {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn with_params(mut self, params: AccumulatorParams) -> Self {
        self.params = Some(params);
        self
    }

    pub fn with_key(mut self, key: KeyFile) -> Self {
        self.key = Some(key);
        self
    }
}

#[derive(Debug, Clone)]
pub enum Backend {
    Merkle,
    Accumulator(Accumulator),
    Aggregate(Aggregator),
    Integrated(Integrated),
}

fn mismatch() -> Error {
    Error::DomainMismatch("proof scheme does not match backend")
}

impl Backend {
    pub fn new(scheme: SchemeId, material: &DomainMaterial) -> Result<Self> {
        let params = || {
            material.params.clone().ok_or(Error::Configuration(
                "scheme requires accumulator parameters",
            ))
        };
        let aggregator = || match &material.key {
            Some(KeyFile::Private(k)) => Ok(Aggregator::signer(k.clone())),
            Some(KeyFile::Public(pk)) => Ok(Aggregator::verifier(pk.clone())),
            None => Err(Error::Configuration(
                "scheme requires a signing or public key",
            )),
        };
        Ok(match scheme {
            SchemeId::Merkle => Backend::Merkle,
            SchemeId::Accumulator => Backend::Accumulator(Accumulator::new(params()?)),
            SchemeId::Aggregate => Backend::Aggregate(aggregator()?),
            SchemeId::Integrated => Backend::Integrated(Integrated::from_backends(
                Accumulator::new(params()?),
                aggregator()?,
            )),
        })
    }

    pub fn scheme(&self) -> SchemeId {
        match self {
            Backend::Merkle => SchemeId::Merkle,
            Backend::Accumulator(_) => SchemeId::Accumulator,
            Backend::Aggregate(_) => SchemeId::Aggregate,
            Backend::Integrated(_) => SchemeId::Integrated,
        }
    }

    /// `(params digest, key digest)` of the trust domain, where applicable.
    pub fn domain(&self) -> (Option<Digest>, Option<Digest>) {
        match self {
            Backend::Merkle => (None, None),
            Backend::Accumulator(a) => (Some(*a.params_digest()), None),
            Backend::Aggregate(s) => (None, Some(*s.key_digest())),
            Backend::Integrated(i) => (
                Some(*i.accumulator().params_digest()),
                Some(*i.aggregator().key_digest()),
            ),
        }
    }

    pub fn attest(&self, set: &DigestSet) -> Result<Proof> {
        Ok(match self {
            Backend::Merkle => Proof::Merkle(merkle::attest(set)),
            Backend::Accumulator(a) => Proof::Accumulator(a.attest(set)),
            Backend::Aggregate(s) => Proof::Aggregate(s.attest(set)?),
            Backend::Integrated(i) => Proof::Integrated(i.attest(set)?),
        })
    }

    pub fn attest_components<'a>(
        &self,
        cs: impl IntoIterator<Item = &'a Component>,
    ) -> Result<Proof> {
        let set: DigestSet = cs.into_iter().map(Component::digest).collect();
        self.attest(&set)
    }

    pub fn verify(&self, p: &Proof, set: &DigestSet) -> bool {
        match (self, p) {
            (Backend::Merkle, Proof::Merkle(p)) => merkle::verify(p, set),
            (Backend::Accumulator(a), Proof::Accumulator(p)) => a.verify(p, set),
            (Backend::Aggregate(s), Proof::Aggregate(p)) => s.verify(p, set),
            (Backend::Integrated(i), Proof::Integrated(p)) => i.verify(p, set),
            _ => false,
        }
    }

    /// Layer flags for integrated proofs; `None` for single-layer schemes.
    pub fn verify_layers(&self, p: &Proof, set: &DigestSet) -> Option<LayerReport> {
        match (self, p) {
            (Backend::Integrated(i), Proof::Integrated(p)) => Some(i.verify_layers(p, set)),
            _ => None,
        }
    }

    pub fn compose(&self, a: &Proof, b: &Proof) -> Result<Proof> {
        Ok(match (self, a, b) {
            (Backend::Merkle, Proof::Merkle(a), Proof::Merkle(b)) => {
                Proof::Merkle(merkle::compose(a, b)?)
            }
            (Backend::Accumulator(acc), Proof::Accumulator(a), Proof::Accumulator(b)) => {
                Proof::Accumulator(acc.compose(a, b)?)
            }
            (Backend::Aggregate(s), Proof::Aggregate(a), Proof::Aggregate(b)) => {
                Proof::Aggregate(s.compose(a, b)?)
            }
            (Backend::Integrated(i), Proof::Integrated(a), Proof::Integrated(b)) => {
                Proof::Integrated(i.compose(a, b)?)
            }
            _ => return Err(mismatch()),
        })
    }

    pub fn include_digest(&self, p: &Proof, d: ComponentDigest) -> Result<Proof> {
        Ok(match (self, p) {
            (Backend::Merkle, Proof::Merkle(p)) => Proof::Merkle(merkle::include_digest(p, d)?),
            (Backend::Accumulator(a), Proof::Accumulator(p)) => {
                Proof::Accumulator(a.include_digest(p, d)?)
            }
            (Backend::Aggregate(s), Proof::Aggregate(p)) => {
                Proof::Aggregate(s.include_digest(p, d)?)
            }
            (Backend::Integrated(i), Proof::Integrated(p)) => {
                Proof::Integrated(i.include_digest(p, d)?)
            }
            _ => return Err(mismatch()),
        })
    }

    pub fn include(&self, p: &Proof, c: &Component) -> Result<Proof> {
        self.include_digest(p, c.digest())
    }

    /// Replaces one member. Merkle-based schemes swap the leaf and rebuild;
    /// accumulator and signature proofs are re-attested over the new set,
    /// since neither supports removal.
    pub fn replace(&self, p: &Proof, old: &ComponentDigest, new: ComponentDigest) -> Result<Proof> {
        if p.scheme() != self.scheme() {
            return Err(mismatch());
        }
        if !p.members().contains(old) {
            return Err(Error::NotAMember(*old));
        }
        Ok(match (self, p) {
            (Backend::Merkle, Proof::Merkle(p)) => Proof::Merkle(merkle::replace(p, old, new)?),
            (Backend::Integrated(i), Proof::Integrated(p)) => {
                Proof::Integrated(i.replace(p, old, new)?)
            }
            _ => {
                let mut set = p.members().clone();
                set.remove(old);
                set.insert(new);
                self.attest(&set)?
            }
        })
    }

    pub fn witness(&self, p: &Proof, d: &ComponentDigest) -> Result<Witness> {
        Ok(match (self, p) {
            (Backend::Merkle, Proof::Merkle(p)) => Witness::Merkle {
                member: *d,
                path: merkle::inclusion_path(p, d)?,
            },
            (Backend::Accumulator(a), Proof::Accumulator(p)) => {
                Witness::Accumulator(a.witness(p, d)?)
            }
            (Backend::Aggregate(s), Proof::Aggregate(p)) => Witness::Aggregate(s.witness(p, d)?),
            (Backend::Integrated(i), Proof::Integrated(p)) => Witness::Integrated {
                member: *d,
                path: i.witness(p, d)?,
            },
            _ => return Err(mismatch()),
        })
    }

    pub fn check_witness(&self, p: &Proof, w: &Witness) -> bool {
        match (self, p, w) {
            (Backend::Merkle, Proof::Merkle(p), Witness::Merkle { member, path }) => {
                merkle::verify_inclusion(p.root(), member, path)
            }
            (Backend::Accumulator(a), Proof::Accumulator(p), Witness::Accumulator(w)) => {
                a.verify_inclusion(p, w)
            }
            (Backend::Aggregate(s), Proof::Aggregate(p), Witness::Aggregate(w)) => {
                s.verify_inclusion(p, w)
            }
            (
                Backend::Integrated(i),
                Proof::Integrated(p),
                Witness::Integrated { member, path },
            ) => i.verify_inclusion(p, member, path),
            _ => false,
        }
    }
}
