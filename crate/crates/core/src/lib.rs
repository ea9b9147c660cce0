//! Composable attestation.
//!
//! Proofs over sets of components are produced by one of four backends:
//! a sorted Merkle tree, an RSA accumulator, same-key RSA-FDH aggregate
//! signatures, and a layered pipeline combining all three. Every backend
//! supports attest, verify, compose (set union) and incremental include,
//! and every proof has one canonical binary encoding.
//!
//! ```
//! use catt_core::{merkle, Component, ComponentSet};
//!
//! let a = Component::new("a.txt", b"alpha".to_vec()).unwrap();
//! let b = Component::new("b.txt", b"beta".to_vec()).unwrap();
//! let left = merkle::attest(ComponentSet::from_iter([&a]).digests());
//! let right = merkle::attest(ComponentSet::from_iter([&b]).digests());
//! let both = ComponentSet::from_iter([&a, &b]);
//! assert_eq!(merkle::compose(&left, &right).unwrap(), merkle::attest(both.digests()));
//! ```

pub mod accumulator;
pub mod aggsig;
pub mod backend;
pub mod component;
pub mod encoding;
pub mod envelope;
pub mod error;
pub mod hash;
pub mod integrated;
pub mod manager;
pub mod merkle;
pub mod metrics;
pub mod primes;

pub use accumulator::{Accumulator, AccumulatorAttestation, AccumulatorParams, MembershipWitness};
pub use aggsig::{AggregateAttestation, Aggregator, KeyFile, PublicKey, SigningKeyPair};
pub use backend::{Backend, DomainMaterial};
pub use component::{
    build_component_set, digest_component, Component, ComponentDigest, ComponentSet, DigestSet,
};
pub use encoding::FixedUint;
pub use envelope::{deserialize_proof, serialize_proof, Proof, SchemeId, Witness};
pub use error::{Error, Result};
pub use hash::{Digest, HashSuite, Tag};
pub use integrated::{Integrated, IntegratedAttestation, LayerReport};
pub use manager::{AttestationSession, Mutation, TrustReport};
pub use merkle::{MerkleAttestation, MerkleInclusionPath, MerkleTree};

/// Accumulator backend with injectable prime mapping, the default being
/// hash-to-prime.
pub type RsaAccumulator = Accumulator<accumulator::HashToPrime>;

/// Signature backend using the full-domain hash.
pub type RsaFdhAggregator = Aggregator<aggsig::FullDomainHash>;
