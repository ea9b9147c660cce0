//! The `CATT` proof envelope and the `CATW` witness file.
//!
//! ```text
//! envelope := "CATT" ‖ version (0x01) ‖ scheme ‖ body
//! ```
//!
//! Scheme bodies:
//!
//! | scheme | byte | body |
//! |---|---|---|
//! | merkle | `0x01` | `n ‖ n sorted digests ‖ root` |
//! | accumulator | `0x02` | `params_digest ‖ value ‖ n ‖ sorted digests` |
//! | aggregate | `0x03` | `key_digest ‖ aggregate ‖ n ‖ (digest ‖ signature)*` |
//! | integrated | `0x04` | `merkle layer ‖ accumulator layer ‖ signature layer` |
//!
//! Counts and lengths are 8-byte big-endian; integers are length-prefixed
//! big-endian at the modulus width; each integrated layer is itself
//! length-prefixed.

use std::fmt;
use std::str::FromStr;

use crate::accumulator::{AccumulatorAttestation, MembershipWitness};
use crate::aggsig::{AggregateAttestation, SignatureWitness};
use crate::component::{ComponentDigest, DigestSet};
use crate::encoding::{Reader, Writer};
use crate::error::{Error, Result};
use crate::integrated::IntegratedAttestation;
use crate::merkle::{MerkleAttestation, MerkleInclusionPath};

pub const PROOF_MAGIC: &[u8; 4] = b"CATT";
pub const WITNESS_MAGIC: &[u8; 4] = b"CATW";
pub const FORMAT_VERSION: u8 = 0x01;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum SchemeId {
    Merkle = 0x01,
    Accumulator = 0x02,
    Aggregate = 0x03,
    Integrated = 0x04,
}

impl SchemeId {
    pub const ALL: [SchemeId; 4] = [
        SchemeId::Merkle,
        SchemeId::Accumulator,
        SchemeId::Aggregate,
        SchemeId::Integrated,
    ];

    pub fn from_byte(b: u8) -> Result<Self> {
        Ok(match b {
            0x01 => SchemeId::Merkle,
            0x02 => SchemeId::Accumulator,
            0x03 => SchemeId::Aggregate,
            0x04 => SchemeId::Integrated,
            other => return Err(Error::UnknownScheme(other)),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::Merkle => "merkle",
            SchemeId::Accumulator => "acc",
            SchemeId::Aggregate => "sig",
            SchemeId::Integrated => "integrated",
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeId::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown scheme {s:?}")))
    }
}

/// A proof from any backend.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Proof {
    Merkle(MerkleAttestation),
    Accumulator(AccumulatorAttestation),
    Aggregate(AggregateAttestation),
    Integrated(IntegratedAttestation),
}

impl Proof {
    pub fn scheme(&self) -> SchemeId {
        match self {
            Proof::Merkle(_) => SchemeId::Merkle,
            Proof::Accumulator(_) => SchemeId::Accumulator,
            Proof::Aggregate(_) => SchemeId::Aggregate,
            Proof::Integrated(_) => SchemeId::Integrated,
        }
    }

    pub fn members(&self) -> &DigestSet {
        match self {
            Proof::Merkle(p) => p.leaves(),
            Proof::Accumulator(p) => p.members(),
            Proof::Aggregate(p) => p.members(),
            Proof::Integrated(p) => p.members(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        serialize_proof(self)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        deserialize_proof(bytes)
    }
}

fn read_header<'a>(bytes: &'a [u8], magic: &[u8; 4]) -> Result<(SchemeId, Reader<'a>)> {
    let mut r = Reader::new(bytes);
    match r.take(4) {
        Ok(m) if m == magic => {}
        // A prefix of the magic is a cut-off envelope, anything else is foreign.
        Err(_) if magic.starts_with(bytes) && !bytes.is_empty() => {
            return Err(Error::Malformed("truncated"))
        }
        _ => return Err(Error::NotAProof),
    }
    let version = r.u8()?;
    if version != FORMAT_VERSION {
        return Err(Error::UnsupportedVersion(version));
    }
    let scheme = SchemeId::from_byte(r.u8()?)?;
    Ok((scheme, r))
}

pub fn serialize_proof(p: &Proof) -> Vec<u8> {
    let mut w = Writer::new();
    w.raw(PROOF_MAGIC).u8(FORMAT_VERSION).u8(p.scheme() as u8);
    match p {
        Proof::Merkle(p) => p.encode_into(&mut w),
        Proof::Accumulator(p) => p.encode_into(&mut w),
        Proof::Aggregate(p) => p.encode_into(&mut w),
        Proof::Integrated(p) => p.encode_into(&mut w),
    }
    w.finish()
}

pub fn deserialize_proof(bytes: &[u8]) -> Result<Proof> {
    let (scheme, mut r) = read_header(bytes, PROOF_MAGIC)?;
    let proof = match scheme {
        SchemeId::Merkle => Proof::Merkle(MerkleAttestation::decode_from(&mut r)?),
        SchemeId::Accumulator => Proof::Accumulator(AccumulatorAttestation::decode_from(&mut r)?),
        SchemeId::Aggregate => Proof::Aggregate(AggregateAttestation::decode_from(&mut r)?),
        SchemeId::Integrated => Proof::Integrated(IntegratedAttestation::decode_from(&mut r)?),
    };
    r.finish()?;
    Ok(proof)
}

/// Per-member inclusion evidence.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Witness {
    Merkle {
        member: ComponentDigest,
        path: MerkleInclusionPath,
    },
    Accumulator(MembershipWitness),
    Aggregate(SignatureWitness),
    Integrated {
        member: ComponentDigest,
        path: MerkleInclusionPath,
    },
}

impl Witness {
    pub fn scheme(&self) -> SchemeId {
        match self {
            Witness::Merkle { .. } => SchemeId::Merkle,
            Witness::Accumulator(_) => SchemeId::Accumulator,
            Witness::Aggregate(_) => SchemeId::Aggregate,
            Witness::Integrated { .. } => SchemeId::Integrated,
        }
    }

    pub fn member(&self) -> &ComponentDigest {
        match self {
            Witness::Merkle { member, .. } | Witness::Integrated { member, .. } => member,
            Witness::Accumulator(w) => &w.member,
            Witness::Aggregate(w) => &w.member,
        }
    }

    /// `"CATW" ‖ version ‖ scheme ‖ body`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.raw(WITNESS_MAGIC)
            .u8(FORMAT_VERSION)
            .u8(self.scheme() as u8);
        match self {
            Witness::Merkle { member, path } | Witness::Integrated { member, path } => {
                w.digest(member);
                path.encode_into(&mut w);
            }
            Witness::Accumulator(m) => m.encode_into(&mut w),
            Witness::Aggregate(s) => s.encode_into(&mut w),
        }
        w.finish()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let (scheme, mut r) = read_header(bytes, WITNESS_MAGIC)?;
        let witness = match scheme {
            SchemeId::Merkle => Witness::Merkle {
                member: r.digest()?,
                path: MerkleInclusionPath::decode_from(&mut r)?,
            },
            SchemeId::Integrated => Witness::Integrated {
                member: r.digest()?,
                path: MerkleInclusionPath::decode_from(&mut r)?,
            },
            SchemeId::Accumulator => Witness::Accumulator(MembershipWitness::decode_from(&mut r)?),
            SchemeId::Aggregate => Witness::Aggregate(SignatureWitness::decode_from(&mut r)?),
        };
        r.finish()?;
        Ok(witness)
    }
}
