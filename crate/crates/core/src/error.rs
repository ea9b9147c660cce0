use thiserror::Error;

use crate::component::ComponentDigest;

/// Errors raised by attestation operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid component: {0}")]
    InvalidComponent(&'static str),

    #[error("not an attestation object (bad magic)")]
    NotAProof,

    #[error("unsupported format version {0:#04x}")]
    UnsupportedVersion(u8),

    #[error("unknown scheme identifier {0:#04x}")]
    UnknownScheme(u8),

    #[error("malformed encoding: {0}")]
    Malformed(&'static str),

    #[error("proof is internally inconsistent: {0}")]
    CorruptProof(&'static str),

    #[error("digest {0} is not a member of the attested set")]
    NotAMember(ComponentDigest),

    #[error("proofs belong to different trust domains: {0}")]
    DomainMismatch(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Configuration(&'static str),

    #[error("component id {0:?} is already registered with a different digest")]
    IdConflict(String),

    #[error("component id {0:?} is not registered")]
    NotFound(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
