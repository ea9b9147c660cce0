//! Domain-separated SHA-256.
//!
//! Every hash computed by the crate is prefixed with exactly one of the
//! [`Tag`] bytes, so a leaf can never be replayed as an interior node, a
//! component digest as a leaf, and so on.

use sha2::{Digest as _, Sha256};

/// Length in bytes of every digest in the system.
pub const DIGEST_LEN: usize = 32;

/// Raw 256-bit hash output.
pub type Digest = [u8; DIGEST_LEN];

/// Domain-separation tags, one per hashing role.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum Tag {
    Leaf = 0x00,
    Node = 0x01,
    Component = 0x02,
    Prime = 0x03,
    Empty = 0x04,
    Fdh = 0x05,
}

/// The fixed hash suite: SHA-256 with the tags above.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct HashSuite;

impl HashSuite {
    pub const ALGORITHM: &'static str = "SHA-256";

    /// `H(tag ‖ parts[0] ‖ parts[1] ‖ …)`.
    pub fn tagged(tag: Tag, parts: &[&[u8]]) -> Digest {
        let mut hasher = Sha256::new();
        hasher.update([tag as u8]);
        for part in parts {
            hasher.update(part);
        }
        hasher.finalize().into()
    }

    /// Untagged SHA-256, used only for digests of self-describing encodings
    /// (parameter and key files) whose magic bytes already fix the role.
    pub fn plain(bytes: &[u8]) -> Digest {
        Sha256::digest(bytes).into()
    }
}

pub(crate) fn to_hex(bytes: &[u8]) -> String {
    use std::fmt::Write;
    bytes
        .iter()
        .fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
}
