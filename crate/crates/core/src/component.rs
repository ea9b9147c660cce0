use std::collections::{btree_set, BTreeMap, BTreeSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::hash::{to_hex, Digest, HashSuite, Tag, DIGEST_LEN};

/// An attestable unit: a logical name plus raw content.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Component {
    id: String,
    payload: Vec<u8>,
}

impl Component {
    pub fn new(id: impl Into<String>, payload: impl Into<Vec<u8>>) -> Result<Self> {
        let id = id.into();
        validate_id(&id)?;
        Ok(Self {
            id,
            payload: payload.into(),
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn payload(&self) -> &[u8] {
        &self.payload
    }

    /// `H(0x02 ‖ len(id) as u64 BE ‖ id ‖ payload)`.
    pub fn digest(&self) -> ComponentDigest {
        ComponentDigest(HashSuite::tagged(
            Tag::Component,
            &[
                &(self.id.len() as u64).to_be_bytes(),
                self.id.as_bytes(),
                &self.payload,
            ],
        ))
    }
}

pub(crate) fn validate_id(id: &str) -> Result<()> {
    if id.is_empty() {
        return Err(Error::InvalidComponent("empty id"));
    }
    if id.contains('\0') {
        return Err(Error::InvalidComponent("id contains NUL"));
    }
    Ok(())
}

/// Digests a component. Equivalent to [`Component::digest`].
pub fn digest_component(c: &Component) -> ComponentDigest {
    c.digest()
}

/// The 32-byte binding digest of a [`Component`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentDigest(pub Digest);

impl ComponentDigest {
    pub fn as_bytes(&self) -> &Digest {
        &self.0
    }

    pub fn from_slice(bytes: &[u8]) -> Option<Self> {
        <Digest>::try_from(bytes).ok().map(Self)
    }

    pub fn to_hex(&self) -> String {
        to_hex(&self.0)
    }
}

impl fmt::Debug for ComponentDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComponentDigest({})", self.to_hex())
    }
}

impl fmt::Display for ComponentDigest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_hex())
    }
}

impl AsRef<[u8]> for ComponentDigest {
    fn as_ref(&self) -> &[u8] {
        &self.0
    }
}

impl From<Digest> for ComponentDigest {
    fn from(d: Digest) -> Self {
        Self(d)
    }
}

/// Sorted, deduplicated set of component digests. This is what proofs carry.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct DigestSet(BTreeSet<ComponentDigest>);

impl DigestSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, d: &ComponentDigest) -> bool {
        self.0.contains(d)
    }

    /// Returns `true` if the digest was not already present.
    pub fn insert(&mut self, d: ComponentDigest) -> bool {
        self.0.insert(d)
    }

    pub fn remove(&mut self, d: &ComponentDigest) -> bool {
        self.0.remove(d)
    }

    /// Byte-ascending iteration.
    pub fn iter(&self) -> btree_set::Iter<'_, ComponentDigest> {
        self.0.iter()
    }

    pub fn union(&self, other: &DigestSet) -> DigestSet {
        Self(self.0.union(&other.0).copied().collect())
    }

    /// Members of `self` absent from `other`, ascending.
    pub fn difference<'a>(
        &'a self,
        other: &'a DigestSet,
    ) -> impl Iterator<Item = &'a ComponentDigest> {
        self.0.difference(&other.0)
    }

    pub fn is_subset(&self, other: &DigestSet) -> bool {
        self.0.is_subset(&other.0)
    }
}

impl FromIterator<ComponentDigest> for DigestSet {
    fn from_iter<I: IntoIterator<Item = ComponentDigest>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl<'a> IntoIterator for &'a DigestSet {
    type Item = &'a ComponentDigest;
    type IntoIter = btree_set::Iter<'a, ComponentDigest>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// A set of components: the digest set plus the id of each member.
///
/// Equality compares digests only; ids are metadata.
#[derive(Debug, Clone, Default)]
pub struct ComponentSet {
    digests: DigestSet,
    ids: BTreeMap<ComponentDigest, String>,
}

impl ComponentSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, c: &Component) -> ComponentDigest {
        let d = c.digest();
        self.digests.insert(d);
        self.ids.entry(d).or_insert_with(|| c.id.clone());
        d
    }

    pub fn digests(&self) -> &DigestSet {
        &self.digests
    }

    pub fn id_of(&self, d: &ComponentDigest) -> Option<&str> {
        self.ids.get(d).map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.digests.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digests.is_empty()
    }

    pub fn contains(&self, d: &ComponentDigest) -> bool {
        self.digests.contains(d)
    }

    pub fn iter(&self) -> btree_set::Iter<'_, ComponentDigest> {
        self.digests.iter()
    }

    pub fn into_digests(self) -> DigestSet {
        self.digests
    }
}

impl PartialEq for ComponentSet {
    fn eq(&self, other: &Self) -> bool {
        self.digests == other.digests
    }
}

impl Eq for ComponentSet {}

impl<'a> FromIterator<&'a Component> for ComponentSet {
    fn from_iter<I: IntoIterator<Item = &'a Component>>(iter: I) -> Self {
        let mut set = ComponentSet::new();
        for c in iter {
            set.insert(c);
        }
        set
    }
}

impl AsRef<DigestSet> for ComponentSet {
    fn as_ref(&self) -> &DigestSet {
        &self.digests
    }
}

impl AsRef<DigestSet> for DigestSet {
    fn as_ref(&self) -> &DigestSet {
        self
    }
}

/// Deduplicates and sorts a list of components.
pub fn build_component_set<'a>(cs: impl IntoIterator<Item = &'a Component>) -> ComponentSet {
    cs.into_iter().collect()
}

const _: () = assert!(DIGEST_LEN == 32);
