//! Stateful attestation sessions.
//!
//! A session tracks a registry of components by id, the current proof over
//! their digests, and an append-only log of mutations. Additions go through
//! the backend's incremental include; updates replace a member's digest.
//! Removal is not offered: an accumulator cannot drop a member without the
//! setup trapdoor.
//!
//! Mutations need `&mut self`; verification and reporting take `&self`.

use std::collections::BTreeMap;
use std::fmt;

use crate::backend::Backend;
use crate::component::{validate_id, Component, ComponentDigest, DigestSet};
use crate::encoding::{Reader, Writer};
use crate::envelope::{deserialize_proof, Proof, SchemeId, FORMAT_VERSION};
use crate::error::{Error, Result};
use crate::hash::{to_hex, Digest, HashSuite};
use crate::integrated::LayerReport;

pub const SESSION_MAGIC: &[u8; 4] = b"CATS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Operation {
    Add,
    Update,
}

impl Operation {
    fn to_byte(self) -> u8 {
        match self {
            Operation::Add => 0x01,
            Operation::Update => 0x02,
        }
    }

    fn from_byte(b: u8) -> Result<Self> {
        match b {
            0x01 => Ok(Operation::Add),
            0x02 => Ok(Operation::Update),
            _ => Err(Error::Malformed("unknown log operation")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LogEntry {
    /// Revision produced by this entry.
    pub revision: u64,
    pub operation: Operation,
    pub id: String,
    pub prior: Option<ComponentDigest>,
    pub digest: ComponentDigest,
}

/// A session this one was composed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Parent {
    pub revision: u64,
    /// SHA-256 of the parent's proof envelope.
    pub proof_digest: Digest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mutation {
    Applied { revision: u64 },
    NoOp,
}

#[derive(Debug, Clone)]
pub struct AttestationSession {
    backend: Backend,
    genesis: BTreeMap<String, ComponentDigest>,
    registry: BTreeMap<String, ComponentDigest>,
    proof: Proof,
    revision: u64,
    log: Vec<LogEntry>,
    parents: Vec<Parent>,
}

impl PartialEq for AttestationSession {
    fn eq(&self, other: &Self) -> bool {
        self.backend.scheme() == other.backend.scheme()
            && self.backend.domain() == other.backend.domain()
            && self.genesis == other.genesis
            && self.registry == other.registry
            && self.proof == other.proof
            && self.revision == other.revision
            && self.log == other.log
            && self.parents == other.parents
    }
}

fn digest_set(registry: &BTreeMap<String, ComponentDigest>) -> DigestSet {
    registry.values().copied().collect()
}

impl AttestationSession {
    /// Revision 0 holds a batch attestation of `initial`.
    pub fn create<'a>(
        backend: Backend,
        initial: impl IntoIterator<Item = &'a Component>,
    ) -> Result<Self> {
        let mut registry = BTreeMap::new();
        for c in initial {
            let d = c.digest();
            match registry.insert(c.id().to_owned(), d) {
                Some(prev) if prev != d => return Err(Error::IdConflict(c.id().to_owned())),
                _ => {}
            }
        }
        let proof = backend.attest(&digest_set(&registry))?;
        Ok(Self {
            backend,
            genesis: registry.clone(),
            registry,
            proof,
            revision: 0,
            log: Vec::new(),
            parents: Vec::new(),
        })
    }

    pub fn scheme(&self) -> SchemeId {
        self.backend.scheme()
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn proof(&self) -> &Proof {
        &self.proof
    }

    pub fn revision(&self) -> u64 {
        self.revision
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    pub fn parents(&self) -> &[Parent] {
        &self.parents
    }

    pub fn registry(&self) -> &BTreeMap<String, ComponentDigest> {
        &self.registry
    }

    pub fn digests(&self) -> DigestSet {
        digest_set(&self.registry)
    }

    fn record(
        &mut self,
        operation: Operation,
        id: &str,
        prior: Option<ComponentDigest>,
        digest: ComponentDigest,
    ) -> Mutation {
        self.revision += 1;
        self.registry.insert(id.to_owned(), digest);
        self.log.push(LogEntry {
            revision: self.revision,
            operation,
            id: id.to_owned(),
            prior,
            digest,
        });
        Mutation::Applied {
            revision: self.revision,
        }
    }

    /// Adds a new component through the backend's incremental include.
    pub fn add_component(&mut self, c: &Component) -> Result<Mutation> {
        let d = c.digest();
        if let Some(existing) = self.registry.get(c.id()) {
            return if *existing == d {
                Ok(Mutation::NoOp)
            } else {
                Err(Error::IdConflict(c.id().to_owned()))
            };
        }
        self.proof = self.backend.include_digest(&self.proof, d)?;
        Ok(self.record(Operation::Add, c.id(), None, d))
    }

    /// Replaces the payload of an existing component.
    pub fn update_component(&mut self, c: &Component) -> Result<Mutation> {
        let d = c.digest();
        let prior = *self
            .registry
            .get(c.id())
            .ok_or_else(|| Error::NotFound(c.id().to_owned()))?;
        if prior == d {
            return Ok(Mutation::NoOp);
        }
        self.proof = self.backend.replace(&self.proof, &prior, d)?;
        Ok(self.record(Operation::Update, c.id(), Some(prior), d))
    }

    pub fn verify(&self) -> bool {
        self.backend.verify(&self.proof, &self.digests())
    }

    /// Merges two sessions over the same trust domain into a fresh
    /// revision-0 session whose proof is `a.proof ⊕ b.proof`.
    pub fn compose(a: &Self, b: &Self) -> Result<Self> {
        if a.scheme() != b.scheme() {
            return Err(Error::DomainMismatch("sessions use different schemes"));
        }
        if a.backend.domain() != b.backend.domain() {
            return Err(Error::DomainMismatch(
                "sessions use different domain material",
            ));
        }
        let mut registry = a.registry.clone();
        for (id, d) in &b.registry {
            match registry.get(id) {
                Some(existing) if existing != d => return Err(Error::IdConflict(id.clone())),
                _ => {
                    registry.insert(id.clone(), *d);
                }
            }
        }
        let proof = a.backend.compose(&a.proof, &b.proof)?;
        let mut parents = vec![a.as_parent(), b.as_parent()];
        parents.sort();
        Ok(Self {
            backend: a.backend.clone(),
            genesis: registry.clone(),
            registry,
            proof,
            revision: 0,
            log: Vec::new(),
            parents,
        })
    }

    fn as_parent(&self) -> Parent {
        Parent {
            revision: self.revision,
            proof_digest: HashSuite::plain(&self.proof.to_bytes()),
        }
    }

    /// Rebuilds the proof from the revision-0 registry and the log.
    pub fn replay(&self) -> Result<Proof> {
        let mut proof = self.backend.attest(&digest_set(&self.genesis))?;
        for entry in &self.log {
            proof = match (entry.operation, entry.prior) {
                (Operation::Add, _) => self.backend.include_digest(&proof, entry.digest)?,
                (Operation::Update, Some(prior)) => {
                    self.backend.replace(&proof, &prior, entry.digest)?
                }
                (Operation::Update, None) => {
                    return Err(Error::Malformed("update without prior digest"))
                }
            };
        }
        Ok(proof)
    }

    pub fn report(&self) -> TrustReport {
        let set = self.digests();
        let members = self.proof.members();
        TrustReport {
            revision: self.revision,
            scheme: self.scheme(),
            components: self
                .registry
                .iter()
                .map(|(id, d)| ComponentStatus {
                    id: id.clone(),
                    digest: *d,
                    included: members.contains(d),
                })
                .collect(),
            overall_valid: self.backend.verify(&self.proof, &set),
            layers: self.backend.verify_layers(&self.proof, &set),
            proof: self.proof.to_bytes(),
        }
    }

    /// `"CATS" ‖ version ‖ scheme ‖ revision ‖ registry ‖ proof envelope ‖
    /// log ‖ genesis registry ‖ parents`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        w.raw(SESSION_MAGIC)
            .u8(FORMAT_VERSION)
            .u8(self.scheme() as u8)
            .u64(self.revision);
        write_registry(&mut w, &self.registry);
        w.bytes(&self.proof.to_bytes()).len(self.log.len());
        for e in &self.log {
            w.u64(e.revision)
                .u8(e.operation.to_byte())
                .bytes(e.id.as_bytes());
            match &e.prior {
                Some(d) => w.u8(1).digest(d),
                None => w.u8(0),
            };
            w.digest(&e.digest);
        }
        write_registry(&mut w, &self.genesis);
        w.len(self.parents.len());
        for p in &self.parents {
            w.u64(p.revision).raw(&p.proof_digest);
        }
        w.finish()
    }

    /// Loads a persisted session. The backend must match its scheme.
    pub fn from_bytes(bytes: &[u8], backend: Backend) -> Result<Self> {
        let mut r = Reader::new(bytes);
        if r.take(4).ok() != Some(SESSION_MAGIC.as_slice()) {
            return Err(Error::NotAProof);
        }
        let version = r.u8()?;
        if version != FORMAT_VERSION {
            return Err(Error::UnsupportedVersion(version));
        }
        let scheme = SchemeId::from_byte(r.u8()?)?;
        if scheme != backend.scheme() {
            return Err(Error::DomainMismatch(
                "session scheme does not match backend",
            ));
        }
        let revision = r.u64()?;
        let registry = read_registry(&mut r)?;
        let proof = deserialize_proof(r.bytes()?)?;
        if proof.scheme() != scheme {
            return Err(Error::Malformed("proof scheme differs from session scheme"));
        }
        let n = r.len(1)?;
        let mut log = Vec::with_capacity(n);
        for _ in 0..n {
            let revision = r.u64()?;
            let operation = Operation::from_byte(r.u8()?)?;
            let id = read_id(&mut r)?;
            let prior = match r.u8()? {
                0 => None,
                1 => Some(r.digest()?),
                _ => return Err(Error::Malformed("bad prior-digest flag")),
            };
            let digest = r.digest()?;
            log.push(LogEntry {
                revision,
                operation,
                id,
                prior,
                digest,
            });
        }
        if log.len() as u64 != revision || log.iter().zip(1..).any(|(e, rev)| e.revision != rev) {
            return Err(Error::Malformed("log does not match revision"));
        }
        let genesis = read_registry(&mut r)?;
        let n = r.len(40)?;
        let mut parents = Vec::with_capacity(n);
        for _ in 0..n {
            parents.push(Parent {
                revision: r.u64()?,
                proof_digest: r.take(32)?.try_into().unwrap(),
            });
        }
        r.finish()?;
        Ok(Self {
            backend,
            genesis,
            registry,
            proof,
            revision,
            log,
            parents,
        })
    }
}

fn write_registry(w: &mut Writer, registry: &BTreeMap<String, ComponentDigest>) {
    w.len(registry.len());
    for (id, d) in registry {
        w.bytes(id.as_bytes()).digest(d);
    }
}

fn read_id(r: &mut Reader<'_>) -> Result<String> {
    let id = std::str::from_utf8(r.bytes()?)
        .map_err(|_| Error::Malformed("component id is not UTF-8"))?
        .to_owned();
    validate_id(&id).map_err(|_| Error::Malformed("invalid component id"))?;
    Ok(id)
}

fn read_registry(r: &mut Reader<'_>) -> Result<BTreeMap<String, ComponentDigest>> {
    let n = r.len(41)?;
    let mut registry = BTreeMap::new();
    let mut prev: Option<String> = None;
    for _ in 0..n {
        let id = read_id(r)?;
        if prev.as_ref().is_some_and(|p| *p >= id) {
            return Err(Error::Malformed("registry ids not strictly ascending"));
        }
        prev = Some(id.clone());
        registry.insert(id, r.digest()?);
    }
    Ok(registry)
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ComponentStatus {
    pub id: String,
    pub digest: ComponentDigest,
    pub included: bool,
}

/// Consolidated verification result over a session.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TrustReport {
    pub revision: u64,
    pub scheme: SchemeId,
    pub components: Vec<ComponentStatus>,
    pub overall_valid: bool,
    pub layers: Option<LayerReport>,
    /// Canonical proof envelope, for external verification.
    pub proof: Vec<u8>,
}

impl TrustReport {
    pub fn component_count(&self) -> usize {
        self.components.len()
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

impl fmt::Display for TrustReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Unified Trust Report")?;
        writeln!(f, "scheme:     {}", self.scheme)?;
        writeln!(f, "revision:   {}", self.revision)?;
        writeln!(f, "components: {}", self.component_count())?;
        for c in &self.components {
            let mark = if c.included { "included" } else { "MISSING" };
            writeln!(f, "  {mark:<8}  {}  {}", c.digest, c.id)?;
        }
        if let Some(l) = &self.layers {
            writeln!(f, "merkle layer:      {}", verdict(l.merkle_ok))?;
            writeln!(f, "accumulator layer: {}", verdict(l.accumulator_ok))?;
            writeln!(f, "signature layer:   {}", verdict(l.signature_ok))?;
        }
        writeln!(
            f,
            "proof sha256: {}",
            to_hex(&HashSuite::plain(&self.proof))
        )?;
        writeln!(
            f,
            "overall: {}",
            if self.overall_valid {
                "VALID"
            } else {
                "INVALID"
            }
        )
    }
}
