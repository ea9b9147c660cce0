use std::sync::atomic::{AtomicU64, Ordering};

/// Operation counters attached to the accumulator and signature backends.
///
/// Tests use these to check that incremental paths stay incremental.
#[derive(Debug, Default)]
pub struct OpCounters {
    generator_exps: AtomicU64,
    modular_exps: AtomicU64,
    prime_derivations: AtomicU64,
    signatures: AtomicU64,
}

/// Point-in-time copy of [`OpCounters`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OpCounts {
    /// Exponentiations whose base is the accumulator generator.
    pub generator_exps: u64,
    /// All modular exponentiations, generator-based ones included.
    pub modular_exps: u64,
    pub prime_derivations: u64,
    pub signatures: u64,
}

impl OpCounters {
    pub fn snapshot(&self) -> OpCounts {
        OpCounts {
            generator_exps: self.generator_exps.load(Ordering::Relaxed),
            modular_exps: self.modular_exps.load(Ordering::Relaxed),
            prime_derivations: self.prime_derivations.load(Ordering::Relaxed),
            signatures: self.signatures.load(Ordering::Relaxed),
        }
    }

    pub fn reset(&self) {
        self.generator_exps.store(0, Ordering::Relaxed);
        self.modular_exps.store(0, Ordering::Relaxed);
        self.prime_derivations.store(0, Ordering::Relaxed);
        self.signatures.store(0, Ordering::Relaxed);
    }

    pub(crate) fn generator_exp(&self) {
        self.generator_exps.fetch_add(1, Ordering::Relaxed);
        self.modular_exp();
    }

    pub(crate) fn modular_exp(&self) {
        self.modular_exps.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn prime_derivation(&self) {
        self.prime_derivations.fetch_add(1, Ordering::Relaxed);
    }

    pub(crate) fn signature(&self) {
        self.signatures.fetch_add(1, Ordering::Relaxed);
    }
}

impl Clone for OpCounters {
    /// Clones start from zero.
    fn clone(&self) -> Self {
        Self::default()
    }
}
