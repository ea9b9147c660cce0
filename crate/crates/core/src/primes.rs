//! Primality testing and deterministic prime generation.

use std::sync::OnceLock;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::One;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::component::ComponentDigest;
use crate::hash::{HashSuite, Tag};

/// Miller–Rabin rounds used by [`hash_to_prime`].
pub const HASH_TO_PRIME_ROUNDS: usize = 64;

/// Bit length of primes produced by [`hash_to_prime`].
pub const HASH_TO_PRIME_BITS: u64 = 128;

const GENERATION_ROUNDS: usize = 40;
const SIEVE_LIMIT: u32 = 4096;

/// Deterministic ChaCha20 stream keyed by `SHA-256(label ‖ len(seed) ‖ seed)`.
pub(crate) fn seeded_rng(label: &[u8], seed: &[u8]) -> ChaCha20Rng {
    let key = HashSuite::plain(&[label, &(seed.len() as u64).to_be_bytes(), seed].concat());
    ChaCha20Rng::from_seed(key)
}

fn small_primes() -> &'static [u32] {
    static PRIMES: OnceLock<Vec<u32>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut composite = vec![false; SIEVE_LIMIT as usize];
        let mut out = Vec::new();
        for i in 2..SIEVE_LIMIT as usize {
            if !composite[i] {
                out.push(i as u32);
                let mut j = i * i;
                while j < composite.len() {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        out
    })
}

/// Uniform integer with exactly `bits` random bits (top bits may be zero).
pub(crate) fn random_bits<R: RngCore>(rng: &mut R, bits: u64) -> BigUint {
    let nbytes = bits.div_ceil(8) as usize;
    let mut buf = vec![0u8; nbytes];
    rng.fill_bytes(&mut buf);
    let excess = nbytes as u64 * 8 - bits;
    if excess > 0 {
        buf[0] &= 0xff >> excess;
    }
    BigUint::from_bytes_be(&buf)
}

/// Uniform-ish integer in `[low, high]`.
fn random_in<R: RngCore>(rng: &mut R, low: &BigUint, high: &BigUint) -> BigUint {
    let span = high - low + 1u32;
    // 64 extra bits make the modulo bias negligible.
    let r = random_bits(rng, span.bits() + 64);
    low + r % span
}

/// `n mod p` from the little-endian 64-bit digits of `n`, without allocating.
fn rem_small(digits: &[u64], p: u32) -> u32 {
    let p = u128::from(p);
    digits
        .iter()
        .rev()
        .fold(0u128, |r, &d| ((r << 64) | u128::from(d)) % p) as u32
}

/// Trial division by the small-prime table. `None` means inconclusive.
fn trial_division(n: &BigUint) -> Option<bool> {
    if *n < BigUint::from(2u32) {
        return Some(false);
    }
    let digits = n.to_u64_digits();
    let small = (digits.len() == 1).then(|| digits[0]);
    for &p in small_primes() {
        if small == Some(u64::from(p)) {
            return Some(true);
        }
        if rem_small(&digits, p) == 0 {
            return Some(false);
        }
    }
    let limit = u64::from(SIEVE_LIMIT);
    if small.is_some_and(|v| v < limit * limit) {
        return Some(true);
    }
    None
}

/// Miller–Rabin with `rounds` bases drawn from `rng`.
pub fn miller_rabin<R: RngCore>(n: &BigUint, rounds: usize, rng: &mut R) -> bool {
    let two = BigUint::from(2u32);
    if *n < two {
        return false;
    }
    if *n == two || *n == BigUint::from(3u32) {
        return true;
    }
    if n.is_even() {
        return false;
    }
    let n_minus_1 = n - 1u32;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    let high = n - 2u32;
    'witness: for _ in 0..rounds {
        let a = random_in(rng, &two, &high);
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
            if x.is_one() {
                return false;
            }
        }
        return false;
    }
    true
}

/// Montgomery arithmetic modulo an odd 128-bit `n`, with `R = 2^128`.
struct Mont128 {
    n: u128,
    /// `-n^{-1} mod 2^64`.
    ninv: u64,
    /// `R^2 mod n`.
    r2: u128,
}

impl Mont128 {
    fn new(n: u128) -> Self {
        debug_assert!(n & 1 == 1 && n > 1);
        let n0 = n as u64;
        // Newton iteration: each step doubles the number of correct bits.
        let mut inv = 1u64;
        for _ in 0..6 {
            inv = inv.wrapping_mul(2u64.wrapping_sub(n0.wrapping_mul(inv)));
        }
        let r = BigUint::one() << 128u32;
        let r2 = (&r * &r) % BigUint::from(n);
        let r2 = r2
            .to_u64_digits()
            .iter()
            .rev()
            .fold(0u128, |acc, &d| (acc << 64) | u128::from(d));
        Self {
            n,
            ninv: inv.wrapping_neg(),
            r2,
        }
    }

    /// `a * b * R^{-1} mod n` for `a, b < n` (CIOS, two limbs).
    fn mul(&self, a: u128, b: u128) -> u128 {
        let a = [a as u64, (a >> 64) as u64];
        let b = [b as u64, (b >> 64) as u64];
        let n = [self.n as u64, (self.n >> 64) as u64];
        let mut t = [0u64; 4];
        for &bi in &b {
            let mut carry = 0u128;
            for j in 0..2 {
                let v = u128::from(t[j]) + u128::from(a[j]) * u128::from(bi) + carry;
                t[j] = v as u64;
                carry = v >> 64;
            }
            let v = u128::from(t[2]) + carry;
            t[2] = v as u64;
            t[3] = (v >> 64) as u64;

            let m = t[0].wrapping_mul(self.ninv);
            let v = u128::from(t[0]) + u128::from(m) * u128::from(n[0]);
            let mut carry = v >> 64;
            let v = u128::from(t[1]) + u128::from(m) * u128::from(n[1]) + carry;
            t[0] = v as u64;
            carry = v >> 64;
            let v = u128::from(t[2]) + carry;
            t[1] = v as u64;
            t[2] = t[3] + (v >> 64) as u64;
        }
        let lo = u128::from(t[0]) | (u128::from(t[1]) << 64);
        if t[2] != 0 || lo >= self.n {
            lo.wrapping_sub(self.n)
        } else {
            lo
        }
    }

    fn to_mont(&self, a: u128) -> u128 {
        self.mul(a % self.n, self.r2)
    }

    fn pow(&self, base: u128, mut e: u128) -> u128 {
        let mut result = self.to_mont(1);
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                result = self.mul(result, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        result
    }
}

/// Miller–Rabin for odd `n` in `(3, 2^128)`, with bases drawn from `rng`.
fn miller_rabin_u128<R: RngCore>(n: u128, rounds: usize, rng: &mut R) -> bool {
    let mont = Mont128::new(n);
    let n1 = n - 1;
    let s = n1.trailing_zeros();
    let d = n1 >> s;
    let one = mont.to_mont(1);
    let minus_one = mont.to_mont(n1);
    'witness: for _ in 0..rounds {
        let mut buf = [0u8; 16];
        rng.fill_bytes(&mut buf);
        let a = 2 + u128::from_be_bytes(buf) % (n - 3);
        let mut x = mont.pow(mont.to_mont(a), d);
        if x == one || x == minus_one {
            continue;
        }
        for _ in 1..s {
            x = mont.mul(x, x);
            if x == minus_one {
                continue 'witness;
            }
            if x == one {
                return false;
            }
        }
        return false;
    }
    true
}

/// Trial division followed by Miller–Rabin.
pub fn is_probable_prime<R: RngCore>(n: &BigUint, rounds: usize, rng: &mut R) -> bool {
    match trial_division(n) {
        Some(verdict) => verdict,
        None => miller_rabin(n, rounds, rng),
    }
}

/// Maps a component digest to a 128-bit probable prime.
///
/// Candidate `k` is the first 16 bytes of `H(0x03 ‖ d ‖ k as u64 BE)` with
/// the top and bottom bits forced to 1. The first candidate passing trial
/// division and 64 Miller–Rabin rounds is returned. Bases come from a
/// ChaCha20 stream keyed by the candidate itself, so the result depends on
/// nothing but `d`.
pub fn hash_to_prime(d: &ComponentDigest) -> BigUint {
    let nbytes = (HASH_TO_PRIME_BITS / 8) as usize;
    for counter in 0u64.. {
        let h = HashSuite::tagged(Tag::Prime, &[d.as_bytes(), &counter.to_be_bytes()]);
        let mut bytes = h[..nbytes].to_vec();
        bytes[0] |= 0x80;
        bytes[nbytes - 1] |= 0x01;
        let candidate = BigUint::from_bytes_be(&bytes);
        if trial_division(&candidate) == Some(false) {
            continue;
        }
        let mut rng = seeded_rng(b"catt/mr-bases", &bytes);
        let value = u128::from_be_bytes(bytes.as_slice().try_into().expect("16-byte candidate"));
        if miller_rabin_u128(value, HASH_TO_PRIME_ROUNDS, &mut rng) {
            return candidate;
        }
    }
    unreachable!("counter space exhausted")
}

/// Random probable prime of exactly `bits` bits with the top two bits set.
pub(crate) fn generate_prime<R: RngCore>(rng: &mut R, bits: u64) -> BigUint {
    debug_assert!(bits >= 16);
    let top = (BigUint::one() << (bits - 1)) | (BigUint::one() << (bits - 2));
    loop {
        let candidate = random_bits(rng, bits) | &top | BigUint::one();
        if is_probable_prime(&candidate, GENERATION_ROUNDS, rng) {
            return candidate;
        }
    }
}

/// Random safe prime `p = 2q + 1` of exactly `bits` bits with the top two
/// bits set; `q` is prime as well.
pub(crate) fn generate_safe_prime<R: RngCore>(rng: &mut R, bits: u64) -> BigUint {
    debug_assert!(bits >= 16);
    let qbits = bits - 1;
    let top = (BigUint::one() << (qbits - 1)) | (BigUint::one() << (qbits - 2));
    let two = BigUint::from(2u32);
    'candidate: loop {
        let q = random_bits(rng, qbits) | &top | BigUint::one();
        // Reject if q or 2q+1 has a small factor.
        let digits = q.to_u64_digits();
        for &r in small_primes().iter().skip(1) {
            let rem = rem_small(&digits, r);
            if rem == 0 || rem == (r - 1) / 2 {
                continue 'candidate;
            }
        }
        let p: BigUint = (&q << 1u32) + 1u32;
        // Cheap base-2 Fermat screen on p before full tests.
        if !two.modpow(&(&p - 1u32), &p).is_one() {
            continue;
        }
        if miller_rabin(&q, GENERATION_ROUNDS, rng) && miller_rabin(&p, GENERATION_ROUNDS, rng) {
            return p;
        }
    }
}
