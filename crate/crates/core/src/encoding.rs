//! Canonical binary encoding primitives.
//!
//! Integers are big-endian. Variable-length fields carry an 8-byte
//! big-endian length prefix. Decoding is strict: any input that would not
//! re-encode to the same bytes is rejected.

use num_bigint::BigUint;

use crate::component::{ComponentDigest, DigestSet};
use crate::error::{Error, Result};
use crate::hash::DIGEST_LEN;

/// An integer together with the byte width it is encoded at.
///
/// Group elements are written padded to the modulus width so that their
/// encoded size does not depend on their magnitude.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FixedUint {
    value: BigUint,
    width: usize,
}

impl FixedUint {
    /// Panics if `value` does not fit in `width` bytes.
    pub fn new(value: BigUint, width: usize) -> Self {
        assert!(
            byte_len(&value) <= width,
            "value does not fit in {width} bytes"
        );
        Self { value, width }
    }

    pub fn value(&self) -> &BigUint {
        &self.value
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        to_fixed_bytes(&self.value, self.width)
    }
}

pub(crate) fn byte_len(n: &BigUint) -> usize {
    n.bits().div_ceil(8) as usize
}

/// Big-endian bytes of `n`, left-padded with zeros to `width`.
pub(crate) fn to_fixed_bytes(n: &BigUint, width: usize) -> Vec<u8> {
    let raw = n.to_bytes_be();
    let raw: &[u8] = if n.bits() == 0 { &[] } else { &raw };
    let mut out = vec![0u8; width - raw.len()];
    out.extend_from_slice(raw);
    out
}

#[derive(Debug, Default)]
pub(crate) struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn raw(&mut self, bytes: &[u8]) -> &mut Self {
        self.buf.extend_from_slice(bytes);
        self
    }

    pub fn u8(&mut self, v: u8) -> &mut Self {
        self.buf.push(v);
        self
    }

    pub fn u32(&mut self, v: u32) -> &mut Self {
        self.raw(&v.to_be_bytes())
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.raw(&v.to_be_bytes())
    }

    pub fn len(&mut self, n: usize) -> &mut Self {
        self.u64(n as u64)
    }

    pub fn bytes(&mut self, bytes: &[u8]) -> &mut Self {
        self.len(bytes.len()).raw(bytes)
    }

    pub fn digest(&mut self, d: &ComponentDigest) -> &mut Self {
        self.raw(d.as_bytes())
    }

    pub fn fixed(&mut self, n: &FixedUint) -> &mut Self {
        self.bytes(&n.to_bytes())
    }

    /// Minimal big-endian, length-prefixed.
    pub fn biguint(&mut self, n: &BigUint) -> &mut Self {
        let width = byte_len(n);
        self.bytes(&to_fixed_bytes(n, width))
    }

    pub fn digest_set(&mut self, set: &DigestSet) -> &mut Self {
        self.len(set.len());
        for d in set {
            self.digest(d);
        }
        self
    }

    pub fn finish(&mut self) -> Vec<u8> {
        std::mem::take(&mut self.buf)
    }
}

#[derive(Debug)]
pub(crate) struct Reader<'a> {
    buf: &'a [u8],
}

impl<'a> Reader<'a> {
    pub fn new(buf: &'a [u8]) -> Self {
        Self { buf }
    }

    pub fn remaining(&self) -> usize {
        self.buf.len()
    }

    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.buf.len() < n {
            return Err(Error::Malformed("truncated"));
        }
        let (head, tail) = self.buf.split_at(n);
        self.buf = tail;
        Ok(head)
    }

    pub fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_be_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_be_bytes(self.take(8)?.try_into().unwrap()))
    }

    /// A length or count, bounded by the bytes still available so that a
    /// corrupt prefix cannot trigger a huge allocation.
    pub fn len(&mut self, unit: usize) -> Result<usize> {
        let n = self.u64()?;
        let max = (self.remaining() / unit.max(1)) as u64;
        if n > max {
            return Err(Error::Malformed("truncated"));
        }
        Ok(n as usize)
    }

    pub fn bytes(&mut self) -> Result<&'a [u8]> {
        let n = self.len(1)?;
        self.take(n)
    }

    pub fn digest(&mut self) -> Result<ComponentDigest> {
        Ok(ComponentDigest::from_slice(self.take(DIGEST_LEN)?).unwrap())
    }

    pub fn fixed(&mut self) -> Result<FixedUint> {
        let bytes = self.bytes()?;
        if bytes.is_empty() {
            return Err(Error::Malformed("zero-width integer"));
        }
        Ok(FixedUint {
            value: BigUint::from_bytes_be(bytes),
            width: bytes.len(),
        })
    }

    pub fn biguint(&mut self) -> Result<BigUint> {
        let bytes = self.bytes()?;
        if bytes.first() == Some(&0) {
            return Err(Error::Malformed("non-minimal integer"));
        }
        Ok(BigUint::from_bytes_be(bytes))
    }

    /// Strictly ascending digests.
    pub fn digest_set(&mut self) -> Result<DigestSet> {
        let n = self.len(DIGEST_LEN)?;
        let mut set = DigestSet::new();
        let mut prev: Option<ComponentDigest> = None;
        for _ in 0..n {
            let d = self.digest()?;
            if prev.is_some_and(|p| p >= d) {
                return Err(Error::Malformed("digests not strictly ascending"));
            }
            prev = Some(d);
            set.insert(d);
        }
        Ok(set)
    }

    pub fn finish(self) -> Result<()> {
        if self.buf.is_empty() {
            Ok(())
        } else {
            Err(Error::Malformed("trailing bytes"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_width_pads_left() {
        let n = FixedUint::new(BigUint::from(8u32), 4);
        assert_eq!(n.to_bytes(), vec![0, 0, 0, 8]);
        let zero = FixedUint::new(BigUint::from(0u32), 2);
        assert_eq!(zero.to_bytes(), vec![0, 0]);
    }

    #[test]
    fn reader_rejects_truncation_and_trailing() {
        let bytes = Writer::new().u64(5).raw(b"abc").finish();
        assert_eq!(
            Reader::new(&bytes).bytes(),
            Err(Error::Malformed("truncated"))
        );
        let bytes = Writer::new().bytes(b"abc").u8(1).finish();
        let mut r = Reader::new(&bytes);
        assert_eq!(r.bytes().unwrap(), b"abc");
        assert!(r.finish().is_err());
    }

    #[test]
    fn biguint_must_be_minimal() {
        let bytes = Writer::new().bytes(&[0, 1]).finish();
        assert!(Reader::new(&bytes).biguint().is_err());
        let bytes = Writer::new().biguint(&BigUint::from(258u32)).finish();
        assert_eq!(
            Reader::new(&bytes).biguint().unwrap(),
            BigUint::from(258u32)
        );
    }

    #[test]
    fn unsorted_digest_set_rejected() {
        let a = ComponentDigest([1; 32]);
        let b = ComponentDigest([2; 32]);
        let bytes = Writer::new().len(2).digest(&b).digest(&a).finish();
        assert!(Reader::new(&bytes).digest_set().is_err());
        let bytes = Writer::new().len(2).digest(&a).digest(&a).finish();
        assert!(Reader::new(&bytes).digest_set().is_err());
    }
}
