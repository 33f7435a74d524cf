//! MSB-first bit strings for table encodings.

use crate::error::{Error, Result};

/// A bit string packed most-significant-bit first into bytes.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct BitString {
    bytes: Vec<u8>,
    len: u64,
}

impl BitString {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: u64) -> Self {
        BitString { bytes: Vec::with_capacity(bits.div_ceil(8) as usize), len: 0 }
    }

    /// Wraps `bytes`, keeping the first `len` bits. Fails if `bytes` is
    /// too short.
    pub fn from_bytes(bytes: Vec<u8>, len: u64) -> Result<Self> {
        let have = bytes.len() as u64 * 8;
        if have < len {
            return Err(Error::Truncated { expected: len, got: have });
        }
        let mut bytes = bytes;
        bytes.truncate(len.div_ceil(8) as usize);
        Ok(BitString { bytes, len })
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.bytes
    }

    pub fn push_bit(&mut self, bit: bool) {
        let off = (self.len % 8) as u32;
        if off == 0 {
            self.bytes.push(0);
        }
        if bit {
            *self.bytes.last_mut().unwrap() |= 0x80 >> off;
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `value`, most significant first.
    pub fn push(&mut self, value: u64, width: u32) {
        for b in (0..width).rev() {
            self.push_bit(value >> b & 1 == 1);
        }
    }

    pub fn bit(&self, pos: u64) -> bool {
        assert!(pos < self.len, "bit index out of range");
        self.bytes[(pos / 8) as usize] & (0x80 >> (pos % 8)) != 0
    }

    /// Reads `width` bits starting at `pos` as a big-endian number.
    pub fn read(&self, pos: u64, width: u32) -> Result<u64> {
        if pos + width as u64 > self.len {
            return Err(Error::Truncated { expected: pos + width as u64, got: self.len });
        }
        Ok((0..width as u64).fold(0, |acc, k| acc << 1 | self.bit(pos + k) as u64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn msb_first_packing() {
        let mut b = BitString::new();
        b.push(0b101, 3);
        b.push(0b00001, 5);
        assert_eq!(b.as_bytes(), &[0b1010_0001]);
        b.push(1, 1);
        assert_eq!(b.len(), 9);
        assert_eq!(b.as_bytes(), &[0b1010_0001, 0b1000_0000]);
        assert_eq!(b.read(0, 3).unwrap(), 5);
        assert!(b.read(8, 2).is_err());
    }

    #[test]
    fn from_bytes_checks_length() {
        assert!(BitString::from_bytes(vec![0xff], 9).is_err());
        let b = BitString::from_bytes(vec![0xff, 0xff], 9).unwrap();
        assert_eq!(b.as_bytes().len(), 2);
    }

    proptest! {
        #[test]
        fn values_round_trip(vals in prop::collection::vec((any::<u64>(), 1u32..=20), 0..50)) {
            let mut b = BitString::new();
            for &(v, w) in &vals {
                b.push(v, w);
            }
            let mut pos = 0;
            for &(v, w) in &vals {
                prop_assert_eq!(b.read(pos, w).unwrap(), v & ((1u64 << w) - 1));
                pos += w as u64;
            }
        }
    }
}
