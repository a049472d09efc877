//! Fixed-width packed integer array.

use crate::serial::{Reader, Writer};
use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntVec {
    words: Vec<u64>,
    width: u32,
    len: usize,
}

/// Bits needed to store `x` (at least 1).
pub fn bit_width(x: u64) -> u32 {
    (64 - x.leading_zeros()).max(1)
}

impl IntVec {
    pub fn with_width(width: u32) -> Self {
        assert!((1..=64).contains(&width));
        IntVec {
            words: Vec::new(),
            width,
            len: 0,
        }
    }

    /// Packs `values` using the smallest width that holds the maximum.
    pub fn from_slice(values: &[u64]) -> Self {
        let max = values.iter().copied().max().unwrap_or(0);
        let mut v = Self::with_width(bit_width(max));
        v.words
            .reserve((values.len() * v.width as usize).div_ceil(64));
        for &x in values {
            v.push(x);
        }
        v
    }

    pub fn push(&mut self, x: u64) {
        let w = self.width as usize;
        debug_assert!(w == 64 || x >> w == 0, "value {x} exceeds width {w}");
        let bit = self.len * w;
        let need = (bit + w).div_ceil(64);
        if self.words.len() < need {
            self.words.resize(need, 0);
        }
        let (i, off) = (bit / 64, bit % 64);
        self.words[i] |= x << off;
        if off + w > 64 {
            self.words[i + 1] |= x >> (64 - off);
        }
        self.len += 1;
    }

    #[inline]
    pub fn get(&self, idx: usize) -> u64 {
        assert!(idx < self.len, "index {idx} out of range {}", self.len);
        let w = self.width as usize;
        let bit = idx * w;
        let (i, off) = (bit / 64, bit % 64);
        let mask = if w == 64 { u64::MAX } else { (1u64 << w) - 1 };
        let mut x = self.words[i] >> off;
        if off + w > 64 {
            x |= self.words[i + 1] << (64 - off);
        }
        x & mask
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn size_in_bits(&self) -> usize {
        self.words.len() * 64
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.u8(self.width as u8);
        w.u64(self.len as u64);
        for &x in &self.words {
            w.u64(x);
        }
    }

    pub(crate) fn read(r: &mut Reader) -> Result<Self> {
        let width = r.u8()? as u32;
        if !(1..=64).contains(&width) {
            return Err(Error::Format(format!("invalid integer width {width}")));
        }
        let len = r.len_u64()?;
        let nwords = len
            .checked_mul(width as usize)
            .ok_or_else(|| Error::Format("integer array too large".into()))?
            .div_ceil(64);
        let mut words = Vec::with_capacity(r.bounded_capacity(nwords, 8)?);
        for _ in 0..nwords {
            words.push(r.u64()?);
        }
        Ok(IntVec { words, width, len })
    }
}
