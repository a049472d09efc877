//! Plain bitvector with rank/select directories.
//!
//! Bits are stored LSB-first in 64-bit words. The rank directory keeps the
//! number of ones before every 512-bit block; select uses a sampled block
//! hint (every [`SELECT_SAMPLE`] ones or zeros) followed by a short binary
//! search over block counts and a word scan.

use crate::serial::{Reader, Writer};
use crate::Result;

const WORDS_PER_BLOCK: usize = 8;
const BLOCK_BITS: usize = WORDS_PER_BLOCK * 64;
const SELECT_SAMPLE: usize = 512;

#[derive(Clone, Debug, Default)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
    ones: usize,
    /// `blocks[b]` = ones in `words[..b * WORDS_PER_BLOCK]`; one extra entry at the end.
    blocks: Vec<u64>,
    /// Block holding the `(k * SELECT_SAMPLE + 1)`-th one.
    sel1: Vec<u32>,
    sel0: Vec<u32>,
}

impl PartialEq for BitVec {
    fn eq(&self, other: &Self) -> bool {
        self.len == other.len && self.words == other.words
    }
}

impl Eq for BitVec {}

impl BitVec {
    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % 64 == 0 {
                words.push(0);
            }
            if b {
                words[len / 64] |= 1 << (len % 64);
            }
            len += 1;
        }
        Self::from_words(words, len)
    }

    /// Builds from raw words; bits at positions `>= len` are cleared.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        words.resize(len.div_ceil(64), 0);
        if !len.is_multiple_of(64) {
            let last = words.len() - 1;
            words[last] &= (1u64 << (len % 64)) - 1;
        }
        let mut bv = BitVec {
            words,
            len,
            ..Default::default()
        };
        bv.build_directories();
        bv
    }

    /// A vector of `len` bits with ones exactly at `positions` (any order).
    pub fn from_positions(len: usize, positions: &[usize]) -> Self {
        let mut words = vec![0u64; len.div_ceil(64)];
        for &p in positions {
            assert!(p < len, "position {p} out of range {len}");
            words[p / 64] |= 1 << (p % 64);
        }
        Self::from_words(words, len)
    }

    fn build_directories(&mut self) {
        let nblocks = self.words.len().div_ceil(WORDS_PER_BLOCK);
        let mut blocks = Vec::with_capacity(nblocks + 1);
        let mut sel1 = Vec::new();
        let mut sel0 = Vec::new();
        let mut ones = 0usize;
        for b in 0..nblocks {
            blocks.push(ones as u64);
            let zeros_before = (b * BLOCK_BITS).min(self.len) - ones;
            let lo = b * WORDS_PER_BLOCK;
            let hi = (lo + WORDS_PER_BLOCK).min(self.words.len());
            let block_ones: usize = self.words[lo..hi]
                .iter()
                .map(|w| w.count_ones() as usize)
                .sum();
            let block_zeros = ((b + 1) * BLOCK_BITS).min(self.len) - b * BLOCK_BITS - block_ones;
            // Record this block for every sample index whose target falls inside it.
            while sel1.len() * SELECT_SAMPLE < ones + block_ones {
                sel1.push(b as u32);
            }
            while sel0.len() * SELECT_SAMPLE < zeros_before + block_zeros {
                sel0.push(b as u32);
            }
            ones += block_ones;
        }
        blocks.push(ones as u64);
        self.blocks = blocks;
        self.sel1 = sel1;
        self.sel0 = sel0;
        self.ones = ones;
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn count_ones(&self) -> usize {
        self.ones
    }

    #[inline]
    pub fn count_zeros(&self) -> usize {
        self.len - self.ones
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// # Panics
    /// If `i >= len`.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    /// Number of ones in `[0, i)`.
    ///
    /// # Panics
    /// If `i > len`.
    #[inline]
    pub fn rank1(&self, i: usize) -> usize {
        assert!(i <= self.len, "rank index {i} out of range {}", self.len);
        let w = i / 64;
        let b = w / WORDS_PER_BLOCK;
        let mut r = self.blocks[b] as usize;
        for k in b * WORDS_PER_BLOCK..w {
            r += self.words[k].count_ones() as usize;
        }
        if !i.is_multiple_of(64) {
            r += (self.words[w] & ((1u64 << (i % 64)) - 1)).count_ones() as usize;
        }
        r
    }

    #[inline]
    pub fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    /// Position of the `k`-th one (`k >= 1`), or `None` when there are fewer than `k` ones.
    pub fn select1(&self, k: usize) -> Option<usize> {
        if k == 0 || k > self.ones {
            return None;
        }
        let s = (k - 1) / SELECT_SAMPLE;
        let lo = self.sel1[s] as usize;
        let hi = self
            .sel1
            .get(s + 1)
            .map_or(self.blocks.len() - 2, |&b| b as usize);
        // Last block in [lo, hi] with ones-before < k.
        let (mut a, mut b) = (lo, hi);
        while a < b {
            let mid = (a + b).div_ceil(2);
            if (self.blocks[mid] as usize) < k {
                a = mid;
            } else {
                b = mid - 1;
            }
        }
        let mut rem = k - self.blocks[a] as usize;
        let mut w = a * WORDS_PER_BLOCK;
        loop {
            let c = self.words[w].count_ones() as usize;
            if rem <= c {
                return Some(w * 64 + select_in_word(self.words[w], rem));
            }
            rem -= c;
            w += 1;
        }
    }

    /// Position of the `k`-th zero (`k >= 1`).
    pub fn select0(&self, k: usize) -> Option<usize> {
        if k == 0 || k > self.count_zeros() {
            return None;
        }
        let zeros_before = |b: usize| (b * BLOCK_BITS).min(self.len) - self.blocks[b] as usize;
        let s = (k - 1) / SELECT_SAMPLE;
        let lo = self.sel0[s] as usize;
        let hi = self
            .sel0
            .get(s + 1)
            .map_or(self.blocks.len() - 2, |&b| b as usize);
        let (mut a, mut b) = (lo, hi);
        while a < b {
            let mid = (a + b).div_ceil(2);
            if zeros_before(mid) < k {
                a = mid;
            } else {
                b = mid - 1;
            }
        }
        let mut rem = k - zeros_before(a);
        let mut w = a * WORDS_PER_BLOCK;
        loop {
            let valid = (self.len - w * 64).min(64);
            let mut inv = !self.words[w];
            if valid < 64 {
                inv &= (1u64 << valid) - 1;
            }
            let c = inv.count_ones() as usize;
            if rem <= c {
                return Some(w * 64 + select_in_word(inv, rem));
            }
            rem -= c;
            w += 1;
        }
    }

    /// Payload size in bits, excluding directories.
    pub fn payload_bits(&self) -> usize {
        self.words.len() * 64
    }

    /// Total in-memory size in bits, including directories.
    pub fn size_in_bits(&self) -> usize {
        self.words.len() * 64 + self.blocks.len() * 64 + (self.sel0.len() + self.sel1.len()) * 32
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.u64(self.len as u64);
        for &x in &self.words {
            w.u64(x);
        }
    }

    pub(crate) fn read(r: &mut Reader) -> Result<Self> {
        let len = r.len_u64()?;
        let nwords = len.div_ceil(64);
        let mut words = Vec::with_capacity(r.bounded_capacity(nwords, 8)?);
        for _ in 0..nwords {
            words.push(r.u64()?);
        }
        Ok(Self::from_words(words, len))
    }
}

/// Offset of the `k`-th set bit (`k >= 1`) in `w`.
#[inline]
pub(crate) fn select_in_word(mut w: u64, k: usize) -> usize {
    debug_assert!(k >= 1 && k <= w.count_ones() as usize);
    for _ in 1..k {
        w &= w - 1;
    }
    w.trailing_zeros() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn scan_select(bits: &[bool], value: bool, k: usize) -> Option<usize> {
        bits.iter()
            .enumerate()
            .filter(|(_, &b)| b == value)
            .nth(k.wrapping_sub(1))
            .map(|(i, _)| i)
    }

    fn check_against_scan(bits: &[bool]) {
        let bv = BitVec::from_bits(bits.iter().copied());
        let mut ones = 0;
        for i in 0..=bits.len() {
            assert_eq!(bv.rank1(i), ones, "rank1({i})");
            if i < bits.len() {
                assert_eq!(bv.get(i), bits[i]);
                ones += bits[i] as usize;
            }
        }
        for k in 0..=bv.count_ones() + 1 {
            assert_eq!(bv.select1(k), scan_select(bits, true, k), "select1({k})");
        }
        for k in 0..=bv.count_zeros() + 1 {
            assert_eq!(bv.select0(k), scan_select(bits, false, k), "select0({k})");
        }
    }

    #[test]
    fn small_examples() {
        let bv = BitVec::from_bits([true, false, true, true, false]);
        assert_eq!(bv.rank1(3), 2);
        assert_eq!(bv.rank1(0), 0);
        assert_eq!(bv.select1(2), Some(2));
        assert_eq!(bv.select1(3), Some(3));
        assert_eq!(bv.select1(4), None);
        assert_eq!(bv.select0(2), Some(4));
    }

    #[test]
    #[should_panic]
    fn rank_out_of_range() {
        BitVec::from_bits([true, false]).rank1(3);
    }

    #[test]
    fn exhaustive_small_lengths() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for len in 0..=1000usize {
            let density = rng.gen_range(0.0..1.0);
            let bits: Vec<bool> = (0..len).map(|_| rng.gen_bool(density)).collect();
            check_against_scan(&bits);
        }
    }

    #[test]
    fn random_large() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for density in [0.001, 0.3, 0.97] {
            let bits: Vec<bool> = (0..100_000).map(|_| rng.gen_bool(density)).collect();
            check_against_scan(&bits);
        }
    }

    #[test]
    fn from_positions_matches_from_bits() {
        let bv = BitVec::from_positions(10, &[7, 1, 3]);
        assert_eq!(
            bv,
            BitVec::from_bits((0..10).map(|i| [1, 3, 7].contains(&i)))
        );
    }
}
