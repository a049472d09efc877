//! Elias–Fano encoded sparse bitvector.
//!
//! Each one at position `x` is split into `x >> low_width` (stored in unary
//! in `high`) and the low `low_width` bits (packed in `low`). Space is about
//! `m * (2 + lg(N/m))` bits for `m` ones in a universe of `N`.

use super::bits::BitVec;
use super::intvec::IntVec;
use crate::serial::{Reader, Writer};
use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SparseBitVec {
    universe: usize,
    ones: usize,
    low_width: u32,
    low: IntVec,
    high: BitVec,
}

impl SparseBitVec {
    /// Builds from strictly increasing positions `< universe`.
    ///
    /// # Panics
    /// If positions are not strictly increasing or exceed the universe.
    pub fn new(universe: usize, positions: &[usize]) -> Self {
        for w in positions.windows(2) {
            assert!(w[0] < w[1], "positions must be strictly increasing");
        }
        if let Some(&last) = positions.last() {
            assert!(
                last < universe,
                "position {last} outside universe {universe}"
            );
        }
        let m = positions.len();
        let low_width = if m == 0 || universe <= m {
            0
        } else {
            (universe / m).ilog2()
        };
        let mut low = IntVec::with_width(low_width.max(1));
        let mut high_pos = Vec::with_capacity(m);
        for (i, &x) in positions.iter().enumerate() {
            if low_width > 0 {
                low.push((x as u64) & ((1u64 << low_width) - 1));
            }
            high_pos.push((x >> low_width) + i);
        }
        let high_len = m + (universe >> low_width) + 1;
        SparseBitVec {
            universe,
            ones: m,
            low_width,
            low,
            high: BitVec::from_positions(high_len, &high_pos),
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut n = 0;
        let mut pos = Vec::new();
        for b in bits {
            if b {
                pos.push(n);
            }
            n += 1;
        }
        Self::new(n, &pos)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.universe == 0
    }

    #[inline]
    pub fn count_ones(&self) -> usize {
        self.ones
    }

    #[inline]
    fn low_of(&self, i: usize) -> usize {
        if self.low_width == 0 {
            0
        } else {
            self.low.get(i) as usize
        }
    }

    /// Position of the `k`-th one (`k >= 1`).
    pub fn select1(&self, k: usize) -> Option<usize> {
        if k == 0 || k > self.ones {
            return None;
        }
        let hi = self.high.select1(k)? - (k - 1);
        Some((hi << self.low_width) | self.low_of(k - 1))
    }

    /// Number of ones in `[0, i)`.
    ///
    /// # Panics
    /// If `i > len`.
    pub fn rank1(&self, i: usize) -> usize {
        assert!(
            i <= self.universe,
            "rank index {i} out of range {}",
            self.universe
        );
        if i == self.universe {
            return self.ones;
        }
        let bucket = i >> self.low_width;
        // Start of the bucket in `high`: just after its bucket-th zero.
        let mut pos = if bucket == 0 {
            0
        } else {
            self.high.select0(bucket).expect("bucket within universe") + 1
        };
        let mut k = pos - bucket;
        let low_target = i & ((1usize << self.low_width) - 1);
        while pos < self.high.len() && self.high.get(pos) && self.low_of(k) < low_target {
            pos += 1;
            k += 1;
        }
        k
    }

    pub fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(
            i < self.universe,
            "bit index {i} out of range {}",
            self.universe
        );
        self.rank1(i + 1) > self.rank1(i)
    }

    /// Position of the `k`-th zero, found by binary search over the ones.
    pub fn select0(&self, k: usize) -> Option<usize> {
        if k == 0 || k > self.universe - self.ones {
            return None;
        }
        // Largest j such that the j-th one lies before the k-th zero, i.e. select1(j) < k - 1 + j.
        let (mut lo, mut hi) = (0usize, self.ones);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if self.select1(mid).unwrap() < k - 1 + mid {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        Some(k - 1 + lo)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        (1..=self.ones).map(move |k| self.select1(k).unwrap())
    }

    pub fn size_in_bits(&self) -> usize {
        self.low.size_in_bits() + self.high.size_in_bits() + 3 * 64
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.u64(self.universe as u64);
        w.u64(self.ones as u64);
        w.u8(self.low_width as u8);
        self.low.write(w);
        self.high.write(w);
    }

    pub(crate) fn read(r: &mut Reader) -> Result<Self> {
        let universe = r.len_u64()?;
        let ones = r.len_u64()?;
        let low_width = r.u8()? as u32;
        let low = IntVec::read(r)?;
        let high = BitVec::read(r)?;
        let ok = ones <= universe
            && low_width < 64
            && high.count_ones() == ones
            && high.len() == ones + (universe >> low_width) + 1
            && (low_width == 0 || low.len() == ones);
        if !ok {
            return Err(Error::Format("inconsistent sparse bitvector".into()));
        }
        Ok(SparseBitVec {
            universe,
            ones,
            low_width,
            low,
            high,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check(bits: &[bool]) {
        let sv = SparseBitVec::from_bits(bits.iter().copied());
        let plain = BitVec::from_bits(bits.iter().copied());
        for i in 0..=bits.len() {
            assert_eq!(sv.rank1(i), plain.rank1(i), "rank1({i})");
        }
        for k in 0..=plain.count_ones() + 1 {
            assert_eq!(sv.select1(k), plain.select1(k), "select1({k})");
        }
        for k in 0..=plain.count_zeros() + 1 {
            assert_eq!(sv.select0(k), plain.select0(k), "select0({k})");
        }
    }

    #[test]
    fn small_example() {
        let sv = SparseBitVec::from_bits([true, false, true, true, false]);
        assert_eq!(sv.rank1(3), 2);
        assert_eq!(sv.rank1(0), 0);
        assert_eq!(sv.select1(2), Some(2));
        assert_eq!(sv.select1(3), Some(3));
        assert!(sv.get(0) && !sv.get(1));
    }

    #[test]
    fn exhaustive_small() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for len in 0..=1000usize {
            let density = [0.01, 0.1, 0.5, 0.95][len % 4];
            let bits: Vec<bool> = (0..len).map(|_| rng.gen_bool(density)).collect();
            check(&bits);
        }
    }

    #[test]
    fn random_sparse_large() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for density in [0.0005, 0.02, 0.6] {
            let bits: Vec<bool> = (0..100_000).map(|_| rng.gen_bool(density)).collect();
            check(&bits);
        }
    }

    #[test]
    fn space_is_sublinear_for_sparse_sets() {
        let positions: Vec<usize> = (0..1000).map(|i| i * 1000).collect();
        let sv = SparseBitVec::new(1_000_000, &positions);
        // ~1000 * (2 + 10) bits plus directories, far below 10^6.
        assert!(sv.size_in_bits() < 40_000, "{}", sv.size_in_bits());
    }
}
