//! Label sequence with access/rank/select, stored as a wavelet matrix.
//!
//! Symbols are arbitrary `u64` values; the matrix uses `bit_width(max)`
//! levels. At each level the positions with a 0 bit are stably moved in
//! front of those with a 1 bit, so a symbol's occurrences end up
//! contiguous in the last level. The same layout answers orthogonal range
//! reporting (positions in a range whose value lies in a value interval).

use super::bits::BitVec;
use super::intvec::bit_width;
use crate::serial::{Reader, Writer};
use crate::{Error, Result};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelSeq {
    len: usize,
    levels: Vec<BitVec>,
    /// Zeros per level.
    zeros: Vec<usize>,
}

impl LabelSeq {
    pub fn new(values: &[u64]) -> Self {
        let max = values.iter().copied().max().unwrap_or(0);
        let nlevels = bit_width(max) as usize;
        let mut cur = values.to_vec();
        let mut levels = Vec::with_capacity(nlevels);
        let mut zeros = Vec::with_capacity(nlevels);
        let mut zero_part = Vec::with_capacity(values.len());
        let mut one_part = Vec::new();
        for l in 0..nlevels {
            let shift = nlevels - 1 - l;
            let bits = BitVec::from_bits(cur.iter().map(|&v| (v >> shift) & 1 == 1));
            zero_part.clear();
            one_part.clear();
            for &v in &cur {
                if (v >> shift) & 1 == 1 {
                    one_part.push(v);
                } else {
                    zero_part.push(v);
                }
            }
            zeros.push(zero_part.len());
            cur.clear();
            cur.extend_from_slice(&zero_part);
            cur.extend_from_slice(&one_part);
            levels.push(bits);
        }
        LabelSeq {
            len: values.len(),
            levels,
            zeros,
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    fn nlevels(&self) -> usize {
        self.levels.len()
    }

    /// # Panics
    /// If `i >= len`.
    pub fn access(&self, i: usize) -> u64 {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        let mut i = i;
        let mut v = 0u64;
        for (l, bv) in self.levels.iter().enumerate() {
            if bv.get(i) {
                v = (v << 1) | 1;
                i = self.zeros[l] + bv.rank1(i);
            } else {
                v <<= 1;
                i = bv.rank0(i);
            }
        }
        v
    }

    /// Start of `a`'s block in the last level and the mapped image of `i`.
    fn descend(&self, a: u64, i: usize) -> (usize, usize) {
        let (mut s, mut e) = (0usize, i);
        let n = self.nlevels();
        for (l, bv) in self.levels.iter().enumerate() {
            if (a >> (n - 1 - l)) & 1 == 1 {
                s = self.zeros[l] + bv.rank1(s);
                e = self.zeros[l] + bv.rank1(e);
            } else {
                s = bv.rank0(s);
                e = bv.rank0(e);
            }
        }
        (s, e)
    }

    fn representable(&self, a: u64) -> bool {
        self.nlevels() >= 64 || a >> self.nlevels() == 0
    }

    /// Occurrences of `a` in `[0, i)`.
    ///
    /// # Panics
    /// If `i > len`.
    pub fn rank(&self, a: u64, i: usize) -> usize {
        assert!(i <= self.len, "rank index {i} out of range {}", self.len);
        if !self.representable(a) {
            return 0;
        }
        let (s, e) = self.descend(a, i);
        e - s
    }

    /// Position of the `j`-th occurrence of `a` (`j >= 1`).
    pub fn select(&self, a: u64, j: usize) -> Option<usize> {
        if j == 0 || !self.representable(a) {
            return None;
        }
        let (s, e) = self.descend(a, self.len);
        if j > e - s {
            return None;
        }
        Some(self.lift(a, s + j - 1))
    }

    /// Every position holding `a`, in increasing order.
    pub fn positions(&self, a: u64) -> impl Iterator<Item = usize> + '_ {
        let (s, e) = if self.representable(a) {
            self.descend(a, self.len)
        } else {
            (0, 0)
        };
        (s..e).map(move |p| self.lift(a, p))
    }

    /// Maps a last-level position of symbol `a` back to the original position.
    fn lift(&self, a: u64, mut pos: usize) -> usize {
        let n = self.nlevels();
        for l in (0..n).rev() {
            let bv = &self.levels[l];
            pos = if (a >> (n - 1 - l)) & 1 == 1 {
                bv.select1(pos - self.zeros[l] + 1).unwrap()
            } else {
                bv.select0(pos + 1).unwrap()
            };
        }
        pos
    }

    /// Reports every position `i` in `[lo, hi)` with `vmin <= S[i] <= vmax`,
    /// as `(i, S[i])`, grouped by value in increasing order.
    pub fn range_report(
        &self,
        lo: usize,
        hi: usize,
        vmin: u64,
        vmax: u64,
        out: &mut impl FnMut(usize, u64),
    ) {
        assert!(
            lo <= hi && hi <= self.len,
            "range [{lo}, {hi}) out of bounds"
        );
        if lo == hi || vmin > vmax {
            return;
        }
        self.report_rec(0, lo, hi, 0, vmin, vmax, out);
    }

    #[allow(clippy::too_many_arguments)]
    fn report_rec(
        &self,
        level: usize,
        s: usize,
        e: usize,
        prefix: u64,
        vmin: u64,
        vmax: u64,
        out: &mut impl FnMut(usize, u64),
    ) {
        if s == e {
            return;
        }
        let n = self.nlevels();
        let rem = n - level;
        let first = if rem == 64 { 0 } else { prefix << rem };
        let last = first
            | if rem == 64 {
                u64::MAX
            } else {
                (1u64 << rem) - 1
            };
        if last < vmin || first > vmax {
            return;
        }
        if level == n {
            for k in s..e {
                out(self.lift(prefix, k), prefix);
            }
            return;
        }
        let bv = &self.levels[level];
        self.report_rec(
            level + 1,
            bv.rank0(s),
            bv.rank0(e),
            prefix << 1,
            vmin,
            vmax,
            out,
        );
        let z = self.zeros[level];
        self.report_rec(
            level + 1,
            z + bv.rank1(s),
            z + bv.rank1(e),
            (prefix << 1) | 1,
            vmin,
            vmax,
            out,
        );
    }

    pub fn size_in_bits(&self) -> usize {
        self.levels.iter().map(BitVec::size_in_bits).sum::<usize>() + 64 * (1 + self.zeros.len())
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.u64(self.len as u64);
        w.u8(self.levels.len() as u8);
        for l in &self.levels {
            l.write(w);
        }
    }

    pub(crate) fn read(r: &mut Reader) -> Result<Self> {
        let len = r.len_u64()?;
        let n = r.u8()? as usize;
        if n == 0 || n > 64 {
            return Err(Error::Format(format!("invalid wavelet level count {n}")));
        }
        let mut levels = Vec::with_capacity(n);
        let mut zeros = Vec::with_capacity(n);
        for _ in 0..n {
            let bv = BitVec::read(r)?;
            if bv.len() != len {
                return Err(Error::Format("wavelet level length mismatch".into()));
            }
            zeros.push(bv.count_zeros());
            levels.push(bv);
        }
        Ok(LabelSeq { len, levels, zeros })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn check(values: &[u64], sigma: u64) {
        let s = LabelSeq::new(values);
        for (i, &v) in values.iter().enumerate() {
            assert_eq!(s.access(i), v);
        }
        for a in 0..=sigma + 1 {
            let mut count = 0;
            for i in 0..=values.len() {
                assert_eq!(s.rank(a, i), count, "rank_{a}({i})");
                if i < values.len() && values[i] == a {
                    count += 1;
                    assert_eq!(s.select(a, count), Some(i), "select_{a}({count})");
                }
            }
            assert_eq!(s.select(a, count + 1), None);
        }
    }

    #[test]
    fn small_example() {
        let s = LabelSeq::new(&[3, 1, 3, 2]);
        assert_eq!(s.select(3, 2), Some(2));
        assert_eq!(s.rank(3, 3), 2);
        assert_eq!(s.access(3), 2);
        assert_eq!(s.select(9, 1), None);
        assert_eq!(s.rank(1 << 40, 4), 0);
        assert_eq!(s.positions(3).collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(s.positions(7).count(), 0);
        assert_eq!(s.positions(1 << 40).count(), 0);
    }

    #[test]
    fn exhaustive_small_sequences() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for len in (0..=1000).step_by(37) {
            let sigma = rng.gen_range(1..=64u64);
            let values: Vec<u64> = (0..len).map(|_| rng.gen_range(1..=sigma)).collect();
            check(&values, sigma);
        }
    }

    #[test]
    fn random_large() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        let values: Vec<u64> = (0..100_000).map(|_| rng.gen_range(1..=64)).collect();
        let s = LabelSeq::new(&values);
        let mut counts = [0usize; 65];
        for (i, &v) in values.iter().enumerate() {
            assert_eq!(s.access(i), v);
            assert_eq!(s.rank(v, i), counts[v as usize]);
            counts[v as usize] += 1;
            assert_eq!(s.select(v, counts[v as usize]), Some(i));
        }
    }

    #[test]
    fn range_report_matches_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        let values: Vec<u64> = (0..1000).map(|_| rng.gen_range(1..=300)).collect();
        let s = LabelSeq::new(&values);
        for _ in 0..500 {
            let lo = rng.gen_range(0..=values.len());
            let hi = rng.gen_range(lo..=values.len());
            let a = rng.gen_range(0..=310);
            let b = rng.gen_range(0..=310);
            let mut got = Vec::new();
            s.range_report(lo, hi, a, b, &mut |i, v| got.push((i, v)));
            got.sort();
            let want: Vec<(usize, u64)> = (lo..hi)
                .filter(|&i| a <= values[i] && values[i] <= b)
                .map(|i| (i, values[i]))
                .collect();
            assert_eq!(got, want);
        }
    }
}
