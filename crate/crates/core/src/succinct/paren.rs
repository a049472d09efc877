//! Balanced-parentheses ordinal tree.
//!
//! The tree is written in DFS order, `1` when a node is entered and `0` when
//! it is left. A node is identified by the position of its opening bit;
//! preorders are 1-based. Navigation goes through excess searches over a
//! range min-max tree: `E(i)` is the number of ones minus the number of
//! zeros in `bits[0..=i]`, with `E(-1) = 0`.
//!
//! Leaves are exactly the positions where the pattern `10` starts and
//! internal nodes where `11` starts, so `leafrank`/`leafselect` and
//! `intrank`/`intselect` are rank/select over those two-bit patterns, each
//! backed by its own block-count directory.

use super::bits::{select_in_word, BitVec};
use crate::serial::{Reader, Writer};
use crate::{Error, Result};

/// Bits per leaf of the min-max tree.
const BLOCK: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pattern {
    /// `10`: a leaf.
    Leaf,
    /// `11`: an internal node.
    Internal,
}

/// Rank/select directory over the starting positions of a two-bit pattern.
#[derive(Clone, Debug, Default)]
struct PatternDir {
    pattern: Option<Pattern>,
    /// Pattern count before each group of 8 words, plus a final total.
    blocks: Vec<u32>,
}

impl PatternDir {
    fn new(bits: &BitVec, pattern: Pattern) -> Self {
        let nwords = bits.words().len();
        let mut blocks = Vec::with_capacity(nwords / 8 + 2);
        let mut total = 0u32;
        for w in 0..nwords {
            if w % 8 == 0 {
                blocks.push(total);
            }
            total += pattern_word(bits, pattern, w).count_ones();
        }
        blocks.push(total);
        PatternDir {
            pattern: Some(pattern),
            blocks,
        }
    }

    fn total(&self) -> usize {
        *self.blocks.last().unwrap_or(&0) as usize
    }

    /// Occurrences starting in `[0, i)`.
    fn rank(&self, bits: &BitVec, i: usize) -> usize {
        let p = self.pattern.unwrap();
        let w = i / 64;
        let b = w / 8;
        if b >= self.blocks.len() - 1 {
            return self.total();
        }
        let mut r = self.blocks[b] as usize;
        for k in b * 8..w {
            r += pattern_word(bits, p, k).count_ones() as usize;
        }
        if !i.is_multiple_of(64) {
            r += (pattern_word(bits, p, w) & ((1u64 << (i % 64)) - 1)).count_ones() as usize;
        }
        r
    }

    /// Start of the `k`-th occurrence (`k >= 1`).
    fn select(&self, bits: &BitVec, k: usize) -> Option<usize> {
        if k == 0 || k > self.total() {
            return None;
        }
        let p = self.pattern.unwrap();
        // Last block with count-before < k.
        let b = self.blocks.partition_point(|&c| (c as usize) < k) - 1;
        let mut rem = k - self.blocks[b] as usize;
        let mut w = b * 8;
        loop {
            let word = pattern_word(bits, p, w);
            let c = word.count_ones() as usize;
            if rem <= c {
                return Some(w * 64 + select_in_word(word, rem));
            }
            rem -= c;
            w += 1;
        }
    }

    fn size_in_bits(&self) -> usize {
        self.blocks.len() * 32
    }
}

/// Word `w` of the indicator "pattern starts here".
#[inline]
fn pattern_word(bits: &BitVec, p: Pattern, w: usize) -> u64 {
    let words = bits.words();
    let cur = words[w];
    let next = words.get(w + 1).map_or(0, |x| x & 1);
    let shifted = (cur >> 1) | (next << 63);
    match p {
        Pattern::Leaf => cur & !shifted,
        Pattern::Internal => cur & shifted,
    }
}

/// Range min-max tree over the excess sequence, one leaf per `BLOCK` bits.
#[derive(Clone, Debug, Default)]
struct MinMax {
    /// Number of leaves in the (complete) tree.
    leaves: usize,
    /// Heap-ordered node minima of `E`; padding leaves hold `i32::MAX`.
    min: Vec<i32>,
    /// Number of positions attaining the node minimum.
    cnt: Vec<u32>,
}

impl MinMax {
    fn new(bits: &BitVec) -> Self {
        let nblocks = bits.len().div_ceil(BLOCK).max(1);
        let leaves = nblocks.next_power_of_two();
        let mut min = vec![i32::MAX; 2 * leaves];
        let mut cnt = vec![0u32; 2 * leaves];
        let mut e = 0i32;
        for b in 0..nblocks {
            let (mut m, mut c) = (i32::MAX, 0u32);
            for i in b * BLOCK..((b + 1) * BLOCK).min(bits.len()) {
                e += if bits.get(i) { 1 } else { -1 };
                if e < m {
                    m = e;
                    c = 1;
                } else if e == m {
                    c += 1;
                }
            }
            min[leaves + b] = m;
            cnt[leaves + b] = c;
        }
        for v in (1..leaves).rev() {
            let (m, c) = combine((min[2 * v], cnt[2 * v]), (min[2 * v + 1], cnt[2 * v + 1]));
            min[v] = m;
            cnt[v] = c;
        }
        MinMax { leaves, min, cnt }
    }

    /// First block after `b` whose minimum is `<= t`.
    fn next_block_le(&self, b: usize, t: i32) -> Option<usize> {
        let mut v = self.leaves + b;
        while v > 1 {
            if v.is_multiple_of(2) && self.min[v + 1] <= t {
                let mut u = v + 1;
                while u < self.leaves {
                    u = if self.min[2 * u] <= t {
                        2 * u
                    } else {
                        2 * u + 1
                    };
                }
                return Some(u - self.leaves);
            }
            v /= 2;
        }
        None
    }

    /// Last block before `b` whose minimum is `<= t`.
    fn prev_block_le(&self, b: usize, t: i32) -> Option<usize> {
        let mut v = self.leaves + b;
        while v > 1 {
            if v % 2 == 1 && self.min[v - 1] <= t {
                let mut u = v - 1;
                while u < self.leaves {
                    u = if self.min[2 * u + 1] <= t {
                        2 * u + 1
                    } else {
                        2 * u
                    };
                }
                return Some(u - self.leaves);
            }
            v /= 2;
        }
        None
    }

    /// (min, count) over the blocks `[lo, hi]`.
    fn range(&self, lo: usize, hi: usize) -> (i32, u32) {
        let (mut l, mut r) = (lo + self.leaves, hi + self.leaves + 1);
        let mut acc = (i32::MAX, 0);
        while l < r {
            if l % 2 == 1 {
                acc = combine(acc, (self.min[l], self.cnt[l]));
                l += 1;
            }
            if r % 2 == 1 {
                r -= 1;
                acc = combine(acc, (self.min[r], self.cnt[r]));
            }
            l /= 2;
            r /= 2;
        }
        acc
    }

    /// Block among `[lo, hi]` holding the `k`-th position with `E == target`,
    /// where `target` is the minimum over those blocks. Returns the block and
    /// the rank of the wanted position inside it.
    fn kth_min_block(&self, lo: usize, hi: usize, target: i32, k: usize) -> (usize, usize) {
        let mut rem = k;
        let r = self.descend(1, 0, self.leaves - 1, lo, hi, target, &mut rem);
        (r.expect("k within the minimum count"), rem)
    }

    #[allow(clippy::too_many_arguments)]
    fn descend(
        &self,
        v: usize,
        nl: usize,
        nr: usize,
        lo: usize,
        hi: usize,
        target: i32,
        rem: &mut usize,
    ) -> Option<usize> {
        // A partially covered node may take a smaller minimum from outside
        // the range, so only `> target` is safe to prune.
        if nr < lo || nl > hi || self.min[v] > target {
            return None;
        }
        if lo <= nl && nr <= hi && (self.cnt[v] as usize) < *rem {
            *rem -= self.cnt[v] as usize;
            return None;
        }
        if v >= self.leaves {
            return Some(v - self.leaves);
        }
        let mid = (nl + nr) / 2;
        self.descend(2 * v, nl, mid, lo, hi, target, rem)
            .or_else(|| self.descend(2 * v + 1, mid + 1, nr, lo, hi, target, rem))
    }

    fn size_in_bits(&self) -> usize {
        self.min.len() * 64
    }
}

#[inline]
fn combine(a: (i32, u32), b: (i32, u32)) -> (i32, u32) {
    match a.0.cmp(&b.0) {
        std::cmp::Ordering::Less => a,
        std::cmp::Ordering::Greater => b,
        std::cmp::Ordering::Equal => (a.0, a.1 + b.1),
    }
}

/// Ordinal tree over a balanced parenthesis sequence.
#[derive(Clone, Debug, Default)]
pub struct ParenTree {
    bits: BitVec,
    mm: MinMax,
    leaves: PatternDir,
    internals: PatternDir,
}

impl PartialEq for ParenTree {
    fn eq(&self, other: &Self) -> bool {
        self.bits == other.bits
    }
}

impl ParenTree {
    /// # Errors
    /// If the sequence is empty or not balanced.
    pub fn new(bits: BitVec) -> Result<Self> {
        let mut e = 0i64;
        for i in 0..bits.len() {
            e += if bits.get(i) { 1 } else { -1 };
            if e < 0 || (e == 0 && i + 1 != bits.len()) {
                return Err(Error::Format(
                    "unbalanced or disconnected parentheses".into(),
                ));
            }
        }
        if bits.is_empty() || e != 0 {
            return Err(Error::Format("unbalanced parentheses".into()));
        }
        let mm = MinMax::new(&bits);
        let leaves = PatternDir::new(&bits, Pattern::Leaf);
        let internals = PatternDir::new(&bits, Pattern::Internal);
        Ok(ParenTree {
            bits,
            mm,
            leaves,
            internals,
        })
    }

    /// Parses `(`/`)` notation.
    pub fn from_parens(s: &str) -> Result<Self> {
        Self::new(BitVec::from_bits(s.chars().filter_map(|c| match c {
            '(' => Some(true),
            ')' => Some(false),
            _ => None,
        })))
    }

    pub fn bits(&self) -> &BitVec {
        &self.bits
    }

    pub fn num_nodes(&self) -> usize {
        self.bits.len() / 2
    }

    pub fn num_leaves(&self) -> usize {
        self.leaves.total()
    }

    pub fn num_internal(&self) -> usize {
        self.internals.total()
    }

    pub const ROOT: usize = 0;

    /// True if `v` is the position of an opening parenthesis.
    pub fn is_node(&self, v: usize) -> bool {
        v < self.bits.len() && self.bits.get(v)
    }

    #[inline]
    pub fn is_leaf(&self, v: usize) -> bool {
        !self.bits.get(v + 1)
    }

    #[inline]
    fn excess(&self, i: usize) -> i32 {
        2 * self.bits.rank1(i + 1) as i32 - (i as i32 + 1)
    }

    /// Smallest `j > i` with `E(j) <= t`.
    fn fwd_search(&self, i: usize, t: i32) -> Option<usize> {
        let n = self.bits.len();
        let mut e = self.excess(i);
        let b = i / BLOCK;
        for j in i + 1..((b + 1) * BLOCK).min(n) {
            e += if self.bits.get(j) { 1 } else { -1 };
            if e <= t {
                return Some(j);
            }
        }
        let nb = self.mm.next_block_le(b, t)?;
        let start = nb * BLOCK;
        let mut e = if start == 0 {
            0
        } else {
            self.excess(start - 1)
        };
        for j in start..((nb + 1) * BLOCK).min(n) {
            e += if self.bits.get(j) { 1 } else { -1 };
            if e <= t {
                return Some(j);
            }
        }
        unreachable!("block minimum promised a match")
    }

    /// Largest `j < i` with `E(j) <= t`; `-1` stands for the virtual start
    /// (`E(-1) = 0`).
    fn bwd_search(&self, i: usize, t: i32) -> Option<isize> {
        let mut e = self.excess(i);
        let b = i / BLOCK;
        let mut j = i;
        while j > b * BLOCK {
            // E(j-1) = E(j) - delta(j)
            e -= if self.bits.get(j) { 1 } else { -1 };
            j -= 1;
            if e <= t {
                return Some(j as isize);
            }
        }
        if let Some(pb) = self.mm.prev_block_le(b, t) {
            let end = ((pb + 1) * BLOCK).min(self.bits.len()) - 1;
            let mut e = self.excess(end);
            let mut j = end;
            loop {
                if e <= t {
                    return Some(j as isize);
                }
                e -= if self.bits.get(j) { 1 } else { -1 };
                j -= 1;
            }
        }
        (t >= 0).then_some(-1)
    }

    /// Position of the parenthesis closing node `v`.
    pub fn close(&self, v: usize) -> usize {
        self.fwd_search(v, self.excess(v) - 1)
            .expect("balanced sequence")
    }

    /// Opening position for a closing parenthesis at `c`.
    pub fn open(&self, c: usize) -> usize {
        (self
            .bwd_search(c, self.excess(c))
            .expect("balanced sequence")
            + 1) as usize
    }

    /// The node with preorder `p` (1-based).
    pub fn node(&self, p: usize) -> Option<usize> {
        self.bits.select1(p)
    }

    /// 1-based preorder of `v`.
    #[inline]
    pub fn preorder(&self, v: usize) -> usize {
        self.bits.rank1(v) + 1
    }

    /// Number of leaves strictly before `v` in preorder.
    #[inline]
    pub fn leafrank(&self, v: usize) -> usize {
        self.leaves.rank(&self.bits, v)
    }

    /// The `j`-th leaf (`j >= 1`).
    pub fn leafselect(&self, j: usize) -> Option<usize> {
        self.leaves.select(&self.bits, j)
    }

    /// Number of internal nodes strictly before `v` in preorder.
    #[inline]
    pub fn intrank(&self, v: usize) -> usize {
        self.internals.rank(&self.bits, v)
    }

    /// The `j`-th internal node in preorder (`j >= 1`).
    pub fn intselect(&self, j: usize) -> Option<usize> {
        self.internals.select(&self.bits, j)
    }

    /// Leaves in the subtree of `v` (1 for a leaf).
    pub fn numleaves(&self, v: usize) -> usize {
        let c = self.close(v);
        self.leaves.rank(&self.bits, c) - self.leaves.rank(&self.bits, v)
    }

    pub fn subtree_size(&self, v: usize) -> usize {
        (self.close(v) - v).div_ceil(2)
    }

    pub fn parent(&self, v: usize) -> Option<usize> {
        if v == Self::ROOT {
            return None;
        }
        Some((self.bwd_search(v, self.excess(v) - 2)? + 1) as usize)
    }

    /// Depth of `v`; the root has depth 0.
    pub fn depth(&self, v: usize) -> usize {
        (self.excess(v) - 1) as usize
    }

    /// The ancestor `k` levels above `v` (`k = 0` is `v` itself).
    pub fn level_ancestor(&self, v: usize, k: usize) -> Option<usize> {
        if k == 0 {
            return Some(v);
        }
        if k > self.depth(v) {
            return None;
        }
        Some((self.bwd_search(v, self.excess(v) - 1 - k as i32)? + 1) as usize)
    }

    pub fn first_child(&self, v: usize) -> Option<usize> {
        (!self.is_leaf(v)).then_some(v + 1)
    }

    pub fn last_child(&self, v: usize) -> Option<usize> {
        if self.is_leaf(v) {
            return None;
        }
        Some(self.open(self.close(v) - 1))
    }

    pub fn next_sibling(&self, v: usize) -> Option<usize> {
        let c = self.close(v) + 1;
        (c < self.bits.len() && self.bits.get(c)).then_some(c)
    }

    pub fn prev_sibling(&self, v: usize) -> Option<usize> {
        (v > 0 && !self.bits.get(v - 1)).then(|| self.open(v - 1))
    }

    /// Closing positions of children are exactly the minima of `E` inside
    /// `(v, close(v))`, so the degree is the count of that minimum.
    pub fn degree(&self, v: usize) -> usize {
        if self.is_leaf(v) {
            return 0;
        }
        let (lo, hi) = (v + 1, self.close(v) - 1);
        let (m, c) = self.range_min_count(lo, hi);
        debug_assert_eq!(m, self.excess(v));
        c
    }

    /// The `k`-th child of `v` (`k >= 1`).
    pub fn child(&self, v: usize, k: usize) -> Option<usize> {
        if k == 0 || self.is_leaf(v) {
            return None;
        }
        if k == 1 {
            return Some(v + 1);
        }
        let (lo, hi) = (v + 1, self.close(v) - 1);
        let target = self.excess(v);
        // The child starts right after the (k-1)-th child's closing bit.
        let prev_close = self.select_excess(lo, hi, target, k - 1)?;
        (prev_close < hi).then_some(prev_close + 1)
    }

    fn range_min_count(&self, lo: usize, hi: usize) -> (i32, usize) {
        let (bl, bh) = (lo / BLOCK, hi / BLOCK);
        let mut acc = (i32::MAX, 0u32);
        let scan = |a: usize, b: usize, acc: &mut (i32, u32)| {
            let mut e = if a == 0 { 0 } else { self.excess(a - 1) };
            for j in a..=b {
                e += if self.bits.get(j) { 1 } else { -1 };
                *acc = combine(*acc, (e, 1));
            }
        };
        if bl == bh {
            scan(lo, hi, &mut acc);
        } else {
            scan(lo, (bl + 1) * BLOCK - 1, &mut acc);
            if bl + 1 < bh {
                acc = combine(acc, self.mm.range(bl + 1, bh - 1));
            }
            scan(bh * BLOCK, hi, &mut acc);
        }
        (acc.0, acc.1 as usize)
    }

    /// The `k`-th position in `[lo, hi]` with `E == target`, where `target`
    /// is the minimum of `E` over that range.
    fn select_excess(&self, lo: usize, hi: usize, target: i32, k: usize) -> Option<usize> {
        let mut rem = k;
        let scan = |a: usize, b: usize, rem: &mut usize| -> Option<usize> {
            let mut e = if a == 0 { 0 } else { self.excess(a - 1) };
            for j in a..=b {
                e += if self.bits.get(j) { 1 } else { -1 };
                if e == target {
                    *rem -= 1;
                    if *rem == 0 {
                        return Some(j);
                    }
                }
            }
            None
        };
        let (bl, bh) = (lo / BLOCK, hi / BLOCK);
        if bl == bh {
            return scan(lo, hi, &mut rem);
        }
        if let Some(j) = scan(lo, (bl + 1) * BLOCK - 1, &mut rem) {
            return Some(j);
        }
        if bl + 1 < bh {
            let (m, c) = self.mm.range(bl + 1, bh - 1);
            if m == target {
                if (c as usize) >= rem {
                    let (b, r) = self.mm.kth_min_block(bl + 1, bh - 1, target, rem);
                    let mut r = r;
                    return scan(b * BLOCK, (b + 1) * BLOCK - 1, &mut r);
                }
                rem -= c as usize;
            }
        }
        scan(bh * BLOCK, hi, &mut rem)
    }

    pub fn size_in_bits(&self) -> usize {
        self.bits.size_in_bits()
            + self.mm.size_in_bits()
            + self.leaves.size_in_bits()
            + self.internals.size_in_bits()
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        self.bits.write(w);
    }

    pub(crate) fn read(r: &mut Reader) -> Result<Self> {
        Self::new(BitVec::read(r)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Pointer-based reference tree.
    struct Oracle {
        parent: Vec<Option<usize>>,
        children: Vec<Vec<usize>>,
        depth: Vec<usize>,
        /// Nodes indexed by preorder - 1; value = bit position.
        pos: Vec<usize>,
    }

    impl Oracle {
        fn from_parent(parent: Vec<Option<usize>>) -> Self {
            // Nodes are given in preorder already (parent index < child index).
            let n = parent.len();
            let mut children = vec![Vec::new(); n];
            let mut depth = vec![0; n];
            for v in 1..n {
                let p = parent[v].unwrap();
                children[p].push(v);
                depth[v] = depth[p] + 1;
            }
            let mut pos = vec![0; n];
            let mut bit = 0;
            let mut stack = vec![(0usize, 0usize)];
            pos[0] = 0;
            bit += 1;
            while let Some((v, k)) = stack.pop() {
                if k < children[v].len() {
                    stack.push((v, k + 1));
                    let c = children[v][k];
                    pos[c] = bit;
                    bit += 1;
                    stack.push((c, 0));
                } else {
                    bit += 1;
                }
            }
            Oracle {
                parent,
                children,
                depth,
                pos,
            }
        }

        fn bits(&self) -> Vec<bool> {
            let mut out = Vec::new();
            let mut stack = vec![(0usize, 0usize)];
            out.push(true);
            while let Some((v, k)) = stack.pop() {
                if k < self.children[v].len() {
                    stack.push((v, k + 1));
                    out.push(true);
                    stack.push((self.children[v][k], 0));
                } else {
                    out.push(false);
                }
            }
            out
        }

        fn is_leaf(&self, v: usize) -> bool {
            self.children[v].is_empty()
        }

        fn leaves_in(&self, v: usize) -> usize {
            if self.is_leaf(v) {
                1
            } else {
                self.children[v].iter().map(|&c| self.leaves_in(c)).sum()
            }
        }
    }

    /// Random tree in preorder: node v attaches to a node on the current rightmost path.
    fn random_tree(rng: &mut ChaCha8Rng, n: usize, bushy: bool) -> Oracle {
        let mut parent = vec![None];
        let mut path = vec![0usize];
        for v in 1..n {
            let keep = if bushy {
                rng.gen_range(1..=path.len().min(3))
            } else {
                rng.gen_range(1..=path.len())
            };
            path.truncate(keep.max(1));
            let p = *path.last().unwrap();
            parent.push(Some(p));
            path.push(v);
        }
        Oracle::from_parent(parent)
    }

    fn check(o: &Oracle) {
        let t = ParenTree::new(BitVec::from_bits(o.bits())).unwrap();
        let n = o.parent.len();
        assert_eq!(t.num_nodes(), n);
        let mut leaves_before = 0;
        let mut internal_before = 0;
        let mut degree_sum = 0;
        for v in 0..n {
            let x = o.pos[v];
            assert_eq!(t.node(v + 1), Some(x));
            assert_eq!(t.preorder(x), v + 1);
            assert_eq!(t.is_leaf(x), o.is_leaf(v));
            assert_eq!(t.leafrank(x), leaves_before);
            assert_eq!(t.intrank(x), internal_before);
            if o.is_leaf(v) {
                leaves_before += 1;
                assert_eq!(t.leafselect(leaves_before), Some(x));
            } else {
                internal_before += 1;
                assert_eq!(t.intselect(internal_before), Some(x));
            }
            assert_eq!(t.numleaves(x), o.leaves_in(v));
            assert_eq!(t.parent(x), o.parent[v].map(|p| o.pos[p]));
            if let Some(p) = o.parent[v] {
                assert!(t.preorder(o.pos[p]) < t.preorder(x));
            }
            assert_eq!(t.depth(x), o.depth[v]);
            assert_eq!(t.degree(x), o.children[v].len());
            degree_sum += t.degree(x);
            for (k, &c) in o.children[v].iter().enumerate() {
                assert_eq!(t.child(x, k + 1), Some(o.pos[c]), "child({v},{})", k + 1);
            }
            assert_eq!(t.child(x, o.children[v].len() + 1), None);
            assert_eq!(t.last_child(x), o.children[v].last().map(|&c| o.pos[c]));
            let sibs = o.parent[v].map(|p| &o.children[p]);
            let idx = sibs.map(|s| s.iter().position(|&c| c == v).unwrap());
            let next = sibs
                .and_then(|s| s.get(idx.unwrap() + 1))
                .map(|&c| o.pos[c]);
            let prev = sibs
                .and_then(|s| idx.unwrap().checked_sub(1).map(|i| s[i]))
                .map(|c| o.pos[c]);
            assert_eq!(t.next_sibling(x), next);
            assert_eq!(t.prev_sibling(x), prev);
            // level ancestors
            let mut a = v;
            for k in 0..=o.depth[v] {
                assert_eq!(t.level_ancestor(x, k), Some(o.pos[a]));
                if k < o.depth[v] {
                    a = o.parent[a].unwrap();
                }
            }
            assert_eq!(t.level_ancestor(x, o.depth[v] + 1), None);
        }
        assert_eq!(degree_sum, n - 1);
        assert_eq!(t.num_leaves(), leaves_before);
        assert_eq!(t.leafselect(leaves_before + 1), None);
    }

    #[test]
    fn example_tree() {
        let t = ParenTree::from_parens("((()())())").unwrap();
        let node = |p| t.node(p).unwrap();
        assert_eq!(t.leafrank(node(5)), 2);
        assert_eq!(t.parent(node(3)), Some(node(2)));
        assert_eq!(t.degree(node(1)), 2);
        assert_eq!(t.child(node(1), 2), Some(node(5)));
        assert_eq!(t.numleaves(node(1)), 3);
        assert_eq!(
            t.level_ancestor(node(4), t.depth(node(4)) - 1),
            Some(node(2))
        );
        assert_eq!(t.intselect(2), Some(node(2)));
        assert_eq!(t.num_internal(), 2);
    }

    #[test]
    fn rejects_unbalanced() {
        assert!(ParenTree::from_parens("(()").is_err());
        assert!(ParenTree::from_parens("()()").is_err());
        assert!(ParenTree::from_parens(")(").is_err());
    }

    #[test]
    fn single_node() {
        let t = ParenTree::from_parens("()").unwrap();
        assert!(t.is_leaf(0));
        assert_eq!(t.leafrank(0), 0);
        assert_eq!(t.numleaves(0), 1);
        assert_eq!(t.parent(0), None);
        assert_eq!(t.degree(0), 0);
    }

    #[test]
    fn exhaustive_small_random_trees() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 1..=300 {
            check(&random_tree(&mut rng, n, n % 2 == 0));
        }
        for _ in 0..4 {
            check(&random_tree(&mut rng, 1000, false));
            check(&random_tree(&mut rng, 1000, true));
        }
    }

    #[test]
    fn wide_and_deep_trees() {
        // star: exercises degree/child across many min-max blocks
        let star = Oracle::from_parent((0..5000).map(|v| (v > 0).then_some(0)).collect());
        check(&star);
        // path
        let path = Oracle::from_parent((0..3000usize).map(|v| v.checked_sub(1)).collect());
        check(&path);
    }

    #[test]
    fn large_random_tree_spot_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let o = random_tree(&mut rng, 100_000, true);
        let t = ParenTree::new(BitVec::from_bits(o.bits())).unwrap();
        for _ in 0..20_000 {
            let v = rng.gen_range(0..o.parent.len());
            let x = o.pos[v];
            assert_eq!(t.parent(x), o.parent[v].map(|p| o.pos[p]));
            assert_eq!(t.degree(x), o.children[v].len());
            if !o.children[v].is_empty() {
                let k = rng.gen_range(0..o.children[v].len());
                assert_eq!(t.child(x, k + 1), Some(o.pos[o.children[v][k]]));
            }
            if o.depth[v] >= 1 {
                let mut a = v;
                for _ in 0..o.depth[v] - 1 {
                    a = o.parent[a].unwrap();
                }
                assert_eq!(t.level_ancestor(x, o.depth[v] - 1), Some(o.pos[a]));
            }
        }
    }
}
