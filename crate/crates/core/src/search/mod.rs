//! Pattern search.
//!
//! An occurrence of `P` is *primary* when it spans more than one child of
//! the grammar-tree node where it first appears; every other occurrence is
//! a copy of some primary one. For each split `P = P1 · P2` the rows whose
//! expansions end with `P1` and the columns whose expansions start with
//! `P2` are found by binary search, and grid range reporting yields the
//! primary occurrences. Each is then tracked up the tree, branching into
//! every other leaf that carries the same rule.

mod patricia;

pub use patricia::Patricia;

use rustc_hash::FxHashMap;
use std::cmp::Ordering;

use crate::extract::Expansion;
use crate::index::GrammarIndex;
use crate::succinct::ParenTree;
use crate::{Error, Result};

/// How row and column intervals are found.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RangeSearch {
    /// Binary search over all rows or columns.
    Binary,
    /// Sampled Patricia trees narrowing a binary search; needs
    /// [`GrammarIndex::set_patricia`].
    Patricia,
}

/// Counters collected by [`GrammarIndex::locate_with_stats`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LocateStats {
    /// Pattern splits examined.
    pub splits: usize,
    /// Seeds handed to the tracking phase.
    pub seeds: usize,
    /// Text positions of the primary occurrences, in the order found.
    pub primary: Vec<u64>,
    /// Positions emitted by tracking, before sorting.
    pub emitted: usize,
    /// Emitted positions that repeat an earlier one.
    pub duplicates: usize,
    /// Parent moves made while tracking.
    pub climb_steps: usize,
}

/// First index in `lo..hi` where the monotone `pred` holds, or `hi`.
fn first_true(mut lo: usize, mut hi: usize, pred: impl Fn(usize) -> bool) -> usize {
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

/// Sorted-list interval of strings having `q` as a prefix. `key(i)` returns
/// the first `|q|` bytes of string `i`; `bounds` optionally narrows the
/// search to sample gaps of width `k`.
fn prefix_interval(
    count: usize,
    q: &[u8],
    key: impl Fn(usize) -> Vec<u8>,
    sampled: Option<(usize, (usize, usize))>,
) -> Option<(usize, usize)> {
    let cmp = |i: usize| key(i).as_slice().cmp(q);
    let (lower, upper) = match sampled {
        None => (
            first_true(0, count, |i| cmp(i) != Ordering::Less),
            first_true(0, count, |i| cmp(i) == Ordering::Greater),
        ),
        Some((k, (lt, le))) => {
            let gap = |s: usize| (if s == 0 { 0 } else { (s - 1) * k + 1 }, (s * k).min(count));
            let (a, b) = gap(lt);
            let (c, d) = gap(le);
            (
                first_true(a, b, |i| cmp(i) != Ordering::Less),
                first_true(c, d, |i| cmp(i) == Ordering::Greater),
            )
        }
    };
    (lower < upper).then(|| (lower, upper - 1))
}

impl GrammarIndex {
    /// Sorted 0-based positions of every occurrence of `pattern`.
    ///
    /// ```
    /// use gindex::{GrammarIndex, IndexOptions};
    ///
    /// let ix = GrammarIndex::build(b"abab", &IndexOptions::default())?;
    /// assert_eq!(ix.locate(b"ab")?, vec![0, 2]);
    /// assert_eq!(ix.locate(b"ba")?, vec![1]);
    /// assert!(ix.locate(b"c")?.is_empty());
    /// # Ok::<(), gindex::Error>(())
    /// ```
    ///
    /// # Errors
    /// [`Error::EmptyPattern`] for an empty pattern.
    pub fn locate(&self, pattern: &[u8]) -> Result<Vec<u64>> {
        Ok(self.locate_with_stats(pattern)?.0)
    }

    /// Number of occurrences of `pattern`.
    pub fn count(&self, pattern: &[u8]) -> Result<usize> {
        Ok(self.locate(pattern)?.len())
    }

    /// [`locate`](Self::locate) along with search counters.
    pub fn locate_with_stats(&self, pattern: &[u8]) -> Result<(Vec<u64>, LocateStats)> {
        let mut stats = LocateStats::default();
        let seeds = self.primary_occurrences_inner(pattern, self.default_search(), &mut stats)?;
        stats.seeds = seeds.len();
        stats.primary = seeds
            .iter()
            .map(|&(v, l)| (self.start(v) as i64 + l) as u64)
            .collect();
        let mut out = self.track(&seeds, &mut stats);
        stats.emitted = out.len();
        out.sort_unstable();
        out.dedup();
        stats.duplicates = stats.emitted - out.len();
        Ok((out, stats))
    }

    fn default_search(&self) -> RangeSearch {
        if self.patricia.is_some() {
            RangeSearch::Patricia
        } else {
            RangeSearch::Binary
        }
    }

    /// Grammar-tree nodes and offsets of the primary occurrences of a
    /// pattern of length at least 2: for each, the occurrence starts `-l`
    /// bytes before the node's expansion. For a single byte, every leaf
    /// carrying its terminal rule with offset 0.
    pub fn primary_occurrences(&self, pattern: &[u8]) -> Result<Vec<(usize, i64)>> {
        self.primary_occurrences_inner(pattern, self.default_search(), &mut LocateStats::default())
    }

    fn primary_occurrences_inner(
        &self,
        pattern: &[u8],
        how: RangeSearch,
        stats: &mut LocateStats,
    ) -> Result<Vec<(usize, i64)>> {
        if pattern.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let mut seeds = Vec::new();
        if pattern.len() as u64 > self.n || pattern.iter().any(|&b| self.terminal_rule(b).is_none())
        {
            return Ok(seeds);
        }
        if pattern.len() == 1 {
            let x = self.terminal_rule(pattern[0]).unwrap();
            seeds.extend(self.leaves_labeled(x).map(|v| (v, 0)));
            return Ok(seeds);
        }
        let t = self.tree();
        for i in 1..pattern.len() {
            stats.splits += 1;
            let Some((r1, r2)) = self.row_range_with(&pattern[..i], how)? else {
                continue;
            };
            let Some((c1, c2)) = self.col_range_with(&pattern[i..], how)? else {
                continue;
            };
            self.grid.report_with(r1, r2, c1, c2, |p| {
                let v = t.node(p.label as usize).expect("grid labels are nodes");
                seeds.push((v, -(i as i64)));
            })?;
        }
        Ok(seeds)
    }

    /// Tracks seeds `(v, l)` to the root and returns every text position
    /// found, unsorted. What a climb learns about a node (its parent, the
    /// offset shift and the parent's other copies) is kept for the rest of
    /// the call, since many occurrences climb through the same nodes.
    fn track(&self, seeds: &[(usize, i64)], stats: &mut LocateStats) -> Vec<u64> {
        struct Step {
            parent: usize,
            shift: i64,
            copies: Vec<usize>,
        }
        let t = self.tree();
        let mut memo: FxHashMap<usize, Step> = FxHashMap::default();
        let mut out = Vec::new();
        let mut stack: Vec<(usize, i64)> = seeds.to_vec();
        while let Some((mut v, mut l)) = stack.pop() {
            while v != ParenTree::ROOT {
                let step = memo.entry(v).or_insert_with(|| {
                    let pv = t.parent(v).expect("non-root node");
                    let copies = if pv == ParenTree::ROOT {
                        Vec::new()
                    } else {
                        self.leaves_labeled(self.symbol(pv)).collect()
                    };
                    Step {
                        parent: pv,
                        shift: self.start(v) as i64 - self.start(pv) as i64,
                        copies,
                    }
                });
                l += step.shift;
                stats.climb_steps += 1;
                v = step.parent;
                stack.extend(step.copies.iter().map(|&c| (c, l)));
            }
            out.push(l as u64);
        }
        out
    }

    /// Sorted text positions reached from seeds `(v, l)`, each standing for
    /// an occurrence `l` bytes from the start of node `v`, together with
    /// all its copies.
    pub fn track_secondary(&self, seeds: &[(usize, i64)]) -> Result<Vec<u64>> {
        if let Some(&(v, _)) = seeds.iter().find(|&&(v, _)| !self.tree().is_node(v)) {
            return Err(Error::InvalidNode(v as u64));
        }
        let mut out = self.track(seeds, &mut LocateStats::default());
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }

    /// Rows (1-based, inclusive) whose rule expansions end with `p1`. The
    /// start rule is not a row and is left out of the search.
    ///
    /// ```
    /// use gindex::{GrammarIndex, IndexOptions};
    ///
    /// let ix = GrammarIndex::build(b"abab", &IndexOptions::default())?;
    /// assert_eq!(ix.row_range(b"b")?, Some((2, 3)));
    /// assert_eq!(ix.row_range(b"bb")?, None);
    /// # Ok::<(), gindex::Error>(())
    /// ```
    pub fn row_range(&self, p1: &[u8]) -> Result<Option<(u64, u64)>> {
        self.row_range_with(p1, self.default_search())
    }

    pub fn row_range_with(&self, p1: &[u8], how: RangeSearch) -> Result<Option<(u64, u64)>> {
        if p1.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let exp = self.expansion_method();
        let start = self.start_rule();
        let q: Vec<u8> = p1.iter().rev().copied().collect();
        let key = |i: usize| -> Vec<u8> {
            let mut s = self.expand_suffix_inner(self.row_rule(i, start), q.len(), exp);
            s.reverse();
            s
        };
        let sampled = self.sampled(how, |p| {
            (
                p.sample_rate(),
                p.rows.bounds(&q, |s| key(s * p.sample_rate())),
            )
        })?;
        Ok(
            prefix_interval(self.g() - 1, &q, key, sampled).map(|(a, b)| {
                (
                    self.row_rule(a, start) as u64,
                    self.row_rule(b, start) as u64,
                )
            }),
        )
    }

    /// Columns (1-based, inclusive) whose expansions start with `p2`.
    pub fn col_range(&self, p2: &[u8]) -> Result<Option<(usize, usize)>> {
        self.col_range_with(p2, self.default_search())
    }

    pub fn col_range_with(&self, p2: &[u8], how: RangeSearch) -> Result<Option<(usize, usize)>> {
        if p2.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let exp = self.expansion_method();
        let key = |i: usize| -> Vec<u8> {
            self.expand_column_prefix_with(self.grid.label(i + 1), p2.len(), exp)
                .expect("grid labels are non-root nodes")
        };
        let sampled = self.sampled(how, |p| {
            (
                p.sample_rate(),
                p.cols.bounds(p2, |s| key(s * p.sample_rate())),
            )
        })?;
        Ok(prefix_interval(self.grid.num_cols(), p2, key, sampled).map(|(a, b)| (a + 1, b + 1)))
    }

    fn sampled(
        &self,
        how: RangeSearch,
        f: impl FnOnce(&Patricia) -> (usize, (usize, usize)),
    ) -> Result<Option<(usize, (usize, usize))>> {
        match how {
            RangeSearch::Binary => Ok(None),
            RangeSearch::Patricia => self
                .patricia
                .as_ref()
                .map(|p| Some(f(p)))
                .ok_or(Error::TrieDisabled("Patricia search")),
        }
    }

    fn expansion_method(&self) -> Expansion {
        if self.tries.is_some() {
            Expansion::Trie
        } else {
            Expansion::Leaves
        }
    }

    fn expand_suffix_inner(&self, x: u32, len: usize, how: Expansion) -> Vec<u8> {
        self.expand_suffix_with(x, len, how).expect("valid rule").0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::{preprocess, repair};
    use crate::index::IndexOptions;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e1() -> GrammarIndex {
        GrammarIndex::build(b"abab", &IndexOptions::default()).unwrap()
    }

    fn scan(t: &[u8], p: &[u8]) -> Vec<u64> {
        (0..t.len().saturating_sub(p.len() - 1))
            .filter(|&i| t[i..].starts_with(p))
            .map(|i| i as u64)
            .collect()
    }

    #[test]
    fn e1_locate() {
        let ix = e1();
        assert_eq!(ix.locate(b"ba").unwrap(), vec![1]);
        assert_eq!(ix.locate(b"ab").unwrap(), vec![0, 2]);
        assert_eq!(ix.locate(b"a").unwrap(), vec![0, 2]);
        assert_eq!(ix.locate(b"b").unwrap(), vec![1, 3]);
        assert!(ix.locate(b"c").unwrap().is_empty());
        assert!(ix.locate(b"ababa").unwrap().is_empty());
        assert_eq!(ix.count(b"ab").unwrap(), 2);
        assert_eq!(ix.count(b"abab").unwrap(), 1);
        assert_eq!(ix.count(b"x").unwrap(), 0);
        assert!(matches!(ix.locate(b""), Err(Error::EmptyPattern)));
    }

    #[test]
    fn e1_ranges() {
        let ix = e1();
        assert_eq!(ix.row_range(b"b").unwrap(), Some((2, 3)));
        assert_eq!(ix.row_range(b"a").unwrap(), Some((1, 1)));
        assert_eq!(ix.row_range(b"bb").unwrap(), None);
        assert_eq!(ix.col_range(b"a").unwrap(), Some((1, 1)));
        assert_eq!(ix.col_range(b"b").unwrap(), Some((2, 2)));
        assert_eq!(ix.col_range(b"ba").unwrap(), None);
    }

    #[test]
    fn e1_primary_and_tracking() {
        let ix = e1();
        let t = ix.tree();
        let pre = |v: Vec<(usize, i64)>| {
            v.into_iter()
                .map(|(v, l)| (t.preorder(v), l))
                .collect::<Vec<_>>()
        };
        assert_eq!(pre(ix.primary_occurrences(b"ba").unwrap()), vec![(5, -1)]);
        assert_eq!(pre(ix.primary_occurrences(b"ab").unwrap()), vec![(4, -1)]);
        assert_eq!(pre(ix.primary_occurrences(b"abab").unwrap()), vec![(5, -2)]);
        let node = |p| t.node(p).unwrap();
        assert_eq!(ix.track_secondary(&[(node(4), -1)]).unwrap(), vec![0, 2]);
        assert_eq!(ix.track_secondary(&[(node(5), -1)]).unwrap(), vec![1]);
        // node 2 is a child of the root with no copies above it
        assert_eq!(ix.track_secondary(&[(node(2), 1)]).unwrap(), vec![1]);
    }

    #[test]
    fn e1_patricia_k2() {
        let mut ix = e1();
        assert!(ix.row_range_with(b"b", RangeSearch::Patricia).is_err());
        ix.set_patricia(Some(2)).unwrap();
        assert_eq!(
            ix.row_range_with(b"b", RangeSearch::Patricia).unwrap(),
            Some((2, 3))
        );
        assert_eq!(ix.locate(b"ab").unwrap(), vec![0, 2]);
        assert!(matches!(
            ix.set_patricia(Some(0)),
            Err(Error::ZeroSampleRate)
        ));
    }

    type Ranges = (Option<(u64, u64)>, Option<(usize, usize)>);

    /// Materialize every row and column string and scan them.
    fn ranges_by_scan(text: &[u8], ix: &GrammarIndex, p: &[u8]) -> Ranges {
        let pg = preprocess(repair(text).unwrap());
        let rows: Vec<u64> = (1..=pg.g() as u32)
            .filter(|&x| x != pg.start() && pg.expand(x).unwrap().ends_with(p))
            .map(u64::from)
            .collect();
        let t = ix.tree();
        let cols: Vec<usize> = (1..=ix.grid().num_cols())
            .filter(|&c| {
                let u = t.node(ix.grid().label(c) as usize).unwrap();
                let pv = t.parent(u).unwrap();
                text[ix.start(u)..ix.end(pv)].starts_with(p)
            })
            .collect();
        let span = |v: &[u64]| v.first().map(|&a| (a, *v.last().unwrap()));
        let r = span(&rows);
        let c = span(&cols.iter().map(|&c| c as u64).collect::<Vec<_>>())
            .map(|(a, b)| (a as usize, b as usize));
        if let Some((a, b)) = r {
            let inside = (a..=b).filter(|&x| x != pg.start() as u64).count();
            assert_eq!(rows.len(), inside, "rows not contiguous");
        }
        if let Some((a, b)) = c {
            assert_eq!(cols.len(), b - a + 1, "columns not contiguous");
        }
        (r, c)
    }

    fn repetitive(rng: &mut ChaCha8Rng, sigma: u8) -> Vec<u8> {
        let base: Vec<u8> = (0..rng.gen_range(1..40))
            .map(|_| b'a' + rng.gen_range(0..sigma))
            .collect();
        let mut t = Vec::new();
        for _ in 0..rng.gen_range(1..8) {
            for &b in &base {
                t.push(if rng.gen_bool(0.05) {
                    b'a' + rng.gen_range(0..sigma)
                } else {
                    b
                });
            }
        }
        t
    }

    #[test]
    fn random_texts_against_scans() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for round in 0..60 {
            let sigma = 1 + (round % 4) as u8;
            let text = repetitive(&mut rng, sigma);
            let mut ix = GrammarIndex::build(&text, &IndexOptions::default()).unwrap();
            if round % 2 == 1 {
                ix.set_tries(true);
            }
            for _ in 0..30 {
                let m = rng.gen_range(1..8usize);
                let p: Vec<u8> = if rng.gen_bool(0.5) && text.len() >= m {
                    let s = rng.gen_range(0..=text.len() - m);
                    text[s..s + m].to_vec()
                } else {
                    (0..m).map(|_| b'a' + rng.gen_range(0..sigma + 1)).collect()
                };
                let want = scan(&text, &p);
                let (got, st) = ix.locate_with_stats(&p).unwrap();
                assert_eq!(got, want, "{text:?} {p:?}");
                assert_eq!(st.duplicates, 0);
                assert!(st.climb_steps <= 4 * (st.splits + want.len()));
                let (r, c) = ranges_by_scan(&text, &ix, &p);
                assert_eq!(ix.row_range(&p).unwrap(), r);
                assert_eq!(ix.col_range(&p).unwrap(), c);
                if p.len() >= 2 {
                    // primary occurrences cross a phrase boundary of their node, once each
                    let mut prim = st.primary.clone();
                    prim.sort_unstable();
                    let len = prim.len();
                    prim.dedup();
                    assert_eq!(prim.len(), len);
                }
            }
        }
    }

    #[test]
    fn patricia_matches_binary_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for round in 0..30 {
            let text = repetitive(&mut rng, 1 + (round % 3) as u8);
            let mut ix = GrammarIndex::build(&text, &IndexOptions::default()).unwrap();
            for k in [1, 2, 4, 8, 16, 32, 64] {
                ix.set_patricia(Some(k)).unwrap();
                for _ in 0..20 {
                    let m = rng.gen_range(1..6usize);
                    let p: Vec<u8> = (0..m).map(|_| b'a' + rng.gen_range(0..4)).collect();
                    assert_eq!(
                        ix.row_range_with(&p, RangeSearch::Patricia).unwrap(),
                        ix.row_range_with(&p, RangeSearch::Binary).unwrap()
                    );
                    assert_eq!(
                        ix.col_range_with(&p, RangeSearch::Patricia).unwrap(),
                        ix.col_range_with(&p, RangeSearch::Binary).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn single_symbol_texts() {
        for n in 1..40 {
            let text = vec![b'z'; n];
            let ix = GrammarIndex::build(&text, &IndexOptions::default()).unwrap();
            for m in 1..=n + 1 {
                assert_eq!(
                    ix.locate(&vec![b'z'; m]).unwrap(),
                    scan(&text, &vec![b'z'; m]),
                    "n={n} m={m}"
                );
            }
        }
    }
}
