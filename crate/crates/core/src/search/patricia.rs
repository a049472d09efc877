//! Patricia trees over sampled row and column strings.
//!
//! Only every `k`-th string of each sorted list goes into a trie, and the
//! trie keeps no edge labels: a query descends blindly on the branching
//! bytes, reads the one sample it lands on through the index, and uses the
//! longest common prefix with that sample to decide where the pattern falls
//! among the samples. The exact boundary is then found by binary search
//! inside a gap of fewer than `k` strings.

use crate::index::GrammarIndex;
use crate::serial::{Reader, Writer};
use crate::succinct::IntVec;
use crate::{Error, Result};

/// Key of the child holding strings that end at the parent's depth; it
/// sorts before every byte.
const END: u64 = 0;

fn key_of(b: Option<u8>) -> u64 {
    b.map_or(END, |b| b as u64 + 1)
}

/// A compact trie over a sorted list of strings. Node 0 is the root.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct SampleTrie {
    strings: usize,
    /// String depth of internal nodes (0 for leaves).
    depth: IntVec,
    /// First and last sample below each node.
    lo: IntVec,
    hi: IntVec,
    /// Children of node `v` are `child_node[child_start[v]..child_start[v+1]]`.
    child_start: IntVec,
    child_key: IntVec,
    child_node: IntVec,
}

struct Node {
    depth: usize,
    lo: usize,
    hi: usize,
    leaf: bool,
    children: Vec<usize>,
}

impl SampleTrie {
    /// `len(i)` and `byte(i, d)` describe sample `i`; samples are sorted.
    fn build(
        samples: usize,
        strings: usize,
        len: impl Fn(usize) -> usize,
        byte: impl Fn(usize, usize) -> u8,
    ) -> Self {
        let at = |i: usize, d: usize| (d < len(i)).then(|| byte(i, d));
        let mut nodes = vec![Node {
            depth: 0,
            lo: 0,
            hi: 0,
            leaf: false,
            children: Vec::new(),
        }];
        let mut stack = vec![0usize];
        for i in 0..samples {
            if i > 0 {
                let (la, lb) = (len(i - 1), len(i));
                let mut l = 0;
                while l < la.min(lb) && byte(i - 1, l) == byte(i, l) {
                    l += 1;
                }
                if l == la && l == lb {
                    let top = *stack.last().unwrap();
                    nodes[top].hi = i;
                    continue;
                }
                let mut last = None;
                loop {
                    let top = *stack.last().unwrap();
                    if nodes[top].leaf || nodes[top].depth > l {
                        last = stack.pop();
                    } else {
                        break;
                    }
                }
                let top = *stack.last().unwrap();
                if nodes[top].depth < l {
                    let moved = nodes[top]
                        .children
                        .pop()
                        .expect("popped node is the last child");
                    debug_assert_eq!(Some(moved), last);
                    let id = nodes.len();
                    nodes.push(Node {
                        depth: l,
                        lo: 0,
                        hi: 0,
                        leaf: false,
                        children: vec![moved],
                    });
                    nodes[top].children.push(id);
                    stack.push(id);
                }
            }
            let top = *stack.last().unwrap();
            let id = nodes.len();
            nodes.push(Node {
                depth: 0,
                lo: i,
                hi: i,
                leaf: true,
                children: Vec::new(),
            });
            nodes[top].children.push(id);
            stack.push(id);
        }
        // Sample ranges, children before parents.
        let mut order = Vec::with_capacity(nodes.len());
        let mut st = vec![0usize];
        while let Some(v) = st.pop() {
            order.push(v);
            st.extend(nodes[v].children.iter().copied());
        }
        for &v in order.iter().rev() {
            if !nodes[v].leaf {
                if let (Some(&f), Some(&l)) = (nodes[v].children.first(), nodes[v].children.last())
                {
                    nodes[v].lo = nodes[f].lo;
                    nodes[v].hi = nodes[l].hi;
                }
            }
        }
        let mut child_start = vec![0u64];
        let mut child_key = Vec::new();
        let mut child_node = Vec::new();
        for v in &nodes {
            for &c in &v.children {
                child_key.push(key_of(at(nodes[c].lo, v.depth)));
                child_node.push(c as u64);
            }
            child_start.push(child_node.len() as u64);
        }
        SampleTrie {
            strings,
            depth: IntVec::from_slice(&nodes.iter().map(|v| v.depth as u64).collect::<Vec<_>>()),
            lo: IntVec::from_slice(&nodes.iter().map(|v| v.lo as u64).collect::<Vec<_>>()),
            hi: IntVec::from_slice(&nodes.iter().map(|v| v.hi as u64).collect::<Vec<_>>()),
            child_start: IntVec::from_slice(&child_start),
            child_key: IntVec::from_slice(&child_key),
            child_node: IntVec::from_slice(&child_node),
        }
    }

    fn samples(&self) -> usize {
        if self.lo.is_empty() || self.strings == 0 {
            0
        } else {
            self.hi.get(0) as usize + 1
        }
    }

    fn children(&self, v: usize) -> std::ops::Range<usize> {
        self.child_start.get(v) as usize..self.child_start.get(v + 1) as usize
    }

    fn is_leaf(&self, v: usize) -> bool {
        self.children(v).is_empty()
    }

    fn child(&self, v: usize, key: u64) -> Option<usize> {
        self.children(v)
            .find(|&i| self.child_key.get(i) == key)
            .map(|i| self.child_node.get(i) as usize)
    }

    fn lo(&self, v: usize) -> usize {
        self.lo.get(v) as usize
    }

    fn hi(&self, v: usize) -> usize {
        self.hi.get(v) as usize
    }

    /// Numbers of samples whose first `|q|` bytes are `< q` and `<= q`.
    /// `sample(s)` must return the first `|q|` bytes of sample `s`.
    pub(crate) fn bounds(&self, q: &[u8], sample: impl Fn(usize) -> Vec<u8>) -> (usize, usize) {
        if self.samples() == 0 {
            return (0, 0);
        }
        let depth = |v: usize| self.depth.get(v) as usize;
        let mut v = 0;
        while !self.is_leaf(v) && depth(v) < q.len() {
            match self.child(v, q[depth(v)] as u64 + 1) {
                Some(c) => v = c,
                None => break,
            }
        }
        let s = sample(self.lo(v));
        let lambda = q.iter().zip(&s).take_while(|(a, b)| a == b).count();
        if lambda == q.len() {
            let mut v = 0;
            while !self.is_leaf(v) && depth(v) < q.len() {
                v = self
                    .child(v, q[depth(v)] as u64 + 1)
                    .expect("sample lies below");
            }
            return (self.lo(v), self.hi(v) + 1);
        }
        let c = q[lambda];
        let mut v = 0;
        loop {
            if self.is_leaf(v) || depth(v) > lambda {
                // The whole subtree agrees with the sample at `lambda`.
                let below = s.get(lambda).is_some_and(|&b| c < b);
                let at = if below { self.lo(v) } else { self.hi(v) + 1 };
                return (at, at);
            }
            if depth(v) == lambda {
                let ck = c as u64 + 1;
                let at = self
                    .children(v)
                    .find(|&i| self.child_key.get(i) > ck)
                    .map_or(self.hi(v) + 1, |i| self.lo(self.child_node.get(i) as usize));
                return (at, at);
            }
            v = self
                .child(v, q[depth(v)] as u64 + 1)
                .expect("sample lies below");
        }
    }

    fn size_in_bits(&self) -> usize {
        self.depth.size_in_bits()
            + self.lo.size_in_bits()
            + self.hi.size_in_bits()
            + self.child_start.size_in_bits()
            + self.child_key.size_in_bits()
            + self.child_node.size_in_bits()
    }

    fn write(&self, w: &mut Writer) {
        w.u64(self.strings as u64);
        for v in [
            &self.depth,
            &self.lo,
            &self.hi,
            &self.child_start,
            &self.child_key,
            &self.child_node,
        ] {
            v.write(w);
        }
    }

    fn read(r: &mut Reader, strings: usize, k: usize) -> Result<Self> {
        let stored = r.len_u64()?;
        let t = SampleTrie {
            strings: stored,
            depth: IntVec::read(r)?,
            lo: IntVec::read(r)?,
            hi: IntVec::read(r)?,
            child_start: IntVec::read(r)?,
            child_key: IntVec::read(r)?,
            child_node: IntVec::read(r)?,
        };
        let nodes = t.depth.len();
        let ok = stored == strings
            && nodes >= 1
            && t.lo.len() == nodes
            && t.hi.len() == nodes
            && t.child_start.len() == nodes + 1
            && t.child_key.len() == t.child_node.len()
            && t.child_start.get(nodes) as usize == t.child_node.len()
            && t.child_start
                .iter()
                .collect::<Vec<_>>()
                .windows(2)
                .all(|w| w[0] <= w[1])
            && t.child_node.iter().all(|c| c > 0 && (c as usize) < nodes)
            && t.samples() == strings.div_ceil(k)
            && t.lo
                .iter()
                .zip(t.hi.iter())
                .all(|(a, b)| a <= b && (b as usize) < t.samples().max(1));
        if !ok {
            return Err(Error::Format("inconsistent Patricia tree".into()));
        }
        Ok(t)
    }
}

/// Row and column Patricia trees sampling every `k`-th string.
#[derive(Clone, Debug, PartialEq)]
pub struct Patricia {
    k: usize,
    pub(crate) rows: SampleTrie,
    pub(crate) cols: SampleTrie,
}

impl Patricia {
    pub(crate) fn build(ix: &GrammarIndex, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::ZeroSampleRate);
        }
        let text = ix.extract(0, ix.n())?;
        let t = ix.tree();
        // Rows: reversed expansions of X_1..X_g, as spans of the text.
        let rows_n = ix.g() - 1;
        let start = ix.start_rule();
        let row_span = |i: usize| -> (usize, usize) {
            let x = ix.row_rule(i * k, start);
            if ix.is_terminal(x) {
                (usize::MAX, 1)
            } else {
                let v = ix.def_node(x);
                (ix.end(v), ix.end(v) - ix.start(v))
            }
        };
        let row_spans: Vec<(usize, usize)> = (0..rows_n.div_ceil(k)).map(row_span).collect();
        let rows = SampleTrie::build(
            row_spans.len(),
            rows_n,
            |i| row_spans[i].1,
            |i, d| match row_spans[i] {
                (usize::MAX, _) => ix.terminal_byte(ix.row_rule(i * k, start)),
                (end, _) => text[end - 1 - d],
            },
        );
        let cols_n = ix.grid().num_cols();
        let col_spans: Vec<(usize, usize)> = (0..cols_n.div_ceil(k))
            .map(|i| {
                let u = t.node(ix.grid().label(i * k + 1) as usize).unwrap();
                let p = t.parent(u).unwrap();
                (ix.start(u), ix.end(p))
            })
            .collect();
        let cols = SampleTrie::build(
            col_spans.len(),
            cols_n,
            |i| col_spans[i].1 - col_spans[i].0,
            |i, d| text[col_spans[i].0 + d],
        );
        Ok(Patricia { k, rows, cols })
    }

    pub fn sample_rate(&self) -> usize {
        self.k
    }

    pub fn size_in_bits(&self) -> usize {
        self.rows.size_in_bits() + self.cols.size_in_bits()
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.u64(self.k as u64);
        self.rows.write(w);
        self.cols.write(w);
    }

    pub(crate) fn read(r: &mut Reader, ix: &GrammarIndex) -> Result<Self> {
        let k = r.len_u64()?;
        if k == 0 {
            return Err(Error::ZeroSampleRate);
        }
        let rows = SampleTrie::read(r, ix.g() - 1, k)?;
        let cols = SampleTrie::read(r, ix.grid().num_cols(), k)?;
        Ok(Patricia { k, rows, cols })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn trunc_cmp(s: &[u8], q: &[u8]) -> std::cmp::Ordering {
        s[..s.len().min(q.len())].cmp(q)
    }

    /// Reference counts: samples `< q` and `<= q` after truncation.
    fn oracle(samples: &[Vec<u8>], q: &[u8]) -> (usize, usize) {
        let lt = samples.iter().filter(|s| trunc_cmp(s, q).is_lt()).count();
        let le = samples.iter().filter(|s| trunc_cmp(s, q).is_le()).count();
        (lt, le)
    }

    #[test]
    fn random_sorted_lists() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..300 {
            let m = rng.gen_range(1..60);
            let sigma = rng.gen_range(1..4u8);
            let mut all: Vec<Vec<u8>> = (0..m)
                .map(|_| {
                    (0..rng.gen_range(1..8))
                        .map(|_| b'a' + rng.gen_range(0..sigma))
                        .collect()
                })
                .collect();
            all.sort();
            let trie = SampleTrie::build(all.len(), all.len(), |i| all[i].len(), |i, d| all[i][d]);
            for _ in 0..40 {
                let q: Vec<u8> = (0..rng.gen_range(1..9))
                    .map(|_| b'a' + rng.gen_range(0..sigma + 1))
                    .collect();
                let got = trie.bounds(&q, |s| all[s][..all[s].len().min(q.len())].to_vec());
                assert_eq!(got, oracle(&all, &q), "{all:?} {q:?}");
            }
        }
    }

    #[test]
    fn nested_prefixes_and_duplicates() {
        let all: Vec<Vec<u8>> = ["a", "a", "aa", "aab", "aab", "ab", "b"]
            .iter()
            .map(|s| s.as_bytes().to_vec())
            .collect();
        let trie = SampleTrie::build(all.len(), all.len(), |i| all[i].len(), |i, d| all[i][d]);
        for q in ["a", "aa", "aab", "aaba", "ab", "abc", "b", "c", "0", "aac"] {
            let q = q.as_bytes();
            let got = trie.bounds(q, |s| all[s][..all[s].len().min(q.len())].to_vec());
            assert_eq!(got, oracle(&all, q), "{q:?}");
        }
    }
}
