//! Substring extraction and prefix/suffix expansion of rules.
//!
//! The leaves of the grammar tree cut the text into phrases, and the leaves
//! inside the subtree of a node cut its expansion the same way. Expanding
//! anything therefore means walking a run of consecutive leaves, descending
//! into the definition of every nonterminal leaf met on the way. A stack of
//! `(next leaf, end leaf)` frames holds the runs still open.
//!
//! The optional path tries give a second way to expand prefixes and
//! suffixes. In the leftmost trie the parent of `X` is the first symbol of
//! its right-hand side, so the path from `X` up to the root lists the
//! leftmost path of the parse tree of `X`, ending at its first terminal.
//! The expansion of `X` is that terminal followed by the rule tails met
//! while walking back down the path; the rightmost trie does the same from
//! the other end.

use crate::index::GrammarIndex;
use crate::serial::{Reader, Writer};
use crate::succinct::{BitVec, ParenTree, PermInv};
use crate::{Error, Result};

/// How [`GrammarIndex::extract_with`] finds the leaf covering a position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Descent {
    /// Rank on the phrase bitmap: one query per level.
    #[default]
    RankOnL,
    /// Binary search over the children of each node on the way down.
    ChildSearch,
}

/// How prefixes and suffixes of rules are expanded.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expansion {
    /// Walk the leaves of the definition.
    Leaves,
    /// Walk the path tries; needs an index built with `with_trie`.
    Trie,
}

/// One of the two path tries. Node labels are a permutation of `1..=g`.
#[derive(Clone, Debug, PartialEq)]
pub struct PathTrie {
    tree: ParenTree,
    /// Label of the node with preorder `p` is `labels.apply(p - 1)`.
    labels: PermInv,
}

impl PathTrie {
    /// `parent[x - 1]` is the trie parent of `x`, 0 for the root.
    fn new(parent: &[u32], perm_step: usize) -> Self {
        let g = parent.len();
        let mut children: Vec<Vec<u32>> = vec![Vec::new(); g + 1];
        for (i, &p) in parent.iter().enumerate() {
            children[p as usize].push(i as u32 + 1);
        }
        let mut bits = Vec::with_capacity(2 * (g + 1));
        let mut labels = Vec::with_capacity(g);
        // (node, next child)
        let mut stack = vec![(0u32, 0usize)];
        bits.push(true);
        while let Some(&mut (x, ref mut k)) = stack.last_mut() {
            if let Some(&c) = children[x as usize].get(*k) {
                *k += 1;
                bits.push(true);
                labels.push(c as u64);
                stack.push((c, 0));
            } else {
                bits.push(false);
                stack.pop();
            }
        }
        PathTrie {
            tree: ParenTree::new(BitVec::from_bits(bits)).expect("DFS output is balanced"),
            labels: PermInv::new(&labels, perm_step).expect("every rule appears once"),
        }
    }

    pub fn tree(&self) -> &ParenTree {
        &self.tree
    }

    /// The trie node labeled `x`.
    pub fn node_of(&self, x: u32) -> usize {
        self.tree
            .node(self.labels.inverse(x as usize) + 1)
            .expect("label is present")
    }

    /// The label of non-root node `v`.
    pub fn label(&self, v: usize) -> u32 {
        self.labels.apply(self.tree.preorder(v) - 1) as u32
    }

    pub fn size_in_bits(&self) -> usize {
        self.tree.size_in_bits() + self.labels.size_in_bits()
    }

    fn write(&self, w: &mut Writer) {
        self.tree.write(w);
        self.labels.write(w);
    }

    fn read(r: &mut Reader, g: usize) -> Result<Self> {
        let tree = ParenTree::read(r)?;
        let labels = PermInv::read(r)?;
        if tree.num_nodes() != g + 1 || labels.len() != g {
            return Err(Error::Format(
                "path trie size does not match the grammar".into(),
            ));
        }
        Ok(PathTrie { tree, labels })
    }
}

/// The leftmost and rightmost path tries.
#[derive(Clone, Debug, PartialEq)]
pub struct PathTries {
    pub left: PathTrie,
    pub right: PathTrie,
}

impl PathTries {
    pub(crate) fn build(ix: &GrammarIndex) -> Self {
        let g = ix.g();
        let mut left = vec![0u32; g];
        let mut right = vec![0u32; g];
        for x in 1..=g as u32 {
            if !ix.is_terminal(x) {
                let v = ix.def_node(x);
                let t = ix.tree();
                left[x as usize - 1] = ix.symbol(t.first_child(v).unwrap());
                right[x as usize - 1] = ix.symbol(t.last_child(v).unwrap());
            }
        }
        let step = ix.pi.step();
        PathTries {
            left: PathTrie::new(&left, step),
            right: PathTrie::new(&right, step),
        }
    }

    pub fn size_in_bits(&self) -> usize {
        self.left.size_in_bits() + self.right.size_in_bits()
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        self.left.write(w);
        self.right.write(w);
    }

    pub(crate) fn read(r: &mut Reader, g: usize) -> Result<Self> {
        Ok(PathTries {
            left: PathTrie::read(r, g)?,
            right: PathTrie::read(r, g)?,
        })
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dir {
    /// Prefixes, left to right.
    Fwd,
    /// Suffixes, right to left.
    Bwd,
}

enum Task {
    /// Expand a whole symbol.
    Sym(u32),
    /// Emit the tail of the path node at depth `k` of trie node `v` (depth
    /// `d`), then the deeper ones.
    Path { v: usize, k: usize, d: usize },
    /// Expand grammar-tree node `c` and its siblings in the walking
    /// direction.
    Sibs(usize),
}

impl GrammarIndex {
    /// `T[pos..pos + len]`.
    ///
    /// ```
    /// use gindex::{GrammarIndex, IndexOptions};
    ///
    /// let ix = GrammarIndex::build(b"abab", &IndexOptions::default())?;
    /// assert_eq!(ix.extract(1, 2)?, b"ba");
    /// assert!(ix.extract(3, 2).is_err());
    /// # Ok::<(), gindex::Error>(())
    /// ```
    pub fn extract(&self, pos: u64, len: u64) -> Result<Vec<u8>> {
        self.extract_with(pos, len, Descent::RankOnL)
    }

    pub fn extract_with(&self, pos: u64, len: u64, descent: Descent) -> Result<Vec<u8>> {
        let end = pos
            .checked_add(len)
            .filter(|&e| e <= self.n)
            .ok_or(Error::OutOfRange {
                start: pos,
                end: pos.saturating_add(len),
                len: self.n,
            })?;
        let mut out = Vec::with_capacity(len as usize);
        if pos == end {
            return Ok(out);
        }
        let t = self.tree();
        let mut frames = Vec::new();
        let mut scope_end = t.num_leaves();
        let mut scope = ParenTree::ROOT;
        let mut p = pos as usize;
        loop {
            let j = match descent {
                Descent::RankOnL => self.l.rank1(p + 1) - 1,
                Descent::ChildSearch => t.leafrank(self.leaf_covering(scope, p)),
            };
            let x = self.xprime.access(j) as u32;
            let s = self.leaf_start(j);
            if p == s || self.is_terminal(x) {
                frames.push((j, scope_end));
                break;
            }
            frames.push((j + 1, scope_end));
            let w = self.def_node(x);
            p = p - s + self.start(w);
            scope = w;
            scope_end = t.leafrank(w) + t.numleaves(w);
        }
        self.walk_leaves(frames, len as usize, Dir::Fwd, &mut out, &mut 0);
        Ok(out)
    }

    /// The leaf below `v` whose expansion covers text position `p`, by
    /// binary search over children.
    fn leaf_covering(&self, mut v: usize, p: usize) -> usize {
        let t = self.tree();
        while !t.is_leaf(v) {
            let (mut lo, mut hi) = (1, t.degree(v));
            while lo < hi {
                let mid = (lo + hi).div_ceil(2);
                if self.start(t.child(v, mid).unwrap()) <= p {
                    lo = mid;
                } else {
                    hi = mid - 1;
                }
            }
            v = t.child(v, lo).unwrap();
        }
        v
    }

    /// Expands runs of leaves given as `(next, end)` frames (the top frame
    /// is walked first), stopping after `budget` bytes. Backward frames are
    /// walked from `end - 1` down to `next`, emitting reversed bytes.
    fn walk_leaves(
        &self,
        mut frames: Vec<(usize, usize)>,
        budget: usize,
        dir: Dir,
        out: &mut Vec<u8>,
        steps: &mut usize,
    ) {
        let t = self.tree();
        let stop = out.len() + budget;
        while out.len() < stop {
            let Some(top) = frames.last_mut() else { break };
            if top.0 == top.1 {
                frames.pop();
                continue;
            }
            *steps += 1;
            let j = match dir {
                Dir::Fwd => {
                    top.0 += 1;
                    top.0 - 1
                }
                Dir::Bwd => {
                    top.1 -= 1;
                    top.1
                }
            };
            let x = self.xprime.access(j) as u32;
            if self.is_terminal(x) {
                out.push(self.terminal_byte(x));
            } else {
                let w = self.def_node(x);
                let lr = t.leafrank(w);
                frames.push((lr, lr + t.numleaves(w)));
            }
        }
    }

    /// Same as [`walk_leaves`](Self::walk_leaves), driven by the path tries.
    fn walk_trie(
        &self,
        first: Task,
        budget: usize,
        dir: Dir,
        out: &mut Vec<u8>,
        steps: &mut usize,
    ) {
        let tries = self.tries.as_ref().expect("caller checked");
        let trie = match dir {
            Dir::Fwd => &tries.left,
            Dir::Bwd => &tries.right,
        };
        let tt = trie.tree();
        let t = self.tree();
        let stop = out.len() + budget;
        let mut stack = vec![first];
        while out.len() < stop {
            let Some(task) = stack.pop() else { break };
            *steps += 1;
            match task {
                Task::Sym(x) => {
                    let v = trie.node_of(x);
                    let d = tt.depth(v);
                    let a = trie.label(tt.level_ancestor(v, d - 1).unwrap());
                    out.push(self.terminal_byte(a));
                    if d >= 2 {
                        stack.push(Task::Path { v, k: 2, d });
                    }
                }
                Task::Path { v, k, d } => {
                    let y = trie.label(tt.level_ancestor(v, d - k).unwrap());
                    if k < d {
                        stack.push(Task::Path { v, k: k + 1, d });
                    }
                    let w = self.def_node(y);
                    let c = match dir {
                        Dir::Fwd => t.child(w, 2),
                        Dir::Bwd => t.prev_sibling(t.last_child(w).unwrap()),
                    };
                    stack.push(Task::Sibs(c.expect("rules have two or more symbols")));
                }
                Task::Sibs(c) => {
                    let next = match dir {
                        Dir::Fwd => t.next_sibling(c),
                        Dir::Bwd => t.prev_sibling(c),
                    };
                    if let Some(s) = next {
                        stack.push(Task::Sibs(s));
                    }
                    stack.push(Task::Sym(self.symbol(c)));
                }
            }
        }
    }

    fn check_method(&self, how: Expansion, what: &'static str) -> Result<()> {
        if how == Expansion::Trie && self.tries.is_none() {
            return Err(Error::TrieDisabled(what));
        }
        Ok(())
    }

    /// Default expansion method: the tries when present.
    fn default_method(&self) -> Expansion {
        if self.tries.is_some() {
            Expansion::Trie
        } else {
            Expansion::Leaves
        }
    }

    fn expand_symbol(
        &self,
        x: u32,
        len: usize,
        how: Expansion,
        dir: Dir,
        steps: &mut usize,
    ) -> Result<Vec<u8>> {
        self.check_symbol(x)?;
        let mut out = Vec::new();
        if len == 0 {
            return Ok(out);
        }
        match how {
            Expansion::Trie => self.walk_trie(Task::Sym(x), len, dir, &mut out, steps),
            Expansion::Leaves if self.is_terminal(x) => {
                *steps += 1;
                out.push(self.terminal_byte(x));
            }
            Expansion::Leaves => {
                let t = self.tree();
                let w = self.def_node(x);
                let lr = t.leafrank(w);
                self.walk_leaves(vec![(lr, lr + t.numleaves(w))], len, dir, &mut out, steps);
            }
        }
        if dir == Dir::Bwd {
            out.reverse();
        }
        Ok(out)
    }

    /// The first `min(len, |F(x)|)` bytes of the expansion of rule `x`.
    ///
    /// ```
    /// use gindex::{GrammarIndex, IndexOptions};
    ///
    /// let ix = GrammarIndex::build(b"abab", &IndexOptions::default())?;
    /// assert_eq!(ix.expand_prefix(4, 3)?, b"aba");
    /// assert_eq!(ix.expand_suffix(4, 2)?, b"ab");
    /// # Ok::<(), gindex::Error>(())
    /// ```
    pub fn expand_prefix(&self, x: u32, len: usize) -> Result<Vec<u8>> {
        self.expand_symbol(x, len, self.default_method(), Dir::Fwd, &mut 0)
    }

    /// The last `min(len, |F(x)|)` bytes of the expansion of rule `x`.
    pub fn expand_suffix(&self, x: u32, len: usize) -> Result<Vec<u8>> {
        self.expand_symbol(x, len, self.default_method(), Dir::Bwd, &mut 0)
    }

    /// [`expand_prefix`](Self::expand_prefix) with an explicit method,
    /// also returning the number of expansion steps taken.
    pub fn expand_prefix_with(
        &self,
        x: u32,
        len: usize,
        how: Expansion,
    ) -> Result<(Vec<u8>, usize)> {
        self.check_method(how, "the path trie")?;
        let mut steps = 0;
        let out = self.expand_symbol(x, len, how, Dir::Fwd, &mut steps)?;
        Ok((out, steps))
    }

    /// [`expand_suffix`](Self::expand_suffix) with an explicit method.
    pub fn expand_suffix_with(
        &self,
        x: u32,
        len: usize,
        how: Expansion,
    ) -> Result<(Vec<u8>, usize)> {
        self.check_method(how, "the path trie")?;
        let mut steps = 0;
        let out = self.expand_symbol(x, len, how, Dir::Bwd, &mut steps)?;
        Ok((out, steps))
    }

    /// The first `len` bytes of the expansion of grid label `label` (a
    /// grammar-tree preorder) followed by its right siblings; shorter if the
    /// rule ends first.
    pub fn expand_column_prefix(&self, label: u64, len: usize) -> Result<Vec<u8>> {
        self.expand_column_prefix_with(label, len, self.default_method())
    }

    pub fn expand_column_prefix_with(
        &self,
        label: u64,
        len: usize,
        how: Expansion,
    ) -> Result<Vec<u8>> {
        self.check_method(how, "the path trie")?;
        let t = self.tree();
        let u = usize::try_from(label)
            .ok()
            .filter(|&p| p >= 2)
            .and_then(|p| t.node(p))
            .ok_or(Error::InvalidNode(label))?;
        let mut out = Vec::new();
        if len == 0 {
            return Ok(out);
        }
        match how {
            Expansion::Trie => self.walk_trie(Task::Sibs(u), len, Dir::Fwd, &mut out, &mut 0),
            Expansion::Leaves => {
                let p = t.parent(u).unwrap();
                let frame = (t.leafrank(u), t.leafrank(p) + t.numleaves(p));
                self.walk_leaves(vec![frame], len, Dir::Fwd, &mut out, &mut 0);
            }
        }
        Ok(out)
    }

    /// First byte of the expansion of `x`, read off the leftmost trie.
    pub fn first_terminal(&self, x: u32) -> Result<u8> {
        self.check_method(Expansion::Trie, "the path trie")?;
        self.check_symbol(x)?;
        let trie = &self.tries.as_ref().unwrap().left;
        let v = trie.node_of(x);
        let tt = trie.tree();
        Ok(self.terminal_byte(trie.label(tt.level_ancestor(v, tt.depth(v) - 1).unwrap())))
    }
}
