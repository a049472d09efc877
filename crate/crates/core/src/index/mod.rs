//! The self-index: grammar tree, leaf labels, phrase bitmap and grid.
//!
//! Given a [`PreprocessedGrammar`] with rules `X_1..X_g`, the grammar tree
//! `T_G` is its parse tree pruned so that only the first occurrence of every
//! nonterminal (in DFS order) keeps its children; later occurrences and
//! terminal rules are leaves. The tree has `G + 1` nodes, `G` being the
//! total right-hand-side length of the nonterminal rules. The index stores
//!
//! - `tree`: the topology as balanced parentheses;
//! - `xprime`: leaf labels in preorder (`X'`);
//! - `y`: a bitmap over `1..=g` marking terminal rules;
//! - `pi`: for the `k`-th nonterminal, the rank of its defining internal
//!   node among internal nodes, with fast inverse;
//! - `l`: a bitmap over text positions marking where each leaf's expansion
//!   starts (the leaves split `T` into phrases `T_1 T_2 ...`);
//! - `grid`: one point per proper rule suffix `α_i[j+1..]`, with row
//!   `α_i[j]`, columns sorted by the expansion of the suffix and labeled
//!   with the preorder of the `(j+1)`-th child of `X_i`'s definition.
//!
//! The label of an internal node is not stored: it is recovered through
//! `pi` and `y`.

use std::io::Write;
use std::path::Path;

use crate::extract::PathTries;
use crate::grammar::{PreprocessedGrammar, Rule};
use crate::search::Patricia;
use crate::serial::{self, Reader, Writer};
use crate::succinct::{LabelSeq, ParenTree, PermInv, RangeGrid, SparseBitVec};
use crate::{Error, Result};

/// Build-time choices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct IndexOptions {
    /// Build the leftmost/rightmost path tries for prefix and suffix
    /// expansion.
    pub with_trie: bool,
    /// Sample every `k`-th row and column expansion into Patricia trees to
    /// narrow the binary searches. `None` searches the plain way.
    pub patricia: Option<usize>,
    /// Sampling step of the inverse permutation.
    pub perm_step: usize,
}

impl Default for IndexOptions {
    fn default() -> Self {
        IndexOptions {
            with_trie: false,
            patricia: None,
            perm_step: 32,
        }
    }
}

/// Space used by each component, in bits.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexStats {
    pub n: u64,
    pub g: usize,
    pub sigma: usize,
    pub g_tree: usize,
    /// Grammar size as produced by the compressor, before preprocessing.
    pub raw_size: usize,
    pub height: usize,
    pub tree_bits: usize,
    pub xprime_bits: usize,
    pub y_bits: usize,
    pub pi_bits: usize,
    pub l_bits: usize,
    pub grid_bits: usize,
    pub trie_bits: usize,
    pub patricia_bits: usize,
}

impl IndexStats {
    pub fn total_bits(&self) -> usize {
        self.tree_bits
            + self.xprime_bits
            + self.y_bits
            + self.pi_bits
            + self.l_bits
            + self.grid_bits
            + self.trie_bits
            + self.patricia_bits
    }

    /// Bits per text symbol.
    pub fn bps(&self) -> f64 {
        self.total_bits() as f64 / self.n as f64
    }
}

#[derive(Clone, Debug)]
pub struct GrammarIndex {
    pub(crate) n: u64,
    pub(crate) g: usize,
    pub(crate) g_tree: usize,
    pub(crate) height: usize,
    pub(crate) raw_size: usize,
    /// Sorted alphabet; the terminal rule of rank `a` derives `alphabet[a-1]`.
    pub(crate) alphabet: Vec<u8>,
    /// Byte -> terminal rule id (0 if absent). Rebuilt on load.
    pub(crate) term_rule: [u32; 256],
    pub(crate) tree: ParenTree,
    pub(crate) xprime: LabelSeq,
    pub(crate) y: SparseBitVec,
    pub(crate) pi: PermInv,
    pub(crate) l: SparseBitVec,
    pub(crate) grid: RangeGrid,
    pub(crate) tries: Option<PathTries>,
    pub(crate) patricia: Option<Patricia>,
}

/// A grid point before column sorting; the key is `T[from..to]`.
struct Point {
    row: u64,
    label: u64,
    from: usize,
    to: usize,
}

impl GrammarIndex {
    /// Compresses `text` with RePair, preprocesses the grammar and builds
    /// the index.
    pub fn build(text: &[u8], opts: &IndexOptions) -> Result<Self> {
        let pg = PreprocessedGrammar::from_text(text)?;
        Self::from_grammar(&pg, opts)
    }

    /// Builds the index over an already preprocessed grammar.
    pub fn from_grammar(pg: &PreprocessedGrammar, opts: &IndexOptions) -> Result<Self> {
        if opts.perm_step == 0 {
            return Err(Error::ZeroSampleRate);
        }
        let g = pg.g();
        let text = pg.text();
        let lens = pg.expansion_lengths();
        let stats = pg.stats();
        let is_term: Vec<bool> = pg
            .rules()
            .iter()
            .map(|r| matches!(r, Rule::Terminal(_)))
            .collect();
        // nt_rank[x-1]: 1-based rank of x among nonterminals
        let mut nt_rank = vec![0usize; g];
        let mut k = 0;
        for x in 0..g {
            if !is_term[x] {
                k += 1;
                nt_rank[x] = k;
            }
        }

        enum Task {
            Enter {
                x: u32,
                pos: usize,
                point: Option<(u64, usize)>,
            },
            Close,
        }
        let mut bits = Vec::with_capacity(2 * (stats.g_tree + 1));
        let mut xprime = Vec::new();
        let mut leaf_starts = Vec::new();
        let mut pi = vec![0u64; k];
        let mut points = Vec::with_capacity(stats.g_tree.saturating_sub(k));
        let mut defined = vec![false; g];
        let mut preorder = 0u64;
        let mut internal = 0u64;
        let mut stack = vec![Task::Enter {
            x: pg.start(),
            pos: 0,
            point: None,
        }];
        while let Some(t) = stack.pop() {
            let Task::Enter { x, pos, point } = t else {
                bits.push(false);
                continue;
            };
            preorder += 1;
            bits.push(true);
            if let Some((row, to)) = point {
                points.push(Point {
                    row,
                    label: preorder,
                    from: pos,
                    to,
                });
            }
            let xi = x as usize - 1;
            if is_term[xi] || defined[xi] {
                bits.push(false);
                xprime.push(x as u64);
                leaf_starts.push(pos);
                continue;
            }
            defined[xi] = true;
            internal += 1;
            pi[nt_rank[xi] - 1] = internal;
            stack.push(Task::Close);
            let Rule::Nonterminal(rhs) = pg.rule(x) else {
                unreachable!()
            };
            let end = pos + lens[xi] as usize;
            let mut starts = Vec::with_capacity(rhs.len());
            let mut p = pos;
            for &c in rhs {
                starts.push(p);
                p += lens[c as usize - 1] as usize;
            }
            for j in (0..rhs.len()).rev() {
                let point = (j > 0).then(|| (rhs[j - 1] as u64, end));
                stack.push(Task::Enter {
                    x: rhs[j],
                    pos: starts[j],
                    point,
                });
            }
        }

        points.sort_by(|a, b| {
            text[a.from..a.to]
                .cmp(&text[b.from..b.to])
                .then(a.label.cmp(&b.label))
        });
        let rows: Vec<u64> = points.iter().map(|p| p.row).collect();
        let labels: Vec<u64> = points.iter().map(|p| p.label).collect();

        let alphabet = pg.alphabet();
        let term_pos: Vec<usize> = (0..g).filter(|&x| is_term[x]).collect();
        let mut ix = GrammarIndex {
            n: pg.n(),
            g,
            g_tree: stats.g_tree,
            height: stats.height,
            raw_size: stats.raw_size,
            term_rule: term_rules(&alphabet, &term_pos),
            alphabet,
            tree: ParenTree::new(crate::succinct::BitVec::from_bits(bits))?,
            xprime: LabelSeq::new(&xprime),
            y: SparseBitVec::new(g, &term_pos),
            pi: PermInv::new(&pi, opts.perm_step)?,
            l: SparseBitVec::new(text.len(), &leaf_starts),
            grid: RangeGrid::new(&rows, &labels),
            tries: None,
            patricia: None,
        };
        if opts.with_trie {
            ix.set_tries(true);
        }
        ix.set_patricia(opts.patricia)?;
        Ok(ix)
    }

    /// Text length.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Number of rules, terminal rules included.
    pub fn g(&self) -> usize {
        self.g
    }

    pub fn sigma(&self) -> usize {
        self.alphabet.len()
    }

    /// Total right-hand-side length of nonterminal rules.
    pub fn g_tree(&self) -> usize {
        self.g_tree
    }

    /// Height of the grammar's parse tree.
    pub fn height(&self) -> usize {
        self.height
    }

    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    pub fn tree(&self) -> &ParenTree {
        &self.tree
    }

    pub fn grid(&self) -> &RangeGrid {
        &self.grid
    }

    /// The options this index currently answers with.
    pub fn options(&self) -> IndexOptions {
        IndexOptions {
            with_trie: self.tries.is_some(),
            patricia: self.patricia.as_ref().map(Patricia::sample_rate),
            perm_step: self.pi.step(),
        }
    }

    /// Terminal rule deriving `b`, if `b` occurs in the text.
    pub fn terminal_rule(&self, b: u8) -> Option<u32> {
        let x = self.term_rule[b as usize];
        (x != 0).then_some(x)
    }

    pub fn is_terminal(&self, x: u32) -> bool {
        self.y.get(x as usize - 1)
    }

    /// The byte derived by terminal rule `x`.
    pub(crate) fn terminal_byte(&self, x: u32) -> u8 {
        self.alphabet[self.y.rank1(x as usize) - 1]
    }

    /// Definition node of nonterminal `x`.
    pub(crate) fn def_node(&self, x: u32) -> usize {
        let k = x as usize - self.y.rank1(x as usize);
        self.tree
            .intselect(self.pi.apply(k))
            .expect("nonterminal has a definition")
    }

    /// The start rule, labeling the root.
    pub fn start_rule(&self) -> u32 {
        self.symbol(ParenTree::ROOT)
    }

    /// The `i`-th rule (0-based) in row order once the start rule is left
    /// out: the start rule never precedes another symbol, so it is never a
    /// row of the grid.
    pub(crate) fn row_rule(&self, i: usize, start: u32) -> u32 {
        let x = i as u32 + 1;
        if x >= start {
            x + 1
        } else {
            x
        }
    }

    /// The rule labeling node `v`.
    pub fn symbol(&self, v: usize) -> u32 {
        if self.tree.is_leaf(v) {
            self.xprime.access(self.tree.leafrank(v)) as u32
        } else {
            let k = self.pi.inverse(self.tree.intrank(v) + 1);
            self.y.select0(k).expect("valid rank") as u32 + 1
        }
    }

    /// Text position of the `j`-th leaf (0-based).
    #[inline]
    pub(crate) fn leaf_start(&self, j: usize) -> usize {
        self.l.select1(j + 1).expect("leaf exists")
    }

    /// Start of the expansion of node `v` in the text.
    #[inline]
    pub(crate) fn start(&self, v: usize) -> usize {
        self.leaf_start(self.tree.leafrank(v))
    }

    /// End (exclusive) of the expansion of node `v`.
    pub(crate) fn end(&self, v: usize) -> usize {
        let k = self.tree.leafrank(v) + self.tree.numleaves(v);
        if k == self.tree.num_leaves() {
            self.n as usize
        } else {
            self.leaf_start(k)
        }
    }

    /// 0-based start of the expansion of node `v` in `T`.
    pub fn node_start(&self, v: usize) -> Result<u64> {
        if !self.tree.is_node(v) {
            return Err(Error::InvalidNode(v as u64));
        }
        Ok(self.start(v) as u64)
    }

    /// Length of the expansion of `x`.
    pub fn expansion_len(&self, x: u32) -> Result<u64> {
        self.check_symbol(x)?;
        if self.is_terminal(x) {
            return Ok(1);
        }
        let v = self.def_node(x);
        Ok((self.end(v) - self.start(v)) as u64)
    }

    pub(crate) fn check_symbol(&self, x: u32) -> Result<()> {
        if x == 0 || x as usize > self.g {
            Err(Error::InvalidSymbol(x as u64))
        } else {
            Ok(())
        }
    }

    /// Every leaf labeled `x`, in preorder.
    pub(crate) fn leaves_labeled(&self, x: u32) -> impl Iterator<Item = usize> + '_ {
        self.xprime
            .positions(x as u64)
            .map(|i| self.tree.leafselect(i + 1).expect("leaf exists"))
    }

    /// Adds or removes the path tries.
    pub fn set_tries(&mut self, on: bool) {
        self.tries = on.then(|| PathTries::build(self));
    }

    /// Adds Patricia trees sampling every `k`-th string, or removes them.
    pub fn set_patricia(&mut self, k: Option<usize>) -> Result<()> {
        self.patricia = None;
        if let Some(k) = k {
            self.patricia = Some(Patricia::build(self, k)?);
        }
        Ok(())
    }

    pub fn stats(&self) -> IndexStats {
        IndexStats {
            n: self.n,
            g: self.g,
            sigma: self.sigma(),
            g_tree: self.g_tree,
            raw_size: self.raw_size,
            height: self.height,
            tree_bits: self.tree.size_in_bits(),
            xprime_bits: self.xprime.size_in_bits(),
            y_bits: self.y.size_in_bits(),
            pi_bits: self.pi.size_in_bits(),
            l_bits: self.l.size_in_bits(),
            grid_bits: self.grid.size_in_bits(),
            trie_bits: self.tries.as_ref().map_or(0, PathTries::size_in_bits),
            patricia_bits: self.patricia.as_ref().map_or(0, Patricia::size_in_bits),
        }
    }

    /// Serializes the index in the `GCIX` file format.
    pub fn save<W: Write>(&self, out: &mut W) -> Result<()> {
        let mut head = Writer::new();
        head.u64(self.n);
        head.u64(self.g as u64);
        head.u64(self.g_tree as u64);
        head.u64(self.height as u64);
        head.u64(self.raw_size as u64);
        let flags = self.tries.is_some() as u8 | (self.patricia.is_some() as u8) << 1;
        head.u8(flags);
        head.u32(self.patricia.as_ref().map_or(0, |p| p.sample_rate() as u32));
        head.u32(self.pi.step() as u32);
        head.u16(self.alphabet.len() as u16);
        head.bytes(&self.alphabet);

        let section = |f: &dyn Fn(&mut Writer)| {
            let mut w = Writer::new();
            f(&mut w);
            w.into_inner()
        };
        let mut sections = vec![
            (TAG_HEADER, head.into_inner()),
            (TAG_TREE, section(&|w| self.tree.write(w))),
            (TAG_XPRIME, section(&|w| self.xprime.write(w))),
            (TAG_Y, section(&|w| self.y.write(w))),
            (TAG_PI, section(&|w| self.pi.write(w))),
            (TAG_L, section(&|w| self.l.write(w))),
            (TAG_GRID, section(&|w| self.grid.write(w))),
        ];
        if let Some(t) = &self.tries {
            sections.push((TAG_TRIES, section(&|w| t.write(w))));
        }
        if let Some(p) = &self.patricia {
            sections.push((TAG_PATRICIA, section(&|w| p.write(w))));
        }
        serial::write_file(out, &sections)
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut v = Vec::new();
        self.save(&mut v).expect("writing to memory");
        v
    }

    pub fn save_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.save(&mut f)?;
        f.flush()?;
        Ok(())
    }

    /// Loads an index written by [`save`](Self::save), checking format
    /// version, checksum and structural consistency.
    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let sections = serial::read_file(data)?;
        let find = |tag: u8| -> Result<Reader> {
            sections
                .iter()
                .find(|(t, _)| *t == tag)
                .map(|(_, p)| Reader::new(p))
                .ok_or_else(|| Error::Format(format!("missing section {tag}")))
        };
        let mut h = find(TAG_HEADER)?;
        let n = h.u64()?;
        let g = h.len_u64()?;
        let g_tree = h.len_u64()?;
        let height = h.len_u64()?;
        let raw_size = h.len_u64()?;
        let flags = h.u8()?;
        let rate = h.u32()? as usize;
        let perm_step = h.u32()? as usize;
        let sigma = h.u16()? as usize;
        let alphabet = h.bytes(sigma)?.to_vec();
        h.finish()?;
        if alphabet.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Format("alphabet is not strictly increasing".into()));
        }

        let read = |tag| find(tag);
        let mut r = read(TAG_TREE)?;
        let tree = ParenTree::read(&mut r)?;
        r.finish()?;
        let mut r = read(TAG_XPRIME)?;
        let xprime = LabelSeq::read(&mut r)?;
        r.finish()?;
        let mut r = read(TAG_Y)?;
        let y = SparseBitVec::read(&mut r)?;
        r.finish()?;
        let mut r = read(TAG_PI)?;
        let pi = PermInv::read(&mut r)?;
        r.finish()?;
        let mut r = read(TAG_L)?;
        let l = SparseBitVec::read(&mut r)?;
        r.finish()?;
        let mut r = read(TAG_GRID)?;
        let grid = RangeGrid::read(&mut r)?;
        r.finish()?;

        let bad = |what: &str| Err(Error::Format(format!("inconsistent index: {what}")));
        if y.len() != g || y.count_ones() != sigma {
            return bad("terminal bitmap");
        }
        if tree.num_nodes() != g_tree + 1 || tree.num_internal() != g - sigma {
            return bad("tree size");
        }
        if pi.len() != g - sigma || pi.step() != perm_step || xprime.len() != tree.num_leaves() {
            return bad("label counts");
        }
        if l.len() as u64 != n || l.count_ones() != tree.num_leaves() || l.select1(1) != Some(0) {
            return bad("phrase bitmap");
        }
        if grid.num_cols() != g_tree - (g - sigma) {
            return bad("grid size");
        }
        if g == 0 || (0..xprime.len()).any(|i| !(1..=g as u64).contains(&xprime.access(i))) {
            return bad("leaf labels");
        }
        let nodes = tree.num_nodes() as u64;
        if (1..=grid.num_cols()).any(|c| {
            !(1..=g as u64).contains(&grid.row(c)) || !(2..=nodes).contains(&grid.label(c))
        }) {
            return bad("grid points");
        }
        let term_pos: Vec<usize> = y.iter_ones().collect();
        let mut ix = GrammarIndex {
            n,
            g,
            g_tree,
            height,
            raw_size,
            term_rule: term_rules(&alphabet, &term_pos),
            alphabet,
            tree,
            xprime,
            y,
            pi,
            l,
            grid,
            tries: None,
            patricia: None,
        };
        if flags & 1 != 0 {
            let mut r = read(TAG_TRIES)?;
            ix.tries = Some(PathTries::read(&mut r, g)?);
            r.finish()?;
        }
        if flags & 2 != 0 {
            let mut r = read(TAG_PATRICIA)?;
            let p = Patricia::read(&mut r, &ix)?;
            r.finish()?;
            if p.sample_rate() != rate {
                return bad("Patricia sample rate");
            }
            ix.patricia = Some(p);
        }
        Ok(ix)
    }

    pub fn load_file<P: AsRef<Path>>(path: P) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }
}

const TAG_HEADER: u8 = 1;
const TAG_TREE: u8 = 2;
const TAG_XPRIME: u8 = 3;
const TAG_Y: u8 = 4;
const TAG_PI: u8 = 5;
const TAG_L: u8 = 6;
const TAG_GRID: u8 = 7;
const TAG_TRIES: u8 = 8;
const TAG_PATRICIA: u8 = 9;

fn term_rules(alphabet: &[u8], term_pos: &[usize]) -> [u32; 256] {
    let mut t = [0u32; 256];
    for (&b, &p) in alphabet.iter().zip(term_pos) {
        t[b as usize] = p as u32 + 1;
    }
    t
}
