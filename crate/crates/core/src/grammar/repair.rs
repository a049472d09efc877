//! RePair: repeatedly replace the most frequent pair of adjacent symbols by
//! a fresh nonterminal until no pair occurs twice.
//!
//! Frequencies count non-overlapping occurrences from left to right. Among
//! the most frequent pairs the smallest `(left, right)` code wins, where
//! bytes are codes `0..256` and the `k`-th rule is code `256 + k`, so the
//! output only depends on the input.

use std::cmp::Reverse;
use std::collections::{BTreeSet, HashMap};
use std::ops::Bound::{Excluded, Unbounded};

use super::{Grammar, Symbol};
use crate::{Error, Result};

const NONE: u32 = u32::MAX;
const DEAD: u32 = u32::MAX;
const FIRST_RULE: u32 = 256;

#[derive(Default)]
struct PairInfo {
    /// Adjacent occurrences, overlapping ones included.
    count: usize,
    /// Left positions; may hold stale entries.
    pos: Vec<u32>,
}

struct State {
    seq: Vec<u32>,
    next: Vec<u32>,
    prev: Vec<u32>,
    pairs: HashMap<(u32, u32), PairInfo>,
    queue: BTreeSet<(Reverse<usize>, u32, u32)>,
}

impl State {
    fn new(text: &[u8]) -> Self {
        let n = text.len();
        let seq: Vec<u32> = text.iter().map(|&b| b as u32).collect();
        let next = (0..n as u32)
            .map(|i| if i + 1 < n as u32 { i + 1 } else { NONE })
            .collect();
        let prev = (0..n as u32)
            .map(|i| if i == 0 { NONE } else { i - 1 })
            .collect();
        let mut st = State {
            seq,
            next,
            prev,
            pairs: HashMap::new(),
            queue: BTreeSet::new(),
        };
        for i in 0..n.saturating_sub(1) {
            let key = (st.seq[i], st.seq[i + 1]);
            let e = st.pairs.entry(key).or_default();
            e.count += 1;
            e.pos.push(i as u32);
        }
        for (&(a, b), e) in &st.pairs {
            if e.count >= 2 {
                st.queue.insert((Reverse(e.count), a, b));
            }
        }
        st
    }

    fn set_count(&mut self, key: (u32, u32), old: usize, new: usize) {
        if old >= 2 {
            self.queue.remove(&(Reverse(old), key.0, key.1));
        }
        if new >= 2 {
            self.queue.insert((Reverse(new), key.0, key.1));
        }
    }

    fn inc(&mut self, key: (u32, u32), at: u32) {
        let e = self.pairs.entry(key).or_default();
        let old = e.count;
        e.count += 1;
        e.pos.push(at);
        self.set_count(key, old, old + 1);
    }

    fn dec(&mut self, key: (u32, u32)) {
        let e = self
            .pairs
            .get_mut(&key)
            .expect("decremented pair is present");
        let old = e.count;
        e.count -= 1;
        self.set_count(key, old, old - 1);
    }

    fn is_at(&self, p: u32, (a, b): (u32, u32)) -> bool {
        let q = self.next[p as usize];
        self.seq[p as usize] == a && q != NONE && self.seq[q as usize] == b
    }

    /// Valid left positions of `key`, sorted and deduplicated, with stale
    /// entries dropped from the stored list.
    fn live_positions(&mut self, key: (u32, u32)) -> Vec<u32> {
        let mut pos = std::mem::take(&mut self.pairs.get_mut(&key).unwrap().pos);
        pos.sort_unstable();
        pos.dedup();
        pos.retain(|&p| self.is_at(p, key));
        self.pairs.get_mut(&key).unwrap().pos = pos.clone();
        pos
    }

    /// Non-overlapping count of `key`, scanning left to right.
    fn exact_count(&mut self, key: (u32, u32)) -> usize {
        if key.0 != key.1 {
            return self.pairs[&key].count;
        }
        let mut blocked = NONE;
        let mut c = 0;
        for p in self.live_positions(key) {
            if p != blocked {
                c += 1;
                blocked = self.next[p as usize];
            }
        }
        c
    }

    /// The pair to replace next, if any pair occurs at least twice.
    fn select(&mut self) -> Option<(u32, u32)> {
        let mut best: Option<(usize, (u32, u32))> = None;
        let mut cursor = None;
        loop {
            let item = match cursor {
                None => self.queue.iter().next(),
                Some(c) => self.queue.range((Excluded(c), Unbounded)).next(),
            };
            let Some(&item) = item else { break };
            cursor = Some(item);
            let (Reverse(c), a, b) = item;
            // Adjacency counts bound the exact counts from above, and the
            // queue is ordered by (count desc, pair asc).
            if let Some((bc, bk)) = best {
                if c < bc || (c == bc && (a, b) > bk) {
                    break;
                }
            }
            let exact = self.exact_count((a, b));
            if best.is_none_or(|(bc, bk)| exact > bc || (exact == bc && (a, b) < bk)) {
                best = Some((exact, (a, b)));
            }
        }
        best.filter(|&(c, _)| c >= 2).map(|(_, k)| k)
    }

    fn replace(&mut self, key: (u32, u32), z: u32) {
        let (a, b) = key;
        for p in self.live_positions(key) {
            // Earlier replacements in a run of equal symbols invalidate
            // some recorded positions.
            if !self.is_at(p, key) {
                continue;
            }
            let q = self.next[p as usize];
            let x = self.prev[p as usize];
            let y = self.next[q as usize];
            if x != NONE {
                self.dec((self.seq[x as usize], a));
            }
            self.dec(key);
            if y != NONE {
                self.dec((b, self.seq[y as usize]));
            }
            self.seq[p as usize] = z;
            self.seq[q as usize] = DEAD;
            self.next[p as usize] = y;
            if y != NONE {
                self.prev[y as usize] = p;
            }
            if x != NONE {
                self.inc((self.seq[x as usize], z), x);
            }
            if y != NONE {
                self.inc((z, self.seq[y as usize]), p);
            }
        }
        if let Some(e) = self.pairs.remove(&key) {
            self.set_count(key, e.count, 0);
        }
    }
}

fn symbol(code: u32) -> Symbol {
    if code < FIRST_RULE {
        Symbol::Byte(code as u8)
    } else {
        Symbol::Rule(code - FIRST_RULE)
    }
}

/// Compresses `text` with RePair. Rule `k` of the result is the `k`-th pair
/// created; the start rule comes last and holds the final sequence.
///
/// ```
/// use gindex::grammar::{repair, Symbol};
///
/// let g = repair(b"abab")?;
/// assert_eq!(g.rules()[0], vec![Symbol::Byte(b'a'), Symbol::Byte(b'b')]);
/// assert_eq!(g.rules()[1], vec![Symbol::Rule(0), Symbol::Rule(0)]);
/// # Ok::<(), gindex::Error>(())
/// ```
pub fn repair(text: &[u8]) -> Result<Grammar> {
    if text.is_empty() {
        return Err(Error::EmptyText);
    }
    if text.len() >= NONE as usize {
        return Err(Error::Grammar("text too long for 32-bit positions".into()));
    }
    let mut st = State::new(text);
    let mut rules: Vec<Vec<Symbol>> = Vec::new();
    while let Some(key) = st.select() {
        let z = FIRST_RULE + rules.len() as u32;
        rules.push(vec![symbol(key.0), symbol(key.1)]);
        st.replace(key, z);
    }
    let start: Vec<Symbol> = st
        .seq
        .iter()
        .filter(|&&c| c != DEAD)
        .map(|&c| symbol(c))
        .collect();
    rules.push(start);
    let s = rules.len() as u32 - 1;
    Grammar::new(rules, s, text.len() as u64)
}
