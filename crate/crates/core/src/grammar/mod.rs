//! Grammars: construction, normalization and the text interchange format.
//!
//! A [`Grammar`] is whatever a compressor produced (or a file contained): a
//! set of rules over bytes and other rules, one of them the start rule.
//! [`preprocess`] turns it into a [`PreprocessedGrammar`], the normal form the
//! index is built on:
//!
//! - every byte `a` occurs only through a terminal rule `X_a -> a`;
//! - no rule other than terminal rules (and possibly the start rule) has a
//!   right-hand side of length 0 or 1;
//! - every rule except the start rule and terminal rules is used at least
//!   twice;
//! - rules are numbered `1..=g` so that `i < j` iff the reversed expansion of
//!   `X_i` is lexicographically smaller than that of `X_j`.
//!
//! ```
//! use gindex::grammar::{preprocess, repair, Rule};
//!
//! let pg = preprocess(repair(b"abab")?);
//! assert_eq!(pg.g(), 4);
//! assert_eq!(pg.rule(3), &Rule::Nonterminal(vec![1, 2]));
//! assert_eq!(pg.expand(pg.start())?, b"abab");
//! # Ok::<(), gindex::Error>(())
//! ```

mod format;
mod preprocess;
mod repair;

pub use format::{parse_grammar, write_grammar};
pub use preprocess::{preprocess, GrammarStats, PreprocessedGrammar, Rule};
pub use repair::repair;

use crate::{Error, Result};

/// A right-hand-side symbol of a raw [`Grammar`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    Byte(u8),
    /// Index into [`Grammar::rules`].
    Rule(u32),
}

/// A raw context-free grammar generating a single nonempty string.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grammar {
    rules: Vec<Vec<Symbol>>,
    start: u32,
    n: u64,
}

impl Grammar {
    /// Checks that every reference is defined, that the rules are acyclic
    /// and that the start rule generates exactly `n >= 1` bytes.
    pub fn new(rules: Vec<Vec<Symbol>>, start: u32, n: u64) -> Result<Self> {
        if start as usize >= rules.len() {
            return Err(Error::Grammar(format!("start rule {start} is not defined")));
        }
        for (i, rhs) in rules.iter().enumerate() {
            for s in rhs {
                if let Symbol::Rule(r) = *s {
                    if r as usize >= rules.len() {
                        return Err(Error::Grammar(format!(
                            "rule {i} refers to undefined rule {r}"
                        )));
                    }
                }
            }
        }
        let lens = expansion_lengths(&rules)?;
        let got = lens[start as usize];
        if got != n {
            return Err(Error::Grammar(format!(
                "start rule generates {got} bytes, expected {n}"
            )));
        }
        if n == 0 {
            return Err(Error::EmptyText);
        }
        Ok(Grammar { rules, start, n })
    }

    pub fn rules(&self) -> &[Vec<Symbol>] {
        &self.rules
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    /// Length of the generated text.
    pub fn n(&self) -> u64 {
        self.n
    }

    /// Total right-hand-side length over all rules.
    pub fn size(&self) -> usize {
        self.rules.iter().map(Vec::len).sum()
    }

    /// Sorted set of bytes occurring in any rule.
    pub fn alphabet(&self) -> Vec<u8> {
        let mut seen = [false; 256];
        for s in self.rules.iter().flatten() {
            if let Symbol::Byte(b) = *s {
                seen[b as usize] = true;
            }
        }
        (0..=255u8).filter(|&b| seen[b as usize]).collect()
    }

    /// The string generated by `sym`.
    pub fn expand(&self, sym: Symbol) -> Result<Vec<u8>> {
        if let Symbol::Rule(r) = sym {
            if r as usize >= self.rules.len() {
                return Err(Error::InvalidSymbol(r as u64));
            }
        }
        let mut out = Vec::new();
        let mut stack = vec![sym];
        while let Some(s) = stack.pop() {
            match s {
                Symbol::Byte(b) => out.push(b),
                Symbol::Rule(r) => stack.extend(self.rules[r as usize].iter().rev()),
            }
        }
        Ok(out)
    }

    /// The generated text.
    pub fn text(&self) -> Vec<u8> {
        self.expand(Symbol::Rule(self.start))
            .expect("start is valid")
    }
}

/// Expansion length of every rule; fails on cycles or `u64` overflow.
fn expansion_lengths(rules: &[Vec<Symbol>]) -> Result<Vec<u64>> {
    const UNSEEN: u8 = 0;
    const ACTIVE: u8 = 1;
    const DONE: u8 = 2;
    let mut state = vec![UNSEEN; rules.len()];
    let mut len = vec![0u64; rules.len()];
    for root in 0..rules.len() {
        if state[root] != UNSEEN {
            continue;
        }
        // (rule, next child to look at)
        let mut stack = vec![(root, 0usize)];
        state[root] = ACTIVE;
        while let Some(&mut (r, ref mut k)) = stack.last_mut() {
            if let Some(&s) = rules[r].get(*k) {
                *k += 1;
                if let Symbol::Rule(c) = s {
                    let c = c as usize;
                    match state[c] {
                        ACTIVE => {
                            return Err(Error::Grammar(format!("rule {c} derives itself")));
                        }
                        UNSEEN => {
                            state[c] = ACTIVE;
                            stack.push((c, 0));
                        }
                        _ => {}
                    }
                }
                continue;
            }
            let mut total = 0u64;
            for s in &rules[r] {
                let l = match *s {
                    Symbol::Byte(_) => 1,
                    Symbol::Rule(c) => len[c as usize],
                };
                total = total
                    .checked_add(l)
                    .ok_or_else(|| Error::Grammar("expansion length overflows u64".into()))?;
            }
            len[r] = total;
            state[r] = DONE;
            stack.pop();
        }
    }
    Ok(len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Symbol::{Byte, Rule as R};

    #[test]
    fn validation() {
        let ok = Grammar::new(vec![vec![Byte(b'a'), Byte(b'b')], vec![R(0), R(0)]], 1, 4).unwrap();
        assert_eq!(ok.text(), b"abab");
        assert_eq!(ok.alphabet(), b"ab");
        assert_eq!(ok.size(), 4);
        assert!(Grammar::new(vec![vec![R(0)]], 0, 0).is_err());
        assert!(Grammar::new(vec![vec![R(1)], vec![R(0)]], 0, 1).is_err());
        assert!(Grammar::new(vec![vec![R(5)]], 0, 1).is_err());
        assert!(Grammar::new(vec![vec![Byte(1)]], 0, 2).is_err());
        assert!(Grammar::new(vec![vec![Byte(1)]], 1, 1).is_err());
        assert!(matches!(
            Grammar::new(vec![vec![]], 0, 0),
            Err(Error::EmptyText)
        ));
    }

    #[test]
    fn overflow_is_rejected() {
        // X_{k+1} -> X_k X_k doubles 70 times
        let mut rules = vec![vec![Byte(b'a'), Byte(b'a')]];
        for k in 0..70u32 {
            rules.push(vec![R(k), R(k)]);
        }
        assert!(Grammar::new(rules, 70, 0).is_err());
    }
}
