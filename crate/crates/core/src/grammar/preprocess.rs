//! Normalization of raw grammars into the form the index needs.

use std::cmp::Ordering;

use super::{Grammar, Symbol};
use crate::{Error, Result};

/// A rule of a [`PreprocessedGrammar`]. Nonterminal right-hand sides list
/// 1-based rule ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    Terminal(u8),
    Nonterminal(Vec<u32>),
}

/// Size figures of a preprocessed grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrammarStats {
    /// Number of rules, terminal rules included.
    pub g: usize,
    /// Total right-hand-side length over nonterminal rules; the grammar tree
    /// has `g_tree + 1` nodes.
    pub g_tree: usize,
    pub sigma: usize,
    /// Height of the parse tree (a lone terminal rule has height 0).
    pub height: usize,
    pub n: u64,
    /// Total right-hand-side length of the grammar before preprocessing.
    pub raw_size: usize,
}

/// A grammar in normal form, rules numbered `1..=g` in reverse
/// lexicographic order of their expansions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreprocessedGrammar {
    rules: Vec<Rule>,
    start: u32,
    n: u64,
    raw_size: usize,
    warnings: Vec<String>,
}

impl PreprocessedGrammar {
    /// Builds the grammar of `text` with RePair and preprocesses it.
    pub fn from_text(text: &[u8]) -> Result<Self> {
        Ok(preprocess(super::repair(text)?))
    }

    /// Wraps rules without normalizing them; [`check`](Self::check) reports
    /// what is wrong with them.
    pub fn from_rules(rules: Vec<Rule>, start: u32) -> Result<Self> {
        let g = rules.len() as u32;
        if start == 0 || start > g {
            return Err(Error::InvalidSymbol(start as u64));
        }
        for r in &rules {
            if let Rule::Nonterminal(rhs) = r {
                if let Some(&x) = rhs.iter().find(|&&x| x == 0 || x > g) {
                    return Err(Error::InvalidSymbol(x as u64));
                }
            }
        }
        let raw: Vec<Vec<Symbol>> = rules
            .iter()
            .map(|r| match r {
                Rule::Terminal(b) => vec![Symbol::Byte(*b)],
                Rule::Nonterminal(rhs) => rhs.iter().map(|&x| Symbol::Rule(x - 1)).collect(),
            })
            .collect();
        let lens = super::expansion_lengths(&raw)?;
        let n = lens[start as usize - 1];
        if n == 0 {
            return Err(Error::EmptyText);
        }
        let raw_size = raw.iter().map(Vec::len).sum();
        Ok(PreprocessedGrammar {
            rules,
            start,
            n,
            raw_size,
            warnings: Vec::new(),
        })
    }

    /// Number of rules.
    pub fn g(&self) -> usize {
        self.rules.len()
    }

    pub fn start(&self) -> u32 {
        self.start
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// Rule `x` (1-based).
    pub fn rule(&self, x: u32) -> &Rule {
        &self.rules[x as usize - 1]
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// Sorted bytes with a terminal rule.
    pub fn alphabet(&self) -> Vec<u8> {
        let mut a: Vec<u8> = self
            .rules
            .iter()
            .filter_map(|r| match r {
                Rule::Terminal(b) => Some(*b),
                _ => None,
            })
            .collect();
        a.sort_unstable();
        a
    }

    pub fn sigma(&self) -> usize {
        self.rules
            .iter()
            .filter(|r| matches!(r, Rule::Terminal(_)))
            .count()
    }

    /// Problems noticed while preprocessing (ε rules, unit rules, rules with
    /// identical expansions, unreachable rules).
    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// The string generated by `x`.
    pub fn expand(&self, x: u32) -> Result<Vec<u8>> {
        if x == 0 || x as usize > self.rules.len() {
            return Err(Error::InvalidSymbol(x as u64));
        }
        let mut out = Vec::new();
        let mut stack = vec![x];
        while let Some(y) = stack.pop() {
            match self.rule(y) {
                Rule::Terminal(b) => out.push(*b),
                Rule::Nonterminal(rhs) => stack.extend(rhs.iter().rev()),
            }
        }
        Ok(out)
    }

    /// The generated text.
    pub fn text(&self) -> Vec<u8> {
        self.expand(self.start).expect("start is valid")
    }

    /// Expansion length of every rule, indexed by `x - 1`.
    pub fn expansion_lengths(&self) -> Vec<u64> {
        // Children always precede a rule in a post-order; rule ids do not
        // give one, so walk explicitly.
        let mut len = vec![0u64; self.rules.len()];
        for x in self.post_order() {
            len[x as usize - 1] = match self.rule(x) {
                Rule::Terminal(_) => 1,
                Rule::Nonterminal(rhs) => rhs.iter().map(|&c| len[c as usize - 1]).sum(),
            };
        }
        len
    }

    /// Every rule reachable from the start, children before parents.
    fn post_order(&self) -> Vec<u32> {
        let mut seen = vec![false; self.rules.len()];
        let mut out = Vec::with_capacity(self.rules.len());
        let mut stack = vec![(self.start, 0usize)];
        seen[self.start as usize - 1] = true;
        while let Some(&mut (x, ref mut k)) = stack.last_mut() {
            let rhs: &[u32] = match self.rule(x) {
                Rule::Nonterminal(rhs) => rhs,
                Rule::Terminal(_) => &[],
            };
            if let Some(&c) = rhs.get(*k) {
                *k += 1;
                if !std::mem::replace(&mut seen[c as usize - 1], true) {
                    stack.push((c, 0));
                }
            } else {
                out.push(x);
                stack.pop();
            }
        }
        out
    }

    pub fn stats(&self) -> GrammarStats {
        let mut h = vec![0usize; self.rules.len()];
        for x in self.post_order() {
            if let Rule::Nonterminal(rhs) = self.rule(x) {
                h[x as usize - 1] = 1 + rhs.iter().map(|&c| h[c as usize - 1]).max().unwrap_or(0);
            }
        }
        GrammarStats {
            g: self.g(),
            g_tree: self
                .rules
                .iter()
                .map(|r| match r {
                    Rule::Nonterminal(rhs) => rhs.len(),
                    Rule::Terminal(_) => 0,
                })
                .sum(),
            sigma: self.sigma(),
            height: h[self.start as usize - 1],
            n: self.n,
            raw_size: self.raw_size,
        }
    }

    /// Checks the normal form by brute force, materializing every
    /// expansion. Returns one message per violation.
    pub fn check(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let g = self.rules.len();
        let mut term_seen = [false; 256];
        let mut uses = vec![0usize; g];
        for (i, r) in self.rules.iter().enumerate() {
            let x = i + 1;
            match r {
                Rule::Terminal(b) => {
                    if std::mem::replace(&mut term_seen[*b as usize], true) {
                        bad.push(format!("byte {b:#04x} has more than one terminal rule"));
                    }
                }
                Rule::Nonterminal(rhs) => {
                    if rhs.len() <= 1 && x as u32 != self.start {
                        bad.push(format!(
                            "X{x} has a right-hand side of length {}",
                            rhs.len()
                        ));
                    }
                    for &c in rhs {
                        uses[c as usize - 1] += 1;
                    }
                }
            }
        }
        for (i, r) in self.rules.iter().enumerate() {
            let x = i + 1;
            if x as u32 == self.start {
                continue;
            }
            match r {
                Rule::Terminal(_) if uses[i] == 0 => {
                    bad.push(format!("terminal rule X{x} is unused"))
                }
                Rule::Nonterminal(_) if uses[i] < 2 => {
                    bad.push(format!("X{x} is used {} time(s)", uses[i]))
                }
                _ => {}
            }
        }
        let exp: Vec<Vec<u8>> = (1..=g as u32).map(|x| self.expand(x).unwrap()).collect();
        for i in 1..g {
            if cmp_reversed(&exp[i - 1], &exp[i]) != Ordering::Less {
                bad.push(format!(
                    "reversed expansion of X{} is not smaller than that of X{}",
                    i,
                    i + 1
                ));
            }
        }
        bad
    }
}

/// Lexicographic comparison of the reversed strings.
pub(crate) fn cmp_reversed(a: &[u8], b: &[u8]) -> Ordering {
    a.iter().rev().cmp(b.iter().rev())
}

enum Work {
    Term(u8),
    Rhs(Vec<usize>),
    Gone,
}

/// Normalizes `gr`:
///
/// 1. drops unreachable rules;
/// 2. adds a terminal rule `X_a -> a` per byte and routes every byte through
///    it;
/// 3. removes rules generating the empty string and unit rules `A -> B` by
///    substituting their content;
/// 4. inlines every rule used exactly once;
/// 5. renumbers the rules by reversed expansion.
///
/// A start rule of the form `S -> X_a` (the text is a single byte) collapses
/// into the terminal rule itself.
pub fn preprocess(gr: Grammar) -> PreprocessedGrammar {
    let raw_size = gr.size();
    let mut warnings = Vec::new();
    let nraw = gr.rules().len();

    // 1. reachability
    let mut reach = vec![false; nraw];
    let mut stack = vec![gr.start() as usize];
    reach[gr.start() as usize] = true;
    while let Some(r) = stack.pop() {
        for s in &gr.rules()[r] {
            if let Symbol::Rule(c) = *s {
                if !std::mem::replace(&mut reach[c as usize], true) {
                    stack.push(c as usize);
                }
            }
        }
    }
    let dropped = reach.iter().filter(|&&b| !b).count();
    if dropped > 0 {
        warnings.push(format!("dropped {dropped} unreachable rule(s)"));
    }

    // 2. terminal rules get ids nraw + byte rank
    let mut used = [false; 256];
    for (r, rhs) in gr.rules().iter().enumerate() {
        if reach[r] {
            for s in rhs {
                if let Symbol::Byte(b) = *s {
                    used[b as usize] = true;
                }
            }
        }
    }
    let mut term_id = [usize::MAX; 256];
    let mut work: Vec<Work> = Vec::with_capacity(nraw + 256);
    for (r, rhs) in gr.rules().iter().enumerate() {
        work.push(if reach[r] {
            Work::Rhs(Vec::with_capacity(rhs.len()))
        } else {
            Work::Gone
        });
    }
    for b in 0..=255u8 {
        if used[b as usize] {
            term_id[b as usize] = work.len();
            work.push(Work::Term(b));
        }
    }
    for (r, rhs) in gr.rules().iter().enumerate() {
        if let Work::Rhs(v) = &mut work[r] {
            v.extend(rhs.iter().map(|s| match *s {
                Symbol::Byte(b) => term_id[b as usize],
                Symbol::Rule(c) => c as usize,
            }));
        }
    }

    // 3. ε and unit rules, children first
    let order = post_order(&work, gr.start() as usize);
    let (mut eps, mut units) = (0usize, 0usize);
    for &r in &order {
        let Work::Rhs(rhs) = &work[r] else { continue };
        let mut out = Vec::with_capacity(rhs.len());
        for &c in rhs {
            match &work[c] {
                Work::Rhs(v) if v.is_empty() => {}
                Work::Rhs(v) if v.len() == 1 => out.push(v[0]),
                _ => out.push(c),
            }
        }
        if r != gr.start() as usize {
            match out.len() {
                0 => eps += 1,
                1 => units += 1,
                _ => {}
            }
        }
        work[r] = Work::Rhs(out);
    }
    if eps > 0 {
        warnings.push(format!("removed {eps} rule(s) generating the empty string"));
    }
    if units > 0 {
        warnings.push(format!("removed {units} unit rule(s)"));
    }
    // A unit start rule hands over to its only symbol.
    let mut start = gr.start() as usize;
    if let Work::Rhs(v) = &work[start] {
        if v.len() == 1 {
            start = v[0];
            if let Work::Rhs(_) = work[start] {
                warnings.push("start rule was a unit rule".into());
            }
        }
    }

    // 4. inline rules used once
    let order = post_order(&work, start);
    let mut uses = vec![0usize; work.len()];
    for &r in &order {
        if let Work::Rhs(rhs) = &work[r] {
            for &c in rhs {
                uses[c] += 1;
            }
        }
    }
    let kept: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&r| r == start || matches!(work[r], Work::Term(_)) || uses[r] >= 2)
        .collect();
    let mut is_kept = vec![false; work.len()];
    for &r in &kept {
        is_kept[r] = true;
    }
    let mut new_rhs: Vec<Option<Vec<usize>>> = vec![None; work.len()];
    for &r in &kept {
        let Work::Rhs(rhs) = &work[r] else { continue };
        let mut out = Vec::with_capacity(rhs.len());
        let mut st: Vec<usize> = rhs.iter().rev().copied().collect();
        while let Some(c) = st.pop() {
            if is_kept[c] {
                out.push(c);
            } else if let Work::Rhs(v) = &work[c] {
                st.extend(v.iter().rev());
            }
        }
        new_rhs[r] = Some(out);
    }

    // 5. reverse-lexicographic renumbering, via the text and the first
    //    occurrence of every kept rule
    let (text, first) = first_occurrences(&work, &new_rhs, start);
    let span = |r: usize| -> &[u8] {
        let (p, l) = first[r];
        &text[p..p + l]
    };
    let mut sorted = kept.clone();
    sorted.sort_by(|&a, &b| cmp_reversed(span(a), span(b)).then(a.cmp(&b)));
    let mut dups = 0;
    for w in sorted.windows(2) {
        if span(w[0]) == span(w[1]) {
            dups += 1;
        }
    }
    if dups > 0 {
        warnings.push(format!(
            "{dups} pair(s) of rules generate identical strings"
        ));
    }
    let mut new_id = vec![0u32; work.len()];
    for (i, &r) in sorted.iter().enumerate() {
        new_id[r] = i as u32 + 1;
    }
    let rules = sorted
        .iter()
        .map(|&r| match &work[r] {
            Work::Term(b) => Rule::Terminal(*b),
            _ => Rule::Nonterminal(
                new_rhs[r]
                    .as_ref()
                    .unwrap()
                    .iter()
                    .map(|&c| new_id[c])
                    .collect(),
            ),
        })
        .collect();
    PreprocessedGrammar {
        rules,
        start: new_id[start],
        n: gr.n(),
        raw_size,
        warnings,
    }
}

fn post_order(work: &[Work], root: usize) -> Vec<usize> {
    let mut seen = vec![false; work.len()];
    let mut out = Vec::new();
    let mut stack = vec![(root, 0usize)];
    seen[root] = true;
    while let Some(&mut (r, ref mut k)) = stack.last_mut() {
        let child = match &work[r] {
            Work::Rhs(v) => v.get(*k).copied(),
            _ => None,
        };
        match child {
            Some(c) => {
                *k += 1;
                if !std::mem::replace(&mut seen[c], true) {
                    stack.push((c, 0));
                }
            }
            None => {
                out.push(r);
                stack.pop();
            }
        }
    }
    out
}

/// Expands the start rule, recording for every kept rule the `(position,
/// length)` of its first occurrence.
fn first_occurrences(
    work: &[Work],
    rhs: &[Option<Vec<usize>>],
    start: usize,
) -> (Vec<u8>, Vec<(usize, usize)>) {
    const UNSEEN: (usize, usize) = (usize::MAX, 0);
    let mut first = vec![UNSEEN; work.len()];
    let mut text = Vec::new();
    enum Step {
        Enter(usize),
        Leave(usize),
    }
    let mut stack = vec![Step::Enter(start)];
    while let Some(step) = stack.pop() {
        match step {
            Step::Enter(r) => {
                if first[r] != UNSEEN {
                    let (p, l) = first[r];
                    text.extend_from_within(p..p + l);
                    continue;
                }
                let p = text.len();
                if let Work::Term(b) = work[r] {
                    text.push(b);
                    first[r] = (p, 1);
                    continue;
                }
                first[r] = (p, 0);
                stack.push(Step::Leave(r));
                for &c in rhs[r].as_ref().unwrap().iter().rev() {
                    stack.push(Step::Enter(c));
                }
            }
            Step::Leave(r) => {
                let p = first[r].0;
                first[r] = (p, text.len() - p);
            }
        }
    }
    (text, first)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::repair;
    use proptest::prelude::*;
    use Symbol::{Byte as B, Rule as R};

    /// Reference: expand every rule, sort the reversed strings.
    fn reverse_lex_ids(pg: &PreprocessedGrammar) -> Vec<Vec<u8>> {
        let mut all: Vec<Vec<u8>> = (1..=pg.g() as u32)
            .map(|x| {
                let mut e = pg.expand(x).unwrap();
                e.reverse();
                e
            })
            .collect();
        all.sort();
        all
    }

    #[test]
    fn e1() {
        let gr = Grammar::new(vec![vec![B(b'a'), B(b'b')], vec![R(0), R(0)]], 1, 4).unwrap();
        let pg = preprocess(gr);
        assert_eq!(
            pg.rules(),
            &[
                Rule::Terminal(b'a'),
                Rule::Terminal(b'b'),
                Rule::Nonterminal(vec![1, 2]),
                Rule::Nonterminal(vec![3, 3]),
            ]
        );
        assert_eq!(pg.start(), 4);
        assert_eq!(pg.expand(3).unwrap(), b"ab");
        assert_eq!(pg.expand(1).unwrap(), b"a");
        assert_eq!(pg.expand(4).unwrap(), b"abab");
        assert!(pg.expand(5).is_err());
        let s = pg.stats();
        assert_eq!((s.g, s.g_tree, s.sigma, s.n, s.height), (4, 4, 2, 4, 2));
        assert!(pg.check().is_empty());
        assert!(pg.warnings().is_empty());
    }

    #[test]
    fn single_use_rule_is_inlined() {
        // R0 -> ab, R1 -> R0 c, S -> R1 R1
        let gr = Grammar::new(
            vec![
                vec![B(b'a'), B(b'b')],
                vec![R(0), B(b'c')],
                vec![R(1), R(1)],
            ],
            2,
            6,
        )
        .unwrap();
        let pg = preprocess(gr);
        assert_eq!(
            pg.rules(),
            &[
                Rule::Terminal(b'a'),
                Rule::Terminal(b'b'),
                Rule::Terminal(b'c'),
                Rule::Nonterminal(vec![1, 2, 3]),
                Rule::Nonterminal(vec![4, 4]),
            ]
        );
        assert_eq!(pg.start(), 5);
        assert!(pg.check().is_empty());
    }

    #[test]
    fn unit_and_empty_rules() {
        // A -> B, B -> ab, E -> (empty), S -> A E A c
        let gr = Grammar::new(
            vec![
                vec![R(1)],
                vec![B(b'a'), B(b'b')],
                vec![],
                vec![R(0), R(2), R(0), B(b'c')],
            ],
            3,
            5,
        )
        .unwrap();
        let pg = preprocess(gr);
        assert_eq!(pg.text(), b"ababc");
        assert_eq!(pg.g(), 5);
        assert!(pg.check().is_empty());
        assert_eq!(pg.warnings().len(), 2);
        let s = pg.stats();
        assert!(s.g_tree <= s.raw_size);
    }

    #[test]
    fn single_rule_and_single_byte() {
        let pg = PreprocessedGrammar::from_text(b"abc").unwrap();
        let s = pg.stats();
        assert_eq!((s.g, s.g_tree, s.height), (4, 3, 1));
        assert!(pg.check().is_empty());

        let pg = PreprocessedGrammar::from_text(b"a").unwrap();
        assert_eq!(pg.rules(), &[Rule::Terminal(b'a')]);
        assert_eq!(pg.start(), 1);
        let s = pg.stats();
        assert_eq!((s.g, s.g_tree, s.sigma, s.height, s.n), (1, 0, 1, 0, 1));
        assert!(pg.check().is_empty());
    }

    #[test]
    fn unit_start_rule_hands_over() {
        let gr = Grammar::new(vec![vec![R(1)], vec![B(b'x'), B(b'y')]], 0, 2).unwrap();
        let pg = preprocess(gr);
        assert_eq!(pg.text(), b"xy");
        assert_eq!(pg.g(), 3);
        assert!(pg.check().is_empty());
    }

    #[test]
    fn duplicates_and_unreachable_are_flagged() {
        // A -> ab, B -> ab, S -> A A B B; U unreachable
        let gr = Grammar::new(
            vec![
                vec![B(b'a'), B(b'b')],
                vec![B(b'a'), B(b'b')],
                vec![R(0), R(0), R(1), R(1)],
                vec![B(b'z')],
            ],
            2,
            8,
        )
        .unwrap();
        let pg = preprocess(gr);
        assert_eq!(pg.text(), b"abababab");
        assert_eq!(pg.warnings().len(), 2);
        assert_eq!(pg.alphabet(), b"ab");
        // the tie violates strict ordering, and the checker says so
        assert_eq!(pg.check().len(), 1);
    }

    #[test]
    fn checker_reports_violations() {
        let pg = PreprocessedGrammar::from_rules(
            vec![
                Rule::Terminal(b'b'),
                Rule::Terminal(b'a'),
                Rule::Nonterminal(vec![2]),
                Rule::Nonterminal(vec![3, 1, 3]),
            ],
            4,
        )
        .unwrap();
        let bad = pg.check();
        // X1 > X2, X2 == X3 and the unit rule X3
        assert_eq!(bad.len(), 3);
        assert!(bad.iter().any(|m| m.contains("X1")));
        assert!(bad.iter().any(|m| m.contains("length 1")));
        assert!(PreprocessedGrammar::from_rules(vec![Rule::Nonterminal(vec![1])], 1).is_err());
        assert!(PreprocessedGrammar::from_rules(vec![Rule::Terminal(b'a')], 2).is_err());
    }

    proptest! {
        #[test]
        fn preprocess_invariants(t in proptest::collection::vec(0u8..3, 1..300)) {
            let gr = repair(&t).unwrap();
            let raw = gr.size();
            let pg = preprocess(gr);
            prop_assert_eq!(pg.text(), t.clone());
            prop_assert!(pg.check().is_empty(), "{:?}", pg.check());
            prop_assert!(pg.warnings().is_empty());
            let s = pg.stats();
            prop_assert!(s.g_tree <= raw);
            let mut mine: Vec<Vec<u8>> = (1..=pg.g() as u32).map(|x| {
                let mut e = pg.expand(x).unwrap();
                e.reverse();
                e
            }).collect();
            let sorted = reverse_lex_ids(&pg);
            prop_assert_eq!(&mine, &sorted);
            mine.dedup();
            prop_assert_eq!(mine.len(), pg.g());
        }
    }
}
