//! Reference answers and test corpora.
//!
//! [`naive_locate`] is the ground truth every search is compared against.
//! [`gen_corpus`] produces repetitive collections: a random base string
//! followed by mutated copies, each derived from the one before.

use std::fmt;
use std::ops::RangeInclusive;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::index::{GrammarIndex, IndexOptions};
use crate::{Error, Result};

/// Every position where `pattern` occurs in `text`, overlaps included.
///
/// ```
/// use gindex::oracle::naive_locate;
///
/// assert_eq!(naive_locate(b"aaaa", b"aa")?, vec![0, 1, 2]);
/// # Ok::<(), gindex::Error>(())
/// ```
pub fn naive_locate(text: &[u8], pattern: &[u8]) -> Result<Vec<u64>> {
    if pattern.is_empty() {
        return Err(Error::EmptyPattern);
    }
    Ok(text
        .windows(pattern.len())
        .enumerate()
        .filter(|(_, w)| *w == pattern)
        .map(|(i, _)| i as u64)
        .collect())
}

/// How copies differ from their predecessor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// A byte is replaced by a different one; lengths are preserved.
    Substitution,
    /// Substitutions, insertions and deletions in equal shares.
    Indel,
}

/// Parameters of a generated repetitive corpus.
#[derive(Clone, Debug, PartialEq)]
pub struct CorpusSpec {
    pub base_len: usize,
    pub copies: usize,
    /// Probability that a position of a copy is mutated.
    pub mutation_rate: f64,
    pub alphabet: Vec<u8>,
    pub seed: u64,
    pub mutation: Mutation,
}

impl CorpusSpec {
    /// A DNA-like corpus with substitution mutations.
    pub fn new(base_len: usize, copies: usize, mutation_rate: f64, seed: u64) -> Self {
        CorpusSpec {
            base_len,
            copies,
            mutation_rate,
            alphabet: b"ACGT".to_vec(),
            seed,
            mutation: Mutation::Substitution,
        }
    }

    /// Short description used in reports.
    pub fn id(&self) -> String {
        format!("{}x{}@{}", self.base_len, self.copies, self.mutation_rate)
    }
}

impl Default for CorpusSpec {
    fn default() -> Self {
        CorpusSpec::new(1000, 10, 0.001, 1)
    }
}

/// Base string plus `copies - 1` mutated copies. With substitutions the
/// length is exactly `base_len * copies`.
///
/// # Errors
/// [`Error::InvalidArgument`] for an empty alphabet or a rate outside
/// `[0, 1]`.
pub fn gen_corpus(spec: &CorpusSpec) -> Result<Vec<u8>> {
    if spec.alphabet.is_empty() {
        return Err(Error::InvalidArgument("corpus alphabet is empty".into()));
    }
    if !(0.0..=1.0).contains(&spec.mutation_rate) {
        return Err(Error::InvalidArgument(format!(
            "mutation rate {} is not a probability",
            spec.mutation_rate
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let sigma = &spec.alphabet;
    let mut copy: Vec<u8> = (0..spec.base_len)
        .map(|_| *sigma.choose(&mut rng).unwrap())
        .collect();
    let mut out = Vec::with_capacity(spec.base_len * spec.copies);
    for c in 0..spec.copies {
        if c > 0 {
            copy = mutate(&copy, spec, &mut rng);
        }
        out.extend_from_slice(&copy);
    }
    Ok(out)
}

fn substitute(b: u8, sigma: &[u8], rng: &mut ChaCha8Rng) -> u8 {
    if sigma.len() < 2 {
        return b;
    }
    loop {
        let c = *sigma.choose(rng).unwrap();
        if c != b {
            return c;
        }
    }
}

fn mutate(prev: &[u8], spec: &CorpusSpec, rng: &mut ChaCha8Rng) -> Vec<u8> {
    let mut next = Vec::with_capacity(prev.len() + 8);
    for &b in prev {
        if !rng.gen_bool(spec.mutation_rate) {
            next.push(b);
            continue;
        }
        match spec.mutation {
            Mutation::Substitution => next.push(substitute(b, &spec.alphabet, rng)),
            Mutation::Indel => match rng.gen_range(0..3) {
                0 => next.push(substitute(b, &spec.alphabet, rng)),
                1 => {
                    next.push(b);
                    next.push(*spec.alphabet.choose(rng).unwrap());
                }
                _ => {}
            },
        }
    }
    next
}

/// Outcome of a verification run.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Report {
    /// One `PASS`/`FAIL` line per check group or failing case.
    pub lines: Vec<String>,
    pub failures: usize,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn group(&mut self, id: &str, checks: usize, failed: usize) {
        let verdict = if failed == 0 { "PASS" } else { "FAIL" };
        self.lines.push(format!(
            "{verdict} {id} {checks} checks, {failed} mismatches"
        ));
    }

    fn fail(&mut self, id: String, detail: String) {
        self.failures += 1;
        self.lines.push(format!("FAIL {id} {detail}"));
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

fn show(p: &[u8]) -> String {
    p.escape_ascii().to_string()
}

/// Compares `ix` against the plain `text`: `n_patterns` locate queries with
/// lengths cycling through `plens` (half sampled from the text, half
/// random over its alphabet) and as many extract queries of lengths 1, 10
/// and 100.
pub fn verify_index(
    ix: &GrammarIndex,
    text: &[u8],
    n_patterns: usize,
    plens: &[usize],
    seed: u64,
) -> Report {
    let mut rep = Report::default();
    if ix.n() != text.len() as u64 {
        rep.fail(
            "length".into(),
            format!("index n={} but text has {} bytes", ix.n(), text.len()),
        );
        return rep;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = ix.alphabet().to_vec();
    let mut failed = 0;
    for i in 0..n_patterns {
        let m = plens[i % plens.len()].max(1);
        let p: Vec<u8> = if i % 2 == 0 && m <= text.len() {
            let s = rng.gen_range(0..=text.len() - m);
            text[s..s + m].to_vec()
        } else {
            (0..m).map(|_| *sigma.choose(&mut rng).unwrap()).collect()
        };
        let want = naive_locate(text, &p).unwrap();
        match ix.locate_with_stats(&p) {
            Ok((got, st)) if got == want && st.duplicates == 0 => {}
            Ok((got, st)) => {
                failed += 1;
                rep.fail(
                    format!("locate-{i}"),
                    format!(
                        "pattern \"{}\": expected {} got {} ({} duplicates)",
                        show(&p),
                        want.len(),
                        got.len(),
                        st.duplicates
                    ),
                );
            }
            Err(e) => {
                failed += 1;
                rep.fail(
                    format!("locate-{i}"),
                    format!("pattern \"{}\": {e}", show(&p)),
                );
            }
        }
    }
    rep.group("locate", n_patterns, failed);
    let mut failed = 0;
    for i in 0..n_patterns {
        let len = [1usize, 10, 100][i % 3].min(text.len());
        let p = rng.gen_range(0..=text.len() - len);
        match ix.extract(p as u64, len as u64) {
            Ok(s) if s == text[p..p + len] => {}
            other => {
                failed += 1;
                rep.fail(format!("extract-{i}"), format!("({p}, {len}): {other:?}"));
            }
        }
    }
    rep.group("extract", n_patterns, failed);
    rep
}

/// Builds an index for a generated corpus and verifies it with
/// `n_patterns` patterns whose lengths are drawn from `plen`.
pub fn fuzz_roundtrip(
    spec: &CorpusSpec,
    n_patterns: usize,
    plen: RangeInclusive<usize>,
    seed: u64,
) -> Report {
    let mut rep = Report::default();
    let id = spec.id();
    let text = match gen_corpus(spec) {
        Ok(t) if !t.is_empty() => t,
        Ok(_) => {
            rep.fail(id, "generated corpus is empty".into());
            return rep;
        }
        Err(e) => {
            rep.fail(id, e.to_string());
            return rep;
        }
    };
    let ix = match GrammarIndex::build(&text, &IndexOptions::default()) {
        Ok(ix) => ix,
        Err(e) => {
            rep.fail(id, e.to_string());
            return rep;
        }
    };
    let plens: Vec<usize> = plen.filter(|&m| m >= 1).collect();
    let plens = if plens.is_empty() { vec![1] } else { plens };
    let mut inner = verify_index(&ix, &text, n_patterns, &plens, seed);
    for l in &mut inner.lines {
        *l = l.replacen(' ', &format!(" {id}/"), 1);
    }
    inner
}
