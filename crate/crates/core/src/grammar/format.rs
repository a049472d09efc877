//! Plain-text grammar interchange.
//!
//! ```text
//! GRM1 6162 X2 4
//! X1 -> 'a 'b
//! X2 -> X1 X1
//! ```
//!
//! The header holds the alphabet as the hex digits of its sorted bytes, the
//! start rule and the text length. Rules are `X<k>` with `k >= 1` and may be
//! listed in any order. A byte is written `'c` when it is a printable ASCII
//! character other than `\`, and `'\xHH` otherwise.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{Grammar, Symbol};
use crate::{Error, Result};

const MAGIC: &str = "GRM1";

/// Renders `gr`; rule `k` of the grammar is written as `X{k+1}`.
pub fn write_grammar(gr: &Grammar) -> String {
    let mut out = String::new();
    let sigma: String = gr.alphabet().iter().map(|b| format!("{b:02x}")).collect();
    let sigma = if sigma.is_empty() {
        "-".to_string()
    } else {
        sigma
    };
    writeln!(out, "{MAGIC} {sigma} X{} {}", gr.start() + 1, gr.n()).unwrap();
    for (k, rhs) in gr.rules().iter().enumerate() {
        write!(out, "X{} ->", k + 1).unwrap();
        for s in rhs {
            match *s {
                Symbol::Rule(r) => write!(out, " X{}", r + 1).unwrap(),
                Symbol::Byte(b) if b.is_ascii_graphic() && b != b'\\' => {
                    write!(out, " '{}", b as char).unwrap()
                }
                Symbol::Byte(b) => write!(out, " '\\x{b:02x}").unwrap(),
            }
        }
        out.push('\n');
    }
    out
}

fn syntax(line: usize, msg: impl Into<String>) -> Error {
    Error::GrammarSyntax {
        line,
        msg: msg.into(),
    }
}

fn parse_rule_id(tok: &str, line: usize) -> Result<u64> {
    tok.strip_prefix('X')
        .and_then(|d| d.parse::<u64>().ok())
        .filter(|&k| k >= 1)
        .ok_or_else(|| syntax(line, format!("expected a rule id `X<k>`, found `{tok}`")))
}

fn parse_byte(tok: &str, line: usize) -> Result<u8> {
    let body = &tok[1..];
    if let Some(hex) = body.strip_prefix("\\x") {
        if hex.len() == 2 {
            if let Ok(b) = u8::from_str_radix(hex, 16) {
                return Ok(b);
            }
        }
    } else if body.len() == 1 && body != "\\" {
        return Ok(body.as_bytes()[0]);
    }
    Err(syntax(line, format!("bad byte literal `{tok}`")))
}

/// Parses the text format back into a [`Grammar`], checking it as
/// [`Grammar::new`] does. The header alphabet must equal the set of bytes
/// used by the rules.
pub fn parse_grammar(src: &str) -> Result<Grammar> {
    let mut lines = src.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, header) = lines
        .by_ref()
        .find(|(_, l)| !l.is_empty())
        .ok_or_else(|| syntax(1, "missing header"))?;
    let head: Vec<&str> = header.split_whitespace().collect();
    if head.len() != 4 || head[0] != MAGIC {
        return Err(syntax(
            1,
            format!("expected `{MAGIC} <alphabet> X<start> <n>`"),
        ));
    }
    let sigma: Vec<u8> = if head[1] == "-" {
        Vec::new()
    } else {
        if !head[1].len().is_multiple_of(2) {
            return Err(syntax(1, "alphabet must be pairs of hex digits"));
        }
        (0..head[1].len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&head[1][i..i + 2], 16))
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| syntax(1, "alphabet must be pairs of hex digits"))?
    };
    let start = parse_rule_id(head[2], 1)?;
    let n: u64 = head[3].parse().map_err(|_| syntax(1, "bad text length"))?;

    let mut defs: Vec<(u64, Vec<String>, usize)> = Vec::new();
    for (no, l) in lines {
        if l.is_empty() {
            continue;
        }
        let mut toks = l.split_whitespace();
        let lhs = parse_rule_id(toks.next().unwrap(), no)?;
        if toks.next() != Some("->") {
            return Err(syntax(no, "expected `->`"));
        }
        defs.push((lhs, toks.map(str::to_string).collect(), no));
    }
    let mut index: HashMap<u64, u32> = HashMap::new();
    for (i, (k, _, no)) in defs.iter().enumerate() {
        if index.insert(*k, i as u32).is_some() {
            return Err(syntax(*no, format!("X{k} is defined twice")));
        }
    }
    let mut used = [false; 256];
    let mut rules = Vec::with_capacity(defs.len());
    for (_, toks, no) in &defs {
        let mut rhs = Vec::with_capacity(toks.len());
        for t in toks {
            if t.starts_with('\'') {
                let b = parse_byte(t, *no)?;
                used[b as usize] = true;
                rhs.push(Symbol::Byte(b));
            } else {
                let k = parse_rule_id(t, *no)?;
                let r = *index
                    .get(&k)
                    .ok_or_else(|| syntax(*no, format!("X{k} is not defined")))?;
                rhs.push(Symbol::Rule(r));
            }
        }
        rules.push(rhs);
    }
    let used: Vec<u8> = (0..=255u8).filter(|&b| used[b as usize]).collect();
    let mut declared = sigma.clone();
    declared.sort_unstable();
    declared.dedup();
    if declared != used || declared.len() != sigma.len() {
        return Err(syntax(
            1,
            "alphabet does not match the bytes used by the rules",
        ));
    }
    let s = *index
        .get(&start)
        .ok_or_else(|| syntax(1, format!("start rule X{start} is not defined")))?;
    Grammar::new(rules, s, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::repair;
    use proptest::prelude::*;

    #[test]
    fn e1_text() {
        let g = repair(b"abab").unwrap();
        let s = write_grammar(&g);
        assert_eq!(s, "GRM1 6162 X2 4\nX1 -> 'a 'b\nX2 -> X1 X1\n");
        assert_eq!(parse_grammar(&s).unwrap(), g);
    }

    #[test]
    fn escapes_and_order() {
        let src = "GRM1 0a205c X9 4\n\nX9 -> X3 X3\nX3 -> '\\x0a '\\x5c\n";
        // missing ' ' from the rules: alphabet mismatch
        assert!(parse_grammar(src).is_err());
        let src = "GRM1 0a5c X9 4\n\nX9 -> X3 X3\nX3 -> '\\x0a '\\x5c\n";
        assert_eq!(parse_grammar(src).unwrap().text(), b"\n\\\n\\");
    }

    #[test]
    fn errors_carry_lines() {
        let cases = [
            ("", 1),
            ("GRM2 61 X1 1\n", 1),
            ("GRM1 61 X1 1\nX1 = 'a\n", 2),
            ("GRM1 61 X1 1\nX1 -> 'a\nX1 -> 'a\n", 3),
            ("GRM1 61 X1 1\nX1 -> X2\n", 2),
            ("GRM1 61 X1 1\nX1 -> 'ab\n", 2),
            ("GRM1 61 X0 1\nX1 -> 'a\n", 1),
        ];
        for (src, line) in cases {
            match parse_grammar(src) {
                Err(Error::GrammarSyntax { line: l, .. }) => assert_eq!(l, line, "{src:?}"),
                other => panic!("{src:?}: {other:?}"),
            }
        }
        // semantic errors come from Grammar::new
        assert!(matches!(
            parse_grammar("GRM1 61 X1 2\nX1 -> 'a\n"),
            Err(Error::Grammar(_))
        ));
        assert!(matches!(
            parse_grammar("GRM1 61 X1 2\nX1 -> 'a X1\n"),
            Err(Error::Grammar(_))
        ));
    }

    proptest! {
        #[test]
        fn round_trip(t in proptest::collection::vec(any::<u8>(), 1..200)) {
            let g = repair(&t).unwrap();
            prop_assert_eq!(parse_grammar(&write_grammar(&g)).unwrap(), g);
        }
    }
}
