//! `gindex`: build, query, verify and inspect grammar-compressed indexes.
//!
//! Exit codes: 0 success, 1 I/O or corrupt index, 2 invalid input or
//! arguments, 3 verification found mismatches.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Parser, Subcommand};
use gindex::grammar::{parse_grammar, preprocess, repair, write_grammar};
use gindex::oracle::verify_index;
use gindex::{Error, GrammarIndex, IndexOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "gindex",
    version,
    about = "Grammar-compressed self-index over byte texts"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compress a text with RePair and write its index.
    Build {
        /// Text to index. With --grammar-in, the text the grammar must derive.
        input: PathBuf,
        output: PathBuf,
        /// Add Patricia trees sampling every K-th string.
        #[arg(long, value_name = "K", conflicts_with = "no_patricia")]
        sample_rate: Option<usize>,
        /// Search rows and columns by plain binary search (the default).
        #[arg(long)]
        no_patricia: bool,
        /// Add the path tries used for fast prefix and suffix expansion.
        #[arg(long)]
        with_trie: bool,
        /// Write the compressor's grammar in text form.
        #[arg(long, value_name = "PATH")]
        grammar_out: Option<PathBuf>,
        /// Index this grammar instead of running RePair.
        #[arg(long, value_name = "PATH")]
        grammar_in: Option<PathBuf>,
        /// Sampling step of the inverse permutation.
        #[arg(long, value_name = "T", default_value_t = 32)]
        perm_step: usize,
    },
    /// Print the sorted positions of a pattern, one per line.
    #[command(group(ArgGroup::new("pat").required(true).args(["pattern", "pattern_hex", "pattern_file"])))]
    Locate {
        index: PathBuf,
        #[arg(long)]
        pattern: Option<String>,
        #[arg(long, value_name = "HEX")]
        pattern_hex: Option<String>,
        #[arg(long, value_name = "PATH")]
        pattern_file: Option<PathBuf>,
        /// Print only the number of occurrences.
        #[arg(long)]
        count: bool,
    },
    /// Write T[from..from+len] to stdout.
    Extract {
        index: PathBuf,
        #[arg(long)]
        from: u64,
        #[arg(long)]
        len: u64,
    },
    /// Check locate and extract against the plain text.
    Verify {
        text: PathBuf,
        index: PathBuf,
        #[arg(long, default_value_t = 1000)]
        patterns: usize,
        #[arg(long, default_value_t = 10)]
        plen: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Space used by each structure.
    Stats { index: PathBuf },
    /// Time locate and extract on patterns drawn from the index itself.
    Bench {
        index: PathBuf,
        #[arg(long, default_value_t = 100)]
        queries: usize,
        #[arg(long, default_value_t = 10)]
        plen: u64,
        #[arg(long, default_value_t = 100)]
        extract_len: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Run the query battery on this many threads at once.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
}

struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Failure {
            code: 2,
            msg: msg.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) | Error::Format(_) | Error::Version { .. } | Error::Checksum { .. } => 1,
            _ => 2,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        // A closed stdout (`gindex locate ... | head`) is not an error.
        let code = if e.kind() == io::ErrorKind::BrokenPipe {
            0
        } else {
            1
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

type Outcome = Result<(), Failure>;

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure {
        code: 1,
        msg: format!("{}: {e}", path.display()),
    })
}

fn load(path: &Path) -> Result<GrammarIndex, Failure> {
    GrammarIndex::from_bytes(&read(path)?).map_err(|e| {
        let f = Failure::from(e);
        Failure {
            msg: format!("{}: {}", path.display(), f.msg),
            ..f
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn build(
    input: &Path,
    output: &Path,
    sample_rate: Option<usize>,
    with_trie: bool,
    grammar_out: Option<&Path>,
    grammar_in: Option<&Path>,
    perm_step: usize,
) -> Outcome {
    let text = read(input)?;
    if text.is_empty() {
        return Err(Failure::input(format!(
            "{}: input is empty",
            input.display()
        )));
    }
    let grammar = match grammar_in {
        Some(p) => {
            let src = String::from_utf8(read(p)?)
                .map_err(|_| Failure::input(format!("{}: not UTF-8", p.display())))?;
            let g = parse_grammar(&src)?;
            if g.text() != text {
                return Err(Failure::input(format!(
                    "{} does not derive {}",
                    p.display(),
                    input.display()
                )));
            }
            g
        }
        None => repair(&text)?,
    };
    if let Some(p) = grammar_out {
        fs::write(p, write_grammar(&grammar))?;
    }
    let pg = preprocess(grammar);
    for w in pg.warnings() {
        eprintln!("warning: {w}");
    }
    let opts = IndexOptions {
        with_trie,
        patricia: sample_rate,
        perm_step,
    };
    let ix = GrammarIndex::from_grammar(&pg, &opts)?;
    ix.save_file(output)?;
    let st = ix.stats();
    let bytes = fs::metadata(output)?.len();
    let mut out = io::stdout().lock();
    writeln!(out, "n          {}", st.n)?;
    writeln!(out, "g          {} (sigma {})", st.g, st.sigma)?;
    writeln!(out, "G repair   {}", st.raw_size)?;
    writeln!(out, "G proc     {}", st.g_tree)?;
    writeln!(out, "height     {}", st.height)?;
    writeln!(out, "index      {bytes} bytes, {:.3} bps", st.bps())?;
    Ok(())
}

fn pattern_of(
    pattern: Option<String>,
    hex_pat: Option<String>,
    file: Option<PathBuf>,
) -> Result<Vec<u8>, Failure> {
    let p = match (pattern, hex_pat, file) {
        (Some(s), _, _) => s.into_bytes(),
        (_, Some(h), _) => {
            hex::decode(h.trim()).map_err(|e| Failure::input(format!("--pattern-hex: {e}")))?
        }
        (_, _, Some(f)) => read(&f)?,
        _ => unreachable!("clap requires one pattern source"),
    };
    if p.is_empty() {
        return Err(Error::EmptyPattern.into());
    }
    Ok(p)
}

fn locate(index: &Path, pattern: &[u8], count: bool) -> Outcome {
    let ix = load(index)?;
    let occ = ix.locate(pattern)?;
    let mut out = io::BufWriter::new(io::stdout().lock());
    if count {
        writeln!(out, "{}", occ.len())?;
    } else {
        for p in occ {
            writeln!(out, "{p}")?;
        }
    }
    out.flush()?;
    Ok(())
}

fn extract(index: &Path, from: u64, len: u64) -> Outcome {
    let ix = load(index)?;
    let s = ix.extract(from, len)?;
    let mut out = io::stdout().lock();
    out.write_all(&s)?;
    out.flush()?;
    Ok(())
}

fn verify(text: &Path, index: &Path, patterns: usize, plen: usize, seed: u64) -> Outcome {
    let ix = load(index)?;
    let t = read(text)?;
    if t.len() as u64 != ix.n() {
        return Err(Failure::input(format!(
            "{} has {} bytes but the index covers {}",
            text.display(),
            t.len(),
            ix.n()
        )));
    }
    if plen == 0 {
        return Err(Failure::input("--plen must be at least 1"));
    }
    let report = verify_index(&ix, &t, patterns, &[plen], seed);
    print!("{report}");
    if report.passed() {
        Ok(())
    } else {
        Err(Failure {
            code: 3,
            msg: format!("{} mismatches", report.failures),
        })
    }
}

fn stats(index: &Path) -> Outcome {
    let ix = load(index)?;
    let st = ix.stats();
    let mut out = io::stdout().lock();
    writeln!(out, "n            {}", st.n)?;
    writeln!(out, "g            {}", st.g)?;
    writeln!(out, "sigma        {}", st.sigma)?;
    writeln!(out, "G repair     {}", st.raw_size)?;
    writeln!(out, "G proc       {}", st.g_tree)?;
    writeln!(out, "height       {}", st.height)?;
    let parts = [
        ("tree", st.tree_bits),
        ("leaf labels", st.xprime_bits),
        ("terminals", st.y_bits),
        ("permutation", st.pi_bits),
        ("phrases", st.l_bits),
        ("grid", st.grid_bits),
        ("path tries", st.trie_bits),
        ("patricia", st.patricia_bits),
    ];
    for (name, bits) in parts {
        writeln!(out, "{name:<12} {bits} bits")?;
    }
    writeln!(out, "total        {} bits", st.total_bits())?;
    writeln!(out, "bps          {:.4}", st.bps())?;
    Ok(())
}

struct Timing {
    locate_secs: f64,
    occurrences: usize,
    extract_secs: f64,
    symbols: u64,
}

fn battery(
    ix: &GrammarIndex,
    queries: usize,
    plen: u64,
    extract_len: u64,
    seed: u64,
) -> Result<Timing, Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = ix.n();
    let plen = plen.min(n);
    let patterns: Vec<Vec<u8>> = (0..queries)
        .map(|_| ix.extract(rng.gen_range(0..=n - plen), plen))
        .collect::<Result<_, _>>()?;
    let t = Instant::now();
    let mut occurrences = 0;
    for p in &patterns {
        occurrences += ix.locate(p)?.len();
    }
    let locate_secs = t.elapsed().as_secs_f64();
    let elen = extract_len.min(n);
    let starts: Vec<u64> = (0..queries).map(|_| rng.gen_range(0..=n - elen)).collect();
    let t = Instant::now();
    for &s in &starts {
        ix.extract(s, elen)?;
    }
    Ok(Timing {
        locate_secs,
        occurrences,
        extract_secs: t.elapsed().as_secs_f64(),
        symbols: elen * queries as u64,
    })
}

fn bench(
    index: &Path,
    queries: usize,
    plen: u64,
    extract_len: u64,
    seed: u64,
    threads: usize,
) -> Outcome {
    if queries == 0 {
        return Err(Failure::input("--queries must be at least 1"));
    }
    if plen == 0 {
        return Err(Failure::input("--plen must be at least 1"));
    }
    let ix = load(index)?;
    let threads = threads.max(1);
    let results: Vec<Result<Timing, Error>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|i| {
                let ix = &ix;
                s.spawn(move || battery(ix, queries, plen, extract_len, seed + i as u64))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("bench thread"))
            .collect()
    });
    let mut out = io::stdout().lock();
    for (i, r) in results.into_iter().enumerate() {
        let t = r?;
        let per_occ = t.locate_secs * 1e6 / t.occurrences.max(1) as f64;
        let per_sym = t.extract_secs * 1e6 / t.symbols.max(1) as f64;
        writeln!(
            out,
            "thread {i}: locate {queries} patterns of length {plen}: {} occurrences, {per_occ:.3} us/occurrence",
            t.occurrences
        )?;
        writeln!(
            out,
            "thread {i}: extract {queries} x {extract_len} bytes: {per_sym:.4} us/symbol"
        )?;
    }
    Ok(())
}

fn run(cli: Cli) -> Outcome {
    match cli.cmd {
        Cmd::Build {
            input,
            output,
            sample_rate,
            no_patricia: _,
            with_trie,
            grammar_out,
            grammar_in,
            perm_step,
        } => build(
            &input,
            &output,
            sample_rate,
            with_trie,
            grammar_out.as_deref(),
            grammar_in.as_deref(),
            perm_step,
        ),
        Cmd::Locate {
            index,
            pattern,
            pattern_hex,
            pattern_file,
            count,
        } => {
            let p = pattern_of(pattern, pattern_hex, pattern_file)?;
            locate(&index, &p, count)
        }
        Cmd::Extract { index, from, len } => extract(&index, from, len),
        Cmd::Verify {
            text,
            index,
            patterns,
            plen,
            seed,
        } => verify(&text, &index, patterns, plen, seed),
        Cmd::Stats { index } => stats(&index),
        Cmd::Bench {
            index,
            queries,
            plen,
            extract_len,
            seed,
            threads,
        } => bench(&index, queries, plen, extract_len, seed, threads),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) if f.code == 0 => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("gindex: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
