//! A grammar-compressed self-index over byte strings.
//!
//! The text is compressed into a context-free grammar (RePair by default),
//! the grammar is normalized, and the index is laid out over the resulting
//! *grammar tree*: the parse tree of the text where every nonterminal is
//! expanded only at its first occurrence. On top of that tree the index
//! answers
//!
//! - [`GrammarIndex::extract`]: any substring of the text, and
//! - [`GrammarIndex::locate`]: every position where a pattern occurs,
//!
//! in space proportional to the grammar rather than the text.
//!
//! ```
//! use gindex::{GrammarIndex, IndexOptions};
//!
//! let ix = GrammarIndex::build(b"alabaralalabarda", &IndexOptions::default())?;
//! assert_eq!(ix.locate(b"ala")?, vec![0, 6, 8]);
//! assert_eq!(ix.extract(4, 5)?, b"arala");
//! # Ok::<(), gindex::Error>(())
//! ```

mod error;
pub mod extract;
pub mod grammar;
pub mod index;
pub mod oracle;
pub mod search;
pub(crate) mod serial;
pub mod succinct;

pub use error::{Error, Result};
pub use extract::{Descent, Expansion};
pub use grammar::{Grammar, GrammarStats, PreprocessedGrammar, Symbol};
pub use index::{GrammarIndex, IndexOptions, IndexStats};
pub use search::{LocateStats, RangeSearch};
