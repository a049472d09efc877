//! Bit-level building blocks: plain and sparse bitvectors, a
//! balanced-parentheses tree, a label sequence, a permutation with sampled
//! inverse and a one-point-per-column range grid.
//!
//! All structures are immutable after construction. Conventions: bitvector
//! positions are 0-based, `rank(i)` counts `[0, i)`, `select(k)` takes a
//! 1-based `k`. Tree preorders are 1-based.

mod bits;
mod grid;
mod intvec;
mod paren;
mod perm;
mod sparse;
mod wavelet;

pub use bits::BitVec;
pub use grid::{GridPoint, RangeGrid};
pub use intvec::{bit_width, IntVec};
pub use paren::ParenTree;
pub use perm::PermInv;
pub use sparse::SparseBitVec;
pub use wavelet::LabelSeq;
