//! Labeled binary relation with exactly one point per column.

use super::intvec::IntVec;
use super::wavelet::LabelSeq;
use crate::serial::{Reader, Writer};
use crate::{Error, Result};

/// A point reported by [`RangeGrid::report`]. Columns and rows are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct GridPoint {
    pub col: usize,
    pub row: u64,
    pub label: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RangeGrid {
    rows: LabelSeq,
    labels: IntVec,
}

impl RangeGrid {
    /// `rows[c]` and `labels[c]` describe the point of column `c + 1`.
    pub fn new(rows: &[u64], labels: &[u64]) -> Self {
        assert_eq!(rows.len(), labels.len());
        RangeGrid {
            rows: LabelSeq::new(rows),
            labels: IntVec::from_slice(labels),
        }
    }

    pub fn num_cols(&self) -> usize {
        self.labels.len()
    }

    /// Label of column `c` (1-based).
    pub fn label(&self, c: usize) -> u64 {
        self.labels.get(c - 1)
    }

    pub fn row(&self, c: usize) -> u64 {
        self.rows.access(c - 1)
    }

    /// Every point with `r1 <= row <= r2` and `c1 <= col <= c2`. Empty
    /// ranges (`r1 > r2` or `c1 > c2`) report nothing.
    ///
    /// # Errors
    /// If a nonempty column range reaches outside `1..=num_cols`.
    pub fn report(&self, r1: u64, r2: u64, c1: usize, c2: usize) -> Result<Vec<GridPoint>> {
        let mut out = Vec::new();
        self.report_with(r1, r2, c1, c2, |p| out.push(p))?;
        Ok(out)
    }

    pub fn report_with(
        &self,
        r1: u64,
        r2: u64,
        c1: usize,
        c2: usize,
        mut f: impl FnMut(GridPoint),
    ) -> Result<()> {
        if c1 > c2 || r1 > r2 {
            return Ok(());
        }
        if c1 == 0 || c2 > self.num_cols() {
            return Err(Error::OutOfRange {
                start: c1 as u64,
                end: c2 as u64,
                len: self.num_cols() as u64,
            });
        }
        self.rows.range_report(c1 - 1, c2, r1, r2, &mut |i, row| {
            f(GridPoint {
                col: i + 1,
                row,
                label: self.labels.get(i),
            })
        });
        Ok(())
    }

    pub fn size_in_bits(&self) -> usize {
        self.rows.size_in_bits() + self.labels.size_in_bits()
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        self.rows.write(w);
        self.labels.write(w);
    }

    pub(crate) fn read(r: &mut Reader) -> Result<Self> {
        let rows = LabelSeq::read(r)?;
        let labels = IntVec::read(r)?;
        if rows.len() != labels.len() {
            return Err(Error::Format("grid row/label count mismatch".into()));
        }
        Ok(RangeGrid { rows, labels })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn small_grid() {
        let g = RangeGrid::new(&[3, 1], &[5, 4]);
        assert_eq!(
            g.report(2, 3, 1, 1).unwrap(),
            vec![GridPoint {
                col: 1,
                row: 3,
                label: 5
            }]
        );
        assert!(g.report(4, 9, 1, 2).unwrap().is_empty());
        assert!(g.report(1, 3, 2, 1).unwrap().is_empty());
        assert!(g.report(1, 3, 1, 3).is_err());
        assert!(g.report(1, 3, 0, 1).is_err());
    }

    #[test]
    fn random_grids_match_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..20 {
            let n = rng.gen_range(1..=1000);
            let nrows = rng.gen_range(1..=500u64);
            let rows: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=nrows)).collect();
            let labels: Vec<u64> = (0..n).map(|_| rng.gen_range(2..=5000)).collect();
            let g = RangeGrid::new(&rows, &labels);
            for _ in 0..200 {
                let c1 = rng.gen_range(1..=n);
                let c2 = rng.gen_range(c1..=n);
                let r1 = rng.gen_range(1..=nrows + 1);
                let r2 = rng.gen_range(r1..=nrows + 1);
                let mut got = g.report(r1, r2, c1, c2).unwrap();
                got.sort();
                let want: Vec<GridPoint> = (c1..=c2)
                    .filter(|&c| (r1..=r2).contains(&rows[c - 1]))
                    .map(|c| GridPoint {
                        col: c,
                        row: rows[c - 1],
                        label: labels[c - 1],
                    })
                    .collect();
                assert_eq!(got, want);
            }
        }
    }
}
