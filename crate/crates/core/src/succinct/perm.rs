//! Permutation with sampled inverse.
//!
//! Along every cycle of length greater than `t`, every `t`-th element keeps
//! a pointer `t` steps back. `inverse(i)` walks forward from `i` until it
//! meets a sampled element, jumps back, and walks forward again until it
//! reaches the predecessor of `i`: at most `t` applications of the
//! permutation in total.

use super::bits::BitVec;
use super::intvec::IntVec;
use crate::serial::{Reader, Writer};
use crate::{Error, Result};

#[derive(Clone, Debug, Default)]
pub struct PermInv {
    /// `perm[i - 1] = π(i) - 1`.
    perm: IntVec,
    step: usize,
    sampled: BitVec,
    back: IntVec,
}

impl PartialEq for PermInv {
    fn eq(&self, other: &Self) -> bool {
        self.perm == other.perm && self.step == other.step
    }
}

impl PermInv {
    /// `values` is `π(1), ..., π(M)`, a permutation of `1..=M`.
    ///
    /// # Errors
    /// If `values` is not a permutation or `step == 0`.
    pub fn new(values: &[u64], step: usize) -> Result<Self> {
        if step == 0 {
            return Err(Error::Format(
                "permutation sample step must be positive".into(),
            ));
        }
        let m = values.len();
        let mut seen = vec![false; m];
        for &v in values {
            if v == 0 || v as usize > m || std::mem::replace(&mut seen[v as usize - 1], true) {
                return Err(Error::Format("not a permutation".into()));
            }
        }
        let zero_based: Vec<u64> = values.iter().map(|&v| v - 1).collect();
        let perm = IntVec::from_slice(&zero_based);

        let mut visited = vec![false; m];
        let mut back_of: Vec<(usize, usize)> = Vec::new();
        let mut cycle = Vec::new();
        for start in 0..m {
            if visited[start] {
                continue;
            }
            cycle.clear();
            let mut x = start;
            while !visited[x] {
                visited[x] = true;
                cycle.push(x);
                x = zero_based[x] as usize;
            }
            if cycle.len() <= step {
                continue;
            }
            let samples: Vec<usize> = (0..cycle.len()).step_by(step).collect();
            for (k, &idx) in samples.iter().enumerate() {
                let prev = if k == 0 {
                    *samples.last().unwrap()
                } else {
                    samples[k - 1]
                };
                back_of.push((cycle[idx], cycle[prev]));
            }
        }
        back_of.sort_unstable();
        let sampled_pos: Vec<usize> = back_of.iter().map(|&(x, _)| x).collect();
        let back: Vec<u64> = back_of.iter().map(|&(_, b)| b as u64).collect();
        Ok(PermInv {
            perm,
            step,
            sampled: BitVec::from_positions(m, &sampled_pos),
            back: IntVec::from_slice(&back),
        })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn step(&self) -> usize {
        self.step
    }

    /// `π(i)` for `1 <= i <= M`.
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.perm.get(i - 1) as usize + 1
    }

    /// `π⁻¹(i)`.
    pub fn inverse(&self, i: usize) -> usize {
        self.inverse_counted(i).0
    }

    /// `π⁻¹(i)` together with the number of applications of `π` used.
    pub fn inverse_counted(&self, i: usize) -> (usize, usize) {
        assert!(
            i >= 1 && i <= self.len(),
            "index {i} out of range {}",
            self.len()
        );
        let target = i - 1;
        let mut x = target;
        let mut jumped = false;
        let mut steps = 0;
        loop {
            if !jumped && self.sampled.get(x) {
                x = self.back.get(self.sampled.rank1(x)) as usize;
                jumped = true;
                continue;
            }
            let y = self.perm.get(x) as usize;
            steps += 1;
            if y == target {
                return (x + 1, steps);
            }
            x = y;
        }
    }

    pub fn size_in_bits(&self) -> usize {
        self.perm.size_in_bits() + self.sampled.size_in_bits() + self.back.size_in_bits()
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.u32(self.step as u32);
        w.u64(self.perm.len() as u64);
        for x in self.perm.iter() {
            w.u64(x + 1);
        }
    }

    pub(crate) fn read(r: &mut Reader) -> Result<Self> {
        let step = r.u32()? as usize;
        let m = r.len_u64()?;
        let mut values = Vec::with_capacity(r.bounded_capacity(m, 8)?);
        for _ in 0..m {
            values.push(r.u64()?);
        }
        Self::new(&values, step)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check(values: &[u64], step: usize) {
        let p = PermInv::new(values, step).unwrap();
        for i in 1..=values.len() {
            assert_eq!(p.apply(i), values[i - 1] as usize);
            let (inv, steps) = p.inverse_counted(p.apply(i));
            assert_eq!(inv, i);
            assert!(steps <= step, "inverse took {steps} > {step} steps");
        }
    }

    #[test]
    fn random_permutations_all_steps() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for m in [1usize, 2, 3, 10, 100, 1000] {
            let mut v: Vec<u64> = (1..=m as u64).collect();
            v.shuffle(&mut rng);
            for t in [1, 4, 32] {
                check(&v, t);
            }
        }
        let mut v: Vec<u64> = (1..=100_000).collect();
        v.shuffle(&mut rng);
        check(&v, 32);
    }

    #[test]
    fn single_long_cycle_and_identity() {
        let m = 1000u64;
        let cycle: Vec<u64> = (1..=m).map(|i| i % m + 1).collect();
        for t in [1, 4, 32, 999, 1000, 5000] {
            check(&cycle, t);
        }
        let id: Vec<u64> = (1..=m).collect();
        check(&id, 4);
    }

    #[test]
    fn rejects_non_permutations() {
        assert!(PermInv::new(&[1, 1], 4).is_err());
        assert!(PermInv::new(&[0, 1], 4).is_err());
        assert!(PermInv::new(&[2, 3], 4).is_err());
        assert!(PermInv::new(&[1], 0).is_err());
    }
}
