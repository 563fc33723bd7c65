//! Følner windows in `Z` and `Z^d`.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use num_rational::Ratio;

use crate::error::{Error, Result};

/// A sequence of finite averaging windows `Phi_1, Phi_2, ...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FolnerSequence {
    /// `Phi_N = {1, ..., N}`.
    Intervals,
    /// `Phi_N = {1, ..., N}^d`.
    Boxes(usize),
    /// Explicit windows in `Z`; `Phi_N` is the `N`-th entry.
    Custom(Vec<Vec<i64>>),
}

impl FolnerSequence {
    pub fn custom(sets: Vec<Vec<i64>>) -> Result<Self> {
        if sets.is_empty() {
            return Err(Error::InvalidArgument(
                "custom Følner sequence needs at least one set",
            ));
        }
        let mut out = Vec::with_capacity(sets.len());
        for mut s in sets {
            s.sort_unstable();
            s.dedup();
            if s.is_empty() {
                return Err(Error::InvalidArgument("Følner sets must be non-empty"));
            }
            out.push(s);
        }
        Ok(FolnerSequence::Custom(out))
    }

    pub fn boxes(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("box dimension must be positive"));
        }
        Ok(FolnerSequence::Boxes(d))
    }

    pub fn dimension(&self) -> usize {
        match self {
            FolnerSequence::Boxes(d) => *d,
            _ => 1,
        }
    }

    /// Largest valid index, if finite.
    pub fn max_index(&self) -> Option<u64> {
        match self {
            FolnerSequence::Custom(sets) => Some(sets.len() as u64),
            _ => None,
        }
    }

    fn check_index(&self, n: u64) -> Result<()> {
        if n == 0 || self.max_index().is_some_and(|m| n > m) {
            return Err(Error::InvalidArgument("Følner index out of range"));
        }
        Ok(())
    }

    /// `|Phi_N|`.
    pub fn size(&self, n: u64) -> Result<u64> {
        self.check_index(n)?;
        Ok(match self {
            FolnerSequence::Intervals => n,
            FolnerSequence::Boxes(d) => n.pow(*d as u32),
            FolnerSequence::Custom(sets) => sets[n as usize - 1].len() as u64,
        })
    }

    /// Elements of `Phi_N` in summation order: increasing, row-major for boxes
    /// (last coordinate fastest).
    pub fn elements(&self, n: u64) -> Result<Vec<Vec<i64>>> {
        self.check_index(n)?;
        Ok(match self {
            FolnerSequence::Intervals => (1..=n as i64).map(|g| vec![g]).collect(),
            FolnerSequence::Boxes(d) => {
                let d = *d;
                let total = n.pow(d as u32);
                let mut out = Vec::with_capacity(total as usize);
                let mut cur = vec![1i64; d];
                for _ in 0..total {
                    out.push(cur.clone());
                    for k in (0..d).rev() {
                        if cur[k] < n as i64 {
                            cur[k] += 1;
                            break;
                        }
                        cur[k] = 1;
                    }
                }
                out
            }
            FolnerSequence::Custom(sets) => sets[n as usize - 1].iter().map(|&g| vec![g]).collect(),
        })
    }

    /// `|Phi_N ∩ (Phi_N - g)| / |Phi_N|`.
    pub fn folner_ratio(&self, g: &[i64], n: u64) -> Result<Ratio<u64>> {
        let size = self.size(n)?;
        if g.len() != self.dimension() {
            return Err(Error::InvalidArgument("shift has the wrong dimension"));
        }
        let overlap = match self {
            FolnerSequence::Intervals | FolnerSequence::Boxes(_) => g
                .iter()
                .map(|&gi| n.saturating_sub(gi.unsigned_abs()))
                .product::<u64>(),
            FolnerSequence::Custom(sets) => {
                let set = &sets[n as usize - 1];
                set.iter()
                    .filter(|&&a| set.binary_search(&(a + g[0])).is_ok())
                    .count() as u64
            }
        };
        Ok(Ratio::new(overlap, size))
    }

    /// `max_{2 <= N <= maxN} |∪_{K<N} Phi_K^{-1} Phi_N| / |Phi_N|`, the
    /// smallest constant certifying temperedness up to `maxN`.
    pub fn tempered_bound(&self, max_n: u64) -> Result<Ratio<u64>> {
        if max_n < 2 {
            return Err(Error::InvalidArgument("tempered bound needs maxN >= 2"));
        }
        let mut best = Ratio::new(0u64, 1);
        match self {
            FolnerSequence::Intervals | FolnerSequence::Boxes(_) => {
                // Phi_K^{-1} Phi_N = {1-K, ..., N-1}^d; the union over K < N is
                // {2-N, ..., N-1}^d of size (2N-2)^d.
                let d = self.dimension() as u32;
                for n in 2..=max_n {
                    let r = Ratio::new((2 * n - 2).pow(d), n.pow(d));
                    if r > best {
                        best = r;
                    }
                }
            }
            FolnerSequence::Custom(sets) => {
                let last = max_n.min(sets.len() as u64);
                for n in 2..=last {
                    let target = &sets[n as usize - 1];
                    let mut union = BTreeSet::new();
                    for earlier in &sets[..n as usize - 1] {
                        for a in earlier {
                            for b in target {
                                union.insert(b - a);
                            }
                        }
                    }
                    let r = Ratio::new(union.len() as u64, target.len() as u64);
                    if r > best {
                        best = r;
                    }
                }
            }
        }
        Ok(best)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_examples() {
        let iv = FolnerSequence::Intervals;
        assert_eq!(iv.folner_ratio(&[1], 10).unwrap(), Ratio::new(9, 10));
        assert_eq!(iv.folner_ratio(&[0], 37).unwrap(), Ratio::new(1, 1));
        assert_eq!(iv.folner_ratio(&[-12], 10).unwrap(), Ratio::new(0, 1));
        let bx = FolnerSequence::Boxes(2);
        assert_eq!(bx.folner_ratio(&[1, 0], 10).unwrap(), Ratio::new(90, 100));
        assert!(bx.folner_ratio(&[1], 10).is_err());
    }

    #[test]
    fn box_elements_are_row_major() {
        let bx = FolnerSequence::Boxes(2);
        let els = bx.elements(2).unwrap();
        assert_eq!(els, vec![vec![1, 1], vec![1, 2], vec![2, 1], vec![2, 2]]);
    }

    #[test]
    fn custom_sets_validate() {
        assert!(FolnerSequence::custom(vec![]).is_err());
        assert!(FolnerSequence::custom(vec![vec![1], vec![]]).is_err());
        let c = FolnerSequence::custom(vec![vec![1], vec![2, 1, 2]]).unwrap();
        assert_eq!(c.size(2).unwrap(), 2);
        assert!(c.size(3).is_err());
        assert!(c.size(0).is_err());
    }

    #[test]
    fn intervals_tempered_example() {
        let b = FolnerSequence::Intervals.tempered_bound(100).unwrap();
        assert_eq!(b, Ratio::new(198, 100));
    }
}
