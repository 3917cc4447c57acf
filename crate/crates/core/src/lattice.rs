//! Strip geometry, parity classes and occupation vectors.
//!
//! Heights live in `0..=L` with `L` odd, so the even and odd sub-lattices
//! have the same size `(L+1)/2`. An occupation vector is a strictly
//! increasing tuple of heights of one parity; the lexicographic order of
//! these tuples is the row/column order of every N-walk matrix.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(y: i64) -> Parity {
        if y.rem_euclid(2) == 0 {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn flip(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }

    /// Parity reached after `steps` unit steps.
    pub fn after(self, steps: u32) -> Parity {
        if steps.is_multiple_of(2) {
            self
        } else {
            self.flip()
        }
    }

    fn offset(self) -> i64 {
        match self {
            Parity::Even => 0,
            Parity::Odd => 1,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Parity::Even => f.write_str("even"),
            Parity::Odd => f.write_str("odd"),
        }
    }
}

/// A strip `0 <= y <= L` of odd width `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StripGeometry {
    width: i64,
}

impl StripGeometry {
    pub fn new(width: i64) -> Result<Self> {
        if width < 1 || width % 2 == 0 {
            return Err(Error::InvalidWidth(width));
        }
        Ok(StripGeometry { width })
    }

    pub fn width(&self) -> i64 {
        self.width
    }

    /// Number of heights of either parity, `(L+1)/2`.
    pub fn class_size(&self) -> usize {
        ((self.width + 1) / 2) as usize
    }

    pub fn contains(&self, y: i64) -> bool {
        (0..=self.width).contains(&y)
    }

    /// The heights of parity `p` in increasing order.
    pub fn heights(&self, p: Parity) -> Vec<i64> {
        (0..self.class_size() as i64)
            .map(|i| 2 * i + p.offset())
            .collect()
    }

    /// Position of `y` within [`heights`](Self::heights) of its parity.
    pub fn height_index(&self, y: i64) -> Option<usize> {
        self.contains(y).then_some((y / 2) as usize)
    }

    pub fn check_walkers(&self, n: usize) -> Result<()> {
        let max = self.class_size();
        if n == 0 || n > max {
            return Err(Error::WalkerCount {
                n,
                max,
                width: self.width,
            });
        }
        Ok(())
    }

    /// All occupation vectors of `n` walkers on parity `p`, lexicographically.
    pub fn occupations(&self, p: Parity, n: usize) -> Result<Vec<OccupationVector>> {
        self.check_walkers(n)?;
        let heights = self.heights(p);
        let m = heights.len();
        let mut out = Vec::with_capacity(binomial(m, n) as usize);
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            out.push(OccupationVector {
                heights: idx.iter().map(|&i| heights[i]).collect(),
                parity: p,
            });
            // advance the rightmost index that still has room
            let Some(pos) = (0..n).rev().find(|&i| idx[i] < m - n + i) else {
                break;
            };
            idx[pos] += 1;
            for j in pos + 1..n {
                idx[j] = idx[j - 1] + 1;
            }
        }
        Ok(out)
    }

    /// Lexicographic rank of `v` among the occupations of its parity and length.
    pub fn occupation_index(&self, v: &OccupationVector) -> Result<usize> {
        self.check_occupation(v)?;
        let m = self.class_size();
        let n = v.len();
        let mut rank = 0u64;
        let mut prev: usize = 0;
        for (a, &y) in v.heights.iter().enumerate() {
            let pos = (y / 2) as usize;
            // count tuples whose a-th entry is smaller than pos
            for skipped in prev..pos {
                rank += binomial(m - skipped - 1, n - a - 1);
            }
            prev = pos + 1;
        }
        Ok(rank as usize)
    }

    pub fn check_occupation(&self, v: &OccupationVector) -> Result<()> {
        self.check_walkers(v.len())?;
        if let Some(&y) = v.heights.iter().find(|&&y| !self.contains(y)) {
            return Err(Error::InvalidOccupation {
                heights: v.heights.clone(),
                reason: format!("height {y} outside strip 0..={}", self.width),
            });
        }
        Ok(())
    }
}

/// Strictly increasing heights of `N` walkers in one column, all of one parity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OccupationVector {
    heights: Vec<i64>,
    parity: Parity,
}

impl OccupationVector {
    pub fn new(heights: Vec<i64>) -> Result<Self> {
        let invalid = |reason: &str| Error::InvalidOccupation {
            heights: heights.clone(),
            reason: reason.to_string(),
        };
        let Some(&first) = heights.first() else {
            return Err(invalid("no walkers"));
        };
        if first < 0 {
            return Err(invalid("negative height"));
        }
        let parity = Parity::of(first);
        if heights.iter().any(|&y| Parity::of(y) != parity) {
            return Err(invalid("heights of mixed parity"));
        }
        if heights.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("heights not strictly increasing"));
        }
        Ok(OccupationVector { heights, parity })
    }

    pub fn heights(&self) -> &[i64] {
        &self.heights
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn len(&self) -> usize {
        self.heights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heights.is_empty()
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, y) in self.heights.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{y}")?;
        }
        f.write_str(")")
    }
}

/// Checks that `end` is reachable from `start` in `steps` steps as far as
/// parity and walker count are concerned.
pub fn check_endpoints(start: &OccupationVector, end: &OccupationVector, steps: u32) -> Result<()> {
    if start.len() != end.len() {
        return Err(Error::EndpointLength {
            start: start.len(),
            end: end.len(),
        });
    }
    if start.parity().after(steps) != end.parity() {
        return Err(Error::ParityMismatch {
            start: start.parity(),
            end: end.parity(),
            steps,
        });
    }
    Ok(())
}

pub(crate) fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}
