use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::MAX_DIM;

const BINOM_ROWS: usize = MAX_DIM + 2;

const BINOM: [[usize; BINOM_ROWS]; BINOM_ROWS] = {
    let mut t = [[0usize; BINOM_ROWS]; BINOM_ROWS];
    let mut n = 0;
    while n < BINOM_ROWS {
        t[n][0] = 1;
        let mut k = 1;
        while k <= n {
            t[n][k] = t[n - 1][k - 1] + if k < n { t[n - 1][k] } else { 0 };
            k += 1;
        }
        n += 1;
    }
    t
};

/// Binomial coefficient `C(n, k)`, zero when `k > n`.
pub fn binom(n: usize, k: usize) -> usize {
    if k > n {
        0
    } else if n < BINOM_ROWS {
        BINOM[n][k]
    } else {
        (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
    }
}

/// Strictly increasing tuple of axis indices, the label of the basis element
/// `e_{i1} ∧ … ∧ e_{ip}`.
///
/// Stored as a bit mask; `n ≤ 12` always fits in 16 bits.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(u16);

impl MultiIndex {
    pub const EMPTY: MultiIndex = MultiIndex(0);

    /// Builds an index from strictly increasing axes in `[0, n)`.
    pub fn new(axes: &[usize], n: usize) -> Result<Self> {
        let invalid = |reason| Error::InvalidMultiIndex {
            axes: axes.to_vec(),
            n,
            reason,
        };
        if n > MAX_DIM {
            return Err(Error::DimensionTooLarge(n));
        }
        let mut mask = 0u16;
        for (pos, &a) in axes.iter().enumerate() {
            if a >= n {
                return Err(invalid("axis out of range"));
            }
            if pos > 0 && axes[pos - 1] >= a {
                return Err(invalid("axes must be strictly increasing"));
            }
            mask |= 1 << a;
        }
        Ok(MultiIndex(mask))
    }

    /// Sorts arbitrary axes, returning the permutation sign, or `None` when an
    /// axis repeats.
    pub fn sorted(axes: &[usize]) -> Option<(i64, MultiIndex)> {
        let mut mask = 0u16;
        let mut sign = 1i64;
        for &a in axes {
            debug_assert!(a < MAX_DIM);
            let bit = 1u16 << a;
            if mask & bit != 0 {
                return None;
            }
            // every already-placed larger axis is an inversion
            if (mask & !(bit | (bit - 1))).count_ones() % 2 == 1 {
                sign = -sign;
            }
            mask |= bit;
        }
        Some((sign, MultiIndex(mask)))
    }

    pub fn from_mask(mask: u16) -> Self {
        MultiIndex(mask)
    }

    pub fn mask(self) -> u16 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, axis: usize) -> bool {
        axis < 16 && self.0 & (1 << axis) != 0
    }

    pub fn axes(self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut m = self.0;
        std::iter::from_fn(move || {
            if m == 0 {
                None
            } else {
                let a = m.trailing_zeros() as usize;
                m &= m - 1;
                Some(a)
            }
        })
    }

    /// Colexicographic rank among indices of the same length.
    pub fn rank(self) -> usize {
        self.iter()
            .enumerate()
            .map(|(i, a)| binom(a, i + 1))
            .sum()
    }

    pub fn complement(self, n: usize) -> Self {
        MultiIndex(!self.0 & full_mask(n))
    }

    pub fn is_disjoint(self, other: MultiIndex) -> bool {
        self.0 & other.0 == 0
    }

    pub fn union(self, other: MultiIndex) -> Self {
        MultiIndex(self.0 | other.0)
    }

    pub fn with(self, axis: usize) -> Self {
        MultiIndex(self.0 | (1 << axis))
    }

    /// Number of axes of `self` strictly below `axis`.
    pub fn count_below(self, axis: usize) -> usize {
        (self.0 & ((1u16 << axis) - 1)).count_ones() as usize
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

impl Serialize for MultiIndex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for MultiIndex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let axes = Vec::<usize>::deserialize(d)?;
        MultiIndex::new(&axes, MAX_DIM).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn full_mask(n: usize) -> u16 {
    ((1u32 << n) - 1) as u16
}

/// Sign of the permutation sorting the concatenation `(a, b)` of two disjoint
/// indices into increasing order.
pub fn shuffle_sign(a: MultiIndex, b: MultiIndex) -> i64 {
    let mut inversions = 0u32;
    for y in b.iter() {
        inversions += (a.0 >> (y + 1)).count_ones();
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// All indices of length `p` over `n` axes, in colexicographic order (which is
/// increasing mask order).
pub fn basis(n: usize, p: usize) -> Vec<MultiIndex> {
    let mut out = Vec::with_capacity(binom(n, p));
    if p > n {
        return out;
    }
    if p == 0 {
        out.push(MultiIndex::EMPTY);
        return out;
    }
    let limit = 1u32 << n;
    let mut m: u32 = (1 << p) - 1;
    while m < limit {
        out.push(MultiIndex(m as u16));
        // Gosper's hack: next integer with the same popcount
        let c = m & m.wrapping_neg();
        let r = m + c;
        m = (((r ^ m) >> 2) / c) | r;
    }
    out
}
