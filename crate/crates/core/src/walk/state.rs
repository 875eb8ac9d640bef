use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::numeric::binomial;

/// A permutation σ of {0, …, m−1}; `mapping[i]` holds σ(i).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Permutation {
    mapping: Vec<usize>,
}

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; mapping.len()];
        for &x in &mapping {
            if x >= mapping.len() || std::mem::replace(&mut seen[x], true) {
                return Err(invalid(format!("{mapping:?} is not a bijection")));
            }
        }
        Ok(Self { mapping })
    }

    pub fn identity(m: usize) -> Self {
        Self {
            mapping: (0..m).collect(),
        }
    }

    /// The transposition exchanging i and j, as a permutation of m points.
    pub fn transposition(m: usize, i: usize, j: usize) -> Result<Self> {
        if i >= m || j >= m || i == j {
            return Err(invalid(format!("({i} {j}) is not a transposition of {m} points")));
        }
        let mut p = Self::identity(m);
        p.mapping.swap(i, j);
        Ok(p)
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }

    pub fn len(&self) -> usize {
        self.mapping.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mapping.is_empty()
    }

    /// Composition (self ∘ other)(i) = self(other(i)).
    pub fn compose(&self, other: &Permutation) -> Result<Self> {
        if self.len() != other.len() {
            return Err(invalid("composing permutations of different sizes"));
        }
        Ok(Self {
            mapping: other.mapping.iter().map(|&i| self.mapping[i]).collect(),
        })
    }

    /// στ for τ = (i j): swaps the images of i and j.
    pub fn times_transposition(&self, i: usize, j: usize) -> Self {
        let mut out = self.clone();
        out.mapping.swap(i, j);
        out
    }

    /// Lexicographic rank among all m! permutations (Lehmer code).
    pub fn rank(&self) -> usize {
        let m = self.len();
        let mut rank = 0;
        for i in 0..m {
            let smaller_later = self.mapping[i + 1..]
                .iter()
                .filter(|&&x| x < self.mapping[i])
                .count();
            rank = rank * (m - i) + smaller_later;
        }
        rank
    }

    pub fn unrank(m: usize, mut rank: usize) -> Self {
        let mut digits = vec![0; m];
        for i in (0..m).rev() {
            let base = m - i;
            digits[i] = rank % base;
            rank /= base;
        }
        let mut pool: Vec<usize> = (0..m).collect();
        Self {
            mapping: digits.into_iter().map(|d| pool.remove(d)).collect(),
        }
    }

    /// The +1 set {i : σ(i) < n} of the balanced sign vector attached to σ.
    pub fn lumped(&self) -> SubsetState {
        let n = self.len() / 2;
        let mask = self
            .mapping
            .iter()
            .enumerate()
            .filter(|(_, &x)| x < n)
            .fold(0u32, |m, (i, _)| m | (1 << i));
        SubsetState { n, mask }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // one-line notation, 1-based
        let parts: Vec<String> = self.mapping.iter().map(|x| (x + 1).to_string()).collect();
        write!(f, "[{}]", parts.join(" "))
    }
}

/// An n-element subset of {0, …, 2n−1}, stored as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubsetState {
    n: usize,
    mask: u32,
}

impl SubsetState {
    pub fn new(n: usize, mask: u32) -> Result<Self> {
        if n == 0 || 2 * n > 32 {
            return Err(invalid(format!("subset half-length {n} out of range")));
        }
        if (2 * n < 32 && mask >> (2 * n) != 0) || mask.count_ones() as usize != n {
            return Err(invalid(format!(
                "mask {mask:#b} is not an {n}-subset of {} points",
                2 * n
            )));
        }
        Ok(Self { n, mask })
    }

    pub fn from_members(n: usize, members: &[usize]) -> Result<Self> {
        let mut mask = 0u32;
        for &i in members {
            if i >= 2 * n {
                return Err(invalid(format!("member {i} outside 0..{}", 2 * n)));
            }
            mask |= 1 << i;
        }
        Self::new(n, mask)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn contains(&self, i: usize) -> bool {
        self.mask & (1 << i) != 0
    }

    pub fn members(&self) -> Vec<usize> {
        (0..2 * self.n).filter(|&i| self.contains(i)).collect()
    }

    /// Exchange an inside element `i` for an outside element `j`.
    pub fn exchanged(&self, i: usize, j: usize) -> Self {
        debug_assert!(self.contains(i) && !self.contains(j));
        Self {
            n: self.n,
            mask: self.mask ^ (1 << i) ^ (1 << j),
        }
    }

    /// Lexicographic rank of the sorted member list among all n-subsets.
    pub fn rank(&self) -> usize {
        let total = 2 * self.n;
        let mut rank = 0u64;
        let mut next = 0usize;
        for (slot, member) in self.members().into_iter().enumerate() {
            let remaining = (self.n - slot - 1) as u64;
            for skipped in next..member {
                rank += binomial((total - skipped - 1) as u64, remaining);
            }
            next = member + 1;
        }
        rank as usize
    }

    pub fn unrank(n: usize, mut rank: usize) -> Self {
        let total = 2 * n;
        let mut mask = 0u32;
        let mut next = 0usize;
        for slot in 0..n {
            let remaining = (n - slot - 1) as u64;
            loop {
                let block = binomial((total - next - 1) as u64, remaining) as usize;
                if rank < block {
                    break;
                }
                rank -= block;
                next += 1;
            }
            mask |= 1 << next;
            next += 1;
        }
        Self { n, mask }
    }
}

impl fmt::Display for SubsetState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.members().iter().map(|x| (x + 1).to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}
