//! The balanced sign ensemble: sign vectors of length 2n with exactly n
//! plus-ones, and the statistic f(ε) = |Σ aᵢ εᵢ| over it.
//!
//! Exact engines walk the n-subsets of {0, …, 2n−1} (the +1 positions) in
//! lexicographic order, so the state count is C(2n, n) rather than 2^{2n}.
//! The index range is split into fixed-size chunks that are reduced in
//! order, which keeps results bit-for-bit reproducible under rayon.

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::{binomial, CompensatedSum};

/// Default upper limit on the half-length n for exact enumeration.
/// C(28, 14) ≈ 4·10⁷ states.
pub const DEFAULT_ENUMERATION_CAP: usize = 14;

/// Hard limit: subsets are tracked as `u32` bitmasks over 2n positions.
pub const MAX_ENUMERATION_CAP: usize = 16;

const CHUNK: u64 = 1 << 15;

/// Coefficient vector a ∈ ℝ^{2n}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    entries: Vec<f64>,
}

impl WeightVector {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if entries.is_empty() || entries.len() % 2 != 0 {
            return Err(invalid(format!(
                "weight vector must have even positive length 2n, got {}",
                entries.len()
            )));
        }
        if let Some(i) = entries.iter().position(|x| !x.is_finite()) {
            return Err(invalid(format!("weight entry {i} is not finite")));
        }
        Ok(Self { entries })
    }

    /// The all-ones vector of length 2n.
    pub fn ones(n: usize) -> Result<Self> {
        Self::new(vec![1.0; 2 * n])
    }

    /// A uniformly random direction on the unit sphere of ℝ^{2n}.
    pub fn random_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(invalid("half-length n must be at least 1"));
        }
        loop {
            let raw: Vec<f64> = (0..2 * n).map(|_| standard_normal(rng)).collect();
            let norm = raw.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-12 {
                return Self::new(raw.into_iter().map(|x| x / norm).collect());
            }
        }
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// Half-length n.
    pub fn n(&self) -> usize {
        self.entries.len() / 2
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn sum(&self) -> f64 {
        self.entries.iter().sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.entries.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.entries.iter().map(|x| t * x).collect())
    }

    /// Signed sum Σ_{i∈A} aᵢ − Σ_{i∉A} aᵢ for a +1-position bitmask A.
    #[inline]
    pub(crate) fn signed_sum_mask(&self, mask: u32) -> f64 {
        let mut inside = 0.0;
        let mut outside = 0.0;
        for (i, a) in self.entries.iter().enumerate() {
            if mask & (1 << i) != 0 {
                inside += a;
            } else {
                outside += a;
            }
        }
        inside - outside
    }
}

fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    // Box–Muller; u1 drawn from (0, 1]
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// An element of the balanced ensemble: 2n signs, exactly n of them +1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BalancedSign {
    signs: Vec<i8>,
}

impl BalancedSign {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() || signs.len() % 2 != 0 {
            return Err(invalid("sign vector must have even positive length"));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(invalid("sign entries must be +1 or -1"));
        }
        let plus = signs.iter().filter(|&&s| s == 1).count();
        if plus * 2 != signs.len() {
            return Err(invalid(format!(
                "sign vector has {plus} plus-ones, expected {}",
                signs.len() / 2
            )));
        }
        Ok(Self { signs })
    }

    /// Builds the vector whose +1 entries sit at the set bits of `mask`.
    pub fn from_mask(n: usize, mask: u32) -> Result<Self> {
        Self::new(
            (0..2 * n)
                .map(|i| if mask & (1 << i) != 0 { 1 } else { -1 })
                .collect(),
        )
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn n(&self) -> usize {
        self.signs.len() / 2
    }

    /// Bitmask of the +1 positions.
    pub fn plus_mask(&self) -> u32 {
        self.signs
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == 1)
            .fold(0, |m, (i, _)| m | (1 << i))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    MonteCarlo,
}

/// A moment value with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub value: f64,
    /// Standard error of `value`; always 0 for exact results.
    pub stderr: f64,
    pub method: Method,
    /// Number of states (exact) or draws (Monte Carlo) behind the value.
    pub samples: u64,
}

/// Lexicographic walker over the n-subsets of {0, …, 2n−1}.
#[derive(Debug, Clone)]
struct SubsetCursor {
    positions: Vec<usize>,
    total: usize,
}

impl SubsetCursor {
    /// Cursor positioned at the subset with lexicographic rank `rank`.
    fn at_rank(n: usize, mut rank: u64) -> Self {
        let total = 2 * n;
        let mut positions = Vec::with_capacity(n);
        let mut next = 0usize;
        for slot in 0..n {
            let remaining = n - slot - 1;
            loop {
                // subsets whose current slot is `next`
                let block = binomial((total - next - 1) as u64, remaining as u64);
                if rank < block {
                    break;
                }
                rank -= block;
                next += 1;
            }
            positions.push(next);
            next += 1;
        }
        Self { positions, total }
    }

    fn mask(&self) -> u32 {
        self.positions.iter().fold(0, |m, &p| m | (1 << p))
    }

    /// Moves to the lexicographic successor; false when exhausted.
    fn advance(&mut self) -> bool {
        let n = self.positions.len();
        let mut i = n;
        while i > 0 {
            i -= 1;
            if self.positions[i] < self.total - n + i {
                self.positions[i] += 1;
                for j in i + 1..n {
                    self.positions[j] = self.positions[j - 1] + 1;
                }
                return true;
            }
        }
        false
    }
}

/// Iterator over the balanced ensemble, in lexicographic order of the
/// +1-position subset.
#[derive(Debug, Clone)]
pub struct BalancedIter {
    n: usize,
    cursor: Option<SubsetCursor>,
}

impl Iterator for BalancedIter {
    type Item = BalancedSign;

    fn next(&mut self) -> Option<BalancedSign> {
        let cursor = self.cursor.as_mut()?;
        let out = BalancedSign::from_mask(self.n, cursor.mask()).expect("cursor yields n-subsets");
        if !cursor.advance() {
            self.cursor = None;
        }
        Some(out)
    }
}

/// Exact engine over the balanced ensemble with a configurable size cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ensemble {
    cap: usize,
}

impl Default for Ensemble {
    fn default() -> Self {
        Self {
            cap: DEFAULT_ENUMERATION_CAP,
        }
    }
}

impl Ensemble {
    pub fn with_cap(cap: usize) -> Result<Self> {
        if cap == 0 || cap > MAX_ENUMERATION_CAP {
            return Err(invalid(format!(
                "enumeration cap must lie in 1..={MAX_ENUMERATION_CAP}, got {cap}"
            )));
        }
        Ok(Self { cap })
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn check_n(&self, n: usize) -> Result<()> {
        if n == 0 {
            return Err(invalid("half-length n must be at least 1"));
        }
        if n > self.cap {
            return Err(Error::Capacity {
                what: "balanced-ensemble enumeration half-length",
                requested: n,
                cap: self.cap,
            });
        }
        Ok(())
    }

    /// All C(2n, n) balanced sign vectors, each once.
    pub fn enumerate(&self, n: usize) -> Result<BalancedIter> {
        self.check_n(n)?;
        Ok(BalancedIter {
            n,
            cursor: Some(SubsetCursor::at_rank(n, 0)),
        })
    }

    /// Folds `visit` over every +1 bitmask of the ensemble. Chunks run in
    /// parallel; partial results are merged in chunk order.
    fn fold_masks<T, F, M>(&self, n: usize, init: T, visit: F, merge: M) -> Result<T>
    where
        T: Clone + Send + Sync,
        F: Fn(&mut T, u32) + Sync,
        M: Fn(&mut T, &T),
    {
        self.check_n(n)?;
        let count = binomial(2 * n as u64, n as u64);
        let chunks = count.div_ceil(CHUNK);
        let partials: Vec<T> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let start = c * CHUNK;
                let end = (start + CHUNK).min(count);
                let mut acc = init.clone();
                let mut cursor = SubsetCursor::at_rank(n, start);
                for _ in start..end {
                    visit(&mut acc, cursor.mask());
                    cursor.advance();
                }
                acc
            })
            .collect();
        let mut total = init;
        for part in &partials {
            merge(&mut total, part);
        }
        Ok(total)
    }

    /// Exact E f^p over the ensemble for every p in `ps`, in one pass.
    pub fn exact_moments(&self, a: &WeightVector, ps: &[f64]) -> Result<Vec<f64>> {
        for &p in ps {
            check_order(p)?;
        }
        let n = a.n();
        let count = binomial(2 * n as u64, n as u64) as f64;
        let sums = self.fold_masks(
            n,
            vec![CompensatedSum::new(); ps.len()],
            |acc, mask| {
                let f = a.signed_sum_mask(mask).abs();
                for (slot, &p) in acc.iter_mut().zip(ps) {
                    slot.add(f.powf(p));
                }
            },
            |total, part| {
                for (t, p) in total.iter_mut().zip(part) {
                    t.merge(p);
                }
            },
        )?;
        Ok(sums.iter().map(|s| s.value() / count).collect())
    }

    pub fn exact_moment(&self, a: &WeightVector, p: f64) -> Result<MomentEstimate> {
        let value = self.exact_moments(a, &[p])?[0];
        let n = a.n() as u64;
        Ok(MomentEstimate {
            value,
            stderr: 0.0,
            method: Method::Exact,
            samples: binomial(2 * n, n),
        })
    }

    /// The exact law of g(ε) = Σ aᵢεᵢ on the ensemble, as (value, mass)
    /// pairs sorted by value with coincident values merged.
    pub fn signed_sum_distribution(&self, a: &WeightVector) -> Result<Vec<(f64, f64)>> {
        let n = a.n();
        let mut values = self.fold_masks(
            n,
            Vec::new(),
            |acc: &mut Vec<f64>, mask| acc.push(a.signed_sum_mask(mask)),
            |total, part| total.extend_from_slice(part),
        )?;
        let count = values.len() as f64;
        values.sort_by(f64::total_cmp);
        let mut atoms: Vec<(f64, f64)> = Vec::new();
        for v in values {
            match atoms.last_mut() {
                Some((last, mass)) if *last == v => *mass += 1.0,
                _ => atoms.push((v, 1.0)),
            }
        }
        for atom in &mut atoms {
            atom.1 /= count;
        }
        Ok(atoms)
    }

    /// E[ε₁ε₂] over the ensemble, by exact counting.
    pub fn pair_correlation_exact(&self, n: usize) -> Result<Ratio<i64>> {
        let (agree, disagree) = self.fold_masks(
            n,
            (0i64, 0i64),
            |acc, mask| {
                if (mask & 1 != 0) == (mask & 2 != 0) {
                    acc.0 += 1;
                } else {
                    acc.1 += 1;
                }
            },
            |total, part| {
                total.0 += part.0;
                total.1 += part.1;
            },
        )?;
        Ok(Ratio::new(agree - disagree, agree + disagree))
    }

    /// Exact rational E f^p for integer weights and integer p.
    pub fn exact_moment_rational(&self, weights: &[i64], p: u32) -> Result<BigRational> {
        if weights.is_empty() || weights.len() % 2 != 0 {
            return Err(invalid("weight vector must have even positive length"));
        }
        let n = weights.len() / 2;
        let total = self.fold_masks(
            n,
            BigInt::zero(),
            |acc, mask| {
                let g: i64 = weights
                    .iter()
                    .enumerate()
                    .map(|(i, &w)| if mask & (1 << i) != 0 { w } else { -w })
                    .sum();
                *acc += BigInt::from(g.abs()).pow(p);
            },
            |total, part| *total += part,
        )?;
        let count = BigInt::from(binomial(2 * n as u64, n as u64));
        Ok(BigRational::new(total, count))
    }
}

fn check_order(p: f64) -> Result<()> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(invalid(format!("moment order must be a finite real ≥ 1, got {p}")));
    }
    Ok(())
}

/// Every balanced sign vector of half-length n, default cap.
pub fn enumerate_balanced(n: usize) -> Result<BalancedIter> {
    Ensemble::default().enumerate(n)
}

/// One uniform draw from the ensemble, deterministic in `seed`.
pub fn sample_balanced(n: usize, seed: u64) -> Result<BalancedSign> {
    if n == 0 {
        return Err(invalid("half-length n must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut signs = balanced_template(n);
    signs.shuffle(&mut rng);
    BalancedSign::new(signs)
}

fn balanced_template(n: usize) -> Vec<i8> {
    let mut signs = vec![1i8; n];
    signs.resize(2 * n, -1);
    signs
}

/// |Σ aᵢ εᵢ|.
pub fn f_value(a: &WeightVector, eps: &BalancedSign) -> Result<f64> {
    if a.len() != eps.signs.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            actual: eps.signs.len(),
        });
    }
    Ok(a.entries
        .iter()
        .zip(&eps.signs)
        .map(|(x, &s)| x * s as f64)
        .sum::<f64>()
        .abs())
}

/// Exact E f^p with the default enumeration cap.
pub fn exact_moment(a: &WeightVector, p: f64) -> Result<MomentEstimate> {
    Ensemble::default().exact_moment(a, p)
}

/// E f² = ‖a‖²·2n/(2n−1) − (Σa)²/(2n−1), from E[εᵢεⱼ] = −1/(2n−1), i ≠ j.
pub fn second_moment_closed(a: &WeightVector) -> f64 {
    // ‖a‖²·2n/(2n−1) − (Σa)²/(2n−1), in the centred form 2n/(2n−1)·Σ(aᵢ − ā)²
    let m = a.len() as f64;
    let mean = a.sum() / m;
    let centred: f64 = a.entries().iter().map(|x| (x - mean).powi(2)).sum();
    centred * m / (m - 1.0)
}

/// The value E[εᵢεⱼ] = −1/(2n−1) for i ≠ j, as an exact rational.
pub fn pair_correlation_closed(n: usize) -> Ratio<i64> {
    -Ratio::one() / Ratio::from_integer(2 * n as i64 - 1)
}

/// E[ε₁ε₂] by enumeration with the default cap.
pub fn pair_correlation_exact(n: usize) -> Result<Ratio<i64>> {
    Ensemble::default().pair_correlation_exact(n)
}

/// Monte Carlo estimate of E f^p from `samples` uniform draws.
pub fn mc_moment(a: &WeightVector, p: f64, samples: u64, seed: u64) -> Result<MomentEstimate> {
    check_order(p)?;
    if samples < 2 {
        return Err(invalid("Monte Carlo needs at least 2 samples"));
    }
    let n = a.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut signs = balanced_template(n);
    // Welford
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 1..=samples {
        signs.shuffle(&mut rng);
        let g: f64 = a
            .entries
            .iter()
            .zip(&signs)
            .map(|(x, &s)| x * s as f64)
            .sum();
        let x = g.abs().powf(p);
        let delta = x - mean;
        mean += delta / k as f64;
        m2 += delta * (x - mean);
    }
    let variance = m2 / (samples - 1) as f64;
    Ok(MomentEstimate {
        value: mean,
        stderr: (variance / samples as f64).sqrt(),
        method: Method::MonteCarlo,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::HashSet;

    fn wv(xs: &[f64]) -> WeightVector {
        WeightVector::new(xs.to_vec()).unwrap()
    }

    // brute force over all 2^{2n} sign vectors, independent of the subset walker
    fn brute_force_moment(a: &[f64], p: f64) -> f64 {
        let m = a.len();
        let mut sum = 0.0;
        let mut count = 0usize;
        for bits in 0u32..(1 << m) {
            if bits.count_ones() as usize * 2 != m {
                continue;
            }
            let g: f64 = (0..m)
                .map(|i| if bits >> i & 1 == 1 { a[i] } else { -a[i] })
                .sum();
            sum += g.abs().powf(p);
            count += 1;
        }
        sum / count as f64
    }

    #[test]
    fn enumerate_small_cases() {
        let all: Vec<_> = enumerate_balanced(1).unwrap().collect();
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].signs(), &[1, -1]);
        assert_eq!(all[1].signs(), &[-1, 1]);
        assert_eq!(enumerate_balanced(2).unwrap().count(), 6);
        assert_eq!(enumerate_balanced(7).unwrap().count(), 3432);
    }

    #[test]
    fn enumeration_is_lexicographic_and_distinct() {
        let states: Vec<_> = enumerate_balanced(4).unwrap().collect();
        let positions: Vec<Vec<usize>> = states
            .iter()
            .map(|s| (0..8).filter(|&i| s.signs()[i] == 1).collect())
            .collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]));
        let unique: HashSet<_> = states.iter().collect();
        assert_eq!(unique.len(), 70);
    }

    #[test]
    fn chunk_boundaries_resume_correctly() {
        // C(20,10) = 184756 spans several chunks
        let count = Ensemble::default()
            .fold_masks(10, 0u64, |c, m| {
                assert_eq!(m.count_ones(), 10);
                *c += 1
            }, |t, p| *t += p)
            .unwrap();
        assert_eq!(count, 184_756);
        let mut cursor = SubsetCursor::at_rank(10, 0);
        let mut rank = 0u64;
        while rank < 2 * CHUNK + 3 {
            assert_eq!(SubsetCursor::at_rank(10, rank).positions, cursor.positions);
            cursor.advance();
            rank += 1;
        }
    }

    #[test]
    fn capacity_errors_name_the_cap() {
        let err = enumerate_balanced(15).unwrap_err();
        assert_eq!(
            err,
            Error::Capacity {
                what: "balanced-ensemble enumeration half-length",
                requested: 15,
                cap: 14
            }
        );
        assert!(err.to_string().contains("14"));
        let small = Ensemble::with_cap(3).unwrap();
        assert!(small.exact_moment(&WeightVector::ones(4).unwrap(), 2.0).is_err());
        assert!(Ensemble::with_cap(17).is_err());
        assert!(enumerate_balanced(0).is_err());
    }

    #[test]
    fn sign_vector_validation() {
        assert!(BalancedSign::new(vec![1, 1, -1]).is_err());
        assert!(BalancedSign::new(vec![1, 1, 1, -1]).is_err());
        assert!(BalancedSign::new(vec![1, 0, -1, 1]).is_err());
        assert!(WeightVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(WeightVector::new(vec![1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn f_value_examples() {
        let ones = wv(&[1.0, 1.0, 1.0, 1.0]);
        for eps in enumerate_balanced(2).unwrap() {
            assert_eq!(f_value(&ones, &eps).unwrap(), 0.0);
        }
        let e = BalancedSign::new(vec![1, 1, -1, -1]).unwrap();
        assert_eq!(f_value(&wv(&[1.0, 0.0, 0.0, 0.0]), &e).unwrap(), 1.0);
        let e = BalancedSign::new(vec![1, -1, -1, 1]).unwrap();
        assert_eq!(f_value(&wv(&[1.0, 2.0, 3.0, 4.0]), &e).unwrap(), 0.0);
        assert!(matches!(
            f_value(&wv(&[1.0, 2.0]), &e),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn exact_moment_examples() {
        assert_eq!(exact_moment(&wv(&[1.0; 4]), 2.0).unwrap().value, 0.0);
        let m = exact_moment(&wv(&[1.0, 1.0, 0.0, 0.0]), 2.0).unwrap();
        assert!((m.value - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.stderr, 0.0);
        assert_eq!(m.method, Method::Exact);
        assert_eq!(m.samples, 6);
        assert_eq!(exact_moment(&wv(&[1.0, 0.0, 0.0, 0.0]), 5.0).unwrap().value, 1.0);
        assert!(exact_moment(&wv(&[1.0, 0.0]), 0.5).is_err());
    }

    #[test]
    fn rational_moment_matches_hand_count() {
        let e = Ensemble::default();
        let r = e.exact_moment_rational(&[1, 1, 0, 0], 2).unwrap();
        assert_eq!(r, BigRational::new(4.into(), 3.into()));
        let r = e.exact_moment_rational(&[1, 2, 3, 4], 2).unwrap();
        // closed form: 30·4/3 − 100/3 = 20/3
        assert_eq!(r, BigRational::new(20.into(), 3.into()));
    }

    #[test]
    fn closed_second_moment_examples() {
        assert!((second_moment_closed(&wv(&[1.0, 1.0, 0.0, 0.0])) - 4.0 / 3.0).abs() < 1e-15);
        for n in 1..6 {
            assert!(second_moment_closed(&WeightVector::ones(n).unwrap()).abs() < 1e-12);
            let mut e = vec![0.0; 2 * n];
            e[0] = 1.0;
            assert!((second_moment_closed(&wv(&e)) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn pair_correlation_examples() {
        assert_eq!(pair_correlation_exact(1).unwrap(), Ratio::from_integer(-1));
        assert_eq!(pair_correlation_exact(2).unwrap(), Ratio::new(-1, 3));
        assert_eq!(pair_correlation_exact(3).unwrap(), Ratio::new(-1, 5));
        for n in 1..=7 {
            assert_eq!(pair_correlation_exact(n).unwrap(), pair_correlation_closed(n));
        }
    }

    #[test]
    fn sampling_is_deterministic_and_balanced() {
        let a = sample_balanced(5, 42).unwrap();
        assert_eq!(a, sample_balanced(5, 42).unwrap());
        assert_eq!(a.signs().iter().filter(|&&s| s == 1).count(), 5);
        assert!(sample_balanced(0, 1).is_err());
    }

    #[test]
    fn sampling_n1_is_fair() {
        let trials = 10_000;
        let plus_first = (0..trials)
            .filter(|&s| sample_balanced(1, s).unwrap().signs()[0] == 1)
            .count();
        let freq = plus_first as f64 / trials as f64;
        assert!((freq - 0.5).abs() <= 0.02, "frequency {freq}");
    }

    #[test]
    fn mc_moment_examples() {
        let m = mc_moment(&wv(&[1.0; 4]), 2.0, 1000, 7).unwrap();
        assert_eq!((m.value, m.stderr), (0.0, 0.0));
        let a = wv(&[1.0, 1.0, 0.0, 0.0]);
        let m = mc_moment(&a, 2.0, 100_000, 3).unwrap();
        assert_eq!(m.method, Method::MonteCarlo);
        assert!((m.value - 4.0 / 3.0).abs() <= 4.0 * m.stderr, "{m:?}");
        assert_eq!(m, mc_moment(&a, 2.0, 100_000, 3).unwrap());
        assert!(mc_moment(&a, 2.0, 1, 3).is_err());
    }

    #[test]
    fn signed_sum_distribution_of_small_case() {
        let d = Ensemble::default()
            .signed_sum_distribution(&wv(&[1.0, 1.0, 0.0, 0.0]))
            .unwrap();
        assert_eq!(d, vec![(-2.0, 1.0 / 6.0), (0.0, 4.0 / 6.0), (2.0, 1.0 / 6.0)]);
    }

    proptest! {
        #[test]
        fn exact_moment_matches_brute_force(
            n in 1usize..=5,
            raw in prop::collection::vec(-3.0f64..3.0, 10),
            p in 1.0f64..8.0,
        ) {
            let a = &raw[..2 * n];
            let exact = exact_moment(&wv(a), p).unwrap().value;
            let brute = brute_force_moment(a, p);
            prop_assert!((exact - brute).abs() <= 1e-12 * brute.max(1.0));
        }

        #[test]
        fn second_moment_closed_form_matches_enumeration(
            n in 1usize..=7,
            raw in prop::collection::vec(-5.0f64..5.0, 14),
        ) {
            let a = wv(&raw[..2 * n]);
            let exact = exact_moment(&a, 2.0).unwrap().value;
            let closed = second_moment_closed(&a);
            prop_assert!((exact - closed).abs() <= 1e-12 * exact.abs().max(1e-300) + 1e-13);
            let first = exact_moment(&a, 1.0).unwrap().value;
            prop_assert!(first <= closed.sqrt() * (1.0 + 1e-12));
        }

        #[test]
        fn moments_are_permutation_invariant_and_homogeneous(
            n in 1usize..=6,
            raw in prop::collection::vec(-2.0f64..2.0, 12),
            seed in any::<u64>(),
            t in 0.0f64..4.0,
            p in 1.0f64..6.0,
        ) {
            let a = wv(&raw[..2 * n]);
            let base = exact_moment(&a, p).unwrap().value;
            let mut shuffled = raw[..2 * n].to_vec();
            shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
            let perm = exact_moment(&wv(&shuffled), p).unwrap().value;
            prop_assert!((base - perm).abs() <= 1e-12 * base.max(1e-12));
            let scaled = exact_moment(&a.scaled(t).unwrap(), p).unwrap().value;
            let expect = t.powf(p) * base;
            prop_assert!((scaled - expect).abs() <= 1e-11 * expect.max(1e-12));
        }

        #[test]
        fn samples_are_balanced(n in 1usize..=14, seed in any::<u64>()) {
            let s = sample_balanced(n, seed).unwrap();
            prop_assert_eq!(s.signs().iter().map(|&x| x as i32).sum::<i32>(), 0);
        }
    }
}
