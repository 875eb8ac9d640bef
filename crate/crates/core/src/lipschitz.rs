//! The local quadratic-variation semi-norm
//!
//! ```text
//! |||f|||²_∞ = ½ · max_x Σ_y (f(x) − f(y))² P(x, y)
//! ```
//!
//! computed exactly on any chain, together with its closed form for the
//! signed sum g on the lumped transposition walk and the cruder bound
//! 4‖a‖²/n.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensemble::WeightVector;
use crate::error::{invalid, Error, Result};
use crate::walk::{Permutation, ReversibleChain, StateLabels, SubsetState};

/// Relative slack allowed when comparing quantities that agree
/// mathematically but are computed along different floating-point routes.
pub const ROUNDING_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleNormResult {
    pub value: f64,
    /// A state attaining the maximum (smallest index on ties).
    pub witness: usize,
}

/// ½ Σ_y (f(x) − f(y))² P(x, y) at a single state.
pub fn local_variation(chain: &ReversibleChain, fvals: &[f64], x: usize) -> f64 {
    0.5 * chain
        .row(x)
        .map(|(y, p)| (fvals[x] - fvals[y]).powi(2) * p)
        .sum::<f64>()
}

/// Exact |||f|||²_∞ of a function table over the chain's states.
pub fn triple_norm_exact(chain: &ReversibleChain, fvals: &[f64]) -> Result<TripleNormResult> {
    if fvals.len() != chain.len() {
        return Err(Error::LengthMismatch {
            expected: chain.len(),
            actual: fvals.len(),
        });
    }
    if fvals.iter().any(|v| !v.is_finite()) {
        return Err(invalid("function table contains a non-finite value"));
    }
    let (value, witness) = (0..chain.len())
        .into_par_iter()
        .map(|x| (local_variation(chain, fvals, x), x))
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    Ok(TripleNormResult { value, witness })
}

/// g(A) = Σ_{i∈A} aᵢ − Σ_{i∉A} aᵢ tabulated over a lumped or full
/// transposition walk (for permutations, A = {i : σ(i) < n}).
pub fn signed_sum_table(a: &WeightVector, chain: &ReversibleChain) -> Result<Vec<f64>> {
    let n = a.n();
    let check = |got: usize| {
        if got == n {
            Ok(())
        } else {
            Err(Error::LengthMismatch {
                expected: 2 * got,
                actual: a.len(),
            })
        }
    };
    match *chain.labels() {
        StateLabels::Subsets { n: m } => {
            check(m)?;
            Ok((0..chain.len())
                .map(|r| a.signed_sum_mask(SubsetState::unrank(n, r).mask()))
                .collect())
        }
        StateLabels::Permutations { points } => {
            check(points / 2)?;
            Ok((0..chain.len())
                .map(|r| a.signed_sum_mask(Permutation::unrank(points, r).lumped().mask()))
                .collect())
        }
        _ => Err(invalid(
            "signed sums need a chain whose states are subsets or permutations",
        )),
    }
}

fn extremal_subsets(a: &WeightVector) -> [Vec<usize>; 2] {
    let mut order: Vec<usize> = (0..a.len()).collect();
    order.sort_by(|&i, &j| a.entries()[i].total_cmp(&a.entries()[j]));
    let n = a.n();
    let mut low = order[..n].to_vec();
    let mut high = order[n..].to_vec();
    low.sort_unstable();
    high.sort_unstable();
    [low, high]
}

/// (1/n²) · Σ_{i∈A, j∉A} (aᵢ − aⱼ)² = (n‖a‖² − 2·S_A·S_{Aᶜ}) / n².
///
/// Evaluated on the centred entries b = a − ā, where S_{Aᶜ} = −S_A and
/// the expression becomes the cancellation-free (n‖b‖² + 2·S_A²) / n².
pub fn crossing_variation(a: &WeightVector, subset: &[usize]) -> f64 {
    let n = a.n() as f64;
    let mean = a.sum() / a.len() as f64;
    let centred_sq: f64 = a.entries().iter().map(|x| (x - mean).powi(2)).sum();
    let inside: f64 = subset.iter().map(|&i| a.entries()[i] - mean).sum();
    (n * centred_sq + 2.0 * inside * inside) / (n * n)
}

/// The maximal crossing variation and a maximizing subset.
///
/// S_A·S_{Aᶜ} = S_A (Σa − S_A) is concave in S_A, so its minimum over
/// n-subsets sits at an extreme S_A: the n smallest or n largest entries.
pub fn surrogate_maximizer(a: &WeightVector) -> (f64, Vec<usize>) {
    let [low, high] = extremal_subsets(a);
    let (vl, vh) = (crossing_variation(a, &low), crossing_variation(a, &high));
    if vh > vl {
        (vh, high)
    } else {
        (vl, low)
    }
}

/// |||g|||²_∞ for the signed sum g on the lumped walk, in closed form:
/// (1/n²) · max_A Σ_{i∈A, j∉A} (aᵢ − aⱼ)². O(n log n).
pub fn triple_norm_surrogate(a: &WeightVector) -> f64 {
    surrogate_maximizer(a).0
}

/// 4‖a‖²/n.
pub fn triple_norm_bound(a: &WeightVector) -> f64 {
    4.0 * a.norm_sq() / a.n() as f64
}

/// The four links |||f|||² ≤ |||g|||² ≤ surrogate ≤ 4‖a‖²/n evaluated on
/// the lumped walk of matching size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleNormChain {
    pub abs_exact: TripleNormResult,
    pub signed_exact: TripleNormResult,
    pub surrogate: f64,
    pub bound: f64,
}

impl TripleNormChain {
    pub fn evaluate(a: &WeightVector, lumped: &ReversibleChain) -> Result<Self> {
        let g = signed_sum_table(a, lumped)?;
        let f: Vec<f64> = g.iter().map(|x| x.abs()).collect();
        Ok(Self {
            abs_exact: triple_norm_exact(lumped, &f)?,
            signed_exact: triple_norm_exact(lumped, &g)?,
            surrogate: triple_norm_surrogate(a),
            bound: triple_norm_bound(a),
        })
    }

    /// The three consecutive comparisons, as (lhs, rhs) pairs.
    pub fn links(&self) -> [(&'static str, f64, f64); 3] {
        [
            ("abs <= signed", self.abs_exact.value, self.signed_exact.value),
            ("signed <= surrogate", self.signed_exact.value, self.surrogate),
            ("surrogate <= bound", self.surrogate, self.bound),
        ]
    }

    /// Every link holds up to [`ROUNDING_SLACK`] relative.
    pub fn holds(&self) -> bool {
        self.links().iter().all(|&(_, lhs, rhs)| within_slack(lhs, rhs))
    }
}

/// lhs ≤ rhs up to [`ROUNDING_SLACK`] relative to rhs.
pub fn within_slack(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + ROUNDING_SLACK * rhs.abs().max(f64::MIN_POSITIVE)
}
