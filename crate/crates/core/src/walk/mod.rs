//! Reversible random walks: simple random walks on graphs, the lazy
//! random-transposition walk on permutations of 2n points, and its
//! projection onto n-subsets (the Bernoulli–Laplace chain).

mod chain;
mod graph;
mod spectral;
mod state;

pub use chain::{Prob, ReversibleChain, StateLabels, BALANCE_TOLERANCE};
pub use graph::Graph;
pub use spectral::{
    jacobi_eigen, jacobi_eigenvalues, spectral_gap, spectral_gap_with, symmetrized_spectrum, SpectralMethod,
    SpectralOptions, SpectralReport, SymmetricEigen, DEFAULT_TOLERANCE, DENSE_STATE_LIMIT,
    MAX_POWER_ITERATIONS,
};
pub use state::{Permutation, SubsetState};

use num_traits::One;

use crate::error::{invalid, Error, Result};
use crate::numeric::{binomial, factorial};

/// Largest n for which the full walk on (2n)! permutations is built.
pub const TRANSPOSITION_CAP: usize = 3;
/// Largest n for which the lumped walk on C(2n, n) subsets is built.
pub const LUMPED_CAP: usize = 7;

/// Simple random walk: P(u, v) = 1/deg(u) for u ~ v, μ(v) = deg(v)/2|E|.
pub fn build_graph_walk(g: &Graph) -> Result<ReversibleChain> {
    let two_e = 2 * g.edge_count() as i64;
    let rows = (0..g.vertex_count())
        .map(|u| {
            let p = Prob::new(1, g.degree(u) as i64);
            g.neighbors(u).iter().map(|&v| (v, p)).collect()
        })
        .collect();
    let stationary = (0..g.vertex_count())
        .map(|v| Prob::new(g.degree(v) as i64, two_e))
        .collect();
    ReversibleChain::from_exact_rows(rows, stationary, StateLabels::Vertices(g.vertex_count()))
}

fn check_half_length(n: usize, cap: usize, what: &'static str) -> Result<()> {
    if n == 0 {
        return Err(invalid("half-length n must be at least 1"));
    }
    if n > cap {
        return Err(Error::Capacity {
            what,
            requested: n,
            cap,
        });
    }
    Ok(())
}

/// The lazy random-transposition walk on permutations of 2n points.
///
/// Each of the C(2n, 2) transpositions τ moves σ to στ with probability
/// 2/(2n)²; the remaining mass 1/(2n) (coincident i = j draws) holds.
/// States are indexed by lexicographic rank; μ is uniform.
pub fn build_transposition_walk(n: usize) -> Result<ReversibleChain> {
    check_half_length(n, TRANSPOSITION_CAP, "transposition walk half-length")?;
    let m = 2 * n;
    let states = factorial(m as u64) as usize;
    let step = Prob::new(2, (m * m) as i64);
    let hold = Prob::new(1, m as i64);
    let rows = (0..states)
        .map(|r| {
            let sigma = Permutation::unrank(m, r);
            let mut row = Vec::with_capacity(m * (m - 1) / 2 + 1);
            row.push((r, hold));
            for i in 0..m {
                for j in i + 1..m {
                    row.push((sigma.times_transposition(i, j).rank(), step));
                }
            }
            row
        })
        .collect();
    let uniform = vec![Prob::new(1, states as i64); states];
    ReversibleChain::from_exact_rows(rows, uniform, StateLabels::Permutations { points: m })
}

/// The Bernoulli–Laplace chain on n-subsets of 2n points: exchange i ∈ A
/// with j ∉ A with probability 1/(2n²) each, hold with probability 1/2.
/// States are indexed by lexicographic subset rank; μ is uniform.
pub fn build_lumped_walk(n: usize) -> Result<ReversibleChain> {
    check_half_length(n, LUMPED_CAP, "lumped walk half-length")?;
    let states = binomial(2 * n as u64, n as u64) as usize;
    let step = Prob::new(1, 2 * (n * n) as i64);
    let hold = Prob::new(1, 2);
    let rows = (0..states)
        .map(|r| {
            let a = SubsetState::unrank(n, r);
            let mut row = Vec::with_capacity(n * n + 1);
            row.push((r, hold));
            for i in (0..2 * n).filter(|&i| a.contains(i)) {
                for j in (0..2 * n).filter(|&j| !a.contains(j)) {
                    row.push((a.exchanged(i, j).rank(), step));
                }
            }
            row
        })
        .collect();
    let uniform = vec![Prob::new(1, states as i64); states];
    ReversibleChain::from_exact_rows(rows, uniform, StateLabels::Subsets { n })
}

/// Sums the full transposition kernel over the fibres of σ ↦ {i : σ(i) < n}
/// and compares with the lumped kernel in exact arithmetic. Returns the
/// number of (state, fibre) entries that disagree.
pub fn lumping_mismatches(n: usize) -> Result<usize> {
    let full = build_transposition_walk(n)?;
    let lumped = build_lumped_walk(n)?;
    let mut mismatches = 0;
    for sigma_rank in 0..full.len() {
        let sigma = Permutation::unrank(2 * n, sigma_rank);
        let from = sigma.lumped().rank();
        let mut fibre_mass = vec![Prob::default(); lumped.len()];
        for (target, p) in full.exact_row(sigma_rank).expect("exact kernel") {
            let b = Permutation::unrank(2 * n, target).lumped().rank();
            fibre_mass[b] += *p;
        }
        for (b, mass) in fibre_mass.iter().enumerate() {
            let expect = lumped.exact_transition(from, b).copied().unwrap_or_default();
            if *mass != expect {
                mismatches += 1;
            }
        }
        debug_assert_eq!(fibre_mass.iter().sum::<Prob>(), Prob::one());
    }
    Ok(mismatches)
}
