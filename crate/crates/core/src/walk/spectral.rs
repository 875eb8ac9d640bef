//! Spectral gap of a reversible chain.
//!
//! The kernel is symmetrized as S = D^{1/2} P D^{-1/2} (D = diag μ), which
//! has the same spectrum as P and the known top eigenvector √μ. Small chains
//! get a full cyclic Jacobi eigendecomposition; larger ones use power
//! iteration on (S + I)/2 with √μ deflated.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::chain::{ReversibleChain, BALANCE_TOLERANCE};
use crate::error::{invalid, Error, Result};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const DENSE_STATE_LIMIT: usize = 2000;
pub const MAX_POWER_ITERATIONS: usize = 1_000_000;
const JACOBI_MAX_SWEEPS: usize = 100;
const INVERSE_ITERATIONS: usize = 3;
/// Relative Frobenius size of the off-diagonal part at which sweeps stop.
const JACOBI_OFF_TOLERANCE: f64 = 1e-15;
const START_VECTOR_SEED: u64 = 0x5eed_cafe;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectralMethod {
    DenseFull,
    Iterative,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    /// λ₁ = 1 − (second-largest eigenvalue of P).
    pub gap: f64,
    pub second_eigenvalue: f64,
    pub method: SpectralMethod,
    /// ‖(I − S)v − λ₁v‖ for the returned unit eigenvector v of S.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralOptions {
    pub tolerance: f64,
    pub dense_limit: usize,
    pub max_iterations: usize,
}

impl Default for SpectralOptions {
    fn default() -> Self {
        Self {
            tolerance: DEFAULT_TOLERANCE,
            dense_limit: DENSE_STATE_LIMIT,
            max_iterations: MAX_POWER_ITERATIONS,
        }
    }
}

/// Eigenvalues (descending) and matching unit eigenvectors of a dense
/// symmetric matrix, by cyclic Jacobi rotations.
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Row k is the eigenvector of `values[k]`.
    pub vectors: Vec<Vec<f64>>,
}

/// Cyclic Jacobi on the row-major symmetric matrix `a` (consumed).
///
/// Sweeps visit the off-diagonal pairs in round-robin tournament order:
/// each round rotates n/2 disjoint pairs at once, which lets every update
/// run along contiguous rows instead of strided columns.
pub fn jacobi_eigen(mut a: Vec<f64>, n: usize) -> Result<SymmetricEigen> {
    check_square(&a, n)?;
    // vt[p * n + k] = k-th component of eigenvector p
    let mut vt = vec![0.0; n * n];
    for i in 0..n {
        vt[i * n + i] = 1.0;
    }
    jacobi_sweeps(&mut a, n, Some(&mut vt))?;
    let order = descending_diagonal(&a, n);
    Ok(SymmetricEigen {
        values: order.iter().map(|&i| a[i * n + i]).collect(),
        vectors: order.iter().map(|&i| vt[i * n..(i + 1) * n].to_vec()).collect(),
    })
}

/// Eigenvalues only (descending); skips accumulating the rotations.
pub fn jacobi_eigenvalues(mut a: Vec<f64>, n: usize) -> Result<Vec<f64>> {
    check_square(&a, n)?;
    jacobi_sweeps(&mut a, n, None)?;
    Ok(descending_diagonal(&a, n).iter().map(|&i| a[i * n + i]).collect())
}

fn check_square(a: &[f64], n: usize) -> Result<()> {
    if a.len() != n * n {
        return Err(Error::LengthMismatch {
            expected: n * n,
            actual: a.len(),
        });
    }
    Ok(())
}

fn descending_diagonal(a: &[f64], n: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]));
    order
}

fn jacobi_sweeps(a: &mut [f64], n: usize, mut vt: Option<&mut [f64]>) -> Result<()> {
    let rounds = tournament_rounds(n);
    let mut rotations = Vec::with_capacity(n / 2);
    if n < 2 {
        return Ok(());
    }
    let total = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    for sweep in 0..JACOBI_MAX_SWEEPS {
        let (mut off, mut off_sq) = (0.0, 0.0);
        for p in 0..n {
            for &x in &a[p * n + p + 1..(p + 1) * n] {
                off += x.abs();
                off_sq += x * x;
            }
        }
        // Weyl: the diagonal is then within ‖off‖_F of the spectrum
        if off == 0.0 || off_sq.sqrt() <= JACOBI_OFF_TOLERANCE * total {
            return Ok(());
        }
        // skip elements below a fifth of the mean magnitude
        let threshold = 0.2 * off / (n * n) as f64;
        for round in &rounds {
            rotations.clear();
            for &(p, q) in round {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let g = 100.0 * apq.abs();
                let (app, aqq) = (a[p * n + p], a[q * n + q]);
                if sweep > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * n + q] = 0.0;
                    a[q * n + p] = 0.0;
                    continue;
                }
                if apq.abs() <= threshold {
                    continue;
                }
                rotations.push(Rotation::new(p, q, app, aqq, apq));
            }
            apply_round(a, vt.as_deref_mut(), n, &rotations);
        }
    }
    Err(Error::NonConvergence {
        iterations: JACOBI_MAX_SWEEPS,
        residual: f64::NAN,
    })
}

/// Circle-method schedule: every pair p < q appears in exactly one round.
fn tournament_rounds(n: usize) -> Vec<Vec<(usize, usize)>> {
    let m = n + n % 2;
    let mut seats: Vec<usize> = (0..m).collect();
    let mut rounds = Vec::with_capacity(m.saturating_sub(1));
    for _ in 1..m {
        let round = (0..m / 2)
            .map(|i| (seats[i], seats[m - 1 - i]))
            .filter(|&(x, y)| x < n && y < n)
            .map(|(x, y)| (x.min(y), x.max(y)))
            .collect();
        rounds.push(round);
        seats[1..].rotate_right(1);
    }
    rounds
}

struct Rotation {
    p: usize,
    q: usize,
    c: f64,
    s: f64,
    app: f64,
    aqq: f64,
    shift: f64,
}

impl Rotation {
    fn new(p: usize, q: usize, app: f64, aqq: f64, apq: f64) -> Self {
        let theta = (aqq - app) / (2.0 * apq);
        let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
        let c = 1.0 / (t * t + 1.0).sqrt();
        Self {
            p,
            q,
            c,
            s: t * c,
            app,
            aqq,
            shift: t * apq,
        }
    }
}

fn two_rows(m: &mut [f64], n: usize, p: usize, q: usize) -> (&mut [f64], &mut [f64]) {
    let (head, tail) = m.split_at_mut(q * n);
    (&mut head[p * n..(p + 1) * n], &mut tail[..n])
}

fn rotate_rows(m: &mut [f64], n: usize, r: &Rotation) {
    let (row_p, row_q) = two_rows(m, n, r.p, r.q);
    for (x, y) in row_p.iter_mut().zip(row_q.iter_mut()) {
        let (xv, yv) = (*x, *y);
        *x = r.c * xv - r.s * yv;
        *y = r.s * xv + r.c * yv;
    }
}

/// A ← JᵀAJ and Vᵀ ← JᵀVᵀ for a set of rotations on disjoint index pairs.
fn apply_round(a: &mut [f64], mut vt: Option<&mut [f64]>, n: usize, rotations: &[Rotation]) {
    if rotations.is_empty() {
        return;
    }
    for r in rotations {
        rotate_rows(a, n, r);
        if let Some(vt) = vt.as_deref_mut() {
            rotate_rows(vt, n, r);
        }
    }
    for row in a.chunks_exact_mut(n) {
        for r in rotations {
            let (xv, yv) = (row[r.p], row[r.q]);
            row[r.p] = r.c * xv - r.s * yv;
            row[r.q] = r.s * xv + r.c * yv;
        }
    }
    for r in rotations {
        a[r.p * n + r.p] = r.app - r.shift;
        a[r.q * n + r.q] = r.aqq + r.shift;
        a[r.p * n + r.q] = 0.0;
        a[r.q * n + r.p] = 0.0;
    }
}

/// Full spectrum of the symmetrized kernel (descending). Dense only.
pub fn symmetrized_spectrum(chain: &ReversibleChain) -> Result<Vec<f64>> {
    if chain.len() > DENSE_STATE_LIMIT {
        return Err(Error::Capacity {
            what: "dense eigendecomposition state count",
            requested: chain.len(),
            cap: DENSE_STATE_LIMIT,
        });
    }
    Ok(jacobi_eigen(chain.symmetrized_dense(), chain.len())?.values)
}

/// Spectral gap with default options and the given residual tolerance.
pub fn spectral_gap(chain: &ReversibleChain, tolerance: f64) -> Result<SpectralReport> {
    spectral_gap_with(
        chain,
        &SpectralOptions {
            tolerance,
            ..SpectralOptions::default()
        },
    )
}

pub fn spectral_gap_with(chain: &ReversibleChain, opts: &SpectralOptions) -> Result<SpectralReport> {
    if !(opts.tolerance > 0.0) {
        return Err(invalid("spectral tolerance must be positive"));
    }
    if chain.len() < 2 {
        return Err(invalid("spectral gap needs at least two states"));
    }
    let defect = chain.detailed_balance_defect();
    if defect > BALANCE_TOLERANCE {
        return Err(Error::NotReversible(format!(
            "detailed balance defect {defect:e}"
        )));
    }
    if chain.len() <= opts.dense_limit {
        dense_gap(chain)
    } else {
        power_gap(chain, opts)
    }
}

fn residual(chain: &ReversibleChain, v: &[f64], eigenvalue: f64) -> f64 {
    let mut sv = vec![0.0; v.len()];
    chain.apply_symmetrized(v, &mut sv);
    sv.iter()
        .zip(v)
        .map(|(s, x)| (s - eigenvalue * x).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn dense_gap(chain: &ReversibleChain) -> Result<SpectralReport> {
    let dense = chain.symmetrized_dense();
    let values = jacobi_eigenvalues(dense.clone(), chain.len())?;
    let second = values[1];
    let vector = inverse_iteration(dense, chain.len(), second);
    Ok(SpectralReport {
        gap: 1.0 - second,
        second_eigenvalue: second,
        method: SpectralMethod::DenseFull,
        residual: residual(chain, &vector, second),
    })
}

/// Unit eigenvector of the symmetric matrix `a` for the eigenvalue closest
/// to `shift`, by inverse iteration on an LU factorization of a − shift·I.
fn inverse_iteration(mut a: Vec<f64>, n: usize, shift: f64) -> Vec<f64> {
    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    for i in 0..n {
        a[i * n + i] -= shift;
    }
    // in-place LU with partial pivoting; perm[i] is the source row of row i
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
            .unwrap_or(k);
        if pivot != k {
            perm.swap(k, pivot);
            let (head, tail) = a.split_at_mut(pivot * n);
            head[k * n..(k + 1) * n].swap_with_slice(&mut tail[..n]);
        }
        if a[k * n + k].abs() < f64::EPSILON * scale {
            a[k * n + k] = f64::EPSILON * scale;
        }
        let (head, tail) = a.split_at_mut((k + 1) * n);
        let row_k = &head[k * n..];
        let pivot_value = row_k[k];
        for row in tail.chunks_exact_mut(n) {
            let factor = row[k] / pivot_value;
            if factor == 0.0 {
                continue;
            }
            row[k] = factor;
            for (x, y) in row[k + 1..].iter_mut().zip(&row_k[k + 1..]) {
                *x -= factor * y;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(START_VECTOR_SEED);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    for _ in 0..INVERSE_ITERATIONS {
        let mut x: Vec<f64> = perm.iter().map(|&i| v[i]).collect();
        for i in 0..n {
            let dot: f64 = (0..i).map(|j| a[i * n + j] * x[j]).sum();
            x[i] -= dot;
        }
        for i in (0..n).rev() {
            let dot: f64 = (i + 1..n).map(|j| a[i * n + j] * x[j]).sum();
            x[i] = (x[i] - dot) / a[i * n + i];
        }
        let norm = x.iter().map(|y| y * y).sum::<f64>().sqrt();
        v = x.into_iter().map(|y| y / norm).collect();
    }
    v
}

fn power_gap(chain: &ReversibleChain, opts: &SpectralOptions) -> Result<SpectralReport> {
    let n = chain.len();
    let top: Vec<f64> = chain.stationary().iter().map(|m| m.sqrt()).collect();
    let deflate = |v: &mut [f64]| {
        let dot: f64 = v.iter().zip(&top).map(|(a, b)| a * b).sum();
        for (x, t) in v.iter_mut().zip(&top) {
            *x -= dot * t;
        }
    };
    let normalize = |v: &mut [f64]| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in v.iter_mut() {
            *x /= norm;
        }
    };

    let mut rng = ChaCha8Rng::seed_from_u64(START_VECTOR_SEED);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    deflate(&mut v);
    normalize(&mut v);
    let mut sv = vec![0.0; n];
    let mut last_residual = f64::INFINITY;
    for _ in 0..opts.max_iterations {
        chain.apply_symmetrized(&v, &mut sv);
        let rayleigh: f64 = sv.iter().zip(&v).map(|(a, b)| a * b).sum();
        last_residual = sv
            .iter()
            .zip(&v)
            .map(|(s, x)| (s - rayleigh * x).powi(2))
            .sum::<f64>()
            .sqrt();
        if last_residual < opts.tolerance {
            return Ok(SpectralReport {
                gap: 1.0 - rayleigh,
                second_eigenvalue: rayleigh,
                method: SpectralMethod::Iterative,
                residual: last_residual,
            });
        }
        // shifted step: (S + I)/2 has spectrum in [0, 1]
        for (x, s) in v.iter_mut().zip(&sv) {
            *x = 0.5 * (*x + s);
        }
        deflate(&mut v);
        normalize(&mut v);
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iterations,
        residual: last_residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jacobi_two_by_two() {
        let eig = jacobi_eigen(vec![2.0, 1.0, 1.0, 2.0], 2).unwrap();
        assert!((eig.values[0] - 3.0).abs() < 1e-14);
        assert!((eig.values[1] - 1.0).abs() < 1e-14);
        let v = &eig.vectors[0];
        assert!((v[0].abs() - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-14);
    }

    #[test]
    fn tournament_covers_each_pair_once() {
        for n in 1..=9 {
            let mut seen: Vec<(usize, usize)> = tournament_rounds(n).into_iter().flatten().collect();
            for round in tournament_rounds(n) {
                let mut touched: Vec<usize> = round.iter().flat_map(|&(p, q)| [p, q]).collect();
                touched.sort_unstable();
                assert!(touched.windows(2).all(|w| w[0] < w[1]));
            }
            seen.sort_unstable();
            let all: Vec<(usize, usize)> = (0..n).flat_map(|p| (p + 1..n).map(move |q| (p, q))).collect();
            assert_eq!(seen, all);
        }
    }

    #[test]
    fn jacobi_reconstructs_matrix() {
        for n in [6, 7] {
            reconstructs(n);
        }
    }

    fn reconstructs(n: usize) {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let x = ((i * 7 + j * 3) % 11) as f64 - 5.0;
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
        }
        let eig = jacobi_eigen(a.clone(), n).unwrap();
        for i in 0..n {
            for j in 0..n {
                let r: f64 = (0..n)
                    .map(|k| eig.values[k] * eig.vectors[k][i] * eig.vectors[k][j])
                    .sum();
                assert!((r - a[i * n + j]).abs() < 1e-12);
            }
        }
        assert!(eig.values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn values_only_agree_with_full_decomposition() {
        let n = 9;
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                let x = ((i * 5 + j * 11) % 13) as f64 / 13.0 - 0.5;
                a[i * n + j] = x;
                a[j * n + i] = x;
            }
        }
        let full = jacobi_eigen(a.clone(), n).unwrap().values;
        let values = jacobi_eigenvalues(a, n).unwrap();
        for (x, y) in full.iter().zip(&values) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn inverse_iteration_in_degenerate_eigenspace() {
        // diag(2, 1) ⊕ [[c², cs], [cs, s²]] has spectrum {2, 1, 1, 0}
        let (c, s) = (0.6, 0.8);
        let a = vec![
            2.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, c * c, c * s, //
            0.0, 0.0, c * s, s * s,
        ];
        let v = inverse_iteration(a.clone(), 4, 1.0);
        let av: Vec<f64> = (0..4).map(|i| (0..4).map(|j| a[i * 4 + j] * v[j]).sum()).collect();
        let err: f64 = av.iter().zip(&v).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt();
        assert!(err < 1e-12, "{err}");
    }
}
