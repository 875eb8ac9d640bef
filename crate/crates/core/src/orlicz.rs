//! Orlicz norms ‖X‖_ψ = inf{c > 0 : E ψ(|X|/c) ≤ 1} of finite discrete
//! distributions, and a grid check of the constant relations linking the
//! ψ_α norm, moment growth, tail decay, and exponential moments.

use std::f64::consts::E;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::numeric::{compensated_sum, log_sum_exp};

pub const DEFAULT_TOLERANCE: f64 = 1e-10;
pub const MAX_BISECTIONS: usize = 200;
/// Step of the moment-order grid for the moment growth constant.
pub const MOMENT_GRID_STEP: f64 = 0.25;
/// Exponents above this are summed in log space.
const EXP_OVERFLOW_GUARD: f64 = 700.0;
/// λ grid for exponential moments: λ₀ · 2^{k/4}, k = 0..=40.
const LAMBDA_GRID_POINTS: usize = 41;

/// A finite list of (value, probability) atoms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    atoms: Vec<(f64, f64)>,
}

impl DiscreteDistribution {
    /// Probabilities must be positive and sum to one within 1e-12.
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidDistribution("no atoms".into()));
        }
        for &(v, p) in &atoms {
            if !v.is_finite() {
                return Err(Error::InvalidDistribution(format!("value {v} is not finite")));
            }
            if !(p > 0.0 && p.is_finite()) {
                return Err(Error::InvalidDistribution(format!(
                    "probability {p} of value {v} is not positive"
                )));
            }
        }
        let total = compensated_sum(atoms.iter().map(|a| a.1));
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {total}, not 1"
            )));
        }
        Ok(Self { atoms })
    }

    /// Normalizes positive weights into a distribution.
    pub fn from_weights(atoms: Vec<(f64, f64)>) -> Result<Self> {
        let total = compensated_sum(atoms.iter().map(|a| a.1));
        if !(total > 0.0) {
            return Err(Error::InvalidDistribution("weights must be positive".into()));
        }
        Self::new(atoms.into_iter().map(|(v, w)| (v, w / total)).collect())
    }

    pub fn point_mass(v: f64) -> Result<Self> {
        Self::new(vec![(v, 1.0)])
    }

    /// ±1 with probability 1/2 each.
    pub fn rademacher() -> Self {
        Self {
            atoms: vec![(-1.0, 0.5), (1.0, 0.5)],
        }
    }

    pub fn uniform(values: &[f64]) -> Result<Self> {
        let p = 1.0 / values.len() as f64;
        Self::from_weights(values.iter().map(|&v| (v, p)).collect())
    }

    /// Geometric law P(k) ∝ ratio^k truncated to k = 0..=max.
    pub fn truncated_geometric(ratio: f64, max: usize) -> Result<Self> {
        Self::from_weights((0..=max).map(|k| (k as f64, ratio.powi(k as i32))).collect())
    }

    pub fn atoms(&self) -> &[(f64, f64)] {
        &self.atoms
    }

    pub fn scaled(&self, t: f64) -> Result<Self> {
        Self::new(self.atoms.iter().map(|&(v, p)| (t * v, p)).collect())
    }

    pub fn max_abs(&self) -> f64 {
        self.atoms.iter().map(|a| a.0.abs()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self) -> bool {
        self.max_abs() == 0.0
    }

    pub fn mean(&self) -> f64 {
        compensated_sum(self.atoms.iter().map(|&(v, p)| v * p))
    }

    /// (E|X|^p)^{1/p}, scaled by max|X| to avoid overflow.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        m * compensated_sum(self.atoms.iter().map(|&(v, q)| q * (v.abs() / m).powf(p))).powf(1.0 / p)
    }

    /// P(|X| ≥ t).
    pub fn abs_tail(&self, t: f64) -> f64 {
        compensated_sum(self.atoms.iter().filter(|a| a.0.abs() >= t).map(|a| a.1))
    }

    /// ln E exp(λ|X|).
    pub fn log_abs_mgf(&self, lambda: f64) -> f64 {
        log_sum_exp(self.atoms.iter().map(|&(v, p)| p.ln() + lambda * v.abs()))
    }
}

/// Text format: one `value probability` pair per line; blank lines and
/// `#` comments ignored.
impl FromStr for DiscreteDistribution {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut atoms = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let body = line.trim();
            if body.is_empty() || body.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = body.split_whitespace().collect();
            let parsed: Option<(f64, f64)> = match fields.as_slice() {
                [v, p] => v.parse().ok().zip(p.parse().ok()),
                _ => None,
            };
            let atom = parsed.ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected `value probability`, got `{body}`"),
            })?;
            atoms.push(atom);
        }
        Self::new(atoms)
    }
}

/// φ_p(x) = x^p/p (p ≥ 1) or ψ_α(x) = e^{x^α} − 1 (α ≥ 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "parameter", rename_all = "snake_case")]
pub enum OrliczFunction {
    PhiP(f64),
    PsiAlpha(f64),
}

impl OrliczFunction {
    pub fn phi(p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(invalid(format!("φ_p needs p ≥ 1, got {p}")));
        }
        Ok(Self::PhiP(p))
    }

    pub fn psi(alpha: f64) -> Result<Self> {
        if !(alpha >= 1.0 && alpha.is_finite()) {
            return Err(invalid(format!("ψ_α needs α ≥ 1, got {alpha}")));
        }
        Ok(Self::PsiAlpha(alpha))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            Self::PhiP(p) => x.powf(p) / p,
            Self::PsiAlpha(a) => x.powf(a).exp_m1(),
        }
    }

    /// E ψ(|X|/c), possibly +∞.
    pub fn expectation(&self, dist: &DiscreteDistribution, c: f64) -> f64 {
        match *self {
            Self::PhiP(p) => {
                compensated_sum(dist.atoms.iter().map(|&(v, q)| q * (v.abs() / c).powf(p))) / p
            }
            Self::PsiAlpha(a) => {
                let exponents: Vec<f64> = dist.atoms.iter().map(|&(v, _)| (v.abs() / c).powf(a)).collect();
                if exponents.iter().any(|&e| e > EXP_OVERFLOW_GUARD) {
                    let log_mgf = log_sum_exp(
                        exponents.iter().zip(&dist.atoms).map(|(e, &(_, q))| q.ln() + e),
                    );
                    log_mgf.exp() - 1.0
                } else {
                    compensated_sum(exponents.iter().zip(&dist.atoms).map(|(e, &(_, q))| q * e.exp_m1()))
                }
            }
        }
    }
}

impl fmt::Display for OrliczFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::PhiP(p) => write!(f, "phi:{p}"),
            Self::PsiAlpha(a) => write!(f, "psi:{a}"),
        }
    }
}

/// `psi:<alpha>` or `phi:<p>`.
impl FromStr for OrliczFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, param) = s
            .split_once(':')
            .ok_or_else(|| invalid(format!("expected psi:<alpha> or phi:<p>, got `{s}`")))?;
        let value: f64 = param
            .parse()
            .map_err(|_| invalid(format!("bad Orlicz parameter `{param}`")))?;
        match kind {
            "psi" => Self::psi(value),
            "phi" => Self::phi(value),
            _ => Err(invalid(format!("unknown Orlicz function `{kind}`"))),
        }
    }
}

/// ‖X‖_ψ by bisection on c, to absolute tolerance `tolerance`.
///
/// The returned c satisfies E ψ(|X|/c) ≤ 1, while c − tolerance does not
/// (up to floating-point resolution of c).
pub fn orlicz_norm(dist: &DiscreteDistribution, psi: OrliczFunction, tolerance: f64) -> Result<f64> {
    if !(tolerance > 0.0) {
        return Err(invalid("tolerance must be positive"));
    }
    if dist.is_zero() {
        return Ok(0.0);
    }
    let feasible = |c: f64| psi.expectation(dist, c) <= 1.0;
    let c0 = dist.max_abs();
    let (mut lo, mut hi) = if feasible(c0) {
        let mut hi = c0;
        let mut lo = c0 / 2.0;
        while feasible(lo) {
            hi = lo;
            lo /= 2.0;
        }
        (lo, hi)
    } else {
        let mut lo = c0;
        let mut hi = 2.0 * c0;
        while !feasible(hi) {
            lo = hi;
            hi *= 2.0;
        }
        (lo, hi)
    };
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tolerance {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if feasible(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// max over p ∈ {α, α + 0.25, …, ≤ p_max} of (E|X|^p)^{1/p} / p^{1/α}.
pub fn moment_growth_constant(dist: &DiscreteDistribution, alpha: f64, p_max: f64) -> Result<f64> {
    if !(alpha >= 1.0) || !(p_max >= alpha) {
        return Err(invalid(format!(
            "need α ≥ 1 and p_max ≥ α, got α = {alpha}, p_max = {p_max}"
        )));
    }
    let steps = ((p_max - alpha) / MOMENT_GRID_STEP + 1e-9).floor() as usize;
    Ok((0..=steps)
        .map(|k| alpha + k as f64 * MOMENT_GRID_STEP)
        .map(|p| dist.lp_norm(p) / p.powf(1.0 / alpha))
        .fold(0.0, f64::max))
}

/// One of the constant relations, with margin = rhs − lhs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub margin: f64,
}

impl Relation {
    fn new(label: &str, lhs: f64, rhs: f64) -> Self {
        Self {
            label: label.to_string(),
            lhs,
            rhs,
            holds: lhs <= rhs,
            margin: rhs - lhs,
        }
    }
}

pub const RELATION_LABELS: [&str; 5] = [
    "K2 <= 2e*K1",
    "K3 <= e*K2",
    "K3' <= e^2*K2",
    "K1 <= 2*max(K2, K3')",
    "K4 <= K1 and K4' <= K1",
];

/// Grid constants of the four equivalent descriptions of a ψ_α variable.
///
/// * K1: the ψ_α norm.
/// * K2: [`moment_growth_constant`].
/// * K3′ is fixed at e²·K2 and K3 is the smallest constant with
///   P(|X| ≥ t) ≤ exp(−(t/K3)^α) at every grid t > K3′.
/// * For α > 1 (β = α/(α−1)): K4′ is fixed at K1 and K4 is the smallest
///   constant with E exp(λ|X|) ≤ exp((λK4)^β) at every grid λ ≥ 1/K4′.
///
/// All constants are grid maxima, so the relations are certified on the
/// grid only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub alpha: f64,
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k3_prime: f64,
    pub k4: Option<f64>,
    pub k4_prime: Option<f64>,
    pub relations_checked: Vec<Relation>,
}

impl EquivalenceReport {
    pub fn all_hold(&self) -> bool {
        self.relations_checked.iter().all(|r| r.holds)
    }
}

fn tail_constant(dist: &DiscreteDistribution, alpha: f64, threshold: f64, t_grid: &[f64]) -> f64 {
    t_grid
        .iter()
        .filter(|&&t| t > threshold)
        .map(|&t| {
            let tail = dist.abs_tail(t);
            if tail == 0.0 {
                0.0
            } else if tail >= 1.0 {
                f64::INFINITY
            } else {
                t / (-tail.ln()).powf(1.0 / alpha)
            }
        })
        .fold(0.0, f64::max)
}

fn mgf_constant(dist: &DiscreteDistribution, beta: f64, lambda_min: f64) -> f64 {
    (0..LAMBDA_GRID_POINTS)
        .map(|k| lambda_min * 2f64.powf(k as f64 / 4.0))
        .map(|lambda| dist.log_abs_mgf(lambda).max(0.0).powf(1.0 / beta) / lambda)
        .fold(0.0, f64::max)
}

pub fn check_equivalences(
    dist: &DiscreteDistribution,
    alpha: f64,
    p_max: f64,
    t_grid: &[f64],
) -> Result<EquivalenceReport> {
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(invalid(format!("α must be ≥ 1, got {alpha}")));
    }
    if t_grid.is_empty() || t_grid.iter().any(|t| !(*t > 0.0)) {
        return Err(invalid("t grid must be non-empty and positive"));
    }
    let k1 = orlicz_norm(dist, OrliczFunction::psi(alpha)?, DEFAULT_TOLERANCE)?;
    let k2 = moment_growth_constant(dist, alpha, p_max)?;
    let k3_prime = E * E * k2;
    let k3 = tail_constant(dist, alpha, k3_prime, t_grid);

    let mut relations = vec![
        Relation::new(RELATION_LABELS[0], k2, 2.0 * E * k1),
        Relation::new(RELATION_LABELS[1], k3, E * k2),
        Relation::new(RELATION_LABELS[2], k3_prime, E * E * k2),
        Relation::new(RELATION_LABELS[3], k1, 2.0 * k2.max(k3_prime)),
    ];
    let (k4, k4_prime) = if alpha > 1.0 {
        let beta = alpha / (alpha - 1.0);
        let k4_prime = k1;
        let k4 = if k1 == 0.0 { 0.0 } else { mgf_constant(dist, beta, 1.0 / k4_prime) };
        // both halves must hold; the larger constant carries the margin
        relations.push(Relation::new(RELATION_LABELS[4], k4.max(k4_prime), k1));
        (Some(k4), Some(k4_prime))
    } else {
        (None, None)
    };
    Ok(EquivalenceReport {
        alpha,
        k1,
        k2,
        k3,
        k3_prime,
        k4,
        k4_prime,
        relations_checked: relations,
    })
}
