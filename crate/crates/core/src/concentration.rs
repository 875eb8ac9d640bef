//! Pointwise checks of the tail and moment inequalities on exactly
//! computed distributions.

use serde::{Deserialize, Serialize};

use crate::ensemble::{mc_moment, Ensemble, WeightVector};
use crate::error::{invalid, Result};
use crate::lipschitz::{triple_norm_exact, triple_norm_surrogate};
use crate::numeric::{compensated_sum, ln_gamma};
use crate::orlicz::DiscreteDistribution;
use crate::walk::{spectral_gap, ReversibleChain, SpectralReport, DEFAULT_TOLERANCE};

/// Prefactor of the spectral-gap tail bound.
pub const TAIL_PREFACTOR: f64 = 3.0;
/// Constant certified in the moment bound E|f| + C·p·‖a‖₂.
pub const MOMENT_CONSTANT: f64 = 24.0;
/// Relative tolerance for the moment/tail-integral identity.
pub const IDENTITY_TOLERANCE: f64 = 1e-10;
/// Standard errors subtracted from Monte Carlo left-hand sides.
pub const MC_STDERR_INFLATION: f64 = 4.0;
/// Values within this relative distance of a threshold count as ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckPoint {
    pub name: String,
    /// Grid coordinate (t, p, or x).
    pub input: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    /// rhs − lhs for inequalities; remaining slack for identities.
    pub margin: f64,
}

/// A named scalar attached to a report (constants, diagnostics, flags).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub label: String,
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holds: Option<bool>,
}

impl Annotation {
    pub fn value(label: &str, value: f64) -> Self {
        Self {
            label: label.into(),
            value,
            holds: None,
        }
    }

    pub fn flag(label: &str, value: f64, holds: bool) -> Self {
        Self {
            label: label.into(),
            value,
            holds: Some(holds),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub points: Vec<CheckPoint>,
    pub all_hold: bool,
    /// Smallest margin over all points.
    pub worst_margin: f64,
    pub annotations: Vec<Annotation>,
}

impl CheckReport {
    pub fn new(name: &str, points: Vec<CheckPoint>, annotations: Vec<Annotation>) -> Self {
        Self {
            name: name.into(),
            all_hold: points.iter().all(|p| p.holds),
            worst_margin: points.iter().map(|p| p.margin).fold(f64::INFINITY, f64::min),
            points,
            annotations,
        }
    }

    /// Points that fail.
    pub fn violations(&self) -> impl Iterator<Item = &CheckPoint> {
        self.points.iter().filter(|p| !p.holds)
    }

    pub fn annotation(&self, label: &str) -> Option<&Annotation> {
        self.annotations.iter().find(|a| a.label == label)
    }
}

fn inequality_point(name: &str, input: f64, lhs: f64, rhs: f64) -> CheckPoint {
    CheckPoint {
        name: name.into(),
        input,
        lhs,
        rhs,
        holds: lhs <= rhs,
        margin: rhs - lhs,
    }
}

fn check_grid(grid: &[f64], what: &str, min: f64) -> Result<()> {
    if grid.is_empty() {
        return Err(invalid(format!("{what} grid is empty")));
    }
    if let Some(x) = grid.iter().find(|&&x| !(x >= min) || !x.is_finite()) {
        return Err(invalid(format!("{what} grid value {x} must be finite and ≥ {min}")));
    }
    Ok(())
}

fn strictly_above(value: f64, level: f64) -> bool {
    value - level > TIE_TOLERANCE * level.abs().max(1.0)
}

fn at_least(value: f64, level: f64) -> bool {
    value - level >= -TIE_TOLERANCE * level.abs().max(1.0)
}

/// 3·exp(−t·rate); a zero denominator in `rate` sends the bound to 0.
fn exponential_bound(prefactor: f64, t: f64, numerator: f64, denominator: f64) -> f64 {
    if denominator == 0.0 {
        return if t > 0.0 { 0.0 } else { prefactor };
    }
    prefactor * (-t * numerator / denominator).exp()
}

/// μ(f > E_μ f + t) ≤ 3·exp(−t·√λ₁ / (2|||f|||²_∞)) on a reversible chain.
pub fn tail_bound_check(chain: &ReversibleChain, fvals: &[f64], t_grid: &[f64]) -> Result<CheckReport> {
    check_grid(t_grid, "t", f64::MIN_POSITIVE)?;
    let gap = spectral_gap(chain, DEFAULT_TOLERANCE)?;
    tail_bound_check_with_gap(chain, &gap, fvals, t_grid)
}

/// [`tail_bound_check`] with the spectral gap of `chain` already computed,
/// for sweeping many functions over one chain.
pub fn tail_bound_check_with_gap(
    chain: &ReversibleChain,
    gap: &SpectralReport,
    fvals: &[f64],
    t_grid: &[f64],
) -> Result<CheckReport> {
    check_grid(t_grid, "t", f64::MIN_POSITIVE)?;
    let norm = triple_norm_exact(chain, fvals)?;
    let mu = chain.stationary();
    let mean = compensated_sum(fvals.iter().zip(mu).map(|(f, m)| f * m));
    let points = t_grid
        .iter()
        .map(|&t| {
            let lhs = compensated_sum(
                fvals
                    .iter()
                    .zip(mu)
                    .filter(|(f, _)| strictly_above(**f, mean + t))
                    .map(|(_, m)| *m),
            );
            let rhs = exponential_bound(TAIL_PREFACTOR, t, gap.gap.sqrt(), 2.0 * norm.value);
            inequality_point("spectral-gap tail bound", t, lhs, rhs)
        })
        .collect();
    Ok(CheckReport::new(
        "spectral-gap tail bound",
        points,
        vec![
            Annotation::value("mean", mean),
            Annotation::value("spectral gap", gap.gap),
            Annotation::value("triple norm", norm.value),
            Annotation::value("triple norm witness", norm.witness as f64),
        ],
    ))
}

/// Law of f = |Σ aᵢεᵢ| on the ensemble, merged atoms sorted by value.
pub fn f_distribution(ensemble: &Ensemble, a: &WeightVector) -> Result<Vec<(f64, f64)>> {
    let mut atoms: Vec<(f64, f64)> = ensemble
        .signed_sum_distribution(a)?
        .into_iter()
        .map(|(v, p)| (v.abs(), p))
        .collect();
    atoms.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(atoms.len());
    for (v, p) in atoms {
        match merged.last_mut() {
            Some(last) if last.0 == v => last.1 += p,
            _ => merged.push((v, p)),
        }
    }
    Ok(merged)
}

/// μ(f − E f ≥ t) ≤ 3·exp(−t / (2·|||f|||²_∞·√n)) on the balanced
/// ensemble, with |||f|||²_∞ taken as the closed-form surrogate.
///
/// The annotation `prefactor-free` records whether the bound also holds
/// at every point with prefactor 1.
pub fn ensemble_tail_check(a: &WeightVector, t_grid: &[f64]) -> Result<CheckReport> {
    ensemble_tail_check_with(&Ensemble::default(), a, t_grid)
}

pub fn ensemble_tail_check_with(ensemble: &Ensemble, a: &WeightVector, t_grid: &[f64]) -> Result<CheckReport> {
    check_grid(t_grid, "t", f64::MIN_POSITIVE)?;
    let law = f_distribution(ensemble, a)?;
    let mean = compensated_sum(law.iter().map(|(v, p)| v * p));
    let surrogate = triple_norm_surrogate(a);
    let denominator = 2.0 * surrogate * (a.n() as f64).sqrt();
    let mut prefactor_free = true;
    let mut worst_free = f64::INFINITY;
    let points = t_grid
        .iter()
        .map(|&t| {
            let lhs = compensated_sum(law.iter().filter(|(v, _)| at_least(*v - mean, t)).map(|a| a.1));
            let bare = exponential_bound(1.0, t, 1.0, denominator);
            prefactor_free &= lhs <= bare;
            worst_free = worst_free.min(bare - lhs);
            inequality_point("ensemble tail bound", t, lhs, TAIL_PREFACTOR * bare)
        })
        .collect();
    Ok(CheckReport::new(
        "ensemble tail bound",
        points,
        vec![
            Annotation::value("mean", mean),
            Annotation::value("surrogate triple norm", surrogate),
            Annotation::flag("prefactor-free", worst_free, prefactor_free),
        ],
    ))
}

/// How the left-hand side moments are obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case")]
pub enum MomentMode {
    Exact,
    MonteCarlo { samples: u64, seed: u64 },
}

/// (E f^p)^{1/p} ≤ E|f| + 24·p·‖a‖₂ at every p of the grid.
///
/// The annotation `smallest constant` is max_p ((E f^p)^{1/p} − E f)/(p‖a‖₂),
/// the least C the instance itself needs.
pub fn theorem1_check(a: &WeightVector, p_grid: &[f64], mode: MomentMode) -> Result<CheckReport> {
    theorem1_check_with(&Ensemble::default(), a, p_grid, mode)
}

pub fn theorem1_check_with(
    ensemble: &Ensemble,
    a: &WeightVector,
    p_grid: &[f64],
    mode: MomentMode,
) -> Result<CheckReport> {
    check_grid(p_grid, "p", 2.0)?;
    let norm = a.norm();
    let name = "moment bound";
    let mut smallest: f64 = 0.0;
    let points: Vec<CheckPoint> = match mode {
        MomentMode::Exact => {
            let mut orders = vec![1.0];
            orders.extend_from_slice(p_grid);
            let moments = ensemble.exact_moments(a, &orders)?;
            let mean = moments[0];
            p_grid
                .iter()
                .zip(&moments[1..])
                .map(|(&p, &m)| {
                    let lhs = m.powf(1.0 / p);
                    if norm > 0.0 {
                        smallest = smallest.max((lhs - mean) / (p * norm));
                    }
                    inequality_point(name, p, lhs, mean + MOMENT_CONSTANT * p * norm)
                })
                .collect()
        }
        MomentMode::MonteCarlo { samples, seed } => {
            let mean = mc_moment(a, 1.0, samples, seed)?.value;
            p_grid
                .iter()
                .map(|&p| {
                    let est = mc_moment(a, p, samples, seed)?;
                    let lhs = est.value.powf(1.0 / p);
                    // delta method: sd of m^{1/p} ≈ m^{1/p − 1} sd(m) / p
                    let se = if est.value > 0.0 {
                        lhs / est.value * est.stderr / p
                    } else {
                        0.0
                    };
                    let rhs = mean + MOMENT_CONSTANT * p * norm;
                    let lower = lhs - MC_STDERR_INFLATION * se;
                    if norm > 0.0 {
                        smallest = smallest.max((lhs - mean) / (p * norm));
                    }
                    Ok(CheckPoint {
                        name: name.into(),
                        input: p,
                        lhs,
                        rhs,
                        holds: lower <= rhs,
                        margin: rhs - lower,
                    })
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(CheckReport::new(
        name,
        points,
        vec![Annotation::value("smallest constant", smallest)],
    ))
}

/// E[X₊^p] = p ∫₀^∞ t^{p−1} P(X ≥ t) dt, both sides exact.
///
/// P(X ≥ t) is a step function, constant on each interval between
/// consecutive positive atoms, so the integral is a finite sum.
pub fn moment_tail_integral_check(dist: &DiscreteDistribution, p: f64) -> Result<CheckReport> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(invalid(format!("p must be ≥ 1, got {p}")));
    }
    let lhs = compensated_sum(dist.atoms().iter().map(|&(v, q)| q * v.max(0.0).powf(p)));

    let mut positive: Vec<f64> = dist.atoms().iter().map(|a| a.0).filter(|&v| v > 0.0).collect();
    positive.sort_by(f64::total_cmp);
    positive.dedup();
    let mut previous = 0.0f64;
    let rhs = compensated_sum(positive.iter().map(|&v| {
        let tail = compensated_sum(dist.atoms().iter().filter(|a| a.0 >= v).map(|a| a.1));
        let piece = tail * (v.powf(p) - previous.powf(p));
        previous = v;
        piece
    }));

    let slack = IDENTITY_TOLERANCE * lhs.abs().max(rhs.abs()) - (lhs - rhs).abs();
    let point = CheckPoint {
        name: "moment-tail identity".into(),
        input: p,
        lhs,
        rhs,
        holds: slack >= 0.0,
        margin: slack,
    };
    Ok(CheckReport::new("moment-tail identity", vec![point], Vec::new()))
}

/// Γ(x) ≤ x^{x−1} for x ≥ 1, compared in log space.
pub fn gamma_bound_check(x_grid: &[f64]) -> Result<CheckReport> {
    check_grid(x_grid, "x", 1.0)?;
    let points = x_grid
        .iter()
        .map(|&x| {
            let log_lhs = ln_gamma(x);
            let log_rhs = (x - 1.0) * x.ln();
            let (lhs, rhs) = (log_lhs.exp(), log_rhs.exp());
            CheckPoint {
                name: "gamma bound".into(),
                input: x,
                lhs,
                rhs,
                holds: log_lhs <= log_rhs,
                margin: rhs - lhs,
            }
        })
        .collect();
    Ok(CheckReport::new("gamma bound", points, Vec::new()))
}
