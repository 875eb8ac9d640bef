use num_rational::Ratio;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::state::{Permutation, SubsetState};
use crate::error::{invalid, Error, Result};

/// Tolerance for row sums, total mass, and detailed balance of
/// floating-point kernels.
pub const BALANCE_TOLERANCE: f64 = 1e-12;

/// Exact transition probability.
pub type Prob = Ratio<i64>;

/// What each state index stands for.
#[derive(Debug, Clone, PartialEq)]
pub enum StateLabels {
    /// Graph vertices 0..V.
    Vertices(usize),
    /// Permutations, indexed by lexicographic rank.
    Permutations { points: usize },
    /// n-subsets of 2n points, indexed by lexicographic rank.
    Subsets { n: usize },
    /// Opaque indices.
    Indexed(usize),
}

impl StateLabels {
    pub fn describe(&self, state: usize) -> String {
        match *self {
            StateLabels::Vertices(_) | StateLabels::Indexed(_) => state.to_string(),
            StateLabels::Permutations { points } => Permutation::unrank(points, state).to_string(),
            StateLabels::Subsets { n } => SubsetState::unrank(n, state).to_string(),
        }
    }
}

/// A finite reversible Markov kernel with its stationary measure.
///
/// Rows are stored sparsely (compressed, sorted by column). Chains built
/// from combinatorial rules also keep the exact rational entries, so row
/// sums, detailed balance, and lumping can be checked without rounding.
#[derive(Debug, Clone)]
pub struct ReversibleChain {
    row_start: Vec<usize>,
    cols: Vec<usize>,
    probs: Vec<f64>,
    exact: Option<Vec<Prob>>,
    stationary: Vec<f64>,
    stationary_exact: Option<Vec<Prob>>,
    labels: StateLabels,
}

type Rows<T> = Vec<Vec<(usize, T)>>;

fn compress<T: Clone + std::ops::AddAssign>(rows: Rows<T>, states: usize) -> Result<(Vec<usize>, Vec<usize>, Vec<T>)> {
    let mut row_start = Vec::with_capacity(states + 1);
    let mut cols = Vec::new();
    let mut vals: Vec<T> = Vec::new();
    row_start.push(0);
    for (x, mut row) in rows.into_iter().enumerate() {
        row.sort_by_key(|&(c, _)| c);
        let begin = cols.len();
        for (c, v) in row {
            if c >= states {
                return Err(invalid(format!("row {x} has a transition to unknown state {c}")));
            }
            if cols.len() > begin && *cols.last().unwrap() == c {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
            }
        }
        row_start.push(cols.len());
    }
    Ok((row_start, cols, vals))
}

impl ReversibleChain {
    /// Builds a chain from exact rational rows; row sums must be exactly
    /// one and detailed balance must hold exactly.
    pub fn from_exact_rows(rows: Rows<Prob>, stationary: Vec<Prob>, labels: StateLabels) -> Result<Self> {
        let states = stationary.len();
        if rows.len() != states {
            return Err(Error::LengthMismatch {
                expected: states,
                actual: rows.len(),
            });
        }
        let (row_start, cols, exact) = compress(rows, states)?;
        if stationary.iter().any(|m| *m <= Prob::zero()) {
            return Err(invalid("stationary measure must be positive"));
        }
        if stationary.iter().fold(Prob::zero(), |a, b| a + b) != Prob::one() {
            return Err(invalid("stationary measure does not sum to one"));
        }
        for x in 0..states {
            let entries = &exact[row_start[x]..row_start[x + 1]];
            if entries.iter().any(|p| *p < Prob::zero()) {
                return Err(invalid(format!("row {x} has a negative entry")));
            }
            if entries.iter().fold(Prob::zero(), |a, b| a + b) != Prob::one() {
                return Err(invalid(format!("row {x} does not sum to one")));
            }
        }
        let chain = Self {
            probs: exact.iter().map(|p| p.to_f64().unwrap()).collect(),
            stationary: stationary.iter().map(|p| p.to_f64().unwrap()).collect(),
            row_start,
            cols,
            exact: Some(exact),
            stationary_exact: Some(stationary),
            labels,
        };
        for x in 0..states {
            for (k, &y) in chain.row_cols(x).iter().enumerate() {
                let forward = &chain.stationary_exact.as_ref().unwrap()[x]
                    * &chain.exact.as_ref().unwrap()[chain.row_start[x] + k];
                let back = chain
                    .exact_transition(y, x)
                    .map(|p| &chain.stationary_exact.as_ref().unwrap()[y] * p)
                    .unwrap_or_else(Prob::zero);
                if forward != back {
                    return Err(Error::NotReversible(format!(
                        "detailed balance fails between states {x} and {y}"
                    )));
                }
            }
        }
        Ok(chain)
    }

    /// Builds a chain from floating-point rows, checked to
    /// [`BALANCE_TOLERANCE`].
    pub fn from_rows(rows: Rows<f64>, stationary: Vec<f64>, labels: StateLabels) -> Result<Self> {
        let states = stationary.len();
        if rows.len() != states {
            return Err(Error::LengthMismatch {
                expected: states,
                actual: rows.len(),
            });
        }
        let (row_start, cols, probs) = compress(rows, states)?;
        if stationary.iter().any(|m| !(*m > 0.0)) {
            return Err(invalid("stationary measure must be positive"));
        }
        if (stationary.iter().sum::<f64>() - 1.0).abs() > BALANCE_TOLERANCE {
            return Err(invalid("stationary measure does not sum to one"));
        }
        for x in 0..states {
            let row = &probs[row_start[x]..row_start[x + 1]];
            if row.iter().any(|p| !(*p >= 0.0)) {
                return Err(invalid(format!("row {x} has a negative or NaN entry")));
            }
            if (row.iter().sum::<f64>() - 1.0).abs() > BALANCE_TOLERANCE {
                return Err(invalid(format!("row {x} does not sum to one")));
            }
        }
        let chain = Self {
            row_start,
            cols,
            probs,
            exact: None,
            stationary,
            stationary_exact: None,
            labels,
        };
        let defect = chain.detailed_balance_defect();
        if defect > BALANCE_TOLERANCE {
            return Err(Error::NotReversible(format!(
                "detailed balance defect {defect:e}"
            )));
        }
        Ok(chain)
    }

    pub fn len(&self) -> usize {
        self.stationary.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stationary.is_empty()
    }

    pub fn labels(&self) -> &StateLabels {
        &self.labels
    }

    pub fn stationary(&self) -> &[f64] {
        &self.stationary
    }

    pub fn stationary_exact(&self) -> Option<&[Prob]> {
        self.stationary_exact.as_deref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    fn row_cols(&self, x: usize) -> &[usize] {
        &self.cols[self.row_start[x]..self.row_start[x + 1]]
    }

    /// Nonzero entries (y, P(x, y)) of row x, sorted by y.
    pub fn row(&self, x: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.row_start[x]..self.row_start[x + 1];
        self.cols[range.clone()].iter().copied().zip(self.probs[range].iter().copied())
    }

    pub fn exact_row(&self, x: usize) -> Option<impl Iterator<Item = (usize, &Prob)> + '_> {
        let range = self.row_start[x]..self.row_start[x + 1];
        self.exact
            .as_ref()
            .map(|e| self.cols[range.clone()].iter().copied().zip(e[range].iter()))
    }

    fn position(&self, x: usize, y: usize) -> Option<usize> {
        self.row_cols(x)
            .binary_search(&y)
            .ok()
            .map(|k| self.row_start[x] + k)
    }

    /// P(x, y).
    pub fn transition(&self, x: usize, y: usize) -> f64 {
        self.position(x, y).map_or(0.0, |k| self.probs[k])
    }

    pub fn exact_transition(&self, x: usize, y: usize) -> Option<&Prob> {
        let k = self.position(x, y)?;
        self.exact.as_ref().map(|e| &e[k])
    }

    /// max |μ(x)P(x,y) − μ(y)P(y,x)| over all pairs.
    pub fn detailed_balance_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for x in 0..self.len() {
            for (y, p) in self.row(x) {
                let d = self.stationary[x] * p - self.stationary[y] * self.transition(y, x);
                worst = worst.max(d.abs());
            }
        }
        worst
    }

    /// max over rows of |Σ_y P(x,y) − 1|.
    pub fn row_sum_defect(&self) -> f64 {
        (0..self.len())
            .map(|x| (self.row(x).map(|(_, p)| p).sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Dense row-major D^{1/2} P D^{-1/2}, D = diag(μ).
    pub fn symmetrized_dense(&self) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n * n];
        for x in 0..n {
            for (y, p) in self.row(x) {
                out[x * n + y] = p * (self.stationary[x] / self.stationary[y]).sqrt();
            }
        }
        // average the two triangles to remove rounding asymmetry
        for x in 0..n {
            for y in x + 1..n {
                let m = 0.5 * (out[x * n + y] + out[y * n + x]);
                out[x * n + y] = m;
                out[y * n + x] = m;
            }
        }
        out
    }

    /// out = D^{1/2} P D^{-1/2} v.
    pub fn apply_symmetrized(&self, v: &[f64], out: &mut [f64]) {
        for (x, o) in out.iter_mut().enumerate() {
            let sx = self.stationary[x].sqrt();
            *o = self
                .row(x)
                .map(|(y, p)| p * sx / self.stationary[y].sqrt() * v[y])
                .sum();
        }
    }

    /// A trajectory v₀ = start, v₁, …, v_steps, deterministic in `seed`.
    pub fn simulate(&self, start: usize, steps: usize, seed: u64) -> Result<Vec<usize>> {
        if start >= self.len() {
            return Err(invalid(format!(
                "start state {start} outside 0..{}",
                self.len()
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut path = Vec::with_capacity(steps + 1);
        let mut x = start;
        path.push(x);
        for _ in 0..steps {
            x = self.step(x, &mut rng);
            path.push(x);
        }
        Ok(path)
    }

    fn step<R: Rng>(&self, x: usize, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let mut cumulative = 0.0;
        let mut last = x;
        for (y, p) in self.row(x) {
            cumulative += p;
            last = y;
            if u < cumulative {
                return y;
            }
        }
        last
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_stochastic_rows() {
        let rows = vec![vec![(0, 0.5), (1, 0.4)], vec![(0, 0.5), (1, 0.5)]];
        assert!(ReversibleChain::from_rows(rows, vec![0.5, 0.5], StateLabels::Indexed(2)).is_err());
    }

    #[test]
    fn rejects_non_reversible_kernel() {
        // a 3-cycle rotating one way is doubly stochastic but not reversible
        let rows = vec![vec![(1, 1.0)], vec![(2, 1.0)], vec![(0, 1.0)]];
        let mu = vec![1.0 / 3.0, 1.0 / 3.0, 1.0 - 2.0 / 3.0];
        let err = ReversibleChain::from_rows(rows, mu, StateLabels::Indexed(3)).unwrap_err();
        assert!(matches!(err, Error::NotReversible(_)));

        let third = Prob::new(1, 3);
        let rows = vec![vec![(1, Prob::one())], vec![(2, Prob::one())], vec![(0, Prob::one())]];
        let err = ReversibleChain::from_exact_rows(rows, vec![third; 3], StateLabels::Indexed(3))
            .unwrap_err();
        assert!(matches!(err, Error::NotReversible(_)));
    }

    #[test]
    fn merges_duplicate_columns() {
        let half = Prob::new(1, 2);
        let rows = vec![
            vec![(1, Prob::new(1, 4)), (1, Prob::new(1, 4)), (0, half)],
            vec![(0, half), (1, half)],
        ];
        let chain =
            ReversibleChain::from_exact_rows(rows, vec![half, half], StateLabels::Indexed(2)).unwrap();
        assert_eq!(chain.transition(0, 1), 0.5);
        assert_eq!(chain.row(0).count(), 2);
    }

    #[test]
    fn simulate_rejects_bad_start() {
        let half = Prob::new(1, 2);
        let rows = vec![vec![(0, half), (1, half)], vec![(0, half), (1, half)]];
        let chain =
            ReversibleChain::from_exact_rows(rows, vec![half, half], StateLabels::Indexed(2)).unwrap();
        assert!(chain.simulate(2, 5, 0).is_err());
        assert_eq!(chain.simulate(1, 0, 0).unwrap(), vec![1]);
        assert_eq!(chain.simulate(0, 50, 9).unwrap(), chain.simulate(0, 50, 9).unwrap());
    }
}
