//! Exact and Monte Carlo machinery for moments and concentration of sums
//! of balanced (sum-zero) Rademacher signs.
//!
//! * [`ensemble`]: enumeration, sampling, and moments of f(ε) = |Σ aᵢεᵢ|.
//! * [`walk`]: reversible walks (graph, random transposition, lumped) and
//!   their spectral gaps.
//! * [`lipschitz`]: the local quadratic-variation semi-norm |||f|||²_∞.
//! * [`orlicz`]: ψ_α / φ_p norms of finite distributions.
//! * [`concentration`]: tail and moment inequality checks.

pub mod concentration;
pub mod ensemble;
pub mod error;
pub mod lipschitz;
pub mod numeric;
pub mod orlicz;
pub mod walk;

pub use concentration::{CheckPoint, CheckReport};
pub use ensemble::{BalancedSign, Ensemble, Method, MomentEstimate, WeightVector};
pub use error::{Error, Result};
pub use lipschitz::TripleNormResult;
pub use orlicz::{DiscreteDistribution, EquivalenceReport, OrliczFunction};
pub use walk::{Graph, Permutation, ReversibleChain, SpectralReport, SubsetState};
