//! Parsing of grids, weight vectors, graphs and distributions.

use std::fs;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use signlab_core::ensemble::WeightVector;
use signlab_core::orlicz::DiscreteDistribution;
use signlab_core::walk::Graph;

use crate::args::{Builtin, DistributionArgs};
use crate::UsageError;

/// Relative slack for landing on the stop value of a stepped grid.
const GRID_SLACK: f64 = 1e-9;

/// `start:stop:step` (both ends inclusive) or a comma list; always
/// non-empty and strictly ascending.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, UsageError> {
    let values = if spec.contains(':') {
        let parts: Vec<f64> = spec
            .split(':')
            .map(|s| parse_number(s, spec))
            .collect::<Result<_, _>>()?;
        let [start, stop, step] = parts[..] else {
            return Err(UsageError(format!("grid `{spec}` must be start:stop:step")));
        };
        if !(step > 0.0) || stop < start {
            return Err(UsageError(format!("grid `{spec}` needs step > 0 and stop ≥ start")));
        }
        let count = ((stop - start) / step + GRID_SLACK).floor() as usize;
        let mut values: Vec<f64> = (0..=count).map(|k| start + k as f64 * step).collect();
        if let Some(last) = values.last_mut() {
            if (*last - stop).abs() <= GRID_SLACK * step {
                *last = stop;
            }
        }
        values
    } else {
        spec.split(',').map(|s| parse_number(s, spec)).collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(UsageError(format!("grid `{spec}` is empty")));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(UsageError(format!("grid `{spec}` is not strictly ascending")));
    }
    Ok(values)
}

fn parse_number(s: &str, context: &str) -> Result<f64, UsageError> {
    s.trim()
        .parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| UsageError(format!("`{s}` in `{context}` is not a finite number")))
}

/// Inline comma list, or a file with one value per line (`#` comments
/// and blank lines ignored). Absent weights become a seeded random unit
/// vector.
pub fn resolve_weights(n: usize, spec: Option<&str>, seed: u64) -> Result<WeightVector, UsageError> {
    let Some(spec) = spec else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        return Ok(WeightVector::random_unit(n, &mut rng)?);
    };
    let inline: Result<Vec<f64>, _> = spec.split(',').map(|s| parse_number(s, spec)).collect();
    let entries = match inline {
        Ok(v) => v,
        Err(_) if Path::new(spec).is_file() => read_value_file(spec)?,
        Err(e) => return Err(e),
    };
    if entries.len() != 2 * n {
        return Err(UsageError(format!(
            "expected 2n = {} weights, got {}",
            2 * n,
            entries.len()
        )));
    }
    Ok(WeightVector::new(entries)?)
}

fn read_value_file(path: &str) -> Result<Vec<f64>, UsageError> {
    read(path)?
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(|l| parse_number(l, path))
        .collect()
}

fn read(path: &str) -> Result<String, UsageError> {
    fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read `{path}`: {e}")))
}

pub fn read_graph(path: &str) -> Result<Graph, UsageError> {
    Ok(read(path)?.parse()?)
}

pub fn builtin(which: Builtin) -> DiscreteDistribution {
    let made = match which {
        Builtin::Rademacher => Ok(DiscreteDistribution::rademacher()),
        Builtin::TwoPoint => DiscreteDistribution::new(vec![(0.0, 0.5), (2.0, 0.5)]),
        Builtin::Uniform => DiscreteDistribution::uniform(&[-2.0, -1.0, 0.0, 1.0, 2.0]),
        Builtin::Geometric => DiscreteDistribution::truncated_geometric(0.5, 20),
    };
    made.expect("built-in distributions are valid")
}

pub fn resolve_distribution(args: &DistributionArgs) -> Result<DiscreteDistribution, UsageError> {
    match (&args.dist, args.builtin) {
        (Some(path), _) => Ok(read(path)?.parse()?),
        (None, Some(which)) => Ok(builtin(which)),
        (None, None) => Err(UsageError("give --dist FILE or --builtin NAME".into())),
    }
}
