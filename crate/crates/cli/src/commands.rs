//! One function per subcommand, each producing the report records.

use serde::Serialize;
use serde_json::{json, Map, Value};

use signlab_core::concentration::{
    ensemble_tail_check_with, f_distribution, gamma_bound_check, moment_tail_integral_check, tail_bound_check,
    theorem1_check_with, MomentMode,
};
use signlab_core::ensemble::{mc_moment, Ensemble, WeightVector};
use signlab_core::lipschitz::{signed_sum_table, within_slack, TripleNormChain};
use signlab_core::orlicz::{check_equivalences, orlicz_norm, DiscreteDistribution, OrliczFunction};
use signlab_core::walk::{
    build_graph_walk, build_lumped_walk, build_transposition_walk, spectral_gap, Graph, ReversibleChain,
};

use crate::args::{
    GammaArgs, IntegralArgs, MethodChoice, MomentsArgs, OrliczArgs, SpectralArgs, TailArgs, Theorem1Args,
    WalkArgs, WalkKind, WeightArgs,
};
use crate::input::{parse_grid, read_graph, resolve_distribution, resolve_weights};
use crate::output::{report_records, Record};
use crate::UsageError;

pub struct Context {
    pub ensemble: Ensemble,
    pub seed: u64,
}

#[derive(Default)]
pub struct Output {
    pub records: Vec<Record>,
    /// Inputs derived at run time (drawn or file-read weights), echoed
    /// into the metadata.
    pub resolved: Map<String, Value>,
}

impl Output {
    fn weights(&mut self, a: &WeightVector) {
        self.resolved.insert("weights".into(), json!(a.entries()));
    }
}

fn label(value: impl Serialize) -> String {
    match serde_json::to_value(value) {
        Ok(Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

fn use_exact(choice: MethodChoice, n: usize, ensemble: &Ensemble) -> bool {
    match choice {
        MethodChoice::Exact => true,
        MethodChoice::Mc => false,
        MethodChoice::Auto => n <= ensemble.cap(),
    }
}

fn weights(args: &WeightArgs, ctx: &Context) -> Result<WeightVector, UsageError> {
    resolve_weights(args.n, args.weights.as_deref(), ctx.seed)
}

pub fn moments(args: &MomentsArgs, ctx: &Context) -> Result<Output, UsageError> {
    let a = weights(&args.weights, ctx)?;
    let ps = parse_grid(&args.p)?;
    let exact = use_exact(args.method, a.n(), &ctx.ensemble);
    let mut out = Output::default();
    out.weights(&a);
    for p in ps {
        let est = if exact {
            ctx.ensemble.exact_moment(&a, p)?
        } else {
            mc_moment(&a, p, args.samples, ctx.seed)?
        };
        out.records.push(
            Record::new("moment")
                .text("name", "E f^p")
                .num("input", p)
                .num("value", est.value)
                .num("stderr", est.stderr)
                .text("method", label(est.method))
                .int("samples", est.samples),
        );
    }
    Ok(out)
}

fn require<T: Copy>(value: Option<T>, flag: &str, walk: WalkKind) -> Result<T, UsageError> {
    value.ok_or_else(|| UsageError(format!("--walk {} needs {flag}", label(walk))))
}

fn build_walk(args: &WalkArgs) -> Result<ReversibleChain, UsageError> {
    let chain = match args.walk {
        WalkKind::Graph => {
            let path = args.graph.as_deref();
            build_graph_walk(&read_graph(require(path, "--graph FILE", args.walk)?)?)?
        }
        WalkKind::Cycle => build_graph_walk(&Graph::cycle(require(args.size, "--size M", args.walk)?)?)?,
        WalkKind::Transposition => build_transposition_walk(require(args.n, "--n", args.walk)?)?,
        WalkKind::Lumped => build_lumped_walk(require(args.n, "--n", args.walk)?)?,
    };
    Ok(chain)
}

pub fn spectral(args: &SpectralArgs, _ctx: &Context) -> Result<Output, UsageError> {
    let chain = build_walk(&args.walk)?;
    let report = spectral_gap(&chain, args.tolerance)?;
    let record = Record::new("spectral")
        .text("walk", label(args.walk.walk))
        .int("states", chain.len() as u64)
        .num("gap", report.gap)
        .num("second_eigenvalue", report.second_eigenvalue)
        .text("method", label(report.method))
        .num("residual", report.residual);
    Ok(Output {
        records: vec![record],
        ..Output::default()
    })
}

pub fn tripnorm(args: &WeightArgs, ctx: &Context) -> Result<Output, UsageError> {
    let a = weights(args, ctx)?;
    let chain = build_lumped_walk(a.n())?;
    let norms = TripleNormChain::evaluate(&a, &chain)?;
    let mut out = Output::default();
    out.weights(&a);
    let labels = chain.labels();
    out.records.extend([
        Record::new("value")
            .text("name", "triple norm of |g|")
            .num("value", norms.abs_exact.value)
            .text("witness", labels.describe(norms.abs_exact.witness)),
        Record::new("value")
            .text("name", "triple norm of g")
            .num("value", norms.signed_exact.value)
            .text("witness", labels.describe(norms.signed_exact.witness)),
        Record::new("value").text("name", "surrogate").num("value", norms.surrogate),
        Record::new("value").text("name", "4|a|^2/n").num("value", norms.bound),
    ]);
    for (k, (name, lhs, rhs)) in norms.links().into_iter().enumerate() {
        out.records.push(
            Record::new("point")
                .text("name", name)
                .num("input", (k + 1) as f64)
                .num("lhs", lhs)
                .num("rhs", rhs)
                .flag("holds", within_slack(lhs, rhs))
                .num("margin", rhs - lhs),
        );
    }
    Ok(out)
}

pub fn orlicz(args: &OrliczArgs, _ctx: &Context) -> Result<Output, UsageError> {
    let dist = resolve_distribution(&args.source)?;
    let t_grid = parse_grid(&args.t_grid)?;
    let psi = OrliczFunction::psi(args.alpha)?;
    let norm = orlicz_norm(&dist, psi, args.tolerance)?;
    let report = check_equivalences(&dist, args.alpha, args.p_max, &t_grid)?;
    let mut records = vec![Record::new("value").text("name", format!("norm {psi}")).num("value", norm)];
    let constants = [
        ("K1", Some(report.k1)),
        ("K2", Some(report.k2)),
        ("K3", Some(report.k3)),
        ("K3'", Some(report.k3_prime)),
        ("K4", report.k4),
        ("K4'", report.k4_prime),
    ];
    for (name, value) in constants {
        if let Some(v) = value {
            records.push(Record::new("value").text("name", name).num("value", v));
        }
    }
    for r in &report.relations_checked {
        records.push(
            Record::new("point")
                .text("name", r.label.clone())
                .num("input", args.alpha)
                .num("lhs", r.lhs)
                .num("rhs", r.rhs)
                .flag("holds", r.holds)
                .num("margin", r.margin),
        );
    }
    Ok(Output {
        records,
        ..Output::default()
    })
}

pub fn tail(args: &TailArgs, ctx: &Context) -> Result<Output, UsageError> {
    let t_grid = parse_grid(&args.t_grid)?;
    let chain = build_walk(&args.walk)?;
    let mut out = Output::default();
    match args.walk.walk {
        WalkKind::Lumped | WalkKind::Transposition => {
            let n = require(args.walk.n, "--n", args.walk.walk)?;
            let a = resolve_weights(n, args.weights.as_deref(), ctx.seed)?;
            out.weights(&a);
            let f: Vec<f64> = signed_sum_table(&a, &chain)?.iter().map(|g| g.abs()).collect();
            out.records.extend(report_records(&tail_bound_check(&chain, &f, &t_grid)?));
            out.records.extend(report_records(&ensemble_tail_check_with(&ctx.ensemble, &a, &t_grid)?));
        }
        WalkKind::Graph | WalkKind::Cycle => {
            if args.vertex >= chain.len() {
                return Err(UsageError(format!(
                    "--vertex {} out of range for {} states",
                    args.vertex,
                    chain.len()
                )));
            }
            let f: Vec<f64> = (0..chain.len()).map(|x| f64::from(u8::from(x == args.vertex))).collect();
            out.records.extend(report_records(&tail_bound_check(&chain, &f, &t_grid)?));
        }
    }
    Ok(out)
}

pub fn theorem1(args: &Theorem1Args, ctx: &Context) -> Result<Output, UsageError> {
    let a = weights(&args.weights, ctx)?;
    let p_grid = parse_grid(&args.p_grid)?;
    let mode = if use_exact(args.method, a.n(), &ctx.ensemble) {
        MomentMode::Exact
    } else {
        MomentMode::MonteCarlo {
            samples: args.samples,
            seed: ctx.seed,
        }
    };
    let report = theorem1_check_with(&ctx.ensemble, &a, &p_grid, mode)?;
    let mut out = Output::default();
    out.weights(&a);
    out.resolved.insert("moment_mode".into(), serde_json::to_value(mode).unwrap_or_default());
    out.records = report_records(&report);
    Ok(out)
}

pub fn integral(args: &IntegralArgs, ctx: &Context) -> Result<Output, UsageError> {
    let ps = parse_grid(&args.p)?;
    let mut out = Output::default();
    let dist = match args.n {
        Some(n) => {
            let a = resolve_weights(n, args.weights.as_deref(), ctx.seed)?;
            out.weights(&a);
            let law = f_distribution(&ctx.ensemble, &a)?;
            let mean: f64 = law.iter().map(|(v, p)| v * p).sum();
            DiscreteDistribution::from_weights(law.into_iter().map(|(v, p)| (v - mean, p)).collect())?
        }
        None => resolve_distribution(&args.source)?,
    };
    for p in ps {
        out.records.extend(report_records(&moment_tail_integral_check(&dist, p)?));
    }
    Ok(out)
}

pub fn gamma(args: &GammaArgs, _ctx: &Context) -> Result<Output, UsageError> {
    let grid = parse_grid(&args.x_grid)?;
    Ok(Output {
        records: report_records(&gamma_bound_check(&grid)?),
        ..Output::default()
    })
}
