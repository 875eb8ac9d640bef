//! Acceptance gate: each numbered criterion runs at its stated tolerance
//! and prints one PASS/FAIL line. The process exits non-zero if any fails.

use std::f64::consts::{LN_2, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use signlab_core::concentration::{
    ensemble_tail_check, gamma_bound_check, moment_tail_integral_check, tail_bound_check_with_gap,
    theorem1_check, MomentMode,
};
use signlab_core::ensemble::{
    exact_moment, mc_moment, pair_correlation_exact, second_moment_closed, Ensemble, WeightVector,
};
use signlab_core::lipschitz::{signed_sum_table, TripleNormChain};
use signlab_core::numeric::ln_gamma;
use signlab_core::orlicz::{check_equivalences, orlicz_norm, DiscreteDistribution, OrliczFunction};
use signlab_core::walk::{
    build_graph_walk, build_lumped_walk, build_transposition_walk, lumping_mismatches, spectral_gap,
    Graph, DEFAULT_TOLERANCE,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    let count = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=count).map(|k| start + k as f64 * step).collect()
}

fn rng(tag: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0xacce_0000 + tag)
}

fn spectral_gaps() -> Outcome {
    let started = Instant::now();
    let mut worst: f64 = 0.0;
    let mut checked = 0;
    for n in 1..=3 {
        let gap = spectral_gap(&build_transposition_walk(n).unwrap(), DEFAULT_TOLERANCE).unwrap();
        worst = worst.max((gap.gap - 1.0 / n as f64).abs());
        checked += 1;
    }
    for n in 1..=7 {
        let gap = spectral_gap(&build_lumped_walk(n).unwrap(), DEFAULT_TOLERANCE).unwrap();
        worst = worst.max((gap.gap - 1.0 / n as f64).abs());
        checked += 1;
    }
    let elapsed = started.elapsed();
    outcome(
        worst <= 1e-9 && elapsed < Duration::from_secs(60),
        format!("{checked} chains, max |gap - 1/n| = {worst:.2e}, {:.1}s", elapsed.as_secs_f64()),
    )
}

fn lumping() -> Outcome {
    let mismatches: usize = (1..=3).map(|n| lumping_mismatches(n).unwrap()).sum();
    outcome(mismatches == 0, format!("{mismatches} mismatched entries for n <= 3"))
}

fn moment_certification() -> Outcome {
    let started = Instant::now();
    let p_grid = grid(2.0, 20.0, 1.0);
    let mut rng = rng(3);
    let (mut points, mut violations) = (0usize, 0usize);
    let mut smallest: f64 = 0.0;
    for n in 2..=7 {
        for _ in 0..1000 {
            let a = WeightVector::random_unit(n, &mut rng).unwrap();
            let report = theorem1_check(&a, &p_grid, MomentMode::Exact).unwrap();
            points += report.points.len();
            violations += report.violations().count();
            smallest = smallest.max(report.annotation("smallest constant").unwrap().value);
        }
    }
    let elapsed = started.elapsed();
    outcome(
        violations == 0 && elapsed < Duration::from_secs(600),
        format!(
            "{points} points, {violations} violations, largest needed constant {smallest:.4}, {:.1}s",
            elapsed.as_secs_f64()
        ),
    )
}

fn tails() -> Outcome {
    let t_grid = grid(0.05, 3.0, 0.05);
    let mut rng = rng(4);
    let (mut points, mut violations, mut prefactor_free) = (0usize, 0usize, 0usize);
    let mut instances = 0;
    for n in 1..=7 {
        let chain = build_lumped_walk(n).unwrap();
        let gap = spectral_gap(&chain, DEFAULT_TOLERANCE).unwrap();
        for _ in 0..20 {
            let a = WeightVector::random_unit(n, &mut rng).unwrap();
            let f: Vec<f64> = signed_sum_table(&a, &chain).unwrap().iter().map(|x| x.abs()).collect();
            for report in [tail_bound_check_with_gap(&chain, &gap, &f, &t_grid).unwrap(), ensemble_tail_check(&a, &t_grid).unwrap()] {
                points += report.points.len();
                violations += report.violations().count();
                if let Some(flag) = report.annotation("prefactor-free") {
                    prefactor_free += usize::from(flag.holds == Some(true));
                }
            }
            instances += 1;
        }
    }
    let t_unit = grid(0.1, 1.0, 0.1);
    for m in 3..=12 {
        let chain = build_graph_walk(&Graph::cycle(m).unwrap()).unwrap();
        let gap = spectral_gap(&chain, DEFAULT_TOLERANCE).unwrap();
        for v in 0..m {
            let f: Vec<f64> = (0..m).map(|x| f64::from(u8::from(x == v))).collect();
            let report = tail_bound_check_with_gap(&chain, &gap, &f, &t_unit).unwrap();
            points += report.points.len();
            violations += report.violations().count();
        }
    }
    outcome(
        violations == 0,
        format!(
            "{points} points, {violations} violations; prefactor-free ensemble bound holds on {prefactor_free}/{instances}"
        ),
    )
}

fn triple_norm_chain() -> Outcome {
    let mut rng = rng(5);
    let mut failures = 0;
    let mut total = 0;
    for n in 1..=7 {
        let chain = build_lumped_walk(n).unwrap();
        for _ in 0..1000 {
            let a = WeightVector::random_unit(n, &mut rng).unwrap().scaled(rng.random_range(0.1..10.0)).unwrap();
            failures += usize::from(!TripleNormChain::evaluate(&a, &chain).unwrap().holds());
            total += 1;
        }
    }
    outcome(failures == 0, format!("{total} vectors, {failures} broken chains"))
}

fn second_moment() -> Outcome {
    let mut rng = rng(6);
    let mut worst: f64 = 0.0;
    for n in 1..=7 {
        for trial in 0..200 {
            let a = if trial % 2 == 0 {
                WeightVector::random_unit(n, &mut rng).unwrap()
            } else {
                WeightVector::new((0..2 * n).map(|_| rng.random_range(-5.0..5.0)).collect()).unwrap()
            };
            let exact = exact_moment(&a, 2.0).unwrap().value;
            let closed = second_moment_closed(&a);
            let scale = exact.abs().max(closed.abs());
            if scale > 0.0 {
                worst = worst.max((exact - closed).abs() / scale);
            }
        }
    }
    let correlations_exact =
        (1..=7).all(|n| pair_correlation_exact(n).unwrap() == Ratio::new(-1, 2 * n as i64 - 1));
    outcome(
        worst <= 1e-12 && correlations_exact,
        format!("max relative error {worst:.2e}; pair correlations exact: {correlations_exact}"),
    )
}

fn standard_distributions() -> Vec<(&'static str, DiscreteDistribution)> {
    vec![
        ("rademacher", DiscreteDistribution::rademacher()),
        ("two-point", DiscreteDistribution::new(vec![(0.0, 0.5), (2.0, 0.5)]).unwrap()),
        ("uniform", DiscreteDistribution::uniform(&[-2.0, -1.0, 0.0, 1.0, 2.0]).unwrap()),
        ("geometric", DiscreteDistribution::truncated_geometric(0.5, 20).unwrap()),
    ]
}

fn orlicz() -> Outcome {
    let tol = 1e-10;
    let mut defining_failures = 0;
    let functions = [
        OrliczFunction::psi(1.0).unwrap(),
        OrliczFunction::psi(2.0).unwrap(),
        OrliczFunction::psi(3.0).unwrap(),
        OrliczFunction::phi(1.0).unwrap(),
        OrliczFunction::phi(2.5).unwrap(),
    ];
    for (_, d) in standard_distributions() {
        for &psi in &functions {
            let c = orlicz_norm(&d, psi, tol).unwrap();
            let upper = psi.expectation(&d, c) <= 1.0;
            let lower = c <= 2.0 * tol || psi.expectation(&d, c - 2.0 * tol) > 1.0;
            defining_failures += usize::from(!(upper && lower));
        }
    }

    let closed_forms = [
        (
            orlicz_norm(&DiscreteDistribution::point_mass(LN_2).unwrap(), OrliczFunction::psi(1.0).unwrap(), tol).unwrap(),
            1.0,
        ),
        (
            orlicz_norm(&DiscreteDistribution::rademacher(), OrliczFunction::psi(2.0).unwrap(), tol).unwrap(),
            1.0 / LN_2.sqrt(),
        ),
        (
            orlicz_norm(&DiscreteDistribution::point_mass(3.0).unwrap(), OrliczFunction::phi(4.0).unwrap(), tol).unwrap(),
            3.0 / 4.0f64.powf(0.25),
        ),
    ];
    let closed_error = closed_forms.iter().map(|(got, want)| (got - want).abs()).fold(0.0, f64::max);

    let t_grid = grid(0.05, 12.0, 0.05);
    let mut relation_failures = Vec::new();
    let mut relations = 0;
    for (name, d) in standard_distributions() {
        for alpha in [1.0, 1.5, 2.0] {
            let report = check_equivalences(&d, alpha, 20.0, &t_grid).unwrap();
            relations += report.relations_checked.len();
            for r in report.relations_checked.iter().filter(|r| !r.holds) {
                relation_failures.push(format!("{name} alpha={alpha}: {}", r.label));
            }
        }
    }
    outcome(
        defining_failures == 0 && closed_error <= 1e-8 && relation_failures.is_empty(),
        format!(
            "defining pair failures {defining_failures}; closed-form error {closed_error:.2e}; {relations} relations, failing: {relation_failures:?}"
        ),
    )
}

fn integral_identity() -> Outcome {
    let mut dists: Vec<DiscreteDistribution> = standard_distributions().into_iter().map(|(_, d)| d).collect();
    dists.push(DiscreteDistribution::point_mass(1.0).unwrap());
    dists.push(DiscreteDistribution::new(vec![(-1.0, 0.25), (-3.0, 0.75)]).unwrap());
    let mut rng = rng(8);
    let ensemble = Ensemble::default();
    for n in 1..=6 {
        let a = WeightVector::random_unit(n, &mut rng).unwrap();
        let law: Vec<(f64, f64)> = ensemble
            .signed_sum_distribution(&a)
            .unwrap()
            .into_iter()
            .map(|(v, p)| (v.abs(), p))
            .collect();
        let mean: f64 = law.iter().map(|(v, p)| v * p).sum();
        dists.push(DiscreteDistribution::from_weights(law.into_iter().map(|(v, p)| (v - mean, p)).collect()).unwrap());
    }
    let mut failures = 0;
    let mut checks = 0;
    for d in &dists {
        for p in [1.0, 2.0, 3.0, 4.0, 7.5] {
            failures += usize::from(!moment_tail_integral_check(d, p).unwrap().all_hold);
            checks += 1;
        }
    }
    outcome(failures == 0, format!("{checks} (distribution, p) pairs, {failures} failures"))
}

fn gamma() -> Outcome {
    let report = gamma_bound_check(&grid(1.0, 50.0, 0.1)).unwrap();
    // Γ(k + 1/2) = (2k)! √π / (4^k k!)
    let mut worst: f64 = 0.0;
    let mut log_factorial = vec![0.0f64; 100];
    for k in 1..100 {
        log_factorial[k] = log_factorial[k - 1] + (k as f64).ln();
    }
    for k in 0..50 {
        let closed = log_factorial[2 * k] + 0.5 * PI.ln() - k as f64 * 4.0f64.ln() - log_factorial[k];
        worst = worst.max((ln_gamma(k as f64 + 0.5) - closed).abs());
    }
    outcome(
        report.all_hold && worst <= 1e-10,
        format!(
            "{} grid points, {} violations; half-integer log error {worst:.2e}",
            report.points.len(),
            report.violations().count()
        ),
    )
}

fn monte_carlo() -> Outcome {
    let runs = 1000u64;
    let mut agree = 0;
    for seed in 0..runs {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 1 + (seed % 7) as usize;
        let p = [1.0, 2.0, 3.0, 4.0][(seed / 7 % 4) as usize];
        let a = WeightVector::random_unit(n, &mut rng).unwrap();
        let exact = exact_moment(&a, p).unwrap().value;
        let mc = mc_moment(&a, p, 2000, seed).unwrap();
        // constant f has zero sample variance; leave room for rounding
        let slack = 4.0 * mc.stderr + 1e-12 * exact.abs();
        agree += u64::from((mc.value - exact).abs() <= slack);
    }
    let rate = agree as f64 / runs as f64;
    outcome(rate >= 0.99, format!("{agree}/{runs} runs within 4 stderr"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("spectral gap equals 1/n", spectral_gaps),
        ("lumping consistency", lumping),
        ("moment bound certification", moment_certification),
        ("tail bounds", tails),
        ("triple norm chain", triple_norm_chain),
        ("second moment and pair correlation", second_moment),
        ("orlicz norms and equivalence constants", orlicz),
        ("moment-tail integral identity", integral_identity),
        ("gamma bound", gamma),
        ("monte carlo consistency", monte_carlo),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let result = run();
        failed += usize::from(!result.pass);
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict}: {name} ({})", k + 1, result.detail);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
