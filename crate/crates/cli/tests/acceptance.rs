//! Acceptance checks, one pass/fail line per criterion.

use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use tracegen::catalog;
use tracegen::combinatorics::mobius_polynomial;
use tracegen::estimator::{estimate_expectation, exact_boundary_expectations, CostFunction};
use tracegen::measure::{cylinder_probability, h_vector, parry_matrices, CliqueChain};
use tracegen::oracle::{chi_square_uniformity, congruence_closure, divisor_set, enumerate_mk, uniform_mean};
use tracegen::sampler::{ProductSampler, RandomSource, Sample, UniformSampler, DEFAULT_MAX_REJECTS};
use tracegen::{CliqueFamily, Error, IndependencePair, TraceMonoid};

type Check = Result<String, String>;
/// Name, check and optional runtime limit.
type Criterion = (&'static str, fn() -> Check, Option<Duration>);

fn ensure(ok: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(message())
    }
}

fn within_4se(hits: u64, n: u64, p: f64) -> bool {
    let se = (p * (1.0 - p) / n as f64).sqrt();
    (hits as f64 / n as f64 - p).abs() <= 4.0 * se
}

fn core_err(e: Error) -> String {
    e.to_string()
}

fn fig1() -> TraceMonoid {
    TraceMonoid::new(catalog::abc()).expect("valid monoid")
}

/// Admissible clique paths of length `1..=depth` starting from a
/// non-empty clique; a path stops after reaching the empty clique.
fn paths(family: &CliqueFamily, depth: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = family.non_empty().map(|i| vec![i]).collect();
    let mut frontier = all.clone();
    for _ in 1..depth {
        let mut next = Vec::new();
        for p in &frontier {
            for &j in family.successors(*p.last().unwrap()) {
                let mut q = p.clone();
                q.push(j);
                next.push(q);
            }
        }
        all.extend(next.iter().cloned());
        frontier = next.into_iter().filter(|p| p.last() != Some(&0)).collect();
    }
    all
}

fn counting() -> Check {
    let m = fig1();
    ensure(m.mobius.coefficients() == [1, -3, 1], || format!("mu = {}", m.mobius))?;
    let root = (3.0 - 5f64.sqrt()) / 2.0;
    ensure((m.p0 - root).abs() <= 1e-12, || format!("p0 = {}", m.p0))?;
    let want = [1u64, 3, 8, 21, 55, 144, 377, 987, 2584];
    let lambda = m.growth(8);
    for (k, &w) in want.iter().enumerate() {
        let enumerated = enumerate_mk(&m.pair, k).map_err(core_err)?.len() as u64;
        ensure(lambda.get(k).to_string() == w.to_string() && enumerated == w, || {
            format!("k = {k}: recurrence {}, enumeration {enumerated}, expected {w}", lambda.get(k))
        })?;
    }
    Ok(format!("mu = 1 -3 1, |p0 - (3-sqrt5)/2| = {:.1e}, lambda(0..8) matches enumeration", (m.p0 - root).abs()))
}

fn chain_algebra() -> Check {
    let mut cases = 0;
    for (name, pair) in catalog::irreducible_suite() {
        let family = CliqueFamily::new(&pair).map_err(core_err)?;
        let p0 = mobius_polynomial(&family).principal_root().map_err(core_err)?;
        for p in [p0 / 4.0, p0 / 2.0, 0.75 * p0, p0] {
            let chain = CliqueChain::new(&family, p).map_err(core_err)?;
            let sum = chain.h().iter().sum::<f64>();
            ensure((sum - 1.0).abs() <= 1e-12, || format!("{name} p={p}: sum h = {sum}"))?;
            let rows = chain.transition().max_row_sum_deviation();
            ensure(rows <= 1e-12, || format!("{name} p={p}: row deviation {rows}"))?;
            ensure(family.non_empty().all(|i| chain.h()[i] > 0.0), || format!("{name} p={p}: h not positive"))?;
            ensure((chain.h()[0] == 0.0) == (p == p0), || format!("{name} p={p}: h(empty) = {}", chain.h()[0]))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} monoid/parameter cases"))
}

fn cylinders() -> Check {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (_, pair) in catalog::irreducible_suite() {
        let family = CliqueFamily::new(&pair).map_err(core_err)?;
        let p0 = mobius_polynomial(&family).principal_root().map_err(core_err)?;
        for p in [p0 / 4.0, p0 / 2.0, 0.75 * p0, p0] {
            let chain = CliqueChain::new(&family, p).map_err(core_err)?;
            for path in paths(&family, 4) {
                let d = (chain.path_probability(&path) - cylinder_probability(&family, p, chain.h(), &path)).abs();
                worst = worst.max(d);
                count += 1;
            }
        }
    }
    ensure(worst <= 1e-12, || format!("max deviation {worst:.3e}"))?;
    Ok(format!("{count} chains, max deviation {worst:.3e}"))
}

fn parry() -> Check {
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for (name, pair) in catalog::irreducible_suite() {
        let m = TraceMonoid::new(pair).map_err(core_err)?;
        let chain = CliqueChain::uniform(&m.family).map_err(core_err)?;
        let parry = parry_matrices(&m.family, &m.decomposition, m.p0, chain.g()).map_err(core_err)?;
        let rho = parry.spectral_radius();
        let (a, b, c) = (
            (rho.eigenvalue - 1.0).abs(),
            parry.invariance_residual(),
            parry.max_deviation_from(chain.transition()),
        );
        ensure(rho.converged && a <= 1e-9 && b <= 1e-12 && c <= 1e-12, || {
            format!("{name}: |rho-1| = {a:.3e}, |Bg-g| = {b:.3e}, |C-P| = {c:.3e}")
        })?;
        worst = (worst.0.max(a), worst.1.max(b), worst.2.max(c));
    }
    let m = TraceMonoid::new(catalog::commuting_product(3, 2)).map_err(core_err)?;
    let refused = matches!(
        parry_matrices(&m.family, &m.decomposition, m.p0, &vec![1.0; m.family.len()]),
        Err(Error::ReducibleMonoid { .. })
    );
    ensure(refused, || "reducible monoid was not refused".into())?;
    Ok(format!(
        "|rho-1| <= {:.1e}, |Bg-g| <= {:.1e}, |C-P| <= {:.1e}, reducible refused",
        worst.0, worst.1, worst.2
    ))
}

fn exact_sampling() -> Check {
    let m = fig1();
    let mut notes = Vec::new();
    for (k, seed) in [(4usize, 0u64), (5, 0)] {
        let set = enumerate_mk(&m.pair, k).map_err(core_err)?;
        let sampler = UniformSampler::new(&m, k).map_err(core_err)?;
        let mut rng = RandomSource::new(seed, 0).rng();
        let n = 1000 * set.len() as u64;
        let mut counts = vec![0u64; set.len()];
        let mut proposals = 0;
        for _ in 0..n {
            let (t, rejections) = sampler.sample(&m, DEFAULT_MAX_REJECTS, &mut rng).map_err(core_err)?;
            proposals += rejections + 1;
            counts[set.index_of(&t).ok_or("sample outside M_k")?] += 1;
        }
        let chi = chi_square_uniformity(&counts, 0.001).map_err(core_err)?;
        ensure(chi.passed, || format!("k = {k}: chi2 = {:.2}, p-value {:.2e}", chi.statistic, chi.p_value))?;
        let rate = n as f64 / proposals as f64;
        ensure(within_4se(n, proposals, sampler.expected_acceptance()), || {
            format!("k = {k}: acceptance {rate:.5} vs {:.5}", sampler.expected_acceptance())
        })?;
        notes.push(format!(
            "k={k}: chi2 p-value {:.3}, acceptance {rate:.5} (expected {:.5})",
            chi.p_value,
            sampler.expected_acceptance()
        ));
    }
    Ok(notes.join("; "))
}

fn costs(pair: &IndependencePair, k: usize) -> Vec<CostFunction> {
    let mut out = vec![CostFunction::ConstantOne, CostFunction::Height, CostFunction::FirstLayerSize];
    if let Ok(set) = enumerate_mk(pair, k) {
        if let Some(u) = set.traces().first() {
            out.push(CostFunction::IndicatorPrefix(u.clone()));
        }
    }
    out
}

fn estimator() -> Check {
    let mut worst = 0.0f64;
    for (_, pair) in catalog::irreducible_suite() {
        let m = TraceMonoid::new(pair.clone()).map_err(core_err)?;
        for k in 1..=3 {
            let scale = m.p0.powi(k as i32) * m.growth(k).approx(k);
            let set = enumerate_mk(&pair, k).map_err(core_err)?;
            for phi in costs(&pair, k) {
                let (phibar, theta) = exact_boundary_expectations(&m, k, &phi).map_err(core_err)?;
                let exact = scale * uniform_mean(&pair, &set, &phi);
                worst = worst.max((phibar - exact).abs()).max((theta - scale).abs());
            }
        }
    }
    ensure(worst <= 1e-10, || format!("finite-sum identities off by {worst:.3e}"))?;

    let m = fig1();
    let exact = uniform_mean(&m.pair, &enumerate_mk(&m.pair, 5).map_err(core_err)?, &CostFunction::Height);
    let r = estimate_expectation(&m, 5, &CostFunction::Height, 100_000, 2024, 1).map_err(core_err)?;
    let z_height = (r.estimate - exact) / r.standard_error;
    ensure(z_height.abs() <= 4.0, || format!("height: {} vs {exact}, z = {z_height:.2}", r.estimate))?;

    let r = estimate_expectation(&m, 6, &CostFunction::ConstantOne, 100_000, 2025, 1).map_err(core_err)?;
    let z_lambda = (r.lambda_hat - 377.0) / r.lambda_hat_se;
    ensure(z_lambda.abs() <= 4.0, || format!("lambda_hat(6) = {} +- {}", r.lambda_hat, r.lambda_hat_se))?;
    Ok(format!(
        "identities within {worst:.1e}; mean height z = {z_height:.2}; lambda_hat(6) = {:.2} +- {:.2}",
        r.lambda_hat, r.lambda_hat_se
    ))
}

fn product() -> Check {
    let m = TraceMonoid::new(catalog::commuting_product(3, 2)).map_err(core_err)?;
    ensure((m.p0 - 1.0 / 3.0).abs() <= 1e-15, || format!("p0 = {}", m.p0))?;
    let sampler = ProductSampler::uniform(&m).map_err(core_err)?;
    let mut rng = RandomSource::new(7, 0).rng();
    let runs = 100_000u64;
    let mut steps = 0;
    for _ in 0..runs {
        match sampler.sample(1, &mut rng).map_err(core_err)?.remove(1) {
            Sample::Trace(t) => steps += t.height() as u64 + 1,
            Sample::Prefix(_) => return Err("B side did not stop".into()),
        }
    }
    let freq = runs as f64 / steps as f64;
    ensure(within_4se(runs, steps, 1.0 / 3.0), || format!("stop frequency {freq:.5}"))?;

    let h = h_vector(&m.family, m.p0).map_err(core_err)?;
    let local_h: Vec<Vec<f64>> =
        m.components.iter().map(|c| h_vector(&c.family, m.p0)).collect::<Result<_, _>>().map_err(core_err)?;
    let mut worst = 0.0f64;
    for path in paths(&m.family, 2) {
        let whole = cylinder_probability(&m.family, m.p0, &h, &path);
        let mut product = 1.0;
        for (i, c) in m.components.iter().enumerate() {
            let mut local: Vec<usize> = path
                .iter()
                .map(|&j| c.family.index_of(m.decomposition.restrict_clique(i, m.family.get(j))).unwrap())
                .collect();
            if let Some(end) = local.iter().position(|&j| j == 0) {
                local.truncate(end + 1);
            }
            product *= cylinder_probability(&c.family, m.p0, &local_h[i], &local);
        }
        worst = worst.max((whole - product).abs());
    }
    ensure(worst <= 1e-10, || format!("factorization off by {worst:.3e}"))?;
    Ok(format!("B stop frequency {freq:.5} over {steps} steps; factorization within {worst:.1e}"))
}

fn weak_convergence() -> Check {
    let m = fig1();
    let lambda = m.growth(20);
    let ratio = lambda.approx(18) / lambda.approx(20);
    let gap = (ratio - m.p0 * m.p0).abs();
    ensure(gap < 1e-3, || format!("|lambda(18)/lambda(20) - p0^2| = {gap:.3e}"))?;
    Ok(format!("|lambda(18)/lambda(20) - p0^2| = {gap:.3e}"))
}

fn all_words(n_letters: usize, len: usize) -> Vec<Vec<usize>> {
    let mut words = vec![vec![]];
    for _ in 0..len {
        words = words
            .into_iter()
            .flat_map(|w| (0..n_letters).map(move |a| [w.clone(), vec![a]].concat()))
            .collect();
    }
    words
}

fn normal_forms() -> Check {
    let pair = catalog::abc();
    let mut words_checked = 0;
    for len in 0..=6 {
        for w in all_words(pair.len(), len) {
            let t = pair.normalize(&w).map_err(core_err)?;
            for v in congruence_closure(&w, &pair, 8) {
                ensure(pair.normalize(&v).map_err(core_err)? == t, || {
                    format!("{} and {} normalize differently", pair.word_to_string(&w), pair.word_to_string(&v))
                })?;
            }
            words_checked += 1;
        }
    }
    let mut pairs_checked = 0;
    for len in 0..=5 {
        for x in enumerate_mk(&pair, len).map_err(core_err)?.iter() {
            for k in 0..=len {
                let divisors = divisor_set(&pair, x, k).map_err(core_err)?;
                for y in enumerate_mk(&pair, k).map_err(core_err)?.iter() {
                    ensure(pair.divides(y, x) == divisors.contains(y), || format!("divides({y:?}, {x:?})"))?;
                    pairs_checked += 1;
                }
            }
        }
    }
    Ok(format!("{words_checked} words, {pairs_checked} divisor pairs"))
}

fn determinism() -> Check {
    let bin = env!("CARGO_BIN_EXE_tracegen");
    let monoids = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../monoids");
    let fig1 = monoids.join("fig1.json");
    let product = monoids.join("product_3_2.json");
    let runs: Vec<(PathBuf, Vec<&str>)> = vec![
        (fig1.clone(), vec!["sample", "--mode", "exact-k", "--k", "5", "--n", "3", "--seed", "7"]),
        (fig1.clone(), vec!["sample", "--mode", "boundary", "--k", "6", "--n", "5000", "--seed", "1"]),
        (fig1.clone(), vec!["sample", "--mode", "subuniform", "--p", "0.3", "--n", "5000", "--seed", "2"]),
        (product.clone(), vec!["sample", "--mode", "boundary", "--k", "4", "--n", "5000", "--seed", "3"]),
        (product.clone(), vec!["sample", "--mode", "exact-k", "--k", "4", "--n", "200", "--seed", "4"]),
        (fig1.clone(), vec!["estimate", "--k", "5", "--phi", "height", "--n", "20000", "--seed", "5"]),
        (product, vec!["estimate", "--k", "3", "--phi", "one", "--n", "10000", "--seed", "6"]),
    ];
    let invoke = |monoid: &PathBuf, args: &[&str], jobs: &str| -> Result<Vec<u8>, String> {
        let out = Command::new(bin)
            .args(args)
            .arg("--monoid")
            .arg(monoid)
            .args(["--jobs", jobs])
            .output()
            .map_err(|e| e.to_string())?;
        ensure(out.status.success(), || format!("{args:?} failed: {}", String::from_utf8_lossy(&out.stderr)))?;
        Ok(out.stdout)
    };
    for (monoid, args) in &runs {
        let first = invoke(monoid, args, "1")?;
        let again = invoke(monoid, args, "1")?;
        let threaded = invoke(monoid, args, "3")?;
        ensure(first == again, || format!("{args:?}: repeated run differs"))?;
        ensure(first == threaded, || format!("{args:?}: output depends on --jobs"))?;
    }
    Ok(format!("{} invocations byte-identical across repeats and --jobs 1/3", runs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Mobius polynomial and counting", counting, Some(Duration::from_secs(1))),
        ("chain algebra", chain_algebra, Some(Duration::from_secs(1))),
        ("cylinder consistency", cylinders, Some(Duration::from_secs(10))),
        ("Parry comparison", parry, Some(Duration::from_secs(1))),
        ("exact uniform sampling", exact_sampling, Some(Duration::from_secs(120))),
        ("estimator", estimator, Some(Duration::from_secs(120))),
        ("product decomposition", product, None),
        ("weak convergence numeric", weak_convergence, Some(Duration::from_secs(1))),
        ("normal-form soundness", normal_forms, Some(Duration::from_secs(30))),
        ("determinism", determinism, None),
    ];
    let mut failures = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut result = run();
        let elapsed = start.elapsed();
        if let (Ok(detail), Some(limit)) = (&result, limit) {
            if elapsed > *limit {
                result = Err(format!("{detail}; took {elapsed:.2?}, limit {limit:?}"));
            }
        }
        match result {
            Ok(detail) => println!("criterion {:>2} PASS {name} ({elapsed:.2?}): {detail}", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL {name} ({elapsed:.2?}): {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
