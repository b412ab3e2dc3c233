//! Uniform averages over `M_k` from samples of the boundary.
//!
//! For `x` of height `k` let `θ_k(x)` count the divisors of `x` of length
//! `k`, and `φ̄(x)` sum a cost `φ` over them. With `C_1 ... C_k` the first
//! layers of a uniform infinite trace,
//!
//! ```text
//! E[φ̄(C_1 ... C_k)] = p0^k λ(k) E_{M_k} φ,    E[θ_k(C_1 ... C_k)] = p0^k λ(k),
//! ```
//!
//! so the ratio of sample means estimates the uniform average of `φ` and
//! the mean of `θ_k` estimates `λ(k)`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::bundle::TraceMonoid;
use crate::error::{Error, Result};
use crate::measure::CliqueChain;
use crate::monoid::{format, IndependencePair, Trace};
use crate::sampler::{run_streams, ProductSampler};

pub const MIN_SAMPLES: usize = 100;

/// Builtin costs on traces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CostFunction {
    Height,
    FirstLayerSize,
    ConstantOne,
    /// `1` on traces divisible by the given one.
    IndicatorPrefix(Trace),
}

impl CostFunction {
    /// Parses `height`, `first-layer`, `one` or `prefix:<trace>`, where the
    /// trace is either a JSON list of layers or a word.
    pub fn parse(text: &str, pair: &IndependencePair) -> Result<Self> {
        match text {
            "height" => Ok(Self::Height),
            "first-layer" | "first_layer_size" => Ok(Self::FirstLayerSize),
            "one" | "constant_one" => Ok(Self::ConstantOne),
            _ => {
                let Some(u) = text.strip_prefix("prefix:") else {
                    return Err(Error::Parse(format!(
                        "unknown cost '{text}', expected height, first-layer, one or prefix:<trace>"
                    )));
                };
                let u = if u.trim_start().starts_with('[') {
                    format::trace_from_json(pair, u)?
                } else {
                    pair.normalize_str(u)?
                };
                Ok(Self::IndicatorPrefix(u))
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Height => "height",
            Self::FirstLayerSize => "first_layer_size",
            Self::ConstantOne => "constant_one",
            Self::IndicatorPrefix(_) => "indicator_prefix",
        }
    }

    pub fn eval(&self, pair: &IndependencePair, y: &Trace) -> f64 {
        match self {
            Self::Height => y.height() as f64,
            Self::FirstLayerSize => y.layers().first().map_or(0, |c| c.len()) as f64,
            Self::ConstantOne => 1.0,
            Self::IndicatorPrefix(u) => f64::from(u8::from(pair.divides(u, y))),
        }
    }
}

/// The pieces of a heap in Cartier-Foata order, with for each piece the
/// earlier pieces it must sit on.
struct Heap {
    letters: Vec<usize>,
    below: Vec<Vec<usize>>,
}

impl Heap {
    fn new(pair: &IndependencePair, x: &Trace) -> Self {
        let letters = x.word();
        let below = (0..letters.len())
            .map(|j| {
                (0..j)
                    .filter(|&i| !pair.independent(letters[i], letters[j]))
                    .collect()
            })
            .collect();
        Self { letters, below }
    }

    /// Visits every down-closed set of `k` pieces once, as an increasing
    /// list of piece indices. A set is built in index order, so a piece may
    /// join only when all pieces below it are already in.
    fn for_each_ideal(&self, k: usize, visit: &mut impl FnMut(&[usize])) {
        let mut chosen = Vec::with_capacity(k);
        let mut inside = vec![false; self.letters.len()];
        self.grow(0, k, &mut chosen, &mut inside, visit);
    }

    fn grow(
        &self,
        from: usize,
        k: usize,
        chosen: &mut Vec<usize>,
        inside: &mut [bool],
        visit: &mut impl FnMut(&[usize]),
    ) {
        if chosen.len() == k {
            visit(chosen);
            return;
        }
        let needed = k - chosen.len();
        for j in from..self.letters.len() {
            if self.letters.len() - j < needed {
                break;
            }
            if self.below[j].iter().all(|&i| inside[i]) {
                inside[j] = true;
                chosen.push(j);
                self.grow(j + 1, k, chosen, inside, visit);
                chosen.pop();
                inside[j] = false;
            }
        }
    }

    fn subtrace(&self, pair: &IndependencePair, pieces: &[usize]) -> Trace {
        let word: Vec<usize> = pieces.iter().map(|&i| self.letters[i]).collect();
        pair.normalize(&word).expect("letters of a valid trace")
    }
}

/// `{y ≤ x : |y| = k}`, each divisor once.
pub fn enumerate_length_k_divisors(pair: &IndependencePair, x: &Trace, k: usize) -> Vec<Trace> {
    let heap = Heap::new(pair, x);
    let mut out = Vec::new();
    heap.for_each_ideal(k, &mut |pieces| out.push(heap.subtrace(pair, pieces)));
    out
}

/// `θ_k(x)`: the number of divisors of `x` of length `k`.
pub fn theta_k(pair: &IndependencePair, x: &Trace, k: usize) -> u64 {
    let heap = Heap::new(pair, x);
    let mut count = 0;
    heap.for_each_ideal(k, &mut |_| count += 1);
    count
}

/// `φ̄(x) = Σ_{y ≤ x, |y| = k} φ(y)`.
pub fn phibar(phi: &CostFunction, pair: &IndependencePair, x: &Trace, k: usize) -> f64 {
    phibar_and_theta(phi, pair, x, k).0
}

/// `(φ̄(x), θ_k(x))` from a single enumeration.
pub fn phibar_and_theta(phi: &CostFunction, pair: &IndependencePair, x: &Trace, k: usize) -> (f64, u64) {
    let heap = Heap::new(pair, x);
    let mut sum = 0.0;
    let mut count = 0;
    heap.for_each_ideal(k, &mut |pieces| {
        count += 1;
        sum += match phi {
            CostFunction::ConstantOne => 1.0,
            _ => phi.eval(pair, &heap.subtrace(pair, pieces)),
        };
    });
    (sum, count)
}

#[derive(Debug, Clone)]
pub struct EstimateReport {
    pub cost: &'static str,
    pub k: usize,
    pub samples: usize,
    /// Ratio estimate of the uniform average of the cost over `M_k`.
    pub estimate: f64,
    pub standard_error: f64,
    pub mean_phibar: f64,
    pub mean_theta: f64,
    /// `mean(θ_k) / p0^k`.
    pub lambda_hat: f64,
    pub lambda_hat_se: f64,
    pub exact_lambda: BigInt,
    /// `mean(φ̄) / (p0^k λ(k))` and its standard error.
    pub exact_normalized: Option<(f64, f64)>,
    pub p0: f64,
    /// Set for reducible monoids, where `θ_k` is not known to stay bounded.
    pub reducible_warning: bool,
}

/// Monte-Carlo estimate of the uniform average of `phi` over `M_k` from
/// `n` boundary prefixes of height `k`.
pub fn estimate_expectation(
    monoid: &TraceMonoid,
    k: usize,
    phi: &CostFunction,
    n: usize,
    seed: u64,
    jobs: usize,
) -> Result<EstimateReport> {
    if n < MIN_SAMPLES {
        return Err(Error::ParameterOutOfRange { value: n as f64, domain: format!("N >= {MIN_SAMPLES}") });
    }
    let reducible_warning = !monoid.is_irreducible();
    if reducible_warning {
        log::warn!("reducible monoid: θ_k is not known to be bounded, estimates may be noisy");
    }
    let sampler = ProductSampler::uniform(monoid)?;
    let draws = run_streams(n, seed, jobs, |rng| {
        let layers = sampler.sample_boundary_prefix(monoid, k, rng)?;
        let x = Trace::from_layers_unchecked(layers);
        let (a, b) = phibar_and_theta(phi, &monoid.pair, &x, k);
        Ok((a, b as f64))
    })?;

    let nf = n as f64;
    let mean_a = draws.iter().map(|d| d.0).sum::<f64>() / nf;
    let mean_b = draws.iter().map(|d| d.1).sum::<f64>() / nf;
    let (mut var_a, mut var_b, mut cov) = (0.0, 0.0, 0.0);
    for &(a, b) in &draws {
        var_a += (a - mean_a) * (a - mean_a);
        var_b += (b - mean_b) * (b - mean_b);
        cov += (a - mean_a) * (b - mean_b);
    }
    var_a /= nf - 1.0;
    var_b /= nf - 1.0;
    cov /= nf - 1.0;

    let estimate = mean_a / mean_b;
    // Delta method for a ratio of means.
    let ratio_var = (var_a - 2.0 * estimate * cov + estimate * estimate * var_b) / (mean_b * mean_b * nf);
    let scale = monoid.p0.powi(k as i32);
    let exact_lambda = monoid.growth(k).get(k).clone();
    let exact_normalized = exact_lambda.to_f64().filter(|l| l.is_finite()).map(|l| {
        let norm = scale * l;
        (mean_a / norm, (var_a / nf).sqrt() / norm)
    });
    Ok(EstimateReport {
        cost: phi.name(),
        k,
        samples: n,
        estimate,
        standard_error: ratio_var.max(0.0).sqrt(),
        mean_phibar: mean_a,
        mean_theta: mean_b,
        lambda_hat: mean_b / scale,
        lambda_hat_se: (var_b / nf).sqrt() / scale,
        exact_lambda,
        exact_normalized,
        p0: monoid.p0,
        reducible_warning,
    })
}

/// Exact `(E[φ̄(C_1 ... C_k)], E[θ_k(C_1 ... C_k)])` under the uniform chain,
/// summing over every admissible chain of `k` non-empty cliques.
pub fn exact_boundary_expectations(
    monoid: &TraceMonoid,
    k: usize,
    phi: &CostFunction,
) -> Result<(f64, f64)> {
    if !monoid.is_irreducible() {
        return Err(Error::ReducibleMonoid { components: monoid.decomposition.len() });
    }
    let chain = CliqueChain::uniform(&monoid.family)?;
    let mut sums = (0.0, 0.0);
    let mut path = Vec::with_capacity(k);
    for start in monoid.family.non_empty() {
        path.push(start);
        sum_chains(monoid, &chain, k, phi, &mut path, &mut sums);
        path.pop();
    }
    Ok(sums)
}

fn sum_chains(
    monoid: &TraceMonoid,
    chain: &CliqueChain,
    k: usize,
    phi: &CostFunction,
    path: &mut Vec<usize>,
    sums: &mut (f64, f64),
) {
    if path.len() == k {
        let layers = path.iter().map(|&i| monoid.family.get(i)).collect();
        let x = Trace::from_layers_unchecked(layers);
        let weight = chain.path_probability(path);
        let (a, b) = phibar_and_theta(phi, &monoid.pair, &x, k);
        sums.0 += weight * a;
        sums.1 += weight * b as f64;
        return;
    }
    let last = *path.last().expect("non-empty path");
    for &next in monoid.family.successors(last) {
        if next != 0 {
            path.push(next);
            sum_chains(monoid, chain, k, phi, path, sums);
            path.pop();
        }
    }
}
