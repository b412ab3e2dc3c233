//! Random generation from the clique chain.
//!
//! * boundary prefixes: the first `k` cliques of a `ν_{p0}`-distributed
//!   infinite trace;
//! * finite traces: `ν_p` for `p < p0`, by running the chain until the
//!   empty clique absorbs it;
//! * exactly uniform traces of length `k`: `ν_p` restricted to length `k`
//!   is uniform, so finite samples are drawn at the parameter with mean
//!   size `k` and rejected until one has the right length;
//! * reducible monoids: the measure is the product of the components'
//!   measures at the same parameter, so components are sampled
//!   independently and their layers merged.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::TraceMonoid;
use crate::combinatorics::{growth_coefficients, optimal_boltzmann_parameter, DEFAULT_PARAMETER_TOL};
use crate::error::{Error, Result};
use crate::measure::{CliqueChain, AT_P0_TOL};
use crate::monoid::{Clique, Trace};

pub const DEFAULT_MAX_REJECTS: u64 = 10_000_000;
pub const ABSORPTION_CAP: u64 = 100_000_000;
/// Samples per stream in [`run_streams`].
pub const STREAM_CHUNK: usize = 4096;

/// Seed and stream selecting a reproducible ChaCha8 sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RandomSource {
    pub seed: u64,
    pub stream_id: u64,
}

impl RandomSource {
    pub const ALGORITHM: &'static str = "chacha8";

    pub fn new(seed: u64, stream_id: u64) -> Self {
        Self { seed, stream_id }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// Inverse-CDF sampling over a fixed support order.
#[derive(Debug, Clone)]
struct Categorical {
    support: Vec<usize>,
    cumulative: Vec<f64>,
}

impl Categorical {
    fn new(weights: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut support = Vec::new();
        let mut cumulative = Vec::new();
        let mut total = 0.0;
        for (i, w) in weights {
            if w > 0.0 {
                total += w;
                support.push(i);
                cumulative.push(total);
            }
        }
        Self { support, cumulative }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("non-empty support");
        let u = rng.random::<f64>() * total;
        let i = self.cumulative.partition_point(|&c| c <= u);
        self.support[i.min(self.support.len() - 1)]
    }
}

/// A sample: a finite trace, or the first layers of an infinite one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sample {
    Trace(Trace),
    Prefix(Vec<Clique>),
}

impl Sample {
    pub fn layers(&self) -> &[Clique] {
        match self {
            Sample::Trace(t) => t.layers(),
            Sample::Prefix(layers) => layers,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SampleOutcome {
    pub sample: Sample,
    pub p: f64,
    pub rejections: u64,
    pub stream_id: u64,
}

/// A clique chain with its initial law and rows prepared for sampling.
#[derive(Debug, Clone)]
pub struct ChainSampler {
    chain: CliqueChain,
    initial: Categorical,
    rows: Vec<Option<Categorical>>,
}

impl ChainSampler {
    pub fn new(chain: CliqueChain) -> Self {
        let initial = Categorical::new(chain.h().iter().copied().enumerate().filter(|&(i, _)| {
            // At the root only non-empty cliques start a boundary prefix.
            !(chain.at_p0() && i == 0)
        }));
        let rows = (0..chain.cliques().len())
            .map(|i| {
                chain
                    .transition()
                    .row(i)
                    .map(|r| Categorical::new(r.iter().copied().enumerate()))
            })
            .collect();
        Self { chain, initial, rows }
    }

    pub fn chain(&self) -> &CliqueChain {
        &self.chain
    }

    fn step<R: Rng + ?Sized>(&self, from: usize, rng: &mut R) -> usize {
        self.rows[from].as_ref().expect("defined row").sample(rng)
    }

    /// `C_1, ..., C_k` under the uniform measure.
    pub fn sample_boundary_prefix<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<Vec<Clique>> {
        if !self.chain.at_p0() {
            return Err(Error::NotAtP0 { p: self.chain.p(), p0: self.chain.p0() });
        }
        let mut layers = Vec::with_capacity(k);
        if k == 0 {
            return Ok(layers);
        }
        let mut state = self.initial.sample(rng);
        layers.push(self.chain.cliques()[state]);
        for _ in 1..k {
            state = self.step(state, rng);
            layers.push(self.chain.cliques()[state]);
        }
        Ok(layers)
    }

    /// Runs the absorbing chain; gives up early (returning `None`) once the
    /// trace is longer than `max_len`.
    fn walk_finite<R: Rng + ?Sized>(&self, max_len: usize, rng: &mut R) -> Result<Option<Trace>> {
        if self.chain.at_p0() {
            return Err(Error::ParameterOutOfRange {
                value: self.chain.p(),
                domain: format!("(0, {}) for finite traces", self.chain.p0()),
            });
        }
        let mut layers = Vec::new();
        let mut len = 0;
        let mut state = self.initial.sample(rng);
        let mut steps = 0u64;
        while state != 0 {
            let c = self.chain.cliques()[state];
            len += c.len();
            if len > max_len {
                return Ok(None);
            }
            layers.push(c);
            steps += 1;
            if steps >= ABSORPTION_CAP {
                return Err(Error::IterationCap(ABSORPTION_CAP));
            }
            state = self.step(state, rng);
        }
        Ok(Some(Trace::from_layers_unchecked(layers)))
    }

    /// A `ν_p`-distributed finite trace, `p < p0`.
    pub fn sample_finite_trace<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Trace> {
        Ok(self.walk_finite(usize::MAX, rng)?.expect("unbounded walk"))
    }
}

/// Independent samplers for every irreducible component at one parameter.
#[derive(Debug, Clone)]
pub struct ProductSampler {
    p: f64,
    components: Vec<ChainSampler>,
}

impl ProductSampler {
    pub fn new(monoid: &TraceMonoid, p: f64) -> Result<Self> {
        if !(p > 0.0 && p <= monoid.p0 * (1.0 + AT_P0_TOL)) {
            return Err(Error::ParameterOutOfRange { value: p, domain: format!("(0, {}]", monoid.p0) });
        }
        let components = monoid
            .components
            .iter()
            .map(|c| CliqueChain::new(&c.family, p).map(ChainSampler::new))
            .collect::<Result<_>>()?;
        Ok(Self { p, components })
    }

    /// The sampler at the principal root: the uniform measure.
    pub fn uniform(monoid: &TraceMonoid) -> Result<Self> {
        Self::new(monoid, monoid.p0)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn components(&self) -> &[ChainSampler] {
        &self.components
    }

    /// Whether every component produces finite traces.
    pub fn is_finite(&self) -> bool {
        self.components.iter().all(|c| !c.chain().at_p0())
    }

    /// One outcome per component, in local letters: a boundary prefix of
    /// `k` layers for components whose root is `p`, a finite trace otherwise.
    pub fn sample<R: Rng + ?Sized>(&self, k: usize, rng: &mut R) -> Result<Vec<Sample>> {
        self.components
            .iter()
            .map(|c| {
                if c.chain().at_p0() {
                    c.sample_boundary_prefix(k, rng).map(Sample::Prefix)
                } else {
                    c.sample_finite_trace(rng).map(Sample::Trace)
                }
            })
            .collect()
    }

    /// First `k` layers of a uniform infinite trace of the whole monoid.
    pub fn sample_boundary_prefix<R: Rng + ?Sized>(
        &self,
        monoid: &TraceMonoid,
        k: usize,
        rng: &mut R,
    ) -> Result<Vec<Clique>> {
        if self.is_finite() {
            return Err(Error::NotAtP0 { p: self.p, p0: monoid.p0 });
        }
        let parts: Vec<Vec<Clique>> = self
            .sample(k, rng)?
            .into_iter()
            .map(|s| s.layers().iter().take(k).copied().collect())
            .collect();
        Ok(monoid.decomposition.merge_layers(&parts))
    }

    /// A `ν_p`-distributed finite trace of the whole monoid, or `None` as
    /// soon as the total length exceeds `max_len`.
    pub fn sample_finite_bounded<R: Rng + ?Sized>(
        &self,
        monoid: &TraceMonoid,
        max_len: usize,
        rng: &mut R,
    ) -> Result<Option<Trace>> {
        let mut parts = Vec::with_capacity(self.components.len());
        let mut budget = max_len;
        for c in &self.components {
            match c.walk_finite(budget, rng)? {
                Some(t) => {
                    budget -= t.len();
                    parts.push(t.layers().to_vec());
                }
                None => return Ok(None),
            }
        }
        Ok(Some(Trace::from_layers_unchecked(monoid.decomposition.merge_layers(&parts))))
    }

    pub fn sample_finite_trace<R: Rng + ?Sized>(&self, monoid: &TraceMonoid, rng: &mut R) -> Result<Trace> {
        Ok(self.sample_finite_bounded(monoid, usize::MAX, rng)?.expect("unbounded walk"))
    }
}

/// `sample_product`: independent per-component outcomes at parameter `p`.
pub fn sample_product<R: Rng + ?Sized>(
    monoid: &TraceMonoid,
    p: f64,
    k: usize,
    rng: &mut R,
) -> Result<Vec<Sample>> {
    ProductSampler::new(monoid, p)?.sample(k, rng)
}

/// Exactly uniform sampler of traces of length `k`, by rejection from
/// `ν_p` at the parameter whose mean size is `k`.
#[derive(Debug, Clone)]
pub struct UniformSampler {
    k: usize,
    p: f64,
    acceptance: f64,
    proposal: Option<ProductSampler>,
}

impl UniformSampler {
    pub fn new(monoid: &TraceMonoid, k: usize) -> Result<Self> {
        if k == 0 {
            return Ok(Self { k, p: 0.0, acceptance: 1.0, proposal: None });
        }
        let p = optimal_boltzmann_parameter(&monoid.mobius, k, DEFAULT_PARAMETER_TOL)?;
        let proposal = ProductSampler::new(monoid, p)?;
        Ok(Self { k, p, acceptance: acceptance_probability(monoid, k, p), proposal: Some(proposal) })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Probability that one proposal has length `k`: `λ(k) p^k μ(p)`.
    pub fn expected_acceptance(&self) -> f64 {
        self.acceptance
    }

    /// A uniform trace of length `k` and the number of rejected proposals.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        monoid: &TraceMonoid,
        max_rejects: u64,
        rng: &mut R,
    ) -> Result<(Trace, u64)> {
        let Some(proposal) = &self.proposal else {
            return Ok((Trace::empty(), 0));
        };
        let mut rejections = 0;
        loop {
            if let Some(t) = proposal.sample_finite_bounded(monoid, self.k, rng)? {
                if t.len() == self.k {
                    return Ok((t, rejections));
                }
            }
            rejections += 1;
            if rejections >= max_rejects {
                return Err(Error::RejectBudgetExhausted(rejections));
            }
        }
    }
}

/// `ν_p(M_k) = λ(k) p^k μ(p)`.
pub fn acceptance_probability(monoid: &TraceMonoid, k: usize, p: f64) -> f64 {
    let lambda = growth_coefficients(&monoid.mobius, k);
    let count = lambda.get(k).to_f64().unwrap_or(f64::INFINITY);
    // Work in logs: λ(k) and p^k leave the f64 range separately for large k.
    (count.ln() + k as f64 * p.ln()).exp() * monoid.mobius.eval(p)
}

/// Exactly uniform sample of `M_k`.
pub fn sample_uniform_mk<R: Rng + ?Sized>(
    monoid: &TraceMonoid,
    k: usize,
    rng: &mut R,
    max_rejects: u64,
) -> Result<(Trace, u64)> {
    UniformSampler::new(monoid, k)?.sample(monoid, max_rejects, rng)
}

/// Draws `n` values, stream `i` of `seed` producing values
/// `i * STREAM_CHUNK ..`, spread over `jobs` threads. The result does not
/// depend on `jobs`.
pub fn run_streams<T, F>(n: usize, seed: u64, jobs: usize, draw: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> Result<T> + Sync,
{
    let chunks = n.div_ceil(STREAM_CHUNK);
    let run_chunk = |c: usize| -> Result<Vec<T>> {
        let mut rng = RandomSource::new(seed, c as u64).rng();
        let size = STREAM_CHUNK.min(n - c * STREAM_CHUNK);
        (0..size).map(|_| draw(&mut rng)).collect()
    };
    let jobs = jobs.clamp(1, chunks.max(1));
    if jobs == 1 {
        let mut out = Vec::with_capacity(n);
        for c in 0..chunks {
            out.extend(run_chunk(c)?);
        }
        return Ok(out);
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<Result<Vec<T>>>>> = Mutex::new((0..chunks).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let c = next.fetch_add(1, Ordering::Relaxed);
                if c >= chunks {
                    break;
                }
                let result = run_chunk(c);
                slots.lock().expect("no worker panicked")[c] = Some(result);
            });
        }
    });
    let mut out = Vec::with_capacity(n);
    for slot in slots.into_inner().expect("no worker panicked") {
        out.extend(slot.expect("every chunk ran")?);
    }
    Ok(out)
}
