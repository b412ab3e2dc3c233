//! Brute-force ground truth for small instances.
//!
//! Everything here is exhaustive and meant for desk-scale checks of the
//! fast code paths: enumeration of `M_k`, congruence classes of words,
//! divisor sets, exact uniform averages and a χ² uniformity test.

mod stats;

pub use stats::{chi_square_uniformity, ln_gamma, regularized_gamma_p, regularized_gamma_q, ChiSquare};

use std::collections::{BTreeSet, VecDeque};

use num_traits::ToPrimitive;

use crate::combinatorics::{growth_coefficients, mobius_polynomial};
use crate::error::{Error, Result};
use crate::estimator::CostFunction;
use crate::monoid::{Clique, CliqueFamily, IndependencePair, Letter, Trace};

/// Largest `λ(k)` (or word count) the enumerators accept.
pub const ENUMERATION_BUDGET: u64 = 10_000_000;
pub const DEFAULT_CLOSURE_LEN: usize = 8;

/// All traces of one length, sorted and without duplicates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceSet {
    k: usize,
    traces: Vec<Trace>,
}

impl TraceSet {
    fn from_unsorted(k: usize, mut traces: Vec<Trace>) -> Self {
        traces.sort();
        traces.dedup();
        Self { k, traces }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    pub fn index_of(&self, t: &Trace) -> Option<usize> {
        self.traces.binary_search(t).ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Trace> {
        self.traces.iter()
    }
}

/// `M_k` by depth-first search over the Cartier-Foata automaton.
pub fn enumerate_mk(pair: &IndependencePair, k: usize) -> Result<TraceSet> {
    enumerate_mk_in(&CliqueFamily::new(pair)?, k)
}

pub fn enumerate_mk_in(family: &CliqueFamily, k: usize) -> Result<TraceSet> {
    let expected = growth_coefficients(&mobius_polynomial(family), k).get(k).clone();
    if expected.to_u64().is_none_or(|n| n > ENUMERATION_BUDGET) {
        return Err(Error::BudgetExceeded { count: expected.to_string(), budget: ENUMERATION_BUDGET });
    }
    let mut out = Vec::new();
    let mut layers = Vec::new();
    if k == 0 {
        out.push(Trace::empty());
    } else {
        for start in family.non_empty() {
            extend_chain(family, start, k, &mut layers, &mut out);
        }
    }
    Ok(TraceSet::from_unsorted(k, out))
}

fn extend_chain(family: &CliqueFamily, state: usize, remaining: usize, layers: &mut Vec<Clique>, out: &mut Vec<Trace>) {
    let c = family.get(state);
    if c.len() > remaining {
        return;
    }
    layers.push(c);
    if c.len() == remaining {
        out.push(Trace::from_layers_unchecked(layers.clone()));
    } else {
        for &next in family.successors(state) {
            if next != 0 {
                extend_chain(family, next, remaining - c.len(), layers, out);
            }
        }
    }
    layers.pop();
}

/// `M_k` by normalizing every word of length `k`; a cross-check of
/// [`enumerate_mk`].
pub fn enumerate_mk_by_words(pair: &IndependencePair, k: usize) -> Result<TraceSet> {
    let words = (pair.len() as u64).checked_pow(k as u32);
    if words.is_none_or(|n| n > ENUMERATION_BUDGET) {
        let count = words.map_or_else(|| format!("{}^{k}", pair.len()), |n| n.to_string());
        return Err(Error::BudgetExceeded { count, budget: ENUMERATION_BUDGET });
    }
    let mut seen = BTreeSet::new();
    let mut word = vec![0; k];
    loop {
        seen.insert(pair.normalize(&word)?);
        // Odometer step over the alphabet.
        let mut i = 0;
        while i < k && word[i] + 1 == pair.len() {
            word[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
        word[i] += 1;
    }
    Ok(TraceSet { k, traces: seen.into_iter().collect() })
}

/// Every word obtained from `word` by swapping adjacent independent
/// letters, the input included.
///
/// # Panics
/// If `word` is longer than `max_len`.
pub fn congruence_closure(word: &[Letter], pair: &IndependencePair, max_len: usize) -> BTreeSet<Vec<Letter>> {
    assert!(word.len() <= max_len, "word of length {} exceeds {max_len}", word.len());
    let mut seen = BTreeSet::from([word.to_vec()]);
    let mut queue = VecDeque::from([word.to_vec()]);
    while let Some(w) = queue.pop_front() {
        for i in 1..w.len() {
            if pair.independent(w[i - 1], w[i]) {
                let mut swapped = w.clone();
                swapped.swap(i - 1, i);
                if seen.insert(swapped.clone()) {
                    queue.push_back(swapped);
                }
            }
        }
    }
    seen
}

/// `{y : |y| = k, y ≤ x}` from the definition: normalized length-`k`
/// prefixes of the words congruent to a representative of `x`.
pub fn divisor_set(pair: &IndependencePair, x: &Trace, k: usize) -> Result<BTreeSet<Trace>> {
    if k > x.len() {
        return Ok(BTreeSet::new());
    }
    let word = x.word();
    congruence_closure(&word, pair, word.len())
        .iter()
        .map(|w| pair.normalize(&w[..k]))
        .collect()
}

/// Mean of `phi` over `M_k`.
pub fn exact_uniform_expectation(pair: &IndependencePair, k: usize, phi: &CostFunction) -> Result<f64> {
    let set = enumerate_mk(pair, k)?;
    Ok(uniform_mean(pair, &set, phi))
}

pub fn uniform_mean(pair: &IndependencePair, set: &TraceSet, phi: &CostFunction) -> f64 {
    set.iter().map(|y| phi.eval(pair, y)).sum::<f64>() / set.len() as f64
}
