use std::collections::HashMap;

use super::alphabet::{BitIter, Clique, IndependencePair};
use crate::error::{Error, Result};

/// Default bound on the number of cliques materialized.
pub const DEFAULT_CLIQUE_CAP: usize = 1 << 20;

/// All cliques of an independence pair, including the empty one, with the
/// Cartier-Foata automaton precomputed over them.
///
/// Cliques are indexed by (size, mask); index 0 is always the empty clique.
#[derive(Debug, Clone)]
pub struct CliqueFamily {
    cliques: Vec<Clique>,
    by_mask: HashMap<u64, usize>,
    successors: Vec<Vec<usize>>,
    full: u64,
    independent: Vec<u64>,
}

impl CliqueFamily {
    pub fn new(pair: &IndependencePair) -> Result<Self> {
        Self::with_cap(pair, DEFAULT_CLIQUE_CAP)
    }

    pub fn with_cap(pair: &IndependencePair, cap: usize) -> Result<Self> {
        let mut cliques = vec![Clique::EMPTY];
        extend(pair, Clique::EMPTY, pair.full_mask(), &mut cliques, cap)?;
        cliques.sort_by_key(|c| (c.len(), c.mask()));

        let by_mask = cliques.iter().enumerate().map(|(i, c)| (c.mask(), i)).collect();
        let successors = cliques
            .iter()
            .map(|&c| {
                (0..cliques.len())
                    .filter(|&j| pair.cf_admissible(c, cliques[j]))
                    .collect()
            })
            .collect();
        let independent = (0..pair.len()).map(|a| pair.independent_mask(a)).collect();
        Ok(Self { cliques, by_mask, successors, full: pair.full_mask(), independent })
    }

    pub fn len(&self) -> usize {
        self.cliques.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cliques(&self) -> &[Clique] {
        &self.cliques
    }

    pub fn get(&self, index: usize) -> Clique {
        self.cliques[index]
    }

    pub fn index_of(&self, c: Clique) -> Option<usize> {
        self.by_mask.get(&c.mask()).copied()
    }

    /// Indices `j` with `cliques[i] -> cliques[j]`, in increasing order.
    pub fn successors(&self, i: usize) -> &[usize] {
        &self.successors[i]
    }

    pub fn admissible(&self, i: usize, j: usize) -> bool {
        self.successors[i].binary_search(&j).is_ok()
    }

    pub fn max_clique_size(&self) -> usize {
        self.cliques.last().map_or(0, |c| c.len())
    }

    /// Indices of the non-empty cliques.
    pub fn non_empty(&self) -> std::ops::Range<usize> {
        1..self.cliques.len()
    }

    /// Letters independent of every member of `c` (all letters when `c`
    /// is empty).
    pub fn common_neighbors(&self, c: Clique) -> u64 {
        c.letters().fold(self.full, |acc, a| acc & self.independent[a])
    }

    /// A clique is maximal when no letter can be added to it.
    pub fn is_maximal(&self, c: Clique) -> bool {
        self.common_neighbors(c) == 0
    }

    /// `Σ (-p)^{|s|}` over the cliques `s` made of letters in `candidates`.
    pub fn alternating_clique_sum(&self, candidates: u64, p: f64) -> f64 {
        if candidates == 0 {
            return 1.0;
        }
        let a = candidates.trailing_zeros() as usize;
        let rest = candidates & !(1 << a);
        self.alternating_clique_sum(rest, p)
            - p * self.alternating_clique_sum(rest & self.independent[a], p)
    }
}

/// Adds every clique `c ∪ S` with `S` a non-empty clique of letters in
/// `candidates` whose letters all exceed those of `c`.
fn extend(
    pair: &IndependencePair,
    c: Clique,
    candidates: u64,
    out: &mut Vec<Clique>,
    cap: usize,
) -> Result<()> {
    for a in BitIter(candidates) {
        let next = c.with(a);
        if out.len() >= cap {
            return Err(Error::CliqueExplosion { cap });
        }
        out.push(next);
        let higher = candidates & pair.independent_mask(a) & !((2u64 << a).wrapping_sub(1));
        extend(pair, next, higher, out, cap)?;
    }
    Ok(())
}
