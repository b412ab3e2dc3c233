//! The Markov chain of cliques realizing the sub-uniform measure `ν_p`.
//!
//! For `0 < p ≤ p0` the first clique `C_1` has law `h` and the chain moves
//! with `P[c][c'] = h(c') / g(c)` along admissible pairs, where
//!
//! * `h(c) = Σ_{c' ⊇ c} (-1)^{|c'|-|c|} p^{|c'|}`, the Möbius transform of
//!   `c ↦ p^{|c|}` over the superset order;
//! * `g(c) = h(c) / p^{|c|}`.
//!
//! Below the principal root the empty clique is reached with probability
//! one and absorbs the chain, so the cliques visited before it spell a
//! finite trace. At `p0` the empty clique has mass zero, its row is left
//! undefined, and the chain produces infinite traces.

mod parry;

pub use parry::{parry_matrices, ParryPair, PowerIteration};

use crate::combinatorics::mobius_polynomial;
use crate::error::{Error, Result};
use crate::monoid::{Clique, CliqueFamily};

/// Relative distance under which `p` is taken to be the principal root.
pub const AT_P0_TOL: f64 = 1e-12;
/// Rows with `g(c)` at or below this are treated as degenerate.
pub const G_FLOOR: f64 = 1e-12;

fn is_at_root(p: f64, p0: f64) -> bool {
    (p - p0).abs() <= AT_P0_TOL * p0
}

fn check_parameter(family: &CliqueFamily, p: f64) -> Result<(f64, bool)> {
    let p0 = mobius_polynomial(family).principal_root()?;
    let at_p0 = is_at_root(p, p0);
    if !(p > 0.0 && (p < p0 || at_p0)) {
        return Err(Error::ParameterOutOfRange { value: p, domain: format!("(0, {p0}]") });
    }
    Ok((p0, at_p0))
}

/// `h` over all cliques, in family order. At the principal root `h(∅)` is
/// set to exactly zero.
pub fn h_vector(family: &CliqueFamily, p: f64) -> Result<Vec<f64>> {
    let (_, at_p0) = check_parameter(family, p)?;
    Ok(h_unchecked(family, p, at_p0))
}

fn h_unchecked(family: &CliqueFamily, p: f64, at_p0: bool) -> Vec<f64> {
    let mut h: Vec<f64> = family
        .cliques()
        .iter()
        .map(|&c| p.powi(c.len() as i32) * family.alternating_clique_sum(family.common_neighbors(c), p))
        .collect();
    if at_p0 {
        h[0] = 0.0;
    }
    h
}

/// `g(c) = h(c) / p^{|c|}`.
pub fn g_vector(family: &CliqueFamily, p: f64, h: &[f64]) -> Vec<f64> {
    family
        .cliques()
        .iter()
        .zip(h)
        .map(|(c, &hc)| hc / p.powi(c.len() as i32))
        .collect()
}

/// Dense transition matrix over clique indices. The row of the empty
/// clique is undefined at the principal root.
#[derive(Debug, Clone)]
pub struct TransitionMatrix {
    size: usize,
    entries: Vec<f64>,
    defined: Vec<bool>,
}

impl TransitionMatrix {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.entries[from * self.size + to]
    }

    pub fn row(&self, from: usize) -> Option<&[f64]> {
        self.defined[from].then(|| &self.entries[from * self.size..(from + 1) * self.size])
    }

    pub fn is_defined(&self, from: usize) -> bool {
        self.defined[from]
    }

    /// Largest `|Σ_j P[i][j] - 1|` over defined rows.
    pub fn max_row_sum_deviation(&self) -> f64 {
        (0..self.size)
            .filter_map(|i| self.row(i))
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }
}

pub fn transition_matrix(
    family: &CliqueFamily,
    h: &[f64],
    g: &[f64],
    at_p0: bool,
) -> Result<TransitionMatrix> {
    let n = family.len();
    let mut entries = vec![0.0; n * n];
    let mut defined = vec![false; n];
    for i in 0..n {
        if i == 0 && at_p0 {
            continue;
        }
        if g[i] <= G_FLOOR {
            return Err(Error::DegenerateState { index: i, value: g[i] });
        }
        for &j in family.successors(i) {
            entries[i * n + j] = h[j] / g[i];
        }
        defined[i] = true;
    }
    Ok(TransitionMatrix { size: n, entries, defined })
}

/// Probability of the cylinder `{C_1 = c_1, ..., C_k = c_k}` computed in
/// closed form as `p^{|c_1 ... c_{k-1}|} h(c_k)` (zero unless the path is
/// admissible). Independent of the transition matrix.
pub fn cylinder_probability(family: &CliqueFamily, p: f64, h: &[f64], path: &[usize]) -> f64 {
    let Some((&last, prefix)) = path.split_last() else {
        return 1.0;
    };
    if path.windows(2).any(|w| !family.admissible(w[0], w[1])) {
        return 0.0;
    }
    let size: usize = prefix.iter().map(|&i| family.get(i).len()).sum();
    p.powi(size as i32) * h[last]
}

/// Parameters, initial law and transitions of the clique chain.
#[derive(Debug, Clone)]
pub struct CliqueChain {
    p: f64,
    p0: f64,
    at_p0: bool,
    cliques: Vec<Clique>,
    h: Vec<f64>,
    g: Vec<f64>,
    transition: TransitionMatrix,
}

impl CliqueChain {
    pub fn new(family: &CliqueFamily, p: f64) -> Result<Self> {
        let (p0, at_p0) = check_parameter(family, p)?;
        let h = h_unchecked(family, p, at_p0);
        let g = g_vector(family, p, &h);
        let transition = transition_matrix(family, &h, &g, at_p0)?;
        Ok(Self { p, p0, at_p0, cliques: family.cliques().to_vec(), h, g, transition })
    }

    /// The chain at the principal root, generating the uniform measure.
    pub fn uniform(family: &CliqueFamily) -> Result<Self> {
        let p0 = mobius_polynomial(family).principal_root()?;
        Self::new(family, p0)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn at_p0(&self) -> bool {
        self.at_p0
    }

    pub fn cliques(&self) -> &[Clique] {
        &self.cliques
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn g(&self) -> &[f64] {
        &self.g
    }

    pub fn transition(&self) -> &TransitionMatrix {
        &self.transition
    }

    /// `h(c_1) Π P[c_i][c_{i+1}]`.
    pub fn path_probability(&self, path: &[usize]) -> f64 {
        let Some(&first) = path.first() else {
            return 1.0;
        };
        path.windows(2)
            .try_fold(self.h[first], |acc, w| {
                self.transition.row(w[0]).map(|r| acc * r[w[1]])
            })
            .unwrap_or(0.0)
    }
}
