use super::{is_at_root, TransitionMatrix};
use crate::error::{Error, Result};
use crate::monoid::{CliqueFamily, ComponentDecomposition};

const POWER_MAX_ITERATIONS: usize = 10_000;
const POWER_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy)]
pub struct PowerIteration {
    pub eigenvalue: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Weighted incidence matrix `B` of the automaton on non-empty cliques
/// (`B[x][y] = p0^{|y|}` when `x -> y`) and its stochastic normalization
/// `C[x][y] = B[x][y] g(y) / g(x)`.
///
/// Matrices are indexed by `family index - 1`.
#[derive(Debug, Clone)]
pub struct ParryPair {
    size: usize,
    b: Vec<f64>,
    c: Vec<f64>,
    g: Vec<f64>,
}

/// Builds `B` and `C` for an irreducible monoid at its principal root.
pub fn parry_matrices(
    family: &CliqueFamily,
    decomposition: &ComponentDecomposition,
    p0: f64,
    g: &[f64],
) -> Result<ParryPair> {
    if !decomposition.is_irreducible() {
        return Err(Error::ReducibleMonoid { components: decomposition.len() });
    }
    let root = crate::combinatorics::mobius_polynomial(family).principal_root()?;
    if !is_at_root(p0, root) {
        return Err(Error::NotAtP0 { p: p0, p0: root });
    }
    let m = family.len() - 1;
    let g: Vec<f64> = g[1..].to_vec();
    let mut b = vec![0.0; m * m];
    let mut c = vec![0.0; m * m];
    for x in 0..m {
        for &y in family.successors(x + 1) {
            if y == 0 {
                continue;
            }
            let y = y - 1;
            let w = p0.powi(family.get(y + 1).len() as i32);
            b[x * m + y] = w;
            c[x * m + y] = w * g[y] / g[x];
        }
    }
    Ok(ParryPair { size: m, b, c, g })
}

impl ParryPair {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn b(&self, x: usize, y: usize) -> f64 {
        self.b[x * self.size + y]
    }

    pub fn c(&self, x: usize, y: usize) -> f64 {
        self.c[x * self.size + y]
    }

    fn apply_b(&self, v: &[f64]) -> Vec<f64> {
        self.b
            .chunks_exact(self.size)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Dominant eigenvalue of `B` by power iteration from the uniform
    /// vector, stopping when successive Rayleigh quotients agree.
    pub fn spectral_radius(&self) -> PowerIteration {
        let n = self.size;
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        let mut previous = f64::NAN;
        for it in 1..=POWER_MAX_ITERATIONS {
            let w = self.apply_b(&v);
            let quotient = v.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>()
                / v.iter().map(|a| a * a).sum::<f64>();
            let norm = w.iter().map(|a| a * a).sum::<f64>().sqrt();
            v = w.into_iter().map(|a| a / norm).collect();
            if (quotient - previous).abs() < POWER_TOL {
                return PowerIteration { eigenvalue: quotient, iterations: it, converged: true };
            }
            previous = quotient;
        }
        PowerIteration { eigenvalue: previous, iterations: POWER_MAX_ITERATIONS, converged: false }
    }

    /// `‖B g - g‖_∞`.
    pub fn invariance_residual(&self) -> f64 {
        self.apply_b(&self.g)
            .iter()
            .zip(&self.g)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn max_row_sum_deviation(&self) -> f64 {
        self.c
            .chunks_exact(self.size)
            .map(|r| (r.iter().sum::<f64>() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Largest `|C[x][y] - P[x][y]|` over non-empty cliques.
    pub fn max_deviation_from(&self, p: &TransitionMatrix) -> f64 {
        let mut worst = 0.0f64;
        for x in 0..self.size {
            for y in 0..self.size {
                worst = worst.max((self.c(x, y) - p.get(x + 1, y + 1)).abs());
            }
        }
        worst
    }
}
