//! Exact counting of traces by length and the numerics built on the
//! Möbius polynomial: principal root, mean size under `ν_p`, and the
//! Boltzmann parameter matching a target size.

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::monoid::CliqueFamily;

pub const DEFAULT_ROOT_TOL: f64 = 1e-14;
pub const DEFAULT_PARAMETER_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITERATIONS: usize = 200;

/// Steps of the initial sign-change scan over `(0, 1]`.
const SCAN_STEPS: usize = 1024;
/// Points of the monotonicity check of the mean size on `(0, p0)`.
const MONOTONE_GRID: usize = 256;

/// `μ(X) = Σ_c (-1)^{|c|} X^{|c|}` with exact integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MobiusPolynomial {
    coefficients: Vec<i64>,
}

impl MobiusPolynomial {
    pub fn from_coefficients(coefficients: Vec<i64>) -> Self {
        let mut coefficients = coefficients;
        while coefficients.len() > 1 && coefficients.last() == Some(&0) {
            coefficients.pop();
        }
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[i64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, &c| acc * x + c as f64)
    }

    pub fn derivative_at(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .rev()
            .fold(0.0, |acc, (j, &c)| acc * x + (j as i64 * c) as f64)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![0i64; self.coefficients.len() + other.coefficients.len() - 1];
        for (i, &a) in self.coefficients.iter().enumerate() {
            for (j, &b) in other.coefficients.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coefficients(out)
    }

    pub fn principal_root(&self) -> Result<f64> {
        principal_root(self, DEFAULT_ROOT_TOL)
    }

    /// `-p μ'(p) / μ(p)` without the domain check.
    fn mean_size(&self, p: f64) -> f64 {
        -p * self.derivative_at(p) / self.eval(p)
    }
}

impl std::fmt::Display for MobiusPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.coefficients.iter().map(i64::to_string).collect();
        f.write_str(&parts.join(" "))
    }
}

pub fn mobius_polynomial(family: &CliqueFamily) -> MobiusPolynomial {
    let mut coefficients = vec![0i64; family.max_clique_size() + 1];
    for c in family.cliques() {
        coefficients[c.len()] += if c.len() % 2 == 0 { 1 } else { -1 };
    }
    MobiusPolynomial::from_coefficients(coefficients)
}

/// `λ(0..=n)`: number of traces of each length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrowthTable {
    lambda: Vec<BigInt>,
}

impl GrowthTable {
    pub fn values(&self) -> &[BigInt] {
        &self.lambda
    }

    pub fn get(&self, n: usize) -> &BigInt {
        &self.lambda[n]
    }

    pub fn max_len(&self) -> usize {
        self.lambda.len() - 1
    }

    /// `λ(n)` as a float; infinite once it leaves the `f64` range.
    pub fn approx(&self, n: usize) -> f64 {
        self.lambda[n].to_f64().unwrap_or(f64::INFINITY)
    }
}

/// Inverts the series `1/μ(X)`: `λ(n) = -Σ_{j≥1} μ_j λ(n-j)`.
pub fn growth_coefficients(mu: &MobiusPolynomial, n: usize) -> GrowthTable {
    let mut lambda: Vec<BigInt> = Vec::with_capacity(n + 1);
    lambda.push(BigInt::one());
    for m in 1..=n {
        let mut acc = BigInt::zero();
        for (j, &c) in mu.coefficients.iter().enumerate().skip(1).take(m) {
            acc -= &lambda[m - j] * c;
        }
        lambda.push(acc);
    }
    GrowthTable { lambda }
}

/// Smallest positive root of `μ`, located by a sign-change scan from 0,
/// bisection to width `tol`, then one guarded Newton step.
///
/// The search runs on the square-free part of `μ`, so roots of even
/// multiplicity (products of equal factors) still change sign.
pub fn principal_root(mu: &MobiusPolynomial, tol: f64) -> Result<f64> {
    if mu.coefficients == [1, -1] {
        return Ok(1.0);
    }
    let f = square_free_part(&mu.coefficients);
    let eval = |x: f64| f.iter().rev().fold(0.0, |acc, &c| acc * x + c);
    let slope_at = |x: f64| {
        f.iter().enumerate().skip(1).rev().fold(0.0, |acc, (j, &c)| acc * x + j as f64 * c)
    };
    let step = 1.0 / SCAN_STEPS as f64;
    let mut bracket = None;
    let mut lo = 0.0;
    for i in 1..=SCAN_STEPS {
        let x = i as f64 * step;
        let fx = eval(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if fx < 0.0 {
            bracket = Some((lo, x));
            break;
        }
        lo = x;
    }
    let (mut lo, mut hi) = bracket.ok_or(Error::NoRootFound)?;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eval(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut root = 0.5 * (lo + hi);
    let slope = slope_at(root);
    if slope < 0.0 {
        let polished = root - eval(root) / slope;
        if (lo..=hi).contains(&polished) && eval(polished).abs() <= eval(root).abs() {
            root = polished;
        }
    }
    Ok(root)
}

/// `μ / gcd(μ, μ')` normalized to constant term 1, computed exactly.
fn square_free_part(coefficients: &[i64]) -> Vec<f64> {
    let mu: Vec<BigInt> = coefficients.iter().map(|&c| BigInt::from(c)).collect();
    let derivative: Vec<BigInt> =
        mu.iter().enumerate().skip(1).map(|(j, c)| c * BigInt::from(j)).collect();
    let g = poly_gcd(mu.clone(), derivative);
    let q = if g.len() > 1 { poly_div_exact(&mu, &g) } else { mu };
    let c0 = q[0].to_f64().expect("finite constant term");
    q.iter().map(|c| c.to_f64().unwrap_or(f64::NAN) / c0).collect()
}

fn trim(mut a: Vec<BigInt>) -> Vec<BigInt> {
    while a.len() > 1 && a.last().is_some_and(Zero::is_zero) {
        a.pop();
    }
    a
}

fn primitive(a: Vec<BigInt>) -> Vec<BigInt> {
    use num_integer::Integer;
    let content = a.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
    if content.is_zero() || content.is_one() {
        return a;
    }
    a.into_iter().map(|c| c / &content).collect()
}

/// Pseudo-remainder of `a` by `b` (both trimmed, `b` non-zero).
fn pseudo_remainder(mut a: Vec<BigInt>, b: &[BigInt]) -> Vec<BigInt> {
    let lead = b.last().expect("non-empty divisor").clone();
    while a.len() >= b.len() && !(a.len() == 1 && a[0].is_zero()) {
        let shift = a.len() - b.len();
        let top = a.last().expect("non-empty").clone();
        for c in a.iter_mut() {
            *c *= &lead;
        }
        for (i, c) in b.iter().enumerate() {
            a[shift + i] -= &top * c;
        }
        a.pop();
        a = trim(a);
        if a.is_empty() {
            a.push(BigInt::zero());
        }
    }
    a
}

fn poly_gcd(a: Vec<BigInt>, b: Vec<BigInt>) -> Vec<BigInt> {
    let (mut a, mut b) = (primitive(trim(a)), primitive(trim(b)));
    while !(b.len() == 1 && b[0].is_zero()) && !b.is_empty() {
        let r = primitive(pseudo_remainder(a, &b));
        a = b;
        b = r;
    }
    a
}

/// `a / b` when `b` divides `a` over the rationals and the quotient is
/// integral (Gauss's lemma, `b` primitive).
fn poly_div_exact(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut rem = a.to_vec();
    let lead = b.last().expect("non-empty divisor");
    let mut q = vec![BigInt::zero(); a.len() - b.len() + 1];
    for shift in (0..q.len()).rev() {
        let top = &rem[shift + b.len() - 1];
        let factor = top / lead;
        for (i, c) in b.iter().enumerate() {
            rem[shift + i] -= &factor * c;
        }
        q[shift] = factor;
    }
    trim(q)
}

/// Mean size `E_{ν_p}|ξ| = -p μ'(p)/μ(p)` for `0 < p < p0`.
pub fn expected_size(mu: &MobiusPolynomial, p: f64) -> Result<f64> {
    let p0 = mu.principal_root()?;
    if !(p > 0.0 && p < p0) {
        return Err(Error::ParameterOutOfRange { value: p, domain: format!("(0, {p0})") });
    }
    Ok(mu.mean_size(p))
}

/// Whether the mean size increases along a uniform grid of `(0, p0)`.
pub fn expected_size_is_monotone(mu: &MobiusPolynomial, p0: f64) -> bool {
    let grid: Vec<f64> = (1..=MONOTONE_GRID)
        .map(|i| mu.mean_size(p0 * i as f64 / (MONOTONE_GRID + 1) as f64))
        .collect();
    grid.windows(2).all(|w| w[1] > w[0])
}

/// Solves `k μ(p) + p μ'(p) = 0` on `(0, p0)`: the parameter whose mean
/// size is `k`, to relative accuracy `tol`.
pub fn optimal_boltzmann_parameter(mu: &MobiusPolynomial, k: usize, tol: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::ParameterOutOfRange { value: 0.0, domain: "k >= 1".into() });
    }
    let p0 = mu.principal_root()?;
    let target = k as f64;
    let (mut lo, mut hi) = (0.0, p0);
    if !expected_size_is_monotone(mu, p0) {
        log::warn!("mean size is not monotone on (0, p0); bracketing on a grid");
        let n = MONOTONE_GRID + 1;
        let point = |i: usize| p0 * i as f64 / n as f64;
        if let Some(i) = (1..n).find(|&i| mu.mean_size(point(i)) >= target) {
            lo = point(i - 1);
            hi = point(i);
        } else {
            lo = point(n - 1);
        }
    }
    for _ in 0..DEFAULT_MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        let residual = mu.mean_size(mid) - target;
        if residual.abs() <= tol * target {
            return Ok(mid);
        }
        if residual < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::ConvergenceFailure { iterations: DEFAULT_MAX_ITERATIONS })
}
