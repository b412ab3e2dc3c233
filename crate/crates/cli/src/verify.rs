use std::io::Write;
use std::process::ExitCode;

use tracegen::measure::{cylinder_probability, h_vector, parry_matrices, CliqueChain};
use tracegen::{CliqueFamily, Error, TraceMonoid};

use crate::{real, Failure, Outcome};

const SUM_TOL: f64 = 1e-12;
const CYLINDER_TOL: f64 = 1e-12;
const SPECTRAL_TOL: f64 = 1e-9;
const PARRY_TOL: f64 = 1e-12;
const PRODUCT_TOL: f64 = 1e-10;

/// Collected check lines: `<name> <value> <tolerance> ok|FAIL`.
struct Report {
    lines: Vec<String>,
    failed: usize,
}

impl Report {
    fn check(&mut self, name: &str, value: f64, tol: f64) {
        let ok = value <= tol;
        self.push(name, real(value), real(tol), ok);
    }

    fn flag(&mut self, name: &str, ok: bool) {
        self.push(name, ok.to_string(), "true".into(), ok);
    }

    fn push(&mut self, name: &str, value: String, tol: String, ok: bool) {
        self.failed += usize::from(!ok);
        self.lines.push(format!("{name} {value} {tol} {}", if ok { "ok" } else { "FAIL" }));
    }
}

/// Non-empty admissible clique paths of length `1..=depth`; paths may end
/// in the empty clique but do not continue past it.
fn paths(family: &CliqueFamily, depth: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = family.non_empty().map(|i| vec![i]).collect();
    let mut frontier = all.clone();
    for _ in 1..depth {
        let mut next = Vec::new();
        for p in &frontier {
            for &j in family.successors(*p.last().expect("non-empty path")) {
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

/// Identities of the uniform chain of one irreducible monoid.
fn check_chain(report: &mut Report, prefix: &str, family: &CliqueFamily, pair: &tracegen::IndependencePair, depth: usize) -> Result<(), Error> {
    let chain = CliqueChain::uniform(family)?;
    let name = |s: &str| format!("{prefix}{s}");
    report.check(&name("h_sum_deviation"), (chain.h().iter().sum::<f64>() - 1.0).abs(), SUM_TOL);
    report.check(&name("row_sum_max_deviation"), chain.transition().max_row_sum_deviation(), SUM_TOL);
    report.flag(&name("h_positive"), family.non_empty().all(|i| chain.h()[i] > 0.0));
    let worst = paths(family, depth)
        .iter()
        .map(|p| (chain.path_probability(p) - cylinder_probability(family, chain.p(), chain.h(), p)).abs())
        .fold(0.0, f64::max);
    report.check(&name("cylinder_max_deviation"), worst, CYLINDER_TOL);
    let decomposition = tracegen::ComponentDecomposition::new(pair);
    let parry = parry_matrices(family, &decomposition, chain.p0(), chain.g())?;
    let rho = parry.spectral_radius();
    report.flag(&name("power_iteration_converged"), rho.converged);
    report.check(&name("spectral_radius_deviation"), (rho.eigenvalue - 1.0).abs(), SPECTRAL_TOL);
    report.check(&name("parry_invariance_residual"), parry.invariance_residual(), PARRY_TOL);
    report.check(&name("parry_max_abs_c_minus_p"), parry.max_deviation_from(chain.transition()), PARRY_TOL);
    Ok(())
}

/// Global two-layer cylinders against products of component cylinders.
fn product_deviation(m: &TraceMonoid) -> Result<f64, Error> {
    let p = m.p0;
    let h = h_vector(&m.family, p)?;
    let local_h: Vec<Vec<f64>> = m.components.iter().map(|c| h_vector(&c.family, p)).collect::<Result<_, _>>()?;
    let mut worst = 0.0f64;
    for path in paths(&m.family, 2) {
        let whole = cylinder_probability(&m.family, p, &h, &path);
        let mut product = 1.0;
        for (i, c) in m.components.iter().enumerate() {
            let mut local: Vec<usize> = path
                .iter()
                .map(|&j| c.family.index_of(m.decomposition.restrict_clique(i, m.family.get(j))).expect("clique of the component"))
                .collect();
            if let Some(end) = local.iter().position(|&j| j == 0) {
                local.truncate(end + 1);
            }
            product *= cylinder_probability(&c.family, p, &local_h[i], &local);
        }
        worst = worst.max((whole - product).abs());
    }
    Ok(worst)
}

pub fn run(m: &TraceMonoid, depth: usize, out: &mut impl Write) -> Outcome {
    let mut report = Report { lines: Vec::new(), failed: 0 };
    let h = h_vector(&m.family, m.p0)?;
    report.check("global_h_sum_deviation", (h.iter().sum::<f64>() - 1.0).abs(), SUM_TOL);
    if m.is_irreducible() {
        check_chain(&mut report, "", &m.family, &m.pair, depth)?;
    } else {
        let refused = matches!(
            parry_matrices(&m.family, &m.decomposition, m.p0, &vec![1.0; m.family.len()]),
            Err(Error::ReducibleMonoid { .. })
        );
        report.flag("parry_refused_on_reducible", refused);
        for (i, c) in m.components.iter().enumerate() {
            check_chain(&mut report, &format!("component_{i}."), &c.family, &c.pair, depth)?;
        }
    }
    report.check("product_factorization_max_deviation", product_deviation(m)?, PRODUCT_TOL);

    writeln!(out, "p0 {:.18}", m.p0)?;
    for line in &report.lines {
        writeln!(out, "{line}")?;
    }
    writeln!(out, "failed {}", report.failed)?;
    if report.failed > 0 {
        return Err(Failure { code: 1, message: format!("{} of {} checks failed", report.failed, report.lines.len()) });
    }
    Ok(ExitCode::SUCCESS)
}
