use tracegen::catalog;
use tracegen::combinatorics::mobius_polynomial;
use tracegen::measure::{cylinder_probability, h_vector, parry_matrices, CliqueChain};
use tracegen::{CliqueFamily, ComponentDecomposition, Error, TraceMonoid};

fn chains(family: &CliqueFamily, len: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = family.non_empty().map(|i| vec![i]).collect();
    let mut frontier = out.clone();
    for _ in 1..len {
        let mut next = Vec::new();
        for path in &frontier {
            for &j in family.successors(*path.last().unwrap()) {
                let mut p = path.clone();
                p.push(j);
                next.push(p);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next.into_iter().filter(|p| *p.last().unwrap() != 0).collect();
    }
    out
}

#[test]
fn chain_algebra_on_parameter_grid() {
    for (name, pair) in catalog::irreducible_suite() {
        let family = CliqueFamily::new(&pair).unwrap();
        let p0 = mobius_polynomial(&family).principal_root().unwrap();
        for p in [p0 / 4.0, p0 / 2.0, 0.75 * p0, p0] {
            let chain = CliqueChain::new(&family, p).unwrap();
            assert!((chain.h().iter().sum::<f64>() - 1.0).abs() <= 1e-12, "{name} at {p}");
            assert!(chain.transition().max_row_sum_deviation() <= 1e-12, "{name} at {p}");
            assert!(family.non_empty().all(|i| chain.h()[i] > 0.0), "{name} at {p}");
            assert_eq!(chain.h()[0] == 0.0, p == p0, "{name} at {p}");
        }
    }
}

#[test]
fn chain_probabilities_match_cylinder_closed_form() {
    for (name, pair) in catalog::irreducible_suite() {
        let family = CliqueFamily::new(&pair).unwrap();
        let p0 = mobius_polynomial(&family).principal_root().unwrap();
        for p in [p0 / 2.0, p0] {
            let chain = CliqueChain::new(&family, p).unwrap();
            for path in chains(&family, 4) {
                let a = chain.path_probability(&path);
                let b = cylinder_probability(&family, p, chain.h(), &path);
                assert!((a - b).abs() <= 1e-12, "{name} {path:?}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn cylinders_of_fixed_depth_sum_to_one() {
    // Excluding paths that end in the empty clique before the last step,
    // the depth-k cylinders partition the space.
    let family = CliqueFamily::new(&catalog::pentagon()).unwrap();
    let p0 = mobius_polynomial(&family).principal_root().unwrap();
    let chain = CliqueChain::uniform(&family).unwrap();
    let total: f64 = chains(&family, 3)
        .iter()
        .filter(|p| p.len() == 3)
        .map(|p| cylinder_probability(&family, p0, chain.h(), p))
        .sum();
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn parry_matrices_agree_with_chain() {
    for (name, pair) in catalog::irreducible_suite() {
        let family = CliqueFamily::new(&pair).unwrap();
        let chain = CliqueChain::uniform(&family).unwrap();
        let parry =
            parry_matrices(&family, &ComponentDecomposition::new(&pair), chain.p0(), chain.g()).unwrap();
        let rho = parry.spectral_radius();
        assert!(rho.converged, "{name}");
        assert!((rho.eigenvalue - 1.0).abs() <= 1e-9, "{name}: {}", rho.eigenvalue);
        assert!(parry.invariance_residual() <= 1e-12, "{name}");
        assert!(parry.max_deviation_from(chain.transition()) <= 1e-12, "{name}");
    }
}

#[test]
fn parry_refuses_reducible_monoids() {
    for (_, pair) in catalog::reducible_suite() {
        let m = TraceMonoid::new(pair).unwrap();
        let g = vec![1.0; m.family.len()];
        assert!(matches!(
            parry_matrices(&m.family, &m.decomposition, m.p0, &g),
            Err(Error::ReducibleMonoid { .. })
        ));
    }
}

#[test]
fn product_first_layers_factorize() {
    // At the global root the product chain itself is degenerate, but the
    // cylinder probabilities are defined from h alone.
    let m = TraceMonoid::new(catalog::commuting_product(3, 2)).unwrap();
    assert!((m.p0 - 1.0 / 3.0).abs() < 1e-15);
    for p in [m.p0, 0.25] {
        let h = h_vector(&m.family, p).unwrap();
        let local_h: Vec<Vec<f64>> = m.components.iter().map(|c| h_vector(&c.family, p).unwrap()).collect();
        for path in chains(&m.family, 2) {
            let whole = cylinder_probability(&m.family, p, &h, &path);
            let mut product = 1.0;
            for (i, component) in m.components.iter().enumerate() {
                let local: Vec<usize> = path
                    .iter()
                    .map(|&j| {
                        let c = m.decomposition.restrict_clique(i, m.family.get(j));
                        component.family.index_of(c).unwrap()
                    })
                    .collect();
                product *= chain_cylinder(&component.family, p, &local_h[i], &local);
            }
            assert!((whole - product).abs() <= 1e-10, "{path:?}: {whole} vs {product}");
        }
    }
}

/// Cylinder probability allowing repeated empty cliques after absorption.
fn chain_cylinder(family: &CliqueFamily, p: f64, h: &[f64], path: &[usize]) -> f64 {
    let end = path.iter().position(|&i| i == 0).map_or(path.len(), |e| e + 1);
    cylinder_probability(family, p, h, &path[..end])
}
