use crate::combinatorics::{growth_coefficients, mobius_polynomial, GrowthTable, MobiusPolynomial};
use crate::error::Result;
use crate::monoid::{CliqueFamily, ComponentDecomposition, IndependencePair, DEFAULT_CLIQUE_CAP};

/// One irreducible component with its own clique family and root.
#[derive(Debug, Clone)]
pub struct Component {
    pub pair: IndependencePair,
    pub family: CliqueFamily,
    pub mobius: MobiusPolynomial,
    pub p0: f64,
}

impl Component {
    fn new(pair: IndependencePair, cap: usize) -> Result<Self> {
        let family = CliqueFamily::with_cap(&pair, cap)?;
        let mobius = mobius_polynomial(&family);
        let p0 = mobius.principal_root()?;
        Ok(Self { pair, family, mobius, p0 })
    }
}

/// A trace monoid with everything derived from its presentation: cliques,
/// Möbius polynomial, principal root and irreducible components.
#[derive(Debug, Clone)]
pub struct TraceMonoid {
    pub pair: IndependencePair,
    pub family: CliqueFamily,
    pub mobius: MobiusPolynomial,
    pub p0: f64,
    pub decomposition: ComponentDecomposition,
    pub components: Vec<Component>,
}

impl TraceMonoid {
    pub fn new(pair: IndependencePair) -> Result<Self> {
        Self::with_cap(pair, DEFAULT_CLIQUE_CAP)
    }

    pub fn with_cap(pair: IndependencePair, cap: usize) -> Result<Self> {
        let family = CliqueFamily::with_cap(&pair, cap)?;
        let mobius = mobius_polynomial(&family);
        let p0 = mobius.principal_root()?;
        let decomposition = ComponentDecomposition::new(&pair);
        let components = decomposition
            .components()
            .iter()
            .map(|c| Component::new(c.clone(), cap))
            .collect::<Result<_>>()?;
        Ok(Self { pair, family, mobius, p0, decomposition, components })
    }

    pub fn is_irreducible(&self) -> bool {
        self.decomposition.is_irreducible()
    }

    pub fn growth(&self, n: usize) -> GrowthTable {
        growth_coefficients(&self.mobius, n)
    }
}
