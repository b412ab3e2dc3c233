//! Independence pairs, cliques, traces in Cartier-Foata normal form and
//! the decomposition of a monoid into irreducible components.

mod alphabet;
mod cliques;
mod decomposition;
pub mod format;
mod trace;

pub use alphabet::{Clique, IndependencePair, Letter, MAX_LETTERS};
pub use cliques::{CliqueFamily, DEFAULT_CLIQUE_CAP};
pub use decomposition::ComponentDecomposition;
pub use trace::{topping, Trace};
