//! Exact combinatorics and random generation for trace monoids.
//!
//! Traces are kept in Cartier-Foata normal form (sequences of cliques).
//! The crate counts traces by length through the Möbius polynomial,
//! realizes the uniform and sub-uniform measures as Markov chains of
//! cliques, samples traces of a given length exactly uniformly by
//! rejection, and estimates uniform averages of cost functions from the
//! first layers of boundary samples.
//!
//! ```
//! use tracegen::{catalog, TraceMonoid};
//!
//! let monoid = TraceMonoid::new(catalog::abc()).unwrap();
//! assert_eq!(monoid.mobius.coefficients(), &[1, -3, 1]);
//! assert_eq!(monoid.growth(5).get(5).to_string(), "144");
//! ```

mod bundle;
pub mod catalog;
pub mod combinatorics;
mod error;
pub mod estimator;
pub mod measure;
pub mod monoid;
pub mod oracle;
pub mod sampler;

pub use bundle::{Component, TraceMonoid};
pub use error::{Error, ErrorKind, Result};
pub use monoid::{Clique, CliqueFamily, ComponentDecomposition, IndependencePair, Letter, Trace};
