//! Exact calculus of tropical and non-Archimedean line and vector bundles on
//! uniformized abelian varieties and their tropicalizations.

pub mod bundle;
pub mod cli;
pub mod error;
pub mod lattice;
pub mod monomial;
pub mod na;
pub mod ns;
pub mod random;
pub mod rational;
pub mod scenario;
pub mod trop_char;

pub use error::{Error, Result};
pub use lattice::{FiniteAbelianGroup, IntMatrix, RationalLattice, Sublattice};
pub use monomial::{MultiplicativePoint, ValuedMonomial};
pub use ns::{NaTorus, NsClass, TropTorus};
pub use rational::{Rational, RationalMatrix};
