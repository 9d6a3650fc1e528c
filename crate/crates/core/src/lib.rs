//! Exact wall-crossing computations in two dimensions.
//!
//! The core is generic over a [`scalars::Coefficient`] type; the aliases
//! below fix it to exact rationals, which is what the command-line tool
//! and the property suites use.

pub mod affine;
pub mod checks;
pub mod factorize;
pub mod lattice;
pub mod poisson;
pub mod scalars;
pub mod scatter;
pub mod tropical;

pub use scalars::{Rational, ValuedScalar};

pub type RationalSeries = poisson::GradedSeries<Rational>;
pub type RationalAuto = poisson::SympAuto<Rational>;
pub type RationalWall = factorize::WallFunction<Rational>;
pub type RationalFactorization = factorize::SlopeFactorization<Rational>;
pub type RationalDiagram = scatter::Diagram<Rational>;
pub type RationalLaurent = tropical::LaurentPoly<Rational>;
pub type ValuedLaurent = tropical::LaurentPoly<ValuedScalar>;
pub type ValuedAuto = poisson::SympAuto<ValuedScalar>;
