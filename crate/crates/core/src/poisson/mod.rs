//! Two-variable Laurent series with the torus Poisson bracket
//! `{ξ, η} = ξη`, the pro-nilpotent Lie algebra of series in two inverse
//! monomials, and the group of formal symplectomorphisms it exponentiates
//! to. Also hosts the residue and `p_Ω` projections.

mod graded;
mod grading;
mod residue;
mod series;
mod symp;

pub use graded::GradedSeries;
pub use grading::{Basis, Filtration, Weights};
pub use residue::{p_omega, residue, EvalPoint};
pub use series::{dilog_coefficients, Hamiltonian, TruncSeries2};
pub use symp::SympAuto;

use thiserror::Error;

use crate::lattice::{Covector, Exponent2};
use crate::scalars::ScalarError;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PoissonError {
    #[error("basis {0}, {1} is not positively oriented")]
    DegenerateBasis(Covector, Covector),
    #[error("operands use different bases or cutoffs")]
    BasisMismatch,
    #[error("exponent {0} is outside the cone of the basis")]
    NotInCone(Exponent2),
    #[error("automorphism is not unipotent: {0}")]
    NotUnipotent(String),
    #[error("ξ- and η-readings of the defect disagree at u^{0} v^{1}")]
    InconsistentDefect(usize, usize),
    #[error("automorphism has a non-trivial defect below degree {0}")]
    BelowFiltration(usize),
    #[error("not a unit of valuation zero: {0}")]
    NotAUnit(String),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}
