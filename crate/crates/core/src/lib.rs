//! Numerical laboratory for generalized Fock spaces `F_p^psi`.
//!
//! Build with `--no-default-features` to run every data-parallel loop
//! sequentially; results are identical either way.

pub mod entire;
pub mod exec;
pub mod numeric;
pub mod profile;
pub mod weight_expr;
pub mod weights;
pub mod norms;
pub mod operators;
pub mod quadrature;
pub mod criteria;
pub mod covering;
pub mod local_estimates;
pub mod verify;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] weight_expr::ExprError),
    #[error(transparent)]
    Weight(#[from] weights::WeightError),
    #[error(transparent)]
    Series(#[from] entire::SeriesError),
    #[error(transparent)]
    Norm(#[from] norms::NormError),
    #[error(transparent)]
    Criteria(#[from] criteria::CriteriaError),
    #[error(transparent)]
    Covering(#[from] covering::CoveringError),
    #[error(transparent)]
    Local(#[from] local_estimates::LocalError),
}
