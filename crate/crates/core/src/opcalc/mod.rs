//! Exact symbolic calculus for expressions in `e` and `e+`.
//!
//! Expressions are parsed ([`parse`]), evaluated exactly on the basis kets
//! ([`word_action`]) and reduced to the creators-left normal basis
//! `(e+)^a e^b`, `0 <= a, b <= n-1` ([`normal_order`]). Equality of normal
//! forms is exact rational equality, so identities of the algebra are checked
//! without tolerances. [`matrix_eval`] and [`normal_form_to_matrix`] bridge
//! back to the floating point representation for cross-checks.

mod action;
mod expr;
mod normal;
mod parse;

use thiserror::Error;

pub use action::{word_action, WordAction};
pub use expr::{matrix_eval, Generator, OpExpr};
pub use normal::{
    deformation_coefficient, normal_form_to_matrix, normal_order, verify_identity,
    verify_identity_str, NormalForm, NormalTerm,
};
pub use parse::{parse, ParseError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpcalcError {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error(
        "order {n} is outside the exact normal-ordering range (n <= {max})",
        max = crate::algebra::MAX_EXACT_FACTORIAL_ORDER
    )]
    OrderTooLarge { n: usize },
}
