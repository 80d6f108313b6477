//! Symbolic abstract-index tensor algebra.
//!
//! Expressions are sums of terms, each a rational-function coefficient times a
//! product of tensor factors carrying abstract indices. Everything else in the
//! crate (canonicalization, contraction enumeration, Young projection, equation
//! solving, metric variations) operates on that one representation.

pub mod algebra;
pub mod coeff;
pub mod comb;
pub mod error;
pub mod expr;
pub mod geom;
pub mod symm;
pub mod young;

pub use coeff::{Coeff, Poly};
pub use error::{Error, Result};
pub use expr::{Expr, Factor, Index, Label, Session, Term};
