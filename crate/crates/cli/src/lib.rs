//! Script interpreter and command-line front end for the `txs` tensor algebra system.

pub mod eval;
pub mod script;
pub mod value;
