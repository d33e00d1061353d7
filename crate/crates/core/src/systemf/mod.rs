//! The System F kernel: typing, type erasure, βη-normalisation and the
//! equivalence relation used to compare elaborations.

mod normalize;
mod typeck;
mod untyped;

pub use normalize::{equiv, normalize, FuelExhausted, DEFAULT_FUEL};
pub use typeck::{check_sysf_file, inline_defs, tc_target, TcError};
pub use untyped::{erase, Untyped};

#[cfg(test)]
mod tests;
