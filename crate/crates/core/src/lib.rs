//! Tools for low-complexity infinite words.

pub mod arith;
pub mod builtin;
pub mod campaign;
pub mod codings;
pub mod error;
pub mod factors;
pub mod flow;
pub mod graphs;
pub mod par;
pub mod sturmian;
pub mod word;

pub use error::{Error, Result};
pub use par::Exec;
pub use word::{Alphabet, FiniteWord, Letter, LetterSource, WordStream};
