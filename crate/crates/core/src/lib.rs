//! S-machines as rewriting systems on free-group words, the translation of
//! Turing machines into group presentations, and derivation / van Kampen
//! diagram tooling for the loop family built from the S4 rules.

pub mod area;
pub mod derivation;
pub mod diagram;
pub mod encode;
pub mod lemma3;
pub mod presentation;
pub mod smachine;
pub mod subdisc;
pub mod tm;
pub mod word;

pub use word::{Alphabet, Kind, Letter, Symbol, Word, WordError};
