//! Decision procedures for distinction of mod-ℓ representations of `GL₂`,
//! `SL₂` and `PGL₂` over a quadratic extension `E/F` of p-adic fields.

pub mod characters;
pub mod cli;
pub mod error;
pub mod gl2;
pub mod localfield;
pub mod prasad;
pub mod scalars;
pub mod sl2;
pub mod weildeligne;
pub mod weilrep;

pub use error::{Error, Result};
