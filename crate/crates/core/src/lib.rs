//! Circular-shift linear network coding over odd block lengths.

pub mod error;
pub mod field;
pub mod format;
pub mod linalg;
pub mod netmodel;
pub mod networks;
pub mod poly;
pub mod scalarcode;

#[cfg(test)]
mod fixtures;
pub mod builder;
pub mod circcode;
pub mod simulate;
pub mod cli;
