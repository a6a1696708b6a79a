//! Dense matrices over GF(2) and over the extension field.

mod binary;
mod field;

pub use binary::{circulant_of_poly, cyclic_perm_power, BinMatrix};
pub use field::{vandermonde, vandermonde_inverse, FieldMatrix};
