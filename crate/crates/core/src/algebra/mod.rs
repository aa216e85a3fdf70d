//! Finite fields `GF(p^l)` and polynomials over them.

mod field;
mod poly;

pub use field::{default_modulus, field_inv, FieldElem, FieldSpec};
pub use poly::{
    inf_norm_polyvec, monic_divisor_count, monic_of_degree, poly_abs, poly_gcd, DivisorCounter,
    Poly, PolyVec,
};
