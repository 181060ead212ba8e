//! Toeplitz operators with polyanalytic polynomial symbols on the Bergman
//! space of the unit disc.
//!
//! A symbol `φ = Σ a_i(z) z̄^i` is turned into a holomorphic differential
//! operator `D_φ` with `Λ ∘ T_φ = D_φ`, where `Λ = Π_{i=2}^{n+1}(zD + i)` is
//! injective on holomorphic functions. Kernel questions about `T_φ` become
//! questions about holomorphic solutions of `D_φ y = 0`, whose singular points
//! are the zeros of `φ̃ = Σ a_i z^{n-i}`. The [`criteria`] engine combines the
//! Fredholm index with indicial data at those zeros; the [`oracle`] module
//! gives independent finite-section evidence.

pub mod criteria;
pub mod error;
pub mod frobenius;
pub mod gen;
pub mod oracle;
pub mod scalarpoly;
pub mod selftest;
pub mod symbol;
pub mod weyl;

pub use error::{Error, Result};
pub use scalarpoly::{Field, GaussRat, Poly, QPoly};
pub use symbol::PolyanalyticSymbol;
pub use weyl::DiffOp;
