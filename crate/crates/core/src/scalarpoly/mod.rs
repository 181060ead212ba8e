//! Scalars, univariate polynomials, roots, Laurent expansions and residues.

pub mod laurent;
pub mod point;
pub mod poly;
pub mod roots;
pub mod scalar;

pub use laurent::{laurent, laurent_at, residue_equals, LaurentExpansion};
pub use point::{AlgebraicPoint, Point};
pub use poly::{binomial, falling_factorial, CPoly, Poly, QPoly};
pub use roots::{roots, roots_float, DiscLocation, Root};
pub use scalar::{parse_rational, rational_string, Field, GaussRat};
