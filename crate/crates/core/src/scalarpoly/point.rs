//! Points of the complex plane at which exact decisions are needed.
//!
//! A root of an exact polynomial is either a Gaussian rational (then all
//! arithmetic stays exact) or an algebraic number carried as a simple root of
//! a square-free exact factor together with a float approximation. For the
//! latter, "does the exact polynomial `p` vanish here?" is still decided
//! exactly: `p(w) = 0` iff `w` is a root of `gcd(p, factor)`, and the roots of
//! that gcd are a subset of the well-separated roots of `factor`, so matching
//! them against the approximation only needs half the separation.

use num_complex::Complex64;
use num_traits::One;

use super::poly::QPoly;
use super::roots::{simple_roots, DiscLocation, BOUNDARY_TOL};
use super::scalar::{Field, GaussRat};
use crate::error::Result;

/// Largest denominator tried when recognizing a float root as a Gaussian rational.
const RATIONAL_RECOVERY_DEN: i64 = 100_000;

#[derive(Clone, Debug)]
pub enum Point {
    Exact(GaussRat),
    Algebraic(AlgebraicPoint),
}

#[derive(Clone, Debug)]
pub struct AlgebraicPoint {
    /// Monic square-free exact polynomial having this point as a simple root.
    pub factor: QPoly,
    pub approx: Complex64,
    /// Distance to the nearest other root of `factor` (infinite if none).
    pub separation: f64,
}

impl Point {
    /// Every root of a square-free polynomial, recognized as exact when it is
    /// a Gaussian rational.
    pub fn roots_of_squarefree(factor: &QPoly) -> Result<Vec<Point>> {
        let factor = factor.monic();
        match factor.degree() {
            None | Some(0) => return Ok(Vec::new()),
            Some(1) => return Ok(vec![Point::Exact(-factor.coeff(0))]),
            _ => {}
        }
        let approx = simple_roots(&factor.to_complex())?;
        let points = approx
            .iter()
            .enumerate()
            .map(|(i, &z)| {
                if let Some(w) = GaussRat::approximate(z, RATIONAL_RECOVERY_DEN) {
                    if factor.eval(&w).is_zero() {
                        return Point::Exact(w);
                    }
                }
                let separation = approx
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, o)| (o - z).norm())
                    .fold(f64::INFINITY, f64::min);
                Point::Algebraic(AlgebraicPoint {
                    factor: factor.clone(),
                    approx: z,
                    separation,
                })
            })
            .collect();
        Ok(points)
    }

    pub fn approx(&self) -> Complex64 {
        match self {
            Point::Exact(w) => w.to_c64(),
            Point::Algebraic(a) => a.approx,
        }
    }

    pub fn exact(&self) -> Option<&GaussRat> {
        match self {
            Point::Exact(w) => Some(w),
            Point::Algebraic(_) => None,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Point::Exact(_))
    }

    pub fn disc_location(&self) -> DiscLocation {
        let r = self.approx().norm();
        if (r - 1.0).abs() < BOUNDARY_TOL {
            return DiscLocation::Boundary;
        }
        if let Point::Exact(w) = self {
            let n = w.norm_sqr();
            return if n < num_rational::BigRational::one() {
                DiscLocation::Inside
            } else if n.is_one() {
                DiscLocation::Boundary
            } else {
                DiscLocation::Outside
            };
        }
        if r < 1.0 {
            DiscLocation::Inside
        } else {
            DiscLocation::Outside
        }
    }

    /// Float value of `p` at this point.
    pub fn eval_approx(&self, p: &QPoly) -> Complex64 {
        match self {
            Point::Exact(w) => p.eval(w).to_c64(),
            Point::Algebraic(a) => p.to_complex().eval(&a.approx),
        }
    }

    /// Exact decision of `p(w) = 0`.
    pub fn vanishes(&self, p: &QPoly) -> bool {
        if p.is_zero() {
            return true;
        }
        match self {
            Point::Exact(w) => p.eval(w).is_zero(),
            Point::Algebraic(a) => {
                let g = p.gcd(&a.factor);
                match g.degree() {
                    Some(0) | None => false,
                    Some(d) if Some(d) == a.factor.degree() => true,
                    Some(_) => match simple_roots(&g.to_complex()) {
                        Ok(rs) => rs
                            .iter()
                            .any(|r| (r - a.approx).norm() < 0.5 * a.separation),
                        // The gcd's roots are roots of the factor; fall back to
                        // the nearest-root test on the factor's own residual.
                        Err(_) => {
                            g.to_complex().eval(&a.approx).norm()
                                < 1e-8 * g.to_complex().abs_eval(a.approx)
                        }
                    },
                }
            }
        }
    }

    /// Order of vanishing of `p` here; `None` for the zero polynomial.
    pub fn order_of_vanishing(&self, p: &QPoly) -> Option<usize> {
        if p.is_zero() {
            return None;
        }
        if let Point::Exact(w) = self {
            return p.shift(w).valuation();
        }
        (0..=p.degree().unwrap_or(0)).find(|&j| !self.vanishes(&p.taylor_coeff_poly(j)))
    }
}
