//! Polynomial root localization.
//!
//! Exact polynomials are first split by square-free decomposition, so
//! multiplicities are exact and every float root is a simple root of its
//! square-free factor. Roots are found by Aberth–Ehrlich simultaneous
//! iteration, with a companion-matrix eigenvalue fallback, and polished by
//! Newton steps on the factor.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::point::Point;
use super::poly::{CPoly, Poly, QPoly};
use super::scalar::GaussRat;
use crate::error::{Error, Result};

/// Relative radius under which two float roots are merged into one cluster.
pub const CLUSTER_RADIUS: f64 = 1e-7;

/// Distance from the unit circle below which a root is boundary-ambiguous.
pub const BOUNDARY_TOL: f64 = 1e-9;

/// Relative residual accepted for a polished root: `|p(r)| <= tol * Σ|a_k||r|^k`.
pub const RESIDUAL_TOL: f64 = 1e-9;

const MAX_ITER: usize = 500;

/// A root of an exact polynomial.
#[derive(Clone, Debug)]
pub struct Root {
    pub point: Point,
    pub multiplicity: usize,
}

impl Root {
    pub fn approx(&self) -> Complex64 {
        self.point.approx()
    }

    /// Position relative to the closed unit disc.
    pub fn location(&self) -> DiscLocation {
        self.point.disc_location()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "camelCase")]
pub enum DiscLocation {
    Inside,
    /// On the circle, or too close to it to decide at float precision.
    Boundary,
    Outside,
}

/// All roots of an exact nonzero polynomial with exact multiplicities.
pub fn roots(p: &QPoly) -> Result<Vec<Root>> {
    if p.is_zero() {
        return Err(Error::InvalidArgument(
            "roots of the zero polynomial".into(),
        ));
    }
    let mut out = Vec::new();
    for (factor, mult) in p.squarefree_decomposition() {
        for point in Point::roots_of_squarefree(&factor)? {
            out.push(Root {
                point,
                multiplicity: mult,
            });
        }
    }
    out.sort_by(|a, b| {
        let (x, y) = (a.approx(), b.approx());
        x.norm()
            .total_cmp(&y.norm())
            .then(x.arg().total_cmp(&y.arg()))
    });
    Ok(out)
}

/// Roots of a float polynomial as `(root, multiplicity)`.
///
/// The coefficients are converted exactly (each finite double is a dyadic
/// rational) and split square-free; roots closer than [`CLUSTER_RADIUS`]
/// (relative) are then merged.
pub fn roots_float(p: &CPoly) -> Result<Vec<(Complex64, usize)>> {
    let exact: QPoly = Poly::new(
        p.coeffs()
            .iter()
            .map(|c| GaussRat::from_f64(c.re, c.im))
            .collect::<Result<Vec<_>>>()?,
    );
    let found = roots(&exact)?;
    let mut clusters: Vec<(Complex64, usize)> = Vec::new();
    for r in found {
        let z = r.approx();
        match clusters
            .iter_mut()
            .find(|(c, _)| (*c - z).norm() <= CLUSTER_RADIUS * c.norm().max(z.norm()).max(1.0))
        {
            Some((c, m)) => {
                let total = (*m + r.multiplicity) as f64;
                *c = (*c * *m as f64 + z * r.multiplicity as f64) / total;
                *m += r.multiplicity;
            }
            None => clusters.push((z, r.multiplicity)),
        }
    }
    Ok(clusters)
}

/// Simple roots of a float polynomial (no clustering), polished and checked
/// against [`RESIDUAL_TOL`].
pub fn simple_roots(p: &CPoly) -> Result<Vec<Complex64>> {
    let deg = p
        .degree()
        .ok_or_else(|| Error::InvalidArgument("zero polynomial".into()))?;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let monic = p.monic();
    if deg == 1 {
        return Ok(vec![-monic.coeff(0)]);
    }
    let mut found = aberth(&monic).or_else(|_| companion_eigenvalues(&monic))?;
    for r in found.iter_mut() {
        *r = newton_polish(&monic, *r);
    }
    let dp = monic.derivative();
    for r in &found {
        let scale = monic.abs_eval(*r);
        let residual = monic.eval(r).norm();
        // Near 0 the relative test degenerates; a tiny Newton step suffices.
        let step = residual / dp.eval(r).norm();
        if residual > RESIDUAL_TOL * scale && step > RESIDUAL_TOL * r.norm().max(1.0) {
            return Err(Error::IllConditioned(format!(
                "root {r} has residual {:e} (scale {scale:e})",
                monic.eval(r).norm()
            )));
        }
    }
    Ok(found)
}

/// Aberth–Ehrlich iteration on a monic polynomial of degree >= 2.
pub fn aberth(p: &CPoly) -> Result<Vec<Complex64>> {
    let deg = p.degree().unwrap_or(0);
    let dp = p.derivative();
    // Initial guesses on a circle of radius given by the Cauchy-type bound,
    // rotated off the real axis to break symmetry.
    let radius = p.coeffs()[..deg]
        .iter()
        .enumerate()
        .map(|(k, c)| c.norm().powf(1.0 / (deg - k) as f64))
        .fold(0.0_f64, f64::max)
        .max(1e-3);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| {
            Complex64::from_polar(
                radius,
                2.0 * std::f64::consts::PI * k as f64 / deg as f64 + 0.4,
            )
        })
        .collect();
    for _ in 0..MAX_ITER {
        let mut max_step = 0.0_f64;
        for i in 0..deg {
            let pv = p.eval(&z[i]);
            if pv.norm() == 0.0 {
                continue;
            }
            let ratio = pv / dp.eval(&z[i]);
            let repulsion: Complex64 = (0..deg)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                return Err(Error::IllConditioned("non-finite Aberth step".into()));
            }
            z[i] -= step;
            max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
        }
        if max_step < 1e-15 {
            return Ok(z);
        }
    }
    let ok = z
        .iter()
        .all(|r| p.eval(r).norm() <= RESIDUAL_TOL * p.abs_eval(*r));
    if ok {
        Ok(z)
    } else {
        Err(Error::IllConditioned(
            "Aberth iteration did not converge".into(),
        ))
    }
}

/// Eigenvalues of the companion matrix of a monic polynomial.
pub fn companion_eigenvalues(p: &CPoly) -> Result<Vec<Complex64>> {
    let deg = p.degree().unwrap_or(0);
    let mut m = DMatrix::<Complex64>::zeros(deg, deg);
    for i in 1..deg {
        m[(i, i - 1)] = Complex64::new(1.0, 0.0);
    }
    for i in 0..deg {
        m[(i, deg - 1)] = -p.coeff(i);
    }
    m.schur()
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| Error::IllConditioned("companion Schur form did not triangularize".into()))
}

fn newton_polish(p: &CPoly, mut z: Complex64) -> Complex64 {
    let dp = p.derivative();
    for _ in 0..8 {
        let d = dp.eval(&z);
        if d.norm() == 0.0 {
            break;
        }
        let step = p.eval(&z) / d;
        let next = z - step;
        if !(next.re.is_finite() && next.im.is_finite()) {
            break;
        }
        // Only accept steps that do not increase the residual.
        if p.eval(&next).norm() > p.eval(&z).norm() {
            break;
        }
        z = next;
        if step.norm() <= 1e-17 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> GaussRat {
        GaussRat::ratio(n, d)
    }

    #[test]
    fn quadratic_roots_on_imaginary_axis() {
        // 1 + z²/4 has roots ±2i.
        let p: QPoly = Poly::new(vec![q(1, 1), q(0, 1), q(1, 4)]);
        let rs = roots(&p).unwrap();
        assert_eq!(rs.len(), 2);
        for r in &rs {
            assert_eq!(r.multiplicity, 1);
            assert!((r.approx().norm() - 2.0).abs() < 1e-12);
            assert!(r.approx().re.abs() < 1e-12);
        }
    }

    #[test]
    fn triple_root_reported_once() {
        let p = Poly::linear_root(&q(1, 2)).pow(3);
        let rs = roots(&p).unwrap();
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].multiplicity, 3);
        assert_eq!(rs[0].point.exact(), Some(&q(1, 2)));
    }

    #[test]
    fn linear_root() {
        let rs = roots(&Poly::from_ints(&[1, -2])).unwrap();
        assert_eq!(rs[0].point.exact(), Some(&q(1, 2)));
        assert_eq!(rs[0].location(), DiscLocation::Inside);
    }

    #[test]
    fn boundary_root_flagged() {
        let rs = roots(&Poly::from_ints(&[1, 0, 1])).unwrap();
        assert!(rs.iter().all(|r| r.location() == DiscLocation::Boundary));
    }

    #[test]
    fn float_clusters_and_companion_agree() {
        let p: CPoly = Poly::from_ints(&[-6, 11, -6, 1]);
        let mut a = aberth(&p).unwrap();
        let mut c = companion_eigenvalues(&p).unwrap();
        a.sort_by(|x, y| x.re.total_cmp(&y.re));
        c.sort_by(|x, y| x.re.total_cmp(&y.re));
        for (x, y) in a.iter().zip(&c) {
            assert!((x - y).norm() < 1e-9);
        }
        let rs = roots_float(&Poly::from_ints(&[1, -2, 1])).unwrap();
        assert_eq!(rs, vec![(Complex64::new(1.0, 0.0), 2)]);
    }

    #[test]
    fn multiplicities_sum_to_degree_and_residuals_small() {
        let p = &(&Poly::linear_root(&GaussRat::complex((1, 3), (1, 5))).pow(2)
            * &Poly::<GaussRat>::from_ints(&[3, -1, 0, 2, 1]))
            * &Poly::linear_root(&q(-7, 4));
        let rs = roots(&p).unwrap();
        assert_eq!(
            rs.iter().map(|r| r.multiplicity).sum::<usize>(),
            p.degree().unwrap()
        );
        let pc = p.to_complex();
        for r in &rs {
            assert!(pc.eval(&r.approx()).norm() <= 1e-8 * pc.abs_eval(r.approx()));
        }
    }
}
