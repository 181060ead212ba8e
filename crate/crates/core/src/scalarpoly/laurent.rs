//! Laurent expansions of rational functions and residues.

use num_complex::Complex64;

use super::point::Point;
use super::poly::{Poly, QPoly};
use super::scalar::{Field, GaussRat};
use crate::error::{Error, Result};

/// Truncated Laurent series `Σ_{k=order}^{order+len-1} c_k (z - center)^k`.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentExpansion<F: Field> {
    pub center: F,
    /// Lowest exponent. The coefficient stored for it is nonzero unless the
    /// expansion is identically zero.
    pub order: i64,
    pub coeffs: Vec<F>,
}

impl<F: Field> LaurentExpansion<F> {
    pub fn coeff(&self, k: i64) -> F {
        if k < self.order {
            return F::zero();
        }
        self.coeffs
            .get((k - self.order) as usize)
            .cloned()
            .unwrap_or_else(F::zero)
    }

    /// Coefficient of `(z - center)^{-1}`.
    pub fn residue(&self) -> F {
        self.coeff(-1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Highest exponent carried.
    pub fn upto(&self) -> i64 {
        self.order + self.coeffs.len() as i64 - 1
    }
}

/// Power-series quotient `num/den` to `count` terms; `den[0] != 0`.
fn series_div<F: Field>(num: &[F], den: &[F], count: usize) -> Vec<F> {
    let inv0 = den[0].inv().expect("nonzero constant term");
    let mut out: Vec<F> = Vec::with_capacity(count);
    for k in 0..count {
        let mut acc = num.get(k).cloned().unwrap_or_else(F::zero);
        for j in 1..=k.min(den.len().saturating_sub(1)) {
            acc = acc - den[j].clone() * out[k - j].clone();
        }
        out.push(acc * inv0.clone());
    }
    out
}

fn expansion_from_taylor<F: Field>(
    center: F,
    num: &[F],
    num_val: usize,
    den: &[F],
    den_val: usize,
    upto: i64,
) -> LaurentExpansion<F> {
    let order = num_val as i64 - den_val as i64;
    let count = if upto >= order {
        (upto - order + 1) as usize
    } else {
        0
    };
    let coeffs = series_div(&num[num_val.min(num.len())..], &den[den_val..], count);
    LaurentExpansion {
        center,
        order,
        coeffs,
    }
}

/// Expansion of `num/den` at an exact point, valid through exponent `upto`.
pub fn laurent(
    num: &QPoly,
    den: &QPoly,
    w: &GaussRat,
    upto: i64,
) -> Result<LaurentExpansion<GaussRat>> {
    if den.is_zero() {
        return Err(Error::ZeroDenominatorIdentically);
    }
    let d = den.shift(w);
    let d_val = d.valuation().expect("nonzero");
    if num.is_zero() {
        let count = if upto >= -(d_val as i64) {
            (upto + d_val as i64 + 1) as usize
        } else {
            0
        };
        return Ok(LaurentExpansion {
            center: w.clone(),
            order: -(d_val as i64),
            coeffs: vec![GaussRat::zero(); count],
        });
    }
    let n = num.shift(w);
    let n_val = n.valuation().expect("nonzero");
    Ok(expansion_from_taylor(
        w.clone(),
        n.coeffs(),
        n_val,
        d.coeffs(),
        d_val,
        upto,
    ))
}

/// Expansion at a root of an exact polynomial. Orders of vanishing are decided
/// exactly; the coefficients are exact at exact points and floating otherwise.
pub fn laurent_at(
    num: &QPoly,
    den: &QPoly,
    point: &Point,
    upto: i64,
) -> Result<LaurentExpansion<Complex64>> {
    if let Point::Exact(w) = point {
        let e = laurent(num, den, w, upto)?;
        return Ok(LaurentExpansion {
            center: w.to_c64(),
            order: e.order,
            coeffs: e.coeffs.iter().map(|c| c.to_c64()).collect(),
        });
    }
    if den.is_zero() {
        return Err(Error::ZeroDenominatorIdentically);
    }
    let taylor = |p: &QPoly, val: usize| -> Vec<Complex64> {
        let len = p.degree().map_or(0, |d| d + 1);
        (0..len)
            .map(|j| {
                if j < val {
                    Complex64::new(0.0, 0.0)
                } else {
                    point.eval_approx(&p.taylor_coeff_poly(j))
                }
            })
            .collect()
    };
    let d_val = point.order_of_vanishing(den).expect("nonzero");
    let d = taylor(den, d_val);
    let (n, n_val) = match point.order_of_vanishing(num) {
        None => (vec![Complex64::new(0.0, 0.0)], 0),
        Some(v) => (taylor(num, v), v),
    };
    Ok(expansion_from_taylor(
        point.approx(),
        &n,
        n_val,
        &d,
        d_val,
        upto,
    ))
}

/// Exact decision of `res_w(num/den) = k`.
///
/// With `m = ord_w(den)` and `d_j`, `n_j` the Taylor-coefficient polynomials of
/// `den` and `num`, the residue times `d_m(w)^m` is the value at `w` of a
/// polynomial built fraction-free from the `d_j`, `n_j`; the test is whether
/// that polynomial minus `k d_m^m` vanishes at `w`.
pub fn residue_equals(num: &QPoly, den: &QPoly, point: &Point, k: &GaussRat) -> Result<bool> {
    if den.is_zero() {
        return Err(Error::ZeroDenominatorIdentically);
    }
    if let Point::Exact(w) = point {
        return Ok(laurent(num, den, w, -1)?.residue() == *k);
    }
    let m = point.order_of_vanishing(den).expect("nonzero");
    let d = |j: usize| den.taylor_coeff_poly(m + j);
    let lead = d(0);
    // v[k] = d_m^{k+1} · [u^k] (1/U),  U = Σ_j d_{m+j} u^j
    let mut v: Vec<QPoly> = vec![Poly::one()];
    for kk in 1..m {
        let mut acc = Poly::zero();
        for j in 1..=kk {
            acc = &acc - &(&(&d(j) * &v[kk - j]) * &lead.pow(j - 1));
        }
        v.push(acc);
    }
    let mut total = Poly::zero();
    for i in 0..m {
        total = &total + &(&(&num.taylor_coeff_poly(i) * &v[m - 1 - i]) * &lead.pow(i));
    }
    let target = &total - &lead.pow(m).scale(k);
    Ok(point.vanishes(&target))
}
