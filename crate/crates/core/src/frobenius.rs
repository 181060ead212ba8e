//! Local analysis of `A y = 0` at a zero `w` of the leading coefficient:
//! regularity, the indicial polynomial, integer exponents and power-series
//! solutions.
//!
//! With `s = ord_w(c_n)` the operator is normalized to `B = (z-w)^{n-s} A`.
//! Writing the `D^i` coefficient of `B` in `u = z - w` as `Σ_j e_{ij} u^j`,
//! `w` is regular iff `e_{ij} = 0` for `j < i`, and then
//! `B u^m = Σ_{t>=0} P_t(m) u^{m+t}` with `P_t(m) = Σ_i e_{i,i+t} m(m-1)...(m-i+1)`.
//! `P_0` is the indicial polynomial.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::scalarpoly::roots::companion_eigenvalues;
use crate::scalarpoly::{falling_factorial, roots, CPoly, Field, GaussRat, Point, Poly, QPoly};
use crate::weyl::DiffOp;

/// Distance to the nearest integer under which a float indicial root becomes
/// a candidate integer root. Candidates are always confirmed exactly.
const CANDIDATE_RADIUS: f64 = 1e-3;

/// Trial evaluation range for exact integer-root search.
const TRIAL_LIMIT: f64 = 10_000.0;

#[derive(Clone, Debug)]
pub struct IndicialData {
    pub point: Point,
    pub regular: bool,
    /// `ord_w(c_n)`.
    pub leading_order: usize,
    /// Indicial polynomial in `λ` when `w` is exact.
    pub poly_exact: Option<QPoly>,
    /// Float image of the indicial polynomial.
    pub poly_approx: CPoly,
    pub all_roots: Vec<Complex64>,
    pub nonneg_integer_roots: Vec<i64>,
    pub distinct_nonneg_count: usize,
    /// Integer membership was decided in exact arithmetic.
    pub exact: bool,
}

/// `ord_w(c_i)` with `None` for a zero coefficient.
fn orders(a: &DiffOp<GaussRat>, point: &Point) -> Vec<Option<usize>> {
    a.coeffs()
        .iter()
        .map(|c| point.order_of_vanishing(c))
        .collect()
}

/// Whether `w` is a regular (or ordinary) point of `A y = 0`.
pub fn classify(a: &DiffOp<GaussRat>, point: &Point) -> bool {
    let Some(n) = a.order() else { return true };
    let ords = orders(a, point);
    let s = ords[n].expect("leading coefficient is nonzero");
    ords.iter().enumerate().all(|(i, o)| match o {
        None => true,
        Some(o) => *o + (n - i) >= s,
    })
}

/// Polynomials in `z` whose values at `w` are the indicial coefficients `b_i`.
fn indicial_coefficient_polys(a: &DiffOp<GaussRat>, s: usize) -> Vec<QPoly> {
    let n = a.order().unwrap_or(0);
    (0..=n)
        .map(|i| match (i + s).checked_sub(n) {
            Some(j) => a.coeff(i).taylor_coeff_poly(j),
            None => Poly::zero(),
        })
        .collect()
}

/// Indicial data at `point`; `NotRegular` at an irregular singular point.
pub fn indicial(a: &DiffOp<GaussRat>, point: &Point) -> Result<IndicialData> {
    let data = indicial_data(a, point)?;
    if data.regular {
        Ok(data)
    } else {
        Err(Error::NotRegular)
    }
}

/// Like [`indicial`] but reports an irregular point through the `regular`
/// flag (with empty root data) instead of an error.
pub fn indicial_data(a: &DiffOp<GaussRat>, point: &Point) -> Result<IndicialData> {
    let n = a
        .order()
        .ok_or_else(|| Error::InvalidArgument("zero operator".into()))?;
    let s = point
        .order_of_vanishing(&a.coeff(n))
        .expect("leading coefficient is nonzero");
    if !classify(a, point) {
        return Ok(IndicialData {
            point: point.clone(),
            regular: false,
            leading_order: s,
            poly_exact: None,
            poly_approx: Poly::zero(),
            all_roots: Vec::new(),
            nonneg_integer_roots: Vec::new(),
            distinct_nonneg_count: 0,
            exact: point.is_exact(),
        });
    }
    let b = indicial_coefficient_polys(a, s);
    let (poly_exact, poly_approx, all_roots, nonneg) = match point {
        Point::Exact(w) => {
            let p = b.iter().enumerate().fold(Poly::zero(), |acc, (i, bi)| {
                &acc + &falling_factorial::<GaussRat>(i).scale(&bi.eval(w))
            });
            let all = roots(&p)?
                .iter()
                .flat_map(|r| std::iter::repeat_n(r.approx(), r.multiplicity))
                .collect();
            let nonneg = integer_roots(&p, 0);
            (Some(p.clone()), p.to_complex(), all, nonneg)
        }
        Point::Algebraic(_) => {
            let p: CPoly = b.iter().enumerate().fold(Poly::zero(), |acc, (i, bi)| {
                &acc + &falling_factorial::<Complex64>(i).scale(&point.eval_approx(bi))
            });
            let all = float_roots(&p)?;
            let nonneg = algebraic_integer_roots(&b, point, &all, 0);
            (None, p, all, nonneg)
        }
    };
    Ok(IndicialData {
        point: point.clone(),
        regular: true,
        leading_order: s,
        poly_exact,
        poly_approx,
        all_roots,
        distinct_nonneg_count: nonneg.len(),
        nonneg_integer_roots: nonneg,
        exact: true,
    })
}

fn float_roots(p: &CPoly) -> Result<Vec<Complex64>> {
    match p.degree() {
        None | Some(0) => Ok(Vec::new()),
        Some(1) => Ok(vec![-p.coeff(0) / p.coeff(1)]),
        Some(_) => companion_eigenvalues(&p.monic()),
    }
}

/// Integer roots `k >= lower` of an exact polynomial, sorted and distinct.
///
/// Trial evaluation over the Cauchy root bound when it is at most 10⁴;
/// otherwise candidates come from float roots near an integer and are
/// confirmed exactly.
pub fn integer_roots(p: &QPoly, lower: i64) -> Vec<i64> {
    let Some(deg) = p.degree() else {
        return Vec::new();
    };
    if deg == 0 {
        return Vec::new();
    }
    let lead = p.coeff(deg).to_c64().norm();
    let bound = 1.0
        + p.coeffs()[..deg]
            .iter()
            .map(|c| c.to_c64().norm() / lead)
            .fold(0.0, f64::max);
    let mut out: Vec<i64> = if bound <= TRIAL_LIMIT {
        let hi = bound.ceil() as i64;
        (lower.max(-hi)..=hi)
            .filter(|&k| p.eval(&GaussRat::from_i64(k)).is_zero())
            .collect()
    } else {
        let approx = float_roots(&p.to_complex()).unwrap_or_default();
        candidates(&approx, lower)
            .into_iter()
            .filter(|&k| p.eval(&GaussRat::from_i64(k)).is_zero())
            .collect()
    };
    out.sort_unstable();
    out.dedup();
    out
}

fn candidates(approx: &[Complex64], lower: i64) -> Vec<i64> {
    let mut ks: Vec<i64> = approx
        .iter()
        .filter(|r| {
            let tol = CANDIDATE_RADIUS * r.norm().max(1.0);
            r.im.abs() < tol && (r.re - r.re.round()).abs() < tol
        })
        .map(|r| r.re.round() as i64)
        .filter(|&k| k >= lower)
        .collect();
    ks.sort_unstable();
    ks.dedup();
    ks
}

/// Integer roots `k >= lower` of `Σ b_i(w) k(k-1)...(k-i+1)` at an algebraic
/// point, each confirmed by the exact test `R_k(w) = 0` with
/// `R_k(z) = Σ b_i(z) k(k-1)...(k-i+1)`.
fn algebraic_integer_roots(
    b: &[QPoly],
    point: &Point,
    approx: &[Complex64],
    lower: i64,
) -> Vec<i64> {
    candidates(approx, lower)
        .into_iter()
        .filter(|&k| {
            let r = b.iter().enumerate().fold(Poly::zero(), |acc, (i, bi)| {
                let ff = (0..i as i64).fold(GaussRat::one(), |f, j| f * GaussRat::from_i64(k - j));
                &acc + &bi.scale(&ff)
            });
            point.vanishes(&r)
        })
        .collect()
}

/// Truncated power series `Σ_{m=0}^{M} y_m (z-w)^m` solving `A y = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesSolution {
    pub center: GaussRat,
    pub leading_exponent: i64,
    pub coeffs: Vec<GaussRat>,
}

impl SeriesSolution {
    /// The truncated series as a polynomial in `z`.
    pub fn to_poly(&self) -> QPoly {
        Poly::new(self.coeffs.clone()).shift(&-self.center.clone())
    }
}

/// Frobenius recurrence data at an exact regular point.
struct Recurrence {
    /// `c_i(u + w)`.
    shifted: Vec<QPoly>,
    /// `n - s`.
    offset: usize,
    /// Largest `t` with a possibly nonzero `P_t`.
    reach: usize,
}

impl Recurrence {
    fn new(a: &DiffOp<GaussRat>, w: &GaussRat) -> Result<Self> {
        if !classify(a, &Point::Exact(w.clone())) {
            return Err(Error::NotRegular);
        }
        let n = a
            .order()
            .ok_or_else(|| Error::InvalidArgument("zero operator".into()))?;
        let shifted: Vec<QPoly> = a.coeffs().iter().map(|c| c.shift(w)).collect();
        let s = shifted[n].valuation().expect("nonzero");
        let offset = n - s;
        let reach = shifted
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.degree().map(|d| (d + offset).saturating_sub(i)))
            .max()
            .unwrap_or(0);
        Ok(Recurrence {
            shifted,
            offset,
            reach,
        })
    }

    /// `P_t(m)`.
    fn p(&self, t: usize, m: i64) -> GaussRat {
        let mut acc = GaussRat::zero();
        for (i, c) in self.shifted.iter().enumerate() {
            let Some(j) = (i + t).checked_sub(self.offset) else {
                continue;
            };
            let e = c.coeff(j);
            if e.is_zero() {
                continue;
            }
            let ff = (0..i as i64).fold(GaussRat::one(), |f, k| f * GaussRat::from_i64(m - k));
            acc = acc + e * ff;
        }
        acc
    }

    /// `-Σ_{t>=1} P_t(k-t) y_{k-t}` for vectors of coordinates over free parameters.
    fn rhs(&self, k: usize, ys: &[Vec<GaussRat>], width: usize) -> Vec<GaussRat> {
        let mut acc = vec![GaussRat::zero(); width];
        for t in 1..=self.reach.min(k) {
            let y = &ys[k - t];
            if y.iter().all(|c| c.is_zero()) {
                continue;
            }
            let p = self.p(t, (k - t) as i64);
            if p.is_zero() {
                continue;
            }
            for (a, c) in acc.iter_mut().zip(y) {
                *a = a.clone() - p.clone() * c.clone();
            }
        }
        acc
    }
}

/// Power-series solution with leading exponent `lambda0`, exact through
/// `(z-w)^M`. Errors with `ResonanceObstruction` where the recurrence would
/// need a logarithmic term.
pub fn series_solution(
    a: &DiffOp<GaussRat>,
    w: &GaussRat,
    lambda0: i64,
    m: usize,
) -> Result<SeriesSolution> {
    let rec = Recurrence::new(a, w)?;
    if lambda0 < 0 || !rec.p(0, lambda0).is_zero() {
        return Err(Error::InvalidArgument(format!(
            "{lambda0} is not a nonnegative indicial root"
        )));
    }
    let start = lambda0 as usize;
    let mut ys: Vec<Vec<GaussRat>> = vec![vec![GaussRat::zero()]; start];
    ys.push(vec![GaussRat::one()]);
    for k in start + 1..=m.max(start) {
        let rhs = rec.rhs(k, &ys, 1).pop().expect("width 1");
        let diag = rec.p(0, k as i64);
        if diag.is_zero() {
            if !rhs.is_zero() {
                return Err(Error::ResonanceObstruction { exponent: k as i64 });
            }
            ys.push(vec![GaussRat::zero()]);
        } else {
            ys.push(vec![rhs * diag.inv().expect("nonzero")]);
        }
    }
    ys.truncate(m + 1);
    Ok(SeriesSolution {
        center: w.clone(),
        leading_exponent: lambda0,
        coeffs: ys
            .into_iter()
            .map(|mut v| v.pop().expect("width 1"))
            .collect(),
    })
}

/// Dimension of the space of solutions holomorphic at the exact regular
/// point `w`: one free coefficient per nonnegative integer indicial root,
/// minus one for every independent resonance constraint.
pub fn holomorphic_solution_dim(a: &DiffOp<GaussRat>, w: &GaussRat) -> Result<usize> {
    let rec = Recurrence::new(a, w)?;
    let exponents = integer_roots(&indicial_poly_from(&rec), 0);
    let Some(&top) = exponents.last() else {
        return Ok(0);
    };
    let width = exponents.len();
    // ys[k][j]: coordinate of y_k along the j-th free parameter.
    let mut ys: Vec<Vec<GaussRat>> = Vec::with_capacity(top as usize + 1);
    let mut active = vec![false; width];
    let mut next_param = 0;
    for k in 0..=top as usize {
        let rhs = rec.rhs(k, &ys, width);
        let diag = rec.p(0, k as i64);
        if diag.is_zero() {
            // Constraint rhs · params = 0 eliminates one parameter when nontrivial.
            if let Some(j) = (0..width).find(|&j| active[j] && !rhs[j].is_zero()) {
                let pivot_inv = rhs[j].inv().expect("nonzero");
                for y in ys.iter_mut() {
                    let yj = y[j].clone();
                    if yj.is_zero() {
                        continue;
                    }
                    for (i, r) in rhs.iter().enumerate() {
                        if i != j {
                            y[i] = y[i].clone() - yj.clone() * r.clone() * pivot_inv.clone();
                        }
                    }
                    y[j] = GaussRat::zero();
                }
                active[j] = false;
            }
            let mut y = vec![GaussRat::zero(); width];
            y[next_param] = GaussRat::one();
            active[next_param] = true;
            next_param += 1;
            ys.push(y);
        } else {
            let inv = diag.inv().expect("nonzero");
            ys.push(rhs.into_iter().map(|c| c * inv.clone()).collect());
        }
    }
    Ok(active.iter().filter(|&&b| b).count())
}

fn indicial_poly_from(rec: &Recurrence) -> QPoly {
    rec.shifted
        .iter()
        .enumerate()
        .fold(Poly::zero(), |acc, (i, c)| {
            match i.checked_sub(rec.offset) {
                Some(j) => &acc + &falling_factorial::<GaussRat>(i).scale(&c.coeff(j)),
                None => acc,
            }
        })
}
