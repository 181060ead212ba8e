//! Finite-section oracle for `T_φ` on the Bergman space.
//!
//! Everything here is independent of the differential-operator engine: `T_φ`
//! acts on monomials by `T_{z̄^k} z^n = (n-k+1)/(n+1) z^{n-k}` (zero for
//! `k > n`), and matrices are taken in the orthonormal basis
//! `e_k = √(k+1) z^k`.
//!
//! Kernel evidence comes from the column-exact section (columns `< N`, rows
//! `< N + deg_z φ`), whose columns carry the full image of each basis vector.
//! Cokernel evidence comes from the column-exact section of the adjoint.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalarpoly::{Field, GaussRat, Poly, QPoly};
use crate::symbol::PolyanalyticSymbol;

/// Scalar in `T_{z̄^k} z^n = c z^{n-k}`.
pub fn tzbar_monomial(k: usize, n: usize) -> GaussRat {
    if k > n {
        GaussRat::zero()
    } else {
        GaussRat::ratio((n - k + 1) as i64, (n + 1) as i64)
    }
}

/// `T_φ f = Σ_i T_{z̄^i}(a_i f)`, exactly.
pub fn apply_toeplitz_poly(sym: &PolyanalyticSymbol, f: &QPoly) -> QPoly {
    let mut out: Vec<GaussRat> = Vec::new();
    for (i, a) in sym.coeffs().iter().enumerate() {
        let g = a * f;
        for (m, c) in g.coeffs().iter().enumerate() {
            if c.is_zero() || m < i {
                continue;
            }
            let target = m - i;
            if out.len() <= target {
                out.resize(target + 1, GaussRat::zero());
            }
            out[target] = out[target].clone() + c.clone() * tzbar_monomial(i, m);
        }
    }
    Poly::new(out)
}

/// Float coefficients `a_{ik}` of `z̄^i z^k`.
fn float_coeffs(sym: &PolyanalyticSymbol) -> Vec<Vec<Complex64>> {
    sym.coeffs()
        .iter()
        .map(|a| a.coeffs().iter().map(|c| c.to_c64()).collect())
        .collect()
}

/// Rows `< rows`, columns `< cols` of the matrix of `T_φ` in the orthonormal basis.
pub fn section(sym: &PolyanalyticSymbol, rows: usize, cols: usize) -> DMatrix<Complex64> {
    let a = float_coeffs(sym);
    let columns: Vec<Vec<(usize, Complex64)>> = (0..cols)
        .into_par_iter()
        .map(|p| {
            let mut col = Vec::new();
            for (i, ai) in a.iter().enumerate() {
                for (k, c) in ai.iter().enumerate() {
                    let m = p + k;
                    if m < i || *c == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let q = m - i;
                    if q >= rows {
                        continue;
                    }
                    let t = (m - i + 1) as f64 / (m + 1) as f64;
                    let w = ((p + 1) as f64 / (q + 1) as f64).sqrt();
                    col.push((q, c * t * w));
                }
            }
            col
        })
        .collect();
    let mut m = DMatrix::<Complex64>::zeros(rows, cols);
    for (p, col) in columns.into_iter().enumerate() {
        for (q, v) in col {
            m[(q, p)] += v;
        }
    }
    m
}

/// The `N × N` finite section.
#[derive(Clone, Debug)]
pub struct TruncatedToeplitz {
    pub size: usize,
    pub entries: DMatrix<Complex64>,
    pub symbol: PolyanalyticSymbol,
}

impl TruncatedToeplitz {
    /// Ascending singular values.
    pub fn singular_values(&self) -> Vec<f64> {
        singular_values(&self.entries)
    }

    /// Largest `|q - p|` over nonzero entries.
    pub fn band_width(&self) -> usize {
        let mut w = 0;
        for p in 0..self.size {
            for q in 0..self.size {
                if self.entries[(q, p)] != Complex64::new(0.0, 0.0) {
                    w = w.max(q.abs_diff(p));
                }
            }
        }
        w
    }
}

pub fn truncate(sym: &PolyanalyticSymbol, n: usize) -> Result<TruncatedToeplitz> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "truncation size must be at least 1".into(),
        ));
    }
    Ok(TruncatedToeplitz {
        size: n,
        entries: section(sym, n, n),
        symbol: sym.clone(),
    })
}

/// Column-exact section: columns `< n`, rows `< n + deg_z φ`.
pub fn kernel_section(sym: &PolyanalyticSymbol, n: usize) -> DMatrix<Complex64> {
    section(sym, n + sym.z_degree(), n)
}

/// Column-exact section of the adjoint: the conjugate transpose of rows `< n`,
/// columns `< n + order`.
pub fn cokernel_section(sym: &PolyanalyticSymbol, n: usize) -> DMatrix<Complex64> {
    section(sym, n, n + sym.order()).adjoint()
}

/// Ascending singular values.
pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().singular_values().iter().copied().collect();
    s.sort_by(f64::total_cmp);
    s
}

/// Decision thresholds for [`kernel_probe`].
#[derive(Clone, Copy, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Thresholds {
    /// Minimum shrink factor between consecutive sizes.
    pub decay_factor: f64,
    /// A decaying value must end below this.
    pub final_max: f64,
    /// The first non-decaying value must stay above this.
    pub gap_min: f64,
    /// Values below `noise_floor · σ_max` count as converged to zero.
    pub noise_floor: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            decay_factor: 4.0,
            final_max: 1e-6,
            gap_min: 1e-3,
            noise_floor: 1e-13,
        }
    }
}

/// Smallest singular values per size, ascending.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct SigmaTrace {
    pub sizes: Vec<usize>,
    /// `smallest[t]` holds the smallest values at `sizes[t]`.
    pub smallest: Vec<Vec<f64>>,
    pub largest: Vec<f64>,
}

/// Number of singular values reported per size.
pub const REPORTED: usize = 4;
const TRACKED: usize = 6;

impl SigmaTrace {
    fn collect(sizes: &[usize], build: impl Fn(usize) -> DMatrix<Complex64> + Sync) -> Self {
        let rows: Vec<(Vec<f64>, f64)> = sizes
            .par_iter()
            .map(|&n| {
                let s = singular_values(&build(n));
                let largest = s.last().copied().unwrap_or(0.0);
                (s.into_iter().take(TRACKED).collect(), largest)
            })
            .collect();
        let (smallest, largest) = rows.into_iter().unzip();
        SigmaTrace {
            sizes: sizes.to_vec(),
            smallest,
            largest,
        }
    }

    /// `N,sigma_1,...,sigma_4` rows, ascending values.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,sigma_1,sigma_2,sigma_3,sigma_4\n");
        for (n, row) in self.sizes.iter().zip(&self.smallest) {
            out.push_str(&n.to_string());
            for j in 0..REPORTED {
                out.push(',');
                if let Some(v) = row.get(j) {
                    out.push_str(&format!("{v:.6e}"));
                }
            }
            out.push('\n');
        }
        out
    }

    fn decays(&self, j: usize, th: &Thresholds) -> bool {
        let value = |t: usize| self.smallest[t].get(j).copied();
        let last = self.sizes.len() - 1;
        let Some(end) = value(last) else { return false };
        if end >= th.final_max {
            return false;
        }
        (0..last).all(|t| match (value(t), value(t + 1)) {
            (Some(a), Some(b)) => {
                b * th.decay_factor <= a || b <= th.noise_floor * self.largest[t + 1]
            }
            _ => false,
        })
    }

    /// Number of decaying values, or `ConvergenceAmbiguous` when the decaying
    /// values are not the smallest ones or no gap separates them from the rest.
    pub fn estimate(&self, th: &Thresholds) -> Result<usize> {
        if self.sizes.len() < 2 {
            return Err(Error::ConvergenceAmbiguous(
                "need at least two sizes".into(),
            ));
        }
        let width = self.smallest.iter().map(Vec::len).min().unwrap_or(0);
        let flags: Vec<bool> = (0..width).map(|j| self.decays(j, th)).collect();
        let k = flags.iter().take_while(|&&f| f).count();
        if flags[k..].iter().any(|&f| f) {
            return Err(Error::ConvergenceAmbiguous(format!(
                "decaying singular values are not contiguous: {flags:?}"
            )));
        }
        if k < width {
            let next = self.smallest[self.sizes.len() - 1][k];
            if next <= th.gap_min {
                return Err(Error::ConvergenceAmbiguous(format!(
                    "{k} decaying values but sigma_{} = {next:.3e} is not above {:.0e}",
                    k + 1,
                    th.gap_min
                )));
            }
        } else {
            return Err(Error::ConvergenceAmbiguous(format!(
                "all {width} tracked values decay"
            )));
        }
        Ok(k)
    }

    /// Relative spread `max/min - 1` of the smallest value across sizes.
    pub fn min_spread(&self) -> f64 {
        let mins: Vec<f64> = self
            .smallest
            .iter()
            .filter_map(|r| r.first().copied())
            .collect();
        let hi = mins.iter().copied().fold(0.0, f64::max);
        let lo = mins.iter().copied().fold(f64::INFINITY, f64::min);
        hi / lo - 1.0
    }
}

/// Finite-section evidence about kernel and cokernel dimensions.
#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ProbeReport {
    pub kernel: SigmaTrace,
    pub cokernel: SigmaTrace,
    pub kernel_dim: usize,
    pub cokernel_dim: usize,
    pub thresholds: Thresholds,
    pub confidence: &'static str,
}

/// Traces of the kernel and cokernel sections over increasing `sizes`.
pub fn sigma_traces(sym: &PolyanalyticSymbol, sizes: &[usize]) -> Result<(SigmaTrace, SigmaTrace)> {
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) || sizes[0] == 0 {
        return Err(Error::InvalidArgument(format!(
            "sizes must be positive and strictly increasing: {sizes:?}"
        )));
    }
    let kernel = SigmaTrace::collect(sizes, |n| kernel_section(sym, n));
    let cokernel = SigmaTrace::collect(sizes, |n| cokernel_section(sym, n));
    Ok((kernel, cokernel))
}

pub fn kernel_probe(
    sym: &PolyanalyticSymbol,
    sizes: &[usize],
    th: &Thresholds,
) -> Result<ProbeReport> {
    let (kernel, cokernel) = sigma_traces(sym, sizes)?;
    let kernel_dim = kernel.estimate(th)?;
    let cokernel_dim = cokernel.estimate(th)?;
    Ok(ProbeReport {
        kernel,
        cokernel,
        kernel_dim,
        cokernel_dim,
        thresholds: *th,
        confidence: "numeric-confidence",
    })
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push(((1.0 - x) / 2.0, w / 2.0));
    }
    out
}

/// Largest deviation over sample points `|z| <= 0.9` between
/// `∫_0^1 t f'(tz) dt` (that is, `z^{-2} ∫_0^z u f'(u) du`) evaluated by
/// quadrature and the exact `T_{z̄} f`.
pub fn quadrature_check(f: &QPoly) -> f64 {
    let df = f.derivative().to_complex();
    let exact =
        apply_toeplitz_poly(&PolyanalyticSymbol::zbar_power(1, GaussRat::one()), f).to_complex();
    let nodes = gauss_legendre(f.degree().unwrap_or(0) / 2 + 8);
    let mut worst: f64 = 0.0;
    for r in [0.0, 0.3, 0.6, 0.9] {
        for j in 0..12 {
            let z = Complex64::from_polar(r, 2.0 * std::f64::consts::PI * j as f64 / 12.0);
            let integral: Complex64 = nodes.iter().map(|&(t, w)| df.eval(&(z * t)) * t * w).sum();
            worst = worst.max((integral - exact.eval(&z)).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> GaussRat {
        GaussRat::ratio(n, d)
    }

    #[test]
    fn monomial_formula() {
        assert_eq!(tzbar_monomial(2, 3), q(1, 2));
        assert_eq!(tzbar_monomial(1, 1), q(1, 2));
        assert_eq!(tzbar_monomial(3, 2), GaussRat::zero());
    }

    #[test]
    fn apply_examples() {
        let c = q(1, 3);
        let sym = PolyanalyticSymbol::zbar_power(2, GaussRat::one()).shift_by_scalar(&-c.clone());
        let z3: QPoly = Poly::monomial(GaussRat::one(), 3);
        assert_eq!(
            apply_toeplitz_poly(&sym, &z3),
            Poly::new(vec![GaussRat::zero(), q(1, 2), GaussRat::zero(), c])
        );
        let a0: QPoly = Poly::from_ints(&[1, 2, -1]);
        let f: QPoly = Poly::from_ints(&[3, 0, 5]);
        assert_eq!(
            apply_toeplitz_poly(&PolyanalyticSymbol::holomorphic(a0.clone()), &f),
            &a0 * &f
        );
        let zbar = PolyanalyticSymbol::zbar_power(1, GaussRat::one());
        assert!(apply_toeplitz_poly(&zbar, &Poly::one()).is_zero());
    }

    #[test]
    fn truncate_examples() {
        let t = truncate(&PolyanalyticSymbol::zbar_power(2, GaussRat::one()), 6).unwrap();
        for q in 0..6 {
            assert_eq!(t.entries[(q, 0)], Complex64::new(0.0, 0.0));
            assert_eq!(t.entries[(q, 1)], Complex64::new(0.0, 0.0));
        }
        let c = GaussRat::complex((1, 2), (-1, 3));
        let t = truncate(
            &PolyanalyticSymbol::holomorphic(Poly::constant(c.clone())),
            5,
        )
        .unwrap();
        assert_eq!(t.entries, DMatrix::identity(5, 5) * c.to_c64());

        let t = truncate(&PolyanalyticSymbol::zbar_power(1, GaussRat::one()), 3).unwrap();
        let mut expected = DMatrix::<Complex64>::zeros(3, 3);
        expected[(0, 1)] = Complex64::new(0.5 * 2f64.sqrt(), 0.0);
        expected[(1, 2)] = Complex64::new(2.0 / 3.0 * 1.5f64.sqrt(), 0.0);
        assert!((t.entries - expected).norm() < 1e-15);
        assert!(truncate(&PolyanalyticSymbol::zbar_power(1, GaussRat::one()), 0).is_err());
    }

    #[test]
    fn adjoint_structure() {
        for k in 0..4 {
            for n in [1usize, 7, 32, 64] {
                let zbar = section(&PolyanalyticSymbol::zbar_power(k, GaussRat::one()), n, n);
                let z = section(
                    &PolyanalyticSymbol::holomorphic(Poly::monomial(GaussRat::one(), k)),
                    n,
                    n,
                );
                assert!((zbar - z.adjoint()).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn constant_symbol_singular_values() {
        let sym = PolyanalyticSymbol::holomorphic(Poly::constant(q(-3, 2)));
        for n in [8, 16] {
            let s = truncate(&sym, n).unwrap().singular_values();
            assert!(s.iter().all(|v| (v - 1.5).abs() < 1e-12));
        }
    }

    #[test]
    fn csv_header() {
        let sym = PolyanalyticSymbol::zbar_power(1, GaussRat::one())
            .shift_by_scalar(&GaussRat::from_i64(2));
        let (k, _) = sigma_traces(&sym, &[8, 16]).unwrap();
        let csv = k.to_csv();
        assert!(csv.starts_with("N,sigma_1,sigma_2,sigma_3,sigma_4\n8,"));
        assert_eq!(csv.lines().count(), 3);
        assert!(sigma_traces(&sym, &[16, 8]).is_err());
    }

    #[test]
    fn quadrature_examples() {
        assert!(quadrature_check(&Poly::x()) < 1e-12);
        assert!(quadrature_check(&Poly::one()) < 1e-12);
        let z3: QPoly = Poly::monomial(GaussRat::one(), 3);
        let zbar = PolyanalyticSymbol::zbar_power(1, GaussRat::one());
        assert_eq!(apply_toeplitz_poly(&zbar, &z3), Poly::monomial(q(3, 4), 2));
        assert!(quadrature_check(&z3) < 1e-12);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let nodes = gauss_legendre(8);
        for k in 0..16 {
            let approx: f64 = nodes.iter().map(|&(t, w)| w * t.powi(k)).sum();
            assert!((approx - 1.0 / (k + 1) as f64).abs() < 1e-14, "k = {k}");
        }
    }
}
