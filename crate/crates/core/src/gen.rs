//! Seeded random symbols and polynomials for property suites and self-tests.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::scalarpoly::{roots, DiscLocation, Field, GaussRat, Poly, QPoly};
use crate::symbol::PolyanalyticSymbol;

pub struct SymbolGen {
    rng: ChaCha8Rng,
}

impl SymbolGen {
    pub fn new(seed: u64) -> Self {
        SymbolGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    /// `p/q` with `|p| <= max_num`, `1 <= q <= max_den`.
    pub fn rational(&mut self, max_num: i64, max_den: i64) -> GaussRat {
        GaussRat::ratio(
            self.rng.gen_range(-max_num..=max_num),
            self.rng.gen_range(1..=max_den),
        )
    }

    /// Gaussian rational; the imaginary part is zero with probability 1/2.
    pub fn gauss(&mut self, max_num: i64, max_den: i64) -> GaussRat {
        let re = self.rational(max_num, max_den);
        if self.rng.gen_bool(0.5) {
            re
        } else {
            re + self.rational(max_num, max_den) * GaussRat::i()
        }
    }

    /// Random polynomial of degree at most `deg`.
    pub fn poly(&mut self, deg: usize) -> QPoly {
        let d = self.rng.gen_range(0..=deg);
        Poly::new((0..=d).map(|_| self.gauss(9, 6)).collect())
    }

    /// Canonical symbol of order `n` with coefficient degrees at most `deg`.
    pub fn symbol(&mut self, n: usize, deg: usize) -> PolyanalyticSymbol {
        loop {
            let coeffs: Vec<QPoly> = (0..=n).map(|_| self.poly(deg)).collect();
            if !coeffs[n].is_zero() {
                return PolyanalyticSymbol::new(coeffs).expect("nonempty");
            }
        }
    }

    /// Canonical symbol of order `n <= max_n` whose `φ̃` has no root in the
    /// annulus `inner < |r| < outer` (so every root is clearly inside or
    /// outside the disc).
    pub fn symbol_away_from_circle(
        &mut self,
        max_n: usize,
        deg: usize,
        inner: f64,
        outer: f64,
    ) -> PolyanalyticSymbol {
        loop {
            let n = self.rng.gen_range(0..=max_n);
            let sym = self.symbol(n, deg);
            if roots_avoid_annulus(&sym.tilde(), inner, outer) {
                return sym;
            }
        }
    }

    /// First-order symbol `z̄ + f` whose `φ̃ = 1 + zf` has exactly one zero in
    /// the closed disc, a simple zero at the rational point `w`, with local
    /// exponent `λ` at `w` prescribed (`λ ≠ -1`).
    ///
    /// Writing `φ̃ = (1 - z/w) h` with `h(0) = 1`, the exponent at `w` is
    /// `λ = r - 2` where `h(w) = 1/(1 - r)`. `h` is a product of factors
    /// `1 + α_j z` with small `α_j`, so its zeros stay far out.
    pub fn planted_first_order(&mut self, lambda: i64) -> (PolyanalyticSymbol, GaussRat) {
        assert_ne!(lambda, -1, "λ = -1 cannot be planted at a simple zero");
        let target = GaussRat::from_i64(1 - (lambda + 2)).inv().expect("λ ≠ -1");
        loop {
            let w = self.gauss(4, 8);
            let m = w.to_c64().norm();
            if !(0.5..0.78).contains(&m) {
                continue;
            }
            let k = self.rng.gen_range(8..=10usize);
            let mut root = target.to_c64().powf(1.0 / k as f64);
            if self.rng.gen_bool(0.5) {
                root = root.conj();
            }
            // h = Π (1 + α_j z) with 1 + α_j w = ρ_j and Π ρ_j = h(w) exactly.
            let mut h = Poly::one();
            let mut value = GaussRat::one();
            for _ in 1..k {
                let jitter = Complex64::new(
                    self.rng.gen_range(-0.04..0.04),
                    self.rng.gen_range(-0.04..0.04),
                );
                let Some(rho) = GaussRat::approximate(root + jitter, 24) else {
                    continue;
                };
                h = &h * &factor_through(&rho, &w);
                value = value * rho;
            }
            let Some(inv) = value.inv() else { continue };
            h = &h * &factor_through(&(target.clone() * inv), &w);
            let p = &Poly::new(vec![GaussRat::one(), -w.inv().expect("nonzero")]) * &h;
            let f = (&p - &Poly::one())
                .exact_div(&Poly::monomial(GaussRat::one(), 1))
                .expect("p(0) = 1");
            let sym = PolyanalyticSymbol::new(vec![f, Poly::one()]).expect("nonempty");
            if single_simple_zero(&sym.tilde()) {
                return (sym, w);
            }
        }
    }

    /// First-order symbol `z̄ + f` with a single simple zero of `φ̃` in the
    /// closed disc: either planted with an integer exponent in `[-3, 3]` or
    /// drawn at random.
    pub fn first_order_index_zero(&mut self) -> PolyanalyticSymbol {
        if self.rng.gen_bool(0.5) {
            let lambda = loop {
                let l = self.rng.gen_range(-3..=3);
                if l != -1 {
                    break l;
                }
            };
            return self.planted_first_order(lambda).0;
        }
        loop {
            let f = self.poly(2);
            let sym = PolyanalyticSymbol::new(vec![f, Poly::one()]).expect("nonempty");
            if single_simple_zero(&sym.tilde()) {
                return sym;
            }
        }
    }
}

/// `1 + αz` with `1 + αw = ρ`.
fn factor_through(rho: &GaussRat, w: &GaussRat) -> QPoly {
    let alpha = (rho.clone() - GaussRat::one()) * w.inv().expect("nonzero");
    Poly::new(vec![GaussRat::one(), alpha])
}

fn roots_avoid_annulus(p: &QPoly, inner: f64, outer: f64) -> bool {
    if p.is_zero() {
        return false;
    }
    if p.degree() == Some(0) {
        return true;
    }
    match roots(p) {
        Ok(rs) => rs.iter().all(|r| {
            let m = r.approx().norm();
            m <= inner || m >= outer
        }),
        Err(_) => false,
    }
}

/// Exactly one zero in the closed disc, simple, with every other zero at
/// modulus at least 1.25.
fn single_simple_zero(p: &QPoly) -> bool {
    if !roots_avoid_annulus(p, 0.8, 1.25) {
        return false;
    }
    let Ok(rs) = roots(p) else { return false };
    let inside: Vec<_> = rs
        .iter()
        .filter(|r| r.location() != DiscLocation::Outside)
        .collect();
    inside.len() == 1 && inside[0].multiplicity == 1
}
