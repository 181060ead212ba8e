//! Differential operators `Σ c_k(z) D^k` with polynomial coefficients.
//!
//! Operators are kept in normal form (coefficients to the left of powers of
//! `D`). Composition moves `D` across a coefficient with `D g = g D + g'`.

use crate::scalarpoly::{Field, GaussRat, Poly};
use crate::symbol::PolyanalyticSymbol;

#[derive(Clone, PartialEq)]
pub struct DiffOp<F: Field> {
    coeffs: Vec<Poly<F>>,
}

impl<F: Field> DiffOp<F> {
    /// `Σ coeffs[k] D^k`; trailing zero coefficients are dropped.
    pub fn new(mut coeffs: Vec<Poly<F>>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        DiffOp { coeffs }
    }

    pub fn zero() -> Self {
        DiffOp { coeffs: Vec::new() }
    }

    pub fn identity() -> Self {
        DiffOp::mult(Poly::one())
    }

    /// `D = d/dz`.
    pub fn d() -> Self {
        DiffOp::new(vec![Poly::zero(), Poly::one()])
    }

    /// `D^k`.
    pub fn d_pow(k: usize) -> Self {
        let mut coeffs = vec![Poly::zero(); k + 1];
        coeffs[k] = Poly::one();
        DiffOp { coeffs }
    }

    /// Multiplication by `g`.
    pub fn mult(g: Poly<F>) -> Self {
        DiffOp::new(vec![g])
    }

    /// `zD + c`.
    pub fn euler(c: F) -> Self {
        DiffOp::new(vec![Poly::constant(c), Poly::x()])
    }

    pub fn coeffs(&self) -> &[Poly<F>] {
        &self.coeffs
    }

    /// Coefficient of `D^k`.
    pub fn coeff(&self, k: usize) -> Poly<F> {
        self.coeffs.get(k).cloned().unwrap_or_else(Poly::zero)
    }

    /// `None` for the zero operator.
    pub fn order(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        DiffOp::new((0..len).map(|k| &self.coeff(k) + &other.coeff(k)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let len = self.coeffs.len().max(other.coeffs.len());
        DiffOp::new((0..len).map(|k| &self.coeff(k) - &other.coeff(k)).collect())
    }

    pub fn scale(&self, c: &F) -> Self {
        DiffOp::new(self.coeffs.iter().map(|p| p.scale(c)).collect())
    }

    /// `g ∘ self` for a multiplication operator `g`.
    pub fn left_mult(&self, g: &Poly<F>) -> Self {
        DiffOp::new(self.coeffs.iter().map(|p| g * p).collect())
    }

    /// `D ∘ self`: `D ∘ b D^j = b D^{j+1} + b' D^j`.
    pub fn left_d(&self) -> Self {
        let mut out = vec![Poly::zero(); self.coeffs.len() + 1];
        for (j, b) in self.coeffs.iter().enumerate() {
            out[j + 1] = &out[j + 1] + b;
            out[j] = &out[j] + &b.derivative();
        }
        DiffOp::new(out)
    }

    /// Normal form of `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        let mut acc = DiffOp::zero();
        let mut d_k_other = other.clone();
        for (k, a) in self.coeffs.iter().enumerate() {
            if k > 0 {
                d_k_other = d_k_other.left_d();
            }
            if !a.is_zero() {
                acc = acc.add(&d_k_other.left_mult(a));
            }
        }
        acc
    }

    pub fn pow(&self, e: usize) -> Self {
        (0..e).fold(DiffOp::identity(), |acc, _| acc.compose(self))
    }

    /// `(c_n, c_{n-1})` for an operator of order `n >= 1`.
    pub fn leading_terms(&self) -> Option<(Poly<F>, Poly<F>)> {
        let n = self.order().filter(|&n| n >= 1)?;
        Some((self.coeff(n), self.coeff(n - 1)))
    }

    /// `Σ c_k f^{(k)}`.
    pub fn apply(&self, f: &Poly<F>) -> Poly<F> {
        let mut acc = Poly::zero();
        let mut deriv = f.clone();
        for c in &self.coeffs {
            if deriv.is_zero() {
                break;
            }
            acc = &acc + &(c * &deriv);
            deriv = deriv.derivative();
        }
        acc
    }

    pub fn map<G: Field>(&self, f: impl Fn(&F) -> G + Copy) -> DiffOp<G> {
        DiffOp::new(self.coeffs.iter().map(|p| p.map(f)).collect())
    }
}

impl<F: Field> std::fmt::Debug for DiffOp<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "({c:?})")?,
                1 => write!(f, "({c:?})D")?,
                _ => write!(f, "({c:?})D^{k}")?,
            }
        }
        Ok(())
    }
}

/// `Π_{k=lo}^{hi} (zD + k)`, the identity when `lo > hi`.
pub fn euler_product<F: Field>(lo: usize, hi: usize) -> DiffOp<F> {
    (lo..=hi).fold(DiffOp::identity(), |acc, k| {
        acc.compose(&DiffOp::euler(F::from_i64(k as i64)))
    })
}

/// `Λ = Π_{i=2}^{n+1} (zD + i)`.
pub fn build_lambda<F: Field>(n: usize) -> DiffOp<F> {
    euler_product(2, n + 1)
}

/// `D_φ = Σ_{i=0}^{n} Π_{k=i+2}^{n+1}(zD + k) ∘ D^i ∘ a_i` at the declared order.
pub fn build_dphi(sym: &PolyanalyticSymbol) -> DiffOp<GaussRat> {
    let n = sym.order();
    sym.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, a)| !a.is_zero())
        .fold(DiffOp::zero(), |acc, (i, a)| {
            let term = euler_product(i + 2, n + 1)
                .compose(&DiffOp::d_pow(i))
                .compose(&DiffOp::mult(a.clone()));
            acc.add(&term)
        })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalarpoly::{binomial, QPoly};
    use proptest::prelude::*;

    type Op = DiffOp<GaussRat>;

    fn q(n: i64, d: i64) -> GaussRat {
        GaussRat::ratio(n, d)
    }

    fn ints(cs: &[i64]) -> QPoly {
        Poly::from_ints(cs)
    }

    #[test]
    fn commutator_rule() {
        let g = ints(&[0, 0, 1]);
        let lhs = Op::d().compose(&Op::mult(g.clone()));
        assert_eq!(lhs, Op::new(vec![ints(&[0, 2]), g]));
        assert_eq!(
            lhs.sub(&Op::mult(ints(&[0, 0, 1])).compose(&Op::d())),
            Op::mult(ints(&[0, 2]))
        );
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(build_lambda::<GaussRat>(0), Op::identity());
        assert_eq!(
            build_lambda::<GaussRat>(1),
            Op::euler(GaussRat::from_i64(2))
        );
        let l2 = build_lambda::<GaussRat>(2);
        assert_eq!(
            l2,
            Op::new(vec![ints(&[6]), ints(&[0, 6]), ints(&[0, 0, 1])])
        );
        assert_eq!(l2.leading_terms(), Some((ints(&[0, 0, 1]), ints(&[0, 6]))));
        assert_eq!(l2.apply(&Poly::x()), ints(&[0, 12]));
        assert_eq!(
            Op::euler(GaussRat::from_i64(2)).apply(&Poly::one()),
            ints(&[2])
        );
        assert_eq!(Op::d().apply(&ints(&[0, 0, 0, 1])), ints(&[0, 0, 3]));
        assert_eq!(l2.compose(&Op::identity()), l2);
    }

    #[test]
    fn dphi_examples() {
        let zbar = PolyanalyticSymbol::zbar_power(1, GaussRat::one());
        assert_eq!(build_dphi(&zbar), Op::d());
        let a0 = ints(&[1, -3, 2]);
        assert_eq!(
            build_dphi(&PolyanalyticSymbol::holomorphic(a0.clone())),
            Op::mult(a0)
        );

        // z̄ + a + bz + cz²
        let (a, b, c) = (q(1, 3), q(-2, 5), q(1, 7));
        let f = Poly::new(vec![a, b.clone(), c.clone()]);
        let sym = PolyanalyticSymbol::new(vec![f.clone(), Poly::one()]).unwrap();
        let tilde = sym.tilde();
        let (c1, c0) = build_dphi(&sym).leading_terms().unwrap();
        assert_eq!(c1, tilde);
        let tilde_dz = Poly::new(vec![GaussRat::zero(), b, c * GaussRat::from_i64(2)]);
        assert_eq!(
            c0,
            &tilde.derivative().scale(&GaussRat::from_i64(2)) - &tilde_dz
        );
    }

    #[test]
    fn second_order_display() {
        let a0 = ints(&[2, -1, 3, 1]);
        // Constant a_1, a_2 as in a second-order harmonic symbol.
        let a1 = Poly::constant(q(1, 2));
        let a2 = ints(&[5]);
        let sym = PolyanalyticSymbol::new(vec![a0.clone(), a1, a2]).unwrap();
        let op = build_dphi(&sym);
        let tilde = sym.tilde();
        let z2: QPoly = ints(&[0, 0, 1]);
        assert_eq!(op.coeff(2), tilde);
        assert_eq!(
            op.coeff(1),
            &tilde.derivative().scale(&GaussRat::from_i64(3)) - &(&z2 * &a0.derivative())
        );
        let c0 = &(&(&z2 * &a0.nth_derivative(2)) + &(&ints(&[0, 6]) * &a0.derivative()))
            + &a0.scale(&GaussRat::from_i64(6));
        assert_eq!(op.coeff(0), c0);
    }

    #[test]
    fn euler_product_top_coefficients() {
        // Π (zD + b_k): z^m D^m + (m(m-1)/2 + Σ b_k) z^{m-1} D^{m-1} + ...
        for m in 1..=5usize {
            let bs: Vec<GaussRat> = (0..m).map(|k| q(2 * k as i64 - 3, k as i64 + 2)).collect();
            let p = bs
                .iter()
                .fold(Op::identity(), |acc, b| acc.compose(&Op::euler(b.clone())));
            let sum = bs
                .iter()
                .fold(GaussRat::from_i64((m * (m - 1) / 2) as i64), |s, b| {
                    s + b.clone()
                });
            assert_eq!(p.coeff(m), Poly::monomial(GaussRat::one(), m));
            assert_eq!(p.coeff(m - 1), Poly::monomial(sum, m - 1));
        }
    }

    #[test]
    fn d_power_times_linear_power() {
        let w = q(2, 5);
        for n in 0..=5usize {
            let lin = Poly::linear_root(&w);
            let lhs = Op::d_pow(n).compose(&Op::mult(lin.pow(n)));
            let mut rhs = Op::zero();
            for i in 0..=n {
                let c = GaussRat::from_i64(
                    (binomial(n, i) * binomial(n, i) * (1..=n - i).product::<usize>() as u128)
                        as i64,
                );
                rhs = rhs.add(&Op::d_pow(i).left_mult(&lin.pow(i).scale(&c)));
            }
            assert_eq!(lhs, rhs, "n = {n}");
        }
    }

    fn arb_op() -> impl Strategy<Value = Op> {
        prop::collection::vec(prop::collection::vec((-5i64..6, 1i64..4), 0..4), 1..5).prop_map(
            |rows| {
                Op::new(
                    rows.into_iter()
                        .map(|cs| {
                            Poly::new(cs.into_iter().map(|(a, b)| GaussRat::ratio(a, b)).collect())
                        })
                        .collect(),
                )
            },
        )
    }

    proptest! {
        #[test]
        fn composition_is_associative(a in arb_op(), b in arb_op(), c in arb_op()) {
            prop_assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
        }

        #[test]
        fn apply_respects_composition(a in arb_op(), b in arb_op(), f in prop::collection::vec(-9i64..10, 0..7)) {
            let f = ints(&f);
            prop_assert_eq!(a.compose(&b).apply(&f), a.apply(&b.apply(&f)));
        }
    }
}
