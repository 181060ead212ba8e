//! Seeded exact identity suites behind `toeplitz selftest`.

use rand::Rng;

use crate::criteria::{analyze_with_route, first_order_criterion, Route};
use crate::gen::SymbolGen;
use crate::oracle::apply_toeplitz_poly;
use crate::scalarpoly::{binomial, Field, GaussRat, Poly, QPoly};
use crate::symbol::PolyanalyticSymbol;
use crate::weyl::{build_dphi, build_lambda, DiffOp};

#[derive(Clone, Debug, serde::Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub cases: usize,
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SelftestConfig {
    pub seed: u64,
    pub cases: usize,
    /// Perturbs `D_φ` by `1/1000` in the identity suite; the suite must fail.
    pub inject_fault: bool,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        SelftestConfig {
            seed: 1,
            cases: 50,
            inject_fault: false,
        }
    }
}

pub fn run_all(cfg: &SelftestConfig) -> Vec<SuiteResult> {
    vec![
        key_identity(cfg),
        leading_terms(cfg),
        dn_expansion(cfg),
        factorization(cfg),
        three_routes(cfg),
    ]
}

fn random_case(g: &mut SymbolGen) -> (PolyanalyticSymbol, QPoly) {
    let n = g.rng().gen_range(0..=4);
    (g.symbol(n, 4), g.poly(6))
}

/// `Λ(T_φ f) = D_φ f` on random symbols and polynomials.
pub fn key_identity(cfg: &SelftestConfig) -> SuiteResult {
    let mut g = SymbolGen::new(cfg.seed);
    let mut failures = Vec::new();
    for case in 0..cfg.cases {
        let (sym, f) = random_case(&mut g);
        let mut dphi = build_dphi(&sym);
        if cfg.inject_fault {
            let bump = DiffOp::mult(Poly::constant(GaussRat::ratio(1, 1000)));
            dphi = dphi.add(&bump);
        }
        let lhs = build_lambda::<GaussRat>(sym.order()).apply(&apply_toeplitz_poly(&sym, &f));
        if lhs != dphi.apply(&f) {
            failures.push(format!("case {case}: order {}", sym.order()));
        }
    }
    SuiteResult {
        name: "key-identity",
        cases: cfg.cases,
        failures,
    }
}

/// Top coefficients of `D_φ` are `φ̃` and `(n+1)φ̃' - tilde(∂φ/∂z)`.
pub fn leading_terms(cfg: &SelftestConfig) -> SuiteResult {
    let mut g = SymbolGen::new(cfg.seed);
    let mut failures = Vec::new();
    for case in 0..cfg.cases {
        let (sym, _) = random_case(&mut g);
        let n = sym.order();
        let dphi = build_dphi(&sym);
        let tilde = sym.tilde();
        let sub = &tilde.derivative().scale(&GaussRat::from_i64(n as i64 + 1))
            - &sym.dz_derivative().tilde();
        let ok = dphi.coeff(n) == tilde && (n == 0 || dphi.coeff(n - 1) == sub);
        if !ok {
            failures.push(format!("case {case}: order {n}"));
        }
    }
    SuiteResult {
        name: "leading-terms",
        cases: cfg.cases,
        failures,
    }
}

fn random_w(g: &mut SymbolGen) -> GaussRat {
    loop {
        let w = g.gauss(5, 7);
        if !w.is_zero() {
            return w;
        }
    }
}

/// `D^n (z-w)^n = Σ_i n!²/(i!²(n-i)!) (z-w)^i D^i`.
pub fn dn_expansion(cfg: &SelftestConfig) -> SuiteResult {
    let mut g = SymbolGen::new(cfg.seed);
    let mut failures = Vec::new();
    let mut cases = 0;
    for n in 0..=4 {
        for _ in 0..5 {
            cases += 1;
            let w = random_w(&mut g);
            let lin = Poly::linear_root(&w);
            let lhs = DiffOp::d_pow(n).compose(&DiffOp::mult(lin.pow(n)));
            let rhs = (0..=n).fold(DiffOp::zero(), |acc, i| {
                let c = binomial(n, i) * binomial(n, i) * (1..=(n - i) as u128).product::<u128>();
                acc.add(
                    &DiffOp::d_pow(i).left_mult(&lin.pow(i).scale(&GaussRat::from_i64(c as i64))),
                )
            });
            if lhs != rhs {
                failures.push(format!("n = {n}, w = {w}"));
            }
        }
    }
    SuiteResult {
        name: "dn-expansion",
        cases,
        failures,
    }
}

/// `Λ ∘ T_{(z̄ - 1/w)^n} = (-1/w)^n Π_{i=1}^n ((z-w)D + i + 1)`, both as
/// operators and applied to random polynomials.
pub fn factorization(cfg: &SelftestConfig) -> SuiteResult {
    let mut g = SymbolGen::new(cfg.seed);
    let mut failures = Vec::new();
    let mut cases = 0;
    for n in 1..=4 {
        for _ in 0..5 {
            cases += 1;
            let w = random_w(&mut g);
            let c = -w.inv().expect("nonzero");
            let sym = PolyanalyticSymbol::zbar_binomial(&c, n);
            let l = DiffOp::d()
                .left_mult(&Poly::linear_root(&w))
                .add(&DiffOp::mult(Poly::constant(GaussRat::from_i64(2))));
            let rhs = (1..=n)
                .fold(DiffOp::identity(), |acc, i| {
                    acc.compose(&l.add(&DiffOp::mult(Poly::constant(GaussRat::from_i64(
                        i as i64 - 1,
                    )))))
                })
                .scale(&c.pow(n as u32));
            let f = g.poly(6);
            let applied = build_lambda::<GaussRat>(n).apply(&apply_toeplitz_poly(&sym, &f));
            if build_dphi(&sym) != rhs || applied != rhs.apply(&f) {
                failures.push(format!("n = {n}, w = {w}"));
            }
        }
    }
    SuiteResult {
        name: "factorization",
        cases,
        failures,
    }
}

/// First-order criterion, simple-zero residue route and local-exponent route
/// agree on index-zero symbols with a single simple zero of `φ̃`.
pub fn three_routes(cfg: &SelftestConfig) -> SuiteResult {
    let mut g = SymbolGen::new(cfg.seed);
    let mut failures = Vec::new();
    for case in 0..cfg.cases {
        let sym = g.first_order_index_zero();
        let verdicts = (
            first_order_criterion(&sym.coeff(0)).map(|r| r.verdict),
            analyze_with_route(&sym, Route::SimpleZero).map(|r| r.verdict),
            analyze_with_route(&sym, Route::LocalExponents).map(|r| r.verdict),
        );
        match verdicts {
            (Ok(a), Ok(b), Ok(c)) if a == b && b == c => {}
            v => failures.push(format!("case {case}: {v:?}")),
        }
    }
    SuiteResult {
        name: "three-routes",
        cases: cfg.cases,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suites_pass_and_fault_is_caught() {
        let cfg = SelftestConfig {
            seed: 5,
            cases: 8,
            inject_fault: false,
        };
        for s in run_all(&cfg) {
            assert!(s.passed(), "{}: {:?}", s.name, s.failures);
        }
        let bad = key_identity(&SelftestConfig {
            inject_fault: true,
            ..cfg
        });
        assert_eq!(bad.failures.len(), bad.cases);
    }
}
