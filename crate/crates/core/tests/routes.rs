use proptest::prelude::*;
use toeplitz_core::criteria::{analyze, analyze_with_route, first_order_criterion, Route, Verdict};
use toeplitz_core::frobenius::indicial_data;
use toeplitz_core::gen::SymbolGen;
use toeplitz_core::scalarpoly::{laurent, Point};
use toeplitz_core::weyl::build_dphi;
use toeplitz_core::{Error, Field, GaussRat, Poly, PolyanalyticSymbol, QPoly};

/// Random symbol of order `1..=3` adjusted so that `φ̃` has a simple zero at
/// a rational point of the disc.
fn symbol_with_simple_zero(seed: u64) -> (PolyanalyticSymbol, GaussRat) {
    let mut g = SymbolGen::new(seed);
    loop {
        let n = 1 + (seed % 3) as usize;
        let sym = g.symbol(n, 3);
        let w = g.gauss(3, 5);
        if w.to_c64().norm() >= 0.95 {
            continue;
        }
        let mut coeffs = sym.coeffs().to_vec();
        coeffs[n] = &coeffs[n] - &Poly::constant(sym.tilde().eval(&w));
        let Ok(sym) = PolyanalyticSymbol::new(coeffs) else {
            continue;
        };
        if !sym.is_canonical() || sym.tilde().derivative().eval(&w).is_zero() {
            continue;
        }
        return (sym, w);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// At a simple zero the exponents are `0, 1, ..., n-2` and `res - 2`.
    #[test]
    fn simple_zero_exponents(seed in 0u64..1_000_000) {
        let (sym, w) = symbol_with_simple_zero(seed);
        let n = sym.order();
        let ind = indicial_data(&build_dphi(&sym), &Point::Exact(w.clone())).unwrap();
        prop_assert!(ind.regular);
        let res = laurent(&sym.dz_derivative().tilde(), &sym.tilde(), &w, -1).unwrap().residue();
        let expected = (0..n as i64 - 1)
            .fold(Poly::one(), |acc, j| &acc * &Poly::linear_root(&GaussRat::from_i64(j)))
            .clone();
        let expected: QPoly = &expected * &Poly::linear_root(&(res - GaussRat::from_i64(2)));
        let derived = ind.poly_exact.unwrap();
        prop_assert_eq!(derived.degree(), Some(n));
        let lead = derived.leading().unwrap().clone();
        prop_assert_eq!(derived.scale(&lead.inv().unwrap()), expected);
    }

    /// Reports are internally consistent and deterministic.
    #[test]
    fn report_sanity(seed in 0u64..1_000_000) {
        let mut g = SymbolGen::new(seed);
        let n = (seed % 4) as usize;
        let sym = g.symbol(n, 3);
        match analyze(&sym) {
            Ok(r) => {
                if let Some(k) = r.kernel_dim_exact {
                    prop_assert!(r.kernel_dim_lower <= k && k <= r.kernel_dim_upper);
                }
                prop_assert!(r.kernel_dim_upper <= n);
                if r.verdict == Verdict::Invertible {
                    prop_assert_eq!(r.index.winding, Some(0));
                }
                for d in r.per_zero_indicial.iter().filter(|d| d.regular) {
                    prop_assert_eq!(d.poly_approx.degree(), Some(n));
                }
                let json = r.to_json();
                let anchored = json["provenance"].as_array().unwrap().iter().all(|c| {
                    !c["anchor"].as_str().unwrap_or("").is_empty() && !c["rule"].as_str().unwrap_or("").is_empty()
                });
                prop_assert!(anchored, "claim without anchor");
                let again = analyze(&sym).unwrap().to_json();
                prop_assert_eq!(json.to_string(), again.to_string());
            }
            Err(e) => prop_assert!(!matches!(e, Error::InternalInconsistency(_)), "{e}"),
        }
    }
}

#[test]
fn first_order_routes_agree_including_closed_form() {
    let mut g = SymbolGen::new(42);
    for lambda in [-4, -3, -2, 0, 1, 2, 3] {
        let (sym, _) = g.planted_first_order(lambda);
        let fo = first_order_criterion(&sym.coeff(0)).unwrap();
        let kernel = usize::from(lambda >= 0);
        assert_eq!(fo.kernel_dim, kernel, "λ = {lambda}");
        for route in [
            Route::SimpleZero,
            Route::MultipleZero,
            Route::LocalExponents,
        ] {
            let r = analyze_with_route(&sym, route).unwrap();
            assert_eq!(
                (r.kernel_dim_exact, r.verdict),
                (Some(kernel), fo.verdict),
                "λ = {lambda}, {route:?}"
            );
        }
    }
}

#[test]
fn route_preconditions_are_enforced() {
    let zbar_minus_two =
        PolyanalyticSymbol::zbar_power(1, GaussRat::one()).shift_by_scalar(&GaussRat::from_i64(2));
    assert!(matches!(
        analyze_with_route(&zbar_minus_two, Route::ZeroFree),
        Err(Error::InvalidArgument(_))
    ));
    let zero_free =
        PolyanalyticSymbol::zbar_power(2, GaussRat::one()).shift_by_scalar(&GaussRat::ratio(-1, 2));
    assert!(matches!(
        analyze_with_route(&zero_free, Route::SimpleZero),
        Err(Error::InvalidArgument(_))
    ));
    assert!(matches!(
        analyze_with_route(&zero_free, Route::MultipleZero),
        Err(Error::InvalidArgument(_))
    ));
}

#[test]
fn multiple_zero_route_counts_kernel() {
    // φ = (z - 1/2)^2 ψ + (z̄ - 2)^2 with ψ(1/2)·(1/2)^4 = c: the corrected
    // indicial polynomial (λ+2)(λ+3) + c(λ² + 3λ + 2) = (λ+2)((1+c)λ + 3 + c)
    // has the root λ = -(3+c)/(1+c), which is 0 at c = -3 and 1 at c = -2.
    let w = GaussRat::ratio(1, 2);
    for (c, kernel) in [(-3, Some(1)), (-2, Some(1)), (5, Some(0))] {
        let psi = Poly::constant(GaussRat::from_i64(c * 16));
        let sym = PolyanalyticSymbol::zbar_binomial(&-w.inv().unwrap(), 2).add(
            &PolyanalyticSymbol::holomorphic(&Poly::linear_root(&w).pow(2) * &psi),
        );
        let r = analyze(&sym).unwrap();
        assert_eq!(r.route, Route::MultipleZero);
        if r.index.zeros_in_disc().count() == 1 {
            assert_eq!(r.kernel_dim_exact, kernel, "c = {c}");
        } else {
            assert!(r.kernel_dim_upper >= kernel.unwrap());
        }
    }
}
