use proptest::prelude::*;
use toeplitz_core::criteria::{analyze, Verdict};
use toeplitz_core::gen::SymbolGen;
use toeplitz_core::oracle::{apply_toeplitz_poly, kernel_probe, section, truncate, Thresholds};
use toeplitz_core::{Field, GaussRat, Poly, PolyanalyticSymbol};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn toeplitz_action_is_linear(seed in 0u64..1_000_000, a in -6i64..7, b in -6i64..7) {
        let mut g = SymbolGen::new(seed);
        let (phi, chi) = (g.symbol(2, 3), g.symbol(2, 3));
        let (f, h) = (g.poly(6), g.poly(6));
        let (a, b) = (GaussRat::from_i64(a), GaussRat::ratio(b, 5));
        let combo = &f.scale(&a) + &h.scale(&b);
        prop_assert_eq!(
            apply_toeplitz_poly(&phi, &combo),
            &apply_toeplitz_poly(&phi, &f).scale(&a) + &apply_toeplitz_poly(&phi, &h).scale(&b)
        );
        let mixed = phi.scale(&a).add(&chi.scale(&b));
        prop_assert_eq!(
            apply_toeplitz_poly(&mixed, &f),
            &apply_toeplitz_poly(&phi, &f).scale(&a) + &apply_toeplitz_poly(&chi, &f).scale(&b)
        );
    }

    #[test]
    fn band_width_and_column_exactness(seed in 0u64..1_000_000, size in 4usize..40) {
        let mut g = SymbolGen::new(seed);
        let n = (seed % 4) as usize;
        let sym = g.symbol(n, 3);
        let t = truncate(&sym, size).unwrap();
        prop_assert!(t.band_width() <= sym.z_degree().max(n));
        let deg = sym.z_degree();
        for p in 0..size.saturating_sub(deg) {
            let image = apply_toeplitz_poly(&sym, &Poly::monomial(GaussRat::one(), p));
            for q in 0..size {
                let exact = image.coeff(q).to_c64() * ((p + 1) as f64 / (q + 1) as f64).sqrt();
                prop_assert!((t.entries[(q, p)] - exact).norm() <= 1e-12 * (1.0 + exact.norm()));
            }
            prop_assert!(image.degree().is_none_or(|d| d < size));
        }
    }
}

#[test]
fn sections_of_conjugate_powers_are_adjoint() {
    for k in 0..4 {
        let up = section(
            &PolyanalyticSymbol::holomorphic(Poly::monomial(GaussRat::one(), k)),
            48,
            48,
        );
        let down = section(&PolyanalyticSymbol::zbar_power(k, GaussRat::one()), 48, 48);
        assert!((up.adjoint() - down).norm() < 1e-13);
    }
}

/// Every exact kernel count is matched by the number of decaying singular
/// values, every Invertible verdict by a stable smallest singular value.
#[test]
fn verdicts_agree_with_the_oracle() {
    let mut g = SymbolGen::new(2024);
    let th = Thresholds::default();
    let sizes = [32, 64, 128, 256];
    let (mut checked, mut ambiguous) = (0, Vec::new());
    let mut disagreements = Vec::new();
    while checked < 60 {
        let sym = g.symbol_away_from_circle(3, 2, 0.8, 1.25);
        let Ok(r) = analyze(&sym) else { continue };
        let Some(k) = r.kernel_dim_exact else {
            continue;
        };
        checked += 1;
        let coker = (k as i64 - r.fredholm_index().unwrap()) as usize;
        match kernel_probe(&sym, &sizes, &th) {
            Ok(p) => {
                let stable = r.verdict != Verdict::Invertible || p.kernel.min_spread() < 0.25;
                if p.kernel_dim != k || p.cokernel_dim != coker || !stable {
                    disagreements.push(format!(
                        "{:?}: exact {k}/{coker}, oracle {}/{} spread {:.3}",
                        sym.to_json_value().to_string(),
                        p.kernel_dim,
                        p.cokernel_dim,
                        p.kernel.min_spread()
                    ));
                }
            }
            Err(e) => ambiguous.push(e.to_string()),
        }
    }
    assert!(disagreements.is_empty(), "{disagreements:#?}");
    assert!(
        ambiguous.len() * 10 <= checked,
        "{} of {checked} ambiguous: {ambiguous:#?}",
        ambiguous.len()
    );
}
