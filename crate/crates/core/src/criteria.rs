//! Kernel, cokernel and invertibility verdicts for `T_φ`.
//!
//! The analysis combines the Fredholm index with local exponent data of
//! `D_φ y = 0` at the zeros of `φ̃`. Kernel elements of `T_φ` are exactly the
//! solutions of `D_φ y = 0` that are holomorphic on the disc, so each zero in
//! `D` caps the kernel by its number of holomorphic local solutions, while
//! `dim ker - dim coker = index` gives a lower bound.
//!
//! Routes, tried in order:
//! * not Fredholm: a zero of `φ̃` on (or numerically at) the circle;
//! * zero-free: no zero in the closed disc, kernel of dimension `n`, onto;
//! * simple zero: a single simple zero in `D`, decided by a residue;
//! * multiple zero: `φ = κ((z-w)^n ψ + (z̄ - 1/w)^n)`, decided by a closed-form
//!   indicial polynomial at `w`;
//! * local exponents: bounds from every zero, exact when they meet.

use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::frobenius::{holomorphic_solution_dim, indicial_data, integer_roots, IndicialData};
use crate::oracle::{kernel_probe, ProbeReport, Thresholds};
use crate::scalarpoly::{
    binomial, falling_factorial, laurent_at, rational_string, residue_equals, DiscLocation, Field,
    GaussRat, Point, Poly, QPoly, Root,
};
use crate::symbol::{index_data, IndexData, PolyanalyticSymbol};
use crate::weyl::{build_dphi, DiffOp};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Verdict {
    Invertible,
    NotInvertible,
    NotFredholm,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    NotFredholm,
    Multiplication,
    ZeroFree,
    SimpleZero,
    MultipleZero,
    LocalExponents,
}

/// One claim of a report with the rule that produced it.
#[derive(Clone, Debug, PartialEq, serde::Serialize)]
pub struct Claim {
    pub claim: String,
    pub rule: &'static str,
    pub anchor: &'static str,
}

mod anchors {
    pub const INDEX: &str = "index of T_φ equals minus the winding of φ on the unit circle";
    pub const ORDER_BOUND: &str =
        "kernel of T_φ is at most n-dimensional (solutions of the order-n equation D_φ y = 0)";
    pub const ZERO_FREE: &str =
        "φ̃ nowhere zero on the closed disc: T_φ onto with n-dimensional kernel";
    pub const SIMPLE_ZERO: &str =
        "single simple zero w of φ̃ in D: T_φ onto iff res_w(tilde(∂φ/∂z)/φ̃) ∉ Z≥n+1, then kernel (n-1)-dimensional";
    pub const MULTIPLE_ZERO: &str =
        "φ = (z-w)^n ψ + (z̄-1/w)^n: injective if the indicial equation at w has no roots in Z≥0";
    pub const MULTIPLE_ZERO_COUNT: &str =
        "w the only zero of φ̃ in the closed disc: kernel dimension equals the holomorphic solutions at w";
    pub const LOCAL: &str =
        "kernel elements are holomorphic solutions of D_φ y = 0 at every zero of φ̃ in D";
    pub const FIRST_ORDER: &str =
        "first order φ = z̄ + f: kernel nontrivial iff res_w((2f+zf')/(1+zf)) ∈ Z≤0 at every zero w in D";
    pub const FREDHOLM_ALTERNATIVE: &str = "dim coker = dim ker - index";
}

#[derive(Clone, Debug)]
pub struct AnalysisReport {
    pub order: usize,
    pub index: IndexData,
    pub kernel_dim_lower: usize,
    pub kernel_dim_upper: usize,
    pub kernel_dim_exact: Option<usize>,
    pub surjective: Option<bool>,
    pub verdict: Verdict,
    pub route: Route,
    pub per_zero_indicial: Vec<IndicialData>,
    pub provenance: Vec<Claim>,
    pub warnings: Vec<String>,
    /// `"exact"` or `"numeric-confidence"`.
    pub confidence: &'static str,
    pub oracle: Option<ProbeReport>,
}

impl AnalysisReport {
    fn new(ctx: &Context, route: Route) -> Self {
        let mut r = AnalysisReport {
            order: ctx.n,
            index: ctx.index.clone(),
            kernel_dim_lower: 0,
            kernel_dim_upper: ctx.n,
            kernel_dim_exact: None,
            surjective: None,
            verdict: Verdict::Inconclusive,
            route,
            per_zero_indicial: Vec::new(),
            provenance: Vec::new(),
            warnings: Vec::new(),
            confidence: "exact",
            oracle: None,
        };
        r.claim(
            format!("dim ker T_φ <= {}", ctx.n),
            "order-bound",
            anchors::ORDER_BOUND,
        );
        if let Some(ind) = ctx.index.fredholm_index {
            r.claim(
                format!(
                    "winding {} = {} zeros of φ̃ in D - n, index {}",
                    -ind,
                    ctx.index.zero_count_in_disc(),
                    ind
                ),
                "fredholm-index",
                anchors::INDEX,
            );
        }
        r
    }

    fn claim(&mut self, claim: String, rule: &'static str, anchor: &'static str) {
        self.provenance.push(Claim {
            claim,
            rule,
            anchor,
        });
    }

    pub fn fredholm_index(&self) -> Option<i64> {
        self.index.fredholm_index
    }

    /// Derives the surjectivity flag and verdict from the kernel data and the
    /// index, then checks the report invariants.
    fn settle(mut self) -> Result<Self> {
        let Some(index) = self.index.fredholm_index else {
            self.verdict = Verdict::NotFredholm;
            return Ok(self);
        };
        if let Some(k) = self.kernel_dim_exact {
            self.kernel_dim_lower = k;
            self.kernel_dim_upper = k;
        }
        let lower_from_index = index.max(0) as usize;
        if self.kernel_dim_lower < lower_from_index {
            self.kernel_dim_lower = lower_from_index;
            self.claim(
                format!("dim ker >= index = {index}"),
                "fredholm-alternative",
                anchors::FREDHOLM_ALTERNATIVE,
            );
        }
        if self.kernel_dim_lower > self.kernel_dim_upper || self.kernel_dim_upper > self.order {
            return Err(Error::InternalInconsistency(format!(
                "kernel bounds [{}, {}] with order {} and index {index}",
                self.kernel_dim_lower, self.kernel_dim_upper, self.order
            )));
        }
        if self.kernel_dim_exact.is_none() && self.kernel_dim_lower == self.kernel_dim_upper {
            self.kernel_dim_exact = Some(self.kernel_dim_lower);
            self.claim(
                format!("dim ker = {} (bounds meet)", self.kernel_dim_lower),
                "fredholm-alternative",
                anchors::FREDHOLM_ALTERNATIVE,
            );
        }
        let derived = match self.kernel_dim_exact {
            Some(k) => Some(k as i64 == index),
            None if self.kernel_dim_lower as i64 > index => Some(false),
            None => None,
        };
        match (self.surjective, derived) {
            (Some(a), Some(b)) if a != b => {
                return Err(Error::InternalInconsistency(format!(
                    "surjectivity {a} contradicts kernel {:?} and index {index}",
                    self.kernel_dim_exact
                )))
            }
            (None, d) => self.surjective = d,
            _ => {}
        }
        self.verdict = if index != 0 || self.kernel_dim_lower > 0 {
            Verdict::NotInvertible
        } else if self.kernel_dim_exact == Some(0) {
            Verdict::Invertible
        } else {
            Verdict::Inconclusive
        };
        Ok(self)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "order": self.order,
            "indexData": index_json(&self.index, self.order),
            "kernelDimLower": self.kernel_dim_lower,
            "kernelDimUpper": self.kernel_dim_upper,
            "kernelDimExact": self.kernel_dim_exact,
            "surjective": self.surjective,
            "verdict": self.verdict,
            "route": self.route,
            "perZeroIndicial": self.per_zero_indicial.iter().map(indicial_json).collect::<Vec<_>>(),
            "provenance": self.provenance,
            "warnings": self.warnings,
            "confidence": self.confidence,
            "oracle": self.oracle,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let opt = |v: Option<String>| v.unwrap_or_else(|| "undetermined".into());
        out.push_str(&format!(
            "verdict: {:?} (route {:?}, {})\n",
            self.verdict, self.route, self.confidence
        ));
        out.push_str(&format!(
            "winding: {}, index: {}\n",
            opt(self.index.winding.map(|w| w.to_string())),
            opt(self.index.fredholm_index.map(|w| w.to_string()))
        ));
        out.push_str(&format!(
            "kernel dimension: {} (bounds {}..={})\n",
            opt(self.kernel_dim_exact.map(|k| k.to_string())),
            self.kernel_dim_lower,
            self.kernel_dim_upper
        ));
        out.push_str(&format!(
            "surjective: {}\n",
            opt(self.surjective.map(|s| s.to_string()))
        ));
        for z in self.index.tilde_zeros.iter() {
            out.push_str(&format!(
                "zero of φ̃: {} (multiplicity {}, {:?})\n",
                fmt_c(z.approx()),
                z.multiplicity,
                z.location()
            ));
        }
        for d in &self.per_zero_indicial {
            out.push_str(&format!(
                "  at {}: regular {}, nonnegative integer exponents {:?}\n",
                fmt_c(d.point.approx()),
                d.regular,
                d.nonneg_integer_roots
            ));
        }
        for c in &self.provenance {
            out.push_str(&format!("claim [{}]: {}\n", c.rule, c.claim));
        }
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        if let Some(o) = &self.oracle {
            out.push_str(&format!(
                "oracle ({}): kernel {} cokernel {}\n",
                o.confidence, o.kernel_dim, o.cokernel_dim
            ));
        }
        out
    }
}

fn fmt_c(z: Complex64) -> String {
    format!("{:.12}{:+.12}i", z.re, z.im)
}

fn complex_json(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn point_json(p: &Point) -> Value {
    match p {
        Point::Exact(w) => json!({
            "exact": [rational_string(&w.re), rational_string(&w.im)],
            "approx": complex_json(w.to_c64()),
        }),
        Point::Algebraic(a) => json!({
            "approx": complex_json(a.approx),
            "minimalFactor": a.factor.coeffs().iter()
                .map(|c| json!([rational_string(&c.re), rational_string(&c.im)]))
                .collect::<Vec<_>>(),
        }),
    }
}

fn root_json(r: &Root) -> Value {
    json!({ "point": point_json(&r.point), "multiplicity": r.multiplicity, "location": r.location() })
}

fn index_json(d: &IndexData, n: usize) -> Value {
    json!({
        "winding": d.winding,
        "sampledWinding": d.sampled_winding,
        "fredholmIndex": d.fredholm_index,
        "declaredOrder": n,
        "tildeZeros": d.tilde_zeros.iter().map(root_json).collect::<Vec<_>>(),
        "tildeZerosInDisc": d.zeros_in_disc().map(root_json).collect::<Vec<_>>(),
        "boundaryZeroFlag": d.boundary_zero,
        "tildeIdenticallyZero": d.tilde_identically_zero,
    })
}

fn indicial_json(d: &IndicialData) -> Value {
    let poly = match &d.poly_exact {
        Some(p) => json!(p
            .coeffs()
            .iter()
            .map(|c| json!([rational_string(&c.re), rational_string(&c.im)]))
            .collect::<Vec<_>>()),
        None => json!(d
            .poly_approx
            .coeffs()
            .iter()
            .map(|c| complex_json(*c))
            .collect::<Vec<_>>()),
    };
    json!({
        "point": point_json(&d.point),
        "regular": d.regular,
        "leadingOrder": d.leading_order,
        "indicialPoly": poly,
        "allRoots": d.all_roots.iter().map(|z| complex_json(*z)).collect::<Vec<_>>(),
        "nonnegIntegerRoots": d.nonneg_integer_roots,
        "distinctNonnegCount": d.distinct_nonneg_count,
        "exactDecision": d.exact,
    })
}

/// Shared inputs of the routes.
pub struct Context<'a> {
    pub sym: &'a PolyanalyticSymbol,
    pub n: usize,
    pub index: IndexData,
    pub dphi: DiffOp<GaussRat>,
}

impl<'a> Context<'a> {
    pub fn new(sym: &'a PolyanalyticSymbol) -> Result<Self> {
        sym.validate_canonical()?;
        let index = index_data(sym)?;
        Ok(Context {
            sym,
            n: sym.order(),
            index,
            dphi: build_dphi(sym),
        })
    }

    fn zeros_in_disc(&self) -> Vec<&Root> {
        self.index.zeros_in_disc().collect()
    }

    fn zeros_in_closed_disc(&self) -> usize {
        self.index
            .tilde_zeros
            .iter()
            .filter(|r| r.location() != DiscLocation::Outside)
            .count()
    }
}

/// Full analysis with automatic route selection.
pub fn analyze(sym: &PolyanalyticSymbol) -> Result<AnalysisReport> {
    let ctx = Context::new(sym)?;
    let report = if !ctx.index.is_fredholm() {
        route_not_fredholm(&ctx)
    } else if ctx.n == 0 {
        route_multiplication(&ctx)?
    } else if ctx.zeros_in_closed_disc() == 0 {
        route_zero_free(&ctx)?
    } else if ctx.index.zero_count_in_disc() == 1 {
        route_simple_zero(&ctx)?
    } else if let Some(pattern) = (ctx.n >= 2).then(|| detect_multiple_zero(sym)).flatten() {
        route_multiple_zero(&ctx, &pattern)?
    } else {
        route_local_exponents(&ctx)?
    };
    if ctx.n == 1 && report.verdict != Verdict::NotFredholm {
        check_first_order_agreement(sym, &report)?;
    }
    Ok(report)
}

/// Analysis with a forced route; `InvalidArgument` if the route's hypotheses fail.
pub fn analyze_with_route(sym: &PolyanalyticSymbol, route: Route) -> Result<AnalysisReport> {
    let ctx = Context::new(sym)?;
    if route != Route::NotFredholm && !ctx.index.is_fredholm() {
        return Err(Error::InvalidArgument("symbol is not Fredholm".into()));
    }
    match route {
        Route::NotFredholm => Ok(route_not_fredholm(&ctx)),
        Route::Multiplication if ctx.n == 0 => route_multiplication(&ctx),
        Route::ZeroFree if ctx.zeros_in_closed_disc() == 0 => route_zero_free(&ctx),
        Route::SimpleZero if ctx.n >= 1 && ctx.index.zero_count_in_disc() == 1 => {
            route_simple_zero(&ctx)
        }
        Route::MultipleZero => match detect_multiple_zero(sym).or_else(|| first_order_form(&ctx)) {
            Some(p) => route_multiple_zero(&ctx, &p),
            None => Err(Error::InvalidArgument(
                "symbol does not have the multiple-zero form".into(),
            )),
        },
        Route::LocalExponents => route_local_exponents(&ctx),
        _ => Err(Error::InvalidArgument(format!(
            "route {route:?} does not apply"
        ))),
    }
}

fn route_not_fredholm(ctx: &Context) -> AnalysisReport {
    let mut r = AnalysisReport::new(ctx, Route::NotFredholm);
    if ctx.index.tilde_identically_zero {
        r.warnings
            .push("φ̃ vanishes identically: φ vanishes on the whole circle".into());
    } else {
        r.warnings.push(
            "a zero of φ̃ lies on the unit circle or within 1e-9 of it; T_φ may not be Fredholm"
                .into(),
        );
    }
    r.claim(
        "φ vanishes on the unit circle: no Fredholm index".into(),
        "not-fredholm",
        anchors::INDEX,
    );
    r.verdict = Verdict::NotFredholm;
    r
}

fn route_zero_free(ctx: &Context) -> Result<AnalysisReport> {
    let mut r = AnalysisReport::new(ctx, Route::ZeroFree);
    r.kernel_dim_exact = Some(ctx.n);
    r.surjective = Some(true);
    r.claim(
        format!(
            "φ̃ has no zero on the closed disc: onto, dim ker = {}",
            ctx.n
        ),
        "zero-free",
        anchors::ZERO_FREE,
    );
    r.settle()
}

/// `n = 0`: multiplication by a holomorphic polynomial, injective, with
/// cokernel spanned by evaluations at its zeros in `D`.
fn route_multiplication(ctx: &Context) -> Result<AnalysisReport> {
    let mut r = AnalysisReport::new(ctx, Route::Multiplication);
    r.kernel_dim_exact = Some(0);
    r.claim(
        "multiplication by a nonzero holomorphic polynomial is injective".into(),
        "multiplication",
        anchors::ORDER_BOUND,
    );
    r.settle()
}

/// `res_w(tilde(∂φ/∂z) / φ̃)` as a float, with its exact integer value when it is one.
pub fn simple_zero_residue(
    sym: &PolyanalyticSymbol,
    point: &Point,
) -> Result<(Complex64, Option<i64>)> {
    let num = sym.dz_derivative().tilde();
    let den = sym.tilde();
    exact_integer_residue(&num, &den, point)
}

fn exact_integer_residue(
    num: &QPoly,
    den: &QPoly,
    point: &Point,
) -> Result<(Complex64, Option<i64>)> {
    let approx = laurent_at(num, den, point, -1)?.residue();
    if let Point::Exact(w) = point {
        let exact = crate::scalarpoly::laurent(num, den, w, -1)?.residue();
        return Ok((approx, exact.as_integer()));
    }
    let k = approx.re.round();
    if (approx - Complex64::new(k, 0.0)).norm() < 1e-3 * approx.norm().max(1.0)
        && residue_equals(num, den, point, &GaussRat::from_i64(k as i64))?
    {
        return Ok((approx, Some(k as i64)));
    }
    Ok((approx, None))
}

fn route_simple_zero(ctx: &Context) -> Result<AnalysisReport> {
    let n = ctx.n;
    let zero = ctx.zeros_in_disc()[0].clone();
    let mut r = AnalysisReport::new(ctx, Route::SimpleZero);
    let (res, int) = simple_zero_residue(ctx.sym, &zero.point)?;
    let obstructed = int.is_some_and(|k| k > n as i64);
    r.surjective = Some(!obstructed);
    r.kernel_dim_exact = Some(if obstructed { n } else { n - 1 });
    let res_text = match int {
        Some(k) => k.to_string(),
        None => fmt_c(res),
    };
    r.claim(
        format!(
            "residue {res_text} at the simple zero {} {} Z≥{}: {}",
            fmt_c(zero.approx()),
            if obstructed { "lies in" } else { "is not in" },
            n + 1,
            if obstructed { "not onto" } else { "onto" }
        ),
        "simple-zero-residue",
        anchors::SIMPLE_ZERO,
    );
    // Local exponents must be {0..n-2} ∪ {res - 2}.
    let ind = indicial_data(&ctx.dphi, &zero.point)?;
    let expected = n - 1 + usize::from(obstructed);
    if !ind.regular || ind.distinct_nonneg_count != expected {
        return Err(Error::InternalInconsistency(format!(
            "simple zero: residue route expects {expected} nonnegative exponents, indicial data gives {:?}",
            ind.nonneg_integer_roots
        )));
    }
    r.per_zero_indicial.push(ind);
    r.settle()
}

/// Parameters of `φ = κ((z-w)^n ψ + (z̄ - 1/w)^n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct MultipleZeroForm {
    pub kappa: GaussRat,
    pub w: GaussRat,
    pub psi: QPoly,
}

/// Recognizes the multiple-zero form for `n >= 2` (for `n = 1` every zero of
/// `φ̃` fits; see [`multiple_zero_form_at`]).
pub fn detect_multiple_zero(sym: &PolyanalyticSymbol) -> Option<MultipleZeroForm> {
    let n = sym.order();
    if n < 2 {
        return None;
    }
    let kappa = constant_of(&sym.coeff(n))?;
    let sub = constant_of(&sym.coeff(n - 1))?;
    if sub.is_zero() {
        return None;
    }
    let w = -(kappa.clone() * GaussRat::from_i64(n as i64)) * sub.inv()?;
    multiple_zero_form_at(sym, &w)
}

/// The multiple-zero form with a prescribed `w ∈ D∖{0}`, if the symbol has it.
pub fn multiple_zero_form_at(sym: &PolyanalyticSymbol, w: &GaussRat) -> Option<MultipleZeroForm> {
    let n = sym.order();
    if n == 0 || w.is_zero() || w.to_c64().norm() >= 1.0 {
        return None;
    }
    let kappa = constant_of(&sym.coeff(n))?;
    let c = -w.inv()?;
    for i in 1..=n {
        let expected =
            kappa.clone() * GaussRat::from_i64(binomial(n, i) as i64) * c.pow((n - i) as u32);
        if sym.coeff(i) != Poly::constant(expected) {
            return None;
        }
    }
    let rest = &sym.coeff(0) - &Poly::constant(kappa.clone() * c.pow(n as u32));
    let psi = rest
        .exact_div(&Poly::linear_root(w).pow(n))?
        .scale(&kappa.inv()?);
    Some(MultipleZeroForm {
        kappa,
        w: w.clone(),
        psi,
    })
}

/// For `n = 1` every rational zero of `φ̃` in `D` gives the form.
fn first_order_form(ctx: &Context) -> Option<MultipleZeroForm> {
    let zeros = ctx.zeros_in_disc();
    match (ctx.n, zeros.as_slice()) {
        (1, [z]) => multiple_zero_form_at(ctx.sym, z.point.exact()?),
        _ => None,
    }
}

fn constant_of(p: &QPoly) -> Option<GaussRat> {
    match p.degree() {
        None => Some(GaussRat::zero()),
        Some(0) => Some(p.coeff(0)),
        _ => None,
    }
}

/// `Π_{i=1}^n (λ+i+1) + ψ(w)(-w)^n w^n Σ_{i=0}^n n!²/(i!²(n-i)!) λ(λ-1)...(λ-i+1)`,
/// the indicial polynomial of the multiple-zero form at `w` up to a scalar.
pub fn multiple_zero_indicial(n: usize, w: &GaussRat, psi_w: &GaussRat) -> QPoly {
    let prod = (1..=n).fold(Poly::one(), |acc, i| {
        &acc * &Poly::from_ints(&[(i + 1) as i64, 1])
    });
    let coeff = psi_w.clone() * (-w.clone()).pow(n as u32) * w.pow(n as u32);
    &prod + &operator_identity_sum(n).scale(&coeff)
}

/// `Σ_{i=0}^n n!²/(i!²(n-i)!) λ(λ-1)...(λ-i+1)`.
pub fn operator_identity_sum(n: usize) -> QPoly {
    (0..=n).fold(Poly::zero(), |acc, i| {
        let c = binomial(n, i) * binomial(n, i) * (1..=(n - i) as u128).product::<u128>();
        &acc + &falling_factorial::<GaussRat>(i).scale(&GaussRat::from_i64(c as i64))
    })
}

/// Whether `a = c·b` for a nonzero scalar `c`.
pub fn proportional(a: &QPoly, b: &QPoly) -> bool {
    match (a.leading(), b.leading()) {
        (Some(la), Some(lb)) if a.degree() == b.degree() => {
            let c = la.clone() * lb.inv().expect("nonzero");
            *a == b.scale(&c)
        }
        (None, None) => true,
        _ => false,
    }
}

fn route_multiple_zero(ctx: &Context, form: &MultipleZeroForm) -> Result<AnalysisReport> {
    let n = ctx.n;
    let mut r = AnalysisReport::new(ctx, Route::MultipleZero);
    let point = Point::Exact(form.w.clone());
    let ind = indicial_data(&ctx.dphi, &point)?;
    let psi_w = form.psi.eval(&form.w);
    if ind.regular && ind.leading_order == n {
        let closed = multiple_zero_indicial(n, &form.w, &psi_w);
        let derived = ind.poly_exact.as_ref().expect("exact point");
        if !proportional(derived, &closed) {
            return Err(Error::InternalInconsistency(format!(
                "indicial polynomial {derived:?} at w is not proportional to the closed form {closed:?}"
            )));
        }
    }
    let exponents = if ind.regular {
        ind.nonneg_integer_roots.clone()
    } else {
        return Err(Error::InternalInconsistency(
            "multiple-zero form gave an irregular point".into(),
        ));
    };
    let local = holomorphic_solution_dim(&ctx.dphi, &form.w)?;
    if local != exponents.len() {
        r.warnings.push(format!(
            "{} nonnegative integer exponents at w but only {local} holomorphic solutions (log obstruction)",
            exponents.len()
        ));
    }
    let only_zero = ctx.zeros_in_closed_disc() == 1;
    if exponents.is_empty() {
        r.kernel_dim_exact = Some(0);
        r.claim(
            format!(
                "indicial equation at w = {} has no roots in Z≥0: injective",
                form.w
            ),
            "multiple-zero-indicial",
            anchors::MULTIPLE_ZERO,
        );
    } else if only_zero {
        r.kernel_dim_exact = Some(local);
        r.claim(
            format!(
                "w = {} is the only zero of φ̃ in the closed disc; exponents {exponents:?} give dim ker = {local}",
                form.w
            ),
            "multiple-zero-count",
            anchors::MULTIPLE_ZERO_COUNT,
        );
    } else {
        r.kernel_dim_upper = r.kernel_dim_upper.min(local);
        r.claim(
            format!("dim ker <= {local} holomorphic solutions at w = {}", form.w),
            "local-exponents",
            anchors::LOCAL,
        );
    }
    r.per_zero_indicial.push(ind);
    r.settle()
}

/// Holomorphic local solutions at a zero: exact via the recurrence at exact
/// points, the distinct nonnegative integer exponent count otherwise.
fn local_bound(ctx: &Context, ind: &IndicialData) -> Result<(usize, bool)> {
    if !ind.regular {
        return Ok((ctx.n, false));
    }
    match &ind.point {
        Point::Exact(w) => Ok((holomorphic_solution_dim(&ctx.dphi, w)?, true)),
        Point::Algebraic(_) => Ok((ind.distinct_nonneg_count, ind.distinct_nonneg_count == 0)),
    }
}

fn route_local_exponents(ctx: &Context) -> Result<AnalysisReport> {
    let n = ctx.n;
    let mut r = AnalysisReport::new(ctx, Route::LocalExponents);
    let zeros = ctx.zeros_in_disc();
    let mut upper = n;
    let mut all_exact = true;
    let mut all_regular = true;
    for z in &zeros {
        let ind = indicial_data(&ctx.dphi, &z.point)?;
        if !ind.regular {
            all_regular = false;
            r.warnings.push(format!(
                "irregular singular point at {}; no local bound used",
                fmt_c(z.approx())
            ));
        }
        let (bound, exact) = local_bound(ctx, &ind)?;
        all_exact &= exact;
        upper = upper.min(bound);
        r.per_zero_indicial.push(ind);
    }
    if n == 1 && !all_regular {
        let (c1, c0) = ctx.dphi.leading_terms().expect("order 1");
        let fo = first_order_kernel(&c1, &c0, &ctx.index)?;
        r.warnings.clear();
        r.kernel_dim_exact = Some(fo.kernel_dim);
        r.claim(
            format!(
                "first-order equation: holomorphic solution on D {}",
                if fo.kernel_dim == 1 {
                    "exists"
                } else {
                    "does not exist"
                }
            ),
            "first-order-residue",
            anchors::FIRST_ORDER,
        );
        return r.settle();
    }
    r.kernel_dim_upper = upper;
    r.claim(
        format!("dim ker <= {upper} from local exponents at the zeros in D"),
        "local-exponents",
        anchors::LOCAL,
    );
    // A first-order solution is single-valued off the zeros, so local
    // holomorphy at every zero is global.
    if n == 1 || (zeros.len() == 1 && all_exact && ctx.zeros_in_closed_disc() == 1) {
        r.kernel_dim_exact = Some(upper);
        r.claim(
            format!("dim ker = {upper} holomorphic solutions at every zero in D"),
            "local-exponents",
            anchors::LOCAL,
        );
    }
    let mut r = r.settle()?;
    if r.verdict == Verdict::Inconclusive {
        r.warnings.push(
            "local exponent bounds do not determine the kernel; compare with the oracle".into(),
        );
    }
    Ok(r)
}

/// Kernel data of a first-order operator `c1 D + c0` from the residues of
/// `c0/c1` at the zeros of `c1` in `D`.
#[derive(Clone, Debug)]
pub struct FirstOrderAnalysis {
    pub kernel_dim: usize,
    pub index: Option<i64>,
    pub surjective: Option<bool>,
    pub verdict: Verdict,
    pub zeros: Vec<FirstOrderZero>,
}

#[derive(Clone, Debug)]
pub struct FirstOrderZero {
    pub point: Complex64,
    /// Pole order of `c0/c1` (nonpositive when regular there).
    pub pole_order: i64,
    pub residue: Option<Complex64>,
    pub residue_integer: Option<i64>,
    pub holomorphic: bool,
}

fn first_order_kernel(c1: &QPoly, c0: &QPoly, index: &IndexData) -> Result<FirstOrderAnalysis> {
    let mut zeros = Vec::new();
    for z in index.zeros_in_disc() {
        let ord1 = z.point.order_of_vanishing(c1).expect("c1 nonzero") as i64;
        let ord0 = z
            .point
            .order_of_vanishing(c0)
            .map_or(i64::MAX, |o| o as i64);
        let pole = if ord0 == i64::MAX {
            i64::MIN
        } else {
            ord1 - ord0
        };
        let (residue, residue_integer, holomorphic) = if pole <= 0 {
            (None, None, true)
        } else if pole == 1 {
            let (res, int) = exact_integer_residue(c0, c1, &z.point)?;
            (Some(res), int, int.is_some_and(|k| k <= 0))
        } else {
            (None, None, false)
        };
        zeros.push(FirstOrderZero {
            point: z.approx(),
            pole_order: pole,
            residue,
            residue_integer,
            holomorphic,
        });
    }
    let kernel_dim = usize::from(zeros.iter().all(|z| z.holomorphic));
    let idx = index.fredholm_index;
    let surjective = idx.map(|i| kernel_dim as i64 == i);
    let verdict = match idx {
        None => Verdict::NotFredholm,
        Some(0) if kernel_dim == 0 => Verdict::Invertible,
        Some(_) => Verdict::NotInvertible,
    };
    Ok(FirstOrderAnalysis {
        kernel_dim,
        index: idx,
        surjective,
        verdict,
        zeros,
    })
}

/// Criterion for `φ = z̄ + f`: with `1 + zf` and `2f + zf'`, the kernel is
/// one-dimensional iff at every zero `w` of `1 + zf` in `D` the residue of
/// `(2f + zf')/(1 + zf)` is an integer `<= 0` (or the quotient is regular).
pub fn first_order_criterion(f: &QPoly) -> Result<FirstOrderAnalysis> {
    let sym = PolyanalyticSymbol::new(vec![f.clone(), Poly::one()])?;
    let c1 = &Poly::one() + &f.shift_up(1);
    let c0 = &f.scale(&GaussRat::from_i64(2)) + &f.derivative().shift_up(1);
    let index = index_data(&sym)?;
    if !index.is_fredholm() {
        return Ok(FirstOrderAnalysis {
            kernel_dim: 0,
            index: None,
            surjective: None,
            verdict: Verdict::NotFredholm,
            zeros: Vec::new(),
        });
    }
    first_order_kernel(&c1, &c0, &index)
}

/// For `n = 1` symbols `κ z̄ + a_0` the first-order criterion must agree with
/// the route that produced `report`.
fn check_first_order_agreement(sym: &PolyanalyticSymbol, report: &AnalysisReport) -> Result<()> {
    let Some(kappa) = constant_of(&sym.coeff(1)).filter(|k| !k.is_zero()) else {
        return Ok(());
    };
    let f = sym.coeff(0).scale(&kappa.inv().expect("nonzero"));
    let fo = first_order_criterion(&f)?;
    if Some(fo.kernel_dim) != report.kernel_dim_exact || fo.verdict != report.verdict {
        return Err(Error::InternalInconsistency(format!(
            "first-order criterion gives kernel {} ({:?}), route {:?} gives {:?} ({:?})",
            fo.kernel_dim, fo.verdict, report.route, report.kernel_dim_exact, report.verdict
        )));
    }
    Ok(())
}

/// Runs the finite-section oracle and records any disagreement as a warning.
pub fn attach_oracle(
    report: &mut AnalysisReport,
    sym: &PolyanalyticSymbol,
    sizes: &[usize],
    th: &Thresholds,
) {
    match kernel_probe(sym, sizes, th) {
        Ok(probe) => {
            if let Some(k) = report.kernel_dim_exact {
                if probe.kernel_dim != k {
                    report.warnings.push(format!(
                        "oracle disagreement (flagged for review): kernel {} vs exact {k}",
                        probe.kernel_dim
                    ));
                }
                if let Some(i) = report.fredholm_index() {
                    let coker = k as i64 - i;
                    if probe.cokernel_dim as i64 != coker {
                        report.warnings.push(format!(
                            "oracle disagreement (flagged for review): cokernel {} vs exact {coker}",
                            probe.cokernel_dim
                        ));
                    }
                }
            } else if probe.kernel_dim < report.kernel_dim_lower
                || probe.kernel_dim > report.kernel_dim_upper
            {
                report.warnings.push(format!(
                    "oracle kernel estimate {} outside the proven bounds [{}, {}]",
                    probe.kernel_dim, report.kernel_dim_lower, report.kernel_dim_upper
                ));
            }
            report.oracle = Some(probe);
        }
        Err(e) => report.warnings.push(format!("oracle: {e}")),
    }
}

/// One grid point of a spectrum probe.
#[derive(Clone, Debug)]
pub struct SpectrumPoint {
    pub mu: GaussRat,
    pub verdict: Verdict,
    pub warnings: Vec<String>,
}

/// Verdict for `T_{φ - μ}` at each grid point.
pub fn spectrum_probe(sym: &PolyanalyticSymbol, grid: &[GaussRat]) -> Vec<SpectrumPoint> {
    grid.par_iter()
        .map(|mu| match analyze(&sym.shift_by_scalar(mu)) {
            Ok(r) => SpectrumPoint {
                mu: mu.clone(),
                verdict: r.verdict,
                warnings: r.warnings,
            },
            Err(e) => SpectrumPoint {
                mu: mu.clone(),
                verdict: Verdict::Inconclusive,
                warnings: vec![e.to_string()],
            },
        })
        .collect()
}

/// `a z^n (z - w)^m + (z̄ - 1/w)^m`.
pub fn threshold_family_symbol(
    a: &GaussRat,
    w: &GaussRat,
    n: usize,
    m: usize,
) -> Result<PolyanalyticSymbol> {
    if w.is_zero() {
        return Err(Error::WZeroExcluded);
    }
    if w.to_c64().norm() >= 1.0 {
        return Err(Error::InvalidArgument(format!(
            "w = {w} must lie in the open unit disc"
        )));
    }
    if n == 0 || m == 0 {
        return Err(Error::InvalidArgument("n and m must be at least 1".into()));
    }
    let hol = &Poly::monomial(a.clone(), n) * &Poly::linear_root(w).pow(m);
    Ok(
        PolyanalyticSymbol::zbar_binomial(&-w.inv().expect("nonzero"), m)
            .add(&PolyanalyticSymbol::holomorphic(hol)),
    )
}

/// Analysis of [`threshold_family_symbol`]. Here `φ̃ = (z-w)^m (-1/w)^m (1 + a(-w)^m z^{n+m})`,
/// so the index vanishes iff `|a||w|^m < 1`.
pub fn threshold_family(a: &GaussRat, w: &GaussRat, n: usize, m: usize) -> Result<AnalysisReport> {
    let sym = threshold_family_symbol(a, w, n, m)?;
    let mut r = analyze(&sym)?;
    let scale = a.to_c64().norm() * w.to_c64().norm().powi(m as i32);
    r.provenance.push(Claim {
        claim: format!(
            "|a||w|^m = {scale:.6}: bracket 1 + a(-w)^m z^(n+m) has {} zeros in D",
            if scale < 1.0 { "no" } else { "n+m" }
        ),
        rule: "threshold-bracket",
        anchor: anchors::INDEX,
    });
    Ok(r)
}

/// Integer roots `>= 0` of the multiple-zero closed form (exposed for tests).
pub fn closed_form_nonneg_roots(n: usize, w: &GaussRat, psi_w: &GaussRat) -> Vec<i64> {
    integer_roots(&multiple_zero_indicial(n, w, psi_w), 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> GaussRat {
        GaussRat::ratio(n, d)
    }

    fn zbar_power_plus(n: usize, c: GaussRat) -> PolyanalyticSymbol {
        PolyanalyticSymbol::zbar_power(n, GaussRat::one()).shift_by_scalar(&-c)
    }

    #[test]
    fn zero_free_symbols() {
        for n in 1..=3 {
            let r = analyze(&zbar_power_plus(n, q(1, 2))).unwrap();
            assert_eq!(r.route, Route::ZeroFree);
            assert_eq!(r.fredholm_index(), Some(n as i64));
            assert_eq!(r.kernel_dim_exact, Some(n));
            assert_eq!(r.surjective, Some(true));
            assert_eq!(r.verdict, Verdict::NotInvertible);
        }
        let r = analyze(&PolyanalyticSymbol::holomorphic(Poly::from_ints(&[3, 1]))).unwrap();
        assert_eq!(r.verdict, Verdict::Invertible);
        let r = analyze(&PolyanalyticSymbol::holomorphic(Poly::from_ints(&[1, 3]))).unwrap();
        assert_eq!(
            (r.verdict, r.kernel_dim_exact, r.surjective),
            (Verdict::NotInvertible, Some(0), Some(false))
        );
    }

    #[test]
    fn zbar_minus_two_is_invertible() {
        let r = analyze(&zbar_power_plus(1, q(-2, 1))).unwrap();
        assert_eq!(r.route, Route::SimpleZero);
        assert_eq!(r.fredholm_index(), Some(0));
        assert_eq!(r.kernel_dim_exact, Some(0));
        assert_eq!(r.surjective, Some(true));
        assert_eq!(r.verdict, Verdict::Invertible);
        let fo = first_order_criterion(&Poly::from_ints(&[-2])).unwrap();
        assert_eq!(fo.zeros[0].residue_integer, Some(2));
        assert_eq!(fo.verdict, Verdict::Invertible);
    }

    #[test]
    fn zbar_is_not_invertible() {
        let fo = first_order_criterion(&Poly::zero()).unwrap();
        assert_eq!(
            (fo.kernel_dim, fo.index, fo.verdict),
            (1, Some(1), Verdict::NotInvertible)
        );
        let r = analyze(&PolyanalyticSymbol::zbar_power(1, GaussRat::one())).unwrap();
        assert_eq!(r.verdict, Verdict::NotInvertible);
    }

    #[test]
    fn first_order_zero_classification() {
        // 1 + zf = (6z - 1)(3z - 1) and 2f + zf' = 18(3z - 1).
        let f = &Poly::constant(q(-3, 1)) + &Poly::linear_root(&q(1, 3)).scale(&q(18, 1));
        let fo = first_order_criterion(&f).unwrap();
        assert_eq!(fo.index, Some(-1));
        let mut zs = fo.zeros.clone();
        zs.sort_by(|a, b| a.point.re.total_cmp(&b.point.re));
        assert_eq!(
            (zs[0].pole_order, zs[0].residue_integer, zs[0].holomorphic),
            (1, Some(3), false)
        );
        assert!(zs[1].pole_order <= 0 && zs[1].holomorphic);
        assert_eq!((fo.kernel_dim, fo.verdict), (0, Verdict::NotInvertible));
        let r = analyze(&PolyanalyticSymbol::new(vec![f, Poly::one()]).unwrap()).unwrap();
        assert_eq!(
            (r.kernel_dim_exact, r.surjective, r.verdict),
            (Some(0), Some(false), Verdict::NotInvertible)
        );
    }

    #[test]
    fn planted_exponent_decides_the_kernel() {
        let mut g = crate::gen::SymbolGen::new(11);
        for lambda in [-3, -2, 0, 1, 2] {
            let (sym, _) = g.planted_first_order(lambda);
            let r = analyze(&sym).unwrap();
            assert_eq!(r.fredholm_index(), Some(0));
            assert_eq!(
                r.kernel_dim_exact,
                Some(usize::from(lambda >= 0)),
                "λ = {lambda}"
            );
        }
    }

    #[test]
    fn multiple_zero_detection_round_trip() {
        let w = q(1, 2);
        let psi: QPoly = Poly::from_ints(&[3, -1]);
        for n in 2..=4 {
            let sym = PolyanalyticSymbol::zbar_binomial(&-w.inv().unwrap(), n)
                .add(&PolyanalyticSymbol::holomorphic(
                    &Poly::linear_root(&w).pow(n) * &psi,
                ))
                .scale(&q(2, 3));
            let form = detect_multiple_zero(&sym).unwrap();
            assert_eq!(
                form,
                MultipleZeroForm {
                    kappa: q(2, 3),
                    w: w.clone(),
                    psi: psi.clone()
                }
            );
        }
        assert!(detect_multiple_zero(&zbar_power_plus(2, q(1, 2))).is_none());
    }

    #[test]
    fn positivity_of_the_product_term() {
        for n in 1..=6 {
            let s = operator_identity_sum(n);
            let prod = (1..=n).fold(Poly::<GaussRat>::one(), |acc, i| {
                &acc * &Poly::from_ints(&[(i + 1) as i64, 1])
            });
            for l in 0..=50 {
                let l = GaussRat::from_i64(l);
                let (a, b) = (prod.eval(&l).re, s.eval(&l).re);
                assert!(a > b);
            }
        }
    }

    #[test]
    fn spectrum_of_zbar() {
        let grid: Vec<GaussRat> = [(3, 2), (-3, 2), (1, 2), (0, 1)]
            .iter()
            .map(|&(a, b)| q(a, b))
            .collect();
        let pts = spectrum_probe(&PolyanalyticSymbol::zbar_power(1, GaussRat::one()), &grid);
        let v: Vec<Verdict> = pts.iter().map(|p| p.verdict).collect();
        assert_eq!(
            v,
            vec![
                Verdict::Invertible,
                Verdict::Invertible,
                Verdict::NotInvertible,
                Verdict::NotInvertible
            ]
        );
    }

    #[test]
    fn threshold_family_guards() {
        assert_eq!(
            threshold_family(&q(1, 1), &GaussRat::zero(), 1, 1).unwrap_err(),
            Error::WZeroExcluded
        );
        let r = threshold_family(&q(1, 1), &q(1, 2), 1, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Invertible);
        let r = threshold_family(&q(4, 1), &q(1, 2), 1, 1).unwrap();
        assert_ne!(r.fredholm_index(), Some(0));
        assert_eq!(r.verdict, Verdict::NotInvertible);
    }

    #[test]
    fn report_json_has_required_fields() {
        let r = analyze(&zbar_power_plus(1, q(-2, 1))).unwrap();
        let v = r.to_json();
        for key in [
            "indexData",
            "kernelDimLower",
            "kernelDimUpper",
            "kernelDimExact",
            "surjective",
            "verdict",
            "perZeroIndicial",
            "provenance",
            "warnings",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert!(v["provenance"]
            .as_array()
            .unwrap()
            .iter()
            .all(|c| !c["anchor"].as_str().unwrap().is_empty()));
        assert_eq!(v["verdict"], "Invertible");
    }
}
