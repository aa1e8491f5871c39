//! Gabrielov's echelon `f = 1`, `g = x (e^z - 1)`, `h = yz - x` in
//! `K[[x, y, z]]`, with `f` and `g` restricted to multipliers in `x, y`.
//!
//! Under lex with `x > y > z` the initial monomials are `1`, `xz` and `yz`.
//! Repeatedly combining the newest element with `h` and dividing produces
//! the family `g_k = x^k sum_{i >= k} q(i, k) z^i` with initial monomial
//! `x^k z^k`. Each `g_k` has a unique presentation `a_k f + b_k g + c_k h`
//! whose coefficients grow like `1 / q(k, k)`, which is what makes the
//! normalized sum `e = sum_k g_k / q(k, k)` a convergent series with no
//! convergent presentation.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use serde::Serialize;

use crate::division::echelon_divide;
use crate::echelon::{EchelonPresentation, ScopedGenerator};
use crate::error::{Error, Result};
use crate::order::{initial_term, MonomialOrder};
use crate::series::{format_rational, integer, Exponent, Rational, Series, Term};

pub const VARS: [&str; 3] = ["x", "y", "z"];
const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;

/// The three generators at a fixed precision.
#[derive(Clone, Debug)]
pub struct GabrielovContext {
    prec: u32,
    presentation: EchelonPresentation,
}

impl GabrielovContext {
    pub fn new(prec: u32) -> Result<Self> {
        let f = Series::one(3, prec);
        let g = Series::var(3, X, prec).mul(&Series::exp_series(3, Z, prec)?.sub(&Series::one(3, prec))?)?;
        let h = Series::from_terms(
            3,
            prec,
            vec![
                (Exponent::from([0, 1, 1]), integer(1)),
                (Exponent::from([1, 0, 0]), integer(-1)),
            ],
        )?;
        let presentation =
            EchelonPresentation::from_pairs(MonomialOrder::lex(3), vec![(f, 2), (g.truncate(prec), 2), (h, 3)])?;
        Ok(GabrielovContext { prec, presentation })
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn presentation(&self) -> &EchelonPresentation {
        &self.presentation
    }

    pub fn order(&self) -> &MonomialOrder {
        self.presentation.order()
    }

    pub fn f(&self) -> &Series {
        self.presentation.generators()[0].series()
    }

    pub fn g(&self) -> &Series {
        self.presentation.generators()[1].series()
    }

    pub fn h(&self) -> &Series {
        self.presentation.generators()[2].series()
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

fn ratio(num: BigInt, den: BigInt) -> Rational {
    Rational::new(num, den)
}

/// `(a)(a+1)...(a+m-1)`, the empty product being 1.
pub fn rising_factorial(a: &Rational, m: u32) -> Rational {
    (0..m).fold(Rational::one(), |acc, j| acc * (a + integer(j.into())))
}

/// `q(i, k) = (i-1)! / (4^(k-1) (i-k)! (i+k-1)! (1/2)^(rising k-1))`, the
/// coefficient of `x^k z^i` in `g_k`.
pub fn coefficient(i: u32, k: u32) -> Result<Rational> {
    if k == 0 || i < k {
        return Err(Error::Domain(format!("q({i}, {k}) needs i >= k >= 1")));
    }
    let den = ratio(
        BigInt::from(4).pow(k - 1) * factorial(i - k) * factorial(i + k - 1),
        BigInt::one(),
    ) * rising_factorial(&Rational::new(1.into(), 2.into()), k - 1);
    Ok(ratio(factorial(i - 1), BigInt::one()) / den)
}

/// `q(k, k)`, the leading coefficient of `g_k`.
pub fn leading_coefficient(k: u32) -> Result<Rational> {
    coefficient(k, k)
}

/// `r_k = 1 / q(k, k)`.
pub fn reciprocal_leading(k: u32) -> Result<Rational> {
    Ok(leading_coefficient(k)?.recip())
}

/// `q(i, k) / q(k, k) = (i-1)! (2k-1)! / ((i-k)! (i+k-1)! (k-1)!)`.
pub fn relative_coefficient(i: u32, k: u32) -> Result<Rational> {
    if k == 0 || i < k {
        return Err(Error::Domain(format!(
            "relative coefficient ({i}, {k}) needs i >= k >= 1"
        )));
    }
    Ok(ratio(
        factorial(i - 1) * factorial(2 * k - 1),
        factorial(i - k) * factorial(i + k - 1) * factorial(k - 1),
    ))
}

/// `k! (i-1)! / ((i-k)! (i+k-1)!)`, a simplified form of the relative
/// coefficient that circulates for this example. It disagrees with
/// [`relative_coefficient`] (1/6 instead of 1/2 at `i = 3, k = 2`) and is
/// kept only to document the discrepancy.
pub fn simplified_ratio_variant(i: u32, k: u32) -> Result<Rational> {
    if k == 0 || i < k {
        return Err(Error::Domain(format!("ratio ({i}, {k}) needs i >= k >= 1")));
    }
    Ok(ratio(
        factorial(k) * factorial(i - 1),
        factorial(i - k) * factorial(i + k - 1),
    ))
}

/// `q(k+1, k+1) / q(k, k)`; equals `1 / (4 (2k+1) (2k-1))`.
pub fn ratio_check(k: u32) -> Result<Rational> {
    Ok(leading_coefficient(k + 1)? / leading_coefficient(k)?)
}

/// `4 (2k+1) (2k-1)`, the growth factor `r_{k+1} / r_k`.
pub fn growth_factor(k: u32) -> Rational {
    let k = i64::from(k);
    integer(4 * (2 * k + 1) * (2 * k - 1))
}

/// `x^k sum_{k <= i <= prec-k} q(i, k) z^i` at precision `prec`.
pub fn g_closed(k: u32, prec: u32) -> Result<Series> {
    if k == 0 {
        return Err(Error::Domain("g_k needs k >= 1".into()));
    }
    let terms = (k..=prec.saturating_sub(k))
        .map(|i| Ok((Exponent::from([k, 0, i]), coefficient(i, k)?)))
        .collect::<Result<Vec<_>>>()?;
    Series::from_terms(3, prec, terms)
}

/// `g_1 = g, g_2, ..., g_kmax`, each obtained as the remainder of
/// `-y g_{k-1} + c x^(k-1) z^(k-2) h` (with `c` the computed leading
/// coefficient of `g_{k-1}`) divided by `f, g, h, g_2, ..., g_{k-1}`.
///
/// Lex is not degree compatible: rewriting with `h` trades `yz` for `x`
/// and lowers the degree by one. Since every S-combination is linear in
/// `y`, one extra degree of working precision keeps the results exact up
/// to `prec`.
pub fn g_family(kmax: u32, prec: u32) -> Result<Vec<Series>> {
    if kmax == 0 {
        return Err(Error::Domain("g_k needs k >= 1".into()));
    }
    if prec < 2 * kmax {
        return Err(Error::InsufficientPrecision {
            needed: 2 * kmax,
            available: prec,
        });
    }
    let ctx = GabrielovContext::new(prec + 1)?;
    let order = ctx.order().clone();
    let mut gens = ctx.presentation().generators().to_vec();
    let mut family = vec![ctx.g().clone()];
    let minus_y = Term::new(integer(-1), Exponent::var(3, Y, 1));
    for k in 2..=kmax {
        let prev = family.last().expect("family starts with g");
        let lead = initial_term(prev, &order).ok_or_else(|| Error::Domain(format!("g_{} vanished", k - 1)))?;
        let shift = Term::new(lead.coeff, Exponent::from([k - 1, 0, k - 2]));
        let s = prev.monomial_mul(&minus_y)?.add(&ctx.h().monomial_mul(&shift)?)?;
        let basis = EchelonPresentation::new(order.clone(), gens.clone())?;
        let gk = echelon_divide(&s, &basis, Some(2))?.remainder;
        gens.push(ScopedGenerator::new(gk.clone(), 2)?);
        family.push(gk);
    }
    Ok(family.into_iter().map(|s| s.truncate(prec)).collect())
}

/// `g_k` by iterated division; see [`g_family`].
pub fn g_algorithmic(k: u32, prec: u32) -> Result<Series> {
    Ok(g_family(k, prec)?.pop().expect("nonempty family"))
}

/// Presentation `g_k = a_k f + b_k g + c_k h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub k: u32,
    /// Homogeneous polynomial of degree `k` in `x, y`.
    pub a: Series,
    /// Homogeneous polynomial of degree `k - 1` in `x, y`.
    pub b: Series,
    pub c: Series,
}

impl Presentation {
    pub fn combine(&self, ctx: &GabrielovContext) -> Result<Series> {
        self.a
            .mul(ctx.f())?
            .add(&self.b.mul(ctx.g())?)?
            .add(&self.c.mul(ctx.h())?)
    }
}

/// `a_k, b_k, c_k` for `k = 1..=kmax` from the three-term recursions
///
/// ```text
/// a_k = -y a_{k-1} + x^2 a_{k-2} / (4 (2k-3) (2k-5))
/// b_k = -y b_{k-1} + x^2 b_{k-2} / (4 (2k-3) (2k-5))
/// c_k = -y c_{k-1} + x^2 c_{k-2} / (4 (2k-3) (2k-5)) + (a_{k-1} f + b_{k-1} g + c_{k-1} h) / z
/// ```
///
/// starting from `a_1 = 0, a_2 = x^2, b_1 = 1, b_2 = x/2 - y, c_1 = 0,
/// c_2 = x (e^z - 1) / z`. Combined they give
/// `g_k = x^2 g_{k-2} / (4 (2k-3) (2k-5)) - x g_{k-1} / z`. The division by
/// `z` costs one degree once: every `c_k` has precision `prec - 1`.
pub fn abc(kmax: u32, prec: u32) -> Result<Vec<Presentation>> {
    if prec < 2 {
        return Err(Error::InsufficientPrecision {
            needed: 2,
            available: prec,
        });
    }
    let ctx = GabrielovContext::new(prec)?;
    let poly = |terms: Vec<([u32; 3], Rational)>| {
        Series::from_terms(3, prec, terms.into_iter().map(|(e, c)| (Exponent::from(e), c)))
    };
    let z = Exponent::var(3, Z, 1);
    let mut out = vec![Presentation {
        k: 1,
        a: Series::zero(3, prec),
        b: Series::one(3, prec),
        c: Series::zero(3, prec - 1),
    }];
    if kmax >= 2 {
        out.push(Presentation {
            k: 2,
            a: poly(vec![([2, 0, 0], integer(1))])?,
            b: poly(vec![
                ([1, 0, 0], Rational::new(1.into(), 2.into())),
                ([0, 1, 0], integer(-1)),
            ])?,
            c: ctx.g().divide_by_monomial(&z)?,
        });
    }
    let minus_y = Term::new(integer(-1), Exponent::var(3, Y, 1));
    for k in 3..=kmax {
        let kappa = Rational::new(1.into(), (4 * (2 * i64::from(k) - 3) * (2 * i64::from(k) - 5)).into());
        let x2 = Term::new(kappa, Exponent::var(3, X, 2));
        let (p1, p2) = (&out[out.len() - 1], &out[out.len() - 2]);
        let step =
            |s1: &Series, s2: &Series| -> Result<Series> { s1.monomial_mul(&minus_y)?.add(&s2.monomial_mul(&x2)?) };
        let a = step(&p1.a, &p2.a)?.truncate(prec);
        let b = step(&p1.b, &p2.b)?.truncate(prec);
        let shifted = p1.combine(&ctx)?.divide_by_monomial(&z)?;
        let c = step(&p1.c, &p2.c)?.add(&shifted)?;
        out.push(Presentation { k, a, b, c });
    }
    out.truncate(kmax as usize);
    Ok(out)
}

/// `sum_{k=start}^{kmax} r_k g_k`; the coefficient of `x^k z^i` is
/// `q(i, k) / q(k, k)`. Starting at 1 adds the summand `g_1 = g`.
pub fn e_combination(kmax: u32, prec: u32, start: u32) -> Result<Series> {
    if start == 0 {
        return Err(Error::Domain("summation starts at k >= 1".into()));
    }
    let mut e = Series::zero(3, prec);
    for k in start..=kmax {
        e = e.add(&g_closed(k, prec)?.scale(&reciprocal_leading(k)?))?;
    }
    Ok(e)
}

/// `sum_{i >= 1, j >= 0} i! / (i+j)! x^i z^(j+1)` at precision `prec`.
pub fn e_original(prec: u32) -> Result<Series> {
    let mut terms = Vec::new();
    for i in 1..prec {
        for j in 0..prec - i {
            terms.push((Exponent::from([i, 0, j + 1]), ratio(factorial(i), factorial(i + j))));
        }
    }
    Series::from_terms(3, prec, terms)
}

/// Coefficients along the monomial rays `x^2 y^(k-2)`, `y^(k-1)` and
/// `x y^(k-2)` of the partial sums `sum r_k a_k`, `sum r_k b_k`, `sum r_k c_k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivergenceRow {
    pub k: u32,
    #[serde(serialize_with = "ser_rational")]
    pub r: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub a_ray: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub b_ray: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub c_ray: Rational,
    /// `r_{k+1} / r_k`.
    #[serde(serialize_with = "ser_rational")]
    pub growth: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub expected_growth: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DivergenceReport {
    pub kmax: u32,
    pub prec: u32,
    pub rows: Vec<DivergenceRow>,
    /// Every ray coefficient of `a` and `b` has absolute value `r_k`.
    pub rays_match_r: bool,
    /// Same for `c`.
    pub c_rays_match_r: bool,
    /// Every growth factor equals `4 (2k+1) (2k-1)`.
    pub growth_law_holds: bool,
    /// Growth factors increase strictly, so no geometric rate bounds them.
    pub super_geometric: bool,
}

fn ser_rational<S: serde::Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(r))
}

pub fn divergence_report(kmax: u32, prec: u32) -> Result<DivergenceReport> {
    if kmax < 3 {
        return Err(Error::Domain("divergence report needs kmax >= 3".into()));
    }
    let pres = abc(kmax, prec)?;
    let mut sums = [Series::zero(3, prec), Series::zero(3, prec), Series::zero(3, prec)];
    for p in pres.iter().filter(|p| p.k >= 2) {
        let r = reciprocal_leading(p.k)?;
        for (sum, part) in sums.iter_mut().zip([&p.a, &p.b, &p.c]) {
            *sum = sum.add(&part.scale(&r))?;
        }
    }
    let mut rows = Vec::new();
    for k in 2..=kmax {
        let r = reciprocal_leading(k)?;
        rows.push(DivergenceRow {
            k,
            a_ray: sums[0].coeff(&Exponent::from([2, k - 2, 0])),
            b_ray: sums[1].coeff(&Exponent::from([0, k - 1, 0])),
            c_ray: sums[2].coeff(&Exponent::from([1, k - 2, 0])),
            growth: reciprocal_leading(k + 1)? / &r,
            expected_growth: growth_factor(k),
            r,
        });
    }
    let rays_match_r = rows.iter().all(|w| w.a_ray.abs() == w.r && w.b_ray.abs() == w.r);
    let c_rays_match_r = rows.iter().all(|w| w.c_ray.abs() == w.r);
    let growth_law_holds = rows.iter().all(|w| w.growth == w.expected_growth);
    let super_geometric = rows.windows(2).all(|w| w[1].growth > w[0].growth);
    Ok(DivergenceReport {
        kmax,
        prec,
        rows,
        rays_match_r,
        c_rays_match_r,
        growth_law_holds,
        super_geometric,
    })
}

/// A published coefficient that disagrees with the computation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub what: String,
    pub printed: String,
    pub computed: String,
}

/// Known misprints in the published tables for this example.
pub fn discrepancies() -> Result<Vec<Discrepancy>> {
    Ok(vec![
        Discrepancy {
            what: "relative coefficient of x^5 z^8 in g_5".into(),
            printed: "7/2461".into(),
            computed: format_rational(&relative_coefficient(8, 5)?),
        },
        Discrepancy {
            what: "simplified ratio formula at i = 3, k = 2".into(),
            printed: format_rational(&simplified_ratio_variant(3, 2)?),
            computed: format_rational(&relative_coefficient(3, 2)?),
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::rational;

    #[test]
    fn leading_coefficients() {
        let expected = [1, 12, 720, 100800, 25401600, 10059033600];
        for (k, d) in (1..=6).zip(expected) {
            assert_eq!(leading_coefficient(k).unwrap(), rational(1, d));
        }
        assert!(coefficient(1, 2).is_err());
    }

    #[test]
    fn first_column_is_exponential() {
        for i in 1..12 {
            assert_eq!(coefficient(i, 1).unwrap(), ratio(BigInt::one(), factorial(i)));
        }
        let ctx = GabrielovContext::new(9).unwrap();
        assert_eq!(g_closed(1, 9).unwrap(), *ctx.g());
    }

    #[test]
    fn relative_coefficient_agrees_with_quotient() {
        for k in 1..=10 {
            for i in k..=20 {
                let direct = coefficient(i, k).unwrap() / leading_coefficient(k).unwrap();
                assert_eq!(relative_coefficient(i, k).unwrap(), direct);
            }
        }
        assert_eq!(simplified_ratio_variant(3, 2).unwrap(), rational(1, 6));
    }

    #[test]
    fn generators_have_expected_initial_terms() {
        let ctx = GabrielovContext::new(6).unwrap();
        assert_eq!(
            ctx.presentation().initial_exponents(),
            vec![
                Exponent::from([0, 0, 0]),
                Exponent::from([1, 0, 1]),
                Exponent::from([0, 1, 1])
            ]
        );
    }

    #[test]
    fn family_matches_closed_form() {
        let family = g_family(6, 14).unwrap();
        for (k, gk) in (1..).zip(&family) {
            assert_eq!(*gk, g_closed(k, 14).unwrap(), "k = {k}");
        }
    }

    #[test]
    fn extra_precision_is_consistent() {
        let lo = g_algorithmic(4, 10).unwrap();
        let hi = g_algorithmic(4, 13).unwrap();
        assert_eq!(hi.truncate(10), lo);
    }

    #[test]
    fn family_needs_room_for_initial_term() {
        assert!(g_algorithmic(5, 9).is_err());
    }

    #[test]
    fn third_presentation() {
        let p = abc(3, 10).unwrap();
        let a3 = Series::monomial(3, Exponent::from([2, 1, 0]), integer(-1), 10);
        assert_eq!(p[2].a, a3);
        let b3 = Series::from_terms(
            3,
            10,
            vec![
                (Exponent::from([0, 2, 0]), integer(1)),
                (Exponent::from([1, 1, 0]), rational(-1, 2)),
                (Exponent::from([2, 0, 0]), rational(1, 12)),
            ],
        )
        .unwrap();
        assert_eq!(p[2].b, b3);
    }

    #[test]
    fn presentations_reproduce_family() {
        let ctx = GabrielovContext::new(20).unwrap();
        for p in abc(8, 20).unwrap().iter().skip(1) {
            let lhs = p.combine(&ctx).unwrap();
            assert!(lhs.prec() >= 19);
            assert!(lhs.agrees_with(&g_closed(p.k, 20).unwrap()), "k = {}", p.k);
            assert_eq!(p.c.prec(), 19);
        }
    }

    #[test]
    fn e_original_coefficients() {
        let e = e_original(8).unwrap();
        assert_eq!(e.coeff(&Exponent::from([1, 0, 1])), integer(1));
        assert_eq!(e.coeff(&Exponent::from([2, 0, 3])), rational(1, 12));
        assert!(e.terms().all(|(t, _)| t.degree() <= 8));
    }

    #[test]
    fn e_combination_start_index() {
        let from2 = e_combination(5, 12, 2).unwrap();
        let from1 = e_combination(5, 12, 1).unwrap();
        assert_eq!(from1.sub(&from2).unwrap(), g_closed(1, 12).unwrap());
        assert_eq!(from2.coeff(&Exponent::from([5, 0, 7])), rational(3, 22));
    }

    #[test]
    fn report_growth() {
        let r = divergence_report(6, 14).unwrap();
        assert!(r.rays_match_r && r.growth_law_holds && r.super_geometric);
        assert_eq!(r.rows[0].r, integer(12));
        assert_eq!(r.rows[0].growth, integer(60));
    }

    #[test]
    fn misprints_are_recorded() {
        let d = discrepancies().unwrap();
        assert_eq!(d[0].computed, "7/264");
        assert_eq!(d[1].computed, "1/2");
    }
}
