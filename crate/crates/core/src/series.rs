//! Sparse multivariate power series over the rationals, truncated at a
//! total-degree precision.
//!
//! A [`Series`] with precision `p` is exact modulo all terms of total degree
//! greater than `p`. Arithmetic propagates the precision:
//!
//! - sum: `min(p1, p2)`
//! - product: `min(p1 + ord2, p2 + ord1)` where `ord` is the least degree of a
//!   stored term (the precision itself for the zero series)
//! - multiplication by a monomial of degree `d`: `p + d`
//! - exact division by a monomial of degree `d`: `p - d`
//!
//! Terms are stored in graded lexicographic order, independent of any
//! monomial order chosen by the caller, so equality and serialization are
//! canonical.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational coefficient, always kept in lowest terms.
pub type Rational = BigRational;

pub fn rational(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn integer(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `p/q` in lowest terms, or `p` alone when `q = 1`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

/// Exponent vector of a monomial. Ordered by total degree, then
/// lexicographically (the administrative storage order).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn new(components: Vec<u32>) -> Self {
        Exponent(components)
    }

    pub fn zero(nvars: usize) -> Self {
        Exponent(vec![0; nvars])
    }

    /// The exponent of the single variable `index` raised to `power`.
    pub fn var(nvars: usize, index: usize, power: u32) -> Self {
        let mut e = vec![0; nvars];
        e[index] = power;
        Exponent(e)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        debug_assert_eq!(self.len(), other.len());
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other` if every component of `other` is at most the
    /// corresponding one of `self`.
    pub fn checked_sub(&self, other: &Exponent) -> Option<Exponent> {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(Exponent)
    }

    /// Componentwise maximum.
    pub fn lcm(&self, other: &Exponent) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| *a.max(b)).collect())
    }

    /// True if only the first `scope` variables occur.
    pub fn within_scope(&self, scope: usize) -> bool {
        self.0.iter().skip(scope).all(|&c| c == 0)
    }

    /// True if `self` lies in `base + (N^scope x 0^(n-scope))`.
    pub fn in_translate(&self, base: &Exponent, scope: usize) -> bool {
        self.checked_sub(base).is_some_and(|d| d.within_scope(scope))
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

impl From<Vec<u32>> for Exponent {
    fn from(v: Vec<u32>) -> Self {
        Exponent(v)
    }
}

impl<const N: usize> From<[u32; N]> for Exponent {
    fn from(v: [u32; N]) -> Self {
        Exponent(v.to_vec())
    }
}

/// All exponents in `nvars` variables of total degree at most `degree`, in
/// administrative order.
pub fn exponents_up_to(nvars: usize, degree: u32) -> Vec<Exponent> {
    fn rec(prefix: &mut Vec<u32>, left: usize, budget: u32, out: &mut Vec<Exponent>) {
        if left == 0 {
            out.push(Exponent(prefix.clone()));
            return;
        }
        for c in 0..=budget {
            prefix.push(c);
            rec(prefix, left - 1, budget - c, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::with_capacity(nvars), nvars, degree, &mut out);
    out.sort();
    out
}

/// A nonzero coefficient times a monomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub coeff: Rational,
    pub exp: Exponent,
}

impl Term {
    pub fn new(coeff: Rational, exp: Exponent) -> Self {
        debug_assert!(!coeff.is_zero());
        Term { coeff, exp }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// Serialized as `{"e": [...], "c": "p/q"}`, the series term layout.
impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("Term", 2)?;
        st.serialize_field("e", &self.exp)?;
        st.serialize_field("c", &format_rational(&self.coeff))?;
        st.end()
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Series {
    nvars: usize,
    prec: u32,
    terms: BTreeMap<Exponent, Rational>,
}

impl Series {
    pub fn zero(nvars: usize, prec: u32) -> Self {
        Series {
            nvars,
            prec,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: Rational, prec: u32) -> Self {
        Self::monomial(nvars, Exponent::zero(nvars), c, prec)
    }

    pub fn one(nvars: usize, prec: u32) -> Self {
        Self::constant(nvars, Rational::one(), prec)
    }

    pub fn monomial(nvars: usize, exp: Exponent, c: Rational, prec: u32) -> Self {
        assert_eq!(exp.len(), nvars, "exponent length");
        let mut s = Series::zero(nvars, prec);
        if !c.is_zero() && exp.degree() <= prec {
            s.terms.insert(exp, c);
        }
        s
    }

    /// The variable `x_index` as a series.
    pub fn var(nvars: usize, index: usize, prec: u32) -> Self {
        Self::monomial(nvars, Exponent::var(nvars, index, 1), Rational::one(), prec)
    }

    /// Builds a series from terms, summing duplicates and dropping zero
    /// coefficients and terms above `prec`.
    pub fn from_terms<I>(nvars: usize, prec: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponent, Rational)>,
    {
        let mut s = Series::zero(nvars, prec);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Dimension {
                    expected: nvars,
                    found: e.len(),
                });
            }
            if e.degree() <= prec {
                s.add_term(e, c);
            }
        }
        Ok(s)
    }

    fn add_term(&mut self, e: Exponent, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Stored terms in administrative order.
    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, e: &Exponent) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Least total degree of a stored term; the precision for the zero
    /// series.
    pub fn order(&self) -> u32 {
        self.terms.keys().next().map_or(self.prec, Exponent::degree)
    }

    /// Largest absolute value of a coefficient, zero for the zero series.
    pub fn max_abs_coeff(&self) -> Rational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }

    /// True if every stored term involves only the first `scope` variables.
    pub fn within_scope(&self, scope: usize) -> bool {
        self.terms.keys().all(|e| e.within_scope(scope))
    }

    /// Lowers the precision to `prec`, dropping terms above it. Precision is
    /// never raised.
    pub fn truncate(&self, prec: u32) -> Series {
        let prec = prec.min(self.prec);
        Series {
            nvars: self.nvars,
            prec,
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.degree() <= prec)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Equality after truncating both sides to the smaller precision.
    pub fn agrees_with(&self, other: &Series) -> bool {
        let p = self.prec.min(other.prec);
        self.nvars == other.nvars && self.truncate(p).terms == other.truncate(p).terms
    }

    fn check_dims(&self, other: &Series) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::Dimension {
                expected: self.nvars,
                found: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Series) -> Result<Series> {
        self.check_dims(other)?;
        let mut out = self.truncate(other.prec);
        for (e, c) in &other.terms {
            if e.degree() <= out.prec {
                out.add_term(e.clone(), c.clone());
            }
        }
        Ok(out)
    }

    pub fn neg(&self) -> Series {
        Series {
            nvars: self.nvars,
            prec: self.prec,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Series) -> Result<Series> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Series) -> Result<Series> {
        self.check_dims(other)?;
        let prec = (self.prec + other.order()).min(other.prec + self.order());
        Ok(self.product_up_to(other, prec))
    }

    /// Product of the stored terms of both operands, treated as exact
    /// polynomials, truncated at `prec`. Unlike [`Series::mul`] this does not
    /// account for unknown terms above either precision.
    pub fn mul_polynomial(&self, other: &Series, prec: u32) -> Result<Series> {
        self.check_dims(other)?;
        Ok(self.product_up_to(other, prec))
    }

    fn product_up_to(&self, other: &Series, prec: u32) -> Series {
        let mut out = Series::zero(self.nvars, prec);
        for (ea, ca) in &self.terms {
            let da = ea.degree();
            if da > prec {
                break;
            }
            for (eb, cb) in &other.terms {
                if da + eb.degree() > prec {
                    break;
                }
                out.add_term(ea.add(eb), ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Series {
        if c.is_zero() {
            return Series::zero(self.nvars, self.prec);
        }
        Series {
            nvars: self.nvars,
            prec: self.prec,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Multiplication by `coeff * x^exp`; the precision grows by `deg(exp)`.
    pub fn monomial_mul(&self, t: &Term) -> Result<Series> {
        if t.exp.len() != self.nvars {
            return Err(Error::Dimension {
                expected: self.nvars,
                found: t.exp.len(),
            });
        }
        let shift = t.exp.degree();
        Ok(Series {
            nvars: self.nvars,
            prec: self.prec + shift,
            terms: self
                .terms
                .iter()
                .filter(|_| !t.coeff.is_zero())
                .map(|(e, c)| (e.add(&t.exp), c * &t.coeff))
                .collect(),
        })
    }

    /// Exact division by `x^exp`; every stored term must be divisible.
    pub fn divide_by_monomial(&self, exp: &Exponent) -> Result<Series> {
        if exp.len() != self.nvars {
            return Err(Error::Dimension {
                expected: self.nvars,
                found: exp.len(),
            });
        }
        let shift = exp.degree();
        let prec = self.prec.checked_sub(shift).ok_or(Error::InsufficientPrecision {
            needed: shift,
            available: self.prec,
        })?;
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let q = e.checked_sub(exp).ok_or_else(|| Error::NotDivisible {
                exponent: e.as_slice().to_vec(),
                divisor: exp.as_slice().to_vec(),
            })?;
            terms.insert(q, c.clone());
        }
        Ok(Series {
            nvars: self.nvars,
            prec,
            terms,
        })
    }

    /// `sum_{k <= prec} x_var^k / k!` at precision `prec`.
    pub fn exp_series(nvars: usize, var: usize, prec: u32) -> Result<Series> {
        if var >= nvars {
            return Err(Error::Dimension {
                expected: nvars,
                found: var + 1,
            });
        }
        let mut s = Series::zero(nvars, prec);
        let mut c = Rational::one();
        for k in 0..=prec {
            if k > 0 {
                c /= integer(k as i64);
            }
            s.terms.insert(Exponent::var(nvars, var, k), c.clone());
        }
        Ok(s)
    }

    /// Checks the storage invariants: no zero coefficients, nothing above
    /// the precision, consistent exponent length.
    pub fn is_well_formed(&self) -> bool {
        self.terms
            .iter()
            .all(|(e, c)| !c.is_zero() && e.degree() <= self.prec && e.len() == self.nvars)
    }

    /// Human-readable rendering with the given variable names.
    pub fn display_with<'a>(&'a self, vars: &'a [String]) -> SeriesDisplay<'a> {
        SeriesDisplay { series: self, vars }
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let vars = default_var_names(self.nvars);
        write!(f, "{}", self.display_with(&vars))
    }
}

/// `x, y, z` for up to three variables, `x1, x2, ...` otherwise.
pub fn default_var_names(nvars: usize) -> Vec<String> {
    if nvars <= 3 {
        ["x", "y", "z"][..nvars].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=nvars).map(|i| format!("x{i}")).collect()
    }
}

pub struct SeriesDisplay<'a> {
    series: &'a Series,
    vars: &'a [String],
}

impl fmt::Display for SeriesDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (e, c) in &self.series.terms {
            let neg = c.is_negative();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let a = c.abs();
            let mono = format_monomial(e, self.vars);
            match (a.is_one(), mono.is_empty()) {
                (true, true) => write!(f, "1")?,
                (true, false) => write!(f, "{mono}")?,
                (false, true) => write!(f, "{}", format_rational(&a))?,
                (false, false) => write!(f, "{}*{mono}", format_rational(&a))?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        write!(f, " + O(deg {})", self.series.prec + 1)
    }
}

pub fn format_monomial(e: &Exponent, vars: &[String]) -> String {
    e.as_slice()
        .iter()
        .zip(vars)
        .filter(|(p, _)| **p > 0)
        .map(|(p, v)| if *p == 1 { v.clone() } else { format!("{v}^{p}") })
        .collect::<Vec<_>>()
        .join("*")
}
