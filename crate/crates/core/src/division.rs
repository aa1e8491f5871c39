//! Echelon division with remainder.
//!
//! `f = sum a_i f_i + b` with `a_i` in the first `s_i` variables, every
//! `a_i * in(f_i)` supported in slice `i` of the region partition and `b`
//! supported in the complement. The quotients are built by rewriting: the
//! least remaining term of the working series is either cancelled by a
//! monomial multiple of the generator owning its exponent or moved to the
//! remainder. Each rewrite only introduces larger terms, so the least
//! remaining exponent strictly increases and the loop ends once every
//! exponent of degree at most the working precision has been visited. This
//! holds for any monomial order.
//!
//! The reconstruction identity is exact up to the working precision for the
//! truncated data that was supplied. When the order is not degree-compatible
//! (lex, say), a rewrite can replace a term by terms of lower total degree,
//! so terms that truncation already discarded would have reached the top
//! degrees of the remainder. Whoever needs the remainder of the untruncated
//! series up to degree `d` must supply generators with spare precision
//! beyond `d`.

use std::collections::BTreeMap;

use crate::echelon::{EchelonPresentation, Region, RegionPartition};
use crate::error::{Error, Result};
use crate::order::{initial_term, MonomialOrder};
use num_traits::Zero;

use crate::series::{Exponent, Rational, Series};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DivisionResult {
    /// One quotient per generator, in the presentation's generator order.
    pub quotients: Vec<Series>,
    pub remainder: Series,
    /// `min_i in(a_i) * in(f_i)` over nonzero quotients.
    pub min_witness: Option<Exponent>,
    pub remainder_scope: usize,
    /// Working precision: the smaller of the input's and the generators'.
    pub prec: u32,
}

impl DivisionResult {
    pub fn nonzero_quotients(&self) -> impl Iterator<Item = (usize, &Series)> {
        self.quotients.iter().enumerate().filter(|(_, q)| !q.is_zero())
    }
}

struct Working<'a> {
    order: &'a MonomialOrder,
    terms: BTreeMap<Vec<u32>, (Exponent, Rational)>,
}

impl<'a> Working<'a> {
    fn new(order: &'a MonomialOrder, f: &Series) -> Self {
        let terms = f
            .terms()
            .map(|(e, c)| (order.sort_key(e), (e.clone(), c.clone())))
            .collect();
        Working { order, terms }
    }

    fn add(&mut self, e: Exponent, c: Rational) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(self.order.sort_key(&e)) {
            Entry::Vacant(v) => {
                v.insert((e, c));
            }
            Entry::Occupied(mut o) => {
                o.get_mut().1 += c;
                if o.get().1.is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn pop_least(&mut self) -> Option<(Exponent, Rational)> {
        self.terms.pop_first().map(|(_, v)| v)
    }
}

/// Divides `f` by the generators of `p`. `f_scope` is the scope assigned to
/// `f`, if any; it only affects [`DivisionResult::remainder_scope`].
pub fn echelon_divide(f: &Series, p: &EchelonPresentation, f_scope: Option<usize>) -> Result<DivisionResult> {
    if f.nvars() != p.nvars() {
        return Err(Error::Dimension {
            expected: p.nvars(),
            found: f.nvars(),
        });
    }
    let partition = RegionPartition::build(p)?;
    let order = p.order();
    let prec = p.min_prec().map_or(f.prec(), |g| g.min(f.prec()));
    let leads: Vec<_> = p.generators().iter().map(|g| g.initial_term(order)).collect();

    let mut work = Working::new(order, &f.truncate(prec));
    let mut quotients: Vec<BTreeMap<Exponent, Rational>> = vec![BTreeMap::new(); p.len()];
    let mut remainder = BTreeMap::new();

    while let Some((e, c)) = work.pop_least() {
        match partition.classify(&e) {
            Region::Complement => {
                remainder.insert(e, c);
            }
            Region::Slice(s) => {
                let i = partition.slices()[s].owner;
                let lead = &leads[i];
                let shift = e.checked_sub(&lead.exp).expect("slice membership");
                let q = &c / &lead.coeff;
                for (ge, gc) in p.generators()[i].series().terms() {
                    if *ge == lead.exp {
                        continue;
                    }
                    let te = ge.add(&shift);
                    if te.degree() <= prec {
                        work.add(te, -(&q * gc));
                    }
                }
                quotients[i].insert(shift, q);
            }
        }
    }

    let quotients: Vec<Series> = quotients
        .into_iter()
        .zip(&leads)
        .map(|(terms, lead)| Series::from_terms(p.nvars(), prec.saturating_sub(lead.exp.degree()), terms))
        .collect::<Result<_>>()?;
    let remainder = Series::from_terms(p.nvars(), prec, remainder)?;

    let min_witness = quotient_witness(
        order,
        &quotients,
        &leads.iter().map(|t| t.exp.clone()).collect::<Vec<_>>(),
    );
    let remainder_scope = quotients
        .iter()
        .zip(p.generators())
        .filter(|(q, _)| !q.is_zero())
        .map(|(_, g)| g.scope())
        .chain(f_scope)
        .min()
        .unwrap_or(p.nvars());

    Ok(DivisionResult {
        quotients,
        remainder,
        min_witness,
        remainder_scope,
        prec,
    })
}

fn quotient_witness(order: &MonomialOrder, quotients: &[Series], leads: &[Exponent]) -> Option<Exponent> {
    quotients
        .iter()
        .zip(leads)
        .filter_map(|(q, a)| initial_term(q, order).map(|t| t.exp.add(a)))
        .min_by(|a, b| order.cmp(a, b))
}

/// Checks `in(f - b) = min_i in(a_i) * in(f_i)`, vacuously true when every
/// quotient vanishes.
pub fn verify_star(result: &DivisionResult, f: &Series, p: &EchelonPresentation) -> bool {
    let order = p.order();
    let witness = quotient_witness(order, &result.quotients, &p.initial_exponents());
    let Some(witness) = witness else {
        return true;
    };
    let Ok(diff) = f.truncate(result.prec).sub(&result.remainder) else {
        return false;
    };
    initial_term(&diff, order).is_some_and(|t| t.exp == witness)
}

/// Every contract of a division result, as a list of violations (empty when
/// the result is sound).
pub fn audit(result: &DivisionResult, f: &Series, p: &EchelonPresentation) -> Vec<String> {
    let mut problems = Vec::new();
    let prec = result.prec;
    let partition = match RegionPartition::build(p) {
        Ok(rp) => rp,
        Err(e) => return vec![e.to_string()],
    };
    let leads = p.initial_exponents();

    let mut total = result.remainder.clone();
    for (i, (q, g)) in result.quotients.iter().zip(p.generators()).enumerate() {
        if !q.within_scope(g.scope()) {
            problems.push(format!("quotient {i} leaves scope {}", g.scope()));
        }
        for (e, _) in q.terms() {
            if partition.owner_of(&e.add(&leads[i])) != Some(i) {
                problems.push(format!("quotient {i} term {e:?} outside its slice"));
            }
        }
        match q.mul_polynomial(g.series(), prec).and_then(|t| total.add(&t)) {
            Ok(t) => total = t,
            Err(e) => problems.push(e.to_string()),
        }
    }
    for (e, _) in result.remainder.terms() {
        if partition.classify(e) != Region::Complement {
            problems.push(format!("remainder term {e:?} inside the covered region"));
        }
    }
    if total.truncate(prec) != f.truncate(prec) {
        problems.push("reconstruction sum a_i f_i + b differs from the input".into());
    }
    if !verify_star(result, f, p) {
        problems.push("in(f - b) differs from min in(a_i) in(f_i)".into());
    }
    if result.min_witness != quotient_witness(p.order(), &result.quotients, &leads) {
        problems.push("recorded witness differs from the quotients".into());
    }
    problems
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{integer, rational};

    fn gabrielov(prec: u32) -> (EchelonPresentation, Series, Series) {
        let f = Series::one(3, prec);
        let x = Series::var(3, 0, prec);
        let e = Series::exp_series(3, 2, prec).unwrap();
        let g = x.mul(&e.sub(&Series::one(3, prec)).unwrap()).unwrap().truncate(prec);
        let h = Series::from_terms(
            3,
            prec,
            vec![
                (Exponent::from([0, 1, 1]), integer(1)),
                (Exponent::from([1, 0, 0]), integer(-1)),
            ],
        )
        .unwrap();
        let p = EchelonPresentation::from_pairs(MonomialOrder::lex(3), vec![(f, 2), (g.clone(), 2), (h.clone(), 3)])
            .unwrap();
        (p, g, h)
    }

    #[test]
    fn s_combination_of_g_and_h() {
        // one spare degree: rewriting by h lowers the degree by one
        let (p, g, h) = gabrielov(10);
        let y = Series::var(3, 1, 10);
        let x = Series::var(3, 0, 10);
        let s = y.mul(&g).unwrap().neg().add(&x.mul(&h).unwrap()).unwrap();
        // lowest-degree terms: -x^2 and -(1/2) x y z^2
        assert_eq!(s.coeff(&Exponent::from([2, 0, 0])), integer(-1));
        assert_eq!(s.coeff(&Exponent::from([1, 1, 2])), rational(-1, 2));
        assert_eq!(s.coeff(&Exponent::from([1, 1, 1])), integer(0));

        let r = echelon_divide(&s, &p, Some(2)).unwrap();
        assert!(audit(&r, &s, &p).is_empty(), "{:?}", audit(&r, &s, &p));
        assert_eq!(
            r.quotients[0],
            Series::monomial(3, Exponent::from([2, 0, 0]), integer(-1), 10)
        );
        assert_eq!(
            r.quotients[1],
            Series::monomial(3, Exponent::from([1, 0, 0]), rational(-1, 2), 8)
        );
        // a_h = -z^{-1} x (e^z - 1 - z)
        let expected_h = Series::exp_series(3, 2, 10)
            .unwrap()
            .sub(
                &Series::from_terms(
                    3,
                    10,
                    vec![
                        (Exponent::from([0, 0, 0]), integer(1)),
                        (Exponent::from([0, 0, 1]), integer(1)),
                    ],
                )
                .unwrap(),
            )
            .unwrap()
            .divide_by_monomial(&Exponent::from([0, 0, 1]))
            .unwrap()
            .monomial_mul(&crate::series::Term::new(integer(-1), Exponent::from([1, 0, 0])))
            .unwrap();
        assert!(r.quotients[2].agrees_with(&expected_h));
        let published = [
            (2, 1, 12),
            (3, 1, 24),
            (4, 1, 80),
            (5, 1, 360),
            (6, 1, 2016),
            (7, 1, 13440),
        ];
        for (k, n, d) in published {
            assert_eq!(r.remainder.coeff(&Exponent::from([2, 0, k])), rational(n, d));
        }
        assert_eq!(r.min_witness, Some(Exponent::from([1, 1, 2])));
        assert_eq!(r.remainder_scope, 2);
        assert!(verify_star(&r, &s, &p));
    }

    #[test]
    fn zero_divides_to_zero() {
        let (p, _, _) = gabrielov(6);
        let r = echelon_divide(&Series::zero(3, 6), &p, None).unwrap();
        assert!(r.quotients.iter().all(Series::is_zero));
        assert!(r.remainder.is_zero());
        assert_eq!(r.min_witness, None);
        assert!(verify_star(&r, &Series::zero(3, 6), &p));
    }

    #[test]
    fn z_is_its_own_remainder() {
        let (p, _, _) = gabrielov(6);
        let z = Series::var(3, 2, 6);
        let r = echelon_divide(&z, &p, None).unwrap();
        assert!(r.quotients.iter().all(Series::is_zero));
        assert_eq!(r.remainder, z);
        assert!(verify_star(&r, &z, &p));
        assert_eq!(r.remainder_scope, 3);
    }

    #[test]
    fn remainder_is_fixed_by_division() {
        let (p, g, h) = gabrielov(8);
        let f = g.add(&h).unwrap().add(&Series::var(3, 2, 8)).unwrap();
        let r = echelon_divide(&f, &p, None).unwrap();
        let again = echelon_divide(&r.remainder, &p, None).unwrap();
        assert!(again.quotients.iter().all(Series::is_zero));
        assert_eq!(again.remainder, r.remainder);
        assert_eq!(echelon_divide(&f, &p, None).unwrap(), r);
    }

    #[test]
    fn precision_is_the_minimum() {
        let (p, _, _) = gabrielov(6);
        let r = echelon_divide(&Series::var(3, 2, 9), &p, None).unwrap();
        assert_eq!(r.prec, 6);
        assert_eq!(r.quotients[2].prec(), 4);
    }

    #[test]
    fn dimension_checked() {
        let (p, _, _) = gabrielov(6);
        assert!(echelon_divide(&Series::one(2, 4), &p, None).is_err());
    }
}
