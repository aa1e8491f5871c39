//! Monomial orders and initial terms.
//!
//! Initial terms are taken as the *minimum* under the order, the convention
//! for power series. Every module in this crate uses it.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Exponent, Series, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    Lex,
    Grlex,
}

/// A total order on exponent vectors. `precedence` lists variable indices
/// from most to least significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonomialOrder {
    kind: OrderKind,
    precedence: Vec<usize>,
}

impl MonomialOrder {
    pub fn new(kind: OrderKind, precedence: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; precedence.len()];
        for &p in &precedence {
            if p >= precedence.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::InvalidOrder(format!(
                    "precedence {precedence:?} is not a permutation"
                )));
            }
        }
        Ok(MonomialOrder { kind, precedence })
    }

    /// Lex with `x_1 > x_2 > ... > x_n`.
    pub fn lex(nvars: usize) -> Self {
        MonomialOrder {
            kind: OrderKind::Lex,
            precedence: (0..nvars).collect(),
        }
    }

    /// Graded lex with `x_1 > x_2 > ... > x_n` breaking degree ties.
    pub fn grlex(nvars: usize) -> Self {
        MonomialOrder {
            kind: OrderKind::Grlex,
            precedence: (0..nvars).collect(),
        }
    }

    pub fn kind(&self) -> OrderKind {
        self.kind
    }

    pub fn precedence(&self) -> &[usize] {
        &self.precedence
    }

    pub fn nvars(&self) -> usize {
        self.precedence.len()
    }

    pub fn compare(&self, a: &Exponent, b: &Exponent) -> Result<Ordering> {
        for e in [a, b] {
            if e.len() != self.nvars() {
                return Err(Error::Dimension {
                    expected: self.nvars(),
                    found: e.len(),
                });
            }
        }
        Ok(self.cmp(a, b))
    }

    /// Comparison for exponents already known to have the right length.
    pub fn cmp(&self, a: &Exponent, b: &Exponent) -> Ordering {
        if self.kind == OrderKind::Grlex {
            match a.degree().cmp(&b.degree()) {
                Ordering::Equal => {}
                other => return other,
            }
        }
        let (a, b) = (a.as_slice(), b.as_slice());
        self.precedence
            .iter()
            .map(|&i| a[i].cmp(&b[i]))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }

    /// A key whose lexicographic order on `Vec<u32>` realizes this order.
    pub fn sort_key(&self, e: &Exponent) -> Vec<u32> {
        let s = e.as_slice();
        let mut key = Vec::with_capacity(s.len() + 1);
        if self.kind == OrderKind::Grlex {
            key.push(e.degree());
        }
        key.extend(self.precedence.iter().map(|&i| s[i]));
        key
    }

    /// Whether the order has no infinite strictly increasing sequence that
    /// is bounded above. Decided by kind: lex answers `false` even in one
    /// variable, where it coincides with grlex.
    pub fn satisfies_sharp(&self) -> bool {
        match self.kind {
            OrderKind::Grlex => true,
            OrderKind::Lex => false,
        }
    }

    /// The smaller of two exponents.
    pub fn min<'a>(&self, a: &'a Exponent, b: &'a Exponent) -> &'a Exponent {
        if self.cmp(a, b) == Ordering::Greater {
            b
        } else {
            a
        }
    }
}

/// The term of `f` with the least exponent, `None` for the zero series.
pub fn initial_term(f: &Series, order: &MonomialOrder) -> Option<Term> {
    f.terms()
        .min_by(|(a, _), (b, _)| order.cmp(a, b))
        .map(|(e, c)| Term::new(c.clone(), e.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{rational, Exponent};
    use proptest::prelude::*;

    fn e<const N: usize>(v: [u32; N]) -> Exponent {
        Exponent::from(v)
    }

    #[test]
    fn lex_puts_yz_below_x() {
        let lex = MonomialOrder::lex(3);
        assert_eq!(lex.compare(&e([0, 1, 1]), &e([1, 0, 0])).unwrap(), Ordering::Less);
        assert_eq!(lex.compare(&e([1, 0, 1]), &e([1, 0, 2])).unwrap(), Ordering::Less);
        assert_eq!(lex.compare(&e([1, 2, 3]), &e([1, 2, 3])).unwrap(), Ordering::Equal);
    }

    #[test]
    fn grlex_compares_degree_first() {
        let g = MonomialOrder::grlex(3);
        assert_eq!(g.cmp(&e([1, 0, 0]), &e([0, 1, 1])), Ordering::Less);
        assert_eq!(g.cmp(&e([0, 1, 1]), &e([1, 0, 1])), Ordering::Less);
    }

    #[test]
    fn precedence_reorders_variables() {
        let o = MonomialOrder::new(OrderKind::Lex, vec![2, 1, 0]).unwrap();
        assert_eq!(o.cmp(&e([5, 0, 0]), &e([0, 0, 1])), Ordering::Less);
        assert!(MonomialOrder::new(OrderKind::Lex, vec![0, 0, 1]).is_err());
        assert!(MonomialOrder::new(OrderKind::Lex, vec![0, 3, 1]).is_err());
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let lex = MonomialOrder::lex(3);
        assert!(lex.compare(&e([1, 0]), &e([1, 0, 0])).is_err());
    }

    #[test]
    fn sharp_classification() {
        assert!(MonomialOrder::grlex(3).satisfies_sharp());
        assert!(!MonomialOrder::lex(3).satisfies_sharp());
        assert!(!MonomialOrder::lex(1).satisfies_sharp());
    }

    #[test]
    fn initial_terms() {
        let lex = MonomialOrder::lex(3);
        let f = Series::from_terms(
            3,
            4,
            vec![(e([0, 0, 0]), rational(1, 1)), (e([1, 2, 0]), rational(5, 1))],
        )
        .unwrap();
        let t = initial_term(&f, &lex).unwrap();
        assert!(t.exp.is_zero());
        assert_eq!(t.coeff, rational(1, 1));
        assert!(initial_term(&Series::zero(3, 4), &lex).is_none());

        let h = Series::from_terms(
            3,
            4,
            vec![(e([0, 1, 1]), rational(1, 1)), (e([1, 0, 0]), rational(-1, 1))],
        )
        .unwrap();
        assert_eq!(initial_term(&h, &lex).unwrap().exp, e([0, 1, 1]));
        assert_eq!(initial_term(&h, &MonomialOrder::grlex(3)).unwrap().exp, e([1, 0, 0]));
    }

    fn arb_order() -> impl Strategy<Value = MonomialOrder> {
        (any::<bool>(), Just(vec![0usize, 1, 2]).prop_shuffle()).prop_map(|(g, p)| {
            let kind = if g { OrderKind::Grlex } else { OrderKind::Lex };
            MonomialOrder::new(kind, p).unwrap()
        })
    }

    fn arb_exp() -> impl Strategy<Value = Exponent> {
        prop::collection::vec(0u32..6, 3).prop_map(Exponent::new)
    }

    proptest! {
        #[test]
        fn compatible_with_addition(o in arb_order(), a in arb_exp(), b in arb_exp(), c in arb_exp()) {
            let before = o.cmp(&a, &b);
            prop_assert_eq!(o.cmp(&a.add(&c), &b.add(&c)), before);
        }

        #[test]
        fn zero_is_the_minimum(o in arb_order(), a in arb_exp()) {
            prop_assume!(!a.is_zero());
            prop_assert_eq!(o.cmp(&Exponent::zero(3), &a), Ordering::Less);
        }

        #[test]
        fn total_and_antisymmetric(o in arb_order(), a in arb_exp(), b in arb_exp()) {
            let ab = o.cmp(&a, &b);
            prop_assert_eq!(ab.reverse(), o.cmp(&b, &a));
            prop_assert_eq!(ab == Ordering::Equal, a == b);
            prop_assert_eq!(o.sort_key(&a).cmp(&o.sort_key(&b)), ab);
        }
    }
}
