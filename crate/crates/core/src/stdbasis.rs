//! Scope-respecting S-pair enlargement toward an echelon standard basis,
//! and membership up to a degree.
//!
//! [`enlarge`] follows the plain Buchberger-style loop: pairs whose newer
//! index was added since the previous round are combined, combinations that
//! would multiply a generator by a variable outside its scope are dropped,
//! and every surviving nonzero combination is appended with the smaller of
//! the two scopes unless an equal element with at least that scope exists.
//! Nothing is reduced.
//!
//! [`enlarge_reduced`] divides each combination by the current generators
//! before inserting it. The remainder gets the least scope of the elements
//! used in the division. When that drops below the pair's scope, the
//! combination is also divided by the generators of at least the pair's
//! scope alone and that remainder is inserted with the pair's scope, so no
//! standard-basis element is lost to the scope drop.

use std::cmp::Ordering;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::division::{echelon_divide, DivisionResult};
use crate::echelon::{covering_generator, EchelonPresentation, ScopedGenerator};
use crate::error::{Error, Result};
use crate::order::{initial_term, MonomialOrder};
use crate::series::{Exponent, Series, Term};

/// Monomial multipliers `(m_i, m_j)` with `m_i t_i + m_j t_j = 0`, of least
/// degree. `m_i` has coefficient `-1`, so for initial terms `xz` and `yz`
/// the pair is `(-y, x)`.
pub fn minimal_relation(t_i: &Term, t_j: &Term) -> (Term, Term) {
    let gamma = t_i.exp.lcm(&t_j.exp);
    let m_i = Term::new(-crate::series::Rational::one(), gamma.checked_sub(&t_i.exp).unwrap());
    let m_j = Term::new(&t_i.coeff / &t_j.coeff, gamma.checked_sub(&t_j.exp).unwrap());
    (m_i, m_j)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SPair {
    pub i: usize,
    pub j: usize,
    pub m_i: Term,
    pub m_j: Term,
    /// Both multipliers stay inside the scopes of their generators.
    pub admissible: bool,
}

impl SPair {
    /// Exponent of the cancelled monomial `in(m_i f_i) = in(m_j f_j)`.
    pub fn cancelled(&self, order: &MonomialOrder, gens: &[ScopedGenerator]) -> Exponent {
        self.m_i.exp.add(&gens[self.i].initial_term(order).exp)
    }
}

pub fn s_pair(gens: &[ScopedGenerator], order: &MonomialOrder, i: usize, j: usize) -> SPair {
    let (m_i, m_j) = minimal_relation(&gens[i].initial_term(order), &gens[j].initial_term(order));
    let admissible = m_i.exp.within_scope(gens[i].scope()) && m_j.exp.within_scope(gens[j].scope());
    SPair {
        i,
        j,
        m_i,
        m_j,
        admissible,
    }
}

/// `m_i f_i + m_j f_j` with scope `min(s_i, s_j)`, or `None` when the pair
/// violates a scope.
pub fn s_combination(
    gens: &[ScopedGenerator],
    order: &MonomialOrder,
    i: usize,
    j: usize,
) -> Result<Option<(Series, usize)>> {
    if i == j {
        return Err(Error::Domain("S-combination of an element with itself".into()));
    }
    let pair = s_pair(gens, order, i, j);
    if !pair.admissible {
        return Ok(None);
    }
    combine(gens, &pair).map(Some)
}

fn combine(gens: &[ScopedGenerator], pair: &SPair) -> Result<(Series, usize)> {
    let (fi, fj) = (&gens[pair.i], &gens[pair.j]);
    let g = fi
        .series()
        .monomial_mul(&pair.m_i)?
        .add(&fj.series().monomial_mul(&pair.m_j)?)?;
    Ok((g, fi.scope().min(fj.scope())))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Target {
    /// Stop once this exponent is covered by a scoped initial monomial.
    Monomial(Exponent),
    /// Never insert elements whose initial monomial has degree above the cap.
    DegreeCap(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// The target monomial is covered.
    Covered,
    /// A round produced no new element.
    Saturated,
    /// As `Saturated`, but some candidates were dropped by the degree cap.
    DegreeCapped,
    /// The round budget ran out first.
    MaxRounds,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateKind {
    /// The S-combination itself.
    Raw,
    /// Remainder after division by all current elements.
    Reduced,
    /// Remainder after division by the elements of at least the pair scope.
    ScopePreserving,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum Action {
    Zero,
    AboveDegreeCap {
        degree: u32,
    },
    /// An equal element with at least this scope is present.
    Duplicate {
        existing: usize,
    },
    Inserted {
        index: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Candidate {
    pub kind: CandidateKind,
    pub scope: usize,
    pub initial: Option<Exponent>,
    pub action: Action,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub round: usize,
    pub pair: SPair,
    /// Initial exponent of the unreduced combination.
    pub raw_initial: Option<Exponent>,
    pub candidates: Vec<Candidate>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnlargementState {
    pub generators: Vec<ScopedGenerator>,
    pub ell: usize,
    pub ell1: usize,
    pub rounds: usize,
    pub outcome: Outcome,
    /// Index of an element covering the target monomial.
    pub covering: Option<usize>,
    /// Pairs that the next round would examine.
    pub pending_pairs: Vec<(usize, usize)>,
    pub trace: Vec<TraceEntry>,
}

impl EnlargementState {
    pub fn presentation(&self, order: &MonomialOrder) -> Result<EchelonPresentation> {
        EchelonPresentation::new(order.clone(), self.generators.clone())
    }
}

pub fn enlarge(p: &EchelonPresentation, target: &Target, max_rounds: usize) -> Result<EnlargementState> {
    run(p, target, max_rounds, false)
}

pub fn enlarge_reduced(p: &EchelonPresentation, target: &Target, max_rounds: usize) -> Result<EnlargementState> {
    run(p, target, max_rounds, true)
}

/// Pairs `(i, j)`, `i < j < ell`, with `j >= ell1`, in lexicographic order.
fn new_pairs(ell: usize, ell1: usize) -> Vec<(usize, usize)> {
    (0..ell)
        .flat_map(|i| (i + 1..ell).map(move |j| (i, j)))
        .filter(|&(_, j)| j >= ell1)
        .collect()
}

fn run(p: &EchelonPresentation, target: &Target, max_rounds: usize, reduce: bool) -> Result<EnlargementState> {
    if p.is_empty() {
        return Err(Error::EmptyPresentation);
    }
    if let Target::Monomial(t) = target {
        if t.len() != p.nvars() {
            return Err(Error::Dimension {
                expected: p.nvars(),
                found: t.len(),
            });
        }
    }
    let order = p.order();
    let cap = match target {
        Target::DegreeCap(d) => Some(*d),
        Target::Monomial(_) => None,
    };
    let mut gens = p.generators().to_vec();
    let mut ell = gens.len();
    let mut ell1 = 0;
    let mut rounds = 0;
    let mut trace = Vec::new();
    let mut capped = false;

    let (outcome, covering) = loop {
        if let Target::Monomial(t) = target {
            if let Some(c) = covering_generator(order, &gens, t) {
                break (Outcome::Covered, Some(c));
            }
        }
        if ell1 >= ell {
            break (
                if capped {
                    Outcome::DegreeCapped
                } else {
                    Outcome::Saturated
                },
                None,
            );
        }
        if rounds == max_rounds {
            break (Outcome::MaxRounds, None);
        }
        rounds += 1;
        let pairs = new_pairs(ell, ell1);
        ell1 = ell;
        for (i, j) in pairs {
            let pair = s_pair(&gens, order, i, j);
            if !pair.admissible {
                trace.push(TraceEntry {
                    round: rounds,
                    pair,
                    raw_initial: None,
                    candidates: Vec::new(),
                });
                continue;
            }
            let (raw, scope) = combine(&gens, &pair)?;
            let cancelled = pair.cancelled(order, &gens);
            let raw_initial = initial_term(&raw, order).map(|t| t.exp);
            let proposals = if reduce {
                reduced_candidates(&gens, order, &raw, scope)?
            } else {
                vec![(CandidateKind::Raw, raw, scope)]
            };
            let mut candidates = Vec::new();
            for (kind, series, scope) in proposals {
                let initial = initial_term(&series, order).map(|t| t.exp);
                let action = match &initial {
                    None => Action::Zero,
                    Some(e) => {
                        if order.cmp(e, &cancelled) != Ordering::Greater {
                            return Err(Error::Domain(format!(
                                "new initial exponent {e:?} does not exceed cancelled {cancelled:?}"
                            )));
                        }
                        if cap.is_some_and(|d| e.degree() > d) {
                            capped = true;
                            Action::AboveDegreeCap { degree: e.degree() }
                        } else if let Some(existing) = best_equal(&gens, &series).filter(|&u| gens[u].scope() >= scope)
                        {
                            Action::Duplicate { existing }
                        } else {
                            gens.push(ScopedGenerator::new(series, scope)?);
                            ell += 1;
                            Action::Inserted { index: ell - 1 }
                        }
                    }
                };
                candidates.push(Candidate {
                    kind,
                    scope,
                    initial,
                    action,
                });
            }
            trace.push(TraceEntry {
                round: rounds,
                pair,
                raw_initial,
                candidates,
            });
        }
    };

    let pending_pairs = match outcome {
        Outcome::MaxRounds | Outcome::Covered => new_pairs(ell, ell1),
        _ => Vec::new(),
    };
    Ok(EnlargementState {
        generators: gens,
        ell,
        ell1,
        rounds,
        outcome,
        covering,
        pending_pairs,
        trace,
    })
}

/// Element equal to `s` (at the common precision) with the largest scope.
fn best_equal(gens: &[ScopedGenerator], s: &Series) -> Option<usize> {
    gens.iter()
        .enumerate()
        .filter(|(_, g)| g.series().agrees_with(s))
        .max_by_key(|(u, g)| (g.scope(), std::cmp::Reverse(*u)))
        .map(|(u, _)| u)
}

fn reduced_candidates(
    gens: &[ScopedGenerator],
    order: &MonomialOrder,
    raw: &Series,
    scope: usize,
) -> Result<Vec<(CandidateKind, Series, usize)>> {
    if raw.is_zero() {
        return Ok(vec![(CandidateKind::Reduced, raw.clone(), scope)]);
    }
    let current = EchelonPresentation::new(order.clone(), gens.to_vec())?;
    let full = echelon_divide(raw, &current, Some(scope))?;
    let mut out = Vec::new();
    if full.remainder_scope < scope {
        let (wide, _) = current.filtered(|g| g.scope() >= scope);
        let kept = if wide.is_empty() {
            raw.clone()
        } else {
            echelon_divide(raw, &wide, Some(scope))?.remainder
        };
        out.push((CandidateKind::ScopePreserving, kept, scope));
    }
    out.push((CandidateKind::Reduced, full.remainder, full.remainder_scope));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Member,
    NotMember,
    /// Enlargement hit its round budget with a nonzero remainder.
    Indeterminate,
}

#[derive(Clone, Debug)]
pub struct Membership {
    pub verdict: Verdict,
    pub witness: DivisionResult,
    pub basis: EnlargementState,
}

/// Whether `f` lies in the echelon modulo terms of degree above `degree`.
///
/// Enlarges the generators with [`enlarge_reduced`] capped at `degree` and
/// divides `f` by the result. A zero remainder (up to `degree`) proves
/// membership. A nonzero one disproves it when the order compares total
/// degree first; under other orders the enlargement need not be complete
/// below the cap.
///
/// Under orders that are not degree compatible, rewriting can move terms
/// from above the working precision down to it, so the generators should
/// carry more precision than `degree` (one extra degree suffices when the
/// rewriting lowers degrees by at most one along each chain).
pub fn membership_mod_degree(
    f: &Series,
    p: &EchelonPresentation,
    degree: u32,
    max_rounds: usize,
) -> Result<Membership> {
    if degree > f.prec() {
        return Err(Error::InsufficientPrecision {
            needed: degree,
            available: f.prec(),
        });
    }
    let basis = if p.is_empty() {
        EnlargementState {
            generators: Vec::new(),
            ell: 0,
            ell1: 0,
            rounds: 0,
            outcome: Outcome::Saturated,
            covering: None,
            pending_pairs: Vec::new(),
            trace: Vec::new(),
        }
    } else {
        enlarge_reduced(p, &Target::DegreeCap(degree), max_rounds)?
    };
    let presentation = basis.presentation(p.order())?;
    let witness = echelon_divide(f, &presentation, None)?;
    if witness.prec < degree {
        return Err(Error::InsufficientPrecision {
            needed: degree,
            available: witness.prec,
        });
    }
    let clean = witness.remainder.truncate(degree).is_zero();
    let verdict = match (clean, basis.outcome) {
        (true, _) => Verdict::Member,
        (false, Outcome::MaxRounds) => Verdict::Indeterminate,
        (false, _) => Verdict::NotMember,
    };
    Ok(Membership {
        verdict,
        witness,
        basis,
    })
}

/// True when the coefficient is zero; used by tests on relation sums.
pub fn relation_vanishes(t_i: &Term, m_i: &Term, t_j: &Term, m_j: &Term) -> bool {
    let a = m_i.exp.add(&t_i.exp);
    let b = m_j.exp.add(&t_j.exp);
    a == b && (&m_i.coeff * &t_i.coeff + &m_j.coeff * &t_j.coeff).is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{integer, rational, Rational};

    fn term(c: Rational, e: &[u32]) -> Term {
        Term::new(c, Exponent::new(e.to_vec()))
    }

    #[test]
    fn relation_of_xz_and_yz() {
        let (mi, mj) = minimal_relation(&term(integer(1), &[1, 0, 1]), &term(integer(1), &[0, 1, 1]));
        assert_eq!(mi, term(integer(-1), &[0, 1, 0]));
        assert_eq!(mj, term(integer(1), &[1, 0, 0]));
    }

    #[test]
    fn relation_of_equal_monomials() {
        let t = term(integer(1), &[2, 0]);
        let (mi, mj) = minimal_relation(&t, &t);
        assert_eq!(mi, term(integer(-1), &[0, 0]));
        assert_eq!(mj, term(integer(1), &[0, 0]));
    }

    #[test]
    fn relation_with_nonunit_coefficient() {
        let ti = term(rational(1, 12), &[2, 0, 2]);
        let tj = term(integer(1), &[0, 1, 1]);
        let (mi, mj) = minimal_relation(&ti, &tj);
        assert_eq!(mi, term(integer(-1), &[0, 1, 0]));
        assert_eq!(mj, term(rational(1, 12), &[2, 0, 1]));
        assert!(relation_vanishes(&ti, &mi, &tj, &mj));
    }

    fn poly(n: usize, prec: u32, terms: &[(&[u32], i64)]) -> Series {
        Series::from_terms(
            n,
            prec,
            terms.iter().map(|(e, c)| (Exponent::new(e.to_vec()), integer(*c))),
        )
        .unwrap()
    }

    #[test]
    fn covered_target_exits_immediately() {
        let p = EchelonPresentation::from_pairs(
            MonomialOrder::grlex(2),
            vec![(poly(2, 4, &[(&[1, 0], 1)]), 2), (poly(2, 4, &[(&[0, 1], 1)]), 2)],
        )
        .unwrap();
        let st = enlarge(&p, &Target::Monomial(Exponent::from([1, 1])), 10).unwrap();
        assert_eq!(st.outcome, Outcome::Covered);
        assert_eq!(st.generators.len(), 2);
        assert_eq!(st.rounds, 0);
    }

    #[test]
    fn inadmissible_pairs_are_discarded() {
        let x = poly(2, 4, &[(&[1, 0], 1)]);
        let y = poly(2, 4, &[(&[0, 1], 1)]);
        // relation (-y, x): y is outside x's scope 1
        let p = EchelonPresentation::from_pairs(MonomialOrder::grlex(2), vec![(x, 1), (y, 2)]).unwrap();
        assert_eq!(s_combination(p.generators(), p.order(), 0, 1).unwrap(), None);
        let st = enlarge(&p, &Target::DegreeCap(4), 5).unwrap();
        assert_eq!(st.outcome, Outcome::Saturated);
        assert!(!st.trace[0].pair.admissible);
    }

    #[test]
    fn duplicate_with_lower_scope_is_skipped() {
        // S(x, x + y^2) = y^2 with scope 1, already present with scope 2
        let p = EchelonPresentation::from_pairs(
            MonomialOrder::grlex(2),
            vec![
                (poly(2, 6, &[(&[1, 0], 1)]), 1),
                (poly(2, 6, &[(&[1, 0], 1), (&[0, 2], 1)]), 2),
                (poly(2, 6, &[(&[0, 2], 1)]), 2),
            ],
        )
        .unwrap();
        let st = enlarge(&p, &Target::DegreeCap(6), 10).unwrap();
        assert_eq!(st.trace[0].candidates[0].action, Action::Duplicate { existing: 2 });
    }

    #[test]
    fn scope_drop_keeps_a_scope_preserving_element() {
        // f1, f2 scope 2 and f3 scope 1; S(f1, f2) reduces through f3
        let p = EchelonPresentation::from_pairs(
            MonomialOrder::grlex(2),
            vec![
                (poly(2, 6, &[(&[1, 0], 1)]), 2),
                (poly(2, 6, &[(&[1, 0], 1), (&[0, 2], 1), (&[0, 3], 1)]), 2),
                (poly(2, 6, &[(&[0, 2], 1)]), 1),
            ],
        )
        .unwrap();
        let st = enlarge_reduced(&p, &Target::DegreeCap(6), 20).unwrap();
        let first = &st.trace[0];
        assert_eq!((first.pair.i, first.pair.j), (0, 1));
        let kinds: Vec<_> = first.candidates.iter().map(|c| (c.kind, c.scope)).collect();
        assert_eq!(
            kinds,
            vec![(CandidateKind::ScopePreserving, 2), (CandidateKind::Reduced, 1)]
        );
        // y^2 + y^3 survives with scope 2
        let kept = &st.generators[3];
        assert_eq!(kept.scope(), 2);
        assert_eq!(*kept.series(), poly(2, 6, &[(&[0, 2], 1), (&[0, 3], 1)]));
    }

    #[test]
    fn zero_remainder_inserts_nothing() {
        let p = EchelonPresentation::from_pairs(
            MonomialOrder::grlex(2),
            vec![
                (poly(2, 6, &[(&[1, 0], 1)]), 2),
                (poly(2, 6, &[(&[1, 0], 1), (&[0, 2], 1)]), 2),
                (poly(2, 6, &[(&[0, 2], 1)]), 2),
            ],
        )
        .unwrap();
        let st = enlarge_reduced(&p, &Target::DegreeCap(6), 10).unwrap();
        assert_eq!(st.generators.len(), 3);
        assert_eq!(st.outcome, Outcome::Saturated);
        assert!(st
            .trace
            .iter()
            .flat_map(|t| &t.candidates)
            .all(|c| c.action == Action::Zero));
    }

    #[test]
    fn empty_presentation_is_rejected() {
        let p = EchelonPresentation::new(MonomialOrder::grlex(2), vec![]).unwrap();
        assert_eq!(
            enlarge(&p, &Target::DegreeCap(3), 3).unwrap_err(),
            Error::EmptyPresentation
        );
    }

    #[test]
    fn membership_of_zero_and_of_a_combination() {
        let p = EchelonPresentation::from_pairs(
            MonomialOrder::grlex(2),
            vec![
                (poly(2, 6, &[(&[1, 0], 1), (&[0, 2], 1)]), 1),
                (poly(2, 6, &[(&[0, 1], 1), (&[1, 1], 1)]), 2),
            ],
        )
        .unwrap();
        let m = membership_mod_degree(&Series::zero(2, 6), &p, 4, 50).unwrap();
        assert_eq!(m.verdict, Verdict::Member);
        assert!(m.witness.remainder.is_zero());

        let f = poly(2, 6, &[(&[0, 1], 3), (&[1, 1], 3)]);
        assert_eq!(membership_mod_degree(&f, &p, 4, 50).unwrap().verdict, Verdict::Member);
        assert!(membership_mod_degree(&f, &p, 7, 50).is_err());
    }
}
