//! Brute-force certification by exact linear algebra.
//!
//! Truncated membership `f ≡ sum_i a_i f_i (mod degree > d)` is a linear
//! system in the coefficients of the `a_i`: one unknown per generator and
//! monomial of degree at most `d` in that generator's scope variables, one
//! equation per monomial of degree at most `d`. Nothing here uses division
//! or the partition, so it serves as an independent check on both.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::echelon::{EchelonPresentation, Region, RegionPartition};
use crate::error::{Error, Result};
use crate::series::{exponents_up_to, Exponent, Rational, Series};

/// A column of the system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Unknown {
    /// Coefficient of `x^exp` in quotient `generator`.
    Quotient { generator: usize, exp: Exponent },
    /// Coefficient of `x^exp` in a remainder (support-constrained systems).
    Remainder { exp: Exponent },
}

type Row = BTreeMap<usize, Rational>;

/// Sparse exact system `A u = rhs` with rows indexed by exponents.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub unknowns: Vec<Unknown>,
    pub equations: Vec<Exponent>,
    rows: Vec<Row>,
}

impl LinearSystem {
    fn new(nvars: usize, degree: u32) -> Self {
        let equations = exponents_up_to(nvars, degree);
        LinearSystem {
            unknowns: Vec::new(),
            rows: vec![Row::new(); equations.len()],
            equations,
        }
    }

    fn row_of(&self, e: &Exponent) -> Option<usize> {
        self.equations.binary_search(e).ok()
    }

    /// Adds the column of `x^exp * f_generator`, truncated at the system degree.
    fn push_quotient(&mut self, generator: usize, exp: Exponent, f: &Series) {
        let col = self.unknowns.len();
        for (t, c) in f.terms() {
            if let Some(r) = self.row_of(&t.add(&exp)) {
                self.rows[r].insert(col, c.clone());
            }
        }
        self.unknowns.push(Unknown::Quotient { generator, exp });
    }

    fn push_remainder(&mut self, exp: Exponent) {
        let col = self.unknowns.len();
        let r = self.row_of(&exp).expect("remainder exponent within degree");
        self.rows[r].insert(col, Rational::one());
        self.unknowns.push(Unknown::Remainder { exp });
    }

    fn rhs(&self, f: &Series) -> Vec<Rational> {
        self.equations.iter().map(|e| f.coeff(e)).collect()
    }

    /// Reduced row echelon form of `[A | rhs]`, pivoting on the first
    /// nonzero entry. `rhs` is stored in column `unknowns.len()`.
    fn eliminate(&self, rhs: Option<Vec<Rational>>) -> Echelon {
        let ncols = self.unknowns.len();
        let mut rows = self.rows.clone();
        if let Some(rhs) = rhs {
            for (row, c) in rows.iter_mut().zip(rhs) {
                if !c.is_zero() {
                    row.insert(ncols, c);
                }
            }
        }
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..=ncols {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].contains_key(&col)) else {
                continue;
            };
            rows.swap(rank, p);
            let inv = rows[rank][&col].recip();
            for v in rows[rank].values_mut() {
                *v *= &inv;
            }
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r == rank {
                    continue;
                }
                if let Some(factor) = row.get(&col).cloned() {
                    for (c, v) in &pivot_row {
                        let entry = row.entry(*c).or_insert_with(Rational::zero);
                        *entry -= &factor * v;
                        if entry.is_zero() {
                            row.remove(c);
                        }
                    }
                }
            }
            pivots.push(col);
            rank += 1;
        }
        rows.truncate(rank);
        Echelon { ncols, rows, pivots }
    }
}

struct Echelon {
    ncols: usize,
    rows: Vec<Row>,
    /// Pivot column of each row.
    pivots: Vec<usize>,
}

impl Echelon {
    fn consistent(&self) -> bool {
        !self.pivots.contains(&self.ncols)
    }

    fn free_columns(&self) -> usize {
        self.ncols - self.pivots.iter().filter(|&&c| c < self.ncols).count()
    }

    /// The solution with every free unknown set to zero.
    fn particular(&self) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.ncols];
        for (row, &col) in self.rows.iter().zip(&self.pivots) {
            if col < self.ncols {
                x[col] = row.get(&self.ncols).cloned().unwrap_or_else(Rational::zero);
            }
        }
        x
    }

    /// The kernel vector with free column `free` set to one and every other
    /// free column zero.
    fn kernel_vector(&self, free: usize) -> Vec<Rational> {
        let mut x = vec![Rational::zero(); self.ncols];
        x[free] = Rational::one();
        for (row, &col) in self.rows.iter().zip(&self.pivots) {
            if let Some(v) = row.get(&free) {
                x[col] = -v.clone();
            }
        }
        x
    }

    /// Columns that are nonzero in some kernel vector: free columns, and
    /// pivot columns whose row touches a free column.
    fn kernel_support(&self) -> Vec<bool> {
        let mut pivot = vec![false; self.ncols];
        for &c in &self.pivots {
            if c < self.ncols {
                pivot[c] = true;
            }
        }
        let mut active: Vec<bool> = pivot.iter().map(|p| !p).collect();
        for (row, &col) in self.rows.iter().zip(&self.pivots) {
            if col < self.ncols && row.keys().any(|&c| c < self.ncols && !pivot[c]) {
                active[col] = true;
            }
        }
        active
    }
}

fn check_precision(p: &EchelonPresentation, f: Option<&Series>, degree: u32) -> Result<()> {
    let available = f
        .map(Series::prec)
        .into_iter()
        .chain(p.min_prec())
        .min()
        .unwrap_or(u32::MAX);
    if degree > available {
        return Err(Error::InsufficientPrecision {
            needed: degree,
            available,
        });
    }
    if let Some(f) = f {
        if f.nvars() != p.nvars() {
            return Err(Error::Dimension {
                expected: p.nvars(),
                found: f.nvars(),
            });
        }
    }
    Ok(())
}

/// Unrestricted system: every scope monomial of degree at most `degree`.
pub fn membership_system(p: &EchelonPresentation, degree: u32) -> LinearSystem {
    let mut sys = LinearSystem::new(p.nvars(), degree);
    let monomials = exponents_up_to(p.nvars(), degree);
    for (i, g) in p.generators().iter().enumerate() {
        for e in monomials.iter().filter(|e| e.within_scope(g.scope())) {
            sys.push_quotient(i, e.clone(), g.series());
        }
    }
    sys
}

fn quotients_from(sys: &LinearSystem, x: &[Rational], nvars: usize, k: usize, prec: u32) -> Result<Vec<Series>> {
    let mut terms: Vec<Vec<(Exponent, Rational)>> = vec![Vec::new(); k];
    for (u, c) in sys.unknowns.iter().zip(x) {
        if let Unknown::Quotient { generator, exp } = u {
            terms[*generator].push((exp.clone(), c.clone()));
        }
    }
    terms.into_iter().map(|t| Series::from_terms(nvars, prec, t)).collect()
}

#[derive(Clone, Debug)]
pub struct OracleMembership {
    pub feasible: bool,
    /// Scope-supported quotients, present when feasible.
    pub solution: Option<Vec<Series>>,
}

/// Whether `f ≡ sum_i a_i f_i (mod degree > d)` has a scope-respecting
/// solution, with one solution when it does.
pub fn oracle_membership(f: &Series, p: &EchelonPresentation, degree: u32) -> Result<OracleMembership> {
    check_precision(p, Some(f), degree)?;
    let sys = membership_system(p, degree);
    let ech = sys.eliminate(Some(sys.rhs(f)));
    if !ech.consistent() {
        return Ok(OracleMembership {
            feasible: false,
            solution: None,
        });
    }
    let quotients = quotients_from(&sys, &ech.particular(), p.nvars(), p.len(), degree)?;
    Ok(OracleMembership {
        feasible: true,
        solution: Some(quotients),
    })
}

/// Census of the truncated relation space of the generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelationCensus {
    pub degree: u32,
    pub kernel_dim: usize,
    /// Least degree of a term that is nonzero in some relation.
    pub min_order: Option<u32>,
    /// Orders at or above this are attributed to truncation.
    pub threshold: u32,
    /// Number of quotient coefficients, by degree, that some relation uses.
    pub active_by_order: BTreeMap<u32, usize>,
}

impl RelationCensus {
    /// The least relation order below the threshold, if any.
    pub fn reported_order(&self) -> Option<u32> {
        self.min_order.filter(|o| *o < self.threshold)
    }
}

/// Relations `sum_i a_i f_i ≡ 0 (mod degree > d)`. The threshold
/// `d - max_i deg in(f_i)` separating genuine relations from truncation
/// artifacts is a heuristic.
pub fn oracle_relation_order(p: &EchelonPresentation, degree: u32) -> Result<RelationCensus> {
    check_precision(p, None, degree)?;
    let sys = membership_system(p, degree);
    let ech = sys.eliminate(None);
    let mut active_by_order = BTreeMap::new();
    for (u, on) in sys.unknowns.iter().zip(ech.kernel_support()) {
        if let (true, Unknown::Quotient { exp, .. }) = (on, u) {
            *active_by_order.entry(exp.degree()).or_insert(0) += 1;
        }
    }
    let top = p.initial_exponents().iter().map(Exponent::degree).max().unwrap_or(0);
    Ok(RelationCensus {
        degree,
        kernel_dim: ech.free_columns(),
        min_order: active_by_order.keys().next().copied(),
        threshold: degree.saturating_sub(top),
        active_by_order,
    })
}

/// A relation `sum_i a_i f_i ≡ 0 (mod degree > d)` using a quotient
/// coefficient of the least possible degree, or `None` when the kernel is
/// trivial.
pub fn oracle_low_order_relation(p: &EchelonPresentation, degree: u32) -> Result<Option<Vec<Series>>> {
    check_precision(p, None, degree)?;
    let sys = membership_system(p, degree);
    let ech = sys.eliminate(None);
    let active = ech.kernel_support();
    let lowest = sys
        .unknowns
        .iter()
        .enumerate()
        .filter(|(c, _)| active[*c])
        .min_by_key(|(c, u)| match u {
            Unknown::Quotient { exp, .. } => (exp.degree(), *c),
            Unknown::Remainder { .. } => (u32::MAX, *c),
        })
        .map(|(c, _)| c);
    let Some(col) = lowest else { return Ok(None) };
    let free = match ech.pivots.iter().position(|&c| c == col) {
        None => col,
        Some(r) => *ech.rows[r]
            .keys()
            .find(|&&c| c != col && c < ech.ncols)
            .expect("active pivot row touches a free column"),
    };
    let x = ech.kernel_vector(free);
    Ok(Some(quotients_from(&sys, &x, p.nvars(), p.len(), degree)?))
}

/// Solution of the division equations under the support constraints.
#[derive(Clone, Debug)]
pub struct ConstrainedSolution {
    pub consistent: bool,
    /// Dimension of the solution space; zero means the solution is unique.
    pub free_dimension: usize,
    pub quotients: Vec<Series>,
    pub remainder: Series,
}

/// Solves `f ≡ sum_i a_i f_i + b (mod degree > d)` with `x^e` allowed in
/// `a_i` only when `in(f_i) x^e` lies in the slice of generator `i` and has
/// degree at most `d`, and `b` supported in the uncovered region.
///
/// Every exponent of degree at most `d` carries exactly one unknown and
/// each column starts at its own exponent, so the system is square and
/// triangular; a unique solution certifies the division result.
pub fn oracle_support_constrained(f: &Series, p: &EchelonPresentation, degree: u32) -> Result<ConstrainedSolution> {
    check_precision(p, Some(f), degree)?;
    let partition = RegionPartition::build(p)?;
    let mut sys = LinearSystem::new(p.nvars(), degree);
    for t in exponents_up_to(p.nvars(), degree) {
        match partition.classify(&t) {
            Region::Complement => sys.push_remainder(t),
            Region::Slice(s) => {
                let slice = &partition.slices()[s];
                let e = t.checked_sub(&slice.base).expect("slice contains its translate");
                sys.push_quotient(slice.owner, e, p.generators()[slice.owner].series());
            }
        }
    }
    let ech = sys.eliminate(Some(sys.rhs(f)));
    let consistent = ech.consistent();
    let x = ech.particular();
    let quotients = quotients_from(&sys, &x, p.nvars(), p.len(), degree)?;
    let remainder = Series::from_terms(
        p.nvars(),
        degree,
        sys.unknowns.iter().zip(&x).filter_map(|(u, c)| match u {
            Unknown::Remainder { exp } => Some((exp.clone(), c.clone())),
            Unknown::Quotient { .. } => None,
        }),
    )?;
    Ok(ConstrainedSolution {
        consistent,
        free_dimension: ech.free_columns(),
        quotients,
        remainder,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::MonomialOrder;
    use crate::series::integer;

    fn var(n: usize, i: usize, prec: u32) -> Series {
        Series::var(n, i, prec)
    }

    #[test]
    fn zero_is_feasible_with_zero_solution() {
        let p = EchelonPresentation::from_pairs(MonomialOrder::grlex(2), vec![(var(2, 0, 4), 1)]).unwrap();
        let m = oracle_membership(&Series::zero(2, 4), &p, 4).unwrap();
        assert!(m.feasible);
        assert!(m.solution.unwrap().iter().all(Series::is_zero));
    }

    #[test]
    fn scope_blocks_membership() {
        // x with scope 1 generates x * K[[x]], which misses xy
        let p = EchelonPresentation::from_pairs(MonomialOrder::grlex(2), vec![(var(2, 0, 4), 1)]).unwrap();
        let xy = var(2, 0, 4).mul(&var(2, 1, 4)).unwrap();
        assert!(!oracle_membership(&xy, &p, 3).unwrap().feasible);
        let x3 = Series::monomial(2, Exponent::from([3, 0]), integer(2), 4);
        let m = oracle_membership(&x3, &p, 4).unwrap();
        assert!(m.feasible);
        assert_eq!(
            m.solution.unwrap()[0].truncate(2),
            Series::monomial(2, Exponent::from([2, 0]), integer(2), 2)
        );
    }

    #[test]
    fn single_unit_has_trivial_kernel() {
        let p = EchelonPresentation::from_pairs(MonomialOrder::grlex(2), vec![(Series::one(2, 5), 2)]).unwrap();
        let c = oracle_relation_order(&p, 5).unwrap();
        assert_eq!(c.kernel_dim, 0);
        assert_eq!(c.min_order, None);
    }

    #[test]
    fn duplicated_generator_has_order_zero_relation() {
        let x = var(2, 0, 2);
        let p = EchelonPresentation::from_pairs(MonomialOrder::grlex(2), vec![(x.clone(), 2), (x, 2)]).unwrap();
        let c = oracle_relation_order(&p, 2).unwrap();
        assert_eq!(c.min_order, Some(0));
        assert_eq!(c.reported_order(), Some(0));
    }

    #[test]
    fn low_order_witness_is_a_relation() {
        let x = var(2, 0, 3);
        let xy = x.mul(&var(2, 1, 3)).unwrap().add(&x).unwrap();
        let p = EchelonPresentation::from_pairs(MonomialOrder::grlex(2), vec![(x, 2), (xy, 2)]).unwrap();
        let rel = oracle_low_order_relation(&p, 3).unwrap().unwrap();
        let mut sum = Series::zero(2, 3);
        for (a, g) in rel.iter().zip(p.generators()) {
            sum = sum.add(&a.mul_polynomial(g.series(), 3).unwrap()).unwrap();
        }
        assert!(sum.is_zero());
        assert!(rel.iter().any(|a| !a.is_zero() && a.order() == 0));
        let unit = EchelonPresentation::from_pairs(MonomialOrder::grlex(2), vec![(Series::one(2, 3), 2)]).unwrap();
        assert!(oracle_low_order_relation(&unit, 3).unwrap().is_none());
    }

    #[test]
    fn precision_is_checked() {
        let p = EchelonPresentation::from_pairs(MonomialOrder::grlex(2), vec![(var(2, 0, 3), 2)]).unwrap();
        assert!(oracle_membership(&Series::zero(2, 6), &p, 4).is_err());
        assert!(oracle_relation_order(&p, 4).is_err());
    }

    #[test]
    fn constrained_system_is_unique() {
        let f = Series::from_terms(
            2,
            5,
            vec![
                (Exponent::from([0, 2]), integer(1)),
                (Exponent::from([1, 1]), integer(3)),
                (Exponent::from([2, 3]), integer(-1)),
            ],
        )
        .unwrap();
        let g = var(2, 0, 5).add(&var(2, 1, 5).mul(&var(2, 1, 5)).unwrap()).unwrap();
        let p = EchelonPresentation::from_pairs(MonomialOrder::grlex(2), vec![(g, 1)]).unwrap();
        let s = oracle_support_constrained(&f, &p, 5).unwrap();
        assert!(s.consistent);
        assert_eq!(s.free_dimension, 0);
        let back = s.quotients[0]
            .mul_polynomial(p.generators()[0].series(), 5)
            .unwrap()
            .add(&s.remainder)
            .unwrap();
        assert_eq!(back.truncate(5), f);
    }
}
