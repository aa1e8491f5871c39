//! Finitary echelons: generators with assigned scopes, and the region of
//! exponents covered by their initial monomials.
//!
//! A generator `f` with scope `s` contributes `K[[x_1..x_s]] * f` to the
//! echelon, so its initial exponent `a` covers the translate
//! `a + (N^s x 0^(n-s))`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::order::{initial_term, MonomialOrder};
use crate::series::{exponents_up_to, Exponent, Series, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScopedGenerator {
    series: Series,
    scope: usize,
}

impl ScopedGenerator {
    pub fn new(series: Series, scope: usize) -> Result<Self> {
        if scope > series.nvars() {
            return Err(Error::ScopeOutOfRange {
                scope,
                nvars: series.nvars(),
            });
        }
        if series.is_zero() {
            return Err(Error::ZeroGenerator { index: 0 });
        }
        Ok(ScopedGenerator { series, scope })
    }

    pub fn series(&self) -> &Series {
        &self.series
    }

    pub fn scope(&self) -> usize {
        self.scope
    }

    pub fn initial_term(&self, order: &MonomialOrder) -> Term {
        initial_term(&self.series, order).expect("generators are nonzero")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EchelonPresentation {
    nvars: usize,
    order: MonomialOrder,
    generators: Vec<ScopedGenerator>,
}

impl EchelonPresentation {
    pub fn new(order: MonomialOrder, generators: Vec<ScopedGenerator>) -> Result<Self> {
        let nvars = order.nvars();
        for g in &generators {
            if g.series.nvars() != nvars {
                return Err(Error::Dimension {
                    expected: nvars,
                    found: g.series.nvars(),
                });
            }
        }
        Ok(EchelonPresentation {
            nvars,
            order,
            generators,
        })
    }

    /// Convenience constructor from `(series, scope)` pairs.
    pub fn from_pairs<I>(order: MonomialOrder, pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Series, usize)>,
    {
        let generators = pairs
            .into_iter()
            .enumerate()
            .map(|(i, (s, scope))| {
                ScopedGenerator::new(s, scope).map_err(|e| match e {
                    Error::ZeroGenerator { .. } => Error::ZeroGenerator { index: i },
                    other => other,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(order, generators)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> &MonomialOrder {
        &self.order
    }

    pub fn generators(&self) -> &[ScopedGenerator] {
        &self.generators
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    /// Smallest generator precision, `None` without generators.
    pub fn min_prec(&self) -> Option<u32> {
        self.generators.iter().map(|g| g.series.prec()).min()
    }

    /// Initial exponents of the generators, in generator order.
    pub fn initial_exponents(&self) -> Vec<Exponent> {
        self.generators
            .iter()
            .map(|g| g.initial_term(&self.order).exp)
            .collect()
    }

    /// The presentation restricted to the generators selected by `keep`,
    /// together with their original indices.
    pub fn filtered<F>(&self, keep: F) -> (EchelonPresentation, Vec<usize>)
    where
        F: Fn(&ScopedGenerator) -> bool,
    {
        let (indices, generators): (Vec<_>, Vec<_>) = self
            .generators
            .iter()
            .enumerate()
            .filter(|(_, g)| keep(g))
            .map(|(i, g)| (i, g.clone()))
            .unzip();
        (
            EchelonPresentation {
                nvars: self.nvars,
                order: self.order.clone(),
                generators,
            },
            indices,
        )
    }
}

/// One piece of the partition of the covered region: the translate of
/// `base` by `N^scope x 0`, minus every earlier slice.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slice {
    pub base: Exponent,
    pub scope: usize,
    /// Index of the generator in the original presentation.
    pub owner: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    /// Position of the slice in [`RegionPartition::slices`].
    Slice(usize),
    Complement,
}

/// Disjoint partition of `A = U_i a_i + (N^{s_i} x 0)`. Slices are kept
/// implicit: membership is decided by first match in slice order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegionPartition {
    nvars: usize,
    slices: Vec<Slice>,
}

impl RegionPartition {
    /// Orders generators by decreasing scope (stable on ties) and slices
    /// the region in that order.
    pub fn build(p: &EchelonPresentation) -> Result<Self> {
        let mut slices = p
            .generators
            .iter()
            .enumerate()
            .map(|(i, g)| {
                let t = initial_term(&g.series, &p.order).ok_or(Error::ZeroGenerator { index: i })?;
                Ok(Slice {
                    base: t.exp,
                    scope: g.scope,
                    owner: i,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        slices.sort_by_key(|s| std::cmp::Reverse(s.scope));
        Ok(RegionPartition { nvars: p.nvars, slices })
    }

    pub fn slices(&self) -> &[Slice] {
        &self.slices
    }

    pub fn classify(&self, e: &Exponent) -> Region {
        self.slices
            .iter()
            .position(|s| e.in_translate(&s.base, s.scope))
            .map_or(Region::Complement, Region::Slice)
    }

    /// The generator owning `e`, if any.
    pub fn owner_of(&self, e: &Exponent) -> Option<usize> {
        match self.classify(e) {
            Region::Slice(i) => Some(self.slices[i].owner),
            Region::Complement => None,
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }
}

/// All exponents of degree at most `degree` covered by the scoped initial
/// monomials of `basis` (initial terms taken under `p`'s order).
pub fn initial_region_to_degree(p: &EchelonPresentation, basis: &[ScopedGenerator], degree: u32) -> BTreeSet<Exponent> {
    let bases: Vec<(Exponent, usize)> = basis.iter().map(|g| (g.initial_term(&p.order).exp, g.scope)).collect();
    exponents_up_to(p.nvars, degree)
        .into_iter()
        .filter(|e| bases.iter().any(|(b, s)| e.in_translate(b, *s)))
        .collect()
}

/// True if `target` lies in `K[[x_1..x_s]] * in(g)` for some generator.
pub fn covering_generator(order: &MonomialOrder, basis: &[ScopedGenerator], target: &Exponent) -> Option<usize> {
    basis
        .iter()
        .position(|g| target.in_translate(&g.initial_term(order).exp, g.scope))
}
