//! Monomial sections of `mD` and the graded algebra they span.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use super::{MetrizedToricDivisor, ToricError};
use crate::adelic::{DiagonalAdelicBundle, Nats};
use crate::concave::{Entry, FilteredGradedAlgebra, RoofProvenance};
use crate::scalar::Scalar;
use crate::{Polytope, Rational};

/// Integer points of `mP`, in lexicographic order.
pub fn lattice_points(polytope: &Polytope, m: u32) -> Vec<Vec<i64>> {
    let d = polytope.dim();
    let mr = Rational::from_integer(BigInt::from(m));
    // Clear denominators: each constraint becomes a·x ≤ b over the integers.
    let cons: Vec<(Vec<i128>, i128)> = polytope
        .inequalities()
        .iter()
        .map(|h| {
            let rhs = h.offset.clone() * mr.clone();
            let l = h.normal.iter().chain(std::iter::once(&rhs)).fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            let scale = |x: &Rational| (x.clone() * Rational::from_integer(l.clone())).to_integer().to_i128().expect("constraint fits in i128");
            (h.normal.iter().map(scale).collect(), scale(&rhs))
        })
        .collect();
    let (lo, hi) = polytope.bounding_box();
    let lo: Vec<i64> = lo.iter().map(|x| (x.clone() * mr.clone()).ceil().to_integer().to_i64().expect("fits")).collect();
    let hi: Vec<i64> = hi.iter().map(|x| (x.clone() * mr.clone()).floor().to_integer().to_i64().expect("fits")).collect();
    let mut out = Vec::new();
    let mut x = lo.clone();
    if lo.iter().zip(&hi).any(|(a, b)| a > b) {
        return out;
    }
    loop {
        if cons.iter().all(|(a, b)| a.iter().zip(&x).map(|(ai, xi)| ai * i128::from(*xi)).sum::<i128>() <= *b) {
            out.push(x.clone());
        }
        // Odometer increment, last coordinate fastest.
        let mut axis = d;
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            if x[axis] < hi[axis] {
                x[axis] += 1;
                for k in axis + 1..d {
                    x[k] = lo[k];
                }
                break;
            }
        }
    }
}

/// Per-level bundles of monomial sections and the filtered algebra.
#[derive(Clone, Debug)]
pub struct ToricSections {
    pub bundles: Vec<(u32, DiagonalAdelicBundle)>,
    pub algebra: FilteredGradedAlgebra,
}

fn monomial_label(gamma: &[i64]) -> String {
    let parts: Vec<String> = gamma.iter().map(i64::to_string).collect();
    format!("x^({})", parts.join(" "))
}

impl MetrizedToricDivisor {
    /// Whether `mP` has integer vertices.
    pub fn is_lattice_dilate(&self, m: u32) -> bool {
        let mr = Rational::from_integer(BigInt::from(m));
        self.polytope
            .vertices()
            .iter()
            .all(|v| v.iter().all(|x| (x.clone() * mr.clone()).is_integer()))
    }

    fn check_lattice(&self, truncation: u32) -> Result<(), ToricError> {
        if (1..=truncation).any(|m| self.is_lattice_dilate(m)) {
            Ok(())
        } else {
            Err(ToricError::NonLattice(truncation))
        }
    }

    fn level_degrees(&self, m: u32) -> Vec<(Vec<i64>, Vec<Nats>)> {
        lattice_points(&self.polytope, m)
            .into_iter()
            .map(|g| {
                let gr: Vec<Rational> = g.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect();
                let row = (0..self.curve.places.len()).map(|i| self.local_degree(i, m, &gr)).collect();
                (g, row)
            })
            .collect()
    }

    pub(crate) fn provenance(&self) -> Result<RoofProvenance, ToricError> {
        let terms = self
            .place_factors()
            .into_iter()
            .zip(&self.roofs)
            .filter(|(f, _)| *f != 0.0)
            .map(|(f, r)| (f, r.clone()))
            .collect();
        Ok(RoofProvenance { roof: self.roof_transform()?, terms })
    }

    /// Sections up to level `M`: one bundle per level and the filtered algebra,
    /// whose weight at `(m, γ)` is the total degree of `x^γ`.
    pub fn sections(&self, truncation: u32) -> Result<ToricSections, ToricError> {
        self.check_lattice(truncation)?;
        let factors = self.place_factors();
        let mut bundles = Vec::new();
        let mut levels = BTreeMap::new();
        for m in 1..=truncation {
            let rows = self.level_degrees(m);
            let mut entries = Vec::with_capacity(rows.len());
            let mut labels = Vec::with_capacity(rows.len());
            let mut degrees = Vec::with_capacity(rows.len());
            for (g, row) in rows {
                let weight = row.iter().zip(&factors).map(|(n, f)| if *f == 0.0 { 0.0 } else { f * n.coeff.approx() }).sum();
                labels.push(monomial_label(&g));
                degrees.push(row);
                entries.push(Entry { gamma: g, weight });
            }
            bundles.push((m, DiagonalAdelicBundle::new(&self.curve, labels, degrees)?));
            levels.insert(m, entries);
        }
        let algebra = FilteredGradedAlgebra::new(self.dim(), levels)?.with_provenance(self.provenance()?);
        Ok(ToricSections { bundles, algebra })
    }

    /// The filtered algebra alone.
    pub fn algebra(&self, truncation: u32) -> Result<FilteredGradedAlgebra, ToricError> {
        self.check_lattice(truncation)?;
        let factors = self.place_factors();
        let mut levels = BTreeMap::new();
        for m in 1..=truncation {
            let entries = self
                .level_degrees(m)
                .into_iter()
                .map(|(g, row)| {
                    let weight = row.iter().zip(&factors).map(|(n, f)| if *f == 0.0 { 0.0 } else { f * n.coeff.approx() }).sum();
                    Entry { gamma: g, weight }
                })
                .collect();
            levels.insert(m, entries);
        }
        Ok(FilteredGradedAlgebra::new(self.dim(), levels)?.with_provenance(self.provenance()?))
    }
}
