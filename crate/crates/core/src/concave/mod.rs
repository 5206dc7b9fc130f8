//! Filtered graded algebras and their concave transforms.

mod measure;
mod properties;
mod transform;
mod volumes;

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_integer::Integer;
use thiserror::Error;

use crate::convex_geom::{ConvexBody, GeomError, IncrementalHull};
use crate::graded::GradedSemigroup;
use crate::roof::{PiecewiseLinearConcave, RoofError};
use crate::scalar::Scalar;
use crate::Rational;

pub use measure::{kolmogorov_distance, JumpingMeasure, ReferenceDistribution};
pub use properties::{property_suite, AlgebraSource, PropertyConfig};
pub use transform::{interior_grid, ConcaveTransform, TransformOptions};
pub use volumes::{AsymptoticSlopes, Bigness, VolumeEstimate};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConcaveError {
    #[error("level {0} is empty")]
    EmptyLevel(u32),
    #[error("no nonempty level up to {0}")]
    NoLevels(u32),
    #[error("duplicate valuation {gamma:?} at level {m}")]
    DuplicateValuation { m: u32, gamma: Vec<i64> },
    #[error("valuation of dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Okounkov body is not full-dimensional (affine dimension {0})")]
    NotBig(usize),
    #[error("evaluation point {0:?} is outside the interior of the Okounkov body")]
    OutsideInterior(Vec<f64>),
    #[error("weights must be finite")]
    NonFiniteWeight,
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Roof(#[from] RoofError),
    #[error("{0}")]
    Source(String),
}

/// One basis direction of a level: its valuation and the slope of the line it spans.
#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub gamma: Vec<i64>,
    pub weight: f64,
}

/// Link to the piecewise-linear data an algebra was generated from.
#[derive(Clone, Debug)]
pub struct RoofProvenance {
    /// `λ ↦ Σ_ω ν(ω) ln(b_ω) ϑ_ω(λ)` in nats.
    pub roof: PiecewiseLinearConcave<f64>,
    /// Exact per-place terms `(ν(ω) ln b_ω, ϑ_ω)` whose sum is `roof`.
    pub terms: Vec<(f64, PiecewiseLinearConcave<Rational>)>,
}

impl RoofProvenance {
    /// `∫_P roof`, summed from exact per-place integrals.
    pub fn integral(&self) -> Result<f64, ConcaveError> {
        let mut total = 0.0;
        for (c, f) in &self.terms {
            total += c * crate::scalar::Scalar::approx(&f.integral()?);
        }
        Ok(total)
    }
}

/// `ρ̃(m, γ)` at a finite Fekete depth.
#[derive(Clone, Debug, PartialEq)]
pub struct RhoTilde {
    pub value: f64,
    /// Largest `n` actually used (`nm ≤ M`).
    pub depth: u32,
    /// Whether the maximum was already attained in the first half of the depths.
    pub stationary: bool,
}

#[derive(Clone, Debug)]
pub struct FilteredGradedAlgebra {
    dim: usize,
    levels: BTreeMap<u32, BTreeMap<Vec<i64>, f64>>,
    provenance: Option<RoofProvenance>,
}

/// Normalized point `γ/m` with value `ρ(m, γ)/m`, maximized over representatives.
#[derive(Clone, Debug)]
pub(crate) struct LadderPoint {
    pub point: Vec<Rational>,
    pub value: f64,
}

impl FilteredGradedAlgebra {
    pub fn new(dim: usize, levels: BTreeMap<u32, Vec<Entry>>) -> Result<Self, ConcaveError> {
        let mut out = BTreeMap::new();
        for (m, entries) in levels {
            let mut level = BTreeMap::new();
            for e in entries {
                if e.gamma.len() != dim {
                    return Err(ConcaveError::DimensionMismatch { expected: dim, got: e.gamma.len() });
                }
                if !e.weight.is_finite() {
                    return Err(ConcaveError::NonFiniteWeight);
                }
                if level.insert(e.gamma.clone(), e.weight).is_some() {
                    return Err(ConcaveError::DuplicateValuation { m, gamma: e.gamma });
                }
            }
            out.insert(m, level);
        }
        Ok(FilteredGradedAlgebra { dim, levels: out, provenance: None })
    }

    pub fn with_provenance(mut self, provenance: RoofProvenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn provenance(&self) -> Option<&RoofProvenance> {
        self.provenance.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn max_level(&self) -> u32 {
        self.levels.keys().next_back().copied().unwrap_or(0)
    }

    pub fn levels(&self) -> impl Iterator<Item = (u32, &BTreeMap<Vec<i64>, f64>)> {
        self.levels.iter().map(|(m, l)| (*m, l))
    }

    pub fn level(&self, m: u32) -> Option<&BTreeMap<Vec<i64>, f64>> {
        self.levels.get(&m)
    }

    /// Entries of level `m` in valuation order.
    pub fn entries(&self, m: u32) -> Vec<Entry> {
        self.levels
            .get(&m)
            .map(|l| l.iter().map(|(g, w)| Entry { gamma: g.clone(), weight: *w }).collect())
            .unwrap_or_default()
    }

    /// Same levels with every weight at level `m` raised by `m·c`.
    pub fn shift_weights(&self, c: f64) -> Self {
        let levels = self
            .levels
            .iter()
            .map(|(&m, l)| (m, l.iter().map(|(g, w)| (g.clone(), w + f64::from(m) * c)).collect()))
            .collect();
        FilteredGradedAlgebra { dim: self.dim, levels, provenance: None }
    }

    /// Keeps only the given levels.
    pub fn restrict_levels(&self, keep: &BTreeSet<u32>) -> Self {
        let levels = self.levels.iter().filter(|(m, _)| keep.contains(m)).map(|(m, l)| (*m, l.clone())).collect();
        FilteredGradedAlgebra { dim: self.dim, levels, provenance: None }
    }

    /// Underlying valuation semigroup.
    pub fn semigroup(&self) -> GradedSemigroup {
        let levels = self
            .levels
            .iter()
            .map(|(&m, l)| (m, l.keys().cloned().collect::<BTreeSet<_>>()))
            .collect();
        GradedSemigroup::from_levels(self.dim, levels)
    }

    /// Max weight at level `m` with valuation `γ`; `−∞` if absent.
    pub fn rho(&self, m: u32, gamma: &[i64]) -> f64 {
        self.levels.get(&m).and_then(|l| l.get(gamma)).copied().unwrap_or(f64::NEG_INFINITY)
    }

    /// `max_{1≤n≤N, nm≤M} ρ(nm, nγ)/n` with `M` the top level.
    pub fn rho_tilde(&self, m: u32, gamma: &[i64], depth: u32) -> RhoTilde {
        let top = self.max_level();
        let mut best = f64::NEG_INFINITY;
        let mut best_half = f64::NEG_INFINITY;
        let mut used = 0;
        let half = depth.div_ceil(2);
        for n in 1..=depth {
            let Some(level) = m.checked_mul(n).filter(|&l| l <= top) else { break };
            used = n;
            let g: Vec<i64> = gamma.iter().map(|&x| x * i64::from(n)).collect();
            let v = self.rho(level, &g) / f64::from(n);
            if v > best {
                best = v;
            }
            if n <= half && v > best_half {
                best_half = v;
            }
        }
        RhoTilde { value: best, depth: used, stationary: best <= best_half }
    }

    /// Superadditivity scan up to `max_level`: returns the worst deficit
    /// `w + w' − ρ(m+m', γ+γ')` over pairs (positive means violated).
    pub fn superadditivity_deficit(&self, max_level: u32) -> f64 {
        let mut worst = f64::NEG_INFINITY;
        for (&m, a) in self.levels.range(1..=max_level) {
            for (&n, b) in self.levels.range(m..=max_level) {
                if m + n > max_level {
                    break;
                }
                for (g, w) in a {
                    for (h, v) in b {
                        let s: Vec<i64> = g.iter().zip(h).map(|(x, y)| x + y).collect();
                        let deficit = w + v - self.rho(m + n, &s);
                        worst = worst.max(deficit);
                    }
                }
            }
        }
        worst
    }

    /// Normalized points `γ/m` for `m ≤ M`, one per point with the best value.
    ///
    /// Including every level `m ≤ M` already covers all multiples `nm ≤ M`,
    /// so the maximum here is independent of the Fekete depth.
    pub(crate) fn ladder_points(&self, truncation: u32) -> Vec<LadderPoint> {
        let mut best: BTreeMap<Vec<Rational>, f64> = BTreeMap::new();
        for (&m, level) in self.levels.range(1..=truncation) {
            for (g, &w) in level {
                let gcd = g.iter().fold(i64::from(m), |acc, &x| acc.gcd(&x));
                let point: Vec<Rational> = g
                    .iter()
                    .map(|&x| Rational::new(BigInt::from(x / gcd), BigInt::from(i64::from(m) / gcd)))
                    .collect();
                let v = w / f64::from(m);
                best.entry(point).and_modify(|b| *b = b.max(v)).or_insert(v);
            }
        }
        best.into_iter().map(|(point, value)| LadderPoint { point, value }).collect()
    }

    /// `sup G_M` over `Δ_M`: the largest normalized weight up to level `M`,
    /// attained at the top of the ladder.
    pub fn transform_sup(&self, truncation: u32) -> Option<f64> {
        self.levels
            .range(1..=truncation)
            .flat_map(|(&m, l)| l.values().map(move |w| w / f64::from(m)))
            .reduce(f64::max)
    }

    /// `Δ_M`: hull of all normalized valuations up to level `M`.
    pub fn okounkov_body(&self, truncation: u32) -> Result<ConvexBody<Rational>, ConcaveError> {
        let pts = self.ladder_points(truncation);
        if pts.is_empty() {
            return Err(ConcaveError::NoLevels(truncation));
        }
        let mut h = IncrementalHull::new(self.dim);
        let mut kept = Vec::new();
        for p in far_first(pts, |p| &p.point) {
            if h.insert(p.point.clone()) {
                kept.push(p.point);
            }
        }
        Ok(ConvexBody::hull(&kept)?)
    }

    /// `Δ(Γ^t) = conv{γ/m : ρ̃(m,γ) ≥ mt, m ≤ M}`; `None` when empty.
    pub fn sublevel_body(&self, t: f64, truncation: u32, depth: u32) -> Result<Option<ConvexBody<Rational>>, ConcaveError> {
        let restricted = self.restrict_levels(&(1..=truncation).collect());
        let mut pts = Vec::new();
        for (&m, level) in restricted.levels.range(1..=truncation) {
            for g in level.keys() {
                if restricted.rho_tilde(m, g, depth).value >= f64::from(m) * t {
                    pts.push(g.iter().map(|&x| Rational::new(BigInt::from(x), BigInt::from(m))).collect::<Vec<_>>());
                }
            }
        }
        if pts.is_empty() {
            return Ok(None);
        }
        Ok(Some(ConvexBody::hull(&pts)?))
    }

    /// `ν_m`: per-entry weights over `m`, each of mass `1/dim V_m`.
    pub fn jumping_measure(&self, m: u32) -> Result<JumpingMeasure, ConcaveError> {
        let level = self.levels.get(&m).filter(|l| !l.is_empty()).ok_or(ConcaveError::EmptyLevel(m))?;
        let mut atoms: Vec<f64> = level.values().map(|w| w / f64::from(m)).collect();
        atoms.sort_by(f64::total_cmp);
        Ok(JumpingMeasure { m, atoms })
    }
}

/// Reorders points by decreasing distance from their centroid, so that hull
/// insertion meets extreme points early and most later points fall inside.
pub(crate) fn far_first<P>(mut items: Vec<P>, point: impl Fn(&P) -> &Vec<Rational>) -> Vec<P> {
    let Some(first) = items.first() else { return items };
    let d = point(first).len();
    let approx: Vec<Vec<f64>> = items.iter().map(|p| point(p).iter().map(Scalar::approx).collect()).collect();
    let mut c = vec![0.0; d];
    for a in &approx {
        for (ci, x) in c.iter_mut().zip(a) {
            *ci += x / approx.len() as f64;
        }
    }
    let dist: Vec<f64> = approx.iter().map(|a| a.iter().zip(&c).map(|(x, y)| (x - y) * (x - y)).sum()).collect();
    let mut order: Vec<usize> = (0..items.len()).collect();
    order.sort_by(|&i, &j| dist[j].total_cmp(&dist[i]).then(i.cmp(&j)));
    let mut slots: Vec<Option<P>> = items.drain(..).map(Some).collect();
    order.into_iter().map(|i| slots[i].take().expect("each index once")).collect()
}
