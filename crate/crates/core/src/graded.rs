//! Graded valuation semigroups and their Okounkov bodies.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use thiserror::Error;

use crate::convex_geom::{ConvexBody, GeomError, IncrementalHull};
use crate::extrapolate::{extrapolate, Extrapolation};
use crate::scalar::{factorial, Scalar};
use crate::Rational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GradedError {
    #[error("the zero polynomial has no valuation")]
    ZeroPolynomial,
    #[error("flag order is not a permutation of 0..{0}")]
    BadOrder(usize),
    #[error("exponent dimension {got} differs from {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("generators must sit at levels >= 1")]
    LevelZeroGenerator,
    #[error("all levels up to {0} are empty")]
    EmptyLevels(u32),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

/// Admissible flag, encoded as the variable order of the lexicographic valuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagSpec {
    pub dim: usize,
    pub order: Vec<usize>,
}

impl FlagSpec {
    pub fn standard(dim: usize) -> Self {
        FlagSpec { dim, order: (0..dim).collect() }
    }

    pub fn new(order: Vec<usize>) -> Result<Self, GradedError> {
        let dim = order.len();
        let mut seen = vec![false; dim];
        for &i in &order {
            if i >= dim || seen[i] {
                return Err(GradedError::BadOrder(dim));
            }
            seen[i] = true;
        }
        if dim == 0 {
            return Err(GradedError::BadOrder(0));
        }
        Ok(FlagSpec { dim, order })
    }

    /// Lexicographically smallest exponent, read in flag order.
    pub fn lex_valuation(&self, support: &[Vec<i64>]) -> Result<Vec<i64>, GradedError> {
        let mut best: Option<Vec<i64>> = None;
        for e in support {
            if e.len() != self.dim {
                return Err(GradedError::DimensionMismatch { expected: self.dim, got: e.len() });
            }
            let key: Vec<i64> = self.order.iter().map(|&i| e[i]).collect();
            if best.as_ref().map_or(true, |b| key < *b) {
                best = Some(key);
            }
        }
        best.ok_or(GradedError::ZeroPolynomial)
    }
}

/// `lex_valuation` for the standard order.
pub fn lex_valuation(support: &[Vec<i64>]) -> Result<Vec<i64>, GradedError> {
    let dim = support.first().ok_or(GradedError::ZeroPolynomial)?.len();
    FlagSpec::standard(dim).lex_valuation(support)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSemigroup {
    dim: usize,
    levels: BTreeMap<u32, BTreeSet<Vec<i64>>>,
    generators: Vec<(u32, Vec<i64>)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VolumeGrowth {
    /// Affine dimension of the truncated body.
    pub kodaira_dimension: usize,
    /// `(m, dim Γ_m · κ! / m^κ)` for nonempty levels.
    pub sequence: Vec<(u32, f64)>,
    /// Limit of the sequence; absent when no level is nonempty.
    pub extrapolation: Option<Extrapolation>,
    /// `d! vol(Δ_M)`, or `None` when the body is lower-dimensional.
    pub body_reference: Option<f64>,
}

impl GradedSemigroup {
    /// All sums of generators of total level at most `max_level`.
    pub fn generate(dim: usize, generators: &[(u32, Vec<i64>)], max_level: u32) -> Result<Self, GradedError> {
        for (m, g) in generators {
            if *m == 0 {
                return Err(GradedError::LevelZeroGenerator);
            }
            if g.len() != dim {
                return Err(GradedError::DimensionMismatch { expected: dim, got: g.len() });
            }
        }
        let mut levels: BTreeMap<u32, BTreeSet<Vec<i64>>> = BTreeMap::new();
        levels.insert(0, BTreeSet::from([vec![0; dim]]));
        for m in 1..=max_level {
            let mut level = BTreeSet::new();
            for (k, g) in generators.iter().filter(|(k, _)| *k <= m) {
                if let Some(prev) = levels.get(&(m - k)) {
                    for p in prev {
                        level.insert(p.iter().zip(g).map(|(a, b)| a + b).collect());
                    }
                }
            }
            levels.insert(m, level);
        }
        Ok(GradedSemigroup { dim, levels, generators: generators.to_vec() })
    }

    /// Wraps explicit level sets (level 0 is forced to `{0}`).
    pub fn from_levels(dim: usize, levels: BTreeMap<u32, BTreeSet<Vec<i64>>>) -> Self {
        let mut levels = levels;
        levels.insert(0, BTreeSet::from([vec![0; dim]]));
        GradedSemigroup { dim, levels, generators: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[(u32, Vec<i64>)] {
        &self.generators
    }

    pub fn levels(&self) -> &BTreeMap<u32, BTreeSet<Vec<i64>>> {
        &self.levels
    }

    pub fn level(&self, m: u32) -> Option<&BTreeSet<Vec<i64>>> {
        self.levels.get(&m)
    }

    pub fn max_level(&self) -> u32 {
        self.levels.keys().next_back().copied().unwrap_or(0)
    }

    /// First pair `(γ, γ')` whose sum is missing from its level, up to `max_level`.
    pub fn superadditivity_violation(&self, max_level: u32) -> Option<((u32, Vec<i64>), (u32, Vec<i64>))> {
        for (&m, a) in self.levels.range(0..=max_level) {
            for (&n, b) in self.levels.range(m..=max_level) {
                let Some(target) = self.levels.get(&(m + n)) else { continue };
                if m + n > max_level {
                    continue;
                }
                for x in a {
                    for y in b {
                        let s: Vec<i64> = x.iter().zip(y).map(|(p, q)| p + q).collect();
                        if !target.contains(&s) {
                            return Some(((m, x.clone()), (n, y.clone())));
                        }
                    }
                }
            }
        }
        None
    }

    /// `conv(⋃_{1≤m≤M} Γ_m / m)`.
    pub fn okounkov_body(&self, max_level: u32) -> Result<ConvexBody<Rational>, GradedError> {
        let mut points: BTreeSet<Vec<Rational>> = BTreeSet::new();
        for (&m, level) in self.levels.range(1..=max_level) {
            let den = BigInt::from(m);
            for g in level {
                points.insert(g.iter().map(|&x| Rational::new(BigInt::from(x), den.clone())).collect());
            }
        }
        if points.is_empty() {
            return Err(GradedError::EmptyLevels(max_level));
        }
        let points: Vec<Vec<Rational>> = points.into_iter().collect();
        // Keep only candidates that grow the hull before the exact pass.
        let mut h = IncrementalHull::new(self.dim);
        let mut kept = Vec::new();
        for p in &points {
            if h.insert(p.clone()) {
                kept.push(p.clone());
            }
        }
        Ok(ConvexBody::hull(&kept)?)
    }

    /// `dim Γ_m · κ!/m^κ` and its limit, κ being the Kodaira dimension.
    pub fn volume_growth(&self, max_level: u32) -> Result<VolumeGrowth, GradedError> {
        let body = self.okounkov_body(max_level)?;
        let kappa = body.affine_dim();
        let fact = factorial(kappa) as f64;
        let sequence: Vec<(u32, f64)> = self
            .levels
            .range(1..=max_level)
            .filter(|(_, l)| !l.is_empty())
            .map(|(&m, l)| (m, l.len() as f64 * fact / f64::from(m).powi(kappa as i32)))
            .collect();
        let extrapolation = (!sequence.is_empty()).then(|| extrapolate(&sequence));
        let body_reference = body.is_full_dimensional().then(|| fact * body.volume().approx());
        Ok(VolumeGrowth { kodaira_dimension: kappa, sequence, extrapolation, body_reference })
    }

    /// Lines `m: γ₁ γ₂ …` with comma-separated coordinates.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (m, level) in &self.levels {
            let items: Vec<String> = level
                .iter()
                .map(|g| g.iter().map(i64::to_string).collect::<Vec<_>>().join(","))
                .collect();
            out.push_str(&format!("{m}: {}\n", items.join(" ")));
        }
        out
    }

    pub fn from_text(dim: usize, text: &str) -> Result<Self, GradedError> {
        let mut levels = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| GradedError::Parse { line: no + 1, message };
            let (m, rest) = line.split_once(':').ok_or_else(|| err("expected `m: ...`".into()))?;
            let m: u32 = m.trim().parse().map_err(|_| err(format!("bad level `{}`", m.trim())))?;
            let mut level = BTreeSet::new();
            for item in rest.split_whitespace() {
                let g: Vec<i64> = item
                    .split(',')
                    .map(|c| c.parse().map_err(|_| err(format!("bad coordinate in `{item}`"))))
                    .collect::<Result<_, _>>()?;
                if g.len() != dim {
                    return Err(err(format!("`{item}` has {} coordinates, expected {dim}", g.len())));
                }
                level.insert(g);
            }
            levels.insert(m, level);
        }
        Ok(Self::from_levels(dim, levels))
    }
}

/// How a family of bodies moves relative to inclusion.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Monotonicity {
    Decreasing,
    Increasing,
    Constant,
    Neither,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub hausdorff: Vec<f64>,
    pub symmetric_difference: Vec<f64>,
    pub monotonicity: Monotonicity,
    /// Decreasing families: target inside every body, and `d_H(⋂ B_j, target)`.
    pub target_in_all: Option<bool>,
    pub intersection_gap: Option<f64>,
    /// Increasing families: for each sample point of `target°`, the first
    /// position `j` (0-based) with the point in `B_j°`.
    pub first_interior_index: Vec<(Vec<Rational>, Option<usize>)>,
}

fn is_subset(a: &ConvexBody<Rational>, b: &ConvexBody<Rational>) -> bool {
    a.vertices().iter().all(|v| b.contains(v, false).unwrap_or(false))
}

/// Grid points of the body's interior, `per_axis` cells per axis of its bounding box.
pub fn interior_grid(body: &ConvexBody<Rational>, per_axis: u32) -> Vec<Vec<Rational>> {
    let (lo, hi) = body.bounding_box();
    let d = body.dim();
    let n = i64::from(per_axis);
    let mut pts: Vec<Vec<Rational>> = vec![Vec::new()];
    for axis in 0..d {
        let width = hi[axis].clone() - lo[axis].clone();
        pts = pts
            .into_iter()
            .flat_map(|p| {
                let lo = lo[axis].clone();
                let width = width.clone();
                (0..n).map(move |k| {
                    let mut q = p.clone();
                    q.push(lo.clone() + width.clone() * Rational::ratio(2 * k + 1, 2 * n));
                    q
                })
            })
            .collect();
    }
    pts.into_iter().filter(|p| body.contains(p, true).unwrap_or(false)).collect()
}

/// Per-index distances to `target`, plus the intersection or interior-cover
/// diagnostics for monotone families.
pub fn body_convergence(
    bodies: &[ConvexBody<Rational>],
    target: &ConvexBody<Rational>,
    grid: u32,
) -> Result<ConvergenceReport, GradedError> {
    let mut hausdorff = Vec::with_capacity(bodies.len());
    let mut symmetric_difference = Vec::with_capacity(bodies.len());
    for b in bodies {
        hausdorff.push(b.hausdorff_distance(target)?);
        symmetric_difference.push(b.symmetric_difference_distance(target)?.approx());
    }
    let pairs: Vec<(bool, bool)> = bodies.windows(2).map(|w| (is_subset(&w[1], &w[0]), is_subset(&w[0], &w[1]))).collect();
    let monotonicity = if pairs.iter().all(|&(dec, inc)| dec && inc) {
        Monotonicity::Constant
    } else if pairs.iter().all(|&(dec, _)| dec) {
        Monotonicity::Decreasing
    } else if pairs.iter().all(|&(_, inc)| inc) {
        Monotonicity::Increasing
    } else {
        Monotonicity::Neither
    };
    let mut report = ConvergenceReport {
        hausdorff,
        symmetric_difference,
        monotonicity,
        target_in_all: None,
        intersection_gap: None,
        first_interior_index: Vec::new(),
    };
    match monotonicity {
        Monotonicity::Decreasing | Monotonicity::Constant if !bodies.is_empty() => {
            report.target_in_all = Some(bodies.iter().all(|b| is_subset(target, b)));
            let mut inter = bodies[0].clone();
            for b in &bodies[1..] {
                inter = inter.intersection(b)?.ok_or(GeomError::Infeasible)?;
            }
            report.intersection_gap = Some(inter.hausdorff_distance(target)?);
        }
        _ => {}
    }
    if matches!(monotonicity, Monotonicity::Increasing | Monotonicity::Constant) {
        report.first_interior_index = interior_grid(target, grid)
            .into_iter()
            .map(|p| {
                let j = bodies.iter().position(|b| b.contains(&p, true).unwrap_or(false));
                (p, j)
            })
            .collect();
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lex_examples() {
        assert_eq!(lex_valuation(&[vec![1, 0], vec![0, 1]]).unwrap(), vec![0, 1]);
        assert_eq!(lex_valuation(&[vec![2, 3]]).unwrap(), vec![2, 3]);
        assert_eq!(lex_valuation(&[vec![1, 2], vec![1, 1], vec![2, 0]]).unwrap(), vec![1, 1]);
        assert_eq!(lex_valuation(&[]), Err(GradedError::ZeroPolynomial));
        let flag = FlagSpec::new(vec![1, 0]).unwrap();
        assert_eq!(flag.lex_valuation(&[vec![1, 0], vec![0, 1]]).unwrap(), vec![0, 1]);
    }

    #[test]
    fn o2_on_p1() {
        let s = GradedSemigroup::generate(1, &[(1, vec![0]), (1, vec![1]), (1, vec![2])], 4).unwrap();
        assert_eq!(s.level(3).unwrap().len(), 7);
        let body = s.okounkov_body(4).unwrap();
        assert_eq!(body.volume(), Rational::from_integer(2.into()));
        assert!(s.superadditivity_violation(4).is_none());
    }

    #[test]
    fn trivial_semigroup_has_kodaira_dimension_zero() {
        let s = GradedSemigroup::generate(1, &[(1, vec![0])], 5).unwrap();
        let g = s.volume_growth(5).unwrap();
        assert_eq!(g.kodaira_dimension, 0);
        assert!(g.body_reference.is_none());
    }

    #[test]
    fn text_round_trip() {
        let s = GradedSemigroup::generate(2, &[(1, vec![0, 0]), (1, vec![1, 0]), (1, vec![0, 1])], 3).unwrap();
        let back = GradedSemigroup::from_text(2, &s.to_text()).unwrap();
        assert_eq!(back.levels(), s.levels());
    }
}
