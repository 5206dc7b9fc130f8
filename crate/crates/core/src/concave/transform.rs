//! Evaluation of `G(λ) = sup{t : λ ∈ Δ(Γ^t)}` at a finite truncation.
//!
//! The sublevel bodies only change when `t` crosses a value `ρ(m,γ)/m`, so
//! instead of bisecting in `t` the normalized points are inserted into one
//! incremental hull in order of decreasing value. A query point receives the
//! value of the batch after which it first lies in the hull, which is exactly
//! the supremum over the truncated data.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;

use super::{far_first, ConcaveError, FilteredGradedAlgebra, LadderPoint};
use crate::convex_geom::{ConvexBody, IncrementalHull};
use crate::scalar::{approx_vec, dot_f64, Scalar};
use crate::Rational;

/// Values closer than this are inserted as one batch.
const BATCH_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TransformOptions {
    pub truncation: u32,
    pub depth: u32,
    pub grid: u32,
}

impl TransformOptions {
    /// Truncation 60/40/16 for d = 1/2/3 (12 beyond), Fekete depth 8, 64 grid cells per axis.
    pub fn defaults(dim: usize) -> Self {
        let truncation = match dim {
            1 => 60,
            2 => 40,
            3 => 16,
            _ => 12,
        };
        TransformOptions { truncation, depth: 8, grid: 64 }
    }
}

/// Concave transform sampled on a grid inside `Δ°`.
#[derive(Clone, Debug)]
pub struct ConcaveTransform {
    pub dim: usize,
    pub domain: ConvexBody<Rational>,
    pub points: Vec<Vec<Rational>>,
    pub coords: Vec<Vec<f64>>,
    pub values: Vec<f64>,
    pub sup: f64,
    pub inf: f64,
    pub truncation: u32,
    pub depth: u32,
    pub grid: u32,
    /// Lebesgue measure of one grid cell.
    pub cell_volume: f64,
    /// Largest midpoint defect `(G(a)+G(b))/2 − G((a+b)/2)` along grid lines.
    pub concavity_defect: f64,
    indices: Vec<Vec<i64>>,
}

impl ConcaveTransform {
    /// Midpoint-rule integral of `f(G)` over the grid cells.
    pub fn grid_integral(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.values.iter().map(|&v| f(v)).sum::<f64>() * self.cell_volume
    }

    /// CSV with header `lambda_1,…,lambda_d,G`.
    pub fn to_csv(&self) -> String {
        let mut out: Vec<String> = (1..=self.dim).map(|i| format!("lambda_{i}")).collect();
        out.push("G".into());
        let mut text = out.join(",") + "\n";
        for (c, v) in self.coords.iter().zip(&self.values) {
            let mut row: Vec<String> = c.iter().map(|x| format!("{x}")).collect();
            row.push(format!("{v}"));
            text.push_str(&row.join(","));
            text.push('\n');
        }
        text
    }

    pub fn grid_indices(&self) -> &[Vec<i64>] {
        &self.indices
    }
}

/// Cell centers of a `grid^d` partition of the bounding box, kept when at
/// distance at least `1/(2·grid)` from every facet. Returns points with
/// their integer cell indices.
pub fn interior_grid(domain: &ConvexBody<Rational>, grid: u32) -> (Vec<Vec<Rational>>, Vec<Vec<i64>>, f64) {
    let (lo, hi) = domain.bounding_box();
    let d = domain.dim();
    let n = i64::from(grid.max(1));
    let margin = 1.0 / (2.0 * n as f64);
    let facets: Vec<(Vec<f64>, f64)> = domain
        .facets()
        .iter()
        .map(|f| {
            let a = approx_vec(&f.normal);
            let norm = dot_f64(&a, &a).sqrt();
            (a.iter().map(|x| x / norm).collect(), f.offset.approx() / norm)
        })
        .collect();
    let mut cell_volume = 1.0;
    for axis in 0..d {
        cell_volume *= (hi[axis].clone() - lo[axis].clone()).approx() / n as f64;
    }
    let mut pts: Vec<(Vec<Rational>, Vec<i64>)> = vec![(Vec::new(), Vec::new())];
    for axis in 0..d {
        let width = hi[axis].clone() - lo[axis].clone();
        let mut next = Vec::with_capacity(pts.len() * n as usize);
        for (p, idx) in pts {
            for k in 0..n {
                let mut q = p.clone();
                q.push(lo[axis].clone() + width.clone() * Rational::new(BigInt::from(2 * k + 1), BigInt::from(2 * n)));
                let mut j = idx.clone();
                j.push(k);
                next.push((q, j));
            }
        }
        pts = next;
    }
    let (points, indices): (Vec<_>, Vec<_>) = pts
        .into_iter()
        .filter(|(p, _)| {
            let pf = approx_vec(p);
            facets.iter().all(|(a, b)| b - dot_f64(a, &pf) >= margin - 1e-12)
                && domain.contains(p, true).unwrap_or(false)
        })
        .unzip();
    (points, indices, cell_volume)
}

/// Assigns to each query the value of the first ladder batch whose hull contains it.
pub(crate) fn ladder_values(mut ladder: Vec<LadderPoint>, dim: usize, queries: &[Vec<Rational>]) -> Vec<f64> {
    ladder.sort_by(|a, b| b.value.total_cmp(&a.value));
    let qf: Vec<Vec<f64>> = queries.iter().map(|q| approx_vec(q)).collect();
    let mut result = vec![f64::NAN; queries.len()];
    let mut witness: Vec<Option<usize>> = vec![None; queries.len()];
    let mut pending: Vec<usize> = (0..queries.len()).collect();
    let mut hull = IncrementalHull::new(dim);
    let mut i = 0;
    while i < ladder.len() && !pending.is_empty() {
        let top = ladder[i].value;
        let mut j = i;
        let mut grew = false;
        while j < ladder.len() && top - ladder[j].value <= BATCH_TOLERANCE {
            j += 1;
        }
        for p in far_first(ladder[i..j].iter().collect(), |p| &p.point) {
            grew |= hull.insert(p.point.clone());
        }
        let value = ladder[j - 1].value;
        i = j;
        if !grew {
            continue;
        }
        if !hull.is_full_dimensional() {
            // Flat superlevel sets still hold the queries that lie on them.
            let pts: Vec<Vec<Rational>> = hull.pending_points().cloned().collect();
            if let Ok(flat) = ConvexBody::hull(&pts) {
                pending.retain(|&q| {
                    if flat.contains(&queries[q], false).unwrap_or(false) {
                        result[q] = value;
                        false
                    } else {
                        true
                    }
                });
            }
            continue;
        }
        pending.retain(|&q| {
            if witness[q].map_or(false, |f| hull.facet_alive(f)) {
                return true;
            }
            match hull.first_violated(&queries[q], &qf[q]) {
                Some(f) => {
                    witness[q] = Some(f);
                    true
                }
                None => {
                    result[q] = value;
                    false
                }
            }
        });
    }
    result
}

impl FilteredGradedAlgebra {
    /// `G` at arbitrary points of `Δ_M°`, from the data up to level `M`.
    pub fn evaluate_transform(&self, truncation: u32, points: &[Vec<Rational>]) -> Result<Vec<f64>, ConcaveError> {
        let domain = self.okounkov_body(truncation)?;
        domain.require_full_dimensional().map_err(|_| ConcaveError::NotBig(domain.affine_dim()))?;
        for p in points {
            if !domain.contains(p, true)? {
                return Err(ConcaveError::OutsideInterior(approx_vec(p)));
            }
        }
        Ok(ladder_values(self.ladder_points(truncation), self.dim(), points))
    }

    /// `G` built from the given levels only.
    pub fn evaluate_at_levels(&self, levels: &BTreeSet<u32>, points: &[Vec<Rational>]) -> Result<Vec<f64>, ConcaveError> {
        let restricted = self.restrict_levels(levels);
        let top = levels.iter().next_back().copied().unwrap_or(0);
        restricted.evaluate_transform(top, points)
    }

    /// Transform on the interior grid of `Δ_M`.
    pub fn concave_transform(&self, options: &TransformOptions) -> Result<ConcaveTransform, ConcaveError> {
        let domain = self.okounkov_body(options.truncation)?;
        domain.require_full_dimensional().map_err(|_| ConcaveError::NotBig(domain.affine_dim()))?;
        let (points, indices, cell_volume) = interior_grid(&domain, options.grid);
        let values = ladder_values(self.ladder_points(options.truncation), self.dim(), &points);
        if let Some(k) = values.iter().position(|v| v.is_nan()) {
            return Err(ConcaveError::OutsideInterior(approx_vec(&points[k])));
        }
        let sup = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let inf = values.iter().copied().fold(f64::INFINITY, f64::min);
        let concavity_defect = midpoint_defect(&indices, &values);
        Ok(ConcaveTransform {
            dim: self.dim(),
            coords: points.iter().map(|p| approx_vec(p)).collect(),
            points,
            values,
            sup,
            inf,
            truncation: options.truncation,
            depth: options.depth,
            grid: options.grid,
            cell_volume,
            concavity_defect,
            domain,
            indices,
        })
    }
}

fn midpoint_defect(indices: &[Vec<i64>], values: &[f64]) -> f64 {
    let lookup: HashMap<&[i64], usize> = indices.iter().enumerate().map(|(i, k)| (k.as_slice(), i)).collect();
    let d = indices.first().map_or(0, Vec::len);
    let mut directions: Vec<Vec<i64>> = (0..d)
        .map(|a| {
            let mut e = vec![0; d];
            e[a] = 1;
            e
        })
        .collect();
    if d > 1 {
        directions.push(vec![1; d]);
        let mut anti = vec![1; d];
        anti[0] = -1;
        directions.push(anti);
    }
    let mut worst = 0.0f64;
    for (i, k) in indices.iter().enumerate() {
        for e in &directions {
            let mid: Vec<i64> = k.iter().zip(e).map(|(a, b)| a + b).collect();
            let far: Vec<i64> = k.iter().zip(e).map(|(a, b)| a + 2 * b).collect();
            if let (Some(&m), Some(&f)) = (lookup.get(mid.as_slice()), lookup.get(far.as_slice())) {
                worst = worst.max((values[i] + values[f]) / 2.0 - values[m]);
            }
        }
    }
    worst
}
