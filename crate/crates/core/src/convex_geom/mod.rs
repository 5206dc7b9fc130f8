//! Exact convex polytopes in V- and H-representation.

mod distance;
pub mod hull;
mod io;
pub mod linalg;

use std::cmp::Ordering;

use thiserror::Error;

pub use distance::min_norm_point;
pub use hull::IncrementalHull;
pub use io::ParseBodyError;

use crate::scalar::{add, dot, lex_cmp, scale_vec, sub, vec_eq, Scalar};
use linalg::{determinant, rref, solve};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("empty point list")]
    Empty,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("ambient dimension must be at least 1")]
    ZeroDimension,
    #[error("scale factor must be positive")]
    NonPositiveScale,
    #[error("body is not full-dimensional (affine dimension {affine} < {ambient})")]
    Degenerate { affine: usize, ambient: usize },
    #[error("constraint system is infeasible")]
    Infeasible,
}

/// `normal·x ≤ offset`; also used for equalities `normal·x = offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct Halfspace<T> {
    pub normal: Vec<T>,
    pub offset: T,
}

impl<T: Scalar> Halfspace<T> {
    /// Rescaled so the first nonzero normal entry has absolute value 1.
    pub fn canonical(&self) -> Self {
        let lead = self
            .normal
            .iter()
            .find(|x| !x.is_negligible())
            .map(|x| x.abs())
            .unwrap_or_else(T::one);
        Halfspace {
            normal: self.normal.iter().map(|x| x.clone() / lead.clone()).collect(),
            offset: self.offset.clone() / lead,
        }
    }

    pub fn same_as(&self, other: &Self) -> bool {
        vec_eq(&self.normal, &other.normal) && (self.offset.clone() - other.offset.clone()).is_negligible()
    }

    /// `normal·p − offset`.
    pub fn slack(&self, p: &[T]) -> T {
        dot(&self.normal, p) - self.offset.clone()
    }
}

/// Convex polytope with irredundant vertices and facets.
///
/// Lower-dimensional bodies carry their affine hull as `equalities`; their
/// facets are then relative facets inside that affine hull.
#[derive(Clone, Debug)]
pub struct ConvexBody<T: Scalar> {
    dim: usize,
    vertices: Vec<Vec<T>>,
    facets: Vec<Halfspace<T>>,
    equalities: Vec<Halfspace<T>>,
}

impl<T: Scalar> PartialEq for ConvexBody<T> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.vertices.len() == other.vertices.len()
            && self.vertices.iter().zip(&other.vertices).all(|(a, b)| vec_eq(a, b))
    }
}

impl<T: Scalar> ConvexBody<T> {
    pub fn hull(points: &[Vec<T>]) -> Result<Self, GeomError> {
        let first = points.first().ok_or(GeomError::Empty)?;
        let d = first.len();
        if d == 0 {
            return Err(GeomError::ZeroDimension);
        }
        if let Some(bad) = points.iter().find(|p| p.len() != d) {
            return Err(GeomError::DimensionMismatch { expected: d, got: bad.len() });
        }
        let mut pts = points.to_vec();
        pts.sort_by(|a, b| lex_cmp(a, b));
        pts.dedup_by(|a, b| vec_eq(a, b));

        let base = pts[0].clone();
        let mut diffs: Vec<Vec<T>> = pts[1..].iter().map(|p| sub(p, &base)).collect();
        let pivots = if diffs.is_empty() { Vec::new() } else { rref(&mut diffs) };
        let k = pivots.len();

        let mut equalities = Vec::new();
        for j in (0..d).filter(|j| !pivots.contains(j)) {
            let mut normal = vec![T::zero(); d];
            normal[j] = T::one();
            for (row, &pc) in diffs.iter().zip(&pivots) {
                normal[pc] = -row[j].clone();
            }
            let offset = dot(&normal, &base);
            equalities.push(Halfspace { normal, offset });
        }

        if k == 0 {
            return Ok(ConvexBody { dim: d, vertices: vec![base], facets: Vec::new(), equalities });
        }

        // Far points first: most of the rest then land inside and are skipped.
        let projected: Vec<Vec<f64>> = pts.iter().map(|p| pivots.iter().map(|&c| p[c].approx()).collect()).collect();
        let mut center = vec![0.0; k];
        for p in &projected {
            for (c, x) in center.iter_mut().zip(p) {
                *c += x / projected.len() as f64;
            }
        }
        let dist: Vec<f64> = projected.iter().map(|p| p.iter().zip(&center).map(|(x, c)| (x - c) * (x - c)).sum()).collect();
        let mut order: Vec<usize> = (0..pts.len()).collect();
        order.sort_by(|&i, &j| dist[j].total_cmp(&dist[i]).then(i.cmp(&j)));
        let mut h = IncrementalHull::new(k);
        let mut inserted = Vec::with_capacity(pts.len());
        for i in order {
            if h.insert(pivots.iter().map(|&c| pts[i][c].clone()).collect()) {
                inserted.push(i);
            }
        }
        let (ext, planes) = h.finish();
        let mut vertices: Vec<Vec<T>> = ext.iter().map(|&i| pts[inserted[i]].clone()).collect();
        vertices.sort_by(|a, b| lex_cmp(a, b));
        let facets = planes
            .into_iter()
            .map(|hs| {
                let mut normal = vec![T::zero(); d];
                for (&c, x) in pivots.iter().zip(hs.normal) {
                    normal[c] = x;
                }
                Halfspace { normal, offset: hs.offset }
            })
            .collect();
        Ok(ConvexBody { dim: d, vertices, facets, equalities })
    }

    /// Box `[lo, hi]^d`.
    pub fn cube(dim: usize, lo: T, hi: T) -> Self {
        let mut pts = vec![Vec::new()];
        for _ in 0..dim {
            pts = pts
                .into_iter()
                .flat_map(|p: Vec<T>| {
                    [lo.clone(), hi.clone()].into_iter().map(move |x| {
                        let mut q = p.clone();
                        q.push(x);
                        q
                    })
                })
                .collect();
        }
        Self::hull(&pts).expect("cube is well formed")
    }

    /// Standard simplex `conv(0, e_1, …, e_d)`.
    pub fn standard_simplex(dim: usize) -> Self {
        let mut pts = vec![vec![T::zero(); dim]];
        for i in 0..dim {
            let mut e = vec![T::zero(); dim];
            e[i] = T::one();
            pts.push(e);
        }
        Self::hull(&pts).expect("simplex is well formed")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Vec<T>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Halfspace<T>] {
        &self.facets
    }

    pub fn equalities(&self) -> &[Halfspace<T>] {
        &self.equalities
    }

    pub fn affine_dim(&self) -> usize {
        self.dim - self.equalities.len()
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.equalities.is_empty()
    }

    pub fn require_full_dimensional(&self) -> Result<(), GeomError> {
        if self.is_full_dimensional() {
            Ok(())
        } else {
            Err(GeomError::Degenerate { affine: self.affine_dim(), ambient: self.dim })
        }
    }

    fn check_dim(&self, other: usize) -> Result<(), GeomError> {
        if self.dim == other {
            Ok(())
        } else {
            Err(GeomError::DimensionMismatch { expected: self.dim, got: other })
        }
    }

    /// Full-dimensional simplices whose union is the body (empty when degenerate).
    pub fn simplices(&self) -> Vec<Vec<Vec<T>>> {
        if !self.is_full_dimensional() {
            return Vec::new();
        }
        let mut h = IncrementalHull::new(self.dim);
        for v in &self.vertices {
            h.insert(v.clone());
        }
        let anchor = self.vertices[0].clone();
        let mut out = Vec::new();
        for f in h.alive_facets() {
            let mut simplex = vec![anchor.clone()];
            simplex.extend(f.vertices.iter().map(|&i| h.point(i).to_vec()));
            let rows: Vec<Vec<T>> = simplex[1..].iter().map(|p| sub(p, &anchor)).collect();
            if !determinant(&rows).is_negligible() {
                out.push(simplex);
            }
        }
        out
    }

    /// Lebesgue measure in R^d; zero for degenerate bodies.
    pub fn volume(&self) -> T {
        let fact = T::from_int(crate::scalar::factorial(self.dim) as i64);
        self.simplices()
            .iter()
            .map(|s| {
                let rows: Vec<Vec<T>> = s[1..].iter().map(|p| sub(p, &s[0])).collect();
                determinant(&rows).abs()
            })
            .fold(T::zero(), |a, b| a + b)
            / fact
    }

    /// Membership; `interior_only` demands strict facet inequalities and full dimension.
    pub fn contains(&self, p: &[T], interior_only: bool) -> Result<bool, GeomError> {
        self.check_dim(p.len())?;
        if interior_only && !self.is_full_dimensional() {
            return Ok(false);
        }
        if self.equalities.iter().any(|e| !e.slack(p).is_negligible()) {
            return Ok(false);
        }
        Ok(self.facets.iter().all(|f| {
            let s = f.slack(p);
            if interior_only {
                s.is_negative_strict()
            } else {
                !s.is_positive_strict()
            }
        }))
    }

    /// Dilation `αB` about the origin.
    pub fn scale(&self, alpha: &T) -> Result<Self, GeomError> {
        if !alpha.is_positive_strict() {
            return Err(GeomError::NonPositiveScale);
        }
        Ok(self.map_affine(|v| scale_vec(v, alpha), |h| Halfspace {
            normal: h.normal.clone(),
            offset: h.offset.clone() * alpha.clone(),
        }))
    }

    pub fn translate(&self, shift: &[T]) -> Result<Self, GeomError> {
        self.check_dim(shift.len())?;
        Ok(self.map_affine(|v| add(v, shift), |h| Halfspace {
            normal: h.normal.clone(),
            offset: h.offset.clone() + dot(&h.normal, shift),
        }))
    }

    fn map_affine(&self, pt: impl Fn(&[T]) -> Vec<T>, hs: impl Fn(&Halfspace<T>) -> Halfspace<T>) -> Self {
        let mut vertices: Vec<Vec<T>> = self.vertices.iter().map(|v| pt(v)).collect();
        vertices.sort_by(|a, b| lex_cmp(a, b));
        ConvexBody {
            dim: self.dim,
            vertices,
            facets: self.facets.iter().map(&hs).collect(),
            equalities: self.equalities.iter().map(&hs).collect(),
        }
    }

    /// Average of the vertices; an interior point of full-dimensional bodies.
    pub fn vertex_centroid(&self) -> Vec<T> {
        let n = T::from_int(self.vertices.len() as i64);
        let mut c = vec![T::zero(); self.dim];
        for v in &self.vertices {
            c = add(&c, v);
        }
        c.into_iter().map(|x| x / n.clone()).collect()
    }

    /// Scaling by `alpha` about `center`.
    pub fn scale_about(&self, center: &[T], alpha: &T) -> Result<Self, GeomError> {
        let neg: Vec<T> = center.iter().map(|x| -x.clone()).collect();
        self.translate(&neg)?.scale(alpha)?.translate(center)
    }

    /// Support function `max_{v} ⟨v, direction⟩`.
    pub fn support(&self, direction: &[T]) -> T {
        self.vertices
            .iter()
            .map(|v| dot(v, direction))
            .reduce(|a, b| if b > a { b } else { a })
            .expect("bodies are nonempty")
    }

    pub fn minkowski_sum(&self, other: &Self) -> Result<Self, GeomError> {
        self.check_dim(other.dim)?;
        let pts: Vec<Vec<T>> = self
            .vertices
            .iter()
            .flat_map(|a| other.vertices.iter().map(move |b| add(a, b)))
            .collect();
        Self::hull(&pts)
    }

    /// All constraints as inequalities (equalities split in two).
    pub fn inequalities(&self) -> Vec<Halfspace<T>> {
        let mut out = self.facets.clone();
        for e in &self.equalities {
            out.push(e.clone());
            out.push(Halfspace {
                normal: e.normal.iter().map(|x| -x.clone()).collect(),
                offset: -e.offset.clone(),
            });
        }
        out
    }

    /// Bounded polytope cut out by `constraints`; `None` if empty.
    ///
    /// Vertices are enumerated over all `dim`-subsets of constraints, so the
    /// caller must supply a system whose solution set is bounded.
    pub fn from_halfspaces(dim: usize, constraints: &[Halfspace<T>]) -> Result<Option<Self>, GeomError> {
        if dim == 0 {
            return Err(GeomError::ZeroDimension);
        }
        if let Some(bad) = constraints.iter().find(|h| h.normal.len() != dim) {
            return Err(GeomError::DimensionMismatch { expected: dim, got: bad.normal.len() });
        }
        let mut candidates: Vec<Vec<T>> = Vec::new();
        for combo in Combinations::new(constraints.len(), dim) {
            let a: Vec<Vec<T>> = combo.iter().map(|&i| constraints[i].normal.clone()).collect();
            let b: Vec<T> = combo.iter().map(|&i| constraints[i].offset.clone()).collect();
            let Some(x) = solve(&a, &b) else { continue };
            if constraints.iter().all(|h| !h.slack(&x).is_positive_strict())
                && !candidates.iter().any(|c| vec_eq(c, &x))
            {
                candidates.push(x);
            }
        }
        if candidates.is_empty() {
            return Ok(None);
        }
        Self::hull(&candidates).map(Some)
    }

    pub fn intersection(&self, other: &Self) -> Result<Option<Self>, GeomError> {
        self.check_dim(other.dim)?;
        let mut cons = self.inequalities();
        cons.extend(other.inequalities());
        Self::from_halfspaces(self.dim, &cons)
    }

    /// Minkowski difference `{x : x + other ⊆ self}` for full-dimensional `self`.
    pub fn erode(&self, other: &Self) -> Result<Self, GeomError> {
        self.check_dim(other.dim)?;
        self.require_full_dimensional()?;
        let cons: Vec<Halfspace<T>> = self
            .facets
            .iter()
            .map(|f| Halfspace { normal: f.normal.clone(), offset: f.offset.clone() - other.support(&f.normal) })
            .collect();
        Self::from_halfspaces(self.dim, &cons)?.ok_or(GeomError::Infeasible)
    }

    /// Hausdorff distance, evaluated as a maximum over vertices.
    pub fn hausdorff_distance(&self, other: &Self) -> Result<f64, GeomError> {
        self.check_dim(other.dim)?;
        let one_side = |a: &Self, b: &Self| {
            a.vertices
                .iter()
                .map(|v| distance::distance_to_body(v, b))
                .fold(0.0f64, f64::max)
        };
        Ok(one_side(self, other).max(one_side(other, self)))
    }

    /// `vol(a) + vol(b) − 2 vol(a ∩ b)`, exact.
    pub fn symmetric_difference_distance(&self, other: &Self) -> Result<T, GeomError> {
        self.check_dim(other.dim)?;
        let inter = match self.intersection(other)? {
            Some(b) => b.volume(),
            None => T::zero(),
        };
        Ok(self.volume() + other.volume() - T::from_int(2) * inter)
    }

    pub fn to_text(&self) -> String {
        io::write_body(self)
    }

    pub fn from_text(text: &str) -> Result<Self, ParseBodyError> {
        io::read_body(text)
    }

    /// Converts coordinates into another scalar type (rebuilding the hull).
    pub fn convert<U: Scalar>(&self) -> ConvexBody<U> {
        let pts: Vec<Vec<U>> = self
            .vertices
            .iter()
            .map(|v| v.iter().map(|x| U::parse_token(&x.to_token()).unwrap_or_else(|| U::from_f64_lossy(x.approx()))).collect())
            .collect();
        ConvexBody::hull(&pts).expect("conversion preserves shape")
    }

    /// Coordinatewise minimum and maximum over the vertices.
    pub fn bounding_box(&self) -> (Vec<T>, Vec<T>) {
        let mut lo = self.vertices[0].clone();
        let mut hi = self.vertices[0].clone();
        for v in &self.vertices {
            for i in 0..self.dim {
                if v[i].partial_cmp(&lo[i]) == Some(Ordering::Less) {
                    lo[i] = v[i].clone();
                }
                if v[i].partial_cmp(&hi[i]) == Some(Ordering::Greater) {
                    hi[i] = v[i].clone();
                }
            }
        }
        (lo, hi)
    }
}

/// Lexicographic k-subsets of `0..n`.
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        Combinations { n, current: (k <= n).then(|| (0..k).collect()) }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        let mut i = k;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if next[i] < self.n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
                break;
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::ratio(n, d)
    }

    fn body(pts: &[&[(i64, i64)]]) -> ConvexBody<Q> {
        let v: Vec<Vec<Q>> = pts.iter().map(|p| p.iter().map(|&(n, d)| q(n, d)).collect()).collect();
        ConvexBody::hull(&v).unwrap()
    }

    #[test]
    fn interior_point_is_dropped() {
        let b = body(&[&[(0, 1), (0, 1)], &[(1, 1), (0, 1)], &[(0, 1), (1, 1)], &[(1, 2), (1, 4)]]);
        assert_eq!(b.vertices().len(), 3);
        assert_eq!(b.facets().len(), 3);
        assert_eq!(b.volume(), q(1, 2));
    }

    #[test]
    fn segment_and_point() {
        let s = body(&[&[(0, 1)], &[(1, 1)]]);
        assert_eq!(s.volume(), q(1, 1));
        let p = body(&[&[(3, 1), (1, 2)]]);
        assert_eq!(p.affine_dim(), 0);
        assert_eq!(p.volume(), q(0, 1));
    }

    #[test]
    fn degenerate_segment_in_plane() {
        let s = body(&[&[(0, 1), (0, 1)], &[(1, 1), (1, 1)], &[(2, 1), (2, 1)]]);
        assert_eq!(s.affine_dim(), 1);
        assert_eq!(s.vertices().len(), 2);
        assert!(s.contains(&[q(1, 2), q(1, 2)], false).unwrap());
        assert!(!s.contains(&[q(1, 2), q(1, 3)], false).unwrap());
        assert!(!s.contains(&[q(1, 2), q(1, 2)], true).unwrap());
    }

    #[test]
    fn pentagon_volume() {
        let b = body(&[&[(0, 1), (0, 1)], &[(2, 1), (0, 1)], &[(0, 1), (1, 1)], &[(2, 1), (1, 1)], &[(1, 1), (2, 1)]]);
        assert_eq!(b.volume(), q(3, 1));
    }

    #[test]
    fn cube_volume_three_dims() {
        let c = ConvexBody::<Q>::cube(3, q(0, 1), q(2, 1));
        assert_eq!(c.vertices().len(), 8);
        assert_eq!(c.facets().len(), 6);
        assert_eq!(c.volume(), q(8, 1));
    }

    #[test]
    fn sums_intersections_erosion() {
        let a = ConvexBody::<Q>::cube(2, q(0, 1), q(1, 1));
        let sum = a.minkowski_sum(&a).unwrap();
        assert_eq!(sum.volume(), q(4, 1));
        let shifted = a.translate(&[q(1, 2), q(0, 1)]).unwrap();
        assert_eq!(a.symmetric_difference_distance(&shifted).unwrap(), q(1, 1));
        let far = a.translate(&[q(3, 1), q(0, 1)]).unwrap();
        assert_eq!(a.symmetric_difference_distance(&far).unwrap(), q(2, 1));
        let small = ConvexBody::<Q>::cube(2, q(0, 1), q(1, 4));
        let eroded = sum.erode(&small).unwrap();
        assert_eq!(eroded.volume(), q(49, 16));
    }

    #[test]
    fn combinations_count() {
        assert_eq!(Combinations::new(5, 2).count(), 10);
        assert_eq!(Combinations::new(3, 0).count(), 1);
        assert_eq!(Combinations::new(2, 3).count(), 0);
    }

    #[test]
    fn float_carrier_agrees() {
        let b: ConvexBody<f64> = ConvexBody::hull(&[vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 1.0], vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
        assert!((b.volume() - 3.0).abs() < 1e-12);
    }
}
