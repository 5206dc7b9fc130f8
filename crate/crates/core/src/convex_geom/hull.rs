//! Beneath-beyond convex hull in general dimension.
//!
//! Facets are kept as a simplicial boundary complex. A point strictly beyond a
//! facet hyperplane sees it; coplanar points do not, so coplanar facet
//! fragments may coexist and non-extreme points can survive in the complex.
//! [`IncrementalHull::finish`] removes both by merging equal hyperplanes and
//! keeping only points whose incident hyperplanes have full rank.

use std::cmp::Ordering;
use std::collections::HashMap;

use super::linalg::{hyperplane_normal, rank};
use super::Halfspace;
use crate::scalar::{approx_vec, dot, dot_f64, Scalar};

/// Width of the floating-point band inside which exact predicates are used.
const FILTER_BAND: f64 = 1e-9;

#[derive(Clone, Debug)]
pub(crate) struct Facet<T: Scalar> {
    pub vertices: Vec<usize>,
    pub plane: Halfspace<T>,
    normal_f64: Vec<f64>,
    offset_f64: f64,
    /// The plane scaled to machine integers, when it fits.
    int_plane: Option<(Vec<i64>, i64)>,
}

/// `a·x ≤ b` with every coefficient multiplied by the common denominator.
fn integer_plane<T: Scalar>(plane: &Halfspace<T>) -> Option<(Vec<i64>, i64)> {
    let fracs: Vec<(i64, i64)> = plane.normal.iter().chain(std::iter::once(&plane.offset)).map(Scalar::small_fraction).collect::<Option<_>>()?;
    let mut l: i64 = 1;
    for &(_, d) in &fracs {
        l = l.checked_mul(d / gcd(l, d))?;
    }
    let mut ints = fracs.into_iter().map(|(n, d)| n.checked_mul(l / d)).collect::<Option<Vec<i64>>>()?;
    let b = ints.pop()?;
    Some((ints, b))
}

fn gcd(mut a: i64, mut b: i64) -> i64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs().max(1)
}

/// Sign of `a·p − b` in integer arithmetic, or `None` on overflow.
fn integer_side<T: Scalar>(a: &[i64], b: i64, p: &[T]) -> Option<Ordering> {
    let mut den: i128 = 1;
    let mut fracs = Vec::with_capacity(p.len());
    for x in p {
        let (n, d) = x.small_fraction()?;
        let g = i128::from(gcd(den.try_into().ok()?, d));
        den = den.checked_mul(i128::from(d) / g)?;
        fracs.push((n, d));
    }
    let mut sum = -i128::from(b).checked_mul(den)?;
    for (&ai, (n, d)) in a.iter().zip(fracs) {
        let term = i128::from(ai).checked_mul(i128::from(n))?.checked_mul(den / i128::from(d))?;
        sum = sum.checked_add(term)?;
    }
    Some(sum.cmp(&0))
}

impl<T: Scalar> Facet<T> {
    fn new(vertices: Vec<usize>, plane: Halfspace<T>) -> Self {
        let nf = approx_vec(&plane.normal);
        let norm = dot_f64(&nf, &nf).sqrt().max(f64::MIN_POSITIVE);
        let normal_f64 = nf.iter().map(|x| x / norm).collect();
        let offset_f64 = plane.offset.approx() / norm;
        let int_plane = if T::EXACT { integer_plane(&plane) } else { None };
        Facet {
            vertices,
            plane,
            normal_f64,
            offset_f64,
            int_plane,
        }
    }

    /// Sign of `normal·p − offset`, filtered through f64 first.
    pub fn side(&self, p: &[T], pf: &[f64]) -> Ordering {
        let approx = dot_f64(&self.normal_f64, pf) - self.offset_f64;
        let scale = 1.0 + pf.iter().fold(0.0f64, |m, x| m.max(x.abs())) + self.offset_f64.abs();
        let band = FILTER_BAND * scale;
        if approx > band {
            return Ordering::Greater;
        }
        if approx < -band {
            return Ordering::Less;
        }
        if !T::EXACT {
            return Ordering::Equal;
        }
        if let Some(side) = self.int_plane.as_ref().and_then(|(a, b)| integer_side(a, *b, p)) {
            return side;
        }
        let v = dot(&self.plane.normal, p) - self.plane.offset.clone();
        if v.is_negligible() {
            Ordering::Equal
        } else if v.is_positive() {
            Ordering::Greater
        } else {
            Ordering::Less
        }
    }
}

/// Hull maintained under point insertion, in full ambient dimension `dim`.
#[derive(Clone, Debug)]
pub struct IncrementalHull<T: Scalar> {
    dim: usize,
    points: Vec<Vec<T>>,
    approx: Vec<Vec<f64>>,
    facets: Vec<Option<Facet<T>>>,
    /// Ids of the facets still alive, in creation order.
    live: Vec<usize>,
    interior: Vec<T>,
    basis: Vec<usize>,
    echelon: Vec<(usize, Vec<T>)>,
    pending: Vec<usize>,
    built: bool,
}

impl<T: Scalar> IncrementalHull<T> {
    pub fn new(dim: usize) -> Self {
        IncrementalHull {
            dim,
            points: Vec::new(),
            approx: Vec::new(),
            facets: Vec::new(),
            live: Vec::new(),
            interior: Vec::new(),
            basis: Vec::new(),
            echelon: Vec::new(),
            pending: Vec::new(),
            built: false,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// True once the inserted points span the ambient space.
    pub fn is_full_dimensional(&self) -> bool {
        self.built
    }

    /// Points inserted so far that are not yet part of a full-dimensional hull.
    pub fn pending_points(&self) -> impl Iterator<Item = &Vec<T>> {
        self.pending.iter().map(move |&i| &self.points[i])
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    /// Inserts a point and returns whether it was stored; it is dropped only
    /// when it already lies in a full-dimensional hull.
    pub fn insert(&mut self, p: Vec<T>) -> bool {
        assert_eq!(p.len(), self.dim, "point dimension mismatch");
        let pf = approx_vec(&p);
        if self.built {
            if self.first_violated(&p, &pf).is_none() {
                return false;
            }
            self.points.push(p);
            self.approx.push(pf);
            let idx = self.points.len() - 1;
            self.insert_built(idx);
            return true;
        }
        self.points.push(p);
        self.approx.push(pf);
        let idx = self.points.len() - 1;
        self.pending.push(idx);
        self.extend_basis(idx);
        if self.basis.len() == self.dim + 1 {
            self.build();
        }
        true
    }

    fn extend_basis(&mut self, idx: usize) {
        if self.basis.is_empty() {
            self.basis.push(idx);
            return;
        }
        let base = &self.points[self.basis[0]];
        let mut v: Vec<T> = self.points[idx]
            .iter()
            .zip(base)
            .map(|(x, y)| x.clone() - y.clone())
            .collect();
        for (pc, row) in &self.echelon {
            let f = v[*pc].clone();
            if f.is_negligible() {
                continue;
            }
            for (x, r) in v.iter_mut().zip(row) {
                *x = x.clone() - r.clone() * f.clone();
            }
        }
        let pivot = if T::EXACT {
            v.iter().position(|x| !x.is_negligible())
        } else {
            let (i, m) = v
                .iter()
                .enumerate()
                .fold((0, 0.0f64), |(bi, bm), (i, x)| if x.approx().abs() > bm { (i, x.approx().abs()) } else { (bi, bm) });
            (m > 1e-9).then_some(i)
        };
        if let Some(pc) = pivot {
            let inv = T::one() / v[pc].clone();
            let row: Vec<T> = v.into_iter().map(|x| x * inv.clone()).collect();
            for (_, other) in self.echelon.iter_mut() {
                let f = other[pc].clone();
                if f.is_negligible() {
                    continue;
                }
                for (x, r) in other.iter_mut().zip(&row) {
                    *x = x.clone() - r.clone() * f.clone();
                }
            }
            self.echelon.push((pc, row));
            self.basis.push(idx);
        }
    }

    fn build(&mut self) {
        let k = self.dim;
        let denom = T::from_int((k + 1) as i64);
        let mut centroid = vec![T::zero(); k];
        for &b in &self.basis {
            for (c, x) in centroid.iter_mut().zip(&self.points[b]) {
                *c = c.clone() + x.clone();
            }
        }
        self.interior = centroid.into_iter().map(|c| c / denom.clone()).collect();
        let simplex = self.basis.clone();
        for skip in 0..simplex.len() {
            let verts: Vec<usize> = simplex.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
            let facet = self.make_facet(verts);
            self.live.push(self.facets.len());
            self.facets.push(Some(facet));
        }
        self.built = true;
        let pending = std::mem::take(&mut self.pending);
        for idx in pending {
            if self.basis.contains(&idx) {
                continue;
            }
            let (p, pf) = (self.points[idx].clone(), self.approx[idx].clone());
            if self.first_violated(&p, &pf).is_some() {
                self.insert_built(idx);
            }
        }
    }

    fn make_facet(&self, mut verts: Vec<usize>) -> Facet<T> {
        verts.sort_unstable();
        let pts: Vec<Vec<T>> = verts.iter().map(|&v| self.points[v].clone()).collect();
        let mut normal = hyperplane_normal(&pts);
        let mut offset = dot(&normal, &pts[0]);
        let inside = dot(&normal, &self.interior) - offset.clone();
        if inside.is_positive() {
            normal = normal.into_iter().map(|x| -x).collect();
            offset = -offset;
        }
        Facet::new(verts, Halfspace { normal, offset })
    }

    fn insert_built(&mut self, idx: usize) {
        let p = self.points[idx].clone();
        let pf = self.approx[idx].clone();
        let visible: Vec<usize> = self
            .live
            .iter()
            .copied()
            .filter(|&i| self.facets[i].as_ref().map_or(false, |f| f.side(&p, &pf) == Ordering::Greater))
            .collect();
        if visible.is_empty() {
            return;
        }
        let mut ridges: HashMap<Vec<usize>, usize> = HashMap::new();
        for &fi in &visible {
            let verts = &self.facets[fi].as_ref().expect("visible facet is alive").vertices;
            for skip in 0..verts.len() {
                let ridge: Vec<usize> = verts.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                *ridges.entry(ridge).or_insert(0) += 1;
            }
        }
        for &fi in &visible {
            self.facets[fi] = None;
        }
        let facets = &self.facets;
        self.live.retain(|&i| facets[i].is_some());
        let mut horizon: Vec<Vec<usize>> = ridges.into_iter().filter(|&(_, c)| c == 1).map(|(r, _)| r).collect();
        horizon.sort();
        for mut ridge in horizon {
            ridge.push(idx);
            let facet = self.make_facet(ridge);
            self.live.push(self.facets.len());
            self.facets.push(Some(facet));
        }
    }

    /// Id of a facet strictly violated by `p`, or `None` if `p` lies in the hull.
    pub fn first_violated(&self, p: &[T], pf: &[f64]) -> Option<usize> {
        // Newest first: recently created facets are the likeliest to be violated.
        self.live
            .iter()
            .rev()
            .copied()
            .find(|&i| self.facets[i].as_ref().map_or(false, |f| f.side(p, pf) == Ordering::Greater))
    }

    pub fn facet_alive(&self, id: usize) -> bool {
        self.facets.get(id).map_or(false, Option::is_some)
    }

    pub(crate) fn alive_facets(&self) -> impl Iterator<Item = &Facet<T>> {
        self.live.iter().filter_map(move |&i| self.facets[i].as_ref())
    }

    pub(crate) fn point(&self, idx: usize) -> &[T] {
        &self.points[idx]
    }

    /// Extreme point indices and irredundant facet hyperplanes.
    pub fn finish(&self) -> (Vec<usize>, Vec<Halfspace<T>>) {
        assert!(self.built, "finish requires a full-dimensional hull");
        let mut planes: Vec<Halfspace<T>> = Vec::new();
        let mut incidence: HashMap<usize, Vec<usize>> = HashMap::new();
        for facet in self.alive_facets() {
            let canon = facet.plane.canonical();
            let pid = match planes.iter().position(|p| p.same_as(&canon)) {
                Some(i) => i,
                None => {
                    planes.push(canon);
                    planes.len() - 1
                }
            };
            for &v in &facet.vertices {
                let list = incidence.entry(v).or_default();
                if !list.contains(&pid) {
                    list.push(pid);
                }
            }
        }
        let mut extreme: Vec<usize> = incidence
            .into_iter()
            .filter(|(_, pids)| {
                pids.len() >= self.dim && {
                    let normals: Vec<Vec<T>> = pids.iter().map(|&i| planes[i].normal.clone()).collect();
                    rank(&normals) == self.dim
                }
            })
            .map(|(v, _)| v)
            .collect();
        extreme.sort_unstable();
        (extreme, planes)
    }
}
