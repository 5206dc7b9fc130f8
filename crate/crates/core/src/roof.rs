//! Concave piecewise-linear functions on polytopes, as minima of affine pieces.

use thiserror::Error;

use crate::convex_geom::{ConvexBody, GeomError, Halfspace};
use crate::scalar::{add, dot, lex_cmp, sub, vec_eq, Scalar};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RoofError {
    #[error("a piecewise-linear function needs at least one affine piece")]
    NoPieces,
    #[error("piece dimension {got} does not match domain dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

/// `λ ↦ ⟨gradient, λ⟩ + offset`.
#[derive(Clone, Debug, PartialEq)]
pub struct AffinePiece<T> {
    pub gradient: Vec<T>,
    pub offset: T,
}

impl<T: Scalar> AffinePiece<T> {
    pub fn eval(&self, x: &[T]) -> T {
        dot(&self.gradient, x) + self.offset.clone()
    }
}

#[derive(Clone, Debug)]
pub struct PiecewiseLinearConcave<T: Scalar> {
    domain: ConvexBody<T>,
    pieces: Vec<AffinePiece<T>>,
}

impl<T: Scalar> PiecewiseLinearConcave<T> {
    pub fn new(domain: ConvexBody<T>, pieces: Vec<AffinePiece<T>>) -> Result<Self, RoofError> {
        if pieces.is_empty() {
            return Err(RoofError::NoPieces);
        }
        if let Some(bad) = pieces.iter().find(|p| p.gradient.len() != domain.dim()) {
            return Err(RoofError::DimensionMismatch { expected: domain.dim(), got: bad.gradient.len() });
        }
        Ok(PiecewiseLinearConcave { domain, pieces })
    }

    pub fn constant(domain: ConvexBody<T>, c: T) -> Self {
        let d = domain.dim();
        PiecewiseLinearConcave { domain, pieces: vec![AffinePiece { gradient: vec![T::zero(); d], offset: c }] }
    }

    pub fn domain(&self) -> &ConvexBody<T> {
        &self.domain
    }

    pub fn pieces(&self) -> &[AffinePiece<T>] {
        &self.pieces
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn eval(&self, x: &[T]) -> T {
        self.pieces
            .iter()
            .map(|p| p.eval(x))
            .reduce(|a, b| if b < a { b } else { a })
            .expect("at least one piece")
    }

    /// Index of a piece attaining the minimum at `x`.
    pub fn active_piece(&self, x: &[T]) -> usize {
        let vals: Vec<T> = self.pieces.iter().map(|p| p.eval(x)).collect();
        let mut best = 0;
        for (i, v) in vals.iter().enumerate() {
            if *v < vals[best] {
                best = i;
            }
        }
        best
    }

    pub fn is_constant(&self) -> bool {
        self.pieces.iter().all(|p| p.gradient.iter().all(|g| g.is_negligible()))
    }

    pub fn shift(&self, c: &T) -> Self {
        self.map_pieces(|p| AffinePiece { gradient: p.gradient.clone(), offset: p.offset.clone() + c.clone() })
    }

    /// Multiplies values by a nonnegative factor.
    pub fn scale_values(&self, s: &T) -> Self {
        self.map_pieces(|p| AffinePiece {
            gradient: p.gradient.iter().map(|g| g.clone() * s.clone()).collect(),
            offset: p.offset.clone() * s.clone(),
        })
    }

    fn map_pieces(&self, f: impl Fn(&AffinePiece<T>) -> AffinePiece<T>) -> Self {
        PiecewiseLinearConcave { domain: self.domain.clone(), pieces: self.pieces.iter().map(f).collect() }
    }

    /// `λ ↦ ε·f(λ/ε)` on `εP`.
    pub fn dilate(&self, eps: &T) -> Result<Self, RoofError> {
        Ok(PiecewiseLinearConcave {
            domain: self.domain.scale(eps)?,
            pieces: self
                .pieces
                .iter()
                .map(|p| AffinePiece { gradient: p.gradient.clone(), offset: p.offset.clone() * eps.clone() })
                .collect(),
        })
    }

    /// Pointwise sum on a common domain.
    pub fn add(&self, other: &Self) -> Result<Self, RoofError> {
        if self.dim() != other.dim() {
            return Err(RoofError::DimensionMismatch { expected: self.dim(), got: other.dim() });
        }
        let mut pieces: Vec<AffinePiece<T>> = Vec::new();
        for a in &self.pieces {
            for b in &other.pieces {
                let p = AffinePiece { gradient: add(&a.gradient, &b.gradient), offset: a.offset.clone() + b.offset.clone() };
                if !pieces.iter().any(|q| vec_eq(&q.gradient, &p.gradient) && (q.offset.clone() - p.offset.clone()).is_negligible()) {
                    pieces.push(p);
                }
            }
        }
        PiecewiseLinearConcave { domain: self.domain.clone(), pieces }.pruned()
    }

    /// Drops pieces that are active only on a lower-dimensional set.
    pub fn pruned(&self) -> Result<Self, RoofError> {
        if !self.domain.is_full_dimensional() || self.pieces.len() == 1 {
            return Ok(self.clone());
        }
        let keep: Vec<AffinePiece<T>> = self
            .regions()?
            .into_iter()
            .map(|(i, _)| self.pieces[i].clone())
            .collect();
        Ok(PiecewiseLinearConcave { domain: self.domain.clone(), pieces: keep })
    }

    /// Full-dimensional cells `{λ ∈ P : piece i is minimal}`.
    pub fn regions(&self) -> Result<Vec<(usize, ConvexBody<T>)>, RoofError> {
        let mut out = Vec::new();
        let base = self.domain.inequalities();
        for (i, pi) in self.pieces.iter().enumerate() {
            let mut cons = base.clone();
            for (j, pj) in self.pieces.iter().enumerate() {
                if i != j {
                    cons.push(Halfspace {
                        normal: sub(&pi.gradient, &pj.gradient),
                        offset: pj.offset.clone() - pi.offset.clone(),
                    });
                }
            }
            if let Some(cell) = ConvexBody::from_halfspaces(self.dim(), &cons)? {
                if cell.is_full_dimensional() {
                    out.push((i, cell));
                }
            }
        }
        Ok(out)
    }

    /// Vertices of the cells of linearity, sorted and deduplicated.
    pub fn subdivision_vertices(&self) -> Result<Vec<Vec<T>>, RoofError> {
        let mut pts: Vec<Vec<T>> = if self.domain.is_full_dimensional() {
            self.regions()?.into_iter().flat_map(|(_, c)| c.vertices().to_vec()).collect()
        } else {
            self.domain.vertices().to_vec()
        };
        pts.sort_by(|a, b| lex_cmp(a, b));
        pts.dedup_by(|a, b| vec_eq(a, b));
        Ok(pts)
    }

    /// `∫_P f dλ`, exact over exact scalars.
    pub fn integral(&self) -> Result<T, RoofError> {
        let mut total = T::zero();
        for (i, cell) in self.regions()? {
            total = total + integrate_affine(&self.pieces[i], &cell);
        }
        Ok(total)
    }

    /// `∫_P max(f, 0) dλ`.
    pub fn positive_part_integral(&self) -> Result<T, RoofError> {
        let mut total = T::zero();
        for (i, cell) in self.regions()? {
            let p = &self.pieces[i];
            let mut cons = cell.inequalities();
            cons.push(Halfspace { normal: p.gradient.iter().map(|g| -g.clone()).collect(), offset: p.offset.clone() });
            if let Some(pos) = ConvexBody::from_halfspaces(self.dim(), &cons)? {
                total = total + integrate_affine(p, &pos);
            }
        }
        Ok(total)
    }

    /// Volume of `{λ ∈ P : f(λ) ≥ t}`.
    pub fn superlevel_volume(&self, t: &T) -> Result<T, RoofError> {
        Ok(self.superlevel_set(t)?.map_or_else(T::zero, |b| b.volume()))
    }

    pub fn superlevel_set(&self, t: &T) -> Result<Option<ConvexBody<T>>, RoofError> {
        let mut cons = self.domain.inequalities();
        for p in &self.pieces {
            cons.push(Halfspace {
                normal: p.gradient.iter().map(|g| -g.clone()).collect(),
                offset: p.offset.clone() - t.clone(),
            });
        }
        Ok(ConvexBody::from_halfspaces(self.dim(), &cons)?)
    }

    pub fn max_value(&self) -> Result<T, RoofError> {
        Ok(self.extreme_value(true)?)
    }

    pub fn min_value(&self) -> Result<T, RoofError> {
        Ok(self.extreme_value(false)?)
    }

    fn extreme_value(&self, max: bool) -> Result<T, RoofError> {
        let vals = self.subdivision_vertices()?.into_iter().map(|v| self.eval(&v));
        Ok(vals
            .reduce(|a, b| if (b > a) == max { b } else { a })
            .expect("domain has vertices"))
    }

    /// Supremal convolution `λ ↦ sup_{x+y=λ} f(x) + g(y)` on `P_f + P_g`.
    ///
    /// The graph is the upper hull of sums of lifted subdivision vertices.
    pub fn sup_convolution(&self, other: &Self) -> Result<Self, RoofError> {
        let d = self.dim();
        if other.dim() != d {
            return Err(RoofError::DimensionMismatch { expected: d, got: other.dim() });
        }
        let va = self.subdivision_vertices()?;
        let vb = other.subdivision_vertices()?;
        let mut lifted: Vec<Vec<T>> = Vec::new();
        for x in &va {
            let fx = self.eval(x);
            for y in &vb {
                let mut p = add(x, y);
                p.push(fx.clone() + other.eval(y));
                lifted.push(p);
            }
        }
        let domain = self.domain.minkowski_sum(&other.domain)?;
        let floor = lifted
            .iter()
            .map(|p| p[d].clone())
            .reduce(|a, b| if b < a { b } else { a })
            .expect("nonempty")
            - T::one();
        for v in domain.vertices() {
            let mut p = v.clone();
            p.push(floor.clone());
            lifted.push(p);
        }
        let graph = ConvexBody::hull(&lifted)?;
        let mut pieces = Vec::new();
        if graph.is_full_dimensional() {
            for f in graph.facets() {
                let nt = f.normal[d].clone();
                if nt.is_positive_strict() {
                    pieces.push(AffinePiece {
                        gradient: f.normal[..d].iter().map(|n| -n.clone() / nt.clone()).collect(),
                        offset: f.offset.clone() / nt,
                    });
                }
            }
        } else {
            // Domain of lower dimension: the graph is affine over it.
            let x = &va[0];
            let y = &vb[0];
            pieces.push(AffinePiece { gradient: vec![T::zero(); d], offset: self.eval(x) + other.eval(y) });
        }
        PiecewiseLinearConcave::new(domain, pieces)
    }

    pub fn convert<U: Scalar>(&self) -> PiecewiseLinearConcave<U> {
        let cv = |x: &T| U::parse_token(&x.to_token()).unwrap_or_else(|| U::from_f64_lossy(x.approx()));
        PiecewiseLinearConcave {
            domain: self.domain.convert(),
            pieces: self
                .pieces
                .iter()
                .map(|p| AffinePiece { gradient: p.gradient.iter().map(cv).collect(), offset: cv(&p.offset) })
                .collect(),
        }
    }
}

/// `∫_cell piece`, through a simplicial decomposition.
fn integrate_affine<T: Scalar>(piece: &AffinePiece<T>, cell: &ConvexBody<T>) -> T {
    let d = cell.dim();
    let fact = T::from_int(crate::scalar::factorial(d) as i64);
    let n = T::from_int((d + 1) as i64);
    let mut total = T::zero();
    for s in cell.simplices() {
        let rows: Vec<Vec<T>> = s[1..].iter().map(|p| sub(p, &s[0])).collect();
        let vol = crate::convex_geom::linalg::determinant(&rows).abs() / fact.clone();
        let mean = s.iter().map(|p| piece.eval(p)).fold(T::zero(), |a, b| a + b) / n.clone();
        total = total + vol * mean;
    }
    total
}
