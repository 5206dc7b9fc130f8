//! Toric metrized divisors: a polytope with one concave roof per place.
//!
//! The section `x^γ` of `mD` gets degree `m·ϑ_ω(γ/m)` at place `ω`, measured
//! in units of `ln b_ω` at discrete places and in nats at archimedean ones.

mod checks;
mod io;
mod sections;
pub mod templates;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::adelic::{AdelicCurve, AdelicError, Nats, PlaceKind};
use crate::concave::ConcaveError;
use crate::convex_geom::GeomError;
use crate::roof::{PiecewiseLinearConcave, RoofError};
use crate::scalar::{approx_vec, dot, dot_f64, Scalar};
use crate::{Polytope, Rational};

pub use checks::{
    BoundaryFamily, ClassicalVolumes, DualityReport, EssentialMinimum, HeightInequality, HilbertSamuel,
};
pub use sections::{lattice_points, ToricSections};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToricError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown place {0}")]
    UnknownPlace(String),
    #[error("roof for place {place} has dimension {got}, polytope has {expected}")]
    DimensionMismatch { place: String, expected: usize, got: usize },
    #[error("trivial place {0} must carry the zero roof")]
    TrivialRoof(String),
    #[error("no level up to {0} dilates the polytope to a lattice polytope")]
    NonLattice(u32),
    #[error("valuation {gamma:?} is not in {m}P")]
    NotInDilate { m: u32, gamma: Vec<i64> },
    #[error("erosion of the polytope is empty")]
    EmptyErosion,
    #[error("shrinking is only defined for constant boundary roofs (place {0})")]
    NonConstantBoundary(String),
    #[error("boundary roofs must be nonnegative (place {0})")]
    NegativeBoundary(String),
    #[error("the divisor is not big")]
    NotBig,
    #[error("divisors live on different curves")]
    CurveMismatch,
    #[error("no place can carry a shift")]
    NoShiftPlace,
    #[error("unknown template {0}")]
    UnknownTemplate(String),
    #[error(transparent)]
    Adelic(#[from] AdelicError),
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Roof(#[from] RoofError),
    #[error(transparent)]
    Concave(#[from] ConcaveError),
}

impl From<ToricError> for ConcaveError {
    fn from(e: ToricError) -> Self {
        match e {
            ToricError::Concave(c) => c,
            other => ConcaveError::Source(other.to_string()),
        }
    }
}

/// Subdivision vertices of one roof with their values, for Green functions.
#[derive(Clone, Debug)]
struct Lifted {
    vertices: Vec<Vec<Rational>>,
    values: Vec<Rational>,
    vertices_f64: Vec<Vec<f64>>,
    values_f64: Vec<f64>,
}

impl Lifted {
    fn new(roof: &PiecewiseLinearConcave<Rational>) -> Result<Self, RoofError> {
        let vertices = roof.subdivision_vertices()?;
        let values: Vec<Rational> = vertices.iter().map(|v| roof.eval(v)).collect();
        Ok(Lifted {
            vertices_f64: vertices.iter().map(|v| approx_vec(v)).collect(),
            values_f64: values.iter().map(Scalar::approx).collect(),
            vertices,
            values,
        })
    }
}

/// Per-place tropical coordinates `u_ω`, indexed like the curve's places.
#[derive(Clone, Debug, PartialEq)]
pub struct TropicalPoint {
    pub coords: Vec<Vec<f64>>,
}

impl TropicalPoint {
    pub fn origin(places: usize, dim: usize) -> Self {
        TropicalPoint { coords: vec![vec![0.0; dim]; places] }
    }
}

#[derive(Clone, Debug)]
pub struct MetrizedToricDivisor {
    curve: AdelicCurve,
    polytope: Polytope,
    roofs: Vec<PiecewiseLinearConcave<Rational>>,
    lifted: Vec<Lifted>,
}

/// Nats per roof unit at a place: `ln b` at discrete places, 1 at archimedean ones.
fn unit_scale(kind: PlaceKind, step_base: Option<u64>, label: &str) -> Result<f64, ToricError> {
    match kind {
        PlaceKind::Archimedean => Ok(1.0),
        PlaceKind::Trivial => Ok(0.0),
        PlaceKind::NonArchimedean => step_base
            .map(|b| (b as f64).ln())
            .ok_or_else(|| AdelicError::NoValueGroup(label.to_string()).into()),
    }
}

impl MetrizedToricDivisor {
    /// Roofs are given by place label; unlisted places carry the zero roof.
    /// Every roof is restricted to the polytope.
    pub fn new(
        curve: AdelicCurve,
        polytope: Polytope,
        roofs: Vec<(String, PiecewiseLinearConcave<Rational>)>,
    ) -> Result<Self, ToricError> {
        let d = polytope.dim();
        let mut per_place: Vec<PiecewiseLinearConcave<Rational>> = curve
            .places
            .iter()
            .map(|_| PiecewiseLinearConcave::constant(polytope.clone(), Rational::zero()))
            .collect();
        for (label, roof) in roofs {
            let i = curve.index_of(&label).ok_or_else(|| ToricError::UnknownPlace(label.clone()))?;
            if roof.dim() != d {
                return Err(ToricError::DimensionMismatch { place: label, expected: d, got: roof.dim() });
            }
            let place = &curve.places[i];
            unit_scale(place.kind, place.step_base, &place.label)?;
            let restricted = PiecewiseLinearConcave::new(polytope.clone(), roof.pieces().to_vec())?;
            if place.kind == PlaceKind::Trivial
                && !(restricted.is_constant() && restricted.max_value()?.is_zero())
            {
                return Err(ToricError::TrivialRoof(label));
            }
            per_place[i] = restricted;
        }
        let lifted = per_place.iter().map(Lifted::new).collect::<Result<_, _>>()?;
        Ok(MetrizedToricDivisor { curve, polytope, roofs: per_place, lifted })
    }

    pub fn curve(&self) -> &AdelicCurve {
        &self.curve
    }

    pub fn polytope(&self) -> &Polytope {
        &self.polytope
    }

    pub fn dim(&self) -> usize {
        self.polytope.dim()
    }

    /// Roofs indexed like the curve's places.
    pub fn roofs(&self) -> &[PiecewiseLinearConcave<Rational>] {
        &self.roofs
    }

    pub fn roof(&self, label: &str) -> Option<&PiecewiseLinearConcave<Rational>> {
        self.curve.index_of(label).map(|i| &self.roofs[i])
    }

    /// `ν(ω)` times nats per roof unit, per place.
    pub fn place_factors(&self) -> Vec<f64> {
        self.curve
            .places
            .iter()
            .map(|p| p.weight_f64() * unit_scale(p.kind, p.step_base, &p.label).unwrap_or(0.0))
            .collect()
    }

    /// Degree of `x^γ` at place `i` on level `m`, from `m·ϑ(γ/m) = min_k(⟨a_k,γ⟩ + m·b_k)`.
    pub(crate) fn local_degree(&self, i: usize, m: u32, gamma: &[Rational]) -> Nats {
        let roof = &self.roofs[i];
        let mr = Rational::from_integer(BigInt::from(m));
        let v = roof
            .pieces()
            .iter()
            .map(|p| dot(&p.gradient, gamma) + p.offset.clone() * mr.clone())
            .reduce(|a, b| if b < a { b } else { a })
            .expect("roofs have pieces");
        let place = &self.curve.places[i];
        match place.kind {
            PlaceKind::Archimedean => Nats::raw(v),
            PlaceKind::NonArchimedean => Nats::log_units(v, place.step_base.expect("checked in new")),
            PlaceKind::Trivial => Nats::zero(),
        }
    }

    /// `λ ↦ Σ_ω ν(ω) ϑ_ω(λ)` in nats, as one concave function on `P`.
    pub fn roof_transform(&self) -> Result<PiecewiseLinearConcave<f64>, ToricError> {
        let domain = self.polytope.convert::<f64>();
        let mut total = PiecewiseLinearConcave::constant(domain, 0.0);
        for (f, roof) in self.place_factors().iter().zip(&self.roofs) {
            if *f == 0.0 || (roof.is_constant() && roof.max_value()?.is_zero()) {
                continue;
            }
            total = total.add(&roof.convert::<f64>().scale_values(f))?;
        }
        Ok(total)
    }

    /// `g_ω(u) = max_{λ∈P}(ϑ_ω(λ) − ⟨λ,u⟩)`, in roof units.
    pub fn green_function(&self, place: usize, u: &[f64]) -> f64 {
        let l = &self.lifted[place];
        l.vertices_f64
            .iter()
            .zip(&l.values_f64)
            .map(|(v, t)| t - dot_f64(v, u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Exact Green function at a rational point.
    pub fn green_function_exact(&self, place: usize, u: &[Rational]) -> Rational {
        let l = &self.lifted[place];
        l.vertices
            .iter()
            .zip(&l.values)
            .map(|(v, t)| t.clone() - dot(v, u))
            .reduce(|a, b| if b > a { b } else { a })
            .expect("polytopes have vertices")
    }

    /// `h(x) = Σ_ω ν(ω) (ln b_ω) g_ω(u_ω)` in nats.
    pub fn height(&self, x: &TropicalPoint) -> f64 {
        self.place_factors()
            .iter()
            .enumerate()
            .filter(|(_, f)| **f != 0.0)
            .map(|(i, f)| f * self.green_function(i, &x.coords[i]))
            .sum()
    }

    /// Same curve, new polytope and roofs.
    fn rebuild(&self, polytope: Polytope, roofs: Vec<PiecewiseLinearConcave<Rational>>) -> Result<Self, ToricError> {
        let labeled = self.curve.places.iter().map(|p| p.label.clone()).zip(roofs).collect();
        Self::new(self.curve.clone(), polytope, labeled)
    }

    /// `αD`: polytope `αP`, roofs `λ ↦ αϑ(λ/α)`.
    pub fn scaled(&self, alpha: &Rational) -> Result<Self, ToricError> {
        let roofs = self.roofs.iter().map(|r| r.dilate(alpha)).collect::<Result<Vec<_>, _>>()?;
        self.rebuild(self.polytope.scale(alpha)?, roofs)
    }

    /// Adds `c` to the roof at place `place`.
    pub fn shift_roof(&self, place: usize, c: &Rational) -> Result<Self, ToricError> {
        let mut roofs = self.roofs.clone();
        roofs[place] = roofs[place].shift(c);
        self.rebuild(self.polytope.clone(), roofs)
    }

    /// Shift whose effect on every weight at level `m` is `m·c` nats.
    ///
    /// Uses an archimedean place when there is one, so the shift is exact.
    pub fn shift_total(&self, c: &Rational) -> Result<Self, ToricError> {
        let places = &self.curve.places;
        let pick = places
            .iter()
            .position(|p| p.kind == PlaceKind::Archimedean && p.weight.is_positive())
            .or_else(|| places.iter().position(|p| p.kind == PlaceKind::NonArchimedean && p.weight.is_positive()))
            .ok_or(ToricError::NoShiftPlace)?;
        let p = &places[pick];
        let per_unit = if p.kind == PlaceKind::Archimedean {
            c.clone() / p.weight.clone()
        } else {
            let scale = unit_scale(p.kind, p.step_base, &p.label)? * p.weight_f64();
            Rational::from_float(c.approx() / scale).unwrap_or_else(Rational::zero)
        };
        self.shift_roof(pick, &per_unit)
    }

    /// `D + D'`: Minkowski sum of polytopes, sup-convolution of roofs place by place.
    pub fn sum(&self, other: &Self) -> Result<Self, ToricError> {
        if self.curve != other.curve {
            return Err(ToricError::CurveMismatch);
        }
        let roofs = self
            .roofs
            .iter()
            .zip(&other.roofs)
            .map(|(a, b)| a.sup_convolution(b))
            .collect::<Result<Vec<_>, _>>()?;
        self.rebuild(self.polytope.minkowski_sum(&other.polytope)?, roofs)
    }

    /// `0 ∈ P` and `ϑ_ω(0) ≥ 0` everywhere, so that adding it never decreases a divisor.
    pub fn is_effective(&self) -> bool {
        let origin = vec![Rational::zero(); self.dim()];
        self.polytope.contains(&origin, false).unwrap_or(false)
            && self.roofs.iter().all(|r| !r.eval(&origin).is_negative())
    }

    /// `(d+1)!·∫_P max(Σνϑ, 0)`.
    pub fn exact_arithmetic_volume(&self) -> Result<f64, ToricError> {
        let fact = crate::scalar::factorial(self.dim() + 1) as f64;
        Ok(fact * self.roof_transform()?.positive_part_integral()?)
    }

    /// `(d+1)!·∫_P Σνϑ`, summed from exact per-place integrals.
    pub fn exact_chi_volume(&self) -> Result<f64, ToricError> {
        let fact = crate::scalar::factorial(self.dim() + 1) as f64;
        let mut total = 0.0;
        for (f, roof) in self.place_factors().iter().zip(&self.roofs) {
            if *f != 0.0 {
                total += f * roof.integral()?.approx();
            }
        }
        Ok(fact * total)
    }

    /// Geometric volume `vol(D) = d!·vol(P)`.
    pub fn geometric_volume(&self) -> f64 {
        crate::scalar::factorial(self.dim()) as f64 * self.polytope.volume().approx()
    }
}
