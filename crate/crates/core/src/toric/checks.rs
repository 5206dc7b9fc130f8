//! Duality, essential-minimum, height, Hilbert–Samuel and boundary checks.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MetrizedToricDivisor, ToricError, TropicalPoint};
use crate::concave::{AlgebraSource, ConcaveError, FilteredGradedAlgebra, TransformOptions};
use crate::extrapolate::{extrapolate, Extrapolation};
use crate::roof::PiecewiseLinearConcave;
use crate::scalar::{approx_vec, dot, dot_f64, factorial, Scalar};
use crate::{Polytope, Rational};

/// Half-width of the box tropical samples are drawn from.
const SAMPLE_RADIUS: f64 = 4.0;

const PRIMES: [u32; 24] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89];

fn radical_inverse(mut i: u64, base: u32) -> f64 {
    let b = u64::from(base);
    let inv = 1.0 / f64::from(base);
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % b) as f64;
        i /= b;
        f *= inv;
    }
    r
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualityReport {
    /// `inf_u(⟨γ,u⟩ + m·g(u)) − m·ϑ(γ/m)`, nonnegative.
    pub residual: f64,
    /// Where the infimum was attained.
    pub minimizer: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EssentialMinimum {
    pub estimate: f64,
    /// `vol̂_χ^num / ((d+1)·vol(D))`.
    pub zhang_bound: f64,
    /// `sup G`, the value of the infimum for this model.
    pub roof_max: f64,
    pub samples: usize,
    pub argmin: TropicalPoint,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeightInequality {
    /// 1 when `D` is big (`c = 0`), 2 otherwise.
    pub part: u8,
    pub epsilon: f64,
    pub c: f64,
    pub violations: usize,
    pub samples: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct HilbertSamuel {
    pub degree_side: Extrapolation,
    pub integral_side: f64,
    pub relative_gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalVolumes {
    /// Limit of `ĥ⁰(V_m)(d+1)!/m^{d+1}`.
    pub h0_volume: Extrapolation,
    /// Limit of `deg₊(V_m)(d+1)!/m^{d+1}`.
    pub positive_volume: Extrapolation,
    pub pure: bool,
}

/// Divisors `D_ε`, ordered as the requested `ε`.
#[derive(Clone, Debug)]
pub struct BoundaryFamily {
    pub members: Vec<(Rational, MetrizedToricDivisor)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryConvergence {
    pub epsilons: Vec<f64>,
    /// `vol̂(D_ε) − vol̂(D)`, exact.
    pub volume_gaps: Vec<f64>,
    /// `max_grid |G_{D_ε} − G_D|` from the pipeline.
    pub transform_gaps: Vec<f64>,
    /// `|vol̂(D_ε) − vol̂(D)| / ε` at the largest `ε`.
    pub lipschitz: f64,
}

impl MetrizedToricDivisor {
    /// Checks `−log‖x^γ‖_ω = inf_u(⟨γ,u⟩ + m·g_ω(u))`, evaluated exactly at the
    /// piece gradients of `ϑ_ω` and in floating point at `samples`.
    pub fn supnorm_duality_check(
        &self,
        place: usize,
        m: u32,
        gamma: &[i64],
        samples: &[Vec<f64>],
    ) -> Result<DualityReport, ToricError> {
        let mr = Rational::from_integer(BigInt::from(m));
        let g: Vec<Rational> = gamma.iter().map(|&x| Rational::from_integer(BigInt::from(x))).collect();
        let point: Vec<Rational> = g.iter().map(|x| x.clone() / mr.clone()).collect();
        if m == 0 || !self.polytope.contains(&point, false)? {
            return Err(ToricError::NotInDilate { m, gamma: gamma.to_vec() });
        }
        let roof = &self.roofs[place];
        let target = roof.eval(&point) * mr.clone();
        let mut best: Option<(Rational, Vec<f64>)> = None;
        for piece in roof.pieces() {
            let u = &piece.gradient;
            let v = dot(&g, u) + mr.clone() * self.green_function_exact(place, u);
            if best.as_ref().map_or(true, |(b, _)| v < *b) {
                best = Some((v, approx_vec(u)));
            }
        }
        let (exact, mut minimizer) = best.expect("roofs have pieces");
        let mut residual = (exact - target.clone()).approx();
        let gf: Vec<f64> = approx_vec(&g);
        let tf = target.approx();
        for u in samples {
            let v = dot_f64(&gf, u) + f64::from(m) * self.green_function(place, u) - tf;
            if v < residual {
                residual = v;
                minimizer = u.clone();
            }
        }
        Ok(DualityReport { residual, minimizer })
    }

    /// Quasi-random tropical points satisfying the product formula
    /// `Σ_ω ν(ω)(ln b_ω) u_ω = 0`. A random shift of the Halton sequence is drawn from `seed`.
    pub fn tropical_samples(&self, count: usize, seed: u64) -> Vec<TropicalPoint> {
        let d = self.dim();
        let factors = self.place_factors();
        let active: Vec<usize> = (0..factors.len()).filter(|&i| factors[i] > 0.0).collect();
        let total: f64 = active.iter().map(|&i| factors[i]).sum();
        let dims = d * active.len();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shift: Vec<f64> = (0..dims).map(|_| rng.gen::<f64>()).collect();
        (0..count as u64)
            .map(|k| {
                let mut x = TropicalPoint::origin(factors.len(), d);
                for (slot, &i) in active.iter().enumerate() {
                    for a in 0..d {
                        let j = slot * d + a;
                        let base = PRIMES[j % PRIMES.len()];
                        let h = (radical_inverse(k + 1, base) + shift[j]).fract();
                        x.coords[i][a] = SAMPLE_RADIUS * (2.0 * h - 1.0);
                    }
                }
                for a in 0..d {
                    let mean = active.iter().map(|&i| factors[i] * x.coords[i][a]).sum::<f64>() / total;
                    for &i in &active {
                        x.coords[i][a] -= mean;
                    }
                }
                x
            })
            .collect()
    }

    /// Deterministic candidates: the origin and, per active place and piece,
    /// the piece gradient balanced across the other places.
    fn candidate_points(&self) -> Vec<TropicalPoint> {
        let d = self.dim();
        let factors = self.place_factors();
        let active: Vec<usize> = (0..factors.len()).filter(|&i| factors[i] > 0.0).collect();
        let mut out = vec![TropicalPoint::origin(factors.len(), d)];
        if active.len() < 2 {
            return out;
        }
        for &i in &active {
            let rest: f64 = active.iter().filter(|&&j| j != i).map(|&j| factors[j]).sum();
            for piece in self.roofs[i].pieces() {
                let a = approx_vec(&piece.gradient);
                let mut x = TropicalPoint::origin(factors.len(), d);
                x.coords[i] = a.clone();
                for &j in active.iter().filter(|&&j| j != i) {
                    x.coords[j] = a.iter().map(|v| -factors[i] * v / rest).collect();
                }
                out.push(x);
            }
        }
        out
    }

    /// Infimum of heights over candidates and `samples` quasi-random tropical points.
    pub fn essential_minimum_estimate(&self, samples: usize, seed: u64) -> Result<EssentialMinimum, ToricError> {
        if !self.polytope.is_full_dimensional() {
            return Err(ToricError::NotBig);
        }
        let mut points = self.candidate_points();
        points.extend(self.tropical_samples(samples, seed));
        let mut best = f64::INFINITY;
        let mut argmin = points[0].clone();
        for x in &points {
            let h = self.height(x);
            if h < best {
                best = h;
                argmin = x.clone();
            }
        }
        let zhang_bound = self.exact_chi_volume()? / ((self.dim() as f64 + 1.0) * self.geometric_volume());
        Ok(EssentialMinimum {
            estimate: best,
            zhang_bound,
            roof_max: self.roof_transform()?.max_value()?,
            samples: points.len(),
            argmin,
        })
    }

    /// Looks for the largest `ε = 2^{−k}`, `k ≤ 10`, with `h_D ≥ ε·h_M − c` on all samples.
    ///
    /// For big `D` (part 1) `c = 0`; otherwise (part 2) `c` is `margin` minus
    /// the Zhang bound of `D`.
    pub fn height_inequality_check(&self, other: &Self, samples: usize, seed: u64) -> Result<HeightInequality, ToricError> {
        if self.curve != other.curve {
            return Err(ToricError::CurveMismatch);
        }
        let margin = 1e-6;
        let big = self.polytope.is_full_dimensional() && self.roof_transform()?.max_value()? > 0.0;
        let (part, c) = if big {
            (1, 0.0)
        } else {
            let avg = if self.polytope.is_full_dimensional() {
                self.exact_chi_volume()? / ((self.dim() as f64 + 1.0) * self.geometric_volume())
            } else {
                self.roof_transform()?.max_value()?
            };
            (2, margin - avg)
        };
        let mut points = self.candidate_points();
        points.extend(self.tropical_samples(samples, seed));
        let heights: Vec<(f64, f64)> = points.iter().map(|x| (self.height(x), other.height(x))).collect();
        let count = |eps: f64| heights.iter().filter(|(hd, hm)| *hd < eps * hm - c - 1e-12 * (1.0 + hm.abs())).count();
        let mut epsilon = 2f64.powi(-10);
        let mut violations = count(epsilon);
        for k in 0..=10 {
            let eps = 2f64.powi(-k);
            let v = count(eps);
            if v == 0 {
                epsilon = eps;
                violations = 0;
                break;
            }
        }
        Ok(HeightInequality { part, epsilon, c, violations, samples: points.len() })
    }

    /// Degree side `vol̂_χ` from the algebra against `(d+1)!∫Σνϑ`.
    pub fn hilbert_samuel_check(&self, truncation: u32) -> Result<HilbertSamuel, ToricError> {
        let degree_side = self.algebra(truncation)?.chi_volume(truncation)?;
        let integral_side = self.exact_chi_volume()?;
        let relative_gap = (degree_side.limit - integral_side).abs() / integral_side.abs().max(1e-12);
        Ok(HilbertSamuel { degree_side, integral_side, relative_gap })
    }

    /// `ĥ⁰`-based and `deg₊`-based volumes from the per-level bundles.
    pub fn classical_volume_check(&self, truncation: u32) -> Result<ClassicalVolumes, ToricError> {
        let sections = self.sections(truncation)?;
        let fact = factorial(self.dim() + 1) as f64;
        let mut h0 = Vec::new();
        let mut plus = Vec::new();
        let mut pure = true;
        for (m, bundle) in &sections.bundles {
            if bundle.rank() == 0 {
                continue;
            }
            let norm = fact / f64::from(*m).powi(self.dim() as i32 + 1);
            h0.push((*m, bundle.small_sections_h0(&self.curve)?.nats * norm));
            plus.push((*m, bundle.hn_slopes(&self.curve)?.positive_degree * norm));
            pure &= bundle.is_pure(&self.curve)?;
        }
        if h0.is_empty() {
            return Err(ConcaveError::NoLevels(truncation).into());
        }
        Ok(ClassicalVolumes { h0_volume: extrapolate(&h0), positive_volume: extrapolate(&plus), pure })
    }

    /// `D_ε` for each `ε`: for `ε ≥ 0` the polytope `P + εP_B` with roofs
    /// `ϑ_ω ⊞ εϑ_{B,ω}`; for `ε < 0` the erosion `P ⊖ |ε|P_B` with roofs
    /// `ϑ_ω − |ε|c_ω`, which needs constant boundary roofs `c_ω`.
    pub fn boundary_family(&self, boundary: &Self, eps: &[Rational]) -> Result<BoundaryFamily, ToricError> {
        if self.curve != boundary.curve {
            return Err(ToricError::CurveMismatch);
        }
        for (p, r) in self.curve.places.iter().zip(&boundary.roofs) {
            if r.min_value()?.is_negative() {
                return Err(ToricError::NegativeBoundary(p.label.clone()));
            }
        }
        let mut members = Vec::new();
        for e in eps {
            let member = if e.is_zero() {
                self.clone()
            } else if e.is_positive() {
                let roofs = self
                    .roofs
                    .iter()
                    .zip(&boundary.roofs)
                    .map(|(a, b)| a.sup_convolution(&b.dilate(e)?))
                    .collect::<Result<Vec<_>, _>>()?;
                self.rebuild(self.polytope.minkowski_sum(&boundary.polytope.scale(e)?)?, roofs)?
            } else {
                let a = e.abs();
                let shrunk = self
                    .polytope
                    .erode(&boundary.polytope.scale(&a)?)
                    .map_err(|_| ToricError::EmptyErosion)?;
                if !shrunk.is_full_dimensional() {
                    return Err(ToricError::EmptyErosion);
                }
                let mut roofs = Vec::new();
                for ((p, r), b) in self.curve.places.iter().zip(&self.roofs).zip(&boundary.roofs) {
                    if !b.is_constant() {
                        return Err(ToricError::NonConstantBoundary(p.label.clone()));
                    }
                    let c = b.max_value()? * a.clone();
                    roofs.push(PiecewiseLinearConcave::new(shrunk.clone(), r.pieces().to_vec())?.shift(&-c));
                }
                self.rebuild(shrunk, roofs)?
            };
            members.push((e.clone(), member));
        }
        Ok(BoundaryFamily { members })
    }

    /// Boundary divisor used when none is given: the standard simplex with
    /// roof 1 at the first place that carries weight.
    pub fn default_boundary(&self) -> Result<Self, ToricError> {
        let factors = self.place_factors();
        let i = factors.iter().position(|f| *f > 0.0).ok_or(ToricError::NoShiftPlace)?;
        let simplex = Polytope::standard_simplex(self.dim());
        let roof = PiecewiseLinearConcave::constant(simplex.clone(), Rational::from_integer(1.into()));
        Self::new(self.curve.clone(), simplex, vec![(self.curve.places[i].label.clone(), roof)])
    }
}

impl BoundaryFamily {
    /// Volume gaps against `base` for every member, and transform gaps on the
    /// interior grid of `base` for members with `ε > 0`.
    pub fn convergence(&self, base: &MetrizedToricDivisor, options: &TransformOptions) -> Result<BoundaryConvergence, ToricError> {
        let v0 = base.exact_arithmetic_volume()?;
        let base_alg = base.algebra(options.truncation)?;
        let t0 = base_alg.concave_transform(options)?;
        let mut out = BoundaryConvergence { epsilons: Vec::new(), volume_gaps: Vec::new(), transform_gaps: Vec::new(), lipschitz: 0.0 };
        let mut largest = 0.0f64;
        for (e, member) in &self.members {
            let ef = e.approx();
            out.epsilons.push(ef);
            let gap = member.exact_arithmetic_volume()? - v0;
            out.volume_gaps.push(gap);
            if ef.abs() > largest {
                largest = ef.abs();
                out.lipschitz = gap.abs() / ef.abs();
            }
            let tg = if e.is_positive() {
                let g = member.algebra(options.truncation)?.evaluate_transform(options.truncation, &t0.points)?;
                g.iter().zip(&t0.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
            } else {
                f64::NAN
            };
            out.transform_gaps.push(tg);
        }
        Ok(out)
    }
}

impl AlgebraSource for MetrizedToricDivisor {
    fn dimension(&self) -> usize {
        self.dim()
    }

    fn algebra(&self, truncation: u32) -> Result<FilteredGradedAlgebra, ConcaveError> {
        Ok(MetrizedToricDivisor::algebra(self, truncation)?)
    }

    fn scaled(&self, alpha: u32) -> Result<Self, ConcaveError> {
        Ok(MetrizedToricDivisor::scaled(self, &Rational::from_integer(alpha.into()))?)
    }

    fn shifted(&self, c: &Rational) -> Result<Self, ConcaveError> {
        Ok(self.shift_total(c)?)
    }

    fn sum(&self, other: &Self) -> Result<Self, ConcaveError> {
        Ok(MetrizedToricDivisor::sum(self, other)?)
    }

    fn is_effective(&self) -> bool {
        MetrizedToricDivisor::is_effective(self)
    }

    fn exact_arithmetic_volume(&self) -> Result<Option<f64>, ConcaveError> {
        Ok(Some(MetrizedToricDivisor::exact_arithmetic_volume(self)?))
    }
}
