//! Diagonal adelic vector bundles: a basis orthogonal at every place.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::curve::{AdelicCurve, CurveMode, PlaceKind};
use super::AdelicError;
use crate::scalar::Scalar;
use crate::Rational;

/// Tolerance for float comparisons of degrees that are not exact multiples of a log.
pub const DEGREE_TOLERANCE: f64 = 1e-12;

/// A quantity in nats: `coeff · ln(unit)`, or plain `coeff` when `unit` is absent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Nats {
    pub coeff: Rational,
    pub unit: Option<u64>,
}

impl Nats {
    pub fn zero() -> Self {
        Nats { coeff: Rational::zero(), unit: None }
    }

    pub fn raw(coeff: Rational) -> Self {
        Nats { coeff, unit: None }
    }

    pub fn from_f64(x: f64) -> Self {
        Nats::raw(Rational::from_float(x).unwrap_or_else(Rational::zero))
    }

    pub fn log_units(coeff: Rational, base: u64) -> Self {
        Nats { coeff, unit: Some(base) }
    }

    pub fn value(&self) -> f64 {
        let c = self.coeff.approx();
        match self.unit {
            Some(b) => c * (b as f64).ln(),
            None => c,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn add(&self, other: &Nats) -> Nats {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.unit == other.unit {
            Nats { coeff: self.coeff.clone() + other.coeff.clone(), unit: self.unit }
        } else {
            Nats::from_f64(self.value() + other.value())
        }
    }

    pub fn scale(&self, s: &Rational) -> Nats {
        Nats { coeff: self.coeff.clone() * s.clone(), unit: self.unit }
    }

    /// Number of steps of size `ln base`, exact when the units agree.
    pub fn steps(&self, base: u64) -> Rational {
        if self.unit == Some(base) || self.is_zero() {
            self.coeff.clone()
        } else {
            Rational::from_float(self.value() / (base as f64).ln()).unwrap_or_else(Rational::zero)
        }
    }

    /// `ln(base) · floor(self / ln(base))`.
    pub fn floor_to_step(&self, base: u64) -> Nats {
        let k = if self.unit == Some(base) || self.is_zero() {
            self.coeff.floor()
        } else {
            let f = self.value() / (base as f64).ln();
            Rational::from_integer(BigInt::from((f + DEGREE_TOLERANCE).floor() as i64))
        };
        Nats::log_units(k, base)
    }

    pub fn is_multiple_of_step(&self, base: u64) -> bool {
        self.floor_to_step(base).value() >= self.value() - DEGREE_TOLERANCE * (1.0 + self.value().abs())
    }
}

impl fmt::Display for Nats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.unit {
            Some(b) => write!(f, "{}*ln{}", self.coeff, b),
            None => write!(f, "{}", self.coeff),
        }
    }
}

/// HN data of a bundle.
#[derive(Clone, Debug, PartialEq)]
pub struct SlopeProfile {
    pub jumping_numbers: Vec<f64>,
    pub degree: f64,
    pub positive_degree: f64,
    pub mu_max: f64,
    pub mu_min: f64,
}

/// `ĥ⁰` in nats, with the dimension count over the constant field in function-field mode.
#[derive(Clone, Debug, PartialEq)]
pub struct SmallSections {
    pub nats: f64,
    pub dimension: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TensorSlopeReport {
    pub mu_min_tensor: f64,
    pub mu_min_a: f64,
    pub mu_min_b: f64,
    pub defect: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalAdelicBundle {
    basis: Vec<String>,
    places: Vec<String>,
    degrees: Vec<Vec<Nats>>,
}

impl DiagonalAdelicBundle {
    /// `degrees[i][ω] = −log‖e_i‖_ω`, columns ordered as the curve's places.
    pub fn new(curve: &AdelicCurve, basis: Vec<String>, degrees: Vec<Vec<Nats>>) -> Result<Self, AdelicError> {
        if basis.len() != degrees.len() {
            return Err(AdelicError::Shape(format!("{} labels for {} rows", basis.len(), degrees.len())));
        }
        for (label, row) in basis.iter().zip(&degrees) {
            if row.len() != curve.places.len() {
                return Err(AdelicError::Shape(format!("row {label} has {} entries, curve has {} places", row.len(), curve.places.len())));
            }
            for (place, entry) in curve.places.iter().zip(row) {
                if place.kind == PlaceKind::Trivial && !entry.is_zero() {
                    return Err(AdelicError::TrivialPlaceDegree(place.label.clone()));
                }
            }
        }
        Ok(DiagonalAdelicBundle { basis, places: curve.places.iter().map(|p| p.label.clone()).collect(), degrees })
    }

    /// Rank-0 bundle on `curve`.
    pub fn zero(curve: &AdelicCurve) -> Self {
        DiagonalAdelicBundle { basis: Vec::new(), places: curve.places.iter().map(|p| p.label.clone()).collect(), degrees: Vec::new() }
    }

    /// Builds from raw float degrees.
    pub fn from_f64(curve: &AdelicCurve, degrees: &[Vec<f64>]) -> Result<Self, AdelicError> {
        let basis = (0..degrees.len()).map(|i| format!("e{}", i + 1)).collect();
        let rows = degrees.iter().map(|r| r.iter().map(|&x| Nats::from_f64(x)).collect()).collect();
        Self::new(curve, basis, rows)
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn degrees(&self) -> &[Vec<Nats>] {
        &self.degrees
    }

    pub fn entry(&self, i: usize, place: usize) -> &Nats {
        &self.degrees[i][place]
    }

    fn check_curve(&self, curve: &AdelicCurve) -> Result<(), AdelicError> {
        if self.places.len() == curve.places.len() && self.places.iter().zip(&curve.places).all(|(a, b)| *a == b.label) {
            Ok(())
        } else {
            Err(AdelicError::CurveMismatch)
        }
    }

    /// `Σ_ω ν(ω) deg[i][ω]`.
    pub fn total_degree(&self, curve: &AdelicCurve, i: usize) -> Result<f64, AdelicError> {
        self.check_curve(curve)?;
        Ok(curve
            .places
            .iter()
            .zip(&self.degrees[i])
            .map(|(p, e)| p.weight_f64() * e.value())
            .sum())
    }

    pub fn arakelov_degree(&self, curve: &AdelicCurve) -> Result<f64, AdelicError> {
        (0..self.rank()).map(|i| self.total_degree(curve, i)).sum()
    }

    /// Jumping numbers are the per-vector total degrees.
    pub fn hn_slopes(&self, curve: &AdelicCurve) -> Result<SlopeProfile, AdelicError> {
        let mut mu: Vec<f64> = (0..self.rank()).map(|i| self.total_degree(curve, i)).collect::<Result<_, _>>()?;
        mu.sort_by(|a, b| b.total_cmp(a));
        Ok(SlopeProfile {
            degree: mu.iter().sum(),
            positive_degree: mu.iter().map(|m| m.max(0.0)).sum(),
            mu_max: mu.first().copied().unwrap_or(f64::NEG_INFINITY),
            mu_min: mu.last().copied().unwrap_or(f64::INFINITY),
            jumping_numbers: mu,
        })
    }

    pub fn purify(&self, curve: &AdelicCurve) -> Result<Self, AdelicError> {
        self.check_curve(curve)?;
        let mut out = self.clone();
        for row in out.degrees.iter_mut() {
            for (place, entry) in curve.places.iter().zip(row.iter_mut()) {
                if place.kind != PlaceKind::NonArchimedean || entry.is_zero() {
                    continue;
                }
                let base = place.step_base.ok_or_else(|| AdelicError::NoValueGroup(place.label.clone()))?;
                *entry = entry.floor_to_step(base);
            }
        }
        Ok(out)
    }

    /// `Σ_ω ν(ω) max_i (deg − deg_pur)`.
    pub fn impurity(&self, curve: &AdelicCurve) -> Result<f64, AdelicError> {
        let pure = self.purify(curve)?;
        let mut total = 0.0;
        for (j, place) in curve.places.iter().enumerate() {
            let gap = (0..self.rank())
                .map(|i| self.degrees[i][j].value() - pure.degrees[i][j].value())
                .fold(0.0f64, f64::max);
            total += place.weight_f64() * gap;
        }
        Ok(total)
    }

    pub fn is_pure(&self, curve: &AdelicCurve) -> Result<bool, AdelicError> {
        Ok(self.purify(curve)? == *self || self.impurity(curve)? <= DEGREE_TOLERANCE)
    }

    /// Function-field mode: purified total degree of `e_i` in steps of `ln q`.
    fn steps_function_field(pure: &Self, curve: &AdelicCurve, i: usize) -> Result<(u64, Rational), AdelicError> {
        let q = curve.constant_field_size().ok_or(AdelicError::NoConstantField)?;
        let mut n = Rational::zero();
        for (place, entry) in curve.places.iter().zip(&pure.degrees[i]) {
            match place.kind {
                PlaceKind::Archimedean => return Err(AdelicError::ArchimedeanInFunctionField(place.label.clone())),
                PlaceKind::Trivial => {}
                PlaceKind::NonArchimedean => n += place.weight.clone() * entry.steps(q),
            }
        }
        Ok((q, n))
    }

    /// Number-field mode: `ln` of the lattice step times the archimedean radius for `e_i`.
    ///
    /// The small sections in direction `e_i` are `{a t : a ∈ Z, |a t| ≤ r}` with
    /// `t` fixed by the finite norms and `r` the smallest archimedean radius.
    fn box_exponent(pure: &Self, curve: &AdelicCurve, i: usize) -> Result<f64, AdelicError> {
        let mut arch: Option<f64> = None;
        let mut finite = 0.0;
        for (place, entry) in curve.places.iter().zip(&pure.degrees[i]) {
            match place.kind {
                PlaceKind::Archimedean => {
                    let v = entry.value();
                    arch = Some(arch.map_or(v, |a| a.min(v)));
                }
                PlaceKind::NonArchimedean => finite += entry.value(),
                PlaceKind::Trivial => {}
            }
        }
        arch.map(|a| a + finite).ok_or(AdelicError::UnboundedSmallSections)
    }

    pub fn small_sections_h0(&self, curve: &AdelicCurve) -> Result<SmallSections, AdelicError> {
        let pure = self.purify(curve)?;
        match curve.mode {
            CurveMode::FunctionField => {
                let mut dim = 0u64;
                let mut q = 2;
                for i in 0..self.rank() {
                    let (base, n) = Self::steps_function_field(&pure, curve, i)?;
                    q = base;
                    let k = n.floor().to_integer();
                    let count: BigInt = k + BigInt::one();
                    if count.is_positive() {
                        dim += u64::try_from(count).map_err(|_| AdelicError::UnboundedSmallSections)?;
                    }
                }
                Ok(SmallSections { nats: dim as f64 * (q as f64).ln(), dimension: Some(dim) })
            }
            CurveMode::NumberField => {
                let mut total = 0.0;
                for i in 0..self.rank() {
                    total += log_symmetric_count(Self::box_exponent(&pure, curve, i)?);
                }
                Ok(SmallSections { nats: total, dimension: None })
            }
        }
    }

    /// Function fields: purified degree. Number fields: log of the adelic
    /// unit-ball volume for box-shaped archimedean balls, `Σ_i (E_i + ln 2)`.
    pub fn euler_characteristic(&self, curve: &AdelicCurve) -> Result<f64, AdelicError> {
        let pure = self.purify(curve)?;
        match curve.mode {
            CurveMode::FunctionField => {
                let mut total = 0.0;
                for i in 0..self.rank() {
                    let (q, n) = Self::steps_function_field(&pure, curve, i)?;
                    total += n.approx() * (q as f64).ln();
                }
                Ok(total)
            }
            CurveMode::NumberField => {
                let mut total = 0.0;
                for i in 0..self.rank() {
                    total += Self::box_exponent(&pure, curve, i)? + std::f64::consts::LN_2;
                }
                Ok(total)
            }
        }
    }

    /// ψ-direct sum with ψ(t) = max(t, 1 − t): the sup of the two norms.
    pub fn psi_direct_sum(&self, other: &Self) -> Result<Self, AdelicError> {
        if self.places != other.places {
            return Err(AdelicError::CurveMismatch);
        }
        let mut basis = self.basis.clone();
        for label in &other.basis {
            let mut l = label.clone();
            while basis.contains(&l) {
                l.push('\'');
            }
            basis.push(l);
        }
        let mut degrees = self.degrees.clone();
        degrees.extend(other.degrees.iter().cloned());
        Ok(DiagonalAdelicBundle { basis, places: self.places.clone(), degrees })
    }

    /// Diagonal tensor product: `e_i ⊗ f_j` has entrywise summed degrees.
    pub fn tensor(&self, other: &Self) -> Result<Self, AdelicError> {
        if self.places != other.places {
            return Err(AdelicError::CurveMismatch);
        }
        let mut basis = Vec::new();
        let mut degrees = Vec::new();
        for (la, ra) in self.basis.iter().zip(&self.degrees) {
            for (lb, rb) in other.basis.iter().zip(&other.degrees) {
                basis.push(format!("{la}*{lb}"));
                degrees.push(ra.iter().zip(rb).map(|(x, y)| x.add(y)).collect());
            }
        }
        Ok(DiagonalAdelicBundle { basis, places: self.places.clone(), degrees })
    }

    pub fn tensor_slope_check(&self, other: &Self, curve: &AdelicCurve) -> Result<TensorSlopeReport, AdelicError> {
        let a = self.hn_slopes(curve)?;
        let b = other.hn_slopes(curve)?;
        let t = self.tensor(other)?.hn_slopes(curve)?;
        let defect = if self.rank() == 0 || other.rank() == 0 { 0.0 } else { t.mu_min - a.mu_min - b.mu_min };
        let bound = 0.0;
        Ok(TensorSlopeReport {
            mu_min_tensor: t.mu_min,
            mu_min_a: a.mu_min,
            mu_min_b: b.mu_min,
            defect,
            bound,
            holds: defect >= bound - 1e-9,
        })
    }

    /// CSV with header `basis,place,degree`, one row per entry.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("basis,place,degree\n");
        for (label, row) in self.basis.iter().zip(&self.degrees) {
            for (place, entry) in self.places.iter().zip(row) {
                out.push_str(&format!("{label},{place},{}\n", entry.value()));
            }
        }
        out
    }

    /// Reads the CSV written by [`Self::to_csv`]; absent entries are zero.
    pub fn from_csv(curve: &AdelicCurve, text: &str) -> Result<Self, AdelicError> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "basis,place,degree" => {}
            _ => return Err(AdelicError::Csv { line: 1, message: "expected header `basis,place,degree`".into() }),
        }
        let mut basis: Vec<String> = Vec::new();
        let mut degrees: Vec<Vec<Nats>> = Vec::new();
        for (no, line) in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| AdelicError::Csv { line: no + 1, message };
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(err(format!("expected 3 fields, found {}", fields.len())));
            }
            let col = curve.index_of(fields[1]).ok_or_else(|| err(format!("unknown place `{}`", fields[1])))?;
            let value: f64 = fields[2].parse().map_err(|_| err(format!("bad degree `{}`", fields[2])))?;
            let row = match basis.iter().position(|b| b == fields[0]) {
                Some(r) => r,
                None => {
                    basis.push(fields[0].to_string());
                    degrees.push(vec![Nats::zero(); curve.places.len()]);
                    basis.len() - 1
                }
            };
            degrees[row][col] = Nats::from_f64(value);
        }
        Self::new(curve, basis, degrees)
    }
}

/// `ln #{a ∈ Z : |a| ≤ e^x}`.
pub fn log_symmetric_count(x: f64) -> f64 {
    if x < 0.0 {
        0.0
    } else if x > 30.0 {
        x + std::f64::consts::LN_2
    } else {
        let k = (x.exp() + 1e-9).floor();
        (2.0 * k + 1.0).ln()
    }
}
