//! Toy adelic curves: Q with finitely many active places, and F_p(t).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use super::AdelicError;
use crate::Rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PlaceKind {
    Archimedean,
    NonArchimedean,
    Trivial,
}

impl PlaceKind {
    pub fn name(self) -> &'static str {
        match self {
            PlaceKind::Archimedean => "archimedean",
            PlaceKind::NonArchimedean => "nonarchimedean",
            PlaceKind::Trivial => "trivial",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "archimedean" | "arch" => Some(PlaceKind::Archimedean),
            "nonarchimedean" | "nonarch" => Some(PlaceKind::NonArchimedean),
            "trivial" => Some(PlaceKind::Trivial),
            _ => None,
        }
    }
}

/// Which absolute value of the base field a place carries.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Locus {
    /// `|a|_p = p^{-v_p(a)}` on Q.
    Prime(u64),
    /// Monic irreducible polynomial over F_p, coefficients from low to high degree.
    Polynomial(Vec<u64>),
    /// The usual absolute value on Q, or `q^{deg}` on F_q(t).
    Infinity,
    /// No field element acts on it (trivial places, abstract places).
    Abstract,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Place {
    pub label: String,
    pub kind: PlaceKind,
    pub weight: Rational,
    /// `b` such that the value group step is `ln b`, for discrete places.
    pub step_base: Option<u64>,
    pub locus: Locus,
}

impl Place {
    pub fn step(&self) -> Option<f64> {
        self.step_base.map(|b| (b as f64).ln())
    }

    pub fn weight_f64(&self) -> f64 {
        crate::scalar::Scalar::approx(&self.weight)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CurveMode {
    NumberField,
    FunctionField,
}

impl CurveMode {
    pub fn name(self) -> &'static str {
        match self {
            CurveMode::NumberField => "number_field",
            CurveMode::FunctionField => "function_field",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "number_field" | "number_field_like" => Some(CurveMode::NumberField),
            "function_field" | "function_field_like" => Some(CurveMode::FunctionField),
            _ => None,
        }
    }
}

/// Finite weighted family of places. Places not listed carry the standard
/// norm and never contribute to degrees of the bundles considered here.
#[derive(Clone, Debug, PartialEq)]
pub struct AdelicCurve {
    pub places: Vec<Place>,
    pub mode: CurveMode,
}

/// Nonzero element of Q or of F_p(t).
#[derive(Clone, Debug, PartialEq)]
pub enum FieldElement {
    Rational(Rational),
    /// Numerator and denominator over F_p, low-to-high coefficients.
    RationalFunction { p: u64, num: Vec<u64>, den: Vec<u64> },
}

impl AdelicCurve {
    pub fn new(places: Vec<Place>, mode: CurveMode) -> Result<Self, AdelicError> {
        for (i, p) in places.iter().enumerate() {
            if p.weight.is_negative() {
                return Err(AdelicError::InvalidPlace(format!("{}: negative weight", p.label)));
            }
            if p.step_base.map_or(false, |b| b < 2) {
                return Err(AdelicError::InvalidPlace(format!("{}: step base must be at least 2", p.label)));
            }
            if p.kind == PlaceKind::Trivial && p.step_base.is_some() {
                return Err(AdelicError::InvalidPlace(format!("{}: trivial places have no value group", p.label)));
            }
            if places[..i].iter().any(|q| q.label == p.label) {
                return Err(AdelicError::InvalidPlace(format!("duplicate label {}", p.label)));
            }
        }
        Ok(AdelicCurve { places, mode })
    }

    /// Q with the given primes and the archimedean place, all of weight 1.
    pub fn rationals(primes: &[u64]) -> Self {
        let mut places: Vec<Place> = primes
            .iter()
            .map(|&p| Place {
                label: p.to_string(),
                kind: PlaceKind::NonArchimedean,
                weight: Rational::from_integer(1.into()),
                step_base: Some(p),
                locus: Locus::Prime(p),
            })
            .collect();
        places.push(Place {
            label: "inf".into(),
            kind: PlaceKind::Archimedean,
            weight: Rational::from_integer(1.into()),
            step_base: None,
            locus: Locus::Infinity,
        });
        AdelicCurve { places, mode: CurveMode::NumberField }
    }

    /// F_p(t) with the given monic irreducible polynomials (weight = degree)
    /// and the place at infinity (weight 1).
    pub fn rational_function_field(p: u64, polys: &[Vec<u64>]) -> Self {
        let mut places: Vec<Place> = polys
            .iter()
            .map(|f| {
                let f = poly::trim(f.iter().map(|c| c % p).collect());
                Place {
                    label: poly::label(&f),
                    kind: PlaceKind::NonArchimedean,
                    weight: Rational::from_integer(BigInt::from(f.len().saturating_sub(1))),
                    step_base: Some(p),
                    locus: Locus::Polynomial(f),
                }
            })
            .collect();
        places.push(Place {
            label: "inf".into(),
            kind: PlaceKind::NonArchimedean,
            weight: Rational::from_integer(1.into()),
            step_base: Some(p),
            locus: Locus::Infinity,
        });
        AdelicCurve { places, mode: CurveMode::FunctionField }
    }

    pub fn place(&self, label: &str) -> Option<&Place> {
        self.places.iter().find(|p| p.label == label)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.places.iter().position(|p| p.label == label)
    }

    pub fn has_archimedean_place(&self) -> bool {
        self.places.iter().any(|p| p.kind == PlaceKind::Archimedean)
    }

    /// Common step base of the function-field places, if there is one.
    pub fn constant_field_size(&self) -> Option<u64> {
        let mut bases = self
            .places
            .iter()
            .filter(|p| p.kind == PlaceKind::NonArchimedean)
            .map(|p| p.step_base);
        let first = bases.next()??;
        bases.all(|b| b == Some(first)).then_some(first)
    }

    /// `Σ_ω ν(ω) log|a|_ω` in nats.
    pub fn product_formula_residual(&self, a: &FieldElement) -> Result<f64, AdelicError> {
        match a {
            FieldElement::Rational(q) => {
                if q.is_zero() {
                    return Err(AdelicError::ZeroElement);
                }
                let mut total = 0.0;
                for place in &self.places {
                    let w = place.weight_f64();
                    let log_abs = match &place.locus {
                        Locus::Prime(p) => {
                            let v = valuation(q.numer(), *p) - valuation(q.denom(), *p);
                            -(v as f64) * (*p as f64).ln()
                        }
                        Locus::Infinity => log_abs_rational(q),
                        _ => 0.0,
                    };
                    total += w * log_abs;
                }
                Ok(total)
            }
            FieldElement::RationalFunction { p, num, den } => {
                let num = poly::trim(num.iter().map(|c| c % p).collect());
                let den = poly::trim(den.iter().map(|c| c % p).collect());
                if num.is_empty() {
                    return Err(AdelicError::ZeroElement);
                }
                if den.is_empty() {
                    return Err(AdelicError::ZeroDenominator);
                }
                // Accumulated exactly in units of ln p.
                let mut units = Rational::zero();
                for place in &self.places {
                    let v: i64 = match &place.locus {
                        Locus::Polynomial(f) => poly::valuation(&num, f, *p) - poly::valuation(&den, f, *p),
                        Locus::Infinity => (den.len() as i64) - (num.len() as i64),
                        _ => 0,
                    };
                    units += place.weight.clone() * Rational::from_integer(BigInt::from(-v));
                }
                Ok(crate::scalar::Scalar::approx(&units) * (*p as f64).ln())
            }
        }
    }
}

fn valuation(n: &BigInt, p: u64) -> i64 {
    if n.is_zero() {
        return 0;
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

fn log_abs_rational(q: &Rational) -> f64 {
    let ln_big = |n: &BigInt| {
        let bits = n.bits();
        if bits < 1000 {
            n.to_f64().unwrap_or(f64::INFINITY).abs().ln()
        } else {
            let shift = bits - 64;
            (n.abs() >> shift).to_f64().unwrap_or(1.0).ln() + shift as f64 * std::f64::consts::LN_2
        }
    };
    ln_big(q.numer()) - ln_big(q.denom())
}

/// Dense polynomials over F_p.
pub mod poly {
    pub fn trim(mut f: Vec<u64>) -> Vec<u64> {
        while f.last() == Some(&0) {
            f.pop();
        }
        f
    }

    fn inverse(a: u64, p: u64) -> u64 {
        let mut result = 1u64;
        let mut base = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base % p;
            }
            base = base * base % p;
            e >>= 1;
        }
        result
    }

    /// Quotient and remainder of `a / b` over F_p (`b` nonzero, `p` prime).
    pub fn divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
        let mut r: Vec<u64> = a.to_vec();
        let db = b.len() - 1;
        let lead_inv = inverse(b[db], p);
        let mut q = vec![0u64; a.len().saturating_sub(db).max(1)];
        while r.len() > db && !r.is_empty() {
            let shift = r.len() - 1 - db;
            let c = r[r.len() - 1] * lead_inv % p;
            q[shift] = c;
            for (i, &bi) in b.iter().enumerate() {
                let idx = shift + i;
                r[idx] = (r[idx] + p - c * bi % p) % p;
            }
            r = trim(r);
        }
        (trim(q), r)
    }

    /// Multiplicity of the irreducible `f` in nonzero `a`.
    pub fn valuation(a: &[u64], f: &[u64], p: u64) -> i64 {
        let mut a = a.to_vec();
        let mut v = 0;
        loop {
            let (q, r) = divrem(&a, f, p);
            if !r.is_empty() || q.is_empty() {
                return v;
            }
            a = q;
            v += 1;
        }
    }

    pub fn mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = (out[i + j] + x * y) % p;
            }
        }
        trim(out)
    }

    /// Human-readable label such as `t^2+t+1`.
    pub fn label(f: &[u64]) -> String {
        let mut terms = Vec::new();
        for (i, &c) in f.iter().enumerate().rev() {
            if c == 0 {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            terms.push(match (c, mono.is_empty()) {
                (_, true) => c.to_string(),
                (1, false) => mono,
                (_, false) => format!("{c}{mono}"),
            });
        }
        if terms.is_empty() {
            "0".into()
        } else {
            terms.join("+")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_formula_over_rationals() {
        let c = AdelicCurve::rationals(&[2, 3]);
        let six = FieldElement::Rational(Rational::from_integer(6.into()));
        assert!(c.product_formula_residual(&six).unwrap().abs() < 1e-12);
        let one = FieldElement::Rational(Rational::from_integer(1.into()));
        assert_eq!(c.product_formula_residual(&one).unwrap(), 0.0);
        let zero = FieldElement::Rational(Rational::zero());
        assert_eq!(c.product_formula_residual(&zero), Err(AdelicError::ZeroElement));
    }

    #[test]
    fn product_formula_over_f2t() {
        let c = AdelicCurve::rational_function_field(2, &[vec![0, 1], vec![1, 1]]);
        let a = FieldElement::RationalFunction { p: 2, num: vec![0, 0, 1], den: vec![1, 1] };
        assert_eq!(c.product_formula_residual(&a).unwrap(), 0.0);
    }

    #[test]
    fn polynomial_division() {
        let (q, r) = poly::divrem(&[1, 0, 1], &[1, 1], 2);
        assert_eq!(q, vec![1, 1]);
        assert!(r.is_empty());
        assert_eq!(poly::valuation(&[1, 0, 1], &[1, 1], 2), 2);
        assert_eq!(poly::label(&[1, 1, 1]), "t^2+t+1");
    }
}
