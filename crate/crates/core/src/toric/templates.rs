//! Ready-made instances.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MetrizedToricDivisor, ToricError};
use crate::adelic::AdelicCurve;
use crate::roof::{AffinePiece, PiecewiseLinearConcave};
use crate::{Polytope, Rational};

/// Template names accepted by [`by_name`].
pub const NAMES: [&str; 6] = ["p1_linear", "p2_linear", "p3_linear", "random_pl", "p1_function_field", "p1_function_field_impure"];

fn int(x: i64) -> Rational {
    Rational::from_integer(BigInt::from(x))
}

fn linear_simplex(curve: AdelicCurve, label: &str, dim: usize, slope: Rational, top: Rational) -> MetrizedToricDivisor {
    let p = Polytope::standard_simplex(dim);
    let roof = PiecewiseLinearConcave::new(p.clone(), vec![AffinePiece { gradient: vec![slope; dim], offset: top }])
        .expect("one piece");
    MetrizedToricDivisor::new(curve, p, vec![(label.to_string(), roof)]).expect("valid template")
}

/// `[0,1]` over Q with roof `1 − λ` at the archimedean place.
pub fn p1_linear() -> MetrizedToricDivisor {
    linear_simplex(AdelicCurve::rationals(&[]), "inf", 1, int(-1), int(1))
}

/// Standard triangle with roof `1 − λ₁ − λ₂`.
pub fn p2_linear() -> MetrizedToricDivisor {
    linear_simplex(AdelicCurve::rationals(&[]), "inf", 2, int(-1), int(1))
}

/// Standard tetrahedron with roof `1 − λ₁ − λ₂ − λ₃`.
pub fn p3_linear() -> MetrizedToricDivisor {
    linear_simplex(AdelicCurve::rationals(&[]), "inf", 3, int(-1), int(1))
}

/// `[0,1]` over F_2(t) with roof `1 − λ` (in steps of `ln 2`) at infinity.
/// All degrees are whole steps, so every level is pure.
pub fn p1_function_field() -> MetrizedToricDivisor {
    linear_simplex(AdelicCurve::rational_function_field(2, &[vec![0, 1]]), "inf", 1, int(-1), int(1))
}

/// Same curve with roof `(1 − λ)/2 + 1/3`, whose degrees fall between steps.
pub fn p1_function_field_impure() -> MetrizedToricDivisor {
    linear_simplex(
        AdelicCurve::rational_function_field(2, &[vec![0, 1]]),
        "inf",
        1,
        Rational::new((-1).into(), 2.into()),
        Rational::new(5.into(), 6.into()),
    )
}

/// Random lattice polytope containing the origin and the points `a_i e_i`,
/// over Q with places 2, 3 and infinity. The archimedean roof is positive
/// enough at the origin that the divisor is big.
pub fn random_pl(seed: u64, dim: usize) -> MetrizedToricDivisor {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<Vec<Rational>> = vec![vec![int(0); dim]];
    for i in 0..dim {
        let mut e = vec![int(0); dim];
        e[i] = int(rng.gen_range(1..=3));
        pts.push(e);
    }
    for _ in 0..2 {
        pts.push((0..dim).map(|_| int(rng.gen_range(0..=2))).collect());
    }
    let p = Polytope::hull(&pts).expect("full-dimensional by construction");
    let mut piece = |lo: i64, hi: i64, half: bool| {
        let g = (0..dim)
            .map(|_| {
                let k = rng.gen_range(-2..=2);
                if half {
                    Rational::new(k.into(), 2.into())
                } else {
                    int(k / 2)
                }
            })
            .collect();
        AffinePiece { gradient: g, offset: int(rng.gen_range(lo..=hi)) }
    };
    let arch: Vec<_> = (0..3).map(|_| piece(2, 4, true)).collect();
    let two: Vec<_> = (0..2).map(|_| piece(-1, 1, false)).collect();
    let three = vec![piece(-1, 1, false)];
    let roofs = vec![("inf", arch), ("2", two), ("3", three)]
        .into_iter()
        .map(|(l, pieces)| (l.to_string(), PiecewiseLinearConcave::new(p.clone(), pieces).expect("pieces")))
        .collect();
    MetrizedToricDivisor::new(AdelicCurve::rationals(&[2, 3]), p, roofs).expect("valid template")
}

/// `p1_linear` perturbed by the boundary `[0,1]` with roof 1, for each `ε`.
pub fn boundary_family(eps: &[Rational]) -> Result<Vec<MetrizedToricDivisor>, ToricError> {
    let base = p1_linear();
    let boundary = base.default_boundary()?;
    Ok(base.boundary_family(&boundary, eps)?.members.into_iter().map(|(_, d)| d).collect())
}

/// Builds a single-instance template by name.
pub fn by_name(name: &str, seed: u64, dim: usize) -> Result<MetrizedToricDivisor, ToricError> {
    match name {
        "p1_linear" => Ok(p1_linear()),
        "p2_linear" => Ok(p2_linear()),
        "p3_linear" => Ok(p3_linear()),
        "random_pl" => Ok(random_pl(seed, dim.max(1))),
        "p1_function_field" => Ok(p1_function_field()),
        "p1_function_field_impure" => Ok(p1_function_field_impure()),
        other => Err(ToricError::UnknownTemplate(other.to_string())),
    }
}
