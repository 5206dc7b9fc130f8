//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use oklab_core::adelic::{AdelicCurve, DiagonalAdelicBundle, Nats, PlaceKind};
use oklab_core::toric::MetrizedToricDivisor;
use oklab_core::{Rational, Scalar};
use rand::Rng;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn instances_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances")
}

/// Every shipped single-divisor instance, by file stem.
pub fn shipped_instances() -> Vec<(String, MetrizedToricDivisor)> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(instances_dir())
        .expect("instances directory")
        .map(|e| e.expect("entry").path())
        .filter(|p| p.extension().map_or(false, |e| e == "txt"))
        .collect();
    files.sort();
    files
        .into_iter()
        .map(|p| {
            let text = std::fs::read_to_string(&p).expect("readable instance");
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            let d = MetrizedToricDivisor::from_text(&text).unwrap_or_else(|e| panic!("{name}: {e}"));
            (name, d)
        })
        .collect()
}

/// Facet test written out by hand: `p` satisfies every inequality of the polytope.
pub fn inside(d: &MetrizedToricDivisor, p: &[f64]) -> bool {
    d.polytope().inequalities().iter().all(|h| {
        let s: f64 = h.normal.iter().zip(p).map(|(a, x)| a.approx() * x).sum();
        s <= h.offset.approx() + 1e-12
    })
}

/// `Σ_ω ν(ω)(ln b_ω) min_k(⟨a_k,λ⟩ + b_k)`, from the raw pieces.
pub fn roof_value(d: &MetrizedToricDivisor, p: &[f64]) -> f64 {
    let mut total = 0.0;
    for (place, roof) in d.curve().places.iter().zip(d.roofs()) {
        let unit = match place.kind {
            PlaceKind::Archimedean => 1.0,
            PlaceKind::NonArchimedean => (place.step_base.unwrap() as f64).ln(),
            PlaceKind::Trivial => 0.0,
        };
        let v = roof
            .pieces()
            .iter()
            .map(|piece| piece.gradient.iter().zip(p).map(|(a, x)| a.approx() * x).sum::<f64>() + piece.offset.approx())
            .fold(f64::INFINITY, f64::min);
        total += place.weight.approx() * unit * v;
    }
    total
}

/// Midpoint rule over the bounding box with `n` cells per axis:
/// `(∫_P f, vol P)` where `f` is the roof or its positive part.
pub fn grid_integral(d: &MetrizedToricDivisor, n: usize, positive: bool) -> (f64, f64) {
    let dim = d.dim();
    let (lo, hi) = d.polytope().bounding_box();
    let lo: Vec<f64> = lo.iter().map(Scalar::approx).collect();
    let hi: Vec<f64> = hi.iter().map(Scalar::approx).collect();
    let h: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| (b - a) / n as f64).collect();
    let cell: f64 = h.iter().product();
    let mut idx = vec![0usize; dim];
    let (mut integral, mut volume) = (0.0, 0.0);
    loop {
        let p: Vec<f64> = (0..dim).map(|a| lo[a] + (idx[a] as f64 + 0.5) * h[a]).collect();
        if inside(d, &p) {
            let v = roof_value(d, &p);
            integral += if positive { v.max(0.0) } else { v } * cell;
            volume += cell;
        }
        let mut a = 0;
        loop {
            if a == dim {
                return (integral, volume);
            }
            idx[a] += 1;
            if idx[a] < n {
                break;
            }
            idx[a] = 0;
            a += 1;
        }
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Random diagonal bundle over Q with places 2, 3 and infinity. Finite
/// entries are half-steps so that some bundles are impure.
pub fn random_bundle(rng: &mut impl Rng, curve: &AdelicCurve, rank: usize) -> DiagonalAdelicBundle {
    let rows = (0..rank)
        .map(|_| {
            curve
                .places
                .iter()
                .map(|p| match p.kind {
                    PlaceKind::Archimedean => Nats::raw(q(rng.gen_range(-30..=30), 10)),
                    PlaceKind::NonArchimedean => Nats::log_units(q(rng.gen_range(-4..=4), 2), p.step_base.unwrap()),
                    PlaceKind::Trivial => Nats::zero(),
                })
                .collect()
        })
        .collect();
    let labels = (0..rank).map(|i| format!("e{i}")).collect();
    DiagonalAdelicBundle::new(curve, labels, rows).unwrap()
}

/// All `k`-subsets of `0..n`.
pub fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    if n < k {
        return Vec::new();
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

fn p_adic_valuation(x: &BigInt, p: u64) -> u32 {
    let p = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    while (&x % &p).is_zero() {
        x /= &p;
        v += 1;
    }
    v
}

fn determinant(mut a: Vec<Vec<Rational>>) -> Rational {
    let n = a.len();
    let mut det = Rational::from_integer(1.into());
    for c in 0..n {
        let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else { return Rational::zero() };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= a[c][c].clone();
        for r in c + 1..n {
            let f = a[r][c].clone() / a[c][c].clone();
            for k in c..n {
                let t = a[c][k].clone() * f.clone();
                a[r][k] -= t;
            }
        }
    }
    det
}

/// Arakelov degree of the row span of an integer matrix `a` (full row rank),
/// from its Plücker coordinates. Archimedean norms are orthogonal (ℓ²),
/// finite ones are diagonal max-norms; primes off the curve contribute
/// nothing because the Plücker vector is made primitive first.
pub fn subspace_degree(bundle: &DiagonalAdelicBundle, curve: &AdelicCurve, a: &[Vec<i64>]) -> Option<f64> {
    let k = a.len();
    let n = bundle.rank();
    let mut minors: Vec<(Vec<usize>, BigInt)> = Vec::new();
    for cols in subsets(n, k) {
        let m: Vec<Vec<Rational>> = a
            .iter()
            .map(|row| cols.iter().map(|&c| Rational::from_integer(BigInt::from(row[c]))).collect())
            .collect();
        let det = determinant(m).to_integer();
        if !det.is_zero() {
            minors.push((cols, det));
        }
    }
    if minors.is_empty() {
        return None;
    }
    let g = minors.iter().fold(BigInt::zero(), |acc, (_, d)| acc.gcd(d));
    let minors: Vec<(Vec<usize>, BigInt)> = minors.into_iter().map(|(c, d)| (c, d / &g)).collect();
    let mut degree = 0.0;
    for (j, place) in curve.places.iter().enumerate() {
        let deg_i = |cols: &[usize]| cols.iter().map(|&i| bundle.entry(i, j).value()).sum::<f64>();
        let local = match place.kind {
            PlaceKind::Archimedean => {
                // −½ log Σ p_I² e^{−2 deg_I}, evaluated stably.
                let terms: Vec<f64> = minors
                    .iter()
                    .map(|(c, d)| 2.0 * d.to_f64().unwrap().abs().ln() - 2.0 * deg_i(c))
                    .collect();
                let top = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                -0.5 * (top + terms.iter().map(|t| (t - top).exp()).sum::<f64>().ln())
            }
            PlaceKind::NonArchimedean => {
                let p = place.step_base.unwrap();
                let lp = (p as f64).ln();
                -minors
                    .iter()
                    .map(|(c, d)| -(p_adic_valuation(d, p) as f64) * lp - deg_i(c))
                    .fold(f64::NEG_INFINITY, f64::max)
            }
            PlaceKind::Trivial => 0.0,
        };
        degree += place.weight.approx() * local;
    }
    Some(degree)
}
