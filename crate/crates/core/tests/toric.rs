mod common;

use common::{factorial, grid_integral, inside, q, roof_value, shipped_instances};
use oklab_core::toric::{lattice_points, templates, MetrizedToricDivisor, ToricError, TropicalPoint};
use oklab_core::{Rational, Scalar};
use proptest::prelude::*;

/// Integer points of `mP` by scanning a box around it.
fn brute_lattice_points(d: &MetrizedToricDivisor, m: u32) -> Vec<Vec<i64>> {
    let r = 3 * m as i64 + 1;
    let dim = d.dim();
    let mut out = Vec::new();
    let mut x = vec![-r; dim];
    loop {
        let p: Vec<f64> = x.iter().map(|&c| c as f64 / f64::from(m)).collect();
        if inside(d, &p) {
            out.push(x.clone());
        }
        let mut a = dim;
        loop {
            if a == 0 {
                return out;
            }
            a -= 1;
            if x[a] < r {
                x[a] += 1;
                for k in a + 1..dim {
                    x[k] = -r;
                }
                break;
            }
        }
    }
}

#[test]
fn sections_are_the_lattice_points_with_roof_weights() {
    for (name, d) in shipped_instances() {
        let alg = d.algebra(6).unwrap();
        for m in 1..=6u32 {
            let want = brute_lattice_points(&d, m);
            assert_eq!(lattice_points(d.polytope(), m), want, "{name} m={m}");
            let level = alg.level(m).unwrap();
            assert_eq!(level.len(), want.len(), "{name} m={m}");
            for g in &want {
                let p: Vec<f64> = g.iter().map(|&c| c as f64 / f64::from(m)).collect();
                let w = level[g];
                assert!((w - f64::from(m) * roof_value(&d, &p)).abs() < 1e-9, "{name} m={m} γ={g:?}");
            }
        }
    }
}

#[test]
fn exact_volumes_match_quadrature() {
    for (name, d) in shipped_instances() {
        let n = match d.dim() {
            1 => 2000,
            2 => 200,
            _ => 24,
        };
        let fact = factorial(d.dim() + 1);
        // Boundary cells give a first-order bias; one Richardson step removes it.
        let richardson = |positive: bool| {
            let (coarse, vc) = grid_integral(&d, n, positive);
            let (fine, vf) = grid_integral(&d, 2 * n, positive);
            (fact * (2.0 * fine - coarse), 2.0 * vf - vc)
        };
        let (pos, vol) = richardson(true);
        let (all, _) = richardson(false);
        let exact = d.exact_arithmetic_volume().unwrap();
        assert!((exact - pos).abs() < 1e-2 * (1.0 + exact.abs()), "{name}: {exact} vs {pos}");
        let exact = d.exact_chi_volume().unwrap();
        assert!((exact - all).abs() < 1e-2 * (1.0 + exact.abs()), "{name}: {exact} vs {all}");
        let want = factorial(d.dim()) * vol;
        assert!((d.geometric_volume() - want).abs() < 1e-2 * want, "{name}");
    }
}

#[test]
fn scaling_is_homogeneous() {
    for (name, d) in shipped_instances() {
        let k = d.dim() as i32 + 1;
        for (n, den) in [(2, 1), (3, 2)] {
            let a = n as f64 / den as f64;
            let s = d.scaled(&q(n, den)).unwrap();
            let want = a.powi(k) * d.exact_arithmetic_volume().unwrap();
            assert!((s.exact_arithmetic_volume().unwrap() - want).abs() < 1e-9 * (1.0 + want), "{name}");
            assert!((s.geometric_volume() - a.powi(k - 1) * d.geometric_volume()).abs() < 1e-9, "{name}");
        }
    }
}

#[test]
fn arithmetic_volume_is_superadditive_on_sums() {
    // Brunn–Minkowski for vol̂^{1/(d+1)} implies plain superadditivity.
    let a = templates::p1_linear();
    let b = templates::p1_linear().shift_total(&q(1, 2)).unwrap();
    let s = a.sum(&b).unwrap();
    assert_eq!(s.polytope().volume(), q(2, 1));
    assert!(s.exact_arithmetic_volume().unwrap() >= a.exact_arithmetic_volume().unwrap() + b.exact_arithmetic_volume().unwrap() - 1e-9);
}

#[test]
fn text_round_trip_keeps_exact_data() {
    for (name, d) in shipped_instances() {
        let back = MetrizedToricDivisor::from_text(&d.to_text()).unwrap();
        assert_eq!(back.to_text(), d.to_text(), "{name}");
        assert_eq!(back.exact_chi_volume().unwrap(), d.exact_chi_volume().unwrap(), "{name}");
    }
}

#[test]
fn parse_errors_carry_line_numbers() {
    let text = templates::p2_linear().to_text();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let n = lines.len();
    lines[n - 1] = "this is not an instance line".into();
    match MetrizedToricDivisor::from_text(&lines.join("\n")) {
        Err(ToricError::Parse { line, .. }) => assert_eq!(line, n),
        other => panic!("expected a parse error, got {other:?}"),
    }
}

#[test]
fn height_at_the_origin_is_the_weighted_roof_maximum() {
    for (name, d) in shipped_instances() {
        let origin = TropicalPoint::origin(d.curve().places.len(), d.dim());
        let want: f64 = d
            .place_factors()
            .iter()
            .zip(d.roofs())
            .map(|(f, r)| f * r.max_value().unwrap().approx())
            .sum();
        assert!((d.height(&origin) - want).abs() < 1e-9, "{name}");
    }
}

fn finite_instances() -> Vec<MetrizedToricDivisor> {
    vec![templates::p1_linear(), templates::p2_linear(), templates::random_pl(5, 2), templates::p1_function_field_impure()]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn green_function_is_the_legendre_transform(which in 0usize..4, u in prop::collection::vec(-4i64..=4, 2)) {
        let d = &finite_instances()[which];
        let dim = d.dim();
        let u: Vec<Rational> = u[..dim].iter().map(|&x| q(x, 2)).collect();
        let uf: Vec<f64> = u.iter().map(Scalar::approx).collect();
        for (i, roof) in d.roofs().iter().enumerate() {
            // Max of ϑ(λ) − ⟨λ,u⟩ over a rational grid of P: a lower bound that is sharp at the vertices.
            let n = 24i64;
            let (lo, hi) = d.polytope().bounding_box();
            let mut best = f64::NEG_INFINITY;
            let mut idx = vec![0i64; dim];
            loop {
                let lam: Vec<Rational> = (0..dim).map(|a| lo[a].clone() + (hi[a].clone() - lo[a].clone()) * q(idx[a], n)).collect();
                if d.polytope().contains(&lam, false).unwrap() {
                    let v = roof.eval(&lam).approx() - lam.iter().zip(&uf).map(|(l, x)| l.approx() * x).sum::<f64>();
                    best = best.max(v);
                }
                let mut a = 0;
                while a < dim && idx[a] == n {
                    idx[a] = 0;
                    a += 1;
                }
                if a == dim {
                    break;
                }
                idx[a] += 1;
            }
            let g = d.green_function_exact(i, &u).approx();
            prop_assert!(best <= g + 1e-9);
            prop_assert!((d.green_function(i, &uf) - g).abs() < 1e-9);
            // Vertices of P and of the roof's breakpoints all lie on this grid for these instances.
            prop_assert!(g - best < 1e-9, "place {i}: grid {best} vs {g}");
        }
    }
}

