//! Acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use common::{factorial, grid_integral, q, random_bundle, shipped_instances, subspace_degree, subsets};
use oklab_core::adelic::AdelicCurve;
use oklab_core::concave::{kolmogorov_distance, property_suite, PropertyConfig, ReferenceDistribution, TransformOptions};
use oklab_core::graded::{body_convergence, GradedSemigroup};
use oklab_core::toric::{templates, MetrizedToricDivisor};
use oklab_core::{Polytope, Rational, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;

fn options(d: &MetrizedToricDivisor) -> TransformOptions {
    TransformOptions::defaults(d.dim())
}

/// Okounkov volume identity on P² with O(1): dimension growth against 2!·vol(Δ).
fn okounkov_volume() -> Outcome {
    let start = Instant::now();
    let m_max = 40u32;
    let mut levels = BTreeMap::new();
    for m in 1..=m_max {
        let mut set = BTreeSet::new();
        for i in 0..=i64::from(m) {
            for j in 0..=i64::from(m) - i {
                set.insert(vec![i, j]);
            }
        }
        levels.insert(m, set);
    }
    let growth = GradedSemigroup::from_levels(2, levels).volume_growth(m_max)?;
    let limit = growth.extrapolation.ok_or("no levels")?.limit;
    let secs = start.elapsed().as_secs_f64();
    let rel = (limit - 1.0).abs();
    Ok((rel <= 0.01 && secs < 10.0, format!("limit {limit:.5} vs 1, rel gap {rel:.2e}, {secs:.2}s")))
}

/// Volume side of the main theorem on p1_linear and p2_linear.
fn main_theorem_volume() -> Outcome {
    let p1 = templates::p1_linear();
    let o1 = TransformOptions::defaults(1);
    let alg = p1.algebra(o1.truncation)?;
    // deg₊ of level m is Σ_k (m − k) = m(m+1)/2.
    for m in 1..=o1.truncation {
        let plus: f64 = alg.level(m).ok_or("level")?.values().map(|w| w.max(0.0)).sum();
        let closed = f64::from(m * (m + 1)) / 2.0;
        if (plus - closed).abs() > 1e-9 {
            return Ok((false, format!("deg+ at level {m} is {plus}, expected {closed}")));
        }
    }
    let v1 = alg.arithmetic_volume(&o1)?;
    let (oracle1, _) = grid_integral(&p1, 100_000, true);
    let ok1 = (v1.degree_side.limit - 1.0).abs() <= 0.02
        && (v1.integral_side - 1.0).abs() <= 1e-12
        && (2.0 * oracle1 - 1.0).abs() <= 1e-6;
    let p2 = templates::p2_linear();
    let o2 = TransformOptions::defaults(2);
    let v2 = p2.algebra(o2.truncation)?.arithmetic_volume(&o2)?;
    let ok2 = (v2.degree_side.limit - 1.0).abs() <= 0.05 && (v2.integral_side - 1.0).abs() <= 0.05;
    Ok((
        ok1 && ok2,
        format!(
            "p1 deg+ {:.5}, integral {:.12}; p2 deg+ {:.5}, integral {:.5}",
            v1.degree_side.limit, v1.integral_side, v2.degree_side.limit, v2.integral_side
        ),
    ))
}

/// `vol̂_χ ≤ vol̂_χ^num` and near-equality on every shipped instance.
fn chi_volumes() -> Outcome {
    let mut ok = true;
    let mut worst = 0.0f64;
    let mut notes = Vec::new();
    for (name, d) in shipped_instances() {
        let o = options(&d);
        let alg = d.algebra(o.truncation)?;
        let v = alg.chi_volumes(&o)?;
        let fact = factorial(d.dim() + 1);
        let (oracle, _) = grid_integral(&d, [0, 20_000, 600, 80][d.dim()], false);
        let oracle = fact * oracle;
        // The oracle is a midpoint rule; it only has to confirm the exact side.
        let oracle_ok = (oracle - v.integral_side).abs() <= 0.01 * (1.0 + v.integral_side.abs());
        let below = v.degree_side.limit <= v.integral_side + v.degree_side.error + 1e-9;
        let rel = (v.degree_side.limit - v.integral_side).abs() / v.integral_side.abs().max(1e-12);
        worst = worst.max(rel);
        if !(oracle_ok && below && rel <= 0.05) {
            ok = false;
            notes.push(format!("{name}: chi {:.5} num {:.5} oracle {:.5}", v.degree_side.limit, v.integral_side, oracle));
        }
    }
    Ok((ok, format!("worst relative gap {worst:.3e} {}", notes.join("; "))))
}

/// Kolmogorov distance of `ν_m` to the law of `G` on p1_linear.
fn measure_convergence() -> Outcome {
    let d = templates::p1_linear();
    let alg = d.algebra(60)?;
    let reference = ReferenceDistribution::roof(d.roof_transform()?);
    let mut dist = Vec::new();
    for m in 40..=60 {
        let k = kolmogorov_distance(&alg.jumping_measure(m)?, &reference)?;
        // Uniform atoms on {0, 1/m, …, 1} against the uniform law: exactly 1/(m+1).
        if (k - 1.0 / f64::from(m + 1)).abs() > 1e-9 {
            return Ok((false, format!("distance {k} at m={m} differs from 1/(m+1)")));
        }
        dist.push(k);
    }
    let trend = dist.windows(2).all(|w| w[1] <= 1.1 * w[0]);
    let last = *dist.last().unwrap();
    Ok((last <= 0.05 && trend, format!("distance at m=60 {last:.5}, monotone over the last 20 levels: {trend}")))
}

/// Scaling, shifting, monotonicity, slopes, superadditivity and Brunn–Minkowski.
fn properties() -> Outcome {
    let mut failed = Vec::new();
    let mut count = 0;
    // Multi-place random roofs at a reduced truncation: the scaling check needs G at level 2M.
    for (a, b, m) in [
        (templates::p1_linear(), templates::p1_linear(), 60),
        (templates::p2_linear(), templates::p2_linear(), 40),
        (templates::random_pl(3, 2), templates::random_pl(4, 2), 16),
    ] {
        let config = PropertyConfig { alpha: 2, shift: q(3, 10), options: TransformOptions { grid: 16, truncation: m, depth: 8 } };
        for c in property_suite(&a, &b, &config)? {
            count += 1;
            if !c.pass {
                failed.push(format!("{} (gap {:.3e})", c.name, c.gap));
            }
        }
    }
    let mut bm_worst = f64::INFINITY;
    for seed in 0..50u64 {
        let a = templates::random_pl(2 * seed, 2);
        let b = templates::random_pl(2 * seed + 1, 2);
        let va = a.exact_arithmetic_volume()?;
        let vb = b.exact_arithmetic_volume()?;
        if va <= 0.0 || vb <= 0.0 {
            return Ok((false, format!("random pair {seed} is not big")));
        }
        let vab = a.sum(&b)?.exact_arithmetic_volume()?;
        let margin = vab.cbrt() - (va.cbrt() + vb.cbrt());
        bm_worst = bm_worst.min(margin);
        count += 1;
        if margin < -1e-9 {
            failed.push(format!("brunn_minkowski pair {seed}"));
        }
    }
    Ok((failed.is_empty(), format!("{count} checks, smallest Brunn-Minkowski margin {bm_worst:.3e} {}", failed.join(", "))))
}

/// Continuity of `vol̂` and pointwise convergence of `G` along `D ± εB`.
fn continuity() -> Outcome {
    let d = templates::p1_linear();
    let boundary = d.default_boundary()?;
    let eps: Vec<Rational> = [-2, -4, -8, 8, 4, 2, 1].iter().map(|&j: &i64| q(j.signum(), j.abs())).collect();
    let family = d.boundary_family(&boundary, &eps)?;
    let conv = family.convergence(&d, &TransformOptions { grid: 32, ..TransformOptions::defaults(1) })?;
    // Closed forms: (1 − a)² after erosion by a, 1 + 4ε + 2ε² after growth by ε.
    for (e, gap) in conv.epsilons.iter().zip(&conv.volume_gaps) {
        let closed = if *e < 0.0 { (1.0 + e).powi(2) } else { 1.0 + 4.0 * e + 2.0 * e * e };
        if (1.0 + gap - closed).abs() > 1e-9 {
            return Ok((false, format!("vol at eps {e} is {}, expected {closed}", 1.0 + gap)));
        }
    }
    let monotone = conv.volume_gaps.windows(2).all(|w| w[0] <= w[1]);
    let lipschitz_ok = conv.epsilons.iter().zip(&conv.volume_gaps).all(|(e, g)| g.abs() <= conv.lipschitz * e.abs() + 1e-12);
    // Transform gaps for ε = 1/8, 1/4, 1/2, 1; must shrink with ε up to the truncation error.
    let slack = 3.0 / 60.0;
    let g: Vec<f64> = conv.transform_gaps.iter().copied().filter(|x| !x.is_nan()).collect();
    let g_monotone = g.windows(2).all(|w| w[0] <= w[1] + slack);
    let g_small = g[0] <= 2.0 / 8.0 + slack;
    Ok((
        monotone && lipschitz_ok && g_monotone && g_small,
        format!("C = {:.3}, G gaps {:?}", conv.lipschitz, g.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>()),
    ))
}

/// Degree side against integral side of the Hilbert–Samuel identity.
fn hilbert_samuel() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, d) in shipped_instances() {
        let hs = d.hilbert_samuel_check(options(&d).truncation)?;
        notes.push(format!("{name} {:.2e}", hs.relative_gap));
        ok &= hs.relative_gap <= 0.05;
    }
    let p1 = templates::p1_linear().hilbert_samuel_check(100)?;
    ok &= p1.relative_gap <= 0.01;
    Ok((ok, format!("p1 at M=100 {:.2e}; {}", p1.relative_gap, notes.join(", "))))
}

/// Essential minimum never below `vol̂_χ^num/((d+1)·vol(D))`.
fn zhang() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, d) in shipped_instances() {
        let e = d.essential_minimum_estimate(10_000, 42)?;
        let (integral, volume) = grid_integral(&d, [0, 20_000, 600, 80][d.dim()], false);
        // Average of the roof from the oracle quadrature, for comparison only.
        let oracle_bound = integral / volume;
        let pass = e.estimate >= e.zhang_bound - 1e-6 && (oracle_bound - e.zhang_bound).abs() <= 0.02 * (1.0 + e.zhang_bound.abs());
        ok &= pass;
        notes.push(format!("{name} {:.4} >= {:.4}", e.estimate, e.zhang_bound));
    }
    Ok((ok, notes.join(", ")))
}

/// Harder–Narasimhan slopes against subspace oracles, purification, degree.
fn adelic_oracles() -> Outcome {
    let curve = AdelicCurve::rationals(&[2, 3]);
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for trial in 0..200 {
        let rank = rng.gen_range(1..=5);
        let e = random_bundle(&mut rng, &curve, rank);
        let hn = e.hn_slopes(&curve)?;
        let scale = 1.0 + hn.jumping_numbers.iter().map(|x| x.abs()).sum::<f64>();
        if (hn.degree - e.arakelov_degree(&curve)?).abs() > 1e-12 * scale {
            return Ok((false, format!("bundle {trial}: degree is not the sum of slopes")));
        }
        // Coordinate subspaces realize the polygon exactly.
        for k in 1..=rank {
            let top: f64 = hn.jumping_numbers[..k].iter().sum();
            let best = subsets(rank, k)
                .into_iter()
                .map(|s| s.iter().map(|&i| e.total_degree(&curve, i).unwrap()).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max);
            if (best - top).abs() > 1e-12 * scale {
                return Ok((false, format!("bundle {trial}: coordinate maximum {best} vs polygon {top} at rank {k}")));
            }
        }
        // Random subspaces stay under the polygon.
        for _ in 0..1000 {
            let k = rng.gen_range(1..=rank);
            let a: Vec<Vec<i64>> = (0..k).map(|_| (0..rank).map(|_| rng.gen_range(-3..=3)).collect()).collect();
            if let Some(deg) = subspace_degree(&e, &curve, &a) {
                let top: f64 = hn.jumping_numbers[..k].iter().sum();
                if deg > top + 1e-9 * scale {
                    return Ok((false, format!("bundle {trial}: random subspace degree {deg} above polygon {top}")));
                }
            }
        }
        let pure = e.purify(&curve)?;
        if pure.purify(&curve)? != pure {
            return Ok((false, format!("bundle {trial}: purification is not idempotent")));
        }
        if e.small_sections_h0(&curve)? != pure.small_sections_h0(&curve)? {
            return Ok((false, format!("bundle {trial}: h0 changes under purification")));
        }
    }
    Ok((true, "200 bundles, 1000 random subspaces each".into()))
}

/// `ĥ⁰`-based volume against `deg₊`-based volume.
fn classical_volumes() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for (name, d) in shipped_instances() {
        let c = d.classical_volume_check(options(&d).truncation)?;
        let bar = c.h0_volume.error + c.positive_volume.error + 1e-9;
        let below = c.h0_volume.limit <= c.positive_volume.limit + bar;
        let function_field = d.curve().mode == oklab_core::adelic::CurveMode::FunctionField;
        let rel = (c.h0_volume.limit - c.positive_volume.limit).abs() / c.positive_volume.limit.abs().max(1e-12);
        let equal = !(function_field && c.pure) || rel <= 0.05;
        ok &= below && equal;
        notes.push(format!("{name} {:.4}/{:.4}{}", c.h0_volume.limit, c.positive_volume.limit, if c.pure { " pure" } else { "" }));
    }
    Ok((ok, notes.join(", ")))
}

/// `d_H → 0 ⇔ d_S → 0`, and first interior indices for `(1 − 1/j)Δ`.
fn convex_lemmas() -> Outcome {
    let mut failed = Vec::new();
    let mut probes = 0;
    for dim in 2..=3 {
        let simplex = Polytope::standard_simplex(dim);
        let shrinking: Vec<Polytope> = (1..=12).map(|j| simplex.scale(&q(j + 1, j)).unwrap()).collect();
        let r = body_convergence(&shrinking, &simplex, 4)?;
        // Converging family: both metrics decrease to zero together.
        let both = r.hausdorff.windows(2).all(|w| w[1] < w[0]) && r.symmetric_difference.windows(2).all(|w| w[1] < w[0]);
        if !(both && *r.hausdorff.last().unwrap() < 0.1 && *r.symmetric_difference.last().unwrap() < 0.1) {
            failed.push(format!("d={dim} shrinking: dH {:?} dS {:?}", r.hausdorff.last(), r.symmetric_difference.last()));
        }
        // A finite nested family intersects to its last member.
        if !r.intersection_gap.map_or(false, |g| (g - r.hausdorff.last().unwrap()).abs() < 1e-12) {
            failed.push(format!("d={dim} truncated intersection gap {:?}", r.intersection_gap));
        }
        // Once the family reaches the target its intersection is the target.
        let mut reaching = shrinking.clone();
        reaching.push(simplex.clone());
        let r = body_convergence(&reaching, &simplex, 4)?;
        if !(r.target_in_all == Some(true) && r.intersection_gap.map_or(false, |g| g < 1e-9)) {
            failed.push(format!("d={dim} intersection gap {:?}", r.intersection_gap));
        }
        // Non-converging family: translates at fixed distance keep both metrics away from zero.
        let shift: Vec<Rational> = (0..dim).map(|i| if i == 0 { q(1, 2) } else { q(0, 1) }).collect();
        let moved: Vec<Polytope> = (1..=6).map(|j| simplex.scale(&q(j + 1, j)).unwrap().translate(&shift).unwrap()).collect();
        let r = body_convergence(&moved, &simplex, 4)?;
        if !(r.hausdorff.iter().all(|h| *h >= 0.49) && r.symmetric_difference.iter().all(|s| *s > 0.05)) {
            failed.push(format!("d={dim} translated: dH {:?} dS {:?}", r.hausdorff, r.symmetric_difference));
        }
        // Interior-point lemma: p ∈ ((1 − 1/j)Δ)° iff j > 1/(1 − Σp).
        // Family starts at j = 2, so position i holds j = i + 2.
        let growing: Vec<Polytope> = (2..=40).map(|j| simplex.scale(&q(j - 1, j)).unwrap()).collect();
        let r = body_convergence(&growing, &simplex, 6)?;
        if r.first_interior_index.is_empty() {
            failed.push(format!("d={dim} no interior probes"));
        }
        for (p, idx) in &r.first_interior_index {
            probes += 1;
            let s: Rational = p.iter().cloned().sum();
            let x = (Rational::from_integer(1.into()) / (Rational::from_integer(1.into()) - s)).floor().to_integer();
            let oracle: i64 = i64::try_from(x).unwrap() + 1;
            let expect = (oracle <= 40).then(|| (oracle - 2) as usize);
            if *idx != expect {
                failed.push(format!("point {:?}: index {idx:?}, oracle {expect:?}", p.iter().map(Scalar::approx).collect::<Vec<_>>()));
            }
        }
    }
    Ok((failed.is_empty(), format!("shrinking, translated and growing simplices in d = 2, 3; {probes} interior probes {}", failed.join("; "))))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("okounkov volume identity", okounkov_volume),
        ("main theorem, volume side", main_theorem_volume),
        ("chi-volume inequality and equality", chi_volumes),
        ("measure convergence", measure_convergence),
        ("concave transform properties", properties),
        ("continuity and G-convergence", continuity),
        ("hilbert-samuel desk check", hilbert_samuel),
        ("zhang-type inequality", zhang),
        ("adelic-core oracles", adelic_oracles),
        ("classical vs adelic volume", classical_volumes),
        ("convex-geometry lemmas", convex_lemmas),
    ];
    let total = Instant::now();
    let mut failures = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let (pass, detail) = match f() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {:>2} {}: {} [{:.2}s] {}",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            detail
        );
    }
    println!("acceptance: {} of {} criteria pass in {:.1}s", criteria.len() - failures, criteria.len(), total.elapsed().as_secs_f64());
    if failures > 0 {
        std::process::exit(1);
    }
}
