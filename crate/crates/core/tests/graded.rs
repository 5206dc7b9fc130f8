mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::q;
use oklab_core::graded::{body_convergence, interior_grid, lex_valuation, FlagSpec, GradedSemigroup, Monotonicity};
use oklab_core::Polytope;
use proptest::prelude::*;

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_semigroups_are_superadditive(gens in prop::collection::vec((1u32..=3, prop::collection::vec(-3i64..=3, 2)), 1..5)) {
        let s = GradedSemigroup::generate(2, &gens, 8).unwrap();
        prop_assert!(s.superadditivity_violation(8).is_none());
    }

    #[test]
    fn lex_valuation_is_the_minimum_in_flag_order(support in prop::collection::vec(prop::collection::vec(0i64..5, 3), 1..12), order in Just(vec![0usize, 1, 2]).prop_shuffle()) {
        let flag = FlagSpec::new(order.clone()).unwrap();
        let got = flag.lex_valuation(&support).unwrap();
        let mut keys: Vec<Vec<i64>> = support.iter().map(|e| order.iter().map(|&i| e[i]).collect()).collect();
        keys.sort();
        prop_assert_eq!(&got, &keys[0]);
        if order == vec![0, 1, 2] {
            prop_assert_eq!(lex_valuation(&support).unwrap(), got);
        }
    }

    #[test]
    fn text_round_trip(gens in prop::collection::vec((1u32..=2, prop::collection::vec(-2i64..=2, 2)), 1..4)) {
        let s = GradedSemigroup::generate(2, &gens, 5).unwrap();
        let back = GradedSemigroup::from_text(2, &s.to_text()).unwrap();
        prop_assert_eq!(back.levels(), s.levels());
    }
}

#[test]
fn simplex_semigroup_counts_are_binomial() {
    for d in 1..=3usize {
        let mut gens = vec![(1, vec![0; d])];
        for i in 0..d {
            let mut e = vec![0; d];
            e[i] = 1;
            gens.push((1, e));
        }
        let s = GradedSemigroup::generate(d, &gens, 12).unwrap();
        for m in 0..=12u32 {
            assert_eq!(s.level(m).unwrap().len() as u64, binomial(m as u64 + d as u64, d as u64), "d={d} m={m}");
        }
        let g = s.volume_growth(12).unwrap();
        assert_eq!(g.kodaira_dimension, d);
        assert!((g.body_reference.unwrap() - 1.0).abs() < 1e-12);
        assert!((g.extrapolation.unwrap().limit - 1.0).abs() < 1e-2);
    }
}

#[test]
fn sparse_generators_still_fill_the_interval() {
    // {0, 1, 3}: level m is 0..=3m without 3m − 1.
    let s = GradedSemigroup::generate(1, &[(1, vec![0]), (1, vec![1]), (1, vec![3])], 40).unwrap();
    for m in 1..=40u32 {
        assert_eq!(s.level(m).unwrap().len(), 3 * m as usize);
    }
    let g = s.volume_growth(40).unwrap();
    assert!((g.body_reference.unwrap() - 3.0).abs() < 1e-12);
    assert!((g.extrapolation.unwrap().limit - 3.0).abs() < 1e-2);
}

#[test]
fn lower_dimensional_semigroups_report_their_kodaira_dimension() {
    let s = GradedSemigroup::generate(2, &[(1, vec![0, 0]), (1, vec![1, 1])], 10).unwrap();
    let g = s.volume_growth(10).unwrap();
    assert_eq!(g.kodaira_dimension, 1);
    assert!(g.body_reference.is_none());
    assert!((g.extrapolation.unwrap().limit - 1.0).abs() < 1e-2);
}

#[test]
fn missing_sums_are_reported() {
    let mut levels = BTreeMap::new();
    levels.insert(1, BTreeSet::from([vec![0], vec![1]]));
    levels.insert(2, BTreeSet::from([vec![0], vec![2]]));
    let s = GradedSemigroup::from_levels(1, levels);
    assert!(s.superadditivity_violation(2).is_some());
}

#[test]
fn monotonicity_is_classified() {
    let simplex = Polytope::standard_simplex(2);
    let grow: Vec<Polytope> = (1..=4).map(|j| simplex.scale(&q(j, j + 1)).unwrap()).collect();
    assert_eq!(body_convergence(&grow, &simplex, 4).unwrap().monotonicity, Monotonicity::Increasing);
    let same = vec![simplex.clone(); 3];
    let r = body_convergence(&same, &simplex, 4).unwrap();
    assert_eq!(r.monotonicity, Monotonicity::Constant);
    assert_eq!(r.intersection_gap, Some(0.0));
    let moving: Vec<Polytope> = (1..=3).map(|j| simplex.translate(&[q(j, 5), q(0, 1)]).unwrap()).collect();
    let r = body_convergence(&moving, &simplex, 4).unwrap();
    assert_eq!(r.monotonicity, Monotonicity::Neither);
    assert!(r.intersection_gap.is_none() && r.first_interior_index.is_empty());
}

#[test]
fn interior_grid_points_are_interior() {
    let body = Polytope::hull(&[vec![q(0, 1), q(0, 1)], vec![q(3, 1), q(1, 1)], vec![q(1, 1), q(2, 1)]]).unwrap();
    let pts = interior_grid(&body, 10);
    assert!(!pts.is_empty());
    assert!(pts.iter().all(|p| body.contains(p, true).unwrap()));
}
