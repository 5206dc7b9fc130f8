//! Scaling, shifting, monotonicity, slope bounds, superadditivity and
//! Brunn–Minkowski checks for concave transforms.

use std::collections::BTreeSet;

use super::transform::interior_grid;
use super::{ConcaveError, FilteredGradedAlgebra, TransformOptions};
use crate::report::Check;
use crate::scalar::Scalar;
use crate::Rational;
use num_traits::Signed;

/// Tolerance for identities that hold exactly on truncated data.
const EXACT_SLACK: f64 = 1e-9;

/// Anything that can produce filtered graded algebras and the operations
/// the property checks need.
pub trait AlgebraSource: Sized {
    fn dimension(&self) -> usize;

    fn algebra(&self, truncation: u32) -> Result<FilteredGradedAlgebra, ConcaveError>;

    /// The source for `αD`.
    fn scaled(&self, alpha: u32) -> Result<Self, ConcaveError>;

    /// A source whose weights at level `m` grow by `m·c`.
    fn shifted(&self, c: &Rational) -> Result<Self, ConcaveError>;

    /// The source for `D + D'`.
    fn sum(&self, other: &Self) -> Result<Self, ConcaveError>;

    /// Whether `D ≤ D + self` for every `D`.
    fn is_effective(&self) -> bool;

    /// `(d+1)!∫max(G,0)` when it is known in closed form.
    fn exact_arithmetic_volume(&self) -> Result<Option<f64>, ConcaveError>;
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropertyConfig {
    pub alpha: u32,
    pub shift: Rational,
    pub options: TransformOptions,
}

fn max_violation(pairs: impl Iterator<Item = f64>) -> f64 {
    pairs.fold(f64::NEG_INFINITY, f64::max)
}

fn scale_points(points: &[Vec<Rational>], alpha: u32) -> Vec<Vec<Rational>> {
    let a = Rational::from_integer(alpha.into());
    points.iter().map(|p| p.iter().map(|x| x * &a).collect()).collect()
}

/// Runs every property check on `a` (and `b` for the two-divisor ones).
pub fn property_suite<S: AlgebraSource>(a: &S, b: &S, config: &PropertyConfig) -> Result<Vec<Check>, ConcaveError> {
    let opts = config.options;
    let m = opts.truncation;
    let alpha = config.alpha.max(1);
    let shift = config.shift.approx();
    let tol = 3.0 / f64::from(m);
    let mut checks = Vec::new();

    let alg_a = a.algebra(m)?;
    let t_a = alg_a.concave_transform(&opts)?;
    let grid = &t_a.points;

    // Scaling, through the exact sandwich α·G_{D,M}(λ) ≤ G_{αD,M}(αλ) ≤ α·G_{D,αM}(λ).
    let scaled = a.scaled(alpha)?.algebra(m)?;
    let mid = scaled.evaluate_transform(m, &scale_points(grid, alpha))?;
    let upper = a.algebra(alpha * m)?.evaluate_transform(alpha * m, grid)?;
    let af = f64::from(alpha);
    let sandwich = max_violation(
        t_a.values
            .iter()
            .zip(&mid)
            .zip(&upper)
            .map(|((lo, mi), up)| (af * lo - mi).max(mi - af * up)),
    );
    checks.push(Check::at_most("scaling_sandwich", sandwich, 0.0, EXACT_SLACK));
    let gap = max_violation(t_a.values.iter().zip(&mid).map(|(lo, mi)| (mi - af * lo).abs()));
    checks.push(Check::at_most("scaling_gap", gap, 0.0, af * tol));

    // Shifting is exact: every normalized value moves by c.
    let shifted_alg = a.shifted(&config.shift)?.algebra(m)?;
    let shifted = shifted_alg.evaluate_transform(m, grid)?;
    let shift_err = max_violation(t_a.values.iter().zip(&shifted).map(|(g, s)| (s - g - shift).abs()));
    checks.push(Check::at_most("shifting", shift_err, 0.0, EXACT_SLACK));

    // Monotonicity against D + |c| and, when b is effective, against D + b.
    let up_alg = a.shifted(&config.shift.abs())?.algebra(m)?;
    let up = up_alg.evaluate_transform(m, grid)?;
    let mono = max_violation(t_a.values.iter().zip(&up).map(|(g, u)| g - u));
    checks.push(Check::at_most("monotonicity_shift", mono, 0.0, EXACT_SLACK));
    let sum = a.sum(b)?;
    if b.is_effective() {
        let bigger = sum.algebra(m)?.evaluate_transform(m, grid)?;
        let mono = max_violation(t_a.values.iter().zip(&bigger).map(|(g, u)| g - u));
        checks.push(Check::at_most("monotonicity_effective", mono, 0.0, EXACT_SLACK));
    }

    // Slope bounds.
    let slopes = alg_a.asymptotic_slopes(m)?;
    let sup = alg_a.transform_sup(m).unwrap_or(t_a.sup);
    checks.push(Check::at_most("slope_upper", sup, slopes.mu_max.limit, tol));
    checks.push(Check::at_least("slope_lower", t_a.inf, slopes.mu_min.limit, tol));
    checks.push(Check::close("sup_equals_mu_max", sup, slopes.mu_max.limit, tol));

    // Superadditivity at the single level M, where it holds exactly.
    let top = BTreeSet::from([m]);
    let alg_b = b.algebra(m)?;
    let body_b = alg_b.restrict_levels(&top).okounkov_body(m)?;
    let body_a = alg_a.restrict_levels(&top).okounkov_body(m)?;
    let (grid_a, _, _) = interior_grid(&body_a, opts.grid.min(16));
    let (grid_b, _, _) = interior_grid(&body_b, opts.grid.min(16));
    if !grid_a.is_empty() && !grid_b.is_empty() {
        let ga = alg_a.evaluate_at_levels(&top, &grid_a)?;
        let gb = alg_b.evaluate_at_levels(&top, &grid_b)?;
        let mut sums = Vec::new();
        let mut pairs = Vec::new();
        for (i, p) in grid_a.iter().enumerate() {
            for k in 0..2 {
                let j = (i * 7 + k * 3) % grid_b.len();
                sums.push(p.iter().zip(&grid_b[j]).map(|(x, y)| x + y).collect::<Vec<_>>());
                pairs.push((i, j));
            }
        }
        let gab = sum.algebra(m)?.evaluate_at_levels(&top, &sums)?;
        let worst = max_violation(pairs.iter().zip(&gab).map(|(&(i, j), s)| ga[i] + gb[j] - s));
        checks.push(Check::at_most("superadditivity", worst, 0.0, EXACT_SLACK));
    }

    // Brunn–Minkowski for arithmetic volumes of big divisors.
    if let (Some(va), Some(vb), Some(vab)) = (a.exact_arithmetic_volume()?, b.exact_arithmetic_volume()?, sum.exact_arithmetic_volume()?) {
        if va > 0.0 && vb > 0.0 {
            let e = 1.0 / (a.dimension() as f64 + 1.0);
            checks.push(Check::at_least("brunn_minkowski", vab.powf(e), va.powf(e) + vb.powf(e), EXACT_SLACK));
        }
    }
    Ok(checks)
}
