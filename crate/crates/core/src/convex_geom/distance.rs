//! Point-to-polytope distance via Wolfe's minimum-norm-point algorithm.

use super::linalg::solve;
use super::ConvexBody;
use crate::scalar::{add, dot, scale_vec, sub, Scalar};

const MAX_ITERATIONS: usize = 10_000;

/// Minimum-norm point of `conv(points)`; exact for exact scalars.
pub fn min_norm_point<T: Scalar>(points: &[Vec<T>]) -> Vec<T> {
    let norm2 = |p: &[T]| dot(p, p);
    let start = (0..points.len())
        .min_by(|&a, &b| norm2(&points[a]).partial_cmp(&norm2(&points[b])).unwrap_or(std::cmp::Ordering::Equal))
        .expect("nonempty point set");
    let mut corral = vec![start];
    let mut weights = vec![T::one()];
    let mut x = points[start].clone();
    let tol = |scale: &T| if T::EXACT { T::zero() } else { T::from_f64_lossy(1e-14 * (1.0 + scale.approx())) };

    for _ in 0..MAX_ITERATIONS {
        let xx = norm2(&x);
        let (j, xp) = (0..points.len())
            .map(|i| (i, dot(&x, &points[i])))
            .reduce(|a, b| if b.1 < a.1 { b } else { a })
            .expect("nonempty point set");
        if xx.clone() - xp <= tol(&xx) || corral.contains(&j) {
            return x;
        }
        corral.push(j);
        weights.push(T::zero());
        loop {
            let Some(alpha) = affine_minimizer(points, &corral) else {
                return x;
            };
            if alpha.iter().all(|a| a.is_positive_strict()) {
                weights = alpha;
                x = combine(points, &corral, &weights);
                break;
            }
            let mut theta: Option<T> = None;
            for (l, a) in weights.iter().zip(&alpha) {
                if !a.is_positive_strict() {
                    let den = l.clone() - a.clone();
                    if den.is_positive_strict() {
                        let t = l.clone() / den;
                        if theta.as_ref().map_or(true, |th| t < *th) {
                            theta = Some(t);
                        }
                    }
                }
            }
            let theta = theta.unwrap_or_else(T::zero);
            let one_minus = T::one() - theta.clone();
            weights = weights
                .iter()
                .zip(&alpha)
                .map(|(l, a)| theta.clone() * a.clone() + one_minus.clone() * l.clone())
                .collect();
            let keep: Vec<bool> = weights.iter().map(|w| w.is_positive_strict()).collect();
            if keep.iter().all(|&k| k) {
                // Degenerate float step: drop the smallest weight to guarantee progress.
                let (drop, _) = weights
                    .iter()
                    .enumerate()
                    .reduce(|a, b| if b.1 < a.1 { b } else { a })
                    .expect("nonempty corral");
                corral.remove(drop);
                weights.remove(drop);
            } else {
                let mut i = 0;
                corral.retain(|_| {
                    i += 1;
                    keep[i - 1]
                });
                weights.retain(|w| w.is_positive_strict());
            }
            let total = weights.iter().fold(T::zero(), |a, b| a + b.clone());
            weights = weights.into_iter().map(|w| w / total.clone()).collect();
            x = combine(points, &corral, &weights);
        }
    }
    x
}

fn combine<T: Scalar>(points: &[Vec<T>], corral: &[usize], weights: &[T]) -> Vec<T> {
    let mut x = vec![T::zero(); points[0].len()];
    for (&i, w) in corral.iter().zip(weights) {
        x = add(&x, &scale_vec(&points[i], w));
    }
    x
}

/// Barycentric coordinates of the min-norm point of the affine hull of the corral.
fn affine_minimizer<T: Scalar>(points: &[Vec<T>], corral: &[usize]) -> Option<Vec<T>> {
    let k = corral.len();
    let mut a = vec![vec![T::zero(); k + 1]; k + 1];
    for (r, &i) in corral.iter().enumerate() {
        for (c, &j) in corral.iter().enumerate() {
            a[r][c] = dot(&points[i], &points[j]);
        }
        a[r][k] = T::one();
        a[k][r] = T::one();
    }
    let mut b = vec![T::zero(); k + 1];
    b[k] = T::one();
    solve(&a, &b).map(|mut s| {
        s.truncate(k);
        s
    })
}

/// Euclidean distance from `p` to `body`.
pub(crate) fn distance_to_body<T: Scalar>(p: &[T], body: &ConvexBody<T>) -> f64 {
    if body.contains(p, false).unwrap_or(false) {
        return 0.0;
    }
    let shifted: Vec<Vec<T>> = body.vertices().iter().map(|v| sub(v, p)).collect();
    let x = min_norm_point(&shifted);
    dot(&x, &x).approx().max(0.0).sqrt()
}
