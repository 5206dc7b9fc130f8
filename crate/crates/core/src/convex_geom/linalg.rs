//! Small dense linear algebra over a [`Scalar`] field (dimension ≤ 5 in practice).

use crate::scalar::Scalar;

/// Pivot index: exact fields take the first nonzero entry, floats the largest.
fn pivot_row<T: Scalar>(m: &[Vec<T>], col: usize, start: usize) -> Option<usize> {
    if T::EXACT {
        (start..m.len()).find(|&r| !m[r][col].is_negligible())
    } else {
        let mut best: Option<(usize, f64)> = None;
        for (r, row) in m.iter().enumerate().skip(start) {
            let v = row[col].approx().abs();
            if !row[col].is_negligible() && best.map_or(true, |(_, b)| v > b) {
                best = Some((r, v));
            }
        }
        best.map(|(r, _)| r)
    }
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref<T: Scalar>(m: &mut Vec<Vec<T>>) -> Vec<usize> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = pivot_row(m, c, r) else { continue };
        m.swap(r, p);
        let inv = T::one() / m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = x.clone() * inv.clone();
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_negligible() {
                let f = m[i][c].clone();
                for j in 0..cols {
                    let v = m[r][j].clone() * f.clone();
                    m[i][j] = m[i][j].clone() - v;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

pub fn rank<T: Scalar>(rows: &[Vec<T>]) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m).len()
}

pub fn determinant<T: Scalar>(rows: &[Vec<T>]) -> T {
    let n = rows.len();
    let mut m = rows.to_vec();
    let mut det = T::one();
    for c in 0..n {
        let Some(p) = pivot_row(&m, c, c) else {
            return T::zero();
        };
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        let pv = m[c][c].clone();
        det = det * pv.clone();
        for i in (c + 1)..n {
            if m[i][c].is_negligible() {
                continue;
            }
            let f = m[i][c].clone() / pv.clone();
            for j in c..n {
                let v = m[c][j].clone() * f.clone();
                m[i][j] = m[i][j].clone() - v;
            }
        }
    }
    det
}

/// Solves the square system `a x = b`; `None` when singular.
pub fn solve<T: Scalar>(a: &[Vec<T>], b: &[T]) -> Option<Vec<T>> {
    let n = a.len();
    let mut m: Vec<Vec<T>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Normal of the hyperplane through `points` (k points in R^k), via signed minors.
pub fn hyperplane_normal<T: Scalar>(points: &[Vec<T>]) -> Vec<T> {
    let k = points[0].len();
    let base = &points[0];
    let diffs: Vec<Vec<T>> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(x, y)| x.clone() - y.clone()).collect())
        .collect();
    (0..k)
        .map(|j| {
            let minor: Vec<Vec<T>> = diffs
                .iter()
                .map(|row| {
                    row.iter()
                        .enumerate()
                        .filter(|&(c, _)| c != j)
                        .map(|(_, v)| v.clone())
                        .collect()
                })
                .collect();
            let d = if minor.is_empty() { T::one() } else { determinant(&minor) };
            if j % 2 == 0 {
                d
            } else {
                -d
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::ratio(n, d)
    }

    #[test]
    fn determinant_and_solve() {
        let a = vec![vec![q(2, 1), q(1, 1)], vec![q(1, 1), q(3, 1)]];
        assert_eq!(determinant(&a), q(5, 1));
        let x = solve(&a, &[q(3, 1), q(4, 1)]).unwrap();
        assert_eq!(x, vec![q(1, 1), q(1, 1)]);
        let singular = vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]];
        assert!(solve(&singular, &[q(1, 1), q(1, 1)]).is_none());
    }

    #[test]
    fn normal_is_orthogonal_to_differences() {
        let pts = vec![
            vec![q(1, 1), q(0, 1), q(0, 1)],
            vec![q(0, 1), q(1, 1), q(0, 1)],
            vec![q(0, 1), q(0, 1), q(1, 1)],
        ];
        let n = hyperplane_normal(&pts);
        for p in &pts[1..] {
            let d: BigRational = p.iter().zip(&pts[0]).zip(&n).map(|((a, b), c)| (a - b) * c).sum();
            assert_eq!(d, q(0, 1));
        }
        assert!(n.iter().any(|x| *x != q(0, 1)));
    }
}
