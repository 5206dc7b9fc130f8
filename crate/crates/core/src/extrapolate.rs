//! Limits of sequences indexed by a level `m`, from fits in `1/m`.

/// Extrapolated limit of a level-indexed sequence.
#[derive(Clone, Debug, PartialEq)]
pub struct Extrapolation {
    pub limit: f64,
    /// Gap between the constants of the first- and second-order fits.
    pub error: f64,
    /// Coefficient of `1/m` in the fit that produced `limit`.
    pub slope: f64,
    pub samples: Vec<(u32, f64)>,
}

/// The second-order fit must shrink the squared residual by this factor to be used.
const CURVATURE_GAIN: f64 = 0.01;

/// Least squares of `y` against the powers `1, x, …, x^degree`.
fn poly_fit(xs: &[f64], ys: &[f64], degree: usize) -> Option<Vec<f64>> {
    let n = degree + 1;
    if xs.len() < n {
        return None;
    }
    let mut a = vec![vec![0.0; n + 1]; n];
    for (&x, &y) in xs.iter().zip(ys) {
        let pows: Vec<f64> = (0..n).map(|k| x.powi(k as i32)).collect();
        for r in 0..n {
            for c in 0..n {
                a[r][c] += pows[r] * pows[c];
            }
            a[r][n] += pows[r] * y;
        }
    }
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs()))?;
        if a[p][c].abs() < 1e-300 {
            return None;
        }
        a.swap(c, p);
        for r in 0..n {
            if r != c {
                let f = a[r][c] / a[c][c];
                for k in c..=n {
                    a[r][k] -= f * a[c][k];
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

fn residual(xs: &[f64], ys: &[f64], coeffs: &[f64]) -> f64 {
    xs.iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let fit: f64 = coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c);
            (y - fit) * (y - fit)
        })
        .sum()
}

/// Fits `a + b/m` and `a + b/m + c/m²` on the last third of the samples.
/// The second-order constant is reported when the `1/m²` term removes most of
/// the residual (smooth sequences); otherwise, as for sequences oscillating
/// through floors, the first-order one is. The error bar is the distance
/// between the two constants.
pub fn extrapolate(samples: &[(u32, f64)]) -> Extrapolation {
    assert!(!samples.is_empty(), "extrapolation needs samples");
    let n = samples.len();
    let take = (n / 3).max(3).min(n);
    let tail = &samples[n - take..];
    let xs: Vec<f64> = tail.iter().map(|&(m, _)| 1.0 / f64::from(m)).collect();
    let ys: Vec<f64> = tail.iter().map(|&(_, y)| y).collect();
    let last = ys[ys.len() - 1];
    let first = poly_fit(&xs, &ys, 1);
    let second = if take >= 4 { poly_fit(&xs, &ys, 2) } else { None };
    let (limit, slope, error) = match (&first, &second) {
        (Some(f), Some(s)) => {
            let smooth = residual(&xs, &ys, s) <= CURVATURE_GAIN * residual(&xs, &ys, f);
            let chosen = if smooth { s } else { f };
            (chosen[0], chosen[1], (s[0] - f[0]).abs())
        }
        (Some(f), None) => (f[0], f[1], (f[0] - last).abs()),
        (None, _) => (last, 0.0, 0.0),
    };
    Extrapolation { limit, error, slope, samples: samples.to_vec() }
}
