//! Arithmetic volumes, χ-volumes, asymptotic slopes and bigness.

use super::{ConcaveError, FilteredGradedAlgebra, TransformOptions};
use crate::extrapolate::{extrapolate, Extrapolation};
use crate::scalar::factorial;

/// A degree-side limit next to the integral of the concave transform.
#[derive(Clone, Debug, PartialEq)]
pub struct VolumeEstimate {
    pub degree_side: Extrapolation,
    pub integral_side: f64,
    pub integral_error: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AsymptoticSlopes {
    pub mu_max: Extrapolation,
    pub mu_min: Extrapolation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Bigness {
    pub big: bool,
    pub full_dimensional: bool,
    pub mu_max_asy: f64,
    /// Grid point with the largest `G`, and that value.
    pub witness: Option<(Vec<f64>, f64)>,
    pub reason: String,
}

impl FilteredGradedAlgebra {
    /// `(m, f(level m)·(d+1)!/m^{d+1})` over nonempty levels `1..=M`.
    pub fn normalized_sequence(&self, truncation: u32, f: impl Fn(&[f64]) -> f64) -> Vec<(u32, f64)> {
        let d = self.dim();
        let fact = factorial(d + 1) as f64;
        self.levels()
            .filter(|(m, l)| (1..=truncation).contains(m) && !l.is_empty())
            .map(|(m, l)| {
                let w: Vec<f64> = l.values().copied().collect();
                (m, f(&w) * fact / f64::from(m).powi(d as i32 + 1))
            })
            .collect()
    }

    fn extrapolated(&self, truncation: u32, f: impl Fn(&[f64]) -> f64) -> Result<Extrapolation, ConcaveError> {
        let seq = self.normalized_sequence(truncation, f);
        if seq.is_empty() {
            return Err(ConcaveError::NoLevels(truncation));
        }
        Ok(extrapolate(&seq))
    }

    /// `(d+1)! ∫ f(G)`: exact PL integration with provenance, otherwise
    /// midpoint quadrature with one Richardson step. Returns value and error.
    pub fn transform_integral(&self, options: &TransformOptions, positive_part: bool) -> Result<(f64, f64), ConcaveError> {
        let fact = factorial(self.dim() + 1) as f64;
        if let Some(p) = self.provenance() {
            let v = if positive_part { p.roof.positive_part_integral()? } else { p.integral()? };
            return Ok((fact * v, 1e-9 * (1.0 + v.abs())));
        }
        let f = |g: f64| if positive_part { g.max(0.0) } else { g };
        let fine = self.concave_transform(options)?.grid_integral(f);
        let coarse_opts = TransformOptions { grid: (options.grid / 2).max(4), ..*options };
        let coarse = self.concave_transform(&coarse_opts)?.grid_integral(f);
        Ok((fact * (2.0 * fine - coarse), fact * (fine - coarse).abs()))
    }

    /// `vol̂`: limit of `deg₊(V_m)(d+1)!/m^{d+1}` next to `(d+1)!∫max(G,0)`.
    pub fn arithmetic_volume(&self, options: &TransformOptions) -> Result<VolumeEstimate, ConcaveError> {
        let degree_side = self.extrapolated(options.truncation, |w| w.iter().map(|x| x.max(0.0)).sum())?;
        let (integral_side, integral_error) = self.transform_integral(options, true)?;
        Ok(VolumeEstimate { degree_side, integral_side, integral_error })
    }

    /// `vol̂_χ`: limit of `deg(V_m)(d+1)!/m^{d+1}`.
    pub fn chi_volume(&self, truncation: u32) -> Result<Extrapolation, ConcaveError> {
        self.extrapolated(truncation, |w| w.iter().sum())
    }

    /// `vol̂_χ` next to `vol̂_χ^num = (d+1)!∫G`.
    pub fn chi_volumes(&self, options: &TransformOptions) -> Result<VolumeEstimate, ConcaveError> {
        let degree_side = self.chi_volume(options.truncation)?;
        let (integral_side, integral_error) = self.chi_volume_num(options)?;
        Ok(VolumeEstimate { degree_side, integral_side, integral_error })
    }

    pub fn chi_volume_num(&self, options: &TransformOptions) -> Result<(f64, f64), ConcaveError> {
        self.transform_integral(options, false)
    }

    /// Limits of `μ_max(V_m)/m` and `μ_min(V_m)/m`.
    pub fn asymptotic_slopes(&self, truncation: u32) -> Result<AsymptoticSlopes, ConcaveError> {
        let series = |pick: fn(&[f64]) -> f64| -> Result<Extrapolation, ConcaveError> {
            let seq: Vec<(u32, f64)> = self
                .levels()
                .filter(|(m, l)| (1..=truncation).contains(m) && !l.is_empty())
                .map(|(m, l)| {
                    let w: Vec<f64> = l.values().copied().collect();
                    (m, pick(&w) / f64::from(m))
                })
                .collect();
            if seq.is_empty() {
                return Err(ConcaveError::NoLevels(truncation));
            }
            Ok(extrapolate(&seq))
        };
        Ok(AsymptoticSlopes {
            mu_max: series(|w| w.iter().copied().fold(f64::NEG_INFINITY, f64::max))?,
            mu_min: series(|w| w.iter().copied().fold(f64::INFINITY, f64::min))?,
        })
    }

    /// Big iff `Δ` is full-dimensional and `μ̂_max^asy > 0`.
    pub fn bigness_test(&self, options: &TransformOptions) -> Result<Bigness, ConcaveError> {
        let tolerance = 1e-9;
        let body = self.okounkov_body(options.truncation)?;
        let mu_max_asy = self.asymptotic_slopes(options.truncation)?.mu_max.limit;
        if !body.is_full_dimensional() {
            return Ok(Bigness {
                big: false,
                full_dimensional: false,
                mu_max_asy,
                witness: None,
                reason: format!("Okounkov body has dimension {} < {}", body.affine_dim(), self.dim()),
            });
        }
        let t = self.concave_transform(options)?;
        let best = t
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, v)| (t.coords[i].clone(), *v));
        let big = mu_max_asy > tolerance;
        let reason = if big {
            "full-dimensional body and positive maximal slope".to_string()
        } else {
            format!("asymptotic maximal slope {mu_max_asy} is not positive")
        };
        Ok(Bigness { big, full_dimensional: true, mu_max_asy, witness: best, reason })
    }
}
