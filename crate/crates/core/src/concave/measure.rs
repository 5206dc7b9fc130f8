//! Jumping measures and their distance to the pushforward of Lebesgue measure by `G`.

use super::ConcaveError;
use crate::roof::PiecewiseLinearConcave;

/// `ν_m`: atoms `μ_i(V_m)/m`, each of mass `1/dim V_m`, sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct JumpingMeasure {
    pub m: u32,
    pub atoms: Vec<f64>,
}

impl JumpingMeasure {
    /// `ν_m((−∞, t])`.
    pub fn cdf(&self, t: f64) -> f64 {
        self.atoms.partition_point(|&a| a <= t) as f64 / self.atoms.len() as f64
    }

    /// `ν_m((−∞, t))`.
    pub fn cdf_left(&self, t: f64) -> f64 {
        self.atoms.partition_point(|&a| a < t) as f64 / self.atoms.len() as f64
    }

    pub fn mean(&self) -> f64 {
        self.atoms.iter().sum::<f64>() / self.atoms.len() as f64
    }
}

/// Law of `G` under normalized Lebesgue measure on `Δ`.
#[derive(Clone, Debug)]
pub enum ReferenceDistribution {
    /// `G` is a known concave PL function; its CDF comes from superlevel volumes.
    Roof { roof: PiecewiseLinearConcave<f64>, volume: f64 },
    /// Equal-weight samples of `G` (grid cells), sorted ascending.
    Empirical(Vec<f64>),
}

impl ReferenceDistribution {
    pub fn roof(roof: PiecewiseLinearConcave<f64>) -> Self {
        let volume = roof.domain().volume();
        ReferenceDistribution::Roof { roof, volume }
    }

    pub fn empirical(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        ReferenceDistribution::Empirical(values)
    }

    fn survival(roof: &PiecewiseLinearConcave<f64>, volume: f64, s: f64) -> Result<f64, ConcaveError> {
        Ok(roof.superlevel_volume(&s)? / volume)
    }

    /// `(F(t−), F(t))`.
    pub fn cdf_pair(&self, t: f64) -> Result<(f64, f64), ConcaveError> {
        match self {
            ReferenceDistribution::Roof { roof, volume } => {
                let delta = 1e-12 * (1.0 + t.abs());
                let left = 1.0 - Self::survival(roof, *volume, t)?;
                let right = 1.0 - Self::survival(roof, *volume, t + delta)?;
                Ok((left, right))
            }
            ReferenceDistribution::Empirical(v) => {
                let n = v.len() as f64;
                Ok((v.partition_point(|&x| x < t) as f64 / n, v.partition_point(|&x| x <= t) as f64 / n))
            }
        }
    }
}

/// `sup_t |ν_m((−∞,t]) − F(t)|`, evaluated at both one-sided limits of every jump.
pub fn kolmogorov_distance(measure: &JumpingMeasure, reference: &ReferenceDistribution) -> Result<f64, ConcaveError> {
    let mut candidates: Vec<f64> = measure.atoms.clone();
    if let ReferenceDistribution::Empirical(v) = reference {
        candidates.extend_from_slice(v);
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let mut worst = 0.0f64;
    for t in candidates {
        let (ref_left, ref_right) = reference.cdf_pair(t)?;
        worst = worst
            .max((measure.cdf_left(t) - ref_left).abs())
            .max((measure.cdf(t) - ref_right).abs());
    }
    Ok(worst)
}
