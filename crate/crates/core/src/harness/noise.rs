//! Noise models for corrupting samples.

use nalgebra::DVector;
use rand::seq::index::sample;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseModel {
    None,
    /// `e = beta n / ||n||_2` with `n` uniform on `[-1, 1]^m`.
    BoundedUniform(f64),
    /// `e = beta n / ||n||_2` with `n` standard normal.
    BoundedGaussian(f64),
    /// `round(fraction m)` entries, drawn without replacement, receive
    /// independent uniform values on `[-amplitude, amplitude]`.
    SparseCorruption { fraction: f64, amplitude: f64 },
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseModel::None => Ok(()),
            NoiseModel::BoundedUniform(beta) | NoiseModel::BoundedGaussian(beta) => {
                if beta.is_finite() && beta >= 0.0 {
                    Ok(())
                } else {
                    Err(Error::InvalidArgument(format!("noise level must be >= 0 (got {beta})")))
                }
            }
            NoiseModel::SparseCorruption { fraction, amplitude } => {
                if !(fraction > 0.0 && fraction <= 1.0) {
                    return Err(Error::InvalidArgument(format!(
                        "corruption fraction must lie in (0, 1] (got {fraction})"
                    )));
                }
                if !(amplitude.is_finite() && amplitude > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "corruption amplitude must be > 0 (got {amplitude})"
                    )));
                }
                Ok(())
            }
        }
    }

    /// `beta` for bounded models, the amplitude for sparse corruption and 0
    /// for no noise.
    pub fn level(&self) -> f64 {
        match *self {
            NoiseModel::None => 0.0,
            NoiseModel::BoundedUniform(beta) | NoiseModel::BoundedGaussian(beta) => beta,
            NoiseModel::SparseCorruption { amplitude, .. } => amplitude,
        }
    }

    /// Number of corrupted entries out of `m`, or `None` for dense models.
    pub fn corrupted_count(&self, m: usize) -> Option<usize> {
        match *self {
            NoiseModel::SparseCorruption { fraction, .. } => Some((fraction * m as f64).round() as usize),
            _ => None,
        }
    }
}

/// Draws the error vector `e` for `m` samples.
pub fn draw_noise<R: Rng + ?Sized>(m: usize, model: &NoiseModel, rng: &mut R) -> Result<DVector<f64>> {
    model.validate()?;
    if m == 0 {
        return Err(Error::InvalidArgument("noise needs m >= 1".into()));
    }
    let bounded = |beta: f64, rng: &mut R, gaussian: bool| {
        if beta == 0.0 {
            return DVector::zeros(m);
        }
        loop {
            let n = DVector::from_fn(m, |_, _| {
                if gaussian {
                    rng.sample::<f64, _>(StandardNormal)
                } else {
                    rng.random_range(-1.0..=1.0)
                }
            });
            let norm = n.norm();
            if norm > 0.0 {
                return n * (beta / norm);
            }
        }
    };
    Ok(match *model {
        NoiseModel::None => DVector::zeros(m),
        NoiseModel::BoundedUniform(beta) => bounded(beta, rng, false),
        NoiseModel::BoundedGaussian(beta) => bounded(beta, rng, true),
        NoiseModel::SparseCorruption { amplitude, .. } => {
            let count = model.corrupted_count(m).unwrap_or(0).min(m);
            let mut e = DVector::zeros(m);
            for i in sample(rng, m, count).into_vec() {
                e[i] = rng.random_range(-amplitude..=amplitude);
            }
            e
        }
    })
}

/// Returns `(y + e, e)`.
pub fn apply_noise<R: Rng + ?Sized>(
    y: &DVector<f64>,
    model: &NoiseModel,
    rng: &mut R,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let e = draw_noise(y.len(), model, rng)?;
    Ok((y + &e, e))
}
