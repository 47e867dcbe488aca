//! Test functions: the smooth synthetic benchmark and the forced damped
//! oscillator.

use serde::{Deserialize, Serialize};

use crate::basis::SamplePoint;
use crate::error::{Error, Result};

/// `exp(-(1/d) sum_l cos t_l)`.
pub fn synthetic_f(t: &SamplePoint) -> f64 {
    let d = t.dim() as f64;
    (-t.coords().iter().map(|x| x.cos()).sum::<f64>() / d).exp()
}

/// Slope of the stiffness map `k = 0.035 + slope * t_2`.
pub const DEFAULT_K_SLOPE: f64 = 0.05;

/// Point at which the oscillator displacement is observed.
pub const OBSERVATION_TIME: f64 = 20.0;

/// `u'' + gamma u' + k u = g cos(omega x)`, `u(0) = u0`, `u'(0) = v0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Oscillator {
    pub gamma: f64,
    pub k: f64,
    pub g: f64,
    pub omega: f64,
    pub u0: f64,
    pub v0: f64,
}

impl Oscillator {
    /// Fails unless the system is underdamped (`gamma^2 < 4k`).
    pub fn new(gamma: f64, k: f64, g: f64, omega: f64, u0: f64, v0: f64) -> Result<Self> {
        let values = [gamma, k, g, omega, u0, v0];
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("oscillator parameters"));
        }
        if gamma * gamma >= 4.0 * k {
            return Err(Error::NotUnderdamped {
                gamma_sq: gamma * gamma,
                four_k: 4.0 * k,
            });
        }
        Ok(Oscillator {
            gamma,
            k,
            g,
            omega,
            u0,
            v0,
        })
    }

    /// Maps `t in [-1,1]^6` to
    /// `gamma = 0.1 + 0.02 t1`, `k = 0.035 + k_slope t2`, `g = 0.1 + 0.02 t3`,
    /// `omega = 1 + 0.2 t4`, `u0 = 0.5 + 0.05 t5`, `v0 = 0.05 t6`.
    pub fn from_parameters(t: &[f64], k_slope: f64) -> Result<Self> {
        if t.len() != 6 {
            return Err(Error::DimensionMismatch {
                expected: 6,
                found: t.len(),
            });
        }
        if t.iter().any(|v| !(-1.0..=1.0).contains(v)) {
            return Err(Error::InvalidArgument(format!(
                "oscillator parameters must lie in [-1, 1], got {t:?}"
            )));
        }
        Oscillator::new(
            0.1 + 0.02 * t[0],
            0.035 + k_slope * t[1],
            0.1 + 0.02 * t[2],
            1.0 + 0.2 * t[3],
            0.5 + 0.05 * t[4],
            0.05 * t[5],
        )
    }

    /// Closed-form displacement: steady sinusoid plus decaying transient.
    pub fn displacement(&self, x: f64) -> f64 {
        let Oscillator {
            gamma,
            k,
            g,
            omega,
            u0,
            v0,
        } = *self;
        let detune = k - omega * omega;
        let denom = detune * detune + gamma * gamma * omega * omega;
        let a = g * detune / denom;
        let b = g * gamma * omega / denom;
        let mu = (k - 0.25 * gamma * gamma).sqrt();
        let c1 = u0 - a;
        let c2 = (v0 - omega * b + 0.5 * gamma * c1) / mu;
        let transient = (-0.5 * gamma * x).exp() * (c1 * (mu * x).cos() + c2 * (mu * x).sin());
        a * (omega * x).cos() + b * (omega * x).sin() + transient
    }

    /// Displacement at `x` from an adaptive Dormand-Prince 5(4) integration
    /// with absolute and relative tolerance `tol`.
    pub fn integrate(&self, x: f64, tol: f64) -> f64 {
        let rhs = |s: f64, y: [f64; 2]| -> [f64; 2] {
            [y[1], self.g * (self.omega * s).cos() - self.gamma * y[1] - self.k * y[0]]
        };
        dormand_prince(rhs, [self.u0, self.v0], x, tol)[0]
    }
}

/// `u(20)` with the stiffness slope as printed.
pub fn oscillator_qoi(t: &SamplePoint) -> Result<f64> {
    Ok(Oscillator::from_parameters(t.coords(), DEFAULT_K_SLOPE)?.displacement(OBSERVATION_TIME))
}

const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn dormand_prince<F: Fn(f64, [f64; 2]) -> [f64; 2]>(f: F, y0: [f64; 2], end: f64, tol: f64) -> [f64; 2] {
    let mut s = 0.0;
    let mut y = y0;
    let mut h = (end - s).min(0.01);
    while s < end {
        h = h.min(end - s);
        let mut k = [[0.0; 2]; 7];
        for stage in 0..7 {
            let mut yi = y;
            for (j, kj) in k.iter().enumerate().take(stage) {
                for c in 0..2 {
                    yi[c] += h * DP_A[stage][j] * kj[c];
                }
            }
            k[stage] = f(s + DP_C[stage] * h, yi);
        }
        let mut y5 = y;
        let mut y4 = y;
        for c in 0..2 {
            for j in 0..7 {
                y5[c] += h * DP_B5[j] * k[j][c];
                y4[c] += h * DP_B4[j] * k[j][c];
            }
        }
        let err = (0..2)
            .map(|c| (y5[c] - y4[c]).abs() / (tol + tol * y[c].abs().max(y5[c].abs())))
            .fold(0.0f64, f64::max);
        if err <= 1.0 {
            s += h;
            y = y5;
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h *= factor;
    }
    y
}

/// Which function the experiment approximates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TestFunction {
    Synthetic,
    /// The oscillator observed at `x = 20`, plus a deterministic perturbation
    /// `perturbation * sin(37 sum_l (l+1) t_l)` that plays the role of
    /// integrator error.
    Oscillator { k_slope: f64, perturbation: f64 },
}

impl TestFunction {
    pub fn evaluate(&self, t: &SamplePoint) -> Result<f64> {
        match *self {
            TestFunction::Synthetic => Ok(synthetic_f(t)),
            TestFunction::Oscillator {
                k_slope,
                perturbation,
            } => {
                let clean = Oscillator::from_parameters(t.coords(), k_slope)?.displacement(OBSERVATION_TIME);
                if perturbation == 0.0 {
                    return Ok(clean);
                }
                let phase: f64 = t.coords().iter().enumerate().map(|(l, v)| (l + 1) as f64 * v).sum();
                Ok(clean + perturbation * (37.0 * phase).sin())
            }
        }
    }

    pub fn dim(&self) -> Option<usize> {
        match self {
            TestFunction::Synthetic => None,
            TestFunction::Oscillator { .. } => Some(6),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;

    fn point(coords: &[f64]) -> SamplePoint {
        SamplePoint::new(coords.to_vec()).unwrap()
    }

    #[test]
    fn synthetic_examples() {
        for d in [1, 4, 15] {
            assert!((synthetic_f(&point(&vec![0.0; d])) - (-1.0f64).exp()).abs() < 1e-15);
        }
        let v = synthetic_f(&point(&[0.5, -0.5]));
        assert!((v - (-(0.5f64).cos()).exp()).abs() < 1e-15);
        assert!((v - 0.4157868).abs() < 1e-6);
        let mut rng = seeded(1);
        for _ in 0..20 {
            let t: Vec<f64> = (0..5).map(|_| rng.random_range(-1.0..1.0)).collect();
            let neg: Vec<f64> = t.iter().map(|v| -v).collect();
            assert_eq!(synthetic_f(&point(&t)), synthetic_f(&point(&neg)));
        }
    }

    #[test]
    fn closed_form_matches_integrator() {
        let mut rng = seeded(2);
        // a slope that keeps every draw underdamped
        for _ in 0..20 {
            let t: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
            let osc = Oscillator::from_parameters(&t, 0.005).unwrap();
            let closed = osc.displacement(OBSERVATION_TIME);
            let numeric = osc.integrate(OBSERVATION_TIME, 1e-10);
            assert!((closed - numeric).abs() < 1e-8, "{closed} vs {numeric}");
        }
        let osc = Oscillator::from_parameters(&[0.3, 0.9, -0.2, 0.5, 0.1, -0.7], DEFAULT_K_SLOPE).unwrap();
        assert!((osc.displacement(OBSERVATION_TIME) - osc.integrate(OBSERVATION_TIME, 1e-10)).abs() < 1e-8);
    }

    #[test]
    fn trivial_oscillator_cases() {
        let rest = Oscillator::new(0.1, 0.035, 0.0, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(rest.displacement(OBSERVATION_TIME), 0.0);
        let osc = Oscillator::new(0.1, 0.035, 0.1, 1.2, 0.47, 0.02).unwrap();
        assert!((osc.displacement(0.0) - 0.47).abs() < 1e-15);
        // derivative at zero by central difference
        let h = 1e-6;
        let slope = (osc.displacement(h) - osc.displacement(-h)) / (2.0 * h);
        assert!((slope - 0.02).abs() < 1e-8);
    }

    #[test]
    fn overdamped_parameters_are_rejected() {
        assert!(matches!(
            Oscillator::new(0.1, 0.002, 0.1, 1.0, 0.5, 0.0),
            Err(Error::NotUnderdamped { .. })
        ));
        // the printed slope leaves the underdamped regime for t2 near -1
        assert!(Oscillator::from_parameters(&[0.0, -1.0, 0.0, 0.0, 0.0, 0.0], DEFAULT_K_SLOPE).is_err());
        assert!(Oscillator::from_parameters(&[0.0; 5], DEFAULT_K_SLOPE).is_err());
        assert!(Oscillator::from_parameters(&[0.0, 0.0, 0.0, 0.0, 0.0, 1.5], DEFAULT_K_SLOPE).is_err());
        assert!(oscillator_qoi(&point(&[0.0; 6])).is_ok());
    }

    #[test]
    fn perturbation_is_deterministic_and_bounded() {
        let clean = TestFunction::Oscillator {
            k_slope: 0.005,
            perturbation: 0.0,
        };
        let noisy = TestFunction::Oscillator {
            k_slope: 0.005,
            perturbation: 1e-3,
        };
        let t = point(&[0.1, 0.2, -0.3, 0.4, -0.5, 0.6]);
        let gap = noisy.evaluate(&t).unwrap() - clean.evaluate(&t).unwrap();
        assert!(gap.abs() <= 1e-3 && gap != 0.0);
        assert_eq!(noisy.evaluate(&t).unwrap(), noisy.evaluate(&t).unwrap());
    }
}
