//! Experiment configuration, read from TOML.
//!
//! ```toml
//! [function]
//! id = "synthetic"          # synthetic | oscillator | sparse-lower
//! d = 8
//!
//! [sampling]
//! basis = "chebyshev"
//! s = 8
//! trials = 25
//! seed = 1
//!
//! [noise]
//! model = "uniform"         # none | uniform | gaussian | sparse
//! levels = [0.0, 1e-3, 1e-2, 1e-1]
//!
//! [decoders]
//! families = ["wqcbp", "wsr-lasso"]
//!
//! [output]
//! csv = "sweep.csv"
//! ```
//!
//! Every field has a default, so an empty file is a valid configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::functions::{TestFunction, DEFAULT_K_SLOPE};
use super::noise::NoiseModel;
use crate::error::{Error, Result};
use crate::index::BasisKind;
use crate::solver::{DecoderFamily, SolverOptions};
use crate::tuning::{parse_grid, recommended_m, RecipeConstants, ValidationMetric, WladForm};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FunctionId {
    #[default]
    Synthetic,
    Oscillator,
    /// A random polynomial supported on a lower set, drawn per trial; its
    /// coefficients serve as the exact reference.
    SparseLower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FunctionConfig {
    pub id: FunctionId,
    pub d: usize,
    /// Oscillator stiffness slope.
    pub k_slope: f64,
    /// Oscillator perturbation magnitude.
    pub perturbation: f64,
    /// Support size of the `sparse-lower` truth.
    pub cardinality: usize,
    /// Stored least-squares reference, reused when present.
    pub reference: Option<PathBuf>,
}

impl Default for FunctionConfig {
    fn default() -> Self {
        FunctionConfig {
            id: FunctionId::Synthetic,
            d: 8,
            k_slope: DEFAULT_K_SLOPE,
            perturbation: 0.0,
            cardinality: 5,
            reference: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplingConfig {
    pub basis: BasisKind,
    pub s: usize,
    /// Sample count; defaults to `ceil(s^gamma ln n)`.
    pub m: Option<usize>,
    /// `m = ceil(C s^gamma)` for each `C` in the sample-complexity sweep.
    pub m_factors: Vec<f64>,
    /// Explicit sample counts for the sample-complexity sweep.
    pub m_values: Option<Vec<usize>>,
    pub trials: usize,
    pub seed: u64,
    pub reference_oversampling: usize,
    /// Replace the desk-scale sizes by the full-size experiments.
    pub paper_scale: bool,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        SamplingConfig {
            basis: BasisKind::Chebyshev,
            s: 8,
            m: None,
            m_factors: vec![2.0, 2.5, 3.0, 3.5, 4.0],
            m_values: None,
            trials: 25,
            seed: 1,
            reference_oversampling: 20,
            paper_scale: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NoiseKind {
    None,
    #[default]
    Uniform,
    Gaussian,
    Sparse,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub model: NoiseKind,
    /// Noise norms `beta` for the bounded models.
    pub levels: Vec<f64>,
    pub fraction: f64,
    pub amplitude: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            model: NoiseKind::Uniform,
            levels: vec![0.0, 1e-3, 1e-2, 1e-1],
            fraction: 0.1,
            amplitude: 10.0,
        }
    }
}

impl NoiseConfig {
    pub fn models(&self) -> Result<Vec<NoiseModel>> {
        let models: Vec<NoiseModel> = match self.model {
            NoiseKind::None => vec![NoiseModel::None],
            NoiseKind::Uniform => self.levels.iter().map(|&b| NoiseModel::BoundedUniform(b)).collect(),
            NoiseKind::Gaussian => self.levels.iter().map(|&b| NoiseModel::BoundedGaussian(b)).collect(),
            NoiseKind::Sparse => vec![NoiseModel::SparseCorruption {
                fraction: self.fraction,
                amplitude: self.amplitude,
            }],
        };
        if models.is_empty() {
            return Err(Error::Config("noise levels must not be empty".into()));
        }
        for model in &models {
            model.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(models)
    }
}

/// Parameter grids, in `start:step:end` exponent syntax or as plain lists.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub wqcbp: String,
    pub wlasso: String,
    pub wsr_lasso: String,
    pub wlad_lasso: String,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            wqcbp: "-7:0.5:1".into(),
            wlasso: "-1:0.5:8".into(),
            wsr_lasso: "-2:0.25:5".into(),
            wlad_lasso: "-2:0.25:3".into(),
        }
    }
}

impl GridConfig {
    pub fn text(&self, family: DecoderFamily) -> &str {
        match family {
            DecoderFamily::Wqcbp => &self.wqcbp,
            DecoderFamily::Wlasso => &self.wlasso,
            DecoderFamily::WsrLasso => &self.wsr_lasso,
            DecoderFamily::WladLasso => &self.wlad_lasso,
        }
    }

    pub fn grid(&self, family: DecoderFamily) -> Result<Vec<f64>> {
        parse_grid(self.text(family))
    }

    pub fn set(&mut self, family: DecoderFamily, text: String) {
        match family {
            DecoderFamily::Wqcbp => self.wqcbp = text,
            DecoderFamily::Wlasso => self.wlasso = text,
            DecoderFamily::WsrLasso => self.wsr_lasso = text,
            DecoderFamily::WladLasso => self.wlad_lasso = text,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecoderConfig {
    /// Decoders of the parameter sweep.
    pub families: Vec<DecoderFamily>,
    pub grids: GridConfig,
    /// Combinations (1 to 10) of the sample-complexity sweep.
    pub combinations: Vec<usize>,
    pub cv_folds: usize,
    pub cv_repetitions: usize,
    /// Multipliers around the centre value for cross-validated combinations.
    pub cv_grid: String,
    pub cv_metric: ValidationMetric,
    pub wsr_constant: f64,
    pub wlad_constant: f64,
    pub solver: SolverOptions,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            families: DecoderFamily::ALL.to_vec(),
            grids: GridConfig::default(),
            combinations: (1..=10).collect(),
            cv_folds: 5,
            cv_repetitions: 3,
            cv_grid: "-2:0.5:2".into(),
            cv_metric: ValidationMetric::SquaredL2,
            wsr_constant: 3.0,
            wlad_constant: 3.0,
            solver: SolverOptions::default(),
        }
    }
}

impl DecoderConfig {
    pub fn constants(&self) -> RecipeConstants {
        RecipeConstants {
            wsr_lasso: self.wsr_constant,
            wlad_lasso: self.wlad_constant,
            wlad_form: WladForm::Theory,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    /// Fill the `seconds` column; off by default so that reruns produce
    /// identical files.
    pub record_time: bool,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub function: FunctionConfig,
    pub sampling: SamplingConfig,
    pub noise: NoiseConfig,
    pub decoders: DecoderConfig,
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    /// Full-size parameter sweep: `d = 15`, `s = 10`, 50 trials.
    pub fn apply_paper_scale_parameter_sweep(&mut self) {
        self.function.d = 15;
        self.sampling.s = 10;
        self.sampling.m = None;
        self.sampling.trials = 50;
    }

    /// Full-size sample-complexity sweep: Chebyshev, `d = 10`, `s = 15`,
    /// 25 trials.
    pub fn apply_paper_scale_m_sweep(&mut self) {
        self.function.d = 10;
        self.sampling.s = 15;
        self.sampling.basis = BasisKind::Chebyshev;
        self.sampling.m_values = None;
        self.sampling.trials = 25;
    }

    pub fn test_function(&self) -> Option<TestFunction> {
        match self.function.id {
            FunctionId::Synthetic => Some(TestFunction::Synthetic),
            FunctionId::Oscillator => Some(TestFunction::Oscillator {
                k_slope: self.function.k_slope,
                perturbation: self.function.perturbation,
            }),
            FunctionId::SparseLower => None,
        }
    }

    /// `m` for single-size experiments.
    pub fn resolve_m(&self, n: usize) -> usize {
        self.sampling
            .m
            .unwrap_or_else(|| recommended_m(self.sampling.s, self.sampling.basis, n))
    }

    /// Sample counts of the sample-complexity sweep.
    pub fn m_grid(&self) -> Vec<usize> {
        if let Some(values) = &self.sampling.m_values {
            return values.clone();
        }
        let k = (self.sampling.s as f64).powf(self.sampling.basis.gamma());
        self.sampling.m_factors.iter().map(|c| (c * k).ceil() as usize).collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let f = &self.function;
        let s = &self.sampling;
        if f.d == 0 {
            return bad("function.d must be >= 1".into());
        }
        if f.id == FunctionId::Oscillator && f.d != 6 {
            return bad(format!("the oscillator has 6 parameters (function.d = {})", f.d));
        }
        if f.id == FunctionId::SparseLower && !(1..=s.s).contains(&f.cardinality) {
            return bad(format!(
                "function.cardinality must lie in 1..=s (got {} with s = {})",
                f.cardinality, s.s
            ));
        }
        if !(f.perturbation.is_finite() && f.perturbation >= 0.0) {
            return bad("function.perturbation must be >= 0".into());
        }
        if s.s == 0 || s.trials == 0 || s.reference_oversampling == 0 {
            return bad("sampling.s, sampling.trials and sampling.reference_oversampling must be >= 1".into());
        }
        if s.m == Some(0) {
            return bad("sampling.m must be >= 1".into());
        }
        match &s.m_values {
            Some(values) if values.is_empty() || values.contains(&0) => {
                return bad("sampling.m_values must be non-empty and positive".into())
            }
            None if s.m_factors.is_empty() || s.m_factors.iter().any(|c| !(c.is_finite() && *c > 0.0)) => {
                return bad("sampling.m_factors must be non-empty and positive".into())
            }
            _ => {}
        }
        self.noise.models()?;
        let dec = &self.decoders;
        if dec.families.is_empty() {
            return bad("decoders.families must not be empty".into());
        }
        for family in DecoderFamily::ALL {
            dec.grids
                .grid(family)
                .map_err(|e| Error::Config(format!("decoders.grids.{}: {e}", family.name().replace('-', "_"))))?;
        }
        if dec.combinations.is_empty() || dec.combinations.iter().any(|c| !(1..=10).contains(c)) {
            return bad("decoders.combinations must be non-empty and within 1..=10".into());
        }
        if dec.cv_folds < 2 || dec.cv_repetitions == 0 {
            return bad("decoders.cv_folds must be >= 2 and decoders.cv_repetitions >= 1".into());
        }
        parse_grid(&dec.cv_grid).map_err(|e| Error::Config(format!("decoders.cv_grid: {e}")))?;
        if !(dec.wsr_constant > 0.0 && dec.wlad_constant > 0.0) {
            return bad("recipe constants must be > 0".into());
        }
        Ok(())
    }
}
