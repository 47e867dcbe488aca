use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use wl1_core::harness::config::{ExperimentConfig, FunctionId, NoiseKind};
use wl1_core::index::BasisKind;
use wl1_core::solver::DecoderFamily;
use wl1_core::tuning::ValidationMetric;

#[derive(Debug, Parser)]
#[command(name = "wl1", version, about = "Sparse polynomial approximation by weighted l1 minimization")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample the target once, solve one decoder and write the coefficients.
    Approximate {
        #[command(flatten)]
        settings: Settings,
        /// Decoder to run.
        #[arg(long, default_value = "wqcbp")]
        decoder: DecoderFamily,
        /// Tuning parameter; defaults to the theory recipe.
        #[arg(long)]
        param: Option<f64>,
        /// Coefficient file to write.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Error versus tuning parameter over the configured grids.
    SweepParam {
        #[command(flatten)]
        settings: Settings,
    },
    /// Error versus sample count for the ten decoder/parameter combinations.
    SweepM {
        #[command(flatten)]
        settings: Settings,
    },
    /// K-fold cross validation of one decoder on one sample set.
    CrossValidate {
        #[command(flatten)]
        settings: Settings,
        /// Decoder to tune.
        #[arg(long, default_value = "wsr-lasso")]
        decoder: DecoderFamily,
        /// Candidate parameters; defaults to the decoder's grid.
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
    },
    /// Index-set size, weighted cardinality, K(s), recommended m and Q.
    Diag {
        #[command(flatten)]
        settings: Settings,
        /// Skip the singular-value computation for Q.
        #[arg(long)]
        skip_q: bool,
    },
    /// Fit and store a least-squares reference solution.
    Reference {
        #[command(flatten)]
        settings: Settings,
        /// File to write; defaults to `function.reference`.
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Config file plus one flag per config field. Flags win over the file,
/// the file wins over built-in defaults.
#[derive(Debug, Args)]
pub struct Settings {
    /// TOML experiment configuration.
    #[arg(long, short)]
    pub config: Option<PathBuf>,

    /// [function] id: synthetic, oscillator or sparse-lower.
    #[arg(long, value_parser = parse_function)]
    pub function: Option<FunctionId>,
    /// [function] dimension d.
    #[arg(long)]
    pub d: Option<usize>,
    /// [function] oscillator stiffness slope.
    #[arg(long, allow_hyphen_values = true)]
    pub k_slope: Option<f64>,
    /// [function] oscillator perturbation magnitude.
    #[arg(long)]
    pub perturbation: Option<f64>,
    /// [function] support size of the sparse-lower truth.
    #[arg(long)]
    pub cardinality: Option<usize>,
    /// [function] stored reference file.
    #[arg(long)]
    pub reference: Option<PathBuf>,

    /// [sampling] basis: legendre or chebyshev.
    #[arg(long)]
    pub basis: Option<BasisKind>,
    /// [sampling] sparsity s (hyperbolic cross order).
    #[arg(long)]
    pub s: Option<usize>,
    /// [sampling] number of samples m.
    #[arg(long)]
    pub m: Option<usize>,
    /// [sampling] factors C of m = ceil(C s^gamma), comma separated.
    #[arg(long, value_delimiter = ',')]
    pub m_factors: Option<Vec<f64>>,
    /// [sampling] explicit sample counts, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub m_values: Option<Vec<usize>>,
    /// [sampling] number of trials.
    #[arg(long)]
    pub trials: Option<usize>,
    /// [sampling] master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// [sampling] least-squares reference oversampling factor.
    #[arg(long)]
    pub reference_oversampling: Option<usize>,
    /// [sampling] use the full-size experiment dimensions.
    #[arg(long)]
    pub paper_scale: bool,

    /// [noise] model: none, uniform, gaussian or sparse.
    #[arg(long, value_parser = parse_noise)]
    pub noise: Option<NoiseKind>,
    /// [noise] noise levels beta, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub levels: Option<Vec<f64>>,
    /// [noise] corrupted fraction for sparse corruption.
    #[arg(long)]
    pub fraction: Option<f64>,
    /// [noise] corruption amplitude.
    #[arg(long)]
    pub amplitude: Option<f64>,

    /// [decoders] decoders of the parameter sweep, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub decoders: Option<Vec<DecoderFamily>>,
    /// [decoders.grids] WQCBP grid, e.g. -7:0.5:1.
    #[arg(long, allow_hyphen_values = true)]
    pub grid_wqcbp: Option<String>,
    /// [decoders.grids] WLASSO grid.
    #[arg(long, allow_hyphen_values = true)]
    pub grid_wlasso: Option<String>,
    /// [decoders.grids] WSR-LASSO grid.
    #[arg(long, allow_hyphen_values = true)]
    pub grid_wsr_lasso: Option<String>,
    /// [decoders.grids] WLAD-LASSO grid.
    #[arg(long, allow_hyphen_values = true)]
    pub grid_wlad_lasso: Option<String>,
    /// [decoders] combinations 1-10 of the sample-count sweep, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub combinations: Option<Vec<usize>>,
    /// [decoders] number of cross-validation folds.
    #[arg(long)]
    pub cv_folds: Option<usize>,
    /// [decoders] number of cross-validation repetitions.
    #[arg(long)]
    pub cv_repetitions: Option<usize>,
    /// [decoders] cross-validation multipliers around the centre value.
    #[arg(long, allow_hyphen_values = true)]
    pub cv_grid: Option<String>,
    /// [decoders] validation error: squared-l2 or l1.
    #[arg(long, value_parser = parse_metric)]
    pub cv_metric: Option<ValidationMetric>,
    /// [decoders] WSR-LASSO recipe constant.
    #[arg(long)]
    pub wsr_constant: Option<f64>,
    /// [decoders] WLAD-LASSO recipe constant.
    #[arg(long)]
    pub wlad_constant: Option<f64>,
    /// [decoders.solver] iteration budget.
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// [decoders.solver] relative stopping tolerance.
    #[arg(long)]
    pub tolerance: Option<f64>,

    /// [output] CSV result table.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// [output] JSON summary.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// [output] fill the seconds column.
    #[arg(long)]
    pub record_time: bool,
}

fn parse_function(s: &str) -> Result<FunctionId, String> {
    match s {
        "synthetic" => Ok(FunctionId::Synthetic),
        "oscillator" => Ok(FunctionId::Oscillator),
        "sparse-lower" => Ok(FunctionId::SparseLower),
        _ => Err(format!("unknown function {s:?} (synthetic, oscillator, sparse-lower)")),
    }
}

fn parse_noise(s: &str) -> Result<NoiseKind, String> {
    match s {
        "none" => Ok(NoiseKind::None),
        "uniform" => Ok(NoiseKind::Uniform),
        "gaussian" => Ok(NoiseKind::Gaussian),
        "sparse" => Ok(NoiseKind::Sparse),
        _ => Err(format!("unknown noise model {s:?} (none, uniform, gaussian, sparse)")),
    }
}

fn parse_metric(s: &str) -> Result<ValidationMetric, String> {
    match s {
        "squared-l2" => Ok(ValidationMetric::SquaredL2),
        "l1" => Ok(ValidationMetric::L1),
        _ => Err(format!("unknown validation metric {s:?} (squared-l2, l1)")),
    }
}

macro_rules! set {
    ($target:expr, $value:expr) => {
        if let Some(v) = $value.clone() {
            $target = v;
        }
    };
}

impl Settings {
    /// Loads the config file (or defaults), switches to the full-size
    /// dimensions through `paper_scale` when requested, then applies the
    /// remaining flags.
    pub fn resolve(&self, paper_scale: fn(&mut ExperimentConfig)) -> wl1_core::Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::from_path(path)?,
            None => ExperimentConfig::default(),
        };
        if c.sampling.paper_scale || self.paper_scale {
            paper_scale(&mut c);
            c.sampling.paper_scale = true;
        }
        set!(c.function.id, self.function);
        set!(c.function.d, self.d);
        set!(c.function.k_slope, self.k_slope);
        set!(c.function.perturbation, self.perturbation);
        set!(c.function.cardinality, self.cardinality);
        if self.reference.is_some() {
            c.function.reference = self.reference.clone();
        }
        set!(c.sampling.basis, self.basis);
        set!(c.sampling.s, self.s);
        if self.m.is_some() {
            c.sampling.m = self.m;
        }
        set!(c.sampling.m_factors, self.m_factors);
        if self.m_values.is_some() {
            c.sampling.m_values = self.m_values.clone();
        }
        set!(c.sampling.trials, self.trials);
        set!(c.sampling.seed, self.seed);
        set!(c.sampling.reference_oversampling, self.reference_oversampling);
        set!(c.noise.model, self.noise);
        set!(c.noise.levels, self.levels);
        set!(c.noise.fraction, self.fraction);
        set!(c.noise.amplitude, self.amplitude);
        set!(c.decoders.families, self.decoders);
        for (family, grid) in [
            (DecoderFamily::Wqcbp, &self.grid_wqcbp),
            (DecoderFamily::Wlasso, &self.grid_wlasso),
            (DecoderFamily::WsrLasso, &self.grid_wsr_lasso),
            (DecoderFamily::WladLasso, &self.grid_wlad_lasso),
        ] {
            if let Some(text) = grid {
                c.decoders.grids.set(family, text.clone());
            }
        }
        set!(c.decoders.combinations, self.combinations);
        set!(c.decoders.cv_folds, self.cv_folds);
        set!(c.decoders.cv_repetitions, self.cv_repetitions);
        set!(c.decoders.cv_grid, self.cv_grid);
        set!(c.decoders.cv_metric, self.cv_metric);
        set!(c.decoders.wsr_constant, self.wsr_constant);
        set!(c.decoders.wlad_constant, self.wlad_constant);
        set!(c.decoders.solver.max_iterations, self.max_iterations);
        set!(c.decoders.solver.tolerance, self.tolerance);
        if self.csv.is_some() {
            c.output.csv = self.csv.clone();
        }
        if self.json.is_some() {
            c.output.json = self.json.clone();
        }
        c.output.record_time |= self.record_time;
        Ok(c)
    }
}
