//! Experiment drivers.
//!
//! Trial `t` draws its samples, noise, truth and cross-validation folds from
//! independent streams derived from `(seed, t)`, so trials run in parallel
//! and the result table is still assembled in trial order. Within a trial the
//! noise stream is restarted for every noise level, so all levels share the
//! same noise direction and differ only in scale.

use std::collections::HashMap;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use nalgebra::DVector;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, FunctionId};
use super::noise::{draw_noise, NoiseModel};
use super::stats::{box_stats, BoxStats};
use crate::basis::{assemble, eval_basis, sample_measure, DesignProblem, SamplePoint};
use crate::error::{Error, Result};
use crate::index::{hyperbolic_cross, random_lower_set, IndexSet};
use crate::metrics::{l2_error, least_squares_reference, linf_surrogate, ReferenceSolution};
use crate::rng::{stream, Purpose};
use crate::solver::{solve, Decoder, DecoderFamily, DecoderSolution, SolverOptions};
use crate::tuning::{cross_validate, parse_grid, recommend, sqrt_k_surrogate, CvSpec, RecipeInputs};

/// One solve inside one trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial: usize,
    pub decoder: String,
    pub param: f64,
    pub m: usize,
    /// Noise level: `beta` for bounded noise, the amplitude for sparse
    /// corruption, 0 without noise.
    pub beta: f64,
    pub l2_error: f64,
    pub linf_surrogate: f64,
    pub iterations: usize,
    pub seconds: f64,
    /// Why the cell failed; the error columns are NaN then.
    #[serde(skip)]
    pub failure: Option<String>,
}

/// The error vector realised in one trial at one noise level.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseRecord {
    pub trial: usize,
    pub m: usize,
    pub beta: f64,
    pub noise: Vec<f64>,
    pub norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub decoder: String,
    pub param: f64,
    pub m: usize,
    pub beta: f64,
    pub failures: usize,
    /// Statistics of the l2 error over successful trials.
    pub l2_error: Option<BoxStats>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    /// `|Lambda|`.
    pub n: usize,
    pub rows: Vec<TrialResult>,
    pub noise: Vec<NoiseRecord>,
}

impl SweepOutput {
    /// One summary per `(decoder, param, m, beta)` cell, in order of first
    /// appearance.
    pub fn summarize(&self) -> Vec<CellSummary> {
        let mut order: Vec<(String, u64, usize, u64)> = Vec::new();
        let mut groups: HashMap<(String, u64, usize, u64), Vec<&TrialResult>> = HashMap::new();
        for row in &self.rows {
            let key = (row.decoder.clone(), row.param.to_bits(), row.m, row.beta.to_bits());
            groups
                .entry(key.clone())
                .or_insert_with(|| {
                    order.push(key);
                    Vec::new()
                })
                .push(row);
        }
        order
            .into_iter()
            .map(|key| {
                let rows = &groups[&key];
                let errors: Vec<f64> = rows.iter().filter(|r| r.failure.is_none()).map(|r| r.l2_error).collect();
                CellSummary {
                    decoder: key.0.clone(),
                    param: rows[0].param,
                    m: key.2,
                    beta: rows[0].beta,
                    failures: rows.len() - errors.len(),
                    l2_error: box_stats(&errors),
                }
            })
            .collect()
    }

    /// CSV with header `trial,decoder,param,m,beta,l2_error,linf_surrogate,iterations,seconds`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        for row in &self.rows {
            writer.serialize(row).map_err(csv_error)?;
        }
        writer.flush()?;
        Ok(())
    }

    /// JSON summary: `n`, row count and per-cell box statistics.
    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        #[derive(Serialize)]
        struct Summary<'a> {
            n: usize,
            rows: usize,
            failures: usize,
            cells: &'a [CellSummary],
        }
        let cells = self.summarize();
        let summary = Summary {
            n: self.n,
            rows: self.rows.len(),
            failures: self.rows.iter().filter(|r| r.failure.is_some()).count(),
            cells: &cells,
        };
        serde_json::to_writer_pretty(out, &summary).map_err(|e| Error::Io(e.into()))
    }

    /// Writes the CSV and JSON files named in the configuration, if any.
    pub fn write_outputs(&self, config: &ExperimentConfig) -> Result<()> {
        if let Some(path) = &config.output.csv {
            self.write_csv(create(path)?)?;
        }
        if let Some(path) = &config.output.json {
            let mut file = create(path)?;
            self.write_json(&mut file)?;
            writeln!(file)?;
        }
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::Parse(format!("csv: {other:?}")),
    }
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    Ok(std::io::BufWriter::new(std::fs::File::create(path)?))
}

/// What the decoded coefficients are compared against.
enum Target {
    /// A fixed function with a least-squares reference on `Lambda`.
    Function {
        function: super::functions::TestFunction,
        reference: ReferenceSolution,
    },
    /// A random lower-set polynomial drawn per trial.
    SparseLower { cardinality: usize },
}

/// Loads the stored reference named in the configuration or fits a new one.
pub fn reference_for(config: &ExperimentConfig, index_set: &IndexSet) -> Result<ReferenceSolution> {
    let function = config
        .test_function()
        .ok_or_else(|| Error::Config("sparse-lower targets need no reference".into()))?;
    if let Some(path) = &config.function.reference {
        if path.exists() {
            let file = std::fs::File::open(path)?;
            let reference = ReferenceSolution::read_text(std::io::BufReader::new(file))?;
            if reference.index_set != *index_set || reference.kind != config.sampling.basis {
                return Err(Error::Config(format!(
                    "stored reference {} does not match the configured index set and basis",
                    path.display()
                )));
            }
            return Ok(reference);
        }
    }
    let mut rng = stream(config.sampling.seed, 0, Purpose::Reference);
    least_squares_reference(
        |t: &SamplePoint| function.evaluate(t).unwrap_or(f64::NAN),
        index_set,
        config.sampling.basis,
        config.sampling.reference_oversampling,
        &mut rng,
    )
}

impl Target {
    fn build(config: &ExperimentConfig, index_set: &IndexSet) -> Result<Target> {
        Ok(match config.function.id {
            FunctionId::SparseLower => Target::SparseLower {
                cardinality: config.function.cardinality,
            },
            _ => Target::Function {
                function: config.test_function().expect("function id has an evaluator"),
                reference: reference_for(config, index_set)?,
            },
        })
    }

    /// Sample values at `points` and the reference coefficients for trial `t`.
    fn trial_data(
        &self,
        config: &ExperimentConfig,
        index_set: &IndexSet,
        points: &[SamplePoint],
        trial: usize,
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        match self {
            Target::Function { function, reference } => {
                let values = points.iter().map(|t| function.evaluate(t)).collect::<Result<Vec<f64>>>()?;
                Ok((values, reference.coefficients.clone()))
            }
            Target::SparseLower { cardinality } => {
                let mut rng = stream(config.sampling.seed, trial as u64, Purpose::Truth);
                let support = random_lower_set(index_set.dim(), *cardinality, &mut rng)?;
                let mut coefficients = vec![0.0; index_set.len()];
                for index in &support {
                    let j = index_set.position(index).ok_or_else(|| {
                        Error::InvalidArgument(format!("lower-set index {index} lies outside the index set"))
                    })?;
                    coefficients[j] = StandardNormal.sample(&mut rng);
                }
                let values = points
                    .iter()
                    .map(|t| {
                        support.iter().try_fold(0.0, |acc, index| {
                            let j = index_set.position(index).expect("checked above");
                            Ok(acc + coefficients[j] * eval_basis(config.sampling.basis, index, t)?)
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                Ok((values, coefficients))
            }
        }
    }
}

/// Noise vector added to the scaled data `y = f / sqrt(m)`. Bounded noise
/// has norm `beta` in that scaling; sparse corruptions hit the raw samples
/// `f(t_i)` and are scaled with them.
fn trial_noise(config: &ExperimentConfig, trial: usize, m: usize, model: &NoiseModel) -> Result<DVector<f64>> {
    let mut rng = stream(config.sampling.seed, trial as u64, Purpose::Noise);
    let e = draw_noise(m, model, &mut rng)?;
    Ok(match model {
        NoiseModel::SparseCorruption { .. } => e / (m as f64).sqrt(),
        _ => e,
    })
}

/// One noisy problem as used by trial `trial` of a sweep: `m` samples of the
/// configured target, corrupted by the first configured noise level. Also
/// returns the exact coefficients for `sparse-lower` targets and the
/// realised noise.
pub fn single_problem(
    config: &ExperimentConfig,
    index_set: &IndexSet,
    m: usize,
    trial: usize,
) -> Result<(DesignProblem, Option<Vec<f64>>, NoiseRecord)> {
    config.validate()?;
    let kind = config.sampling.basis;
    let mut rng = stream(config.sampling.seed, trial as u64, Purpose::Samples);
    let points = sample_measure(kind, config.function.d, m, &mut rng)?;
    let (values, truth) = match config.test_function() {
        Some(function) => (
            points.iter().map(|t| function.evaluate(t)).collect::<Result<Vec<f64>>>()?,
            None,
        ),
        None => {
            let target = Target::SparseLower {
                cardinality: config.function.cardinality,
            };
            let (values, truth) = target.trial_data(config, index_set, &points, trial)?;
            (values, Some(truth))
        }
    };
    let clean = assemble(kind, index_set, points, &values)?;
    let model = config.noise.models()?[0];
    let e = trial_noise(config, trial, m, &model)?;
    let record = noise_record(trial, m, &model, &e);
    Ok((clean.with_data(clean.y() + &e)?, truth, record))
}

struct Evaluated {
    l2_error: f64,
    linf_surrogate: f64,
    iterations: usize,
    seconds: f64,
    failure: Option<String>,
}

fn evaluate(problem: &DesignProblem, decoder: Result<Decoder>, reference: &[f64], opts: &SolverOptions) -> Evaluated {
    let start = Instant::now();
    let outcome = decoder.and_then(|d| solve(problem, &d, opts)).and_then(|sol: DecoderSolution| {
        let x = sol.x.as_slice();
        Ok((
            l2_error(x, reference)?,
            linf_surrogate(x, reference, problem.weights().as_slice())?,
            sol.iterations,
        ))
    });
    let seconds = start.elapsed().as_secs_f64();
    match outcome {
        Ok((l2, linf, iterations)) => Evaluated {
            l2_error: l2,
            linf_surrogate: linf,
            iterations,
            seconds,
            failure: None,
        },
        Err(e) => Evaluated {
            l2_error: f64::NAN,
            linf_surrogate: f64::NAN,
            iterations: 0,
            seconds,
            failure: Some(e.to_string()),
        },
    }
}

fn row(trial: usize, decoder: String, param: f64, m: usize, beta: f64, e: Evaluated, record_time: bool) -> TrialResult {
    TrialResult {
        trial,
        decoder,
        param,
        m,
        beta,
        l2_error: e.l2_error,
        linf_surrogate: e.linf_surrogate,
        iterations: e.iterations,
        seconds: if record_time { e.seconds } else { 0.0 },
        failure: e.failure,
    }
}

struct TrialOutput {
    rows: Vec<TrialResult>,
    noise: Vec<NoiseRecord>,
}

fn collect(n: usize, trials: Vec<Result<TrialOutput>>) -> Result<SweepOutput> {
    let mut out = SweepOutput {
        n,
        rows: Vec::new(),
        noise: Vec::new(),
    };
    for trial in trials {
        let trial = trial?;
        out.rows.extend(trial.rows);
        out.noise.extend(trial.noise);
    }
    Ok(out)
}

fn noise_record(trial: usize, m: usize, model: &NoiseModel, e: &DVector<f64>) -> NoiseRecord {
    NoiseRecord {
        trial,
        m,
        beta: model.level(),
        noise: e.iter().copied().collect(),
        norm: e.norm(),
    }
}

/// Error versus tuning parameter: in every trial one set of samples is
/// drawn, corrupted at each noise level and decoded at every grid value of
/// every configured decoder.
pub fn run_parameter_sweep(config: &ExperimentConfig) -> Result<SweepOutput> {
    config.validate()?;
    let index_set = hyperbolic_cross(config.function.d, config.sampling.s)?;
    let n = index_set.len();
    let m = config.resolve_m(n);
    let models = config.noise.models()?;
    let grids: Vec<(DecoderFamily, Vec<f64>)> = config
        .decoders
        .families
        .iter()
        .map(|&f| Ok((f, config.decoders.grids.grid(f)?)))
        .collect::<Result<_>>()?;
    let target = Target::build(config, &index_set)?;
    let kind = config.sampling.basis;
    let opts = &config.decoders.solver;
    let record_time = config.output.record_time;

    let trials: Vec<Result<TrialOutput>> = (0..config.sampling.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(config.sampling.seed, t as u64, Purpose::Samples);
            let points = sample_measure(kind, config.function.d, m, &mut rng)?;
            let (values, reference) = target.trial_data(config, &index_set, &points, t)?;
            // one design problem per trial, shared by every level and parameter
            let clean = assemble(kind, &index_set, points, &values)?;
            clean.operator_norm();
            let mut rows = Vec::new();
            let mut noise = Vec::new();
            for model in &models {
                let e = trial_noise(config, t, m, model)?;
                let problem = clean.with_data(clean.y() + &e)?;
                noise.push(noise_record(t, m, model, &e));
                for (family, grid) in &grids {
                    for &p in grid {
                        let eval = evaluate(&problem, Ok(family.with_parameter(p)), &reference, opts);
                        rows.push(row(t, family.name().to_string(), p, m, model.level(), eval, record_time));
                    }
                }
            }
            Ok(TrialOutput { rows, noise })
        })
        .collect();
    collect(n, trials)
}

/// Labels of the decoder/parameter combinations of the sample-complexity
/// sweep, numbered from 1.
pub const COMBINATIONS: [&str; 10] = [
    "wbp",
    "wqcbp-oracle",
    "wqcbp-cv",
    "wlasso-oracle",
    "wlasso-cv",
    "wsr-lasso-theory",
    "wsr-lasso-cv",
    "wlad-lasso-theory",
    "wlad-lasso-cv",
    "wlad-lasso-one",
];

/// Parameter of combination `id`, or the cross-validation centre and family
/// for the cross-validated ones.
enum Choice {
    Fixed(DecoderFamily, f64),
    CrossValidated(DecoderFamily, f64),
}

struct ComboContext {
    eta_oracle: f64,
    sqrt_k: f64,
    wsr_lambda: f64,
    wlad_lambda: f64,
}

fn choose(id: usize, ctx: &ComboContext) -> Result<Choice> {
    let oracle_lambda = || {
        if ctx.eta_oracle > 0.0 {
            Ok(ctx.sqrt_k / ctx.eta_oracle)
        } else {
            Err(Error::InvalidArgument("oracle noise estimate is zero".into()))
        }
    };
    Ok(match id {
        1 => Choice::Fixed(DecoderFamily::Wqcbp, 0.0),
        2 => Choice::Fixed(DecoderFamily::Wqcbp, ctx.eta_oracle),
        3 => Choice::CrossValidated(DecoderFamily::Wqcbp, ctx.eta_oracle),
        4 => Choice::Fixed(DecoderFamily::Wlasso, oracle_lambda()?),
        5 => Choice::CrossValidated(DecoderFamily::Wlasso, oracle_lambda()?),
        6 => Choice::Fixed(DecoderFamily::WsrLasso, ctx.wsr_lambda),
        7 => Choice::CrossValidated(DecoderFamily::WsrLasso, ctx.wsr_lambda),
        8 => Choice::Fixed(DecoderFamily::WladLasso, ctx.wlad_lambda),
        9 => Choice::CrossValidated(DecoderFamily::WladLasso, ctx.wlad_lambda),
        10 => Choice::Fixed(DecoderFamily::WladLasso, 1.0),
        _ => return Err(Error::Config(format!("unknown combination {id}"))),
    })
}

/// Error versus sample count for the ten decoder/parameter combinations.
///
/// Samples are nested across `m`: trial `t` always draws from the same
/// stream, so a larger `m` extends the smaller sample sets.
pub fn run_m_sweep(config: &ExperimentConfig) -> Result<SweepOutput> {
    config.validate()?;
    let index_set = hyperbolic_cross(config.function.d, config.sampling.s)?;
    let n = index_set.len();
    let ms = config.m_grid();
    let models = config.noise.models()?;
    let target = Target::build(config, &index_set)?;
    let kind = config.sampling.basis;
    let s = config.sampling.s;
    let dec = &config.decoders;
    let opts = &dec.solver;
    let multipliers = parse_grid(&dec.cv_grid)?;
    let record_time = config.output.record_time;
    let constants = dec.constants();
    let sqrt_k = sqrt_k_surrogate(s, kind);
    let wsr_lambda = recommend(DecoderFamily::WsrLasso, RecipeInputs::new(s, kind), &constants)?.value;
    let max_m = *ms.iter().max().expect("validated non-empty");

    let trials: Vec<Result<TrialOutput>> = (0..config.sampling.trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream(config.sampling.seed, t as u64, Purpose::Samples);
            let all_points = sample_measure(kind, config.function.d, max_m, &mut rng)?;
            let (all_values, reference) = target.trial_data(config, &index_set, &all_points, t)?;
            let x_ref = DVector::from_column_slice(&reference);
            let mut rows = Vec::new();
            let mut noise = Vec::new();
            for &m in &ms {
                let clean = assemble(kind, &index_set, all_points[..m].to_vec(), &all_values[..m])?;
                clean.operator_norm();
                for model in &models {
                    let e = trial_noise(config, t, m, model)?;
                    let problem = clean.with_data(clean.y() + &e)?;
                    noise.push(noise_record(t, m, model, &e));
                    let k = model.corrupted_count(m).unwrap_or(m).max(1);
                    let ctx = ComboContext {
                        eta_oracle: (problem.matrix() * &x_ref - problem.y()).norm(),
                        sqrt_k,
                        wsr_lambda,
                        wlad_lambda: recommend(
                            DecoderFamily::WladLasso,
                            RecipeInputs::new(s, kind).corruption(k, m, n),
                            &constants,
                        )?
                        .value,
                    };
                    for &id in &dec.combinations {
                        let label = COMBINATIONS[id - 1].to_string();
                        let (param, eval) = match choose(id, &ctx) {
                            Ok(Choice::Fixed(family, p)) => {
                                (p, evaluate(&problem, Ok(family.with_parameter(p)), &reference, opts))
                            }
                            Ok(Choice::CrossValidated(family, centre)) => {
                                let mut spec = CvSpec::new(
                                    family,
                                    multipliers.iter().map(|c| c * centre).collect(),
                                    dec.cv_folds,
                                    dec.cv_repetitions,
                                );
                                spec.metric = dec.cv_metric;
                                let mut cv_rng = stream(config.sampling.seed, t as u64, Purpose::CrossValidation);
                                match cross_validate(&problem, &spec, opts, &mut cv_rng) {
                                    Ok(report) => (
                                        report.chosen,
                                        evaluate(&problem, Ok(family.with_parameter(report.chosen)), &reference, opts),
                                    ),
                                    Err(e) => (f64::NAN, evaluate(&problem, Err(e), &reference, opts)),
                                }
                            }
                            Err(e) => (f64::NAN, evaluate(&problem, Err(e), &reference, opts)),
                        };
                        rows.push(row(t, label, param, m, model.level(), eval, record_time));
                    }
                }
            }
            Ok(TrialOutput { rows, noise })
        })
        .collect();
    collect(n, trials)
}
