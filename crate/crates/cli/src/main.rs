//! `wl1`: command-line front end over experiment configs.
//!
//! Exit codes: 0 on success, 1 for usage, configuration and I/O errors,
//! 2 for solver and numerical failures.

mod args;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use wl1_core::harness::config::ExperimentConfig;
use wl1_core::harness::sweep::reference_for;
use wl1_core::harness::{run_m_sweep, run_parameter_sweep, single_problem, SweepOutput};
use wl1_core::index::{
    hyperbolic_cross, intrinsic_lower_sparsity, weighted_cardinality, IndexSet, SparsityMode, ENUMERATION_MAX_D,
    ENUMERATION_MAX_S,
};
use wl1_core::metrics::{l2_error, linf_surrogate, tail_q, ReferenceSolution};
use wl1_core::rng::{stream, Purpose};
use wl1_core::solver::{solve, DecoderFamily};
use wl1_core::tuning::{cross_validate, parse_grid, recommend, recommended_m, CvSpec, RecipeInputs};
use wl1_core::{Error, Result};

use args::{Cli, Command, Settings};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wl1: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_)
        | Error::Parse(_)
        | Error::Config(_)
        | Error::Io(_)
        | Error::EnumerationGuard { .. } => 1,
        _ => 2,
    }
}

fn run(command: Command) -> Result<()> {
    let parameter_scale: fn(&mut ExperimentConfig) = ExperimentConfig::apply_paper_scale_parameter_sweep;
    match command {
        Command::Approximate {
            settings,
            decoder,
            param,
            output,
        } => approximate(&settings.resolve(parameter_scale)?, decoder, param, output.as_deref(), &settings),
        Command::SweepParam { settings } => {
            let config = settings.resolve(parameter_scale)?;
            report_sweep(&config, &run_parameter_sweep(&config)?)
        }
        Command::SweepM { settings } => {
            let config = settings.resolve(ExperimentConfig::apply_paper_scale_m_sweep)?;
            report_sweep(&config, &run_m_sweep(&config)?)
        }
        Command::CrossValidate {
            settings,
            decoder,
            grid,
        } => cross_validation(&settings.resolve(parameter_scale)?, decoder, grid.as_deref()),
        Command::Diag { settings, skip_q } => diag(&settings.resolve(parameter_scale)?, skip_q),
        Command::Reference { settings, output } => reference(&settings.resolve(parameter_scale)?, output.as_deref()),
    }
}

fn index_set(config: &ExperimentConfig) -> Result<IndexSet> {
    config.validate()?;
    hyperbolic_cross(config.function.d, config.sampling.s)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    Ok(BufWriter::new(File::create(path)?))
}

fn approximate(
    config: &ExperimentConfig,
    family: DecoderFamily,
    param: Option<f64>,
    output: Option<&Path>,
    settings: &Settings,
) -> Result<()> {
    let set = index_set(config)?;
    let n = set.len();
    let m = config.resolve_m(n);
    let (problem, truth, noise) = single_problem(config, &set, m, 0)?;
    let kind = config.sampling.basis;
    let param = match param {
        Some(p) => p,
        None => {
            let s = config.sampling.s;
            let k = config.noise.models()?[0].corrupted_count(m).unwrap_or(m).max(1);
            let inputs = RecipeInputs::new(s, kind).noise(noise.norm).corruption(k, m, n);
            recommend(family, inputs, &config.decoders.constants())?.value
        }
    };
    let decoder = family.with_parameter(param);
    let solution = solve(&problem, &decoder, &config.decoders.solver)?;
    println!("n = {n}");
    println!("m = {m}");
    println!("decoder = {decoder}");
    println!("noise norm = {:e}", noise.norm);
    println!("iterations = {} (converged: {})", solution.iterations, solution.converged);
    println!("objective = {:e}", solution.objective);
    println!("residual norm = {:e}", solution.residual.norm());

    let reference = match (&truth, settings.reference.is_some() || config.function.reference.is_some()) {
        (Some(t), _) => Some(t.clone()),
        (None, true) => {
            let path = config.function.reference.as_ref().expect("checked above");
            let r = ReferenceSolution::read_text(BufReader::new(File::open(path)?))?;
            if r.index_set != set {
                return Err(Error::Config(format!("reference {} uses a different index set", path.display())));
            }
            Some(r.coefficients)
        }
        (None, false) => None,
    };
    if let Some(reference) = reference {
        let x = solution.x.as_slice();
        println!("l2 error = {:e}", l2_error(x, &reference)?);
        println!("linf surrogate = {:e}", linf_surrogate(x, &reference, problem.weights().as_slice())?);
    }
    if let Some(path) = output {
        let coefficients = ReferenceSolution {
            index_set: set,
            kind,
            coefficients: solution.x.iter().copied().collect(),
            oversampling: 0,
            residual_norm: solution.residual.norm(),
        };
        let mut file = create(path)?;
        coefficients.write_text(&mut file)?;
        file.flush()?;
        println!("coefficients written to {}", path.display());
    }
    Ok(())
}

fn report_sweep(config: &ExperimentConfig, out: &SweepOutput) -> Result<()> {
    out.write_outputs(config)?;
    println!("n = {}, rows = {}", out.n, out.rows.len());
    println!("{:<20} {:>12} {:>6} {:>10} {:>12} {:>12} {:>12} {:>8}", "decoder", "param", "m", "beta", "median", "q1", "q3", "failed");
    for cell in out.summarize() {
        let (median, q1, q3) = cell
            .l2_error
            .as_ref()
            .map_or((f64::NAN, f64::NAN, f64::NAN), |s| (s.median, s.q1, s.q3));
        println!(
            "{:<20} {:>12.4e} {:>6} {:>10.2e} {:>12.4e} {:>12.4e} {:>12.4e} {:>8}",
            cell.decoder, cell.param, cell.m, cell.beta, median, q1, q3, cell.failures
        );
    }
    for (label, path) in [("csv", &config.output.csv), ("json", &config.output.json)] {
        if let Some(path) = path {
            println!("{label} written to {}", path.display());
        }
    }
    Ok(())
}

fn cross_validation(config: &ExperimentConfig, family: DecoderFamily, grid: Option<&str>) -> Result<()> {
    let set = index_set(config)?;
    let m = config.resolve_m(set.len());
    let (problem, _, _) = single_problem(config, &set, m, 0)?;
    let grid = match grid {
        Some(text) => parse_grid(text)?,
        None => config.decoders.grids.grid(family)?,
    };
    let mut spec = CvSpec::new(family, grid, config.decoders.cv_folds, config.decoders.cv_repetitions);
    spec.metric = config.decoders.cv_metric;
    let mut rng = stream(config.sampling.seed, 0, Purpose::CrossValidation);
    let report = cross_validate(&problem, &spec, &config.decoders.solver, &mut rng)?;
    println!("{:>10} {:>6} {:>14} {:>14}", "repetition", "fold", "param", "error");
    for e in &report.entries {
        println!("{:>10} {:>6} {:>14.6e} {:>14.6e}", e.repetition + 1, e.fold + 1, e.parameter, e.error);
    }
    println!("{:>14} {:>14}", "param", "mean error");
    for (p, mean) in spec.grid.iter().zip(&report.mean_errors) {
        println!("{p:>14.6e} {mean:>14.6e}");
    }
    println!("chosen {} = {:e}", family, report.chosen);
    Ok(())
}

fn diag(config: &ExperimentConfig, skip_q: bool) -> Result<()> {
    let set = index_set(config)?;
    let kind = config.sampling.basis;
    let (s, d, n) = (config.sampling.s, config.function.d, set.len());
    println!("basis = {kind}, d = {d}, s = {s}");
    println!("n = {n}");
    println!("weighted cardinality = {}", weighted_cardinality(set.iter(), kind));
    println!("K(s) surrogate = {:.6}", intrinsic_lower_sparsity(kind, s, d, SparsityMode::Surrogate)?);
    if s <= ENUMERATION_MAX_S && d <= ENUMERATION_MAX_D {
        println!("K(s) exact = {}", intrinsic_lower_sparsity(kind, s, d, SparsityMode::Enumerate)?);
    } else {
        println!("K(s) exact = not enumerated (needs s <= {ENUMERATION_MAX_S}, d <= {ENUMERATION_MAX_D})");
    }
    println!("recommended m = {}", recommended_m(s, kind, n));
    let m = config.resolve_m(n);
    if skip_q {
        println!("Q = skipped");
    } else if m > n {
        println!("Q = undefined for m = {m} > n = {n}");
    } else {
        let (problem, _, _) = single_problem(config, &set, m, 0)?;
        let q = tail_q(&problem)?;
        if q.rank_deficient {
            println!("Q = inf (rank deficient, m = {m})");
        } else {
            println!("Q = {:.6} (m = {m}, sigma_m = {:.6})", q.value, q.sigma_m);
        }
    }
    Ok(())
}

fn reference(config: &ExperimentConfig, output: Option<&Path>) -> Result<()> {
    let path = output
        .or(config.function.reference.as_deref())
        .ok_or_else(|| Error::InvalidArgument("reference needs --output or function.reference".into()))?;
    let set = index_set(config)?;
    // fit afresh even if the file already exists
    let mut fresh = config.clone();
    fresh.function.reference = None;
    let reference = reference_for(&fresh, &set)?;
    let mut file = create(path)?;
    reference.write_text(&mut file)?;
    file.flush()?;
    println!("n = {}, samples = {}", set.len(), set.len() * reference.oversampling);
    println!("residual norm = {:e}", reference.residual_norm);
    println!("reference written to {}", path.display());
    Ok(())
}
