//! Tuning-parameter recipes and K-fold cross validation.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::DesignProblem;
use crate::error::{Error, Result};
use crate::index::BasisKind;
use crate::solver::{solve_system, DecoderFamily, SolverOptions};

/// Which WLAD-LASSO recipe to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WladForm {
    /// `lambda = c / sqrt((k / m) ln n)`.
    #[default]
    Theory,
    /// `lambda = 1`.
    Practical,
}

/// Hidden constants of the recipes. Both default to 3.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RecipeConstants {
    pub wsr_lasso: f64,
    pub wlad_lasso: f64,
    pub wlad_form: WladForm,
}

impl Default for RecipeConstants {
    fn default() -> Self {
        RecipeConstants {
            wsr_lasso: 3.0,
            wlad_lasso: 3.0,
            wlad_form: WladForm::Theory,
        }
    }
}

/// What a recipe may depend on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecipeInputs {
    pub s: usize,
    pub kind: BasisKind,
    /// Estimate of `||e||_2`.
    pub noise_estimate: Option<f64>,
    /// Number of corrupted samples `k`.
    pub corrupted: Option<usize>,
    pub m: Option<usize>,
    pub n: Option<usize>,
}

impl RecipeInputs {
    pub fn new(s: usize, kind: BasisKind) -> Self {
        RecipeInputs {
            s,
            kind,
            noise_estimate: None,
            corrupted: None,
            m: None,
            n: None,
        }
    }

    pub fn noise(mut self, estimate: f64) -> Self {
        self.noise_estimate = Some(estimate);
        self
    }

    pub fn corruption(mut self, k: usize, m: usize, n: usize) -> Self {
        self.corrupted = Some(k);
        self.m = Some(m);
        self.n = Some(n);
        self
    }
}

/// A tuning parameter together with the inputs it was derived from.
#[derive(Debug, Clone, PartialEq)]
pub struct TuningRecipe {
    pub family: DecoderFamily,
    pub inputs: RecipeInputs,
    pub value: f64,
}

impl TuningRecipe {
    pub fn decoder(&self) -> crate::solver::Decoder {
        self.family.with_parameter(self.value)
    }
}

/// `sqrt(s^gamma)`, the surrogate for `sqrt(K(s))` used by every recipe.
pub fn sqrt_k_surrogate(s: usize, kind: BasisKind) -> f64 {
    (s as f64).powf(kind.gamma() / 2.0)
}

/// Theory-driven parameter for `family`:
///
/// | decoder    | parameter                         |
/// |------------|-----------------------------------|
/// | WQCBP      | `eta = ||e||_2`                   |
/// | WLASSO     | `lambda = sqrt(s^gamma) / ||e||_2`|
/// | WSR-LASSO  | `lambda = c sqrt(s^gamma)`        |
/// | WLAD-LASSO | `lambda = c / sqrt((k/m) ln n)` or `1` |
pub fn recommend(family: DecoderFamily, inputs: RecipeInputs, constants: &RecipeConstants) -> Result<TuningRecipe> {
    if inputs.s == 0 {
        return Err(Error::InvalidArgument("recipes need s >= 1".into()));
    }
    let need_noise = || {
        inputs.noise_estimate.ok_or_else(|| {
            Error::InvalidArgument(format!("{family} recipe needs a noise estimate"))
        })
    };
    let value = match family {
        DecoderFamily::Wqcbp => {
            let e = need_noise()?;
            if !(e.is_finite() && e >= 0.0) {
                return Err(Error::InvalidArgument(format!("noise estimate must be >= 0 (got {e})")));
            }
            e
        }
        DecoderFamily::Wlasso => {
            let e = need_noise()?;
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "WLASSO recipe divides by the noise estimate (got {e})"
                )));
            }
            sqrt_k_surrogate(inputs.s, inputs.kind) / e
        }
        DecoderFamily::WsrLasso => constants.wsr_lasso * sqrt_k_surrogate(inputs.s, inputs.kind),
        DecoderFamily::WladLasso => match constants.wlad_form {
            WladForm::Practical => 1.0,
            WladForm::Theory => {
                let (k, m, n) = match (inputs.corrupted, inputs.m, inputs.n) {
                    (Some(k), Some(m), Some(n)) => (k, m, n),
                    _ => {
                        return Err(Error::InvalidArgument(
                            "WLAD-LASSO theory recipe needs k, m and n".into(),
                        ))
                    }
                };
                if k == 0 || m == 0 || n < 2 {
                    return Err(Error::InvalidArgument(format!(
                        "WLAD-LASSO recipe needs k >= 1, m >= 1, n >= 2 (got k = {k}, m = {m}, n = {n})"
                    )));
                }
                constants.wlad_lasso / ((k as f64 / m as f64) * (n as f64).ln()).sqrt()
            }
        },
    };
    Ok(TuningRecipe {
        family,
        inputs,
        value,
    })
}

/// `ceil(s^gamma ln n)`.
pub fn recommended_m(s: usize, kind: BasisKind, n: usize) -> usize {
    ((s as f64).powf(kind.gamma()) * (n as f64).ln()).ceil() as usize
}

/// `sqrt(K + lambda^2 H) / min(sqrt(K), lambda sqrt(H))`.
pub fn theta(k_s: f64, lambda: f64, h: f64) -> f64 {
    (k_s + lambda * lambda * h).sqrt() / k_s.sqrt().min(lambda * h.sqrt())
}

/// Minimiser of [`theta`] in `lambda`: `sqrt(K / H)`.
pub fn theta_minimizer(k_s: f64, h: f64) -> f64 {
    (k_s / h).sqrt()
}

/// `ln^2(s) min{ln(s) + d, ln(2d) ln(s)} + ln(s) ln(s / eps)`.
pub fn polylog_l(s: usize, d: usize, epsilon: f64) -> f64 {
    let ls = (s as f64).ln();
    let d = d as f64;
    ls * ls * (ls + d).min((2.0 * d).ln() * ls) + ls * (s as f64 / epsilon).ln()
}

/// Parses `"a:step:b"` into `10^a, 10^(a+step), ..., 10^b`, or a
/// comma-separated list of plain values.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let text = text.trim();
    let bad = |what: &str| Error::Parse(format!("bad parameter grid {text:?}: {what}"));
    if text.contains(':') {
        let parts: Vec<f64> = text
            .split(':')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad("non-numeric bound")))
            .collect::<Result<_>>()?;
        let [start, step, end] = parts[..] else {
            return Err(bad("expected start:step:end"));
        };
        if !(step > 0.0) || end < start {
            return Err(bad("need step > 0 and end >= start"));
        }
        let count = ((end - start) / step + 1e-9).floor() as usize + 1;
        Ok((0..count)
            .map(|k| 10f64.powf(start + k as f64 * step))
            .collect())
    } else {
        let values: Vec<f64> = text
            .split(',')
            .map(|p| p.trim().parse::<f64>().map_err(|_| bad("non-numeric value")))
            .collect::<Result<_>>()?;
        if values.is_empty() {
            return Err(bad("empty"));
        }
        Ok(values)
    }
}

/// Validation error per fold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ValidationMetric {
    /// `||A_v x - y_v||_2^2`.
    #[default]
    SquaredL2,
    /// `||A_v x - y_v||_1`, better suited to sparse corruptions.
    L1,
}

impl ValidationMetric {
    /// The metric of `sqrt(weight) * residual`.
    fn eval(self, residual: &DVector<f64>, weight: f64) -> f64 {
        match self {
            ValidationMetric::SquaredL2 => weight * residual.norm_squared(),
            ValidationMetric::L1 => weight.sqrt() * residual.iter().map(|r| r.abs()).sum::<f64>(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvSpec {
    /// Number of folds `G >= 2`.
    pub folds: usize,
    /// Number of repetitions `T >= 1`.
    pub repetitions: usize,
    pub grid: Vec<f64>,
    pub family: DecoderFamily,
    pub metric: ValidationMetric,
}

impl CvSpec {
    pub fn new(family: DecoderFamily, grid: Vec<f64>, folds: usize, repetitions: usize) -> Self {
        CvSpec {
            folds,
            repetitions,
            grid,
            family,
            metric: ValidationMetric::SquaredL2,
        }
    }

    fn validate(&self, m: usize) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::InvalidArgument("cross validation needs a non-empty grid".into()));
        }
        if self.folds < 2 || self.repetitions == 0 {
            return Err(Error::InvalidArgument(format!(
                "cross validation needs G >= 2 and T >= 1 (got G = {}, T = {})",
                self.folds, self.repetitions
            )));
        }
        if self.folds > m {
            return Err(Error::InvalidArgument(format!(
                "more folds than samples (G = {}, m = {m})",
                self.folds
            )));
        }
        Ok(())
    }
}

/// One `epsilon(t, g, p)` value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CvEntry {
    pub repetition: usize,
    pub fold: usize,
    pub parameter_index: usize,
    pub parameter: f64,
    /// `+inf` when the decoder failed on this training set.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub chosen: f64,
    pub chosen_index: usize,
    /// Mean of `epsilon(t, g, p)` over `(t, g)`, per grid entry.
    pub mean_errors: Vec<f64>,
    /// All `epsilon(t, g, p)` in `(t, g, p)` order.
    pub entries: Vec<CvEntry>,
    pub partitions: Vec<Vec<Vec<usize>>>,
}

/// Random partition of `0..m` into `folds` sets of size `floor(m/G)` or
/// `floor(m/G) + 1`.
pub fn random_partition<R: Rng + ?Sized>(m: usize, folds: usize, rng: &mut R) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    let base = m / folds;
    let extra = m % folds;
    let mut out = Vec::with_capacity(folds);
    let mut start = 0;
    for g in 0..folds {
        let size = base + usize::from(g < extra);
        let mut fold = order[start..start + size].to_vec();
        fold.sort_unstable();
        out.push(fold);
        start += size;
    }
    out
}

/// Training and validation systems for one held-out fold. Both are
/// rescaled by `sqrt(m / rows)` so that they keep the `1/sqrt(rows)`
/// normalisation; the validation rows are stored unscaled together with the
/// squared factor `valid_weight`, which is applied when the error is taken.
pub struct FoldSplit {
    pub train_matrix: DMatrix<f64>,
    pub train_data: DVector<f64>,
    pub valid_matrix: DMatrix<f64>,
    pub valid_data: DVector<f64>,
    pub valid_weight: f64,
}

impl FoldSplit {
    pub fn validation_error(&self, x: &DVector<f64>, metric: ValidationMetric) -> f64 {
        metric.eval(&(&self.valid_matrix * x - &self.valid_data), self.valid_weight)
    }
}

pub fn split_fold(a: &DMatrix<f64>, y: &DVector<f64>, held_out: &[usize]) -> FoldSplit {
    let m = a.nrows();
    let mut is_valid = vec![false; m];
    for &i in held_out {
        is_valid[i] = true;
    }
    let valid_rows: Vec<usize> = (0..m).filter(|&i| is_valid[i]).collect();
    let train_rows: Vec<usize> = (0..m).filter(|&i| !is_valid[i]).collect();
    let train_scale = (m as f64 / train_rows.len() as f64).sqrt();
    let take = |rows: &[usize], scale: f64| {
        let mat = DMatrix::from_fn(rows.len(), a.ncols(), |r, j| scale * a[(rows[r], j)]);
        let vec = DVector::from_fn(rows.len(), |r, _| scale * y[rows[r]]);
        (mat, vec)
    };
    let (train_matrix, train_data) = take(&train_rows, train_scale);
    let (valid_matrix, valid_data) = take(&valid_rows, 1.0);
    FoldSplit {
        train_matrix,
        train_data,
        valid_matrix,
        valid_data,
        valid_weight: m as f64 / valid_rows.len() as f64,
    }
}

/// Cross validation over explicit partitions with a caller-supplied decoder
/// `decode(A_r, y_r, u, p)`. Cells whose decoder call fails score `+inf`.
pub fn cross_validate_with<D>(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    u: &DVector<f64>,
    spec: &CvSpec,
    partitions: Vec<Vec<Vec<usize>>>,
    decode: D,
) -> Result<CvReport>
where
    D: Fn(&DMatrix<f64>, &DVector<f64>, &DVector<f64>, f64) -> Result<DVector<f64>> + Sync,
{
    spec.validate(a.nrows())?;
    let splits: Vec<(usize, usize, FoldSplit)> = partitions
        .iter()
        .enumerate()
        .flat_map(|(t, folds)| {
            folds
                .iter()
                .enumerate()
                .map(move |(g, fold)| (t, g, split_fold(a, y, fold)))
        })
        .collect();
    let tasks: Vec<(usize, usize)> = (0..splits.len())
        .flat_map(|s| (0..spec.grid.len()).map(move |p| (s, p)))
        .collect();
    let entries: Vec<CvEntry> = tasks
        .par_iter()
        .map(|&(s, p)| {
            let (t, g, split) = &splits[s];
            let parameter = spec.grid[p];
            let error = match decode(&split.train_matrix, &split.train_data, u, parameter) {
                Ok(x) => split.validation_error(&x, spec.metric),
                Err(_) => f64::INFINITY,
            };
            CvEntry {
                repetition: *t,
                fold: *g,
                parameter_index: p,
                parameter,
                error,
            }
        })
        .collect();

    let cells = splits.len() as f64;
    let mut mean_errors = vec![0.0; spec.grid.len()];
    for e in &entries {
        mean_errors[e.parameter_index] += e.error;
    }
    for v in &mut mean_errors {
        *v /= cells;
    }
    // first minimiser wins ties
    let mut chosen_index = 0;
    for (p, &v) in mean_errors.iter().enumerate() {
        if v < mean_errors[chosen_index] {
            chosen_index = p;
        }
    }
    Ok(CvReport {
        chosen: spec.grid[chosen_index],
        chosen_index,
        mean_errors,
        entries,
        partitions,
    })
}

/// K-fold cross validation of `spec.family` over `spec.grid` on `problem`.
pub fn cross_validate<R: Rng + ?Sized>(
    problem: &DesignProblem,
    spec: &CvSpec,
    opts: &SolverOptions,
    rng: &mut R,
) -> Result<CvReport> {
    let m = problem.m();
    spec.validate(m)?;
    let partitions: Vec<Vec<Vec<usize>>> = (0..spec.repetitions)
        .map(|_| random_partition(m, spec.folds, rng))
        .collect();
    cross_validate_with(
        problem.matrix(),
        problem.y(),
        problem.weights(),
        spec,
        partitions,
        |a, y, u, p| Ok(solve_system(a, y, u, &spec.family.with_parameter(p), opts)?.x),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn sample_complexity_anchors() {
        assert_eq!(recommended_m(10, BasisKind::Legendre, 1432), 727);
        assert_eq!(recommended_m(10, BasisKind::Chebyshev, 1432), 280);
        let n = 7; // ln 7 = 1.9459...
        assert_eq!(recommended_m(1, BasisKind::Legendre, n), 2);
        assert_eq!(recommended_m(1, BasisKind::Chebyshev, n), 2);
    }

    #[test]
    fn recipe_values() {
        let c = RecipeConstants::default();
        let r = recommend(DecoderFamily::Wqcbp, RecipeInputs::new(10, BasisKind::Legendre).noise(0.01), &c).unwrap();
        assert_eq!(r.value, 0.01);
        let r = recommend(DecoderFamily::WsrLasso, RecipeInputs::new(10, BasisKind::Legendre), &c).unwrap();
        assert!((r.value - 30.0).abs() < 1e-12);
        let practical = RecipeConstants {
            wlad_form: WladForm::Practical,
            ..c
        };
        let r = recommend(DecoderFamily::WladLasso, RecipeInputs::new(10, BasisKind::Legendre), &practical).unwrap();
        assert_eq!(r.value, 1.0);
        // dense noise (k = m) reduces to 3 / sqrt(ln n)
        let r = recommend(
            DecoderFamily::WladLasso,
            RecipeInputs::new(10, BasisKind::Legendre).corruption(727, 727, 1432),
            &c,
        )
        .unwrap();
        assert!((r.value - 3.0 / 1432f64.ln().sqrt()).abs() < 1e-12);
        assert!((r.value - 1.1129).abs() < 1e-4);
        let r = recommend(DecoderFamily::Wlasso, RecipeInputs::new(4, BasisKind::Legendre).noise(0.5), &c).unwrap();
        assert!((r.value - 8.0).abs() < 1e-12);
        let r = recommend(DecoderFamily::WsrLasso, RecipeInputs::new(4, BasisKind::Chebyshev), &c).unwrap();
        assert!((r.value - 9.0).abs() < 1e-12);
    }

    #[test]
    fn recipe_errors() {
        let c = RecipeConstants::default();
        assert!(recommend(DecoderFamily::Wqcbp, RecipeInputs::new(3, BasisKind::Legendre), &c).is_err());
        assert!(recommend(DecoderFamily::Wlasso, RecipeInputs::new(3, BasisKind::Legendre).noise(0.0), &c).is_err());
        assert!(recommend(DecoderFamily::WladLasso, RecipeInputs::new(3, BasisKind::Legendre), &c).is_err());
    }

    #[test]
    fn theta_examples() {
        for (k, h) in [(1.0, 1.0), (4.0, 1.0), (73.1, 28.0), (1e4, 3.0)] {
            let lambda = theta_minimizer(k, h);
            assert!((theta(k, lambda, h) - 2f64.sqrt()).abs() < 1e-12);
        }
        assert!((theta(4.0, 1.0, 1.0) - 5f64.sqrt()).abs() < 1e-15);
        for k in [0.5, 2.0, 30.0] {
            for h in [1.0, 5.0, 100.0] {
                for e in -30..=30 {
                    let lambda = 10f64.powf(e as f64 / 10.0);
                    assert!(theta(k, lambda, h) >= 2f64.sqrt() - 1e-12);
                }
            }
        }
    }

    #[test]
    fn polylog_examples() {
        let l2 = 2f64.ln();
        let expected = l2 * l2 * (l2 + 1.0).min(l2 * l2) + l2 * 4f64.ln();
        assert!((polylog_l(2, 1, 0.5) - expected).abs() < 1e-15);
        assert!(polylog_l(5, 3, 0.01) > polylog_l(5, 3, 0.1));
        let mut last = 0.0;
        for d in 1..40 {
            let v = polylog_l(6, d, 0.1);
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn grid_parsing() {
        let g = parse_grid("-7:0.5:1").unwrap();
        assert_eq!(g.len(), 17);
        assert!((g[0] - 1e-7).abs() < 1e-22);
        assert!((g[16] - 10.0).abs() < 1e-12);
        assert_eq!(parse_grid("-1:0.5:8").unwrap().len(), 19);
        assert_eq!(parse_grid("-2:0.25:5").unwrap().len(), 29);
        assert_eq!(parse_grid("-2:0.25:3").unwrap().len(), 21);
        assert_eq!(parse_grid("0.5, 1,2").unwrap(), vec![0.5, 1.0, 2.0]);
        assert!(parse_grid("1:0:2").is_err());
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("a:1:2").is_err());
    }

    #[test]
    fn partition_properties() {
        let mut rng = seeded(3);
        for (m, g) in [(10, 3), (7, 7), (100, 5), (4, 2)] {
            let parts = random_partition(m, g, &mut rng);
            assert_eq!(parts.len(), g);
            let mut all: Vec<usize> = parts.iter().flatten().copied().collect();
            all.sort_unstable();
            assert_eq!(all, (0..m).collect::<Vec<_>>());
            let sizes: Vec<usize> = parts.iter().map(Vec::len).collect();
            assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
        }
    }

    #[test]
    fn rescaling_is_undone_exactly() {
        let mut rng = seeded(4);
        let a = DMatrix::from_fn(9, 4, |_, _| rng.random_range(-1.0..1.0));
        let y = DVector::from_fn(9, |_, _| rng.random_range(-1.0..1.0));
        let held = vec![1, 4, 8];
        let split = split_fold(&a, &y, &held);
        let ts = (9.0f64 / 6.0).sqrt();
        let train: Vec<usize> = (0..9).filter(|i| !held.contains(i)).collect();
        for (r, &i) in held.iter().enumerate() {
            for j in 0..4 {
                assert_eq!(split.valid_matrix[(r, j)], a[(i, j)]);
            }
            assert_eq!(split.valid_data[r], y[i]);
        }
        for (r, &i) in train.iter().enumerate() {
            for j in 0..4 {
                assert!((split.train_matrix[(r, j)] / ts - a[(i, j)]).abs() < 1e-15);
            }
            assert!((split.train_data[r] / ts - y[i]).abs() < 1e-15);
        }
        assert_eq!(split.valid_weight, 3.0);
        let x = DVector::from_fn(4, |j, _| j as f64);
        let scaled = (&split.valid_matrix * &x - &split.valid_data) * 3f64.sqrt();
        let l2 = split.validation_error(&x, ValidationMetric::SquaredL2);
        let l1 = split.validation_error(&x, ValidationMetric::L1);
        assert!((l2 - scaled.norm_squared()).abs() < 1e-12 * l2.max(1.0));
        assert!((l1 - scaled.iter().map(|v| v.abs()).sum::<f64>()).abs() < 1e-12 * l1.max(1.0));
    }

    // Fixed decoder x(p) = (p, 1), folds {0,1} and {2,3}, rows
    // (1,0), (0,1), (1,1), (1,0), data (1,2,0,1); both folds are rescaled by
    // sqrt(4/2).
    //   fold 1: 2((p-1)^2 + 1)          -> 4, 2, 4   for p = 0, 1, 2
    //   fold 2: 2((p+1)^2 + (p-1)^2)    -> 4, 8, 20
    //   mean:                           -> 4, 5, 12
    #[test]
    fn stubbed_decoder_matches_hand_table() {
        let a = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0]);
        let y = DVector::from_vec(vec![1.0, 2.0, 0.0, 1.0]);
        let u = DVector::from_element(2, 1.0);
        let spec = CvSpec::new(DecoderFamily::Wqcbp, vec![0.0, 1.0, 2.0], 2, 1);
        let report = cross_validate_with(&a, &y, &u, &spec, vec![vec![vec![0, 1], vec![2, 3]]], |ar, _, _, p| {
            assert_eq!(ar.nrows(), 2);
            Ok(DVector::from_vec(vec![p, 1.0]))
        })
        .unwrap();
        let table: Vec<f64> = report.entries.iter().map(|e| e.error).collect();
        let expected = [4.0, 2.0, 4.0, 4.0, 8.0, 20.0];
        for (got, want) in table.iter().zip(expected) {
            assert!((got - want).abs() < 1e-12, "{table:?}");
        }
        assert_eq!(report.mean_errors.len(), 3);
        for (got, want) in report.mean_errors.iter().zip([4.0, 5.0, 12.0]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(report.chosen, 0.0);
    }

    #[test]
    fn singleton_grid_and_ties() {
        let a = DMatrix::from_row_slice(4, 1, &[1.0, 1.0, 1.0, 1.0]);
        let y = DVector::from_vec(vec![1.0, 2.0, 3.0, 4.0]);
        let u = DVector::from_element(1, 1.0);
        let spec = CvSpec::new(DecoderFamily::WsrLasso, vec![7.5], 2, 2);
        let parts = vec![vec![vec![0, 1], vec![2, 3]], vec![vec![0, 2], vec![1, 3]]];
        let r = cross_validate_with(&a, &y, &u, &spec, parts.clone(), |_, _, _, _| Ok(DVector::zeros(1))).unwrap();
        assert_eq!(r.chosen, 7.5);
        let spec = CvSpec::new(DecoderFamily::WsrLasso, vec![2.0, 1.0, 2.0, 1.0], 2, 2);
        let r = cross_validate_with(&a, &y, &u, &spec, parts, |_, _, _, p| Ok(DVector::from_element(1, p))).unwrap();
        assert_eq!(r.chosen_index, 0);
    }

    #[test]
    fn rejects_bad_specs() {
        let a = DMatrix::from_element(3, 1, 1.0);
        let y = DVector::from_element(3, 1.0);
        let u = DVector::from_element(1, 1.0);
        let stub = |_: &DMatrix<f64>, _: &DVector<f64>, _: &DVector<f64>, _: f64| Ok(DVector::zeros(1));
        let spec = CvSpec::new(DecoderFamily::Wqcbp, vec![], 2, 1);
        assert!(cross_validate_with(&a, &y, &u, &spec, vec![], stub).is_err());
        let spec = CvSpec::new(DecoderFamily::Wqcbp, vec![1.0], 4, 1);
        assert!(cross_validate_with(&a, &y, &u, &spec, vec![], stub).is_err());
    }
}
