//! Error metrics, least-squares reference fits and recovery diagnostics.

use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::basis::{design_matrix, sample_measure, DesignProblem, SamplePoint};
use crate::error::{Error, Result};
use crate::index::{BasisKind, IndexSet, MultiIndex};
use crate::solver::{solve_system, weighted_l1_norm, Decoder, SolverOptions};

/// Least-squares fit of `f` on an index set, used as the high-fidelity
/// reference in experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceSolution {
    pub index_set: IndexSet,
    pub kind: BasisKind,
    pub coefficients: Vec<f64>,
    pub oversampling: usize,
    /// `||A x - y||_2` of the fit, with `A` and `y` scaled by `1/sqrt(m)`.
    pub residual_norm: f64,
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch { expected: a, found: b });
    }
    Ok(())
}

/// Minimum-residual solution of an overdetermined system through a QR
/// factorisation. Fails with [`Error::RankDeficient`] when `R` has a
/// negligible diagonal entry.
pub fn least_squares(a: &DMatrix<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
    let (m, n) = a.shape();
    check_lengths(m, y.len())?;
    if m < n {
        return Err(Error::InvalidArgument(format!(
            "least squares needs at least as many rows as columns (m = {m}, n = {n})"
        )));
    }
    let qr = a.clone().qr();
    let r = qr.r();
    let diag_max = r.diagonal().iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let threshold = diag_max * (m.max(n) as f64) * f64::EPSILON;
    let rank = r.diagonal().iter().filter(|v| v.abs() > threshold).count();
    if rank < n || diag_max == 0.0 {
        return Err(Error::RankDeficient { rank, n });
    }
    let rhs = qr.q().transpose() * y;
    r.solve_upper_triangular(&rhs)
        .ok_or(Error::RankDeficient { rank, n })
}

/// Draws `oversampling * n` points from the orthogonality measure and fits
/// `f` by least squares. A rank-deficient draw is retried once.
pub fn least_squares_reference<F, R>(
    f: F,
    index_set: &IndexSet,
    kind: BasisKind,
    oversampling: usize,
    rng: &mut R,
) -> Result<ReferenceSolution>
where
    F: Fn(&SamplePoint) -> f64,
    R: Rng + ?Sized,
{
    if oversampling == 0 {
        return Err(Error::InvalidArgument("oversampling must be >= 1".into()));
    }
    let n = index_set.len();
    let m = oversampling * n;
    let mut attempt = 0;
    loop {
        let points = sample_measure(kind, index_set.dim(), m, rng)?;
        let a = design_matrix(kind, index_set, &points)?;
        let scale = 1.0 / (m as f64).sqrt();
        let y = DVector::from_iterator(m, points.iter().map(|t| f(t) * scale));
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("reference samples"));
        }
        match least_squares(&a, &y) {
            Ok(x) => {
                let residual_norm = (&a * &x - &y).norm();
                if !residual_norm.is_finite() {
                    return Err(Error::NonFinite("reference residual"));
                }
                return Ok(ReferenceSolution {
                    index_set: index_set.clone(),
                    kind,
                    coefficients: x.iter().copied().collect(),
                    oversampling,
                    residual_norm,
                });
            }
            Err(Error::RankDeficient { .. }) if attempt == 0 => attempt += 1,
            Err(e) => return Err(e),
        }
    }
}

impl ReferenceSolution {
    /// Two columns separated by a tab: the multi-index and its coefficient.
    /// Metadata goes into leading `#` lines.
    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "# basis {}", self.kind)?;
        writeln!(out, "# oversampling {}", self.oversampling)?;
        writeln!(out, "# residual {:e}", self.residual_norm)?;
        for (index, c) in self.index_set.iter().zip(&self.coefficients) {
            writeln!(out, "{index}\t{c:e}")?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(input: R) -> Result<Self> {
        let mut kind = None;
        let mut oversampling = None;
        let mut residual_norm = None;
        let mut indices = Vec::new();
        let mut coefficients = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::Parse(format!("reference line {}: {what}", lineno + 1));
            if let Some(meta) = line.strip_prefix('#') {
                let mut parts = meta.split_whitespace();
                match (parts.next(), parts.next()) {
                    (Some("basis"), Some(v)) => kind = Some(v.parse::<BasisKind>()?),
                    (Some("oversampling"), Some(v)) => {
                        oversampling = Some(v.parse::<usize>().map_err(|_| bad("bad oversampling"))?)
                    }
                    (Some("residual"), Some(v)) => {
                        residual_norm = Some(v.parse::<f64>().map_err(|_| bad("bad residual"))?)
                    }
                    _ => {}
                }
                continue;
            }
            let (index, value) = line.split_once('\t').ok_or_else(|| bad("expected index<TAB>coefficient"))?;
            indices.push(index.parse::<MultiIndex>()?);
            coefficients.push(value.trim().parse::<f64>().map_err(|_| bad("bad coefficient"))?);
        }
        let dim = indices
            .first()
            .map(MultiIndex::dim)
            .ok_or_else(|| Error::Parse("reference file has no coefficients".into()))?;
        // keep coefficients aligned with the column order of the rebuilt set
        let pairs: Vec<(MultiIndex, f64)> = indices.iter().cloned().zip(coefficients).collect();
        let index_set = IndexSet::new(dim, indices)?;
        let mut ordered = vec![0.0; index_set.len()];
        for (index, c) in pairs {
            ordered[index_set.position(&index).expect("index was inserted")] = c;
        }
        Ok(ReferenceSolution {
            index_set,
            kind: kind.ok_or_else(|| Error::Parse("reference file lacks '# basis'".into()))?,
            coefficients: ordered,
            oversampling: oversampling.unwrap_or(0),
            residual_norm: residual_norm.unwrap_or(f64::NAN),
        })
    }
}

/// `||x_hat - x_ref||_2`, the in-span part of the `L^2` error.
pub fn l2_error(x_hat: &[f64], x_ref: &[f64]) -> Result<f64> {
    check_lengths(x_ref.len(), x_hat.len())?;
    Ok(x_hat
        .iter()
        .zip(x_ref)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

/// `||x_hat - x_ref||_{1,u}`, an upper bound on the uniform error of the
/// in-span part.
pub fn linf_surrogate(x_hat: &[f64], x_ref: &[f64], u: &[f64]) -> Result<f64> {
    check_lengths(x_ref.len(), x_hat.len())?;
    let diff: Vec<f64> = x_hat.iter().zip(x_ref).map(|(a, b)| a - b).collect();
    weighted_l1_norm(&diff, u)
}

/// `sigma_k(e)_1`: sum of the `m - k` smallest magnitudes.
pub fn best_k_term_l1(e: &[f64], k: usize) -> Result<f64> {
    if k > e.len() {
        return Err(Error::InvalidArgument(format!(
            "k = {k} exceeds the vector length {}",
            e.len()
        )));
    }
    let mut mags: Vec<f64> = e.iter().map(|v| v.abs()).collect();
    mags.sort_by(f64::total_cmp);
    Ok(mags[..e.len() - k].iter().sum())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailConstant {
    /// `+inf` when `A` is rank deficient.
    pub value: f64,
    /// `sigma_m(sqrt(m/n) A^T)`.
    pub sigma_m: f64,
    pub rank_deficient: bool,
}

/// `Q = sqrt(|Lambda|_u / n) / sigma_m(sqrt(m/n) A^T)`.
pub fn tail_q(problem: &DesignProblem) -> Result<TailConstant> {
    tail_q_of(problem.matrix(), problem.weights().as_slice())
}

/// [`tail_q`] for an explicit matrix and weight vector.
pub fn tail_q_of(a: &DMatrix<f64>, u: &[f64]) -> Result<TailConstant> {
    let (m, n) = a.shape();
    check_lengths(n, u.len())?;
    if m == 0 || m > n {
        return Err(Error::InvalidArgument(format!("Q needs 1 <= m <= n (m = {m}, n = {n})")));
    }
    let scaled = a.transpose() * (m as f64 / n as f64).sqrt();
    let mut sv: Vec<f64> = scaled.singular_values().iter().copied().collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    let sigma_m = sv[m - 1];
    let threshold = sv[0] * (n as f64) * f64::EPSILON;
    let weighted: f64 = u.iter().map(|w| w * w).sum();
    if sigma_m <= threshold {
        return Ok(TailConstant {
            value: f64::INFINITY,
            sigma_m,
            rank_deficient: true,
        });
    }
    Ok(TailConstant {
        value: (weighted / n as f64).sqrt() / sigma_m,
        sigma_m,
        rank_deficient: false,
    })
}

/// `s^(-gamma/2) min ||z||_{1,u}` subject to `||A z - e||_2 <= eta`.
pub fn tail_term(problem: &DesignProblem, e: &[f64], eta: f64, s: usize, opts: &SolverOptions) -> Result<f64> {
    check_lengths(problem.m(), e.len())?;
    if s == 0 {
        return Err(Error::InvalidArgument("tail term needs s >= 1".into()));
    }
    let data = DVector::from_column_slice(e);
    let scale = (s as f64).powf(-problem.kind().gamma() / 2.0);
    if data.norm() <= eta {
        return Ok(0.0);
    }
    let sol = solve_system(problem.matrix(), &data, problem.weights(), &Decoder::Wqcbp { eta }, opts)?;
    Ok(scale * weighted_l1_norm(sol.x.as_slice(), problem.weights().as_slice())?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::assemble;
    use crate::index::hyperbolic_cross;
    use crate::rng::seeded;

    #[test]
    fn l2_and_linf_examples() {
        assert_eq!(l2_error(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(l2_error(&[1.0, 3.0], &[1.0, 2.0]).unwrap(), 1.0);
        assert_eq!(linf_surrogate(&[1.0, 2.5], &[1.0, 2.0], &[1.0, 3.0]).unwrap(), 1.5);
        assert!(l2_error(&[1.0], &[1.0, 2.0]).is_err());
        assert!(linf_surrogate(&[1.0, 2.0], &[1.0, 2.0], &[1.0]).is_err());
    }

    #[test]
    fn best_k_term_examples() {
        assert_eq!(best_k_term_l1(&[3.0, -1.0, 2.0], 1).unwrap(), 3.0);
        assert_eq!(best_k_term_l1(&[3.0, -1.0, 2.0], 0).unwrap(), 6.0);
        assert_eq!(best_k_term_l1(&[3.0, -1.0, 2.0], 3).unwrap(), 0.0);
        assert!(best_k_term_l1(&[3.0], 2).is_err());
    }

    #[test]
    fn q_trivial_and_rank_deficient() {
        let q = tail_q_of(&DMatrix::from_element(1, 1, 1.0), &[1.0]).unwrap();
        assert_eq!(q.value, 1.0);
        assert!(!q.rank_deficient);
        // A zero row appended to a 1 x 2 matrix
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 0.0]);
        let q = tail_q_of(&a, &[1.0, 1.0]).unwrap();
        assert!(q.rank_deficient);
        assert_eq!(q.value, f64::INFINITY);
        assert!(tail_q_of(&DMatrix::from_element(3, 2, 1.0), &[1.0, 1.0]).is_err());
    }

    #[test]
    fn q_matches_gram_eigenvalues() {
        let hc = hyperbolic_cross(4, 24).unwrap();
        let index_set = IndexSet::new(4, hc.indices()[..200].to_vec()).unwrap();
        let mut rng = seeded(21);
        let points = sample_measure(BasisKind::Legendre, 4, 50, &mut rng).unwrap();
        let values = vec![0.0; 50];
        let problem = assemble(BasisKind::Legendre, &index_set, points, &values).unwrap();
        let q = tail_q(&problem).unwrap();
        // sigma_m(sqrt(m/n) A^T)^2 = (m/n) lambda_min(A A^T)
        let gram = problem.matrix() * problem.matrix().transpose();
        let lambda_min = gram.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        let sigma = (50.0 / 200.0 * lambda_min).sqrt();
        let weighted: f64 = problem.weights().iter().map(|w| w * w).sum();
        let oracle = (weighted / 200.0).sqrt() / sigma;
        assert!(q.value.is_finite());
        assert!((q.value - oracle).abs() <= 1e-8 * oracle, "{} vs {oracle}", q.value);
    }

    fn small_problem(seed: u64) -> DesignProblem {
        let index_set = hyperbolic_cross(2, 4).unwrap();
        let mut rng = seeded(seed);
        let points = sample_measure(BasisKind::Legendre, 2, 5, &mut rng).unwrap();
        let values = vec![0.0; 5];
        assemble(BasisKind::Legendre, &index_set, points, &values).unwrap()
    }

    #[test]
    fn tail_term_vanishes_when_eta_covers_error() {
        let problem = small_problem(1);
        let opts = SolverOptions::default();
        let e = [0.1, -0.2, 0.05, 0.0, 0.3];
        let norm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert_eq!(tail_term(&problem, &e, norm, 3, &opts).unwrap(), 0.0);
        assert_eq!(tail_term(&problem, &e, 2.0 * norm, 3, &opts).unwrap(), 0.0);
        assert_eq!(tail_term(&problem, &[0.0; 5], 0.0, 3, &opts).unwrap(), 0.0);
    }

    #[test]
    fn tail_term_non_increasing_in_eta() {
        let problem = small_problem(2);
        let opts = SolverOptions::default();
        let e = [0.1, -0.2, 0.05, 0.4, 0.3];
        let norm = e.iter().map(|v| v * v).sum::<f64>().sqrt();
        let values: Vec<f64> = [0.0, 0.3 * norm, 0.7 * norm]
            .iter()
            .map(|&eta| tail_term(&problem, &e, eta, 2, &opts).unwrap())
            .collect();
        assert!(values[0] > 0.0);
        assert!(values[0] >= values[1] - 1e-7 && values[1] >= values[2] - 1e-7, "{values:?}");
    }

    fn polynomial_f<'a>(index_set: &'a IndexSet, coeffs: &[f64], kind: BasisKind) -> impl Fn(&SamplePoint) -> f64 + 'a {
        let coeffs = coeffs.to_vec();
        move |t| {
            index_set
                .iter()
                .zip(&coeffs)
                .map(|(i, c)| c * crate::basis::eval_basis(kind, i, t).unwrap())
                .sum()
        }
    }

    #[test]
    fn reference_recovers_polynomial_in_span() {
        let index_set = hyperbolic_cross(3, 6).unwrap();
        let mut rng = seeded(5);
        let coeffs: Vec<f64> = (0..index_set.len()).map(|j| 1.0 / (j as f64 + 1.0)).collect();
        for kind in [BasisKind::Legendre, BasisKind::Chebyshev] {
            let f = polynomial_f(&index_set, &coeffs, kind);
            let reference = least_squares_reference(&f, &index_set, kind, 3, &mut rng).unwrap();
            let err = l2_error(&reference.coefficients, &coeffs).unwrap();
            let scale = coeffs.iter().map(|c| c * c).sum::<f64>().sqrt();
            assert!(err <= 1e-10 * scale, "{kind}: {err}");
            assert!(reference.residual_norm < 1e-10);
        }
    }

    #[test]
    fn reference_of_constant_and_normal_equations() {
        let index_set = hyperbolic_cross(2, 5).unwrap();
        let mut rng = seeded(6);
        let reference = least_squares_reference(|_: &SamplePoint| 2.5, &index_set, BasisKind::Legendre, 20, &mut rng).unwrap();
        assert!((reference.coefficients[0] - 2.5).abs() < 1e-10);
        assert!(reference.coefficients[1..].iter().all(|c| c.abs() < 1e-10));

        let f = |t: &SamplePoint| (t.coords()[0] * 3.0).sin() + t.coords()[1].exp();
        let mut rng = seeded(7);
        let points = sample_measure(BasisKind::Legendre, 2, 60, &mut rng).unwrap();
        let a = design_matrix(BasisKind::Legendre, &index_set, &points).unwrap();
        let y = DVector::from_iterator(60, points.iter().map(f));
        let x = least_squares(&a, &y).unwrap();
        let normal = a.transpose() * (&a * &x - &y);
        assert!(normal.amax() < 1e-10, "{}", normal.amax());
    }

    #[test]
    fn reference_error_shrinks_with_oversampling() {
        // truth has coefficients outside the fitted set, so the fit error is
        // driven by aliasing, which averages out as the sample count grows
        let truth_set = hyperbolic_cross(2, 12).unwrap();
        let fit_set = hyperbolic_cross(2, 4).unwrap();
        let coeffs: Vec<f64> = truth_set.iter().map(|i| 0.5f64.powi(i.cross_product() as i32 - 1)).collect();
        let f = polynomial_f(&truth_set, &coeffs, BasisKind::Legendre);
        let target: Vec<f64> = fit_set.iter().map(|i| coeffs[truth_set.position(i).unwrap()]).collect();
        let mean_error = |oversampling: usize| {
            (0..20u64)
                .map(|seed| {
                    let mut rng = seeded(100 + seed);
                    let r = least_squares_reference(&f, &fit_set, BasisKind::Legendre, oversampling, &mut rng).unwrap();
                    l2_error(&r.coefficients, &target).unwrap()
                })
                .sum::<f64>()
                / 20.0
        };
        assert!(mean_error(20) < mean_error(2));
    }

    #[test]
    fn reference_file_round_trip() {
        let index_set = hyperbolic_cross(3, 4).unwrap();
        let mut rng = seeded(8);
        let reference =
            least_squares_reference(|t: &SamplePoint| t.coords()[2].cos(), &index_set, BasisKind::Chebyshev, 4, &mut rng).unwrap();
        let mut buf = Vec::new();
        reference.write_text(&mut buf).unwrap();
        let back = ReferenceSolution::read_text(&buf[..]).unwrap();
        assert_eq!(back, reference);
        assert!(ReferenceSolution::read_text(&b"# basis legendre\n"[..]).is_err());
        assert!(ReferenceSolution::read_text(&b"0 1 2.0\n"[..]).is_err());
    }

    #[test]
    fn rank_deficiency_is_reported() {
        let a = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, -1.0, -2.0]);
        let y = DVector::from_element(3, 1.0);
        assert!(matches!(least_squares(&a, &y), Err(Error::RankDeficient { rank: 1, n: 2 })));
    }
}
