//! Orthonormal tensor polynomials, random sampling from their orthogonality
//! measure, and assembly of the scaled design matrix.

use std::f64::consts::PI;
use std::io::{BufRead, Write};
use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::error::{Error, Result};
use crate::index::{BasisKind, IndexSet, MultiIndex};

/// A point of `[-1, 1]^d`. Sampling never produces boundary points.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePoint(Vec<f64>);

impl SamplePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("sample point needs d >= 1".into()));
        }
        if coords.iter().any(|t| !t.is_finite() || t.abs() > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "sample point {coords:?} lies outside [-1, 1]^d"
            )));
        }
        Ok(SamplePoint(coords))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }
}

/// Orthonormal Legendre polynomials `phi_0..=phi_max_degree` at `t`, with
/// respect to the uniform probability measure on `[-1, 1]`.
pub fn legendre_table(t: f64, max_degree: usize) -> Vec<f64> {
    let mut p = Vec::with_capacity(max_degree + 1);
    p.push(1.0);
    if max_degree >= 1 {
        p.push(t);
    }
    for k in 1..max_degree {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * t * p[k] - kf * p[k - 1]) / (kf + 1.0);
        p.push(next);
    }
    for (k, v) in p.iter_mut().enumerate() {
        *v *= ((2 * k + 1) as f64).sqrt();
    }
    p
}

/// Orthonormal Chebyshev polynomials `phi_0..=phi_max_degree` at `t`, with
/// respect to the arcsine measure on `[-1, 1]`.
pub fn chebyshev_table(t: f64, max_degree: usize) -> Vec<f64> {
    let mut c = Vec::with_capacity(max_degree + 1);
    c.push(1.0);
    if max_degree >= 1 {
        c.push(t);
    }
    for k in 1..max_degree {
        let next = 2.0 * t * c[k] - c[k - 1];
        c.push(next);
    }
    for v in c.iter_mut().skip(1) {
        *v *= 2f64.sqrt();
    }
    c
}

fn univariate_table(kind: BasisKind, t: f64, max_degree: usize) -> Vec<f64> {
    match kind {
        BasisKind::Legendre => legendre_table(t, max_degree),
        BasisKind::Chebyshev => chebyshev_table(t, max_degree),
    }
}

/// `phi_i(t)`, the product of univariate orthonormal polynomials.
pub fn eval_basis(kind: BasisKind, index: &MultiIndex, t: &SamplePoint) -> Result<f64> {
    if index.dim() != t.dim() {
        return Err(Error::DimensionMismatch {
            expected: index.dim(),
            found: t.dim(),
        });
    }
    Ok(index
        .entries()
        .iter()
        .zip(t.coords())
        .map(|(&k, &x)| univariate_table(kind, x, k)[k])
        .product())
}

/// Draws `m` i.i.d. points from the orthogonality measure of `kind`:
/// uniform for Legendre, arcsine (`cos(pi U)`) for Chebyshev.
pub fn sample_measure<R: Rng + ?Sized>(kind: BasisKind, d: usize, m: usize, rng: &mut R) -> Result<Vec<SamplePoint>> {
    if d == 0 || m == 0 {
        return Err(Error::InvalidArgument(format!(
            "sampling needs d >= 1 and m >= 1 (got d = {d}, m = {m})"
        )));
    }
    let draw = |rng: &mut R| -> f64 {
        loop {
            let t = match kind {
                BasisKind::Legendre => rng.random_range(-1.0..1.0),
                BasisKind::Chebyshev => (PI * rng.random::<f64>()).cos(),
            };
            if t.abs() < 1.0 {
                return t;
            }
        }
    };
    Ok((0..m)
        .map(|_| SamplePoint((0..d).map(|_| draw(rng)).collect()))
        .collect())
}

/// Scaled design matrix with `A[i][j] = phi_{i_j}(t_i) / sqrt(m)`.
pub fn design_matrix(kind: BasisKind, index_set: &IndexSet, points: &[SamplePoint]) -> Result<DMatrix<f64>> {
    let m = points.len();
    let d = index_set.dim();
    if let Some(p) = points.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: p.dim(),
        });
    }
    let max_degree = index_set.max_degree();
    let scale = 1.0 / (m as f64).sqrt();
    let mut a = DMatrix::zeros(m, index_set.len());
    for (i, point) in points.iter().enumerate() {
        let tables: Vec<Vec<f64>> = point
            .coords()
            .iter()
            .map(|&t| univariate_table(kind, t, max_degree))
            .collect();
        for (j, idx) in index_set.iter().enumerate() {
            let value: f64 = idx
                .entries()
                .iter()
                .zip(&tables)
                .map(|(&k, table)| table[k])
                .product();
            a[(i, j)] = value * scale;
        }
    }
    Ok(a)
}

/// Sample points, scaled design matrix, scaled samples and intrinsic weights.
#[derive(Debug, Clone)]
pub struct DesignProblem {
    points: Vec<SamplePoint>,
    matrix: DMatrix<f64>,
    y: DVector<f64>,
    index_set: IndexSet,
    kind: BasisKind,
    weights: DVector<f64>,
    norm: OnceLock<f64>,
}

impl DesignProblem {
    pub fn points(&self) -> &[SamplePoint] {
        &self.points
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn index_set(&self) -> &IndexSet {
        &self.index_set
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn weights(&self) -> &DVector<f64> {
        &self.weights
    }

    pub fn m(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n(&self) -> usize {
        self.matrix.ncols()
    }

    /// Same matrix and weights with a different right-hand side, e.g. after
    /// noise has been added.
    pub fn with_data(&self, y: DVector<f64>) -> Result<DesignProblem> {
        if y.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                found: y.len(),
            });
        }
        Ok(DesignProblem {
            y,
            ..self.clone()
        })
    }

    /// Spectral norm of the design matrix, computed once and cached.
    pub fn operator_norm(&self) -> f64 {
        *self
            .norm
            .get_or_init(|| crate::solver::operator_norm(&self.matrix))
    }

    /// Row-major dump of `A`, one row per line, 17 significant digits.
    pub fn write_matrix_dump<W: Write>(&self, out: W) -> Result<()> {
        write_matrix_dump(&self.matrix, out)
    }
}

/// Builds the design problem for samples `values[i] = f(points[i])`.
pub fn assemble(kind: BasisKind, index_set: &IndexSet, points: Vec<SamplePoint>, values: &[f64]) -> Result<DesignProblem> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("assemble needs m >= 1 samples".into()));
    }
    if values.len() != points.len() {
        return Err(Error::DimensionMismatch {
            expected: points.len(),
            found: values.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("sample values"));
    }
    let matrix = design_matrix(kind, index_set, &points)?;
    let scale = 1.0 / (points.len() as f64).sqrt();
    let y = DVector::from_iterator(values.len(), values.iter().map(|v| v * scale));
    let weights = DVector::from_vec(index_set.weights(kind));
    Ok(DesignProblem {
        points,
        matrix,
        y,
        index_set: index_set.clone(),
        kind,
        weights,
        norm: OnceLock::new(),
    })
}

pub fn write_matrix_dump<W: Write>(matrix: &DMatrix<f64>, mut out: W) -> Result<()> {
    for i in 0..matrix.nrows() {
        let row: Vec<String> = (0..matrix.ncols())
            .map(|j| format!("{:.16e}", matrix[(i, j)]))
            .collect();
        writeln!(out, "{}", row.join(" "))?;
    }
    Ok(())
}

pub fn read_matrix_dump<R: BufRead>(input: R) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad matrix entry {tok:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::DimensionMismatch {
                    expected: first.len(),
                    found: row.len(),
                });
            }
        }
        rows.push(row);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}
