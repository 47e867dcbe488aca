//! First-order primal-dual solver for weighted l1 decoders.
//!
//! Every decoder is written as `min_z ||z||_{1,u} + G(Az - y)` and solved with
//! the same saddle-point map
//!
//! ```text
//! x+ = soft(x - tau A^T p, tau u)
//! p+ = prox_{sigma G*}(p + sigma (A (2 x+ - x) - y))
//! ```
//!
//! Only the dual prox differs between decoders: shrinkage toward the origin
//! for WQCBP (the conjugate of an l2-ball indicator is `eta ||p||_2`), a scaled
//! identity for WLASSO, projection onto the l2-ball of radius `lambda` for
//! WSR-LASSO and a box clamp `|p_i| <= lambda v_i` for WLAD-LASSO.
//!
//! The map is iterated with Halpern anchoring and adaptive restarts, and the
//! step sizes `tau = step / omega`, `sigma = step * omega` share the bound
//! `step = safety / ||A||` while the primal weight `omega` is rebalanced at
//! each restart. Plain iteration with `omega = 1` needs far more than the
//! default iteration budget on basis-pursuit instances.

use std::fmt;
use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::basis::DesignProblem;
use crate::error::{Error, Result};

/// Decoder family without its tuning parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderFamily {
    Wqcbp,
    Wlasso,
    WsrLasso,
    WladLasso,
}

impl DecoderFamily {
    pub const ALL: [DecoderFamily; 4] = [
        DecoderFamily::Wqcbp,
        DecoderFamily::Wlasso,
        DecoderFamily::WsrLasso,
        DecoderFamily::WladLasso,
    ];

    /// The decoder with tuning parameter `p` (`eta` for WQCBP, `lambda`
    /// otherwise); WLAD-LASSO gets unit data weights.
    pub fn with_parameter(self, p: f64) -> Decoder {
        match self {
            DecoderFamily::Wqcbp => Decoder::Wqcbp { eta: p },
            DecoderFamily::Wlasso => Decoder::Wlasso { lambda: p },
            DecoderFamily::WsrLasso => Decoder::WsrLasso { lambda: p },
            DecoderFamily::WladLasso => Decoder::WladLasso {
                lambda: p,
                data_weights: None,
            },
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DecoderFamily::Wqcbp => "wqcbp",
            DecoderFamily::Wlasso => "wlasso",
            DecoderFamily::WsrLasso => "wsr-lasso",
            DecoderFamily::WladLasso => "wlad-lasso",
        }
    }
}

impl fmt::Display for DecoderFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for DecoderFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .to_ascii_lowercase()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect();
        match key.as_str() {
            "wqcbp" | "wbp" => Ok(DecoderFamily::Wqcbp),
            "wlasso" => Ok(DecoderFamily::Wlasso),
            "wsrlasso" => Ok(DecoderFamily::WsrLasso),
            "wladlasso" => Ok(DecoderFamily::WladLasso),
            _ => Err(Error::Parse(format!("unknown decoder {s:?}"))),
        }
    }
}

/// A decoder together with its tuning parameter.
#[derive(Debug, Clone, PartialEq)]
pub enum Decoder {
    /// `min ||z||_{1,u}` subject to `||Az - y||_2 <= eta`.
    Wqcbp { eta: f64 },
    /// `min ||z||_{1,u} + lambda ||Az - y||_2^2`.
    Wlasso { lambda: f64 },
    /// `min ||z||_{1,u} + lambda ||Az - y||_2`.
    WsrLasso { lambda: f64 },
    /// `min ||z||_{1,u} + lambda ||Az - y||_{1,v}`; `None` means `v = 1`.
    WladLasso {
        lambda: f64,
        data_weights: Option<Vec<f64>>,
    },
}

impl Decoder {
    pub fn family(&self) -> DecoderFamily {
        match self {
            Decoder::Wqcbp { .. } => DecoderFamily::Wqcbp,
            Decoder::Wlasso { .. } => DecoderFamily::Wlasso,
            Decoder::WsrLasso { .. } => DecoderFamily::WsrLasso,
            Decoder::WladLasso { .. } => DecoderFamily::WladLasso,
        }
    }

    pub fn parameter(&self) -> f64 {
        match *self {
            Decoder::Wqcbp { eta } => eta,
            Decoder::Wlasso { lambda }
            | Decoder::WsrLasso { lambda }
            | Decoder::WladLasso { lambda, .. } => lambda,
        }
    }

    fn validate(&self, m: usize) -> Result<()> {
        match self {
            Decoder::Wqcbp { eta } => {
                if !(eta.is_finite() && *eta >= 0.0) {
                    return Err(Error::InvalidArgument(format!("eta must be >= 0 (got {eta})")));
                }
            }
            Decoder::Wlasso { lambda } | Decoder::WsrLasso { lambda } => {
                if !(lambda.is_finite() && *lambda > 0.0) {
                    return Err(Error::InvalidArgument(format!("lambda must be > 0 (got {lambda})")));
                }
            }
            Decoder::WladLasso { lambda, data_weights } => {
                if !(lambda.is_finite() && *lambda > 0.0) {
                    return Err(Error::InvalidArgument(format!("lambda must be > 0 (got {lambda})")));
                }
                if let Some(v) = data_weights {
                    if v.len() != m {
                        return Err(Error::DimensionMismatch {
                            expected: m,
                            found: v.len(),
                        });
                    }
                    if v.iter().any(|&vi| !(vi.is_finite() && vi >= 1.0)) {
                        return Err(Error::InvalidArgument(
                            "WLAD-LASSO data weights must satisfy v_i >= 1".into(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    fn data_weight(&self, i: usize) -> f64 {
        match self {
            Decoder::WladLasso {
                data_weights: Some(v),
                ..
            } => v[i],
            _ => 1.0,
        }
    }

    /// Data-fidelity term `G(r)` (0 for WQCBP; feasibility is tracked apart).
    fn fidelity(&self, r: &DVector<f64>) -> f64 {
        match self {
            Decoder::Wqcbp { .. } => 0.0,
            Decoder::Wlasso { lambda } => lambda * r.norm_squared(),
            Decoder::WsrLasso { lambda } => lambda * r.norm(),
            Decoder::WladLasso { lambda, .. } => {
                lambda
                    * r.iter()
                        .enumerate()
                        .map(|(i, ri)| self.data_weight(i) * ri.abs())
                        .sum::<f64>()
            }
        }
    }

    /// In-place `prox_{sigma G*}` applied to `w` (which already includes the
    /// `-sigma y` shift).
    fn dual_prox(&self, w: &mut DVector<f64>, sigma: f64) {
        match self {
            Decoder::Wqcbp { eta } => {
                let norm = w.norm();
                if *eta > 0.0 && norm > 0.0 {
                    let shrink = (1.0 - sigma * eta / norm).max(0.0);
                    *w *= shrink;
                }
            }
            Decoder::Wlasso { lambda } => {
                *w /= 1.0 + sigma / (2.0 * lambda);
            }
            Decoder::WsrLasso { lambda } => {
                let norm = w.norm();
                if norm > *lambda {
                    *w *= lambda / norm;
                }
            }
            Decoder::WladLasso { lambda, .. } => {
                for (i, wi) in w.iter_mut().enumerate() {
                    let bound = lambda * self.data_weight(i);
                    *wi = wi.clamp(-bound, bound);
                }
            }
        }
    }

    /// Conjugate `G*(p)` for a dual-feasible `p` (used by the gap certificate).
    fn fidelity_conjugate(&self, p: &DVector<f64>) -> f64 {
        match self {
            Decoder::Wqcbp { eta } => eta * p.norm(),
            Decoder::Wlasso { lambda } => p.norm_squared() / (4.0 * lambda),
            Decoder::WsrLasso { .. } | Decoder::WladLasso { .. } => 0.0,
        }
    }
}

impl fmt::Display for Decoder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Decoder::Wqcbp { eta } => write!(f, "wqcbp(eta={eta:e})"),
            Decoder::Wlasso { lambda } => write!(f, "wlasso(lambda={lambda:e})"),
            Decoder::WsrLasso { lambda } => write!(f, "wsr-lasso(lambda={lambda:e})"),
            Decoder::WladLasso { lambda, .. } => write!(f, "wlad-lasso(lambda={lambda:e})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Stop once both the primal and the dual iterate change by at most
    /// `tolerance` relative to their size.
    pub tolerance: f64,
    /// Absolute slack allowed on `||Az - y||_2 - eta` for WQCBP.
    pub feasibility_tolerance: f64,
    /// Step sizes are `safety_factor / ||A||`.
    pub safety_factor: f64,
    /// Record a trace row every this many iterations (0 disables tracing).
    pub trace_every: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            max_iterations: 50_000,
            tolerance: 1e-9,
            feasibility_tolerance: 1e-8,
            safety_factor: 0.99,
            trace_every: 0,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.max_iterations == 0
            || !positive(self.tolerance)
            || !positive(self.feasibility_tolerance)
            || !positive(self.safety_factor)
            || self.safety_factor >= 1.0
        {
            return Err(Error::InvalidArgument(format!(
                "invalid solver options {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub objective: f64,
    pub residual_norm: f64,
    pub step: f64,
}

/// Writes trace rows as CSV with a header line.
pub fn write_trace_csv<W: Write>(rows: &[TraceRow], mut out: W) -> Result<()> {
    writeln!(out, "iteration,objective,residual_norm,step")?;
    for r in rows {
        writeln!(
            out,
            "{},{:.16e},{:.16e},{:.16e}",
            r.iteration, r.objective, r.residual_norm, r.step
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct DecoderSolution {
    pub x: DVector<f64>,
    pub objective: f64,
    /// `A x - y`.
    pub residual: DVector<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Primal minus dual objective at a dual-feasible rescaling of the final
    /// dual iterate; `None` when the primal point is not feasible.
    pub duality_gap: Option<f64>,
    pub trace: Vec<TraceRow>,
}

/// `sum u_j |z_j|`.
pub fn weighted_l1_norm(z: &[f64], u: &[f64]) -> Result<f64> {
    if z.len() != u.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: z.len(),
        });
    }
    Ok(z.iter().zip(u).map(|(zj, uj)| uj * zj.abs()).sum())
}

/// Componentwise soft thresholding `sign(z_j) max(|z_j| - step u_j, 0)`.
pub fn prox_weighted_l1(z: &[f64], u: &[f64], step: f64) -> Vec<f64> {
    z.iter()
        .zip(u)
        .map(|(&zj, &uj)| soft_threshold(zj, step * uj))
        .collect()
}

#[inline]
fn soft_threshold(z: f64, threshold: f64) -> f64 {
    let mag = z.abs() - threshold;
    if mag > 0.0 {
        mag.copysign(z)
    } else {
        0.0
    }
}

/// Largest singular value of `a` by power iteration on `A^T A`.
pub fn operator_norm(a: &DMatrix<f64>) -> f64 {
    let (m, n) = a.shape();
    if m == 0 || n == 0 || a.iter().all(|&v| v == 0.0) {
        return 0.0;
    }
    let mut v = DVector::from_fn(n, |j, _| 1.0 + 0.5 * ((j as f64 + 1.0) * 0.7548776662).fract());
    v /= v.norm();
    let mut av = DVector::zeros(m);
    let mut atav = DVector::zeros(n);
    let mut estimate = 0.0f64;
    for _ in 0..20_000 {
        av.gemv(1.0, a, &v, 0.0);
        let next = av.norm_squared();
        atav.gemv_tr(1.0, a, &av, 0.0);
        let len = atav.norm();
        if len == 0.0 {
            break;
        }
        v.copy_from(&atav);
        v /= len;
        let done = (next - estimate).abs() <= 1e-14 * next;
        estimate = next;
        if done {
            break;
        }
    }
    estimate.sqrt()
}

/// Distance from `y` to the range of `a`.
pub fn range_distance(a: &DMatrix<f64>, y: &DVector<f64>) -> f64 {
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.max();
    let cutoff = smax * f64::EPSILON * (a.nrows().max(a.ncols()) as f64);
    let mut proj = DVector::zeros(y.len());
    for (k, &sv) in svd.singular_values.iter().enumerate() {
        if sv > cutoff {
            let col = u.column(k);
            proj += col * col.dot(y);
        }
    }
    (y - proj).norm()
}

/// Solves `decoder` on a design problem (uses its cached operator norm).
pub fn solve(problem: &DesignProblem, decoder: &Decoder, opts: &SolverOptions) -> Result<DecoderSolution> {
    solve_with_norm(
        problem.matrix(),
        problem.y(),
        problem.weights(),
        decoder,
        opts,
        Some(problem.operator_norm()),
    )
}

/// Solves `decoder` for an explicit `(A, y, u)` triple.
pub fn solve_system(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    u: &DVector<f64>,
    decoder: &Decoder,
    opts: &SolverOptions,
) -> Result<DecoderSolution> {
    solve_with_norm(a, y, u, decoder, opts, None)
}

fn solve_with_norm(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    u: &DVector<f64>,
    decoder: &Decoder,
    opts: &SolverOptions,
    norm: Option<f64>,
) -> Result<DecoderSolution> {
    let (m, n) = a.shape();
    if y.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: y.len(),
        });
    }
    if u.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: u.len(),
        });
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("design matrix"));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("data vector"));
    }
    if u.iter().any(|&v| !(v.is_finite() && v > 0.0)) {
        return Err(Error::InvalidArgument("weights must be positive and finite".into()));
    }
    opts.validate()?;
    decoder.validate(m)?;

    let zero_solution = |converged: bool| {
        let x = DVector::zeros(n);
        let residual = -y.clone();
        finish(a, y, u, decoder, opts, x, residual, None, 0, converged, Vec::new())
    };

    if let Decoder::Wqcbp { eta } = *decoder {
        if y.norm() <= eta {
            return Ok(zero_solution(true));
        }
        if m > n {
            let floor = range_distance(a, y);
            if floor > eta + opts.feasibility_tolerance {
                return Err(Error::Infeasible { floor, eta });
            }
        }
    }

    let norm = norm.unwrap_or_else(|| operator_norm(a));
    if norm == 0.0 {
        if let Decoder::Wqcbp { eta } = *decoder {
            return Err(Error::Infeasible {
                floor: y.norm(),
                eta,
            });
        }
        return Ok(zero_solution(true));
    }

    let run = pdhg(a, y, u, decoder, opts, opts.safety_factor / norm);
    let (x, p, iterations, converged, trace) = (run.x, run.p, run.iterations, run.converged, run.trace);
    // recompute the residual from scratch so it matches x exactly
    let residual = a * &x - y;
    if let Decoder::Wqcbp { eta } = *decoder {
        let rnorm = residual.norm();
        if rnorm - eta > opts.feasibility_tolerance {
            let floor = range_distance(a, y);
            if floor > eta + opts.feasibility_tolerance {
                return Err(Error::Infeasible { floor, eta });
            }
        }
    }
    Ok(finish(a, y, u, decoder, opts, x, residual, Some(p), iterations, converged, trace))
}

struct PdhgRun {
    x: DVector<f64>,
    p: DVector<f64>,
    iterations: usize,
    converged: bool,
    trace: Vec<TraceRow>,
}

// Restart thresholds on the fixed-point residual, relative to its value at
// the last restart.
const RESTART_SUFFICIENT: f64 = 0.2;
const RESTART_NECESSARY: f64 = 0.8;
const RESTART_ARTIFICIAL: f64 = 0.36;

/// Halpern-anchored primal-dual iteration with adaptive restarts.
///
/// `T` is the primal-dual map `(x, p) -> (x+, p+)` with
/// `x+ = soft(x - tau A^T p, tau u)` and
/// `p+ = prox_{sigma G*}(p + sigma (A (2 x+ - x) - y))`. The iterate is
/// `z_k+1 = (k+1)/(k+2) T(z_k) + 1/(k+2) z_0`; the anchor `z_0` is reset to
/// `T(z_k)` whenever the fixed-point residual `||z_k - T(z_k)||` has dropped
/// enough since the last restart.
fn pdhg(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    u: &DVector<f64>,
    decoder: &Decoder,
    opts: &SolverOptions,
    step: f64,
) -> PdhgRun {
    let (m, n) = a.shape();
    // tau = step / omega, sigma = step * omega, so tau sigma ||A||^2 < 1
    // holds for every primal weight omega.
    let omega0 = (u.norm() / y.norm()).clamp(1e-4, 1e4);
    // the adaptive weight is confined to two decades around its start: a
    // cold start far from a large solution otherwise inflates the dual
    // and with it omega
    let (omega_min, omega_max) = (omega0 * 1e-2, omega0 * 1e2);
    let mut omega = omega0;
    let mut tau = step / omega;
    let mut sigma = step * omega;
    let mut x = DVector::<f64>::zeros(n);
    let mut p = DVector::<f64>::zeros(m);
    let mut ax = DVector::<f64>::zeros(m);
    let mut x0 = x.clone();
    let mut p0 = p.clone();
    let mut ax0 = ax.clone();
    let mut xt = DVector::<f64>::zeros(n);
    let mut pt = DVector::<f64>::zeros(m);
    let mut axt = DVector::<f64>::zeros(m);
    let mut grad = DVector::<f64>::zeros(n);
    let mut trace = Vec::new();

    let mut inner = 0usize;
    let mut last_restart = 0usize;
    let mut residual_at_restart = f64::INFINITY;
    let mut previous_residual = f64::INFINITY;

    for k in 1..=opts.max_iterations {
        // T(z)
        grad.gemv_tr(1.0, a, &p, 0.0);
        for j in 0..n {
            xt[j] = soft_threshold(x[j] - tau * grad[j], tau * u[j]);
        }
        axt.gemv(1.0, a, &xt, 0.0);
        for i in 0..m {
            pt[i] = p[i] + sigma * (2.0 * axt[i] - ax[i] - y[i]);
        }
        decoder.dual_prox(&mut pt, sigma);

        let dx = (&xt - &x).norm();
        let dp = (&pt - &p).norm();
        let rnorm = (&axt - y).norm();

        if opts.trace_every > 0 && k % opts.trace_every == 0 {
            let residual = &axt - y;
            trace.push(TraceRow {
                iteration: k,
                objective: weighted_l1(&xt, u) + decoder.fidelity(&residual),
                residual_norm: rnorm,
                step: dx,
            });
        }

        // A stalled primal iterate alone is not enough: x stays at the cold
        // start while the dual variable builds up.
        let small = dx <= opts.tolerance * xt.norm() && dp <= opts.tolerance * pt.norm();
        let feasible = match *decoder {
            Decoder::Wqcbp { eta } => rnorm - eta <= opts.feasibility_tolerance,
            _ => true,
        };
        if small && feasible {
            return PdhgRun {
                x: xt,
                p: pt,
                iterations: k,
                converged: true,
                trace,
            };
        }

        let fixed_point = (dx * dx / tau + dp * dp / sigma).sqrt();
        if inner == 0 {
            residual_at_restart = fixed_point;
        }
        let restart = inner > 0
            && (fixed_point <= RESTART_SUFFICIENT * residual_at_restart
                || (fixed_point <= RESTART_NECESSARY * residual_at_restart
                    && fixed_point > previous_residual)
                || (k - last_restart) as f64 >= RESTART_ARTIFICIAL * k as f64);
        previous_residual = fixed_point;

        if restart {
            let shift_x = (&xt - &x0).norm();
            let shift_p = (&pt - &p0).norm();
            if shift_x > 1e-10 && shift_p > 1e-10 {
                omega = (0.5 * (shift_p / shift_x).ln() + 0.5 * omega.ln())
                    .exp()
                    .clamp(omega_min, omega_max);
                tau = step / omega;
                sigma = step * omega;
            }
            x0.copy_from(&xt);
            p0.copy_from(&pt);
            ax0.copy_from(&axt);
            x.copy_from(&xt);
            p.copy_from(&pt);
            ax.copy_from(&axt);
            inner = 0;
            last_restart = k;
            continue;
        }

        let w = (inner + 1) as f64 / (inner + 2) as f64;
        x.zip_zip_apply(&xt, &x0, |xi, ti, oi| *xi = w * ti + (1.0 - w) * oi);
        p.zip_zip_apply(&pt, &p0, |pi, ti, oi| *pi = w * ti + (1.0 - w) * oi);
        ax.zip_zip_apply(&axt, &ax0, |ai, ti, oi| *ai = w * ti + (1.0 - w) * oi);
        inner += 1;
    }

    PdhgRun {
        x: xt,
        p: pt,
        iterations: opts.max_iterations,
        converged: false,
        trace,
    }
}

fn weighted_l1(x: &DVector<f64>, u: &DVector<f64>) -> f64 {
    x.iter().zip(u.iter()).map(|(xj, uj)| uj * xj.abs()).sum()
}

#[allow(clippy::too_many_arguments)]
fn finish(
    a: &DMatrix<f64>,
    y: &DVector<f64>,
    u: &DVector<f64>,
    decoder: &Decoder,
    opts: &SolverOptions,
    x: DVector<f64>,
    residual: DVector<f64>,
    dual: Option<DVector<f64>>,
    iterations: usize,
    converged: bool,
    trace: Vec<TraceRow>,
) -> DecoderSolution {
    let objective = weighted_l1(&x, u) + decoder.fidelity(&residual);
    let primal_feasible = match *decoder {
        Decoder::Wqcbp { eta } => residual.norm() - eta <= opts.feasibility_tolerance,
        _ => true,
    };
    let dual = dual.unwrap_or_else(|| DVector::zeros(y.len()));
    let duality_gap = primal_feasible.then(|| {
        // scale the dual iterate into {|A^T p|_j <= u_j}
        let atp = a.transpose() * &dual;
        let ratio = atp
            .iter()
            .zip(u.iter())
            .map(|(g, uj)| if g.abs() > *uj { uj / g.abs() } else { 1.0 })
            .fold(1.0f64, f64::min);
        let p = &dual * ratio;
        let dual_objective = -decoder.fidelity_conjugate(&p) - p.dot(y);
        objective - dual_objective
    });
    DecoderSolution {
        x,
        objective,
        residual,
        iterations,
        converged,
        duality_gap,
        trace,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;
    use rand::Rng;

    fn mat(rows: usize, cols: usize, data: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, cols, data)
    }

    #[test]
    fn weighted_norm_examples() {
        assert_eq!(weighted_l1_norm(&[0.0, 0.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(weighted_l1_norm(&[1.0, -2.0], &[1.0, 1.0]).unwrap(), 3.0);
        assert_eq!(weighted_l1_norm(&[1.0, -2.0], &[2.0, 3.0]).unwrap(), 8.0);
        assert!(weighted_l1_norm(&[1.0], &[1.0, 1.0]).is_err());
    }

    #[test]
    fn prox_examples() {
        let z = [3.0, -1.0, 0.25];
        assert_eq!(prox_weighted_l1(&z, &[1.0, 1.0, 1.0], 1e-300), z.to_vec());
        assert_eq!(prox_weighted_l1(&[3.0, -1.0], &[1.0, 2.0], 1.0), vec![2.0, 0.0]);
        assert_eq!(prox_weighted_l1(&[0.5, -1.0], &[1.0, 2.0], 1.0), vec![0.0, 0.0]);
    }

    #[test]
    fn operator_norm_examples() {
        assert!((operator_norm(&DMatrix::identity(3, 3)) - 1.0).abs() < 1e-12);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0, 5.0]));
        assert!((operator_norm(&d) - 5.0).abs() < 1e-9);
        assert_eq!(operator_norm(&DMatrix::zeros(3, 4)), 0.0);
        let mut rng = seeded(8);
        let a = DMatrix::from_fn(10, 20, |_, _| rng.random_range(-1.0..1.0));
        let svd_norm = a.clone().svd(false, false).singular_values.max();
        assert!((operator_norm(&a) - svd_norm).abs() <= 1e-5 * svd_norm);
    }

    #[test]
    fn wqcbp_zero_when_eta_covers_data() {
        let a = mat(2, 3, &[1.0, 0.5, -0.2, 0.3, 1.0, 0.7]);
        let y = DVector::from_vec(vec![0.3, -0.4]);
        let u = DVector::from_element(3, 1.0);
        let sol = solve_system(&a, &y, &u, &Decoder::Wqcbp { eta: 0.5 }, &SolverOptions::default()).unwrap();
        assert_eq!(sol.x, DVector::zeros(3));
        assert_eq!(sol.objective, 0.0);
    }

    #[test]
    fn one_dimensional_cases() {
        let a = mat(1, 1, &[1.0]);
        let y = DVector::from_vec(vec![2.0]);
        let u = DVector::from_element(1, 1.0);
        let opts = SolverOptions::default();
        let sol = solve_system(&a, &y, &u, &Decoder::Wqcbp { eta: 0.0 }, &opts).unwrap();
        assert!((sol.x[0] - 2.0).abs() < 1e-7, "{}", sol.x[0]);

        let sol = solve_system(&a, &y, &u, &Decoder::WsrLasso { lambda: 0.5 }, &opts).unwrap();
        assert!(sol.x[0].abs() < 1e-7, "{}", sol.x[0]);
        let sol = solve_system(&a, &y, &u, &Decoder::WsrLasso { lambda: 2.0 }, &opts).unwrap();
        assert!((sol.x[0] - 2.0).abs() < 1e-7, "{}", sol.x[0]);

        // WLASSO: |z| + lambda (z - 2)^2 is minimised at 2 - 1/(2 lambda)
        let sol = solve_system(&a, &y, &u, &Decoder::Wlasso { lambda: 1.0 }, &opts).unwrap();
        assert!((sol.x[0] - 1.5).abs() < 1e-7, "{}", sol.x[0]);
    }

    #[test]
    fn infeasible_wqcbp_is_reported() {
        // overdetermined with inconsistent data
        let a = mat(2, 1, &[1.0, 1.0]);
        let y = DVector::from_vec(vec![1.0, -1.0]);
        let u = DVector::from_element(1, 1.0);
        let err = solve_system(&a, &y, &u, &Decoder::Wqcbp { eta: 0.1 }, &SolverOptions::default());
        assert!(matches!(err, Err(Error::Infeasible { .. })));
        // zero matrix
        let a = DMatrix::zeros(2, 2);
        let y = DVector::from_vec(vec![1.0, 0.0]);
        let u = DVector::from_element(2, 1.0);
        let err = solve_system(&a, &y, &u, &Decoder::Wqcbp { eta: 0.5 }, &SolverOptions::default());
        assert!(matches!(err, Err(Error::Infeasible { .. })));
    }

    #[test]
    fn rejects_bad_inputs() {
        let a = mat(1, 2, &[1.0, f64::NAN]);
        let y = DVector::from_vec(vec![1.0]);
        let u = DVector::from_element(2, 1.0);
        let opts = SolverOptions::default();
        assert!(matches!(
            solve_system(&a, &y, &u, &Decoder::Wlasso { lambda: 1.0 }, &opts),
            Err(Error::NonFinite(_))
        ));
        let a = mat(1, 2, &[1.0, 0.0]);
        assert!(solve_system(&a, &y, &u, &Decoder::Wlasso { lambda: 0.0 }, &opts).is_err());
        assert!(solve_system(&a, &y, &u, &Decoder::Wqcbp { eta: -1.0 }, &opts).is_err());
        let bad_v = Decoder::WladLasso {
            lambda: 1.0,
            data_weights: Some(vec![0.5]),
        };
        assert!(solve_system(&a, &y, &u, &bad_v, &opts).is_err());
    }

    #[test]
    fn interpolation_on_square_systems() {
        let mut rng = seeded(21);
        for _ in 0..5 {
            let n = 6;
            let a = DMatrix::from_fn(n, n, |i, j| if i == j { 2.0 } else { 0.0 } + rng.random_range(-0.5..0.5));
            let y = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
            let u = DVector::from_fn(n, |_, _| rng.random_range(1.0..3.0));
            let exact = a.clone().lu().solve(&y).unwrap();
            let sol = solve_system(&a, &y, &u, &Decoder::Wqcbp { eta: 0.0 }, &SolverOptions::default()).unwrap();
            assert!((&sol.x - &exact).norm() <= 1e-6 * exact.norm());
        }
    }

    #[test]
    fn residual_matches_solution() {
        let mut rng = seeded(22);
        let a = DMatrix::from_fn(8, 15, |_, _| rng.random_range(-1.0..1.0));
        let y = DVector::from_fn(8, |_, _| rng.random_range(-1.0..1.0));
        let u = DVector::from_fn(15, |_, _| rng.random_range(1.0..2.0));
        for family in DecoderFamily::ALL {
            let sol = solve_system(&a, &y, &u, &family.with_parameter(0.3), &SolverOptions::default()).unwrap();
            let fresh = &a * &sol.x - &y;
            assert!((fresh - &sol.residual).amax() <= 1e-12);
        }
    }

    #[test]
    fn duality_gap_is_small_at_convergence() {
        let mut rng = seeded(23);
        let a = DMatrix::from_fn(10, 25, |_, _| rng.random_range(-1.0..1.0) / 10f64.sqrt());
        let y = DVector::from_fn(10, |_, _| rng.random_range(-1.0..1.0));
        let u = DVector::from_fn(25, |_, _| rng.random_range(1.0..2.0));
        for decoder in [
            Decoder::Wqcbp { eta: 0.1 },
            Decoder::Wlasso { lambda: 3.0 },
            Decoder::WsrLasso { lambda: 2.0 },
            Decoder::WladLasso { lambda: 1.0, data_weights: None },
        ] {
            let sol = solve_system(&a, &y, &u, &decoder, &SolverOptions::default()).unwrap();
            assert!(sol.converged, "{decoder}");
            let gap = sol.duality_gap.unwrap();
            assert!(gap.abs() <= 1e-5 * (1.0 + sol.objective.abs()), "{decoder}: gap {gap}");
        }
    }

    #[test]
    fn trace_rows_are_recorded() {
        let a = mat(2, 2, &[1.0, 0.2, 0.1, 1.0]);
        let y = DVector::from_vec(vec![1.0, 2.0]);
        let u = DVector::from_element(2, 1.0);
        let opts = SolverOptions {
            trace_every: 5,
            ..SolverOptions::default()
        };
        let sol = solve_system(&a, &y, &u, &Decoder::Wlasso { lambda: 2.0 }, &opts).unwrap();
        assert!(!sol.trace.is_empty());
        assert!(sol.trace.iter().all(|r| r.iteration % 5 == 0));
        let mut buf = Vec::new();
        write_trace_csv(&sol.trace, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("iteration,objective,residual_norm,step\n"));
        assert_eq!(text.lines().count(), sol.trace.len() + 1);
    }
}
