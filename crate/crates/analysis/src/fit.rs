//! Damped Gauss-Newton (Levenberg-Marquardt) fits of scaling laws in N.
//!
//! Parameters are solved for internally as `(ln c, a[, b])`, which keeps the
//! amplitude positive and the normal equations well scaled.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

const MAX_ITERATIONS: usize = 500;
const PARAMETER_TOLERANCE: f64 = 1e-10;
const MAX_DAMPING: f64 = 1e20;
pub const MIN_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum FitModel {
    /// `c N^a`
    PowerLaw,
    /// `c N^a ln(b N)`
    LogCorrected,
}

impl FitModel {
    fn n_params(self) -> usize {
        match self {
            FitModel::PowerLaw => 2,
            FitModel::LogCorrected => 3,
        }
    }
}

/// Where the residuals of the least-squares problem are measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum ResidualSpace {
    /// `ln y - ln f(N)`
    #[default]
    Log,
    /// `y - f(N)`
    Linear,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub model: FitModel,
    pub residual_space: ResidualSpace,
    /// `(c, a)` or `(c, a, b)`.
    pub params: Vec<f64>,
    /// One standard deviation, same layout as `params`.
    pub param_uncertainties: Vec<f64>,
    /// RMS of `ln y - ln f(N)` at the optimum.
    pub residual: f64,
    pub iterations: usize,
}

impl FitResult {
    pub fn amplitude(&self) -> f64 {
        self.params[0]
    }

    pub fn exponent(&self) -> f64 {
        self.params[1]
    }

    pub fn log_scale(&self) -> Option<f64> {
        self.params.get(2).copied()
    }

    pub fn evaluate(&self, n: f64) -> f64 {
        let base = self.amplitude() * n.powf(self.exponent());
        match self.log_scale() {
            Some(b) => base * (b * n).ln(),
            None => base,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEntry {
    pub iteration: usize,
    pub sum_squares: f64,
    pub damping: f64,
    pub accepted: bool,
}

#[derive(Debug, Error)]
pub enum FitError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("fit data must be positive and finite (point {index}: N = {n}, y = {y})")]
    InvalidData { index: usize, n: f64, y: f64 },

    #[error("singular normal equations after {} iterations", trace.len())]
    Singular { trace: Vec<TraceEntry> },

    #[error("no convergence after {} iterations (last sum of squares {:e})", trace.len(), trace.last().map_or(f64::NAN, |t| t.sum_squares))]
    NoConvergence { trace: Vec<TraceEntry> },
}

impl FitError {
    pub fn is_validation(&self) -> bool {
        matches!(self, FitError::TooFewPoints { .. } | FitError::InvalidData { .. })
    }

    pub fn trace(&self) -> &[TraceEntry] {
        match self {
            FitError::Singular { trace } | FitError::NoConvergence { trace } => trace,
            _ => &[],
        }
    }
}

struct Problem<'a> {
    n: &'a [f64],
    y: &'a [f64],
    model: FitModel,
    space: ResidualSpace,
}

impl Problem<'_> {
    /// Log of the model and its gradient in the internal parameters.
    fn log_model(&self, p: &DVector<f64>, n: f64) -> (f64, [f64; 3]) {
        let ln_n = n.ln();
        match self.model {
            FitModel::PowerLaw => (p[0] + p[1] * ln_n, [1.0, ln_n, 0.0]),
            FitModel::LogCorrected => {
                let lb = (p[2] * n).ln();
                (p[0] + p[1] * ln_n + lb.ln(), [1.0, ln_n, 1.0 / (p[2] * lb)])
            }
        }
    }

    fn admissible(&self, p: &DVector<f64>) -> bool {
        p.iter().all(|x| x.is_finite())
            && match self.model {
                FitModel::PowerLaw => true,
                FitModel::LogCorrected => p[2] > 0.0 && self.n.iter().all(|&n| p[2] * n > 1.0),
            }
    }

    fn residuals(&self, p: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let m = self.n.len();
        let k = self.model.n_params();
        let mut r = DVector::zeros(m);
        let mut jac = DMatrix::zeros(m, k);
        for (i, (&n, &y)) in self.n.iter().zip(self.y).enumerate() {
            let (g, dg) = self.log_model(p, n);
            let (ri, w) = match self.space {
                ResidualSpace::Log => (y.ln() - g, 1.0),
                ResidualSpace::Linear => {
                    let f = g.exp();
                    (y - f, f)
                }
            };
            r[i] = ri;
            for c in 0..k {
                jac[(i, c)] = -w * dg[c];
            }
        }
        (r, jac)
    }

    fn log_rms(&self, p: &DVector<f64>) -> f64 {
        let ss: f64 = self
            .n
            .iter()
            .zip(self.y)
            .map(|(&n, &y)| (y.ln() - self.log_model(p, n).0).powi(2))
            .sum();
        (ss / self.n.len() as f64).sqrt()
    }

    /// Linear regression of `ln y - ln ln(b0 N)` on `ln N`; `None` when all
    /// abscissae coincide.
    fn initial_guess(&self) -> Option<DVector<f64>> {
        let n_min = self.n.iter().copied().fold(f64::INFINITY, f64::min);
        let b0 = if n_min > 1.0 { 1.0 } else { 2.0 / n_min };
        let target: Vec<f64> = self
            .n
            .iter()
            .zip(self.y)
            .map(|(&n, &y)| match self.model {
                FitModel::PowerLaw => y.ln(),
                FitModel::LogCorrected => y.ln() - (b0 * n).ln().ln(),
            })
            .collect();
        let x: Vec<f64> = self.n.iter().map(|n| n.ln()).collect();
        let m = x.len() as f64;
        let (mx, my) = (x.iter().sum::<f64>() / m, target.iter().sum::<f64>() / m);
        let sxy: f64 = x.iter().zip(&target).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
        if sxx <= 1e-12 * x.iter().map(|a| a * a).sum::<f64>() {
            return None;
        }
        let slope = sxy / sxx;
        let mut p = vec![my - slope * mx, slope];
        if self.model == FitModel::LogCorrected {
            p.push(b0);
        }
        Some(DVector::from_vec(p))
    }
}

/// Fits `model` to the points `(n, y)`.
pub fn fit_points(n: &[f64], y: &[f64], model: FitModel, space: ResidualSpace) -> Result<FitResult, FitError> {
    if n.len() < MIN_POINTS || n.len() != y.len() {
        return Err(FitError::TooFewPoints {
            needed: MIN_POINTS,
            got: n.len().min(y.len()),
        });
    }
    if let Some(index) = (0..n.len()).find(|&i| !(n[i] > 0.0 && y[i] > 0.0 && n[i].is_finite() && y[i].is_finite())) {
        return Err(FitError::InvalidData { index, n: n[index], y: y[index] });
    }
    let problem = Problem { n, y, model, space };

    let mut p = problem.initial_guess().ok_or(FitError::Singular { trace: Vec::new() })?;
    let (mut r, mut jac) = problem.residuals(&p);
    let mut ss = r.norm_squared();
    let mut damping = 1e-3;
    let mut trace = Vec::new();

    for iteration in 1..=MAX_ITERATIONS {
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        let mut a = jtj.clone();
        for i in 0..a.nrows() {
            a[(i, i)] += damping * jtj[(i, i)];
        }
        let Some(chol) = a.cholesky() else {
            return Err(FitError::Singular { trace });
        };
        let step = chol.solve(&(-g));
        let trial = &p + &step;
        let change = step.norm() / p.norm().max(f64::MIN_POSITIVE);

        let candidate = problem.admissible(&trial).then(|| problem.residuals(&trial));
        let accepted = match &candidate {
            Some((rt, _)) => rt.norm_squared() <= ss,
            None => false,
        };
        if accepted {
            let (rt, jt) = candidate.expect("checked above");
            p = trial;
            ss = rt.norm_squared();
            r = rt;
            jac = jt;
            damping = (damping / 10.0).max(1e-12);
        } else {
            damping *= 10.0;
        }
        trace.push(TraceEntry {
            iteration,
            sum_squares: ss,
            damping,
            accepted,
        });
        log::trace!("fit iteration {iteration}: ss = {ss:e}, damping = {damping:e}, change = {change:e}");

        if change < PARAMETER_TOLERANCE || ss == 0.0 {
            return finish(&problem, p, &jac, ss, iteration, trace);
        }
        if damping > MAX_DAMPING {
            break;
        }
    }
    Err(FitError::NoConvergence { trace })
}

fn finish(
    problem: &Problem,
    p: DVector<f64>,
    jac: &DMatrix<f64>,
    ss: f64,
    iterations: usize,
    trace: Vec<TraceEntry>,
) -> Result<FitResult, FitError> {
    let m = problem.n.len();
    let k = p.len();
    let dof = m.saturating_sub(k).max(1) as f64;
    let Some(inverse) = (jac.transpose() * jac).try_inverse() else {
        return Err(FitError::Singular { trace });
    };
    let cov = inverse * (ss / dof);
    let sigma: Vec<f64> = (0..k).map(|i| cov[(i, i)].max(0.0).sqrt()).collect();

    let c = p[0].exp();
    let mut params = vec![c, p[1]];
    let mut param_uncertainties = vec![c * sigma[0], sigma[1]];
    if problem.model == FitModel::LogCorrected {
        params.push(p[2]);
        param_uncertainties.push(sigma[2]);
    }
    Ok(FitResult {
        model: problem.model,
        residual_space: problem.space,
        params,
        param_uncertainties,
        residual: problem.log_rms(&p),
        iterations,
    })
}
