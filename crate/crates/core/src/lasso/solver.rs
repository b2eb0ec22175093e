use super::LassoError;

pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_SWEEPS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stop when no coefficient moves more than this in a sweep.
    pub tol: f64,
    pub max_sweeps: usize,
    /// Keep the objective value after every sweep.
    pub trace: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: DEFAULT_TOL, max_sweeps: DEFAULT_MAX_SWEEPS, trace: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    pub intercept: f64,
    pub beta: Vec<f64>,
    pub lambda: f64,
    pub sweeps: usize,
    pub converged: bool,
    /// Objective after each sweep (empty unless tracing).
    pub objective: Vec<f64>,
}

pub fn soft_threshold(z: f64, gamma: f64) -> f64 {
    if z > gamma {
        z - gamma
    } else if z < -gamma {
        z + gamma
    } else {
        0.0
    }
}

/// Centered sufficient statistics of a design: `G = XcᵀXc/n`,
/// `c = Xcᵀyc/n`. Reused across penalties for warm-started paths.
#[derive(Debug, Clone)]
pub struct Gram {
    p: usize,
    g: Vec<f64>,
    c: Vec<f64>,
    yy: f64,
    x_mean: Vec<f64>,
    y_mean: f64,
}

impl Gram {
    pub fn new(x: &[Vec<f64>], y: &[f64]) -> Result<Gram, LassoError> {
        let n = x.len();
        if n == 0 {
            return Err(LassoError::Empty);
        }
        if y.len() != n {
            return Err(LassoError::Dimension(format!("{n} rows but {} targets", y.len())));
        }
        let p = x[0].len();
        if let Some(r) = x.iter().position(|r| r.len() != p) {
            return Err(LassoError::Dimension(format!("row {r} has {} columns, expected {p}", x[r].len())));
        }
        if x.iter().flatten().chain(y).any(|v| !v.is_finite()) {
            return Err(LassoError::NonFinite);
        }
        let nf = n as f64;
        let x_mean: Vec<f64> = (0..p).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / nf).collect();
        let y_mean = y.iter().sum::<f64>() / nf;
        let mut g = vec![0.0; p * p];
        let mut c = vec![0.0; p];
        let mut yy = 0.0;
        let mut xc = vec![0.0; p];
        for (row, &yi) in x.iter().zip(y) {
            for j in 0..p {
                xc[j] = row[j] - x_mean[j];
            }
            let yc = yi - y_mean;
            yy += yc * yc;
            for j in 0..p {
                c[j] += xc[j] * yc;
                for k in j..p {
                    g[j * p + k] += xc[j] * xc[k];
                }
            }
        }
        for j in 0..p {
            c[j] /= nf;
            for k in j..p {
                g[j * p + k] /= nf;
                g[k * p + j] = g[j * p + k];
            }
        }
        Ok(Gram { p, g, c, yy: yy / nf, x_mean, y_mean })
    }

    pub fn n_features(&self) -> usize {
        self.p
    }

    /// Smallest penalty at which every coefficient is zero: `max |Xᵀy|/n`.
    pub fn lambda_max(&self) -> f64 {
        self.c.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `(1/2n)‖y − Xβ‖² + λ‖β‖₁` on centered data, given `q = Gβ`.
    fn objective(&self, beta: &[f64], q: &[f64], lambda: f64) -> f64 {
        let quad: f64 = beta.iter().zip(q).map(|(b, q)| b * q).sum();
        let lin: f64 = beta.iter().zip(&self.c).map(|(b, c)| b * c).sum();
        let l1: f64 = beta.iter().map(|b| b.abs()).sum();
        0.5 * self.yy - lin + 0.5 * quad + lambda * l1
    }

    fn gram_times(&self, beta: &[f64]) -> Vec<f64> {
        (0..self.p).map(|j| (0..self.p).map(|k| self.g[j * self.p + k] * beta[k]).sum()).collect()
    }

    /// Cyclic coordinate descent with soft-thresholding, optionally warm
    /// started. Zero-variance columns keep a zero coefficient.
    pub fn solve(&self, lambda: f64, warm: Option<&[f64]>, opts: SolverOptions) -> Result<LassoFit, LassoError> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(LassoError::BadLambda(lambda));
        }
        let p = self.p;
        let mut beta = match warm {
            Some(w) if w.len() == p => w.to_vec(),
            Some(w) => return Err(LassoError::Dimension(format!("warm start has {} coefficients, expected {p}", w.len()))),
            None => vec![0.0; p],
        };
        for j in 0..p {
            if self.g[j * p + j] <= 0.0 {
                beta[j] = 0.0;
            }
        }
        let mut objective = Vec::new();
        let mut sweeps = 0;
        let mut converged = false;
        while sweeps < opts.max_sweeps {
            // Recomputed each sweep so rounding in the running update cannot
            // accumulate.
            let mut q = self.gram_times(&beta);
            let mut max_delta: f64 = 0.0;
            for j in 0..p {
                let gjj = self.g[j * p + j];
                if gjj <= 0.0 {
                    continue;
                }
                let rho = self.c[j] - (q[j] - gjj * beta[j]);
                let new = soft_threshold(rho, lambda) / gjj;
                let delta = new - beta[j];
                if delta != 0.0 {
                    let col = &self.g[j * p..(j + 1) * p];
                    for (qk, gk) in q.iter_mut().zip(col) {
                        *qk += delta * gk;
                    }
                    beta[j] = new;
                    max_delta = max_delta.max(delta.abs());
                }
            }
            sweeps += 1;
            if opts.trace {
                objective.push(self.objective(&beta, &q, lambda));
            }
            if max_delta < opts.tol {
                converged = true;
                break;
            }
        }
        let intercept = self.y_mean - beta.iter().zip(&self.x_mean).map(|(b, m)| b * m).sum::<f64>();
        Ok(LassoFit { intercept, beta, lambda, sweeps, converged, objective })
    }
}

/// Fits `y ≈ intercept + Xβ` minimizing `(1/2n)‖y − Xβ‖² + λ‖β‖₁`. The
/// intercept is unpenalized (data are centered internally).
pub fn fit_lasso(x: &[Vec<f64>], y: &[f64], lambda: f64, opts: SolverOptions) -> Result<LassoFit, LassoError> {
    Gram::new(x, y)?.solve(lambda, None, opts)
}

pub fn predict(fit: &LassoFit, x: &[Vec<f64>]) -> Vec<f64> {
    x.iter().map(|r| fit.intercept + r.iter().zip(&fit.beta).map(|(a, b)| a * b).sum::<f64>()).collect()
}

/// `n` penalties log-spaced from `lambda_max` down to `ratio·lambda_max`,
/// largest first.
pub fn lambda_grid(lambda_max: f64, n: usize, ratio: f64) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    if lambda_max <= 0.0 || n == 1 {
        return vec![lambda_max.max(0.0)];
    }
    let (hi, lo) = (lambda_max.ln(), (lambda_max * ratio).ln());
    (0..n)
        .map(|i| match i {
            0 => lambda_max,
            i if i == n - 1 => lambda_max * ratio,
            i => (hi + (lo - hi) * i as f64 / (n - 1) as f64).exp(),
        })
        .collect()
}
