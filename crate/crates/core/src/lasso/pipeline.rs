use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{lambda_grid, predict, select_lambda, train_test_split, Gram, LassoError, LassoFit, Scaler, SolverOptions};
use crate::score::Metric;
use crate::syntax::KeyedTable;

/// Design matrix with its targets, keyed by `(stimulus_id, position)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub columns: Vec<String>,
    pub keys: Vec<(String, usize)>,
    pub x: Vec<Vec<f64>>,
    pub y: Vec<f64>,
    /// Feature columns dropped because every value was absent.
    pub dropped: Vec<String>,
}

impl Dataset {
    /// Joins feature rows with `target` from the target table. Every feature
    /// row needs a target. Columns that are entirely `NA` are dropped;
    /// partially missing columns are an error.
    pub fn from_tables(features: &KeyedTable, targets: &KeyedTable, target: &str) -> Result<Dataset, LassoError> {
        let t = targets.columns.iter().position(|c| c == target).ok_or_else(|| {
            LassoError::Schema(format!("target column '{target}' not found; target file has [{}]", targets.columns.join(", ")))
        })?;
        let mut by_key: BTreeMap<&(String, usize), f64> = BTreeMap::new();
        for (k, row) in targets.keys.iter().zip(&targets.rows) {
            let v = row[t].ok_or_else(|| LassoError::Schema(format!("target '{target}' missing for {} at {}", k.0, k.1)))?;
            if by_key.insert(k, v).is_some() {
                return Err(LassoError::Schema(format!("duplicate target row for {} at {}", k.0, k.1)));
            }
        }
        let p = features.columns.len();
        let keep: Vec<usize> = (0..p).filter(|&j| features.rows.iter().any(|r| r[j].is_some())).collect();
        let dropped = (0..p).filter(|j| !keep.contains(j)).map(|j| features.columns[j].clone()).collect();
        let mut x = Vec::with_capacity(features.rows.len());
        let mut y = Vec::with_capacity(features.rows.len());
        for (k, row) in features.keys.iter().zip(&features.rows) {
            let target = by_key
                .get(k)
                .ok_or_else(|| LassoError::Schema(format!("feature row {} at {} has no matching target row", k.0, k.1)))?;
            let vals = keep
                .iter()
                .map(|&j| row[j].ok_or_else(|| LassoError::Schema(format!("column '{}' missing for {} at {}", features.columns[j], k.0, k.1))))
                .collect::<Result<Vec<f64>, _>>()?;
            x.push(vals);
            y.push(*target);
        }
        Ok(Dataset { columns: keep.iter().map(|&j| features.columns[j].clone()).collect(), keys: features.keys.clone(), x, y, dropped })
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn subset(&self, rows: &[usize]) -> Dataset {
        Dataset {
            columns: self.columns.clone(),
            keys: rows.iter().map(|&i| self.keys[i].clone()).collect(),
            x: rows.iter().map(|&i| self.x[i].clone()).collect(),
            y: rows.iter().map(|&i| self.y[i]).collect(),
            dropped: self.dropped.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    LambdaMin,
    Lambda1se,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionConfig {
    pub grid_size: usize,
    pub min_ratio: f64,
    pub folds: usize,
    pub seed: u64,
    pub standardize_binary: bool,
    pub selection: Selection,
    /// Explicit penalty grid; replaces the log-spaced default.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
}

impl Default for RegressionConfig {
    fn default() -> Self {
        RegressionConfig {
            grid_size: 50,
            min_ratio: 1e-4,
            folds: 5,
            seed: 13,
            standardize_binary: true,
            selection: Selection::LambdaMin,
            grid: None,
        }
    }
}

/// `1 − SS_res/SS_tot`, undefined when the targets have no variance.
pub fn r_squared(y: &[f64], pred: &[f64]) -> Metric {
    if y.is_empty() {
        return Metric::Undefined;
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let ss_tot: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let ss_res: f64 = y.iter().zip(pred).map(|(v, p)| (v - p).powi(2)).sum();
    if ss_tot == 0.0 {
        Metric::Undefined
    } else {
        Metric::Defined(1.0 - ss_res / ss_tot)
    }
}

/// A fitted model that accepts raw (unstandardized) feature rows.
#[derive(Debug, Clone, PartialEq)]
pub struct LassoModel {
    pub columns: Vec<String>,
    pub scaler: Scaler,
    pub fit: LassoFit,
}

impl LassoModel {
    pub fn predict(&self, rows: &[Vec<f64>]) -> Vec<f64> {
        let refs: Vec<&[f64]> = rows.iter().map(Vec::as_slice).collect();
        predict(&self.fit, &self.scaler.transform(&refs))
    }

    /// Coefficients on the original feature scale.
    pub fn raw_coefficients(&self) -> Vec<f64> {
        self.fit.beta.iter().zip(&self.scaler.sd).map(|(b, s)| b / s).collect()
    }
}

pub fn evaluate_r2(model: &LassoModel, x_test: &[Vec<f64>], y_test: &[f64]) -> Metric {
    r_squared(y_test, &model.predict(x_test))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    /// Standardized-scale coefficient.
    pub value: f64,
    /// Coefficient per unit of the original feature.
    pub raw_value: f64,
    pub selected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionReport {
    pub n_rows: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub lambda: f64,
    pub lambda_min: f64,
    pub lambda_1se: f64,
    pub grid: Vec<f64>,
    pub cv_mean_mse: Vec<f64>,
    pub intercept: f64,
    pub coefficients: Vec<Coefficient>,
    pub zero_variance: Vec<String>,
    pub dropped_columns: Vec<String>,
    pub r2_train: Metric,
    pub r2_test: Metric,
    pub sweeps: usize,
    pub converged: bool,
}

impl RegressionReport {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }

    /// Selected coefficients by decreasing magnitude.
    pub fn top(&self, k: usize) -> Vec<&Coefficient> {
        let mut sel: Vec<&Coefficient> = self.coefficients.iter().filter(|c| c.selected).collect();
        sel.sort_by(|a, b| b.value.abs().total_cmp(&a.value.abs()).then_with(|| a.name.cmp(&b.name)));
        sel.truncate(k);
        sel
    }
}

/// Log-spaced grid from the standardized training split of `ds`.
pub fn default_grid(ds: &Dataset, cfg: &RegressionConfig) -> Result<Vec<f64>, LassoError> {
    let (train, _) = train_test_split(ds.x.len(), cfg.seed);
    if train.is_empty() {
        return Err(LassoError::Empty);
    }
    let rows: Vec<&[f64]> = train.iter().map(|&i| ds.x[i].as_slice()).collect();
    let xs = Scaler::fit(&rows, cfg.standardize_binary).transform(&rows);
    let yt: Vec<f64> = train.iter().map(|&i| ds.y[i]).collect();
    Ok(lambda_grid(Gram::new(&xs, &yt)?.lambda_max(), cfg.grid_size, cfg.min_ratio))
}

/// Split, cross-validate the penalty on the training rows, refit, and score.
pub fn fit_regression(ds: &Dataset, cfg: &RegressionConfig) -> Result<(RegressionReport, LassoModel), LassoError> {
    let grid = match &cfg.grid {
        Some(g) => g.clone(),
        None => default_grid(ds, cfg)?,
    };
    let (train, test) = train_test_split(ds.x.len(), cfg.seed);
    if train.is_empty() {
        return Err(LassoError::Empty);
    }
    let x_train: Vec<Vec<f64>> = train.iter().map(|&i| ds.x[i].clone()).collect();
    let y_train: Vec<f64> = train.iter().map(|&i| ds.y[i]).collect();
    let opts = SolverOptions::default();
    let cv = select_lambda(&x_train, &y_train, &grid, cfg.folds, cfg.seed, cfg.standardize_binary, opts)?;
    let lambda = match cfg.selection {
        Selection::LambdaMin => cv.lambda_min,
        Selection::Lambda1se => cv.lambda_1se,
    };
    let refs: Vec<&[f64]> = x_train.iter().map(Vec::as_slice).collect();
    let scaler = Scaler::fit(&refs, cfg.standardize_binary);
    let fit = Gram::new(&scaler.transform(&refs), &y_train)?.solve(lambda, None, opts)?;
    let model = LassoModel { columns: ds.columns.clone(), scaler, fit };
    let x_test: Vec<Vec<f64>> = test.iter().map(|&i| ds.x[i].clone()).collect();
    let y_test: Vec<f64> = test.iter().map(|&i| ds.y[i]).collect();
    let raw = model.raw_coefficients();
    let coefficients = ds
        .columns
        .iter()
        .enumerate()
        .map(|(j, name)| Coefficient { name: name.clone(), value: model.fit.beta[j], raw_value: raw[j], selected: model.fit.beta[j] != 0.0 })
        .collect();
    let report = RegressionReport {
        n_rows: ds.x.len(),
        n_train: train.len(),
        n_test: test.len(),
        lambda,
        lambda_min: cv.lambda_min,
        lambda_1se: cv.lambda_1se,
        grid,
        cv_mean_mse: cv.mean_mse,
        intercept: model.fit.intercept,
        coefficients,
        zero_variance: ds.columns.iter().zip(&model.scaler.zero_variance).filter(|(_, z)| **z).map(|(c, _)| c.clone()).collect(),
        dropped_columns: ds.dropped.clone(),
        r2_train: r_squared(&y_train, &model.predict(&x_train)),
        r2_test: evaluate_r2(&model, &x_test, &y_test),
        sweeps: model.fit.sweeps,
        converged: model.fit.converged,
    };
    Ok((report, model))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Subset {
    All,
    WithComma,
    WithoutComma,
    WithConjunction,
    WithoutConjunction,
}

impl Subset {
    pub const ALL: [Subset; 5] = [Subset::All, Subset::WithComma, Subset::WithoutComma, Subset::WithConjunction, Subset::WithoutConjunction];

    /// Row filter, or an explanation when the needed columns are missing.
    fn rows(self, ds: &Dataset) -> Result<Vec<usize>, String> {
        let col = |name: &str| ds.column(name).ok_or_else(|| format!("column '{name}' not in dataset"));
        let n = ds.x.len();
        let keep = |f: &dyn Fn(&[f64]) -> bool| (0..n).filter(|&i| f(&ds.x[i])).collect();
        Ok(match self {
            Subset::All => (0..n).collect(),
            Subset::WithComma | Subset::WithoutComma => {
                let c = col("comma_presence")?;
                let want = self == Subset::WithComma;
                keep(&|r| (r[c] == 1.0) == want)
            }
            Subset::WithConjunction | Subset::WithoutConjunction => {
                let (cc, sc) = (col("foll_pos_CCONJ")?, col("foll_pos_SCONJ")?);
                let want = self == Subset::WithConjunction;
                keep(&|r| (r[cc] == 1.0 || r[sc] == 1.0) == want)
            }
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AblationResult {
    pub subset: Subset,
    pub n_rows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clause_boundary_selected: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<RegressionReport>,
}

/// One fit per subset, all on the grid derived from the full dataset and
/// the same seed. Subsets that cannot be fitted are reported as skipped.
pub fn ablation_runs(ds: &Dataset, cfg: &RegressionConfig) -> Result<Vec<AblationResult>, LassoError> {
    let grid = match &cfg.grid {
        Some(g) => g.clone(),
        None => default_grid(ds, cfg)?,
    };
    let shared = RegressionConfig { grid: Some(grid), ..cfg.clone() };
    Ok(Subset::ALL
        .iter()
        .map(|&subset| {
            let skip = |n_rows, reason: String| AblationResult { subset, n_rows, skipped: Some(reason), clause_boundary_selected: None, report: None };
            let rows = match subset.rows(ds) {
                Ok(r) => r,
                Err(reason) => return skip(0, reason),
            };
            if rows.is_empty() {
                return skip(0, "no rows".into());
            }
            match fit_regression(&ds.subset(&rows), &shared) {
                Ok((report, _)) => AblationResult {
                    subset,
                    n_rows: rows.len(),
                    skipped: None,
                    clause_boundary_selected: report.coefficient("is_clause_boundary").map(|c| c.selected),
                    report: Some(report),
                },
                Err(e) => skip(rows.len(), e.to_string()),
            }
        })
        .collect())
}
