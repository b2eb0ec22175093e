use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{predict, Gram, LassoError, Scaler, SolverOptions};

pub const TRAIN_FRACTION: f64 = 0.8;

/// Shuffled split into `⌊0.8n⌋` training rows and the rest; both index
/// lists are returned sorted.
pub fn train_test_split(n: usize, seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = (n as f64 * TRAIN_FRACTION).floor() as usize;
    let mut train = idx[..n_train].to_vec();
    let mut test = idx[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    (train, test)
}

/// Fold id for each of `n` rows: a seeded shuffle dealt round-robin.
pub fn fold_assignment(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut fold = vec![0; n];
    for (i, &row) in idx.iter().enumerate() {
        fold[row] = i % k;
    }
    fold
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub grid: Vec<f64>,
    pub mean_mse: Vec<f64>,
    pub se_mse: Vec<f64>,
    pub lambda_min: f64,
    /// Largest penalty within one standard error of the best.
    pub lambda_1se: f64,
}

/// Mean squared error of the descending-penalty path fitted on `train`
/// (standardized on itself) and scored on `valid`.
fn path_mse(x: &[Vec<f64>], y: &[f64], train: &[usize], valid: &[usize], grid: &[f64], standardize_binary: bool, opts: SolverOptions) -> Result<Vec<f64>, LassoError> {
    let rows: Vec<&[f64]> = train.iter().map(|&i| x[i].as_slice()).collect();
    let scaler = Scaler::fit(&rows, standardize_binary);
    let xt = scaler.transform(&rows);
    let yt: Vec<f64> = train.iter().map(|&i| y[i]).collect();
    let xv = scaler.transform(&valid.iter().map(|&i| x[i].as_slice()).collect::<Vec<_>>());
    let yv: Vec<f64> = valid.iter().map(|&i| y[i]).collect();
    let gram = Gram::new(&xt, &yt)?;
    let mut order: Vec<usize> = (0..grid.len()).collect();
    order.sort_by(|&a, &b| grid[b].total_cmp(&grid[a]));
    let mut mse = vec![0.0; grid.len()];
    let mut warm: Option<Vec<f64>> = None;
    for g in order {
        let fit = gram.solve(grid[g], warm.as_deref(), opts)?;
        let pred = predict(&fit, &xv);
        mse[g] = pred.iter().zip(&yv).map(|(p, t)| (p - t).powi(2)).sum::<f64>() / yv.len() as f64;
        warm = Some(fit.beta);
    }
    Ok(mse)
}

/// K-fold cross-validation over `grid`. Standardization is refitted inside
/// every fold. Folds run in parallel; results do not depend on scheduling.
pub fn select_lambda(
    x: &[Vec<f64>],
    y: &[f64],
    grid: &[f64],
    k: usize,
    seed: u64,
    standardize_binary: bool,
    opts: SolverOptions,
) -> Result<CvResult, LassoError> {
    if grid.is_empty() {
        return Err(LassoError::EmptyGrid);
    }
    if k < 2 {
        return Err(LassoError::Folds(format!("need at least 2 folds, got {k}")));
    }
    let fold = fold_assignment(x.len(), k, seed);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); k];
    for (row, &f) in fold.iter().enumerate() {
        members[f].push(row);
    }
    if let Some((f, m)) = members.iter().enumerate().find(|(_, m)| m.len() < 2) {
        return Err(LassoError::Folds(format!("fold {f} has {} rows; at least 2 needed", m.len())));
    }
    let per_fold: Vec<Vec<f64>> = (0..k)
        .into_par_iter()
        .map(|f| {
            let train: Vec<usize> = (0..x.len()).filter(|&r| fold[r] != f).collect();
            path_mse(x, y, &train, &members[f], grid, standardize_binary, opts)
        })
        .collect::<Result<_, _>>()?;
    let kf = k as f64;
    let mean_mse: Vec<f64> = (0..grid.len()).map(|g| per_fold.iter().map(|m| m[g]).sum::<f64>() / kf).collect();
    let se_mse: Vec<f64> = (0..grid.len())
        .map(|g| {
            let sd = (per_fold.iter().map(|m| (m[g] - mean_mse[g]).powi(2)).sum::<f64>() / (kf - 1.0)).sqrt();
            sd / kf.sqrt()
        })
        .collect();
    // Ties go to the larger penalty.
    let best = (0..grid.len())
        .min_by(|&a, &b| mean_mse[a].total_cmp(&mean_mse[b]).then(grid[b].total_cmp(&grid[a])))
        .expect("grid is non-empty");
    let bound = mean_mse[best] + se_mse[best];
    let lambda_1se = (0..grid.len()).filter(|&g| mean_mse[g] <= bound).map(|g| grid[g]).fold(grid[best], f64::max);
    Ok(CvResult { grid: grid.to_vec(), mean_mse, se_mse, lambda_min: grid[best], lambda_1se })
}
