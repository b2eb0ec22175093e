use serde::{Deserialize, Serialize};

/// Per-column standardization fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub mean: Vec<f64>,
    /// Sample standard deviation (n − 1); 1 for columns left unscaled.
    pub sd: Vec<f64>,
    /// Columns with no variance in the training rows; they map to 0.
    pub zero_variance: Vec<bool>,
    /// Whether 0/1 columns were scaled like the others.
    pub standardize_binary: bool,
}

fn is_binary(col: impl Iterator<Item = f64>) -> bool {
    col.into_iter().all(|v| v == 0.0 || v == 1.0)
}

impl Scaler {
    /// Fits on `rows`. With `standardize_binary == false`, 0/1 columns are
    /// only centered.
    pub fn fit(rows: &[&[f64]], standardize_binary: bool) -> Scaler {
        let p = rows.first().map_or(0, |r| r.len());
        let n = rows.len() as f64;
        let mut mean = vec![0.0; p];
        let mut sd = vec![1.0; p];
        let mut zero_variance = vec![false; p];
        for j in 0..p {
            mean[j] = rows.iter().map(|r| r[j]).sum::<f64>() / n;
            let ss: f64 = rows.iter().map(|r| (r[j] - mean[j]).powi(2)).sum();
            let s = if rows.len() > 1 { (ss / (n - 1.0)).sqrt() } else { 0.0 };
            if s == 0.0 {
                zero_variance[j] = true;
                sd[j] = 1.0;
            } else if standardize_binary || !is_binary(rows.iter().map(|r| r[j])) {
                sd[j] = s;
            }
        }
        Scaler { mean, sd, zero_variance, standardize_binary }
    }

    pub fn transform_row(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, v)| if self.zero_variance[j] { 0.0 } else { (v - self.mean[j]) / self.sd[j] })
            .collect()
    }

    pub fn transform(&self, rows: &[&[f64]]) -> Vec<Vec<f64>> {
        rows.iter().map(|r| self.transform_row(r)).collect()
    }
}

/// Fits a scaler on the `fit_on` rows of `x` and applies it to every row.
pub fn standardize(x: &[Vec<f64>], fit_on: &[usize], standardize_binary: bool) -> (Scaler, Vec<Vec<f64>>) {
    let train: Vec<&[f64]> = fit_on.iter().map(|&i| x[i].as_slice()).collect();
    let scaler = Scaler::fit(&train, standardize_binary);
    let all: Vec<&[f64]> = x.iter().map(Vec::as_slice).collect();
    let out = scaler.transform(&all);
    (scaler, out)
}
