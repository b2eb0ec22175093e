//! L1-penalized linear regression: coordinate descent solver, feature
//! scaling, cross-validated penalty selection and the ablation runner.

mod cv;
mod pipeline;
mod scale;
mod solver;

pub use cv::{fold_assignment, select_lambda, train_test_split, CvResult, TRAIN_FRACTION};
pub use pipeline::{
    ablation_runs, default_grid, evaluate_r2, fit_regression, r_squared, AblationResult, Coefficient, Dataset, LassoModel,
    RegressionConfig, RegressionReport, Selection, Subset,
};
pub use scale::{standardize, Scaler};
pub use solver::{fit_lasso, lambda_grid, predict, soft_threshold, Gram, LassoFit, SolverOptions, DEFAULT_MAX_SWEEPS, DEFAULT_TOL};

#[derive(Debug, thiserror::Error)]
pub enum LassoError {
    #[error("no rows to fit")]
    Empty,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("design or target contains non-finite values")]
    NonFinite,
    #[error("penalty must be finite and non-negative, got {0}")]
    BadLambda(f64),
    #[error("penalty grid is empty")]
    EmptyGrid,
    #[error("cross-validation: {0}")]
    Folds(String),
    #[error("{0}")]
    Schema(String),
}
