//! Sweeps, scaling fits and report rendering on top of `magic-core`.

pub mod cli;
pub mod error;
pub mod fit;
pub mod report;
pub mod sweep;

pub use error::AppError;
pub use fit::{fit_points, FitError, FitModel, FitResult, ResidualSpace};
pub use sweep::{fit_scaling, run_sweep, SweepColumn, SweepRow};
