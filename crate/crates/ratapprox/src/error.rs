use nalgebra::DVector;
use thiserror::Error;

/// Errors produced by the approximation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A tabulated basis or sampled target was queried at a point that is
    /// not one of its abscissae.
    #[error("query point t = {t} is not on the tabulation grid")]
    OffGrid { t: f64 },

    /// The denominator linear form is nonpositive at a grid point, so the
    /// ratio (and everything derived from it) is undefined there.
    #[error("infeasible point: denominator {denom} at grid index {index}")]
    InfeasiblePoint { index: usize, denom: f64 },

    /// Dykstra ran out of sweeps while the iterate was still moving.
    #[error(
        "projection did not converge within {sweeps} sweeps \
         (violation {violation:.3e}, last sweep change {change:.3e})"
    )]
    ProjectionBudget {
        sweeps: usize,
        violation: f64,
        change: f64,
        best: DVector<f64>,
    },

    /// The projection iterate stopped moving while still violating some
    /// constraint: the halfspace intersection is empty.
    #[error("projection stalled at violation {violation:.3e}; intersection appears empty")]
    ProjectionStalled { violation: f64, best: DVector<f64> },

    /// No generator produced an acceptable step before alpha fell below
    /// the configured floor.
    #[error(
        "linesearch failed: no generator accepted above alpha_min = {alpha_min:.3e} \
         ({generators} generators tried, best ratio {best_ratio:.3e})"
    )]
    LinesearchFailure {
        alpha_min: f64,
        generators: usize,
        best_ratio: f64,
    },

    /// A finite-difference probe left the region where the denominator is
    /// positive; retry with a smaller step.
    #[error("finite-difference step {step:.3e} loses denominator positivity at grid index {index}")]
    FdStepTooLarge { index: usize, step: f64 },

    /// The minimum-norm-point iteration ran out of budget.
    #[error("hull minimisation budget exhausted (best norm {norm:.6e})")]
    HullBudget { norm: f64 },

    /// A level-set feasibility probe could neither confirm nor refute
    /// feasibility within its sweep budget.
    #[error("level-set feasibility indeterminate at z = {z}: {reason}")]
    OracleIndeterminate { z: f64, reason: String },

    #[error("csv error at line {line}: {msg}")]
    Csv { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
