//! Capped-occupancy statistics and the two-constraint ensemble solver.

mod ensemble;
mod levels;
mod occupancy;

use thiserror::Error;

pub use ensemble::{energy_bounds, solve_ensemble, EnsembleSolution, MAX_NEWTON_ITERATIONS};
pub use levels::{Level, LevelSystem};
pub use occupancy::{
    bose, fermi, occupancy_closed, occupancy_direct, series_window, state_partition, StatPoint,
    SATURATION, SERIES_WINDOW,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("argument must be finite, got {0}")]
    NonFinite(f64),

    #[error("order {n} is below the minimum {min} for this quantity")]
    OrderTooSmall { n: usize, min: usize },

    #[error("the Bose function is defined only for x > 0, got {0}")]
    BoseDomain(f64),

    #[error("invalid level system: {0}")]
    InvalidLevels(String),

    #[error("cannot read level table: {0}")]
    LevelFile(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("infeasible targets: {0}")]
    Infeasible(String),

    #[error(
        "no convergence after {iterations} iterations: \
         particle residual {particle_residual:e}, energy residual {energy_residual:e}"
    )]
    NoConvergence {
        particle_residual: f64,
        energy_residual: f64,
        iterations: usize,
    },
}
