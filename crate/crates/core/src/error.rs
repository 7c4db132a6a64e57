use thiserror::Error;

/// Errors raised by the channel model, the solvers and the sweep harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid system parameters: {0}")]
    InvalidParams(String),

    #[error("invalid channel realization: {0}")]
    InvalidChannel(String),

    #[error("expected a channel with {expected} paths, got {found}")]
    PathCount { expected: usize, found: usize },

    #[error("infeasible trajectory: {0}")]
    InfeasibleTrajectory(String),

    #[error("movement graph needs d_max >= 1, but v_max*tau/delta_s = {ratio}")]
    ReachTooShort { ratio: f64 },

    #[error("invalid movement graph: {0}")]
    InvalidGraph(String),

    #[error("brute-force enumeration too large: {paths} candidate sequences exceeds the limit of {limit}")]
    OracleTooLarge { paths: f64, limit: f64 },

    #[error("no feasible path with {hops} hops")]
    NoFeasiblePath { hops: usize },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
