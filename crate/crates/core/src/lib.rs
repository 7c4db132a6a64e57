//! Joint communication and trajectory optimization for a single movable
//! antenna on a line segment.
//!
//! The antenna transmits while it moves, so the objective is the average
//! rate over all slots of a block, not the rate at a final position.
//!
//! - [`model`]: field-response channel, rate, system parameters, trajectories.
//! - [`twopath`]: closed-form optimum for two-path channels.
//! - [`graph`]: grid discretization and the fixed-hop shortest path solver
//!   that is optimal on the grid for any number of paths.
//! - [`baselines`]: myopic, far-sighted and fixed-antenna benchmarks.
//! - [`montecarlo`]: channel sampling and rate sweeps.

pub mod baselines;
pub mod error;
pub mod graph;
pub mod model;
pub mod montecarlo;
pub mod twopath;

pub use error::{Error, Result};
pub use graph::{
    brute_force_oracle, build_graph, discretize, fixed_hop_shortest_path, path_to_trajectory, solve_graph, Grid,
    HopPath, MovementGraph,
};
pub use model::{
    achievable_rate, channel_gain, field_response_vector, two_path_gain, ChannelRealization, SystemParams, Trajectory,
};
pub use montecarlo::{
    average_rate, run_sweep, sample_channel, trajectory_trace, ChannelModelConfig, CoeffModel, Scheme, SweepConfig,
    SweepResult, SweepVariable,
};
pub use num_complex::Complex64;
pub use twopath::{closed_form_trajectory, coherent_positions, nearest_coherent, solve_twopath, CoherentSet};
