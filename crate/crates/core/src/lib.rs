//! Calibrated forecasting as a vector-valued approachability game.
//!
//! A forecaster restricted to a finite grid of probability distributions
//! plays against an arbitrary Nature. Each round's forecast/outcome pair
//! contributes one block to an average payoff vector; keeping that average
//! near an l1 ball is exactly the grid-restricted calibration criterion.
//! The crate provides the grid machinery ([`grid`]), block payoffs
//! ([`payoff`]), the l1-ball projection ([`projection`]), exact and
//! approximate minimax policies ([`oracle`]), the forecasters
//! ([`forecaster`], [`meta`]), Nature strategies ([`nature`]), calibration
//! scores ([`scoring`]) and a simultaneous-move game driver ([`sim`]).

pub mod error;
pub mod forecaster;
pub mod grid;
pub mod meta;
pub mod nature;
pub mod oracle;
pub mod payoff;
pub mod projection;
pub mod scoring;
pub mod sim;

pub use error::{CalibError, Result};
pub use forecaster::{DeterministicForecaster, ForecastStep, Forecaster, RoundRecord};
pub use grid::{build_grid, random_distribution, Distribution, EpsilonGrid};
pub use meta::{MetaForecastStep, MetaForecaster, MetaRoundRecord, RegimeSchedule};
pub use nature::{Nature, NatureSpec};
pub use oracle::{
    blackwell_policy, solve_minimax_exact, solve_minimax_mw, GameMatrix, MinimaxMethod,
    MinimaxSolution, Policy, PolicyDiagnostics,
};
pub use payoff::{payoff_vector, payoff_vector_mixed, BlockVector, PayoffAverage};
pub use projection::{Projection, ProjectionMethod, TargetSet};
pub use scoring::{
    bound_u, brier_score, gamma_prime_from_grid, l1_score, l2_distance_to_c, score_report,
    BinCounts, BinReport, ScoreReport, ScoreSnapshot,
};
pub use sim::{play, CheckpointSchedule, EngineStep, ForecastEngine, GameRun, TranscriptRow};
