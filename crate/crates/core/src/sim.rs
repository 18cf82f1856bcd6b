//! The game driver: queries the forecaster and Nature for round `t`, only
//! then reveals either move to the other side.

use crate::error::{CalibError, Result};
use crate::forecaster::{DeterministicForecaster, Forecaster};
use crate::grid::Distribution;
use crate::meta::MetaForecaster;
use crate::nature::Nature;
use crate::scoring::ScoreSnapshot;

/// A committed forecast in driver terms. `regime` is 0 for single-grid
/// forecasters.
#[derive(Debug, Clone)]
pub struct EngineStep {
    pub regime: u32,
    pub k: usize,
    pub point: Distribution,
}

/// Anything that can play the forecaster side of a game.
pub trait ForecastEngine {
    fn forecast_step(&mut self) -> Result<EngineStep>;
    fn observe_outcome(&mut self, outcome: usize) -> Result<()>;
    /// Deterministic engines may legally be shown to the contrarian.
    fn is_deterministic(&self) -> bool {
        false
    }
    fn snapshot(&self) -> ScoreSnapshot;
}

impl ForecastEngine for Forecaster {
    fn forecast_step(&mut self) -> Result<EngineStep> {
        let step = self.forecast()?;
        Ok(EngineStep {
            regime: 0,
            k: step.k,
            point: step.point,
        })
    }

    fn observe_outcome(&mut self, outcome: usize) -> Result<()> {
        self.observe(outcome).map(|_| ())
    }

    fn snapshot(&self) -> ScoreSnapshot {
        self.scores()
    }
}

impl ForecastEngine for DeterministicForecaster {
    fn forecast_step(&mut self) -> Result<EngineStep> {
        let (k, point) = self.forecast()?;
        Ok(EngineStep {
            regime: 0,
            k,
            point,
        })
    }

    fn observe_outcome(&mut self, outcome: usize) -> Result<()> {
        self.observe(outcome).map(|_| ())
    }

    fn is_deterministic(&self) -> bool {
        true
    }

    fn snapshot(&self) -> ScoreSnapshot {
        self.scores()
    }
}

impl ForecastEngine for MetaForecaster {
    fn forecast_step(&mut self) -> Result<EngineStep> {
        let step = self.forecast()?;
        Ok(EngineStep {
            regime: step.regime,
            k: step.k,
            point: step.point,
        })
    }

    fn observe_outcome(&mut self, outcome: usize) -> Result<()> {
        self.observe(outcome).map(|_| ())
    }

    fn snapshot(&self) -> ScoreSnapshot {
        self.scores()
    }
}

/// When to record cumulative scores.
#[derive(Debug, Clone, Copy)]
pub enum CheckpointSchedule {
    /// At every power of two (plus the final round). The default.
    PowersOfTwo,
    /// Every `n` rounds (plus the final round).
    Every(u64),
}

impl CheckpointSchedule {
    fn hits(&self, t: u64) -> bool {
        match self {
            CheckpointSchedule::PowersOfTwo => t.is_power_of_two(),
            CheckpointSchedule::Every(n) => t.is_multiple_of(*n),
        }
    }
}

/// One transcript row: round, regime (0 outside meta), grid index, the full
/// forecast distribution and the observed outcome.
#[derive(Debug, Clone)]
pub struct TranscriptRow {
    pub t: u64,
    pub regime: u32,
    pub k: usize,
    pub point: Distribution,
    pub outcome: usize,
}

/// A finished game: the transcript and the checkpointed scores.
#[derive(Debug)]
pub struct GameRun {
    pub rows: Vec<TranscriptRow>,
    pub checkpoints: Vec<ScoreSnapshot>,
}

/// Plays `rounds` rounds, enforcing simultaneity: the forecast is committed
/// before Nature is asked, and the current forecast is disclosed to Nature
/// only for deterministic engines.
pub fn play(
    engine: &mut dyn ForecastEngine,
    nature: &mut Nature,
    rounds: u64,
    schedule: CheckpointSchedule,
) -> Result<GameRun> {
    if let CheckpointSchedule::Every(n) = schedule {
        if n == 0 {
            return Err(CalibError::Config("checkpoint interval must be >= 1".into()));
        }
    }
    if nature.requires_current_forecast() && !engine.is_deterministic() {
        return Err(CalibError::Config(
            "contrarian nature can only face a deterministic forecaster".into(),
        ));
    }
    let mut rows = Vec::with_capacity(rounds.min(1 << 22) as usize);
    let mut checkpoints = Vec::new();
    for t in 1..=rounds {
        let step = engine.forecast_step()?;
        let shown = if engine.is_deterministic() {
            Some(&step.point)
        } else {
            None
        };
        let outcome = nature.next_outcome(shown)?;
        engine.observe_outcome(outcome)?;
        nature.record_round(&step.point, outcome);
        rows.push(TranscriptRow {
            t,
            regime: step.regime,
            k: step.k,
            point: step.point,
            outcome,
        });
        if schedule.hits(t) {
            checkpoints.push(engine.snapshot());
        }
    }
    if checkpoints.last().map(|s| s.rounds) != Some(rounds) {
        checkpoints.push(engine.snapshot());
    }
    Ok(GameRun {
        rows,
        checkpoints,
    })
}
