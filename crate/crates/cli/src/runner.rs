//! Executes configured games and writes their artifacts.

use std::path::PathBuf;

use calib_core::{
    play, CheckpointSchedule, DeterministicForecaster, Forecaster, ForecastEngine, GameRun,
    MetaForecaster, Nature, ScoreSnapshot,
};

use crate::config::{ForecasterKind, RunConfig};
use crate::csvio::{scores_csv, transcript_csv, write_file};
use crate::error::{CliError, Result};

/// Outcome of one seed's game.
#[derive(Debug)]
pub struct RunArtifacts {
    pub seed: u64,
    pub final_scores: ScoreSnapshot,
    pub transcript_path: PathBuf,
    pub scores_path: PathBuf,
}

fn build_engine(config: &RunConfig, seed: u64) -> Result<Box<dyn ForecastEngine + Send>> {
    Ok(match config.forecaster {
        ForecasterKind::Eps => Box::new(Forecaster::new(
            config.outcomes,
            config.epsilon.expect("validated"),
            config.method,
            seed,
        )?),
        ForecasterKind::Meta => {
            Box::new(MetaForecaster::new(config.outcomes, config.method, seed)?)
        }
        ForecasterKind::Deterministic => Box::new(DeterministicForecaster::new(
            config.outcomes,
            config.epsilon.expect("validated"),
        )?),
    })
}

/// Plays one seed without touching the filesystem.
pub fn play_seed(config: &RunConfig, seed: u64) -> Result<GameRun> {
    let mut engine = build_engine(config, seed)?;
    let mut nature = Nature::new(config.nature.clone(), config.outcomes, seed ^ 0x9e3779b97f4a7c15)?;
    let schedule = match config.checkpoint_every {
        Some(n) => CheckpointSchedule::Every(n),
        None => CheckpointSchedule::PowersOfTwo,
    };
    Ok(play(engine.as_mut(), &mut nature, config.rounds, schedule)?)
}

/// Plays one seed and writes its transcript and score CSVs.
pub fn execute_seed(config: &RunConfig, seed: u64) -> Result<RunArtifacts> {
    let run = play_seed(config, seed)?;
    let transcript_path = config.transcript_path(seed);
    let scores_path = config.scores_path(seed);
    write_file(&transcript_path, &transcript_csv(&run, config.outcomes))?;
    write_file(&scores_path, &scores_csv(&run.checkpoints))?;
    let final_scores = *run
        .checkpoints
        .last()
        .expect("play always produces a final checkpoint");
    Ok(RunArtifacts {
        seed,
        final_scores,
        transcript_path,
        scores_path,
    })
}

/// Runs every configured seed, in parallel when there are several.
pub fn execute(config: &RunConfig) -> Result<Vec<RunArtifacts>> {
    config.validate()?;
    if config.seeds.len() == 1 {
        return Ok(vec![execute_seed(config, config.seeds[0])?]);
    }
    let mut results: Vec<Option<Result<RunArtifacts>>> =
        (0..config.seeds.len()).map(|_| None).collect();
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        for &seed in &config.seeds {
            handles.push(scope.spawn(move || execute_seed(config, seed)));
        }
        for (slot, handle) in results.iter_mut().zip(handles) {
            *slot = Some(handle.join().unwrap_or_else(|_| {
                Err(CliError::Io("worker thread panicked".into()))
            }));
        }
    });
    results
        .into_iter()
        .map(|r| r.expect("every slot is filled"))
        .collect()
}
