//! The doubling-trick meta-forecaster.
//!
//! Regime `r` lasts `2^r` rounds and delegates to a fresh forecaster on a
//! grid of radius `2^(-r/(A+1))`, so the regime radius and the per-regime
//! sampling error shrink at the same rate. Scores are decomposed per
//! (regime, grid point) bin; a finished regime's bins are frozen.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CalibError, Result};
use crate::forecaster::{ForecastStep, Forecaster};
use crate::grid::{Distribution, EpsilonGrid};
use crate::oracle::MinimaxMethod;
use crate::scoring::{bound_u_ln, gamma_prime_from_grid, BinCounts, ScoreSnapshot};

/// Grid radius of regime `r` for an `outcomes`-ary game: `2^(-r/(A+1))`.
pub fn regime_epsilon(outcomes: usize, r: u32) -> f64 {
    2f64.powf(-(r as f64) / (outcomes as f64 + 1.0))
}

/// Length of regime `r` in rounds: `2^r`.
pub fn regime_length(r: u32) -> u64 {
    1u64 << r
}

/// Position within the regime sequence.
#[derive(Debug, Clone, Copy)]
pub struct RegimeSchedule {
    pub r: u32,
    pub length: u64,
    pub epsilon: f64,
    pub elapsed: u64,
}

impl RegimeSchedule {
    pub fn first(outcomes: usize) -> Self {
        Self {
            r: 1,
            length: regime_length(1),
            epsilon: regime_epsilon(outcomes, 1),
            elapsed: 0,
        }
    }

    pub fn next(&self, outcomes: usize) -> Self {
        let r = self.r + 1;
        Self {
            r,
            length: regime_length(r),
            epsilon: regime_epsilon(outcomes, r),
            elapsed: 0,
        }
    }
}

/// One completed round, tagged with the regime it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetaRoundRecord {
    pub t: u64,
    pub regime: u32,
    pub k: usize,
    pub outcome: usize,
}

/// A committed meta forecast. The full distribution is the public value,
/// since grid indices change meaning across regimes.
#[derive(Debug, Clone)]
pub struct MetaForecastStep {
    pub regime: u32,
    pub k: usize,
    pub point: Distribution,
    pub inner: ForecastStep,
}

/// Frozen scoring state of a finished regime.
#[derive(Debug)]
struct RegimeStats {
    r: u32,
    epsilon: f64,
    grid: EpsilonGrid,
    bins: BinCounts,
    rounds: u64,
}

/// Runs fresh forecasters over doubling regimes.
#[derive(Debug)]
pub struct MetaForecaster {
    outcomes: usize,
    method: MinimaxMethod,
    seed_stream: ChaCha8Rng,
    schedule: RegimeSchedule,
    inner: Forecaster,
    finished: Vec<RegimeStats>,
    records: Vec<MetaRoundRecord>,
    total_rounds: u64,
}

impl MetaForecaster {
    pub fn new(outcomes: usize, method: MinimaxMethod, seed: u64) -> Result<Self> {
        if outcomes < 2 {
            return Err(CalibError::InvalidParameter(
                "need at least 2 outcomes".into(),
            ));
        }
        let mut seed_stream = ChaCha8Rng::seed_from_u64(seed);
        let schedule = RegimeSchedule::first(outcomes);
        let inner = Forecaster::new(
            outcomes,
            schedule.epsilon,
            method,
            seed_stream.random::<u64>(),
        )?;
        Ok(Self {
            outcomes,
            method,
            seed_stream,
            schedule,
            inner,
            finished: Vec::new(),
            records: Vec::new(),
            total_rounds: 0,
        })
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn rounds(&self) -> u64 {
        self.total_rounds
    }

    pub fn schedule(&self) -> RegimeSchedule {
        self.schedule
    }

    pub fn transcript(&self) -> &[MetaRoundRecord] {
        &self.records
    }

    /// The grid used in regime `r`, if that regime has started.
    pub fn regime_grid(&self, r: u32) -> Option<&EpsilonGrid> {
        if r == self.schedule.r {
            return Some(self.inner.grid());
        }
        self.finished
            .iter()
            .find(|s| s.r == r)
            .map(|s| &s.grid)
    }

    /// Current inner forecaster (mainly for inspection in tests).
    pub fn inner(&self) -> &Forecaster {
        &self.inner
    }

    /// Emits the forecast for the next round, rolling the regime first when
    /// the previous one has used up its budget.
    pub fn forecast(&mut self) -> Result<MetaForecastStep> {
        if self.schedule.elapsed == self.schedule.length {
            self.advance_regime()?;
        }
        let inner_step = self.inner.forecast()?;
        Ok(MetaForecastStep {
            regime: self.schedule.r,
            k: inner_step.k,
            point: inner_step.point.clone(),
            inner: inner_step,
        })
    }

    pub fn observe(&mut self, outcome: usize) -> Result<MetaRoundRecord> {
        let inner_record = self.inner.observe(outcome)?;
        self.schedule.elapsed += 1;
        self.total_rounds += 1;
        let record = MetaRoundRecord {
            t: self.total_rounds,
            regime: self.schedule.r,
            k: inner_record.k,
            outcome,
        };
        self.records.push(record);
        Ok(record)
    }

    fn advance_regime(&mut self) -> Result<()> {
        let next = self.schedule.next(self.outcomes);
        let fresh = Forecaster::new(
            self.outcomes,
            next.epsilon,
            self.method,
            self.seed_stream.random::<u64>(),
        )?;
        let old = std::mem::replace(&mut self.inner, fresh);
        self.finished.push(RegimeStats {
            r: self.schedule.r,
            epsilon: self.schedule.epsilon,
            bins: old.bin_counts().clone(),
            grid: old.grid().clone(),
            rounds: old.rounds(),
        });
        self.schedule = next;
        Ok(())
    }

    /// Cumulative scores, decomposed over (regime, grid point) bins.
    pub fn scores(&self) -> ScoreSnapshot {
        if self.total_rounds == 0 {
            return ScoreSnapshot::empty();
        }
        let t = self.total_rounds as f64;
        let mut l1 = 0.0;
        let mut brier = 0.0;
        let mut bound = 0.0;
        let mut apply = |r: u32, epsilon: f64, grid: &EpsilonGrid, bins: &BinCounts, rounds: u64| {
            l1 += bins.unnormalized_l1(grid);
            brier += bins.unnormalized_brier(grid);
            if rounds > 0 {
                // Per-regime confidence delta_{r,T} = 1 / (2^r T^2).
                let ln_inv_delta = r as f64 * std::f64::consts::LN_2 + 2.0 * t.ln();
                bound += rounds as f64
                    * bound_u_ln(
                        epsilon,
                        rounds,
                        ln_inv_delta,
                        crate::scoring::DEFAULT_GAMMA_CONST,
                        gamma_prime_from_grid(grid),
                        self.outcomes,
                    );
            }
        };
        for s in &self.finished {
            apply(s.r, s.epsilon, &s.grid, &s.bins, s.rounds);
        }
        apply(
            self.schedule.r,
            self.schedule.epsilon,
            self.inner.grid(),
            self.inner.bin_counts(),
            self.inner.rounds(),
        );
        ScoreSnapshot {
            rounds: self.total_rounds,
            l1: l1 / t,
            brier: brier / t,
            // Distance is regime-local; report the live regime's.
            l2_distance: self
                .inner
                .bin_counts()
                .l2_distance(self.inner.grid(), self.schedule.epsilon)
                .unwrap_or(f64::NAN),
            bound: bound / t,
        }
    }
}
