//! Strategies for Nature.
//!
//! Nature sees only completed rounds. The one exception is the contrarian
//! adversary, which is allowed to evaluate the current forecast because it
//! only ever plays against a declared-deterministic opponent (whose move it
//! could simulate anyway). The driver enforces that restriction.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{CalibError, Result};
use crate::grid::Distribution;

/// Configuration for a Nature strategy.
#[derive(Debug, Clone)]
pub enum NatureSpec {
    /// Independent draws from a fixed distribution.
    Iid(Distribution),
    /// A Markov chain over outcomes; `start` is the initial state.
    Markov {
        rows: Vec<Distribution>,
        start: usize,
    },
    /// A fixed outcome list, replayed cyclically.
    Sequence(Vec<usize>),
    /// Plays the outcome the current forecast considers least likely.
    /// Only valid against a deterministic forecaster.
    Contrarian,
    /// One-step greedy score maximizer using past rounds only.
    Greedy,
}

#[derive(Debug)]
enum State {
    Iid(Distribution),
    Markov {
        rows: Vec<Distribution>,
        current: usize,
    },
    Sequence {
        seq: Vec<usize>,
        pos: usize,
    },
    Contrarian,
    Greedy(GreedyState),
}

/// Greedy adversary bookkeeping: block sums per observed forecast point.
#[derive(Debug, Default)]
struct GreedyState {
    bins: BTreeMap<Vec<u64>, GreedyBin>,
    rounds: u64,
}

#[derive(Debug)]
struct GreedyBin {
    point: Vec<f64>,
    sum: Vec<f64>,
    l1: f64,
    count: u64,
}

/// A live Nature instance for one game.
#[derive(Debug)]
pub struct Nature {
    outcomes: usize,
    state: State,
    rng: ChaCha8Rng,
}

impl Nature {
    pub fn new(spec: NatureSpec, outcomes: usize, seed: u64) -> Result<Self> {
        if outcomes < 2 {
            return Err(CalibError::InvalidParameter(
                "nature needs at least 2 outcomes".into(),
            ));
        }
        let state = match spec {
            NatureSpec::Iid(q) => {
                if q.outcomes() != outcomes {
                    return Err(CalibError::Config(
                        "iid distribution arity does not match the game".into(),
                    ));
                }
                State::Iid(q)
            }
            NatureSpec::Markov { rows, start } => {
                if rows.len() != outcomes {
                    return Err(CalibError::Config(format!(
                        "markov matrix has {} rows, expected {outcomes}",
                        rows.len()
                    )));
                }
                if rows.iter().any(|r| r.outcomes() != outcomes) {
                    return Err(CalibError::Config(
                        "markov matrix rows must match the outcome count".into(),
                    ));
                }
                if start >= outcomes {
                    return Err(CalibError::Config(format!(
                        "markov start state {start} out of range"
                    )));
                }
                State::Markov {
                    rows,
                    current: start,
                }
            }
            NatureSpec::Sequence(seq) => {
                if seq.is_empty() {
                    return Err(CalibError::Config("outcome sequence is empty".into()));
                }
                if let Some(&bad) = seq.iter().find(|&&a| a >= outcomes) {
                    return Err(CalibError::Config(format!(
                        "sequence outcome {bad} out of range for {outcomes} outcomes"
                    )));
                }
                State::Sequence { seq, pos: 0 }
            }
            NatureSpec::Contrarian => State::Contrarian,
            NatureSpec::Greedy => State::Greedy(GreedyState::default()),
        };
        Ok(Self {
            outcomes,
            state,
            rng: ChaCha8Rng::seed_from_u64(seed),
        })
    }

    /// True for strategies that must see the current (deterministic) forecast.
    pub fn requires_current_forecast(&self) -> bool {
        matches!(self.state, State::Contrarian)
    }

    /// Chooses the next outcome. `current_forecast` must be provided exactly
    /// when the opposing forecaster is deterministic; passing it otherwise
    /// would break simultaneity.
    pub fn next_outcome(&mut self, current_forecast: Option<&Distribution>) -> Result<usize> {
        match &mut self.state {
            State::Iid(q) => Ok(sample_distribution(q, &mut self.rng)),
            State::Markov { rows, current } => {
                let next = sample_distribution(&rows[*current], &mut self.rng);
                *current = next;
                Ok(next)
            }
            State::Sequence { seq, pos } => {
                let a = seq[*pos];
                *pos = (*pos + 1) % seq.len();
                Ok(a)
            }
            State::Contrarian => {
                let forecast = current_forecast.ok_or_else(|| {
                    CalibError::Config(
                        "contrarian nature requires the current forecast; \
                         it can only face a deterministic forecaster"
                            .into(),
                    )
                })?;
                if forecast.outcomes() != self.outcomes {
                    return Err(CalibError::DimensionMismatch(
                        "forecast arity does not match the game".into(),
                    ));
                }
                let mut best = 0;
                for a in 1..self.outcomes {
                    if forecast.prob(a) < forecast.prob(best) {
                        best = a;
                    }
                }
                Ok(best)
            }
            State::Greedy(greedy) => Ok(greedy.next(self.outcomes)),
        }
    }

    /// Feeds the completed round back so adversaries can track history.
    pub fn record_round(&mut self, forecast: &Distribution, outcome: usize) {
        if let State::Greedy(greedy) = &mut self.state {
            greedy.record(forecast, outcome);
        }
    }
}

fn sample_distribution(q: &Distribution, rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (a, p) in q.probs().iter().enumerate() {
        acc += p;
        if u < acc {
            return a;
        }
    }
    q.outcomes() - 1
}

fn point_key(probs: &[f64]) -> Vec<u64> {
    probs.iter().map(|p| p.to_bits()).collect()
}

fn l1(values: &[f64]) -> f64 {
    values.iter().map(|v| v.abs()).sum()
}

impl GreedyState {
    /// Scores each candidate outcome by the expected score increase when the
    /// round's bin is drawn from the bin-usage frequencies observed so far,
    /// and plays the argmax (ties to the lowest outcome index).
    fn next(&self, outcomes: usize) -> usize {
        if self.rounds == 0 {
            return 0;
        }
        let mut best_a = 0;
        let mut best_gain = f64::NEG_INFINITY;
        let mut scratch = vec![0.0; outcomes];
        for a in 0..outcomes {
            let mut gain = 0.0;
            for bin in self.bins.values() {
                scratch.copy_from_slice(&bin.sum);
                for (v, p) in scratch.iter_mut().zip(&bin.point) {
                    *v += p;
                }
                scratch[a] -= 1.0;
                gain += bin.count as f64 * (l1(&scratch) - bin.l1);
            }
            if gain > best_gain {
                best_gain = gain;
                best_a = a;
            }
        }
        best_a
    }

    fn record(&mut self, forecast: &Distribution, outcome: usize) {
        let probs = forecast.probs().to_vec();
        let key = point_key(&probs);
        let bin = self.bins.entry(key).or_insert_with(|| GreedyBin {
            sum: vec![0.0; probs.len()],
            l1: 0.0,
            count: 0,
            point: probs,
        });
        for (j, v) in bin.sum.iter_mut().enumerate() {
            *v += bin.point[j];
        }
        bin.sum[outcome] -= 1.0;
        bin.l1 = l1(&bin.sum);
        bin.count += 1;
        self.rounds += 1;
    }
}
