//! Calibration scores computed from per-bin outcome counts.
//!
//! Every score here depends on the transcript only through the aggregate
//! counts `n[k][a]` (rounds where grid point `k` was forecast and outcome
//! `a` happened), so scores are invariant under permutations of the rounds.

use crate::error::{CalibError, Result};
use crate::grid::{Distribution, EpsilonGrid};
use crate::payoff::BlockVector;
use crate::projection::{ProjectionMethod, TargetSet};

/// Reporting confidence for the theoretical bound.
pub const DEFAULT_DELTA: f64 = 0.01;

/// Reporting constant for the uniform rate (no value is prescribed; 2 is the
/// conventional payoff-norm bound).
pub const DEFAULT_GAMMA_CONST: f64 = 2.0;

/// Per-bin outcome counts for a single grid.
#[derive(Debug, Clone)]
pub struct BinCounts {
    outcomes: usize,
    bins: usize,
    counts: Vec<u64>,
    total: u64,
}

impl BinCounts {
    pub fn new(grid: &EpsilonGrid) -> Self {
        Self::with_dims(grid.outcomes(), grid.len())
    }

    pub fn with_dims(outcomes: usize, bins: usize) -> Self {
        Self {
            outcomes,
            bins,
            counts: vec![0; outcomes * bins],
            total: 0,
        }
    }

    pub fn from_transcript(transcript: &[(usize, usize)], grid: &EpsilonGrid) -> Result<Self> {
        let mut counts = Self::new(grid);
        for &(k, a) in transcript {
            counts.record(k, a)?;
        }
        Ok(counts)
    }

    pub fn record(&mut self, k: usize, a: usize) -> Result<()> {
        if k >= self.bins {
            return Err(CalibError::InvalidParameter(format!(
                "grid index {k} out of range for {} bins",
                self.bins
            )));
        }
        if a >= self.outcomes {
            return Err(CalibError::InvalidParameter(format!(
                "outcome {a} out of range for {} outcomes",
                self.outcomes
            )));
        }
        self.counts[k * self.outcomes + a] += 1;
        self.total += 1;
        Ok(())
    }

    pub fn rounds(&self) -> u64 {
        self.total
    }

    pub fn bins(&self) -> usize {
        self.bins
    }

    /// Rounds in which grid point `k` was forecast.
    pub fn bin_total(&self, k: usize) -> u64 {
        self.counts[k * self.outcomes..(k + 1) * self.outcomes]
            .iter()
            .sum()
    }

    /// Empirical outcome distribution of bin `k`; `p_k` when the bin is empty.
    pub fn rho(&self, k: usize, grid: &EpsilonGrid) -> Distribution {
        let n = self.bin_total(k);
        if n == 0 {
            return grid.point(k).clone();
        }
        let probs = self.counts[k * self.outcomes..(k + 1) * self.outcomes]
            .iter()
            .map(|&c| c as f64 / n as f64)
            .collect();
        Distribution::new(probs).expect("counts normalize to a distribution")
    }

    /// Unnormalized block sum `n_k p_k - c_k` for bin `k`.
    fn block_sum(&self, k: usize, grid: &EpsilonGrid) -> Vec<f64> {
        let n = self.bin_total(k) as f64;
        grid.point(k)
            .probs()
            .iter()
            .zip(&self.counts[k * self.outcomes..(k + 1) * self.outcomes])
            .map(|(p, &c)| n * p - c as f64)
            .collect()
    }

    /// `sum_k || n_k p_k - c_k ||_1`, before dividing by the round count.
    pub fn unnormalized_l1(&self, grid: &EpsilonGrid) -> f64 {
        (0..self.bins)
            .map(|k| self.block_sum(k, grid).iter().map(|x| x.abs()).sum::<f64>())
            .sum()
    }

    /// `sum_k n_k ||rho(k) - p_k||_2^2`, before dividing by the round count.
    pub fn unnormalized_brier(&self, grid: &EpsilonGrid) -> f64 {
        (0..self.bins)
            .map(|k| {
                let n = self.bin_total(k);
                if n == 0 {
                    return 0.0;
                }
                let rho = self.rho(k, grid);
                let sq: f64 = rho
                    .probs()
                    .iter()
                    .zip(grid.point(k).probs())
                    .map(|(r, p)| (r - p) * (r - p))
                    .sum();
                n as f64 * sq
            })
            .sum()
    }

    /// The l1 calibration score `sum_k ||(1/T) sum 1{K=k}(p_k - dirac(a))||_1`.
    pub fn l1_score(&self, grid: &EpsilonGrid) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.unnormalized_l1(grid) / self.total as f64
    }

    /// The Brier score `sum_k ||rho(k) - p_k||_2^2 * (n_k / T)`.
    pub fn brier_score(&self, grid: &EpsilonGrid) -> f64 {
        if self.total == 0 {
            return 0.0;
        }
        self.unnormalized_brier(grid) / self.total as f64
    }

    /// Rebuilds the average payoff vector from the counts.
    pub fn average_payoff(&self, grid: &EpsilonGrid) -> BlockVector {
        if self.total == 0 {
            return BlockVector::zeros(self.outcomes, self.bins);
        }
        let t = self.total as f64;
        let mut data = vec![0.0; self.outcomes * self.bins];
        for k in 0..self.bins {
            let block = self.block_sum(k, grid);
            for (j, v) in block.into_iter().enumerate() {
                data[k * self.outcomes + j] = v / t;
            }
        }
        BlockVector::dense(self.outcomes, self.bins, data)
            .expect("buffer has matching dimensions")
    }

    /// Euclidean distance from the average payoff to the target set.
    pub fn l2_distance(&self, grid: &EpsilonGrid, epsilon: f64) -> Result<f64> {
        let avg = self.average_payoff(grid);
        let target = TargetSet::new(epsilon, self.outcomes, self.bins)?;
        let proj = target.project(&avg, ProjectionMethod::SortExact)?;
        Ok(avg.sub(&proj.point)?.l2_norm())
    }
}

/// l1 calibration score of a transcript of `(k, a)` rounds.
pub fn l1_score(transcript: &[(usize, usize)], grid: &EpsilonGrid) -> Result<f64> {
    Ok(BinCounts::from_transcript(transcript, grid)?.l1_score(grid))
}

/// Brier score of a transcript of `(k, a)` rounds.
pub fn brier_score(transcript: &[(usize, usize)], grid: &EpsilonGrid) -> Result<f64> {
    Ok(BinCounts::from_transcript(transcript, grid)?.brier_score(grid))
}

/// Distance of the transcript's average payoff to the radius-`epsilon`
/// target set.
pub fn l2_distance_to_c(
    transcript: &[(usize, usize)],
    grid: &EpsilonGrid,
    epsilon: f64,
) -> Result<f64> {
    BinCounts::from_transcript(transcript, grid)?.l2_distance(grid, epsilon)
}

/// `gamma' = N_eps * eps^(A-1)`, the grid-size constant read off the actual
/// grid rather than fixed a priori.
pub fn gamma_prime_from_grid(grid: &EpsilonGrid) -> f64 {
    grid.len() as f64 * grid.epsilon().powi(grid.outcomes() as i32 - 1)
}

/// The reported high-probability bound
/// `eps + gamma * gamma' * sqrt(A) * sqrt(ln(1/delta) / (eps^(A-1) T))`.
///
/// Returns infinity at `T = 0`.
pub fn bound_u(
    epsilon: f64,
    rounds: u64,
    delta: f64,
    gamma_const: f64,
    gamma_prime: f64,
    outcomes: usize,
) -> f64 {
    bound_u_ln(
        epsilon,
        rounds,
        (1.0 / delta).ln(),
        gamma_const,
        gamma_prime,
        outcomes,
    )
}

/// Same bound with `ln(1/delta)` supplied directly, for confidence levels
/// too small to represent.
pub fn bound_u_ln(
    epsilon: f64,
    rounds: u64,
    ln_inv_delta: f64,
    gamma_const: f64,
    gamma_prime: f64,
    outcomes: usize,
) -> f64 {
    if rounds == 0 {
        return f64::INFINITY;
    }
    let a = outcomes as f64;
    epsilon
        + gamma_const
            * gamma_prime
            * a.sqrt()
            * (ln_inv_delta / (epsilon.powi(outcomes as i32 - 1) * rounds as f64)).sqrt()
}

/// One row of the per-bin breakdown.
#[derive(Debug, Clone)]
pub struct BinReport {
    pub k: usize,
    pub count: u64,
    pub frequency: f64,
    pub rho: Distribution,
    pub block_l1: f64,
}

/// Cumulative scores at a point in time, as written to the score CSV.
#[derive(Debug, Clone, Copy)]
pub struct ScoreSnapshot {
    pub rounds: u64,
    pub l1: f64,
    pub brier: f64,
    pub l2_distance: f64,
    pub bound: f64,
}

impl ScoreSnapshot {
    pub fn empty() -> Self {
        Self {
            rounds: 0,
            l1: 0.0,
            brier: 0.0,
            l2_distance: 0.0,
            bound: f64::INFINITY,
        }
    }
}

/// Full score report for a single-grid transcript.
#[derive(Debug, Clone)]
pub struct ScoreReport {
    pub rounds: u64,
    pub l1_score: f64,
    pub brier_score: f64,
    pub l2_distance_to_c: f64,
    pub bound: f64,
    pub per_bin: Vec<BinReport>,
}

/// Builds the complete report, including the per-bin table.
///
/// The l1 score is also a computable upper bound for the uniform
/// (Borel-supremum) criterion, whose exact value is not computed here.
pub fn score_report(
    transcript: &[(usize, usize)],
    grid: &EpsilonGrid,
    epsilon: f64,
    delta: f64,
) -> Result<ScoreReport> {
    let counts = BinCounts::from_transcript(transcript, grid)?;
    let rounds = counts.rounds();
    let per_bin = (0..grid.len())
        .map(|k| {
            let n = counts.bin_total(k);
            let block: f64 = counts
                .block_sum(k, grid)
                .iter()
                .map(|x| x.abs())
                .sum();
            BinReport {
                k,
                count: n,
                frequency: if rounds == 0 {
                    0.0
                } else {
                    n as f64 / rounds as f64
                },
                rho: counts.rho(k, grid),
                block_l1: if rounds == 0 {
                    0.0
                } else {
                    block / rounds as f64
                },
            }
        })
        .collect();
    Ok(ScoreReport {
        rounds,
        l1_score: counts.l1_score(grid),
        brier_score: counts.brier_score(grid),
        l2_distance_to_c: counts.l2_distance(grid, epsilon)?,
        bound: bound_u(
            epsilon,
            rounds,
            delta,
            DEFAULT_GAMMA_CONST,
            gamma_prime_from_grid(grid),
            grid.outcomes(),
        ),
        per_bin,
    })
}
