//! Euclidean projection onto the target set, an l1 ball in block space.
//!
//! Membership is a single pass over the components. The projection is a
//! soft threshold `y_i = s_i * (|x_i| - mu)^+` whose level `mu*` is the
//! smallest value making the result feasible; it can be found exactly by
//! sorting the magnitudes or to fixed precision by bisection.

use crate::error::{CalibError, Result};
use crate::payoff::BlockVector;

/// Tolerance used by the membership test.
pub const MEMBER_TOL: f64 = 1e-12;

/// Bisection stops once the bracket on `mu` is narrower than this.
pub const BISECTION_PRECISION: f64 = 1e-10;

/// How to locate the soft-threshold level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectionMethod {
    /// Bisection on `mu` to absolute precision [`BISECTION_PRECISION`].
    BinarySearch,
    /// Exact level from the sorted magnitudes. The default.
    SortExact,
}

/// The set `{ x : sum_k ||x_k||_1 <= epsilon }`, which over blocks of an
/// l1 norm is just the flat l1 ball of radius `epsilon`.
#[derive(Debug, Clone, Copy)]
pub struct TargetSet {
    epsilon: f64,
    outcomes: usize,
    blocks: usize,
}

/// A projection result: the closest feasible point and the threshold level.
#[derive(Debug, Clone)]
pub struct Projection {
    pub point: BlockVector,
    pub mu: f64,
}

impl TargetSet {
    pub fn new(epsilon: f64, outcomes: usize, blocks: usize) -> Result<Self> {
        if !epsilon.is_finite() || epsilon <= 0.0 {
            return Err(CalibError::InvalidParameter(format!(
                "target radius must be positive, got {epsilon}"
            )));
        }
        Ok(Self {
            epsilon,
            outcomes,
            blocks,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn dim(&self) -> usize {
        self.outcomes * self.blocks
    }

    fn check_shape(&self, x: &BlockVector) -> Result<()> {
        if x.outcomes() != self.outcomes || x.num_blocks() != self.blocks {
            return Err(CalibError::DimensionMismatch(format!(
                "vector is {}x{}, target set is {}x{}",
                x.num_blocks(),
                x.outcomes(),
                self.blocks,
                self.outcomes
            )));
        }
        Ok(())
    }

    /// True iff `||x||_1 <= epsilon` (within [`MEMBER_TOL`]).
    pub fn member(&self, x: &BlockVector) -> Result<bool> {
        self.check_shape(x)?;
        Ok(x.l1_norm() <= self.epsilon + MEMBER_TOL)
    }

    /// Euclidean projection of `x` onto the set.
    ///
    /// Members project to themselves with `mu = 0`. The sign of a zero
    /// component is taken as -1, which is harmless since the threshold
    /// annihilates it.
    pub fn project(&self, x: &BlockVector, method: ProjectionMethod) -> Result<Projection> {
        self.check_shape(x)?;
        let data = x.to_vec();
        if data.iter().any(|v| !v.is_finite()) {
            return Err(CalibError::InvalidParameter(
                "cannot project a non-finite vector".into(),
            ));
        }
        let l1: f64 = data.iter().map(|v| v.abs()).sum();
        if l1 <= self.epsilon {
            return Ok(Projection {
                point: x.clone(),
                mu: 0.0,
            });
        }
        let mu = match method {
            ProjectionMethod::SortExact => exact_level(&data, self.epsilon),
            ProjectionMethod::BinarySearch => bisection_level(&data, self.epsilon),
        };
        let shrunk: Vec<f64> = data.iter().map(|&v| soft_threshold(v, mu)).collect();
        Ok(Projection {
            point: BlockVector::dense(self.outcomes, self.blocks, shrunk)?,
            mu,
        })
    }
}

fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else {
        -1.0
    }
}

fn soft_threshold(v: f64, mu: f64) -> f64 {
    sign(v) * (v.abs() - mu).max(0.0)
}

/// Exact threshold: sort magnitudes descending and scan for the largest
/// prefix whose water level stays below the smallest member.
fn exact_level(data: &[f64], epsilon: f64) -> f64 {
    let mut mags: Vec<f64> = data.iter().map(|v| v.abs()).collect();
    mags.sort_unstable_by(|a, b| b.partial_cmp(a).expect("finite magnitudes"));
    let mut cumulative = 0.0;
    let mut level = 0.0;
    for (j, &u) in mags.iter().enumerate() {
        cumulative += u;
        let candidate = (cumulative - epsilon) / (j + 1) as f64;
        if candidate >= u {
            break;
        }
        level = candidate;
    }
    level.max(0.0)
}

/// Bisection on the residual mass `g(mu) = sum (|x_i| - mu)^+`, which is
/// non-increasing in `mu`. The upper end of the final bracket is returned
/// so the result is always feasible.
fn bisection_level(data: &[f64], epsilon: f64) -> f64 {
    let residual = |mu: f64| -> f64 {
        data.iter().map(|v| (v.abs() - mu).max(0.0)).sum::<f64>()
    };
    let mut lo = 0.0;
    let mut hi = data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    while hi - lo >= BISECTION_PRECISION {
        let mid = 0.5 * (lo + hi);
        if residual(mid) <= epsilon {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
