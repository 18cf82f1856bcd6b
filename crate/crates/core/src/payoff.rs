//! The vector-valued game payoff and its running average.
//!
//! A payoff lives in `R^{A*N}` viewed as `N` blocks of length `A`. A single
//! round contributes one nonzero block: block `k` receives `p_k - dirac(a)`.
//! The average keeps the running *sum* and divides on read, so long runs do
//! not accumulate incremental-averaging drift.

use crate::error::{CalibError, Result};
use crate::grid::{Distribution, EpsilonGrid};

/// An element of `R^{A*N}` addressed as `N` blocks of length `A`.
///
/// Single-round payoffs have one nonzero block and are stored sparsely;
/// averages are dense.
#[derive(Debug, Clone)]
pub struct BlockVector {
    outcomes: usize,
    blocks: usize,
    repr: Repr,
}

#[derive(Debug, Clone)]
enum Repr {
    Dense(Vec<f64>),
    Single { block: usize, values: Vec<f64> },
}

impl BlockVector {
    pub fn zeros(outcomes: usize, blocks: usize) -> Self {
        Self {
            outcomes,
            blocks,
            repr: Repr::Dense(vec![0.0; outcomes * blocks]),
        }
    }

    pub fn dense(outcomes: usize, blocks: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != outcomes * blocks {
            return Err(CalibError::DimensionMismatch(format!(
                "expected {} components, got {}",
                outcomes * blocks,
                data.len()
            )));
        }
        Ok(Self {
            outcomes,
            blocks,
            repr: Repr::Dense(data),
        })
    }

    pub fn single_block(
        outcomes: usize,
        blocks: usize,
        block: usize,
        values: Vec<f64>,
    ) -> Result<Self> {
        if block >= blocks {
            return Err(CalibError::InvalidParameter(format!(
                "block {block} out of range for {blocks} blocks"
            )));
        }
        if values.len() != outcomes {
            return Err(CalibError::DimensionMismatch(format!(
                "block length {} does not match {} outcomes",
                values.len(),
                outcomes
            )));
        }
        Ok(Self {
            outcomes,
            blocks,
            repr: Repr::Single { block, values },
        })
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks
    }

    pub fn dim(&self) -> usize {
        self.outcomes * self.blocks
    }

    /// Flat component `i` (block `i / A`, coordinate `i % A`).
    pub fn component(&self, i: usize) -> f64 {
        match &self.repr {
            Repr::Dense(d) => d[i],
            Repr::Single { block, values } => {
                let b = i / self.outcomes;
                if b == *block {
                    values[i % self.outcomes]
                } else {
                    0.0
                }
            }
        }
    }

    /// Copies out the block at index `k`.
    pub fn block(&self, k: usize) -> Vec<f64> {
        match &self.repr {
            Repr::Dense(d) => d[k * self.outcomes..(k + 1) * self.outcomes].to_vec(),
            Repr::Single { block, values } => {
                if k == *block {
                    values.clone()
                } else {
                    vec![0.0; self.outcomes]
                }
            }
        }
    }

    /// The index of the only nonzero block, when stored sparsely.
    pub fn single_block_index(&self) -> Option<usize> {
        match &self.repr {
            Repr::Single { block, .. } => Some(*block),
            Repr::Dense(_) => None,
        }
    }

    pub fn to_vec(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Dense(d) => d.clone(),
            Repr::Single { block, values } => {
                let mut out = vec![0.0; self.dim()];
                out[block * self.outcomes..(block + 1) * self.outcomes]
                    .copy_from_slice(values);
                out
            }
        }
    }

    pub fn l1_norm(&self) -> f64 {
        match &self.repr {
            Repr::Dense(d) => d.iter().map(|x| x.abs()).sum(),
            Repr::Single { values, .. } => values.iter().map(|x| x.abs()).sum(),
        }
    }

    pub fn l2_norm(&self) -> f64 {
        match &self.repr {
            Repr::Dense(d) => d.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Repr::Single { values, .. } => values.iter().map(|x| x * x).sum::<f64>().sqrt(),
        }
    }

    pub fn sub(&self, other: &BlockVector) -> Result<BlockVector> {
        if self.dim() != other.dim() || self.outcomes != other.outcomes {
            return Err(CalibError::DimensionMismatch(
                "block vectors differ in shape".into(),
            ));
        }
        let mut data = self.to_vec();
        match &other.repr {
            Repr::Dense(d) => {
                for (x, y) in data.iter_mut().zip(d) {
                    *x -= y;
                }
            }
            Repr::Single { block, values } => {
                let base = block * self.outcomes;
                for (j, v) in values.iter().enumerate() {
                    data[base + j] -= v;
                }
            }
        }
        BlockVector::dense(self.outcomes, self.blocks, data)
    }

    pub fn dot(&self, other: &BlockVector) -> Result<f64> {
        if self.dim() != other.dim() || self.outcomes != other.outcomes {
            return Err(CalibError::DimensionMismatch(
                "block vectors differ in shape".into(),
            ));
        }
        // Exploit sparsity of either side.
        if let Repr::Single { block, values } = &other.repr {
            let mine = self.block(*block);
            return Ok(mine.iter().zip(values).map(|(a, b)| a * b).sum());
        }
        if let Repr::Single { block, values } = &self.repr {
            let theirs = other.block(*block);
            return Ok(theirs.iter().zip(values).map(|(a, b)| a * b).sum());
        }
        let a = self.to_vec();
        let b = other.to_vec();
        Ok(a.iter().zip(&b).map(|(x, y)| x * y).sum())
    }
}

/// The payoff of playing grid index `k` against outcome `a`:
/// zero everywhere except block `k`, which holds `p_k - dirac(a)`.
pub fn payoff_vector(grid: &EpsilonGrid, k: usize, a: usize) -> Result<BlockVector> {
    if k >= grid.len() {
        return Err(CalibError::InvalidParameter(format!(
            "grid index {k} out of range for {} points",
            grid.len()
        )));
    }
    if a >= grid.outcomes() {
        return Err(CalibError::InvalidParameter(format!(
            "outcome {a} out of range for {} outcomes",
            grid.outcomes()
        )));
    }
    let mut values = grid.point(k).probs().to_vec();
    values[a] -= 1.0;
    BlockVector::single_block(grid.outcomes(), grid.len(), k, values)
}

/// Linear extension of the payoff in the outcome argument: block `k`
/// holds `p_k - q`.
pub fn payoff_vector_mixed(grid: &EpsilonGrid, k: usize, q: &Distribution) -> Result<BlockVector> {
    if k >= grid.len() {
        return Err(CalibError::InvalidParameter(format!(
            "grid index {k} out of range for {} points",
            grid.len()
        )));
    }
    if q.outcomes() != grid.outcomes() {
        return Err(CalibError::DimensionMismatch(
            "mixed outcome has wrong arity".into(),
        ));
    }
    let values = grid
        .point(k)
        .probs()
        .iter()
        .zip(q.probs())
        .map(|(p, qq)| p - qq)
        .collect();
    BlockVector::single_block(grid.outcomes(), grid.len(), k, values)
}

/// Running average of single-round payoffs.
///
/// Stores the running sum and the round count; `average()` divides on read.
#[derive(Debug, Clone)]
pub struct PayoffAverage {
    outcomes: usize,
    blocks: usize,
    sum: Vec<f64>,
    rounds: u64,
}

impl PayoffAverage {
    pub fn new(grid: &EpsilonGrid) -> Self {
        Self {
            outcomes: grid.outcomes(),
            blocks: grid.len(),
            sum: vec![0.0; grid.outcomes() * grid.len()],
            rounds: 0,
        }
    }

    pub fn rounds(&self) -> u64 {
        self.rounds
    }

    /// Adds the round payoff `m(k, a)`; only block `k` is touched.
    pub fn update(&mut self, grid: &EpsilonGrid, k: usize, a: usize) -> Result<()> {
        if grid.len() != self.blocks || grid.outcomes() != self.outcomes {
            return Err(CalibError::DimensionMismatch(
                "grid does not match average dimensions".into(),
            ));
        }
        if k >= self.blocks {
            return Err(CalibError::InvalidParameter(format!(
                "grid index {k} out of range"
            )));
        }
        if a >= self.outcomes {
            return Err(CalibError::InvalidParameter(format!(
                "outcome {a} out of range"
            )));
        }
        let base = k * self.outcomes;
        for (j, p) in grid.point(k).probs().iter().enumerate() {
            self.sum[base + j] += p;
        }
        self.sum[base + a] -= 1.0;
        self.rounds += 1;
        Ok(())
    }

    /// `(1/T) * sum`; the zero vector when no rounds have been played.
    pub fn average(&self) -> BlockVector {
        if self.rounds == 0 {
            return BlockVector::zeros(self.outcomes, self.blocks);
        }
        let t = self.rounds as f64;
        let data = self.sum.iter().map(|s| s / t).collect();
        BlockVector::dense(self.outcomes, self.blocks, data)
            .expect("sum buffer has matching dimensions")
    }
}
