//! Finite coverings of the probability simplex under the l1 norm.
//!
//! The grid with denominator `m` consists of every probability vector whose
//! entries are integer multiples of `1/m`. Any distribution is within
//! `A/m` of some grid point in l1 distance, so `m = ceil(A / epsilon)`
//! yields a covering of radius `epsilon`.

use rand::Rng;

use crate::error::{CalibError, Result};

/// Tolerance on the sum of a probability vector.
pub const SUM_TOL: f64 = 1e-9;

/// A probability distribution over `A` outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates non-negativity and unit sum (within [`SUM_TOL`]).
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.len() < 2 {
            return Err(CalibError::InvalidParameter(format!(
                "distribution needs at least 2 outcomes, got {}",
                probs.len()
            )));
        }
        if probs.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(CalibError::InvalidParameter(
                "distribution entries must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(CalibError::InvalidParameter(format!(
                "distribution entries sum to {sum}, expected 1"
            )));
        }
        Ok(Self { probs })
    }

    /// The point mass on outcome `a`.
    pub fn dirac(a: usize, outcomes: usize) -> Result<Self> {
        if outcomes < 2 || a >= outcomes {
            return Err(CalibError::InvalidParameter(format!(
                "dirac outcome {a} out of range for {outcomes} outcomes"
            )));
        }
        let mut probs = vec![0.0; outcomes];
        probs[a] = 1.0;
        Ok(Self { probs })
    }

    /// The uniform distribution over `outcomes` outcomes.
    pub fn uniform(outcomes: usize) -> Result<Self> {
        if outcomes < 2 {
            return Err(CalibError::InvalidParameter(
                "uniform distribution needs at least 2 outcomes".into(),
            ));
        }
        Ok(Self {
            probs: vec![1.0 / outcomes as f64; outcomes],
        })
    }

    pub fn outcomes(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, a: usize) -> f64 {
        self.probs[a]
    }

    /// l1 distance to another distribution.
    pub fn l1_distance(&self, other: &Distribution) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

/// Draws a distribution uniformly from the simplex (normalized exponentials).
pub fn random_distribution<R: Rng + ?Sized>(rng: &mut R, outcomes: usize) -> Distribution {
    assert!(outcomes >= 2);
    let mut probs: Vec<f64> = (0..outcomes)
        .map(|_| {
            let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
            -u.ln()
        })
        .collect();
    let sum: f64 = probs.iter().sum();
    for p in &mut probs {
        *p /= sum;
    }
    Distribution { probs }
}

/// The epsilon-grid: all points of the simplex with denominator `m`,
/// ordered lexicographically by their integer numerators.
#[derive(Debug, Clone)]
pub struct EpsilonGrid {
    outcomes: usize,
    epsilon: f64,
    denominator: u32,
    numerators: Vec<Vec<u32>>,
    points: Vec<Distribution>,
}

/// Builds the covering grid for `outcomes` outcomes and radius `epsilon`.
///
/// Uses denominator `m = ceil(outcomes / epsilon)`, which guarantees that
/// every distribution is within `epsilon` of a grid point in l1 distance.
pub fn build_grid(outcomes: usize, epsilon: f64) -> Result<EpsilonGrid> {
    EpsilonGrid::build(outcomes, epsilon)
}

impl EpsilonGrid {
    pub fn build(outcomes: usize, epsilon: f64) -> Result<Self> {
        if outcomes < 2 {
            return Err(CalibError::InvalidParameter(format!(
                "need at least 2 outcomes, got {outcomes}"
            )));
        }
        if !epsilon.is_finite() || epsilon <= 0.0 || epsilon > 2.0 {
            return Err(CalibError::InvalidParameter(format!(
                "epsilon must lie in (0, 2], got {epsilon}"
            )));
        }
        let denominator = (outcomes as f64 / epsilon).ceil() as u32;
        let numerators = compositions(denominator, outcomes);
        let points = numerators
            .iter()
            .map(|nums| Distribution {
                probs: nums
                    .iter()
                    .map(|&n| n as f64 / denominator as f64)
                    .collect(),
            })
            .collect();
        Ok(Self {
            outcomes,
            epsilon,
            denominator,
            numerators,
            points,
        })
    }

    pub fn outcomes(&self) -> usize {
        self.outcomes
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn denominator(&self) -> u32 {
        self.denominator
    }

    /// Number of grid points N.
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, k: usize) -> &Distribution {
        &self.points[k]
    }

    pub fn points(&self) -> &[Distribution] {
        &self.points
    }

    /// Index of the grid point nearest to `q`, by largest-remainder rounding.
    ///
    /// Floors each scaled coordinate `m * q_i` and hands the remaining mass to
    /// the coordinates with the largest fractional parts, ties going to the
    /// lowest coordinate index. The result is within `epsilon` of `q` in l1.
    pub fn nearest(&self, q: &Distribution) -> Result<usize> {
        if q.outcomes() != self.outcomes {
            return Err(CalibError::DimensionMismatch(format!(
                "query has {} outcomes, grid has {}",
                q.outcomes(),
                self.outcomes
            )));
        }
        let m = self.denominator;
        let mut nums = vec![0u32; self.outcomes];
        let mut fracs = vec![0.0f64; self.outcomes];
        let mut assigned: i64 = 0;
        for (i, &p) in q.probs().iter().enumerate() {
            let scaled = p * m as f64;
            // Nudge so that exact grid points survive float rounding.
            let floor = (scaled + 1e-9).floor().clamp(0.0, m as f64);
            nums[i] = floor as u32;
            fracs[i] = scaled - floor;
            assigned += floor as i64;
        }
        let mut remainder = m as i64 - assigned;
        while remainder > 0 {
            // Largest fractional part wins; ties to the lowest index.
            let mut best = 0;
            for i in 1..self.outcomes {
                if fracs[i] > fracs[best] {
                    best = i;
                }
            }
            nums[best] += 1;
            fracs[best] -= 1.0;
            remainder -= 1;
        }
        while remainder < 0 {
            // Over-assignment can only come from the float nudge; take mass
            // back from the smallest fractional part that still has some.
            let mut best = None;
            for i in 0..self.outcomes {
                if nums[i] == 0 {
                    continue;
                }
                match best {
                    None => best = Some(i),
                    Some(b) => {
                        if fracs[i] < fracs[b] {
                            best = Some(i);
                        }
                    }
                }
            }
            let b = best.expect("positive denominator always leaves mass to remove");
            nums[b] -= 1;
            fracs[b] += 1.0;
            remainder += 1;
        }
        self.index_of(&nums).ok_or_else(|| {
            CalibError::InvalidParameter("rounded point missing from grid".into())
        })
    }

    /// Looks up a numerator vector; the grid is sorted lexicographically.
    fn index_of(&self, nums: &[u32]) -> Option<usize> {
        self.numerators
            .binary_search_by(|probe| probe.as_slice().cmp(nums))
            .ok()
    }

    pub fn numerators(&self, k: usize) -> &[u32] {
        &self.numerators[k]
    }
}

/// All compositions of `total` into `parts` non-negative integers, in
/// lexicographic order.
fn compositions(total: u32, parts: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; parts];
    fill(total, 0, &mut current, &mut out);
    out
}

fn fill(remaining: u32, pos: usize, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if pos == current.len() - 1 {
        current[pos] = remaining;
        out.push(current.clone());
        return;
    }
    for v in 0..=remaining {
        current[pos] = v;
        fill(remaining - v, pos + 1, current, out);
    }
}

/// binomial(n, k) in u128 to avoid overflow for moderate grids.
pub fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k.min(n));
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn brute_force_nearest(grid: &EpsilonGrid, q: &Distribution) -> (usize, f64) {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (k, p) in grid.points().iter().enumerate() {
            let d = p.l1_distance(q);
            if d < best_d {
                best_d = d;
                best = k;
            }
        }
        (best, best_d)
    }

    #[test]
    fn grid_a2_eps1() {
        let g = build_grid(2, 1.0).unwrap();
        assert_eq!(g.denominator(), 2);
        assert_eq!(g.len(), 3);
        let pts: Vec<&[f64]> = g.points().iter().map(|p| p.probs()).collect();
        assert_eq!(pts, vec![&[0.0, 1.0][..], &[0.5, 0.5], &[1.0, 0.0]]);
    }

    #[test]
    fn grid_a3_eps1_counts_match_enumeration() {
        let g = build_grid(3, 1.0).unwrap();
        assert_eq!(g.denominator(), 3);
        assert_eq!(g.len(), 10);
        // Independent count: enumerate triples summing to 3.
        let mut count = 0;
        for a in 0..=3u32 {
            for b in 0..=(3 - a) {
                let _c = 3 - a - b;
                count += 1;
            }
        }
        assert_eq!(g.len(), count);
        assert_eq!(g.len() as u128, binomial(5, 2));
    }

    #[test]
    fn grid_a2_eps2_vertices() {
        let g = build_grid(2, 2.0).unwrap();
        assert_eq!(g.denominator(), 1);
        assert_eq!(g.len(), 2);
        assert_eq!(g.point(0).probs(), &[0.0, 1.0]);
        assert_eq!(g.point(1).probs(), &[1.0, 0.0]);
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(build_grid(1, 0.5).is_err());
        assert!(build_grid(2, 0.0).is_err());
        assert!(build_grid(2, 2.5).is_err());
        assert!(build_grid(2, f64::NAN).is_err());
        assert!(Distribution::new(vec![0.5, 0.6]).is_err());
        assert!(Distribution::new(vec![-0.1, 1.1]).is_err());
    }

    #[test]
    fn nearest_rounds_by_largest_remainder() {
        let g = build_grid(2, 1.0).unwrap(); // m = 2
        let q = Distribution::new(vec![0.3, 0.7]).unwrap();
        let k = g.nearest(&q).unwrap();
        assert_eq!(g.point(k).probs(), &[0.5, 0.5]);
        assert!((g.point(k).l1_distance(&q) - 0.4).abs() < 1e-12);
    }

    #[test]
    fn nearest_maps_grid_point_to_itself() {
        let g = build_grid(2, 1.0).unwrap();
        let q = Distribution::new(vec![1.0, 0.0]).unwrap();
        let k = g.nearest(&q).unwrap();
        assert_eq!(g.point(k).probs(), &[1.0, 0.0]);
        assert_eq!(g.point(k).l1_distance(&q), 0.0);
    }

    #[test]
    fn nearest_dimension_mismatch() {
        let g = build_grid(2, 0.5).unwrap();
        let q = Distribution::uniform(3).unwrap();
        assert!(matches!(
            g.nearest(&q),
            Err(CalibError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn grid_points_are_fixed_points() {
        for (a, eps) in [(2usize, 0.5f64), (3, 0.7), (4, 1.0)] {
            let g = build_grid(a, eps).unwrap();
            for k in 0..g.len() {
                let q = g.point(k).clone();
                assert_eq!(g.nearest(&q).unwrap(), k, "A={a} eps={eps} k={k}");
            }
        }
    }

    #[test]
    fn nearest_covers_and_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for (a, eps) in [(2usize, 0.25f64), (3, 0.5), (4, 0.9)] {
            let g = build_grid(a, eps).unwrap();
            for _ in 0..2000 {
                let q = random_distribution(&mut rng, a);
                let k = g.nearest(&q).unwrap();
                let d = g.point(k).l1_distance(&q);
                assert!(d <= eps + 1e-12, "covering violated: {d} > {eps}");
                let (_, best_d) = brute_force_nearest(&g, &q);
                assert!(
                    (d - best_d).abs() < 1e-12,
                    "rounding not nearest: {d} vs {best_d}"
                );
            }
        }
    }

    #[test]
    fn point_count_matches_binomial() {
        for (a, eps) in [(2usize, 0.1f64), (3, 0.4), (4, 0.8), (5, 1.5)] {
            let g = build_grid(a, eps).unwrap();
            let m = g.denominator() as u64;
            let expect = binomial(m + a as u64 - 1, a as u64 - 1);
            assert_eq!(g.len() as u128, expect);
        }
    }

    proptest! {
        #[test]
        fn covering_property(seed in 0u64..500, a in 2usize..5) {
            let eps = 0.3 + (seed % 7) as f64 * 0.2;
            let g = build_grid(a, eps).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = random_distribution(&mut rng, a);
            let k = g.nearest(&q).unwrap();
            prop_assert!(g.point(k).l1_distance(&q) <= eps + 1e-12);
        }
    }
}
