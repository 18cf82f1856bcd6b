//! Mixed actions over grid indices satisfying the halfspace condition.
//!
//! Each round reduces to a zero-sum matrix game between the grid index `k`
//! (minimizer) and the outcome `a` (maximizer) with payoff
//! `gamma[k][a] = d . m(k, a)` where `d` is the residual of the average
//! payoff after projecting onto the target set. The minimax problem is
//! solved either exactly (small LP, certified by a primal/dual pair) or
//! approximately by multiplicative weights.

use crate::error::{CalibError, Result};
use crate::grid::EpsilonGrid;
use crate::payoff::{BlockVector, PayoffAverage};
use crate::projection::{ProjectionMethod, TargetSet};

/// Relative tolerance of the exact solver: `tol = EXACT_TOL_SCALE * scale`.
pub const EXACT_TOL_SCALE: f64 = 1e-9;

/// Pivoting tolerance of the simplex solver (the matrix is normalized to
/// entries of order one before solving).
const PIVOT_TOL: f64 = 1e-10;

/// A mixed action over grid indices.
#[derive(Debug, Clone)]
pub struct Policy {
    weights: Vec<f64>,
}

impl Policy {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(CalibError::InvalidParameter("empty policy".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(CalibError::InvalidParameter(
                "policy weights must be finite and non-negative".into(),
            ));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(CalibError::InvalidParameter(format!(
                "policy weights sum to {sum}, expected 1"
            )));
        }
        Ok(Self { weights })
    }

    pub fn uniform(n: usize) -> Self {
        Self {
            weights: vec![1.0 / n as f64; n],
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Inverse-CDF sampling from a uniform draw `u` in [0, 1).
    pub fn sample(&self, u: f64) -> usize {
        let mut acc = 0.0;
        for (i, w) in self.weights.iter().enumerate() {
            acc += w;
            if u < acc {
                return i;
            }
        }
        self.weights.len() - 1
    }
}

/// The per-round game matrix `gamma` (rows: grid indices, columns: outcomes)
/// together with its magnitude scale `G = max |gamma|`.
#[derive(Debug, Clone)]
pub struct GameMatrix {
    rows: usize,
    cols: usize,
    gamma: Vec<f64>,
    scale: f64,
}

impl GameMatrix {
    pub fn new(rows: usize, cols: usize, gamma: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || gamma.len() != rows * cols {
            return Err(CalibError::DimensionMismatch(format!(
                "matrix of {} entries cannot be {rows}x{cols}",
                gamma.len()
            )));
        }
        if gamma.iter().any(|g| !g.is_finite()) {
            return Err(CalibError::InvalidParameter(
                "game matrix entries must be finite".into(),
            ));
        }
        let scale = gamma.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        Ok(Self {
            rows,
            cols,
            gamma,
            scale,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn entry(&self, k: usize, a: usize) -> f64 {
        self.gamma[k * self.cols + a]
    }

    /// `(psi^T gamma)_a` for every column `a`.
    pub fn column_values(&self, policy: &Policy) -> Vec<f64> {
        let mut vals = vec![0.0; self.cols];
        for (k, w) in policy.weights().iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            let row = &self.gamma[k * self.cols..(k + 1) * self.cols];
            for (a, g) in row.iter().enumerate() {
                vals[a] += w * g;
            }
        }
        vals
    }

    /// `max_a (psi^T gamma)_a`, the quantity the row player minimizes.
    pub fn value_of(&self, policy: &Policy) -> f64 {
        self.column_values(policy)
            .into_iter()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `gamma[k][a] = d . m(k, a)` where `d = avg - proj`.
///
/// Block sparsity of `m(k, a)` gives `gamma[k][a] = d_k . p_k - d_k[a]`,
/// so the whole matrix costs `O(A * N)`.
pub fn compute_gamma(
    avg: &PayoffAverage,
    proj: &BlockVector,
    grid: &EpsilonGrid,
) -> Result<GameMatrix> {
    let avg_vec = avg.average();
    compute_gamma_from_direction(&avg_vec.sub(proj)?, grid)
}

/// Same as [`compute_gamma`] but taking the residual direction directly.
pub fn compute_gamma_from_direction(d: &BlockVector, grid: &EpsilonGrid) -> Result<GameMatrix> {
    let outcomes = grid.outcomes();
    let n = grid.len();
    if d.outcomes() != outcomes || d.num_blocks() != n {
        return Err(CalibError::DimensionMismatch(
            "direction does not match grid dimensions".into(),
        ));
    }
    let flat = d.to_vec();
    let mut gamma = vec![0.0; n * outcomes];
    for k in 0..n {
        let block = &flat[k * outcomes..(k + 1) * outcomes];
        let p = grid.point(k).probs();
        let dp: f64 = block.iter().zip(p).map(|(x, y)| x * y).sum();
        for a in 0..outcomes {
            gamma[k * outcomes + a] = dp - block[a];
        }
    }
    GameMatrix::new(n, outcomes, gamma)
}

/// An (approximately) minimax policy with its certificate.
#[derive(Debug, Clone)]
pub struct MinimaxSolution {
    pub policy: Policy,
    /// `max_a (psi^T gamma)_a` achieved by the returned policy.
    pub value: f64,
    /// A lower bound on the game value from a column mixture.
    pub lower_bound: f64,
}

impl MinimaxSolution {
    pub fn gap(&self) -> f64 {
        self.value - self.lower_bound
    }
}

/// Exact minimax via a dense simplex on the covering LP.
///
/// The matrix is normalized to entries in [-1, 1] and shifted positive. The
/// LP has one constraint per outcome, so the tableau stays tiny even for
/// large grids. The primal solution gives the row policy, the reduced costs
/// of the surplus columns give the optimal column mixture, and the pair must
/// certify `max_a (psi^T gamma)_a - min_k (gamma q)_k <= tol`.
///
/// The zero matrix yields the uniform policy (every policy is optimal);
/// otherwise the optimal basic solution of the LP is returned.
pub fn solve_minimax_exact(game: &GameMatrix, tol: f64) -> Result<MinimaxSolution> {
    if !tol.is_finite() || tol <= 0.0 {
        return Err(CalibError::InvalidParameter(format!(
            "solver tolerance must be positive, got {tol}"
        )));
    }
    if game.scale == 0.0 {
        return Ok(MinimaxSolution {
            policy: Policy::uniform(game.rows),
            value: 0.0,
            lower_bound: 0.0,
        });
    }
    let (policy, q) = simplex_game(game)?;
    let value = game.value_of(&policy);
    let lower_bound = column_mixture_floor(game, &q);
    let sol = MinimaxSolution {
        policy,
        value,
        lower_bound,
    };
    if sol.gap() > tol {
        return Err(CalibError::Solver(format!(
            "certificate gap {} exceeds tolerance {tol}",
            sol.gap()
        )));
    }
    Ok(sol)
}

/// `min_k (gamma q)_k` — the guaranteed floor of any row response to `q`.
fn column_mixture_floor(game: &GameMatrix, q: &[f64]) -> f64 {
    let mut floor = f64::INFINITY;
    for k in 0..game.rows {
        let row = &game.gamma[k * game.cols..(k + 1) * game.cols];
        let v: f64 = row.iter().zip(q).map(|(g, w)| g * w).sum();
        floor = floor.min(v);
    }
    floor
}

/// Solves `min_psi max_a (psi^T gamma)_a` by the simplex method, returning
/// the optimal row policy and an optimal column mixture.
#[allow(clippy::needless_range_loop)] // tableau code indexes parallel arrays
fn simplex_game(game: &GameMatrix) -> Result<(Policy, Vec<f64>)> {
    let n = game.rows;
    let a_dim = game.cols;
    let scale = game.scale;
    // b[k][a] = shift - gamma[k][a] / scale, entries in [1, 3].
    let shift = 2.0;
    let b = |k: usize, a: usize| shift - game.gamma[k * a_dim + a] / scale;

    // Covering LP: min sum(u) s.t. for all a: sum_k b[k][a] u_k - s_a = 1.
    // Columns: 0..n are u, n..n+a_dim are surplus, last is the rhs.
    let cols = n + a_dim + 1;
    let rhs_col = cols - 1;
    let mut tab: Vec<Vec<f64>> = (0..a_dim)
        .map(|a| {
            let mut row = vec![0.0; cols];
            for k in 0..n {
                row[k] = b(k, a);
            }
            row[n + a] = -1.0;
            row[rhs_col] = 1.0;
            row
        })
        .collect();

    // Warm start without artificials: bring in the most promising u column
    // and keep the other rows' surplus variables basic.
    let mut enter_k = 0;
    let mut enter_val = f64::INFINITY;
    for k in 0..n {
        let worst = (0..a_dim)
            .map(|a| game.gamma[k * a_dim + a])
            .fold(f64::NEG_INFINITY, f64::max);
        if worst < enter_val {
            enter_val = worst;
            enter_k = k;
        }
    }
    // The tightest constraint for u alone is the one with the smallest b.
    let mut pivot_row = 0;
    for a in 1..a_dim {
        if b(enter_k, a) < b(enter_k, pivot_row) {
            pivot_row = a;
        }
    }
    let mut basis: Vec<usize> = (0..a_dim).map(|a| n + a).collect();
    pivot(&mut tab, pivot_row, enter_k);
    basis[pivot_row] = enter_k;
    for r in 0..a_dim {
        if r != pivot_row {
            // rhs is now non-positive; flip the row so the surplus variable
            // becomes an honest basic variable.
            for v in tab[r].iter_mut() {
                *v = -*v;
            }
        }
    }

    // Reduced costs for min sum(u): cost 1 on u columns, 0 elsewhere.
    let mut reduced = vec![0.0; cols];
    for k in 0..n {
        reduced[k] = 1.0;
    }
    for (r, &bv) in basis.iter().enumerate() {
        let cost = if bv < n { 1.0 } else { 0.0 };
        if cost != 0.0 {
            for j in 0..cols {
                reduced[j] -= cost * tab[r][j];
            }
        }
    }

    let max_iters = 400 + 40 * (n + a_dim);
    let bland_after = max_iters / 2;
    for iter in 0..max_iters {
        let bland = iter >= bland_after;
        let mut entering = None;
        if bland {
            for j in 0..cols - 1 {
                if reduced[j] < -PIVOT_TOL {
                    entering = Some(j);
                    break;
                }
            }
        } else {
            let mut best = -PIVOT_TOL;
            for j in 0..cols - 1 {
                if reduced[j] < best {
                    best = reduced[j];
                    entering = Some(j);
                }
            }
        }
        let Some(j) = entering else {
            // Optimal.
            let mut u = vec![0.0; n];
            for (r, &bv) in basis.iter().enumerate() {
                if bv < n {
                    u[bv] = tab[r][rhs_col].max(0.0);
                }
            }
            let total: f64 = u.iter().sum();
            if total <= 0.0 {
                return Err(CalibError::Solver("degenerate covering solution".into()));
            }
            let weights: Vec<f64> = u.iter().map(|x| x / total).collect();
            let policy = Policy::new(normalize(weights))?;
            // Dual values live in the reduced costs of the surplus columns.
            let mut y: Vec<f64> = (0..a_dim).map(|a| reduced[n + a].max(0.0)).collect();
            let ysum: f64 = y.iter().sum();
            if ysum <= 0.0 {
                return Err(CalibError::Solver("degenerate dual solution".into()));
            }
            for v in y.iter_mut() {
                *v /= ysum;
            }
            return Ok((policy, y));
        };

        let mut leave: Option<usize> = None;
        let mut best_ratio = f64::INFINITY;
        for (r, row) in tab.iter().enumerate() {
            if row[j] > PIVOT_TOL {
                let ratio = row[rhs_col] / row[j];
                let better = match leave {
                    None => true,
                    Some(cur) => {
                        ratio < best_ratio - 1e-15
                            || ((ratio - best_ratio).abs() <= 1e-15 && basis[r] < basis[cur])
                    }
                };
                if better {
                    best_ratio = ratio;
                    leave = Some(r);
                }
            }
        }
        let Some(r) = leave else {
            return Err(CalibError::Solver("covering LP appears unbounded".into()));
        };
        pivot(&mut tab, r, j);
        // Update the reduced-cost row with the same elimination.
        let factor = reduced[j];
        if factor != 0.0 {
            let prow = tab[r].clone();
            for (rc, pv) in reduced.iter_mut().zip(&prow) {
                *rc -= factor * pv;
            }
        }
        basis[r] = j;
    }
    Err(CalibError::Solver(
        "simplex iteration limit exceeded".into(),
    ))
}

fn pivot(tab: &mut [Vec<f64>], r: usize, j: usize) {
    let piv = tab[r][j];
    for v in tab[r].iter_mut() {
        *v /= piv;
    }
    let prow = tab[r].clone();
    for (i, row) in tab.iter_mut().enumerate() {
        if i == r {
            continue;
        }
        let factor = row[j];
        if factor != 0.0 {
            for (v, pv) in row.iter_mut().zip(&prow) {
                *v -= factor * pv;
            }
        }
    }
}

fn normalize(mut w: Vec<f64>) -> Vec<f64> {
    let sum: f64 = w.iter().sum();
    for v in w.iter_mut() {
        *v /= sum;
    }
    w
}

/// Approximate minimax by exponentially weighted updates over the rows.
///
/// Runs `T0 = ceil(4 ln(max(N,2)) / delta^2)` iterations with learning rate
/// `eta = sqrt(ln(max(N,2)) / T0)`, playing the best-response column each
/// iteration (ties to the lowest outcome index), and returns the average of
/// the row mixtures. The average satisfies
/// `max_a (psi^T gamma)_a <= v* + delta * G`.
#[allow(clippy::needless_range_loop)] // row loops index the flat matrix
pub fn solve_minimax_mw(game: &GameMatrix, delta: f64) -> Result<MinimaxSolution> {
    if !(0.0..1.0).contains(&delta) || delta == 0.0 {
        return Err(CalibError::InvalidParameter(format!(
            "mw accuracy delta must lie in (0, 1), got {delta}"
        )));
    }
    let n = game.rows;
    if game.scale == 0.0 {
        return Ok(MinimaxSolution {
            policy: Policy::uniform(n),
            value: 0.0,
            lower_bound: 0.0,
        });
    }
    let ln_n = (n.max(2) as f64).ln();
    let t0 = (4.0 * ln_n / (delta * delta)).ceil() as usize;
    let eta = (ln_n / t0 as f64).sqrt();
    let scale = game.scale;

    let mut cum_loss = vec![0.0f64; n];
    let mut avg = vec![0.0f64; n];
    let mut psi = vec![0.0f64; n];
    let mut column_payoffs = vec![0.0f64; game.cols];
    for _ in 0..t0 {
        // Current row mixture from the cumulative normalized losses.
        let min_loss = cum_loss.iter().cloned().fold(f64::INFINITY, f64::min);
        let mut total = 0.0;
        for (w, l) in psi.iter_mut().zip(&cum_loss) {
            *w = (-eta * (l - min_loss)).exp();
            total += *w;
        }
        for w in psi.iter_mut() {
            *w /= total;
        }
        // Adversary best response, ties to the lowest outcome index.
        column_payoffs.iter_mut().for_each(|v| *v = 0.0);
        for k in 0..n {
            if psi[k] == 0.0 {
                continue;
            }
            let row = &game.gamma[k * game.cols..(k + 1) * game.cols];
            for (cv, g) in column_payoffs.iter_mut().zip(row) {
                *cv += psi[k] * g;
            }
        }
        let mut best_a = 0;
        for a in 1..game.cols {
            if column_payoffs[a] > column_payoffs[best_a] {
                best_a = a;
            }
        }
        for k in 0..n {
            cum_loss[k] += game.gamma[k * game.cols + best_a] / scale;
        }
        for (av, w) in avg.iter_mut().zip(&psi) {
            *av += w / t0 as f64;
        }
    }
    let policy = Policy::new(normalize(avg))?;
    let value = game.value_of(&policy);
    Ok(MinimaxSolution {
        policy,
        value,
        // The mw iterates certify optimality only up to delta * G; report the
        // implied floor rather than a computed column mixture.
        lower_bound: value - delta * scale,
    })
}

/// Which minimax solver the forecaster uses each round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinimaxMethod {
    Exact,
    MultiplicativeWeights { delta: f64 },
}

/// Everything the forecaster needs to audit one round's policy computation.
#[derive(Debug, Clone)]
pub struct PolicyDiagnostics {
    /// The average payoff was already inside the target set.
    pub in_target: bool,
    /// `max_a (psi^T gamma)_a` for the returned policy (0 when in target).
    pub game_value: f64,
    /// Certified distance to the true game value.
    pub certificate_gap: f64,
    /// `G = max |gamma|`.
    pub scale: f64,
    /// `max_a d . (m(psi, a) - proj)`: the halfspace-condition violation.
    pub max_violation: f64,
}

/// Computes the policy for the current average payoff.
///
/// Inside the target set any policy works and the uniform one is returned;
/// otherwise the residual direction defines the game matrix and the chosen
/// solver is run. The returned policy must be *sampled*; replacing it by its
/// mean breaks calibration.
pub fn blackwell_policy(
    avg: &PayoffAverage,
    target: &TargetSet,
    grid: &EpsilonGrid,
    method: MinimaxMethod,
) -> Result<(Policy, PolicyDiagnostics)> {
    let avg_vec = avg.average();
    if target.member(&avg_vec)? {
        return Ok((
            Policy::uniform(grid.len()),
            PolicyDiagnostics {
                in_target: true,
                game_value: 0.0,
                certificate_gap: 0.0,
                scale: 0.0,
                max_violation: 0.0,
            },
        ));
    }
    let proj = target.project(&avg_vec, ProjectionMethod::SortExact)?;
    let d = avg_vec.sub(&proj.point)?;
    let game = compute_gamma_from_direction(&d, grid)?;
    let sol = match method {
        MinimaxMethod::Exact => {
            let tol = EXACT_TOL_SCALE * game.scale().max(f64::MIN_POSITIVE);
            solve_minimax_exact(&game, tol)?
        }
        MinimaxMethod::MultiplicativeWeights { delta } => solve_minimax_mw(&game, delta)?,
    };
    let d_dot_proj = d.dot(&proj.point)?;
    let diagnostics = PolicyDiagnostics {
        in_target: false,
        game_value: sol.value,
        certificate_gap: sol.gap(),
        scale: game.scale(),
        max_violation: sol.value - d_dot_proj,
    };
    Ok((sol.policy, diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{build_grid, random_distribution, Distribution};
    use crate::payoff::payoff_vector_mixed;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_game(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> GameMatrix {
        let gamma: Vec<f64> = (0..rows * cols)
            .map(|_| rng.random_range(-2.0..2.0))
            .collect();
        GameMatrix::new(rows, cols, gamma).unwrap()
    }

    /// Brute-force value for 2-row games: sweep the mixing weight.
    fn brute_force_two_rows(game: &GameMatrix) -> f64 {
        let mut best = f64::INFINITY;
        let steps = 4000;
        for i in 0..=steps {
            let s = i as f64 / steps as f64;
            let mut worst = f64::NEG_INFINITY;
            for a in 0..game.cols() {
                let v = s * game.entry(0, a) + (1.0 - s) * game.entry(1, a);
                worst = worst.max(v);
            }
            best = best.min(worst);
        }
        best
    }

    #[test]
    fn zero_matrix_gives_uniform() {
        let game = GameMatrix::new(4, 2, vec![0.0; 8]).unwrap();
        let sol = solve_minimax_exact(&game, 1e-9).unwrap();
        assert_eq!(sol.policy.weights(), &[0.25; 4]);
        assert_eq!(sol.value, 0.0);
        let mw = solve_minimax_mw(&game, 0.1).unwrap();
        assert_eq!(mw.policy.weights(), &[0.25; 4]);
    }

    #[test]
    fn matching_pennies_is_fair() {
        let game = GameMatrix::new(2, 2, vec![1.0, -1.0, -1.0, 1.0]).unwrap();
        let sol = solve_minimax_exact(&game, 1e-9).unwrap();
        assert!((sol.policy.weights()[0] - 0.5).abs() < 1e-9);
        assert!((sol.policy.weights()[1] - 0.5).abs() < 1e-9);
        assert!(sol.value.abs() < 1e-9);
        assert!(sol.gap() <= 1e-9);

        let mw = solve_minimax_mw(&game, 0.05).unwrap();
        assert!(mw.value <= 0.05 * game.scale() + 1e-12);
    }

    #[test]
    fn nonpositive_row_caps_value() {
        let game =
            GameMatrix::new(3, 2, vec![0.5, 1.0, -0.25, -0.5, 2.0, 1.0]).unwrap();
        // Row 1 is entirely <= 0, so the value is at most 0.
        let sol = solve_minimax_exact(&game, 1e-9).unwrap();
        assert!(sol.value <= 1e-12);
        let pure_best = (0..3)
            .map(|k| (0..2).map(|a| game.entry(k, a)).fold(f64::NEG_INFINITY, f64::max))
            .fold(f64::INFINITY, f64::min);
        assert!(sol.value <= pure_best + 1e-12);
    }

    #[test]
    fn exact_matches_brute_force_on_two_row_games() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let game = random_game(&mut rng, 2, 3);
            let sol = solve_minimax_exact(&game, 1e-9 * game.scale()).unwrap();
            let brute = brute_force_two_rows(&game);
            assert!(
                sol.value <= brute + 1e-6,
                "solver {} worse than sweep {}",
                sol.value,
                brute
            );
        }
    }

    #[test]
    fn exact_certificate_holds_on_random_games() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for trial in 0..300 {
            let rows = 1 + trial % 60;
            let cols = 2 + trial % 3;
            let game = random_game(&mut rng, rows, cols);
            let tol = 1e-9 * game.scale();
            let sol = solve_minimax_exact(&game, tol).unwrap();
            assert!(sol.gap() <= tol);
            assert!(sol.lower_bound <= sol.value + 1e-12);
        }
    }

    #[test]
    fn mw_tracks_exact_within_delta() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for trial in 0..30 {
            let rows = 2 + trial % 40;
            let game = random_game(&mut rng, rows, 2 + trial % 3);
            let delta = 0.05;
            let exact = solve_minimax_exact(&game, 1e-9 * game.scale()).unwrap();
            let mw = solve_minimax_mw(&game, delta).unwrap();
            assert!(mw.value <= exact.value + delta * game.scale() + 1e-9);
        }
    }

    #[test]
    fn mw_rejects_bad_delta() {
        let game = GameMatrix::new(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(solve_minimax_mw(&game, 0.0).is_err());
        assert!(solve_minimax_mw(&game, 1.0).is_err());
    }

    #[test]
    fn gamma_zero_direction_gives_zero_matrix() {
        let grid = build_grid(2, 1.0).unwrap();
        let d = BlockVector::zeros(2, grid.len());
        let game = compute_gamma_from_direction(&d, &grid).unwrap();
        assert_eq!(game.scale(), 0.0);
    }

    #[test]
    fn gamma_single_block_hand_value() {
        let grid = build_grid(2, 1.0).unwrap(); // p_1 = (0.5, 0.5)
        let mut data = vec![0.0; 6];
        data[2] = -0.5;
        data[3] = 0.5;
        let d = BlockVector::dense(2, 3, data).unwrap();
        let game = compute_gamma_from_direction(&d, &grid).unwrap();
        // gamma[1][0] = d_1 . (p_1 - dirac(0)) = (-0.5,0.5).(-0.5,0.5) = 0.5
        assert!((game.entry(1, 0) - 0.5).abs() < 1e-12);
        assert!((game.entry(1, 1) + 0.5).abs() < 1e-12);
        for a in 0..2 {
            assert_eq!(game.entry(0, a), 0.0);
            assert_eq!(game.entry(2, a), 0.0);
        }
    }

    #[test]
    fn blackwell_policy_uniform_at_start() {
        let grid = build_grid(2, 0.5).unwrap();
        let target = TargetSet::new(0.5, 2, grid.len()).unwrap();
        let avg = PayoffAverage::new(&grid);
        let (policy, diag) = blackwell_policy(&avg, &target, &grid, MinimaxMethod::Exact).unwrap();
        assert!(diag.in_target);
        let n = grid.len() as f64;
        assert!(policy.weights().iter().all(|w| (w - 1.0 / n).abs() < 1e-12));
    }

    #[test]
    fn blackwell_condition_holds_outside_target() {
        let grid = build_grid(2, 0.25).unwrap();
        let target = TargetSet::new(0.25, 2, grid.len()).unwrap();
        let mut avg = PayoffAverage::new(&grid);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        // Bias the average out of the target set.
        for _ in 0..50 {
            let k = rng.random_range(0..grid.len());
            avg.update(&grid, k, 0).unwrap();
        }
        let (_, diag) = blackwell_policy(&avg, &target, &grid, MinimaxMethod::Exact).unwrap();
        assert!(!diag.in_target);
        assert!(
            diag.max_violation <= 1e-8 * diag.scale.max(1e-300),
            "violation {} vs scale {}",
            diag.max_violation,
            diag.scale
        );
    }

    #[test]
    fn policy_avoids_aggravating_block() {
        // Three-point grid; push the average out inside block 2 (p = (1,0))
        // in the direction that playing k = 2 against outcome 1 would worsen.
        let grid = build_grid(2, 1.0).unwrap();
        let target = TargetSet::new(0.1, 2, grid.len()).unwrap();
        let mut avg = PayoffAverage::new(&grid);
        for _ in 0..40 {
            avg.update(&grid, 2, 1).unwrap(); // p_2 - dirac(1) = (1, -1)
        }
        let (policy, diag) = blackwell_policy(&avg, &target, &grid, MinimaxMethod::Exact).unwrap();
        assert!(!diag.in_target);
        assert!(policy.weights()[2] < 0.2, "weights: {:?}", policy.weights());
        assert!(diag.max_violation <= 1e-8 * diag.scale);
    }

    #[test]
    fn nearest_point_payoff_lands_in_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for (a, eps) in [(2usize, 0.3f64), (3, 0.5), (4, 0.8)] {
            let grid = build_grid(a, eps).unwrap();
            let target = TargetSet::new(eps, a, grid.len()).unwrap();
            for _ in 0..500 {
                let q = random_distribution(&mut rng, a);
                let k = grid.nearest(&q).unwrap();
                let m = payoff_vector_mixed(&grid, k, &q).unwrap();
                assert!(target.member(&m).unwrap());
            }
        }
    }

    #[test]
    fn policy_sampling_inverse_cdf() {
        let p = Policy::new(vec![0.25, 0.5, 0.25]).unwrap();
        assert_eq!(p.sample(0.0), 0);
        assert_eq!(p.sample(0.24), 0);
        assert_eq!(p.sample(0.25), 1);
        assert_eq!(p.sample(0.74), 1);
        assert_eq!(p.sample(0.75), 2);
        assert_eq!(p.sample(0.999), 2);
    }

    #[test]
    fn policy_validation() {
        assert!(Policy::new(vec![]).is_err());
        assert!(Policy::new(vec![0.5, 0.6]).is_err());
        assert!(Policy::new(vec![-0.1, 1.1]).is_err());
        assert!(Policy::new(vec![0.5, 0.5]).is_ok());
    }

    #[test]
    fn degenerate_identical_columns() {
        // Duplicate outcome columns exercise degenerate pivots.
        let game = GameMatrix::new(3, 2, vec![1.0, 1.0, -0.5, -0.5, 0.25, 0.25]).unwrap();
        let sol = solve_minimax_exact(&game, 1e-9 * game.scale()).unwrap();
        assert!((sol.value + 0.5).abs() < 1e-9);
    }

    #[test]
    fn mixed_payoff_feasibility_certifies_solvability() {
        // For any q there is a pure row whose mixed payoff is in the target,
        // so the game value against the residual direction is never positive.
        let grid = build_grid(3, 0.6).unwrap();
        let target = TargetSet::new(0.6, 3, grid.len()).unwrap();
        let mut avg = PayoffAverage::new(&grid);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..200 {
            let k = rng.random_range(0..grid.len());
            let a = rng.random_range(0..3);
            avg.update(&grid, k, a).unwrap();
        }
        let avg_vec = avg.average();
        if !target.member(&avg_vec).unwrap() {
            let q = Distribution::uniform(3).unwrap();
            let k = grid.nearest(&q).unwrap();
            let m = payoff_vector_mixed(&grid, k, &q).unwrap();
            assert!(target.member(&m).unwrap());
        }
    }
}
