use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

use calib_core::{
    build_grid, random_distribution, solve_minimax_exact, solve_minimax_mw, BlockVector,
    Forecaster, GameMatrix, MinimaxMethod, Nature, NatureSpec, ProjectionMethod, TargetSet,
};

fn bench_grid_nearest(c: &mut Criterion) {
    let grid = build_grid(3, 0.1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let queries: Vec<_> = (0..256).map(|_| random_distribution(&mut rng, 3)).collect();
    c.bench_function("grid_nearest_a3_eps0.1", |b| {
        let mut i = 0;
        b.iter(|| {
            i = (i + 1) % queries.len();
            black_box(grid.nearest(&queries[i]).unwrap())
        })
    });
}

fn bench_projection(c: &mut Criterion) {
    let dim = 4096;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let data: Vec<f64> = (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect();
    let x = BlockVector::dense(2, dim / 2, data).unwrap();
    let target = TargetSet::new(0.5, 2, dim / 2).unwrap();
    let mut group = c.benchmark_group("projection_dim4096");
    group.bench_function("sort_exact", |b| {
        b.iter(|| black_box(target.project(&x, ProjectionMethod::SortExact).unwrap()))
    });
    group.bench_function("binary_search", |b| {
        b.iter(|| black_box(target.project(&x, ProjectionMethod::BinarySearch).unwrap()))
    });
    group.finish();
}

fn bench_minimax(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let rows = 200;
    let cols = 3;
    let gamma: Vec<f64> = (0..rows * cols).map(|_| rng.random_range(-1.0..1.0)).collect();
    let game = GameMatrix::new(rows, cols, gamma).unwrap();
    let mut group = c.benchmark_group("minimax_200x3");
    group.bench_function("exact", |b| {
        b.iter(|| black_box(solve_minimax_exact(&game, 1e-9 * game.scale()).unwrap()))
    });
    group.bench_function("mw_delta0.1", |b| {
        b.iter(|| black_box(solve_minimax_mw(&game, 0.1).unwrap()))
    });
    group.finish();
}

fn bench_game_round(c: &mut Criterion) {
    c.bench_function("game_round_a2_eps0.1_greedy", |b| {
        b.iter_batched(
            || {
                let mut f = Forecaster::new(2, 0.1, MinimaxMethod::Exact, 7).unwrap();
                let mut nature = Nature::new(NatureSpec::Greedy, 2, 9).unwrap();
                // Warm past the opening transient so rounds are typical.
                for _ in 0..256 {
                    let step = f.forecast().unwrap();
                    let a = nature.next_outcome(None).unwrap();
                    f.observe(a).unwrap();
                    nature.record_round(&step.point, a);
                }
                (f, nature)
            },
            |(mut f, mut nature)| {
                for _ in 0..64 {
                    let step = f.forecast().unwrap();
                    let a = nature.next_outcome(None).unwrap();
                    f.observe(a).unwrap();
                    nature.record_round(&step.point, a);
                }
                black_box(f.rounds())
            },
            BatchSize::LargeInput,
        )
    });
}

criterion_group!(
    benches,
    bench_grid_nearest,
    bench_projection,
    bench_minimax,
    bench_game_round
);
criterion_main!(benches);
