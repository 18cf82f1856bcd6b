//! End-to-end harness checks on the written artifacts: the score CSV must
//! be reproducible from the transcript CSV alone, the plot must render from
//! real runs, and the Nature spec files must parse.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use calib_cli::config::{parse_nature, ForecasterKind, RunConfig};
use calib_cli::csvio::read_scores_csv;
use calib_cli::plot::emit_plot;
use calib_cli::runner::execute_seed;
use calib_core::{build_grid, meta, Distribution, MinimaxMethod, NatureSpec};
use tempfile::TempDir;

fn config(dir: &Path, forecaster: ForecasterKind, rounds: u64) -> RunConfig {
    RunConfig {
        outcomes: 2,
        epsilon: Some(0.25),
        rounds,
        forecaster,
        method: MinimaxMethod::Exact,
        nature: NatureSpec::Iid(Distribution::new(vec![0.4, 0.6]).unwrap()),
        seeds: vec![3],
        checkpoint_every: None,
        out_dir: dir.to_path_buf(),
    }
}

/// A transcript CSV row, as parsed back from disk.
struct Row {
    regime: u32,
    k: usize,
    outcome: usize,
}

fn parse_transcript(path: &Path) -> Vec<Row> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert!(header.starts_with("t,regime,k,p0"));
    lines
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            Row {
                regime: f[1].parse().unwrap(),
                k: f[2].parse().unwrap(),
                outcome: f[f.len() - 1].parse().unwrap(),
            }
        })
        .collect()
}

/// Recomputes the (regime, bin)-decomposed l1 score of a transcript prefix.
fn recompute_l1(rows: &[Row], outcomes: usize) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    // sums[(regime, k)] accumulates p_k - dirac(a) per regime grid.
    let mut sums: HashMap<(u32, usize), Vec<f64>> = HashMap::new();
    let mut grids: HashMap<u32, calib_core::EpsilonGrid> = HashMap::new();
    for row in rows {
        let grid = grids.entry(row.regime).or_insert_with(|| {
            let eps = if row.regime == 0 {
                0.25
            } else {
                meta::regime_epsilon(outcomes, row.regime)
            };
            build_grid(outcomes, eps).unwrap()
        });
        let sum = sums
            .entry((row.regime, row.k))
            .or_insert_with(|| vec![0.0; outcomes]);
        for (s, p) in sum.iter_mut().zip(grid.point(row.k).probs()) {
            *s += p;
        }
        sum[row.outcome] -= 1.0;
    }
    let total: f64 = sums.values().map(|s| s.iter().map(|x| x.abs()).sum::<f64>()).sum();
    total / rows.len() as f64
}

#[test]
fn score_csv_matches_transcript_recomputation() {
    for forecaster in [ForecasterKind::Eps, ForecasterKind::Meta, ForecasterKind::Deterministic] {
        let dir = TempDir::new().unwrap();
        let cfg = config(dir.path(), forecaster, 600);
        let artifacts = execute_seed(&cfg, 3).unwrap();
        let rows = parse_transcript(&artifacts.transcript_path);
        assert_eq!(rows.len(), 600);
        let scores = read_scores_csv(&artifacts.scores_path).unwrap();
        for score in &scores {
            let l1 = recompute_l1(&rows[..score.rounds as usize], cfg.outcomes);
            assert!(
                (l1 - score.l1).abs() < 1e-9,
                "{forecaster:?} at T={}: {l1} vs {}",
                score.rounds,
                score.l1
            );
        }
        // Meta transcripts must carry growing regime tags; others stay 0.
        let max_regime = rows.iter().map(|r| r.regime).max().unwrap();
        match forecaster {
            ForecasterKind::Meta => assert!(max_regime >= 8),
            _ => assert_eq!(max_regime, 0),
        }
    }
}

#[test]
fn plot_renders_from_run_artifacts() {
    let dir = TempDir::new().unwrap();
    let cfg = config(dir.path(), ForecasterKind::Eps, 256);
    let artifacts = execute_seed(&cfg, 3).unwrap();
    let out = dir.path().join("plot.svg");
    emit_plot(&artifacts.scores_path, &out).unwrap();
    let svg = fs::read_to_string(&out).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches("<polyline").count(), 2);
}

#[test]
fn plot_rejects_empty_and_malformed_csv() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.csv");
    fs::write(&empty, "T,l1_score,brier,l2_dist_C,bound_U\n").unwrap();
    let err = emit_plot(&empty, &dir.path().join("x.svg")).unwrap_err();
    assert_eq!(err.exit_code(), 2);

    let malformed = dir.path().join("bad.csv");
    fs::write(&malformed, "T,l1\n1,2\n").unwrap();
    let err = emit_plot(&malformed, &dir.path().join("y.svg")).unwrap_err();
    assert_eq!(err.exit_code(), 2);

    let missing = dir.path().join("nope.csv");
    let err = emit_plot(&missing, &dir.path().join("z.svg")).unwrap_err();
    assert_eq!(err.exit_code(), 1);
}

#[test]
fn nature_spec_files_parse() {
    let dir = TempDir::new().unwrap();
    let markov = dir.path().join("markov.txt");
    fs::write(&markov, "# sticky chain\n1\n0.9 0.1\n0.2,0.8\n").unwrap();
    match parse_nature(&format!("markov:{}", markov.display()), 2).unwrap() {
        NatureSpec::Markov { rows, start } => {
            assert_eq!(start, 1);
            assert_eq!(rows.len(), 2);
            assert!((rows[1].prob(1) - 0.8).abs() < 1e-12);
        }
        other => panic!("unexpected spec {other:?}"),
    }

    let seq = dir.path().join("seq.txt");
    fs::write(&seq, "0\n1\n1\n0\n").unwrap();
    match parse_nature(&format!("seq:{}", seq.display()), 2).unwrap() {
        NatureSpec::Sequence(s) => assert_eq!(s, vec![0, 1, 1, 0]),
        other => panic!("unexpected spec {other:?}"),
    }

    // Errors: bad probabilities, wrong arity, out-of-range outcomes.
    assert!(parse_nature("iid:0.5,0.6", 2).is_err());
    assert!(parse_nature("iid:0.5,0.5", 3).is_err());
    let badseq = dir.path().join("badseq.txt");
    fs::write(&badseq, "0\n2\n").unwrap();
    assert!(parse_nature(&format!("seq:{}", badseq.display()), 2).is_err());
    assert!(parse_nature("markov:/definitely/not/here", 2).is_err());
}

#[test]
fn checkpoint_every_writes_linear_checkpoints() {
    let dir = TempDir::new().unwrap();
    let mut cfg = config(dir.path(), ForecasterKind::Eps, 100);
    cfg.checkpoint_every = Some(25);
    let artifacts = execute_seed(&cfg, 3).unwrap();
    let scores = read_scores_csv(&artifacts.scores_path).unwrap();
    let ts: Vec<u64> = scores.iter().map(|s| s.rounds).collect();
    assert_eq!(ts, vec![25, 50, 75, 100]);
}
