//! Transcript and score CSV formats.
//!
//! Transcript columns: `t,regime,k,p0,...,p{A-1},a` with forecast
//! components at 12 significant digits. Score columns:
//! `T,l1_score,brier,l2_dist_C,bound_U`. Both files are written with
//! fixed formatting so identical runs are byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use calib_core::{GameRun, ScoreSnapshot};

use crate::error::{CliError, Result};

fn sig12(v: f64) -> String {
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{v:.11e}")
}

pub fn transcript_csv(run: &GameRun, outcomes: usize) -> String {
    let mut out = String::new();
    out.push_str("t,regime,k");
    for j in 0..outcomes {
        let _ = write!(out, ",p{j}");
    }
    out.push_str(",a\n");
    for row in &run.rows {
        let _ = write!(out, "{},{},{}", row.t, row.regime, row.k);
        for p in row.point.probs() {
            let _ = write!(out, ",{}", sig12(*p));
        }
        let _ = writeln!(out, ",{}", row.outcome);
    }
    out
}

pub fn scores_csv(checkpoints: &[ScoreSnapshot]) -> String {
    let mut out = String::from("T,l1_score,brier,l2_dist_C,bound_U\n");
    for s in checkpoints {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            s.rounds,
            sig12(s.l1),
            sig12(s.brier),
            sig12(s.l2_distance),
            sig12(s.bound)
        );
    }
    out
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)
                .map_err(|e| CliError::Io(format!("cannot create {}: {e}", parent.display())))?;
        }
    }
    fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// A parsed score CSV row.
#[derive(Debug, Clone, Copy)]
pub struct ScoreRow {
    pub rounds: u64,
    pub l1: f64,
    pub brier: f64,
    pub l2_distance: f64,
    pub bound: f64,
}

/// Reads a score CSV produced by [`scores_csv`]. An empty body is an error.
pub fn read_scores_csv(path: &Path) -> Result<Vec<ScoreRow>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    parse_scores_csv(&text).map_err(|msg| {
        CliError::Config(format!("malformed score CSV {}: {msg}", path.display()))
    })
}

pub fn parse_scores_csv(text: &str) -> std::result::Result<Vec<ScoreRow>, String> {
    let mut lines = text.lines();
    let header = lines.next().ok_or("missing header")?;
    if header.trim() != "T,l1_score,brier,l2_dist_C,bound_U" {
        return Err(format!("unexpected header '{header}'"));
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(format!("row {} has {} fields, expected 5", i + 2, fields.len()));
        }
        let parse_f = |s: &str| -> std::result::Result<f64, String> {
            match s.trim() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                v => v.parse().map_err(|_| format!("bad number '{v}'")),
            }
        };
        rows.push(ScoreRow {
            rounds: fields[0]
                .trim()
                .parse()
                .map_err(|_| format!("bad round count '{}'", fields[0]))?,
            l1: parse_f(fields[1])?,
            brier: parse_f(fields[2])?,
            l2_distance: parse_f(fields[3])?,
            bound: parse_f(fields[4])?,
        });
    }
    if rows.is_empty() {
        return Err("no data rows".into());
    }
    Ok(rows)
}
