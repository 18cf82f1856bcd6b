//! Run configuration and the textual mini-languages used on the CLI.

use std::fs;
use std::path::{Path, PathBuf};

use calib_core::{Distribution, MinimaxMethod, NatureSpec};

use crate::error::{CliError, Result};

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "CALIB_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForecasterKind {
    /// The randomized grid forecaster with a fixed radius.
    Eps,
    /// The doubling-trick meta-forecaster.
    Meta,
    /// The nearest-to-empirical deterministic baseline.
    Deterministic,
}

impl ForecasterKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "eps" => Ok(Self::Eps),
            "meta" => Ok(Self::Meta),
            "deterministic" => Ok(Self::Deterministic),
            other => Err(CliError::Config(format!(
                "unknown forecaster '{other}' (expected eps, meta or deterministic)"
            ))),
        }
    }
}

/// `exact` or `mw:<delta>`.
pub fn parse_method(s: &str) -> Result<MinimaxMethod> {
    if s == "exact" {
        return Ok(MinimaxMethod::Exact);
    }
    if let Some(rest) = s.strip_prefix("mw:") {
        let delta: f64 = rest
            .parse()
            .map_err(|_| CliError::Config(format!("cannot parse mw accuracy '{rest}'")))?;
        if !(delta > 0.0 && delta < 1.0) {
            return Err(CliError::Config(format!(
                "mw accuracy must lie in (0, 1), got {delta}"
            )));
        }
        return Ok(MinimaxMethod::MultiplicativeWeights { delta });
    }
    Err(CliError::Config(format!(
        "unknown method '{s}' (expected exact or mw:<delta>)"
    )))
}

/// Nature mini-language:
/// `iid:<p1,...,pA>`, `markov:<file>`, `seq:<file>`, `contrarian`, `greedy`.
pub fn parse_nature(s: &str, outcomes: usize) -> Result<NatureSpec> {
    if let Some(rest) = s.strip_prefix("iid:") {
        let probs: Vec<f64> = rest
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Config(format!("cannot parse probability '{p}'")))
            })
            .collect::<Result<_>>()?;
        if probs.len() != outcomes {
            return Err(CliError::Config(format!(
                "iid spec has {} probabilities, expected {outcomes}",
                probs.len()
            )));
        }
        let q = Distribution::new(probs).map_err(|e| CliError::Config(e.to_string()))?;
        return Ok(NatureSpec::Iid(q));
    }
    if let Some(path) = s.strip_prefix("markov:") {
        return load_markov(Path::new(path), outcomes);
    }
    if let Some(path) = s.strip_prefix("seq:") {
        return load_sequence(Path::new(path), outcomes);
    }
    match s {
        "contrarian" => Ok(NatureSpec::Contrarian),
        "greedy" => Ok(NatureSpec::Greedy),
        other => Err(CliError::Config(format!(
            "unknown nature spec '{other}' \
             (expected iid:<p,..>, markov:<file>, seq:<file>, contrarian or greedy)"
        ))),
    }
}

fn content_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_owned)
        .collect())
}

/// Markov file: one row of the transition matrix per line (whitespace or
/// comma separated). An optional leading line with a single integer fixes
/// the initial state; it defaults to 0.
pub fn load_markov(path: &Path, outcomes: usize) -> Result<NatureSpec> {
    let mut lines = content_lines(path)?;
    let mut start = 0usize;
    if let Some(first) = lines.first() {
        let tokens: Vec<&str> = first.split([' ', '\t', ',']).filter(|t| !t.is_empty()).collect();
        if tokens.len() == 1 {
            if let Ok(s) = tokens[0].parse::<usize>() {
                start = s;
                lines.remove(0);
            }
        }
    }
    if lines.len() != outcomes {
        return Err(CliError::Config(format!(
            "markov file {} has {} matrix rows, expected {outcomes}",
            path.display(),
            lines.len()
        )));
    }
    let mut rows = Vec::with_capacity(outcomes);
    for line in &lines {
        let probs: Vec<f64> = line
            .split([' ', '\t', ','])
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| CliError::Config(format!("cannot parse matrix entry '{t}'")))
            })
            .collect::<Result<_>>()?;
        if probs.len() != outcomes {
            return Err(CliError::Config(format!(
                "markov row '{line}' has {} entries, expected {outcomes}",
                probs.len()
            )));
        }
        rows.push(Distribution::new(probs).map_err(|e| CliError::Config(e.to_string()))?);
    }
    Ok(NatureSpec::Markov { rows, start })
}

/// Sequence file: newline-separated outcome indices, replayed cyclically.
pub fn load_sequence(path: &Path, outcomes: usize) -> Result<NatureSpec> {
    let lines = content_lines(path)?;
    let seq: Vec<usize> = lines
        .iter()
        .map(|l| {
            l.parse::<usize>()
                .map_err(|_| CliError::Config(format!("cannot parse outcome index '{l}'")))
        })
        .collect::<Result<_>>()?;
    if seq.is_empty() {
        return Err(CliError::Config(format!(
            "sequence file {} contains no outcomes",
            path.display()
        )));
    }
    if let Some(&bad) = seq.iter().find(|&&a| a >= outcomes) {
        return Err(CliError::Config(format!(
            "sequence outcome {bad} out of range for {outcomes} outcomes"
        )));
    }
    Ok(NatureSpec::Sequence(seq))
}

/// A fully validated run configuration for one or more seeds.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub outcomes: usize,
    pub epsilon: Option<f64>,
    pub rounds: u64,
    pub forecaster: ForecasterKind,
    pub method: MinimaxMethod,
    pub nature: NatureSpec,
    pub seeds: Vec<u64>,
    /// Linear checkpoint interval; powers of two when absent.
    pub checkpoint_every: Option<u64>,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.outcomes < 2 {
            return Err(CliError::Config(format!(
                "need at least 2 outcomes, got {}",
                self.outcomes
            )));
        }
        match self.forecaster {
            ForecasterKind::Eps | ForecasterKind::Deterministic => {
                let eps = self.epsilon.ok_or_else(|| {
                    CliError::Config("this forecaster requires --epsilon".into())
                })?;
                if !(eps > 0.0 && eps <= 2.0) {
                    return Err(CliError::Config(format!(
                        "epsilon must lie in (0, 2], got {eps}"
                    )));
                }
            }
            ForecasterKind::Meta => {}
        }
        if matches!(self.nature, NatureSpec::Contrarian)
            && self.forecaster != ForecasterKind::Deterministic
        {
            return Err(CliError::Config(
                "contrarian nature requires --forecaster deterministic".into(),
            ));
        }
        if self.seeds.is_empty() {
            return Err(CliError::Config("at least one seed is required".into()));
        }
        if let Some(n) = self.checkpoint_every {
            if n == 0 {
                return Err(CliError::Config("--checkpoint-every must be >= 1".into()));
            }
        }
        Ok(())
    }

    pub fn transcript_path(&self, seed: u64) -> PathBuf {
        self.out_dir.join(format!("transcript_seed{seed}.csv"))
    }

    pub fn scores_path(&self, seed: u64) -> PathBuf {
        self.out_dir.join(format!("scores_seed{seed}.csv"))
    }
}

/// Resolves the output directory: flag, then environment, then cwd.
pub fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}
