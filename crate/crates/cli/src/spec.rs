//! Problem specification intake: a single JSON document carrying the
//! source, distortion matrices and levels, optional rates, and solver
//! options. All randomness flows from the one top-level seed.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use blurlab_core::exponents::SolverOptions;
use blurlab_core::{Dist, DistortionMatrix, DistortionSpec, Error, Joint2, Level};

/// A distortion level: a plain number or an exact fraction string "a/b".
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum LevelSpec {
    Num(f64),
    Frac(String),
}

impl LevelSpec {
    pub fn to_level(&self) -> Result<Level, Error> {
        match self {
            LevelSpec::Num(x) => Level::from_f64(*x),
            LevelSpec::Frac(s) => {
                let (num, den) = s
                    .split_once('/')
                    .ok_or_else(|| Error::validation(format!("level '{s}': expected a/b")))?;
                let num: i64 = num
                    .trim()
                    .parse()
                    .map_err(|_| Error::validation(format!("level '{s}': bad numerator")))?;
                let den: i64 = den
                    .trim()
                    .parse()
                    .map_err(|_| Error::validation(format!("level '{s}': bad denominator")))?;
                Level::from_ratio(num, den)
            }
        }
    }
}

/// Reliability exponent: a number or the "inf" sentinel.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum AlphaSpec {
    Num(f64),
    Word(String),
}

impl AlphaSpec {
    pub fn to_f64(&self) -> Result<f64, Error> {
        match self {
            AlphaSpec::Num(x) => Ok(*x),
            AlphaSpec::Word(w) if w == "inf" => Ok(f64::INFINITY),
            AlphaSpec::Word(w) => Err(Error::validation(format!(
                "alpha '{w}': expected a number or \"inf\""
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SolverSpec {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random_starts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q_random_starts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub prune_margin: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_evals_per_start: Option<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    /// "nokey", "keyed" or "perfect".
    pub scenario: String,
    pub source: Vec<f64>,
    /// Legitimate-pair distortion matrix d(x, y), |X| rows by |Y| columns.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<Vec<Vec<f64>>>,
    /// Eavesdropper distortion matrix d_e(x, v), |X| rows by |V| columns.
    pub d_e: Vec<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level_d: Option<LevelSpec>,
    pub level_e: LevelSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub x_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y_size: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v_size: Option<usize>,
    /// Public channel rate R (keyed scenario).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
    /// Key rate r (keyed scenario).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<AlphaSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    /// An explicit joint law over X x Y (row-major), consumed by `crd`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub joint: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSpec>,
}

impl ProblemSpec {
    pub fn from_path(path: &std::path::Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::validation(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::validation(format!("spec parse: {e}")))
    }

    pub fn canonical_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// SHA-256 of the canonical serialization.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.canonical_json().as_bytes());
        hex::encode(h.finalize())
    }

    pub fn source_dist(&self) -> Result<Dist, Error> {
        let d = Dist::new(self.source.clone()).map_err(|e| {
            Error::validation(format!("source: {e}"))
        })?;
        if let Some(x) = self.x_size {
            if x != d.len() {
                return Err(Error::validation(format!(
                    "x_size {x} disagrees with the {}-entry source vector",
                    d.len()
                )));
            }
        }
        Ok(d)
    }

    pub fn spec_d(&self) -> Result<DistortionSpec, Error> {
        let rows = self
            .d
            .clone()
            .ok_or_else(|| Error::validation("field 'd' is required for this command"))?;
        let m = matrix_from_rows(rows, "d")?;
        if let Some(y) = self.y_size {
            if y != m.ny() {
                return Err(Error::validation(format!(
                    "y_size {y} disagrees with the {}-column d matrix",
                    m.ny()
                )));
            }
        }
        let level = self
            .level_d
            .as_ref()
            .ok_or_else(|| Error::validation("field 'level_d' is required for this command"))?
            .to_level()?;
        DistortionSpec::new(m, level)
    }

    pub fn spec_e(&self) -> Result<DistortionSpec, Error> {
        let m = matrix_from_rows(self.d_e.clone(), "d_e")?;
        if let Some(v) = self.v_size {
            if v != m.ny() {
                return Err(Error::validation(format!(
                    "v_size {v} disagrees with the {}-column d_e matrix",
                    m.ny()
                )));
            }
        }
        DistortionSpec::new(m, self.level_e.to_level()?)
    }

    pub fn joint2(&self) -> Result<Joint2, Error> {
        let rows = self
            .joint
            .clone()
            .ok_or_else(|| Error::validation("field 'joint' is required for this command"))?;
        let nx = rows.len();
        let ny = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != ny) {
            return Err(Error::validation("joint: ragged rows"));
        }
        Joint2::new(nx, ny, rows.into_iter().flatten().collect())
    }

    pub fn alpha_f64(&self) -> Result<f64, Error> {
        match &self.alpha {
            Some(a) => a.to_f64(),
            None => Ok(f64::INFINITY),
        }
    }

    pub fn solver_options(&self, cli_seed: Option<u64>) -> SolverOptions {
        let mut opts = SolverOptions::default();
        if let Some(s) = &self.solver {
            if let Some(v) = s.seed {
                opts.seed = v;
            }
            if let Some(v) = s.random_starts {
                opts.random_starts = v;
            }
            if let Some(v) = s.q_random_starts {
                opts.q_random_starts = v;
            }
            if let Some(v) = s.grid_step {
                opts.grid_step = v;
            }
            if let Some(v) = s.prune_margin {
                opts.prune_margin = v;
            }
            if let Some(v) = s.max_evals_per_start {
                opts.max_evals_per_start = v;
            }
        }
        // A seed given on the command line overrides the document.
        if let Some(seed) = cli_seed {
            opts.seed = seed;
        }
        opts
    }
}

fn matrix_from_rows(rows: Vec<Vec<f64>>, what: &str) -> Result<DistortionMatrix, Error> {
    for (i, row) in rows.iter().enumerate() {
        for (j, &e) in row.iter().enumerate() {
            if !e.is_finite() || e < 0.0 {
                return Err(Error::validation(format!(
                    "{what}[{i}][{j}] = {e}: entries must be finite and nonnegative"
                )));
            }
        }
    }
    DistortionMatrix::from_rows(rows).map_err(|e| Error::validation(format!("{what}: {e}")))
}
