//! Output plumbing: atomic file writes, run records, CSV formatting.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::{json, Value};

use blurlab_core::Error;

/// Full-precision float formatting for CSV columns (17 significant digits).
pub fn fmt_f64(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{x:.16e}")
}

/// Write a file atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), Error> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)
        .map_err(|e| Error::validation(format!("write {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| Error::validation(format!("rename to {}: {e}", path.display())))?;
    Ok(())
}

/// Collects outputs for one CLI invocation and emits the run record.
pub struct RunContext {
    pub out_dir: Option<PathBuf>,
    pub spec_digest: String,
    pub command: String,
    pub seed: u64,
    started: Instant,
    outputs: Vec<String>,
}

impl RunContext {
    pub fn new(out_dir: Option<PathBuf>, spec_digest: String, seed: u64) -> Result<Self, Error> {
        if let Some(dir) = &out_dir {
            std::fs::create_dir_all(dir)
                .map_err(|e| Error::validation(format!("mkdir {}: {e}", dir.display())))?;
        }
        let command = std::env::args().collect::<Vec<_>>().join(" ");
        Ok(RunContext {
            out_dir,
            spec_digest,
            command,
            seed,
            started: Instant::now(),
            outputs: Vec::new(),
        })
    }

    /// Write a named artifact into the output directory (if one was given).
    pub fn emit(&mut self, name: &str, contents: &str) -> Result<(), Error> {
        if let Some(dir) = self.out_dir.clone() {
            let path = dir.join(name);
            write_atomic(&path, contents)?;
            self.outputs.push(name.to_string());
        }
        Ok(())
    }

    /// Finalize: write the run record alongside the outputs.
    pub fn finish(mut self) -> Result<(), Error> {
        if self.out_dir.is_some() {
            let record = json!({
                "version": "1",
                "command": self.command,
                "spec_digest": self.spec_digest,
                "seed": self.seed,
                "outputs": self.outputs,
                "wall_ms": self.started.elapsed().as_millis() as u64,
                "tool_version": env!("CARGO_PKG_VERSION"),
            });
            let text = serde_json::to_string_pretty(&record).expect("record serializes");
            self.emit("run_record.json", &text)?;
        }
        Ok(())
    }
}

pub fn print_json(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("json"));
}

/// start:stop:step grid parser (inclusive of stop within half a step).
pub fn parse_grid(s: &str) -> Result<Vec<f64>, Error> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(Error::validation(format!(
            "grid '{s}': expected start:stop:step"
        )));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| Error::validation(format!("grid start '{}'", parts[0])))?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|_| Error::validation(format!("grid stop '{}'", parts[1])))?;
    let step: f64 = parts[2]
        .parse()
        .map_err(|_| Error::validation(format!("grid step '{}'", parts[2])))?;
    if step <= 0.0 || stop < start {
        return Err(Error::validation(format!("grid '{s}': empty or backwards")));
    }
    let mut out = Vec::new();
    let mut x = start;
    while x <= stop + 0.5 * step {
        out.push(x.min(stop));
        x += step;
    }
    out.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    Ok(out)
}

/// Comma-separated blocklength list.
pub fn parse_n_list(s: &str) -> Result<Vec<u32>, Error> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|_| Error::validation(format!("blocklength '{t}'")))
        })
        .collect()
}
