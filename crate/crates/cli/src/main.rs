//! Command-line front end: problem intake, solver and simulator dispatch,
//! verification suites, and CSV/JSON emission of tables and plot-ready data.

mod output;
mod spec;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use blurlab_core::cipher::{
    blind_adversary, build_blur_system, build_keyed_system, genie_map_adversary,
    key_guess_adversary, keyed_map_adversary, map_adversary, trend_csv, two_stage_adversary,
    AdversaryReport, KeyedParams, TrendRow,
};
use blurlab_core::exponents::{
    exponent_key, exponent_nokey, exponent_perfect, ExponentResult, SolverOptions,
};
use blurlab_core::rd::{conditional_rd, rd_function};
use blurlab_core::types_lab::{enum_types, qstar, type_class_size};
use blurlab_core::verify::run_suite;
use blurlab_core::{DistortionSpec, Error, Level};

use output::{fmt_f64, parse_grid, parse_n_list, print_json, RunContext};
use spec::ProblemSpec;

#[derive(Parser)]
#[command(
    name = "blurlab",
    about = "Secrecy exponents and exact small-blocklength guessing experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the scenario's secrecy exponent from a problem spec.
    Exponent {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Output format on stdout.
        #[arg(long, default_value = "table", value_parser = ["table", "json"])]
        format: String,
    },
    /// Sweep the conditional rate-distortion function over an eavesdropper
    /// distortion grid (requires the 'joint' field).
    Crd {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sweep the rate-distortion function of the source over a grid of D.
    Rd {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the scenario's system at one or more blocklengths and run
    /// guessing strategies with exact success probabilities.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        /// Blocklength or comma list, e.g. 4,8,12.
        #[arg(long)]
        n: String,
        /// Comma list from: map, genie-map, two-stage, blind, keyed-map,
        /// key-guess. Defaults per scenario.
        #[arg(long)]
        strategies: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-type table at a blocklength: counts, class size, divergence,
    /// chosen joint type and discrete exponent contribution.
    Types {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named verification suite (or "all").
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Sweep the scenario exponent over one parameter.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_parser = ["level_d", "level_e", "rate", "key_rate", "alpha"])]
        param: String,
        #[arg(long)]
        grid: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

enum CliError {
    Core(Error),
    Property(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Property(m) => write!(f, "property failure: {m}"),
        }
    }
}

fn exit_for(e: &CliError) -> u8 {
    match e {
        CliError::Core(Error::Guard { .. }) => 3,
        CliError::Core(_) => 2,
        CliError::Property(_) => 4,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Exponent {
            spec,
            out,
            seed,
            format,
        } => cmd_exponent(&spec, out, seed, &format),
        Command::Crd { spec, grid, out } => cmd_crd(&spec, &grid, out),
        Command::Rd { spec, grid, out } => cmd_rd(&spec, &grid, out),
        Command::Simulate {
            spec,
            n,
            strategies,
            seed,
            out,
        } => cmd_simulate(&spec, &n, strategies.as_deref(), seed, out),
        Command::Types { spec, n, out } => cmd_types(&spec, n, out),
        Command::Verify { suite, seed } => cmd_verify(&suite, seed),
        Command::Sweep {
            spec,
            param,
            grid,
            seed,
            out,
        } => cmd_sweep(&spec, &param, &grid, seed, out),
    }
}

fn run_exponent(ps: &ProblemSpec, opts: &SolverOptions) -> Result<ExponentResult, Error> {
    let p = ps.source_dist()?;
    let spec_e = ps.spec_e()?;
    match ps.scenario.as_str() {
        "perfect" => exponent_perfect(&p, &spec_e, opts),
        "nokey" => exponent_nokey(&p, &ps.spec_d()?, &spec_e, opts),
        "keyed" => {
            let rate = ps
                .rate
                .ok_or_else(|| Error::validation("field 'rate' is required for keyed"))?;
            let key_rate = ps
                .key_rate
                .ok_or_else(|| Error::validation("field 'key_rate' is required for keyed"))?;
            exponent_key(
                &p,
                &ps.spec_d()?,
                &spec_e,
                rate,
                key_rate,
                ps.alpha_f64()?,
                opts,
            )
        }
        other => Err(Error::validation(format!(
            "scenario '{other}': expected nokey, keyed or perfect"
        ))),
    }
}

fn cmd_exponent(
    path: &std::path::Path,
    out: Option<PathBuf>,
    seed: Option<u64>,
    format: &str,
) -> Result<(), CliError> {
    let ps = ProblemSpec::from_path(path)?;
    let opts = ps.solver_options(seed);
    let mut ctx = RunContext::new(out, ps.digest(), opts.seed)?;
    ctx.emit("spec.json", &ps.canonical_json())?;
    let result = run_exponent(&ps, &opts)?;
    let doc = json!({
        "version": "1",
        "scenario": ps.scenario,
        "value_bits": result.value,
        "argmin_q": result.argmin_q.probs(),
        "branch": result.branch,
        "diagnostics": result.diagnostics,
        "spec_digest": ctx.spec_digest,
        "seed": opts.seed,
    });
    if format == "json" {
        print_json(&doc);
    } else {
        println!("scenario          {}", ps.scenario);
        println!("exponent (bits)   {}", fmt_f64(result.value));
        println!("branch            {}", result.branch);
        println!(
            "argmin Q          [{}]",
            result
                .argmin_q
                .probs()
                .iter()
                .map(|x| format!("{x:.6}"))
                .collect::<Vec<_>>()
                .join(", ")
        );
        for (k, v) in &result.diagnostics {
            println!("  {k:<16}{}", fmt_f64(*v));
        }
    }
    ctx.emit(
        "exponent.json",
        &serde_json::to_string_pretty(&doc).expect("json"),
    )?;
    ctx.finish()?;
    Ok(())
}

fn cmd_crd(path: &std::path::Path, grid: &str, out: Option<PathBuf>) -> Result<(), CliError> {
    let ps = ProblemSpec::from_path(path)?;
    let mut ctx = RunContext::new(out, ps.digest(), 0)?;
    ctx.emit("spec.json", &ps.canonical_json())?;
    let j = ps.joint2()?;
    let e_matrix = ps.spec_e()?.matrix;
    let (dmin, dmax) = blurlab_core::min_distortion_levels(&e_matrix);
    let levels = parse_grid(grid)?;
    for &l in &levels {
        if l < dmin - 1e-12 || l > dmax + 1e-12 {
            return Err(Error::validation(format!(
                "grid point {l} outside [d_e_min, d_e_max] = [{dmin}, {dmax}]"
            ))
            .into());
        }
    }
    let mut rows = Vec::new();
    for &l in &levels {
        let spec = DistortionSpec::new(e_matrix.clone(), Level::from_f64(l)?)?;
        let r = conditional_rd(&j, &spec)?;
        rows.push((l, r.value, r.achieved_distortion, r.converged));
    }
    // Emission gate: the column must be non-increasing and midpoint convex.
    for w in rows.windows(2) {
        if w[1].1 > w[0].1 + 1e-8 {
            return Err(CliError::Property(format!(
                "conditional RD not monotone between {} and {}",
                w[0].0, w[1].0
            )));
        }
    }
    for i in 1..rows.len().saturating_sub(1) {
        let uniform_grid = (rows[i].0 - rows[i - 1].0) - (rows[i + 1].0 - rows[i].0);
        if uniform_grid.abs() < 1e-9 && rows[i].1 > 0.5 * (rows[i - 1].1 + rows[i + 1].1) + 1e-6 {
            return Err(CliError::Property(format!(
                "conditional RD not convex at {}",
                rows[i].0
            )));
        }
    }
    let mut csv = String::from("level_e,value_bits,achieved_distortion,converged\n");
    for (l, v, a, c) in &rows {
        csv.push_str(&format!(
            "{},{},{},{}\n",
            fmt_f64(*l),
            fmt_f64(*v),
            fmt_f64(*a),
            c
        ));
    }
    print!("{csv}");
    ctx.emit("crd.csv", &csv)?;
    ctx.finish()?;
    Ok(())
}

fn cmd_rd(path: &std::path::Path, grid: &str, out: Option<PathBuf>) -> Result<(), CliError> {
    let ps = ProblemSpec::from_path(path)?;
    let mut ctx = RunContext::new(out, ps.digest(), 0)?;
    ctx.emit("spec.json", &ps.canonical_json())?;
    let p = ps.source_dist()?;
    let d_matrix = ps.spec_d()?.matrix;
    let (dmin, dmax) = blurlab_core::min_distortion_levels(&d_matrix);
    let levels = parse_grid(grid)?;
    for &l in &levels {
        if l < dmin - 1e-12 || l > dmax + 1e-12 {
            return Err(Error::validation(format!(
                "grid point {l} outside [d_min, d_max] = [{dmin}, {dmax}]"
            ))
            .into());
        }
    }
    let mut csv = String::from("level_d,value_bits,slope,achieved_distortion,converged\n");
    let mut prev: Option<f64> = None;
    for &l in &levels {
        let spec = DistortionSpec::new(d_matrix.clone(), Level::from_f64(l)?)?;
        let r = rd_function(&p, &spec)?;
        if let Some(pv) = prev {
            if r.value > pv + 1e-8 {
                return Err(CliError::Property(format!(
                    "rate-distortion not monotone at {l}"
                )));
            }
        }
        prev = Some(r.value);
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            fmt_f64(l),
            fmt_f64(r.value),
            fmt_f64(r.lagrange_slope),
            fmt_f64(r.achieved_distortion),
            r.converged
        ));
    }
    print!("{csv}");
    ctx.emit("rd.csv", &csv)?;
    ctx.finish()?;
    Ok(())
}

fn default_strategies(scenario: &str) -> Vec<&'static str> {
    match scenario {
        "keyed" => vec!["keyed-map", "key-guess", "blind"],
        "perfect" => vec!["blind"],
        _ => vec!["map", "two-stage", "blind"],
    }
}

fn cmd_simulate(
    path: &std::path::Path,
    n_list: &str,
    strategies: Option<&str>,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let ps = ProblemSpec::from_path(path)?;
    let opts = ps.solver_options(seed);
    let mut ctx = RunContext::new(out, ps.digest(), opts.seed)?;
    ctx.emit("spec.json", &ps.canonical_json())?;
    let ns = parse_n_list(n_list)?;
    let p = ps.source_dist()?;
    let spec_e = ps.spec_e()?;
    let chosen: Vec<String> = match strategies {
        Some(s) => s.split(',').map(|t| t.trim().to_string()).collect(),
        None => default_strategies(&ps.scenario)
            .into_iter()
            .map(String::from)
            .collect(),
    };

    let mut docs = Vec::new();
    let mut collected: Vec<(String, u32, AdversaryReport)> = Vec::new();
    for &n in &ns {
        let mut per_strategy: Vec<AdversaryReport> = Vec::new();
        for s in &chosen {
            let report: AdversaryReport = match (s.as_str(), ps.scenario.as_str()) {
                ("blind", _) => blind_adversary(&p, n, &spec_e)?,
                ("map", _) | ("genie-map", _) | ("two-stage", _) => {
                    let sys = build_blur_system(&p, n, &ps.spec_d()?, &spec_e)?;
                    match s.as_str() {
                        "map" => map_adversary(&sys)?,
                        "genie-map" => genie_map_adversary(&sys)?,
                        _ => two_stage_adversary(&sys)?,
                    }
                }
                ("keyed-map", "keyed") | ("key-guess", "keyed") => {
                    let params = KeyedParams {
                        rate: ps.rate.ok_or_else(|| {
                            Error::validation("field 'rate' is required for keyed")
                        })?,
                        key_rate: ps.key_rate.ok_or_else(|| {
                            Error::validation("field 'key_rate' is required for keyed")
                        })?,
                        alpha: ps.alpha_f64()?,
                        delta: ps.delta.unwrap_or(0.0),
                        epsilon: ps.epsilon.unwrap_or(0.5),
                        seed: opts.seed,
                    };
                    let sys = build_keyed_system(&p, n, &ps.spec_d()?, &spec_e, &params)?;
                    if s == "keyed-map" {
                        keyed_map_adversary(&sys)?.report
                    } else {
                        key_guess_adversary(&sys, opts.seed)?
                    }
                }
                (other, scen) => {
                    return Err(Error::validation(format!(
                        "strategy '{other}' is not available in scenario '{scen}'"
                    ))
                    .into())
                }
            };
            println!(
                "n={n} {s:<10} success={:.6e} exponent={:.6}",
                report.success.as_f64(),
                report.empirical_exponent
            );
            collected.push((s.clone(), n, report.clone()));
            per_strategy.push(report);
        }
        docs.push(json!({
            "n": n,
            "reports": per_strategy.iter().map(|r| r.to_json()).collect::<Vec<_>>(),
        }));
    }
    // Theoretical exponents for the trend tables, computed after the
    // systems built so enumeration guards surface first.
    let theory_scenario = run_exponent(&ps, &opts)?.value;
    let theory_blind = exponent_perfect(&p, &spec_e, &opts)?.value;
    let mut trend_rows: std::collections::BTreeMap<String, Vec<TrendRow>> = Default::default();
    for (s, n, report) in collected {
        let theory = if s == "blind" {
            theory_blind
        } else {
            theory_scenario
        };
        trend_rows.entry(s).or_default().push(TrendRow {
            n,
            empirical_exponent: report.empirical_exponent,
            gap: report.empirical_exponent - theory,
            theory_exponent: theory,
            success: report.success,
        });
    }
    let doc = json!({
        "version": "1",
        "scenario": ps.scenario,
        "spec_digest": ctx.spec_digest,
        "seed": opts.seed,
        "theory_exponent": theory_scenario,
        "runs": docs,
    });
    ctx.emit(
        "simulate.json",
        &serde_json::to_string_pretty(&doc).expect("json"),
    )?;
    for (s, rows) in &trend_rows {
        ctx.emit(&format!("trend_{s}.csv"), &trend_csv(rows))?;
    }
    ctx.finish()?;
    Ok(())
}

fn cmd_types(path: &std::path::Path, n: u32, out: Option<PathBuf>) -> Result<(), CliError> {
    let ps = ProblemSpec::from_path(path)?;
    let mut ctx = RunContext::new(out, ps.digest(), 0)?;
    ctx.emit("spec.json", &ps.canonical_json())?;
    let p = ps.source_dist()?;
    let spec_d = ps.spec_d()?;
    let spec_e = ps.spec_e()?;
    let types = enum_types(n, p.len())?;
    let mut csv = String::from(
        "counts,class_size,kl_bits,qstar_joint,pstar_value_bits,contribution_bits\n",
    );
    let mut total = num_bigint::BigUint::ZERO;
    for t in &types {
        let size = type_class_size(t);
        total += &size;
        let kl = t.kl_to(&p)?;
        let qs = qstar(t, &spec_d, &spec_e)?;
        let joint = qs
            .joint
            .counts()
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join("-");
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            t.counts()
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join("-"),
            size,
            fmt_f64(kl),
            joint,
            fmt_f64(qs.value_bits),
            fmt_f64(kl + qs.value_bits),
        ));
    }
    // Partition sanity before emission.
    let expect = num_bigint::BigUint::from(p.len()).pow(n);
    if total != expect {
        return Err(CliError::Property(format!(
            "class sizes sum to {total}, expected {expect}"
        )));
    }
    print!("{csv}");
    ctx.emit("types.csv", &csv)?;
    ctx.finish()?;
    Ok(())
}

fn cmd_verify(suite: &str, seed: u64) -> Result<(), CliError> {
    let report = run_suite(suite, seed)?;
    let mut failed = 0;
    for c in &report.checks {
        println!(
            "[{}] {} :: {} — {}",
            if c.pass { "PASS" } else { "FAIL" },
            report.suite,
            c.name,
            c.details
        );
        if let Some(ce) = &c.counterexample {
            println!("       counterexample: {ce}");
        }
        if !c.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        return Err(CliError::Property(format!(
            "{failed} of {} checks failed in suite '{}'",
            report.checks.len(),
            report.suite
        )));
    }
    Ok(())
}

fn cmd_sweep(
    path: &std::path::Path,
    param: &str,
    grid: &str,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let ps = ProblemSpec::from_path(path)?;
    let opts = ps.solver_options(seed);
    let mut ctx = RunContext::new(out, ps.digest(), opts.seed)?;
    ctx.emit("spec.json", &ps.canonical_json())?;
    let points = parse_grid(grid)?;
    let mut csv = format!("{param},value_bits,branch\n");
    for &x in &points {
        let mut modified = ps.clone();
        match param {
            "level_d" => modified.level_d = Some(spec::LevelSpec::Num(x)),
            "level_e" => modified.level_e = spec::LevelSpec::Num(x),
            "rate" => modified.rate = Some(x),
            "key_rate" => modified.key_rate = Some(x),
            "alpha" => modified.alpha = Some(spec::AlphaSpec::Num(x)),
            _ => unreachable!("clap filters the parameter"),
        }
        let r = run_exponent(&modified, &opts)?;
        csv.push_str(&format!("{},{},{}\n", fmt_f64(x), fmt_f64(r.value), r.branch));
    }
    print!("{csv}");
    ctx.emit(&format!("sweep_{param}.csv"), &csv)?;
    ctx.finish()?;
    Ok(())
}
