//! `rgg`: run experiments from a TOML configuration.
//!
//! Exit codes: 0 success, 1 configuration or usage error, 2 runtime failure.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::info;
use rgg_core::config::ExperimentConfig;
use rgg_core::experiments::{self, SweepResult, SCHEMA_VERSION};
use rgg_core::graph::{write_edges_csv, write_undirected_edges_csv, GraphSummary};
use rgg_core::Error;

/// Default output directory when neither --out nor `output_dir` is given.
const OUTPUT_ENV: &str = "RGG_OUTPUT_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "rgg",
    version,
    about = "Random geometric graphs with mass-defined cut-off radii"
)]
struct Cli {
    /// More log output (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Critical cut-offs d_n and d̃_n per replicate.
    SweepCutoff(Common),
    /// Isolated-vertex counts at ball mass (log n + β)/n against Poisson(e^{−β}).
    PoissonLimit(Common),
    /// Extreme out-degrees at ball mass c log n / n against their bounds.
    DegreeSweep(Common),
    /// Connectivity of the symmetrized graph for product densities under ℓ∞.
    Connectivity(Common),
    /// Finite-grid check of the Poisson-limit conditions.
    VerifyConditions(Common),
    /// One realization at the first n: points, edge lists and a statistics row.
    BuildOne(Common),
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// TOML configuration file.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Overrides base_seed (build-one: the realization's seed).
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides n_list; comma separated or repeated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    n: Option<Vec<f64>>,
    /// Overrides replicates.
    #[arg(long)]
    replicates: Option<usize>,
    /// Output directory; overrides output_dir and $RGG_OUTPUT_DIR.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Worker threads; overrides workers.
    #[arg(long)]
    workers: Option<usize>,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_config() {
            Failure::Config(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

/// Loads the configuration and applies flag overrides, returning what was overridden.
fn load_config(args: &Common) -> Result<(ExperimentConfig, BTreeMap<String, String>), Failure> {
    let mut config = ExperimentConfig::from_path(&args.config).map_err(|e| Failure::Config(e.to_string()))?;
    let mut overrides = BTreeMap::new();
    if let Some(seed) = args.seed {
        config.base_seed = seed;
        overrides.insert("base_seed".into(), seed.to_string());
    }
    if let Some(n) = &args.n {
        config.n_list = n.clone();
        let list: Vec<String> = n.iter().map(f64::to_string).collect();
        overrides.insert("n_list".into(), list.join(","));
    }
    if let Some(r) = args.replicates {
        config.replicates = r;
        overrides.insert("replicates".into(), r.to_string());
    }
    if let Some(w) = args.workers {
        config.workers = Some(w);
        overrides.insert("workers".into(), w.to_string());
    }
    if let Some(out) = &args.out {
        config.output_dir = Some(out.clone());
        overrides.insert("output_dir".into(), out.display().to_string());
    }
    config
        .validate()
        .map_err(|e| Failure::Config(format!("{}: {e}", args.config.display())))?;
    Ok((config, overrides))
}

fn output_dir(config: &ExperimentConfig) -> PathBuf {
    config
        .output_dir
        .clone()
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write_json(path: &Path, value: &impl serde::Serialize) -> Result<(), Failure> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir).map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))?;
    }
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Failure::Runtime(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(|e| Failure::Runtime(format!("{}: {e}", path.display())))
}

fn report_sweep(result: &SweepResult) {
    for a in &result.aggregates {
        let mut line = format!("n={} rows={}", a.n, a.rows);
        let mut push = |name: &str, s: &Option<rgg_core::stats::Summary>| {
            if let Some(s) = s {
                line.push_str(&format!(" {name}={:.4}±{:.4}", s.mean, s.se));
            }
        };
        push("d_n", &a.d_n);
        push("d_tilde_n", &a.d_tilde_n);
        push("W", &a.w);
        push("Delta", &a.max_degree);
        push("delta", &a.min_degree);
        if let Some(tv) = a.extras.tv_to_poisson {
            line.push_str(&format!(" TV={tv:.4}"));
        }
        if let Some(f) = a.connected_fraction {
            line.push_str(&format!(" connected={f:.3}"));
        }
        println!("{line}");
    }
    if !result.excluded.is_empty() {
        println!("excluded replicates: {}", result.excluded.len());
    }
}

fn run_sweep(
    name: &str,
    args: &Common,
    f: fn(&ExperimentConfig) -> rgg_core::Result<SweepResult>,
) -> Result<(), Failure> {
    let (config, overrides) = load_config(args)?;
    let mut result = f(&config)?;
    result.overrides = overrides;
    let csv = output_dir(&config).join(format!("{name}.csv"));
    let json = experiments::persist(&result, &csv).map_err(|e| Failure::Runtime(e.to_string()))?;
    report_sweep(&result);
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}

#[derive(serde::Serialize)]
struct ConditionsOutput<'a> {
    schema_version: u32,
    config: &'a ExperimentConfig,
    overrides: &'a BTreeMap<String, String>,
    report: &'a rgg_core::density::ConditionReport,
}

fn verify_conditions(args: &Common) -> Result<(), Failure> {
    let (config, overrides) = load_config(args)?;
    let report = experiments::run_verify_conditions(&config)?;
    let dir = output_dir(&config);
    let json = dir.join("verify-conditions.json");
    write_json(
        &json,
        &ConditionsOutput {
            schema_version: SCHEMA_VERSION,
            config: &config,
            overrides: &overrides,
            report: &report,
        },
    )?;
    let csv = dir.join("verify-conditions.csv");
    let mut text = String::from("n,x_points,pairs,k_ratio_min,double_ball_sup\n");
    for r in &report.rows {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            r.n, r.x_points, r.pairs, r.k_ratio_min, r.double_ball_sup
        ));
        println!(
            "n={} inf F(K)·n/(log n+β)={:.4} sup F(B(x,2r))·n^(1−α)={:.4}",
            r.n, r.k_ratio_min, r.double_ball_sup
        );
    }
    std::fs::write(&csv, text).map_err(|e| Failure::Runtime(format!("{}: {e}", csv.display())))?;
    println!(
        "lower bound ≥ α={} on grid: {}; double-ball sup decreasing: {}",
        report.alpha, report.k_condition_holds, report.double_ball_decreasing
    );
    println!("note: {}", report.note);
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}

#[derive(serde::Serialize)]
struct BuildOneOutput<'a> {
    schema_version: u32,
    config: &'a ExperimentConfig,
    overrides: &'a BTreeMap<String, String>,
    rng: &'static str,
    n: f64,
    seed: u64,
    row: &'a experiments::Row,
    graph: GraphSummary,
    enhanced: GraphSummary,
}

fn build_one(args: &Common) -> Result<(), Failure> {
    let (config, overrides) = load_config(args)?;
    let n = config.n_list[0];
    let seed = config.base_seed;
    let one = experiments::build_one(&config, n, seed)?;
    let dir = output_dir(&config);
    std::fs::create_dir_all(&dir).map_err(|e| Failure::Runtime(format!("{}: {e}", dir.display())))?;
    let runtime = |e: Error| Failure::Runtime(e.to_string());
    one.sample
        .points
        .write_csv(&dir.join("build-one-points.csv"))
        .map_err(runtime)?;
    write_edges_csv(&one.graph, &dir.join("build-one-edges.csv")).map_err(runtime)?;
    write_undirected_edges_csv(&one.enhanced, &dir.join("build-one-enhanced-edges.csv")).map_err(runtime)?;
    experiments::write_rows(std::slice::from_ref(&one.row), &dir.join("build-one.csv")).map_err(runtime)?;
    write_json(
        &dir.join("build-one.json"),
        &BuildOneOutput {
            schema_version: SCHEMA_VERSION,
            config: &config,
            overrides: &overrides,
            rng: rgg_core::sampling::RNG_ID,
            n,
            seed,
            row: &one.row,
            graph: GraphSummary::of_digraph(&one.graph),
            enhanced: GraphSummary::of_undirected(&one.enhanced),
        },
    )?;
    let r = &one.row;
    println!(
        "N={} edges={} W={} W_tilde={} Delta={} delta={} connected={} d_n={} d_tilde_n={}",
        r.count,
        one.graph.edge_count(),
        r.w.unwrap_or(0),
        r.w_tilde.unwrap_or(0),
        r.max_degree.unwrap_or(0),
        r.min_degree.unwrap_or(0),
        r.connected.unwrap_or(false),
        r.d_n.map_or("-".into(), |v| format!("{v:.6}")),
        r.d_tilde_n.map_or("-".into(), |v| format!("{v:.6}")),
    );
    println!("wrote build-one*.csv and build-one.json in {}", dir.display());
    Ok(())
}

fn dispatch(command: &Command) -> Result<(), Failure> {
    match command {
        Command::SweepCutoff(a) => run_sweep("sweep-cutoff", a, experiments::run_cutoff_sweep),
        Command::PoissonLimit(a) => run_sweep("poisson-limit", a, experiments::run_poisson_limit),
        Command::DegreeSweep(a) => run_sweep("degree-sweep", a, experiments::run_degree_sweep),
        Command::Connectivity(a) => run_sweep("connectivity", a, experiments::run_connectivity),
        Command::VerifyConditions(a) => verify_conditions(a),
        Command::BuildOne(a) => build_one(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    info!("{:?}", cli.command);
    match dispatch(&cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
