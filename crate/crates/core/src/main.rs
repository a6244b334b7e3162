use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use mulesim::air::run_air;
use mulesim::ground::run_ground;
use mulesim::metrics::RunMetrics;
use mulesim::scenario::{Scenario, ScenarioBuilder, ScenarioKind};

/// Deterministic discrete-event simulator for two data-muling experiments:
/// a ground mesh served by a circling mobile hub (flooding vs managed
/// relaying) and a UAV fleet ferrying sensor data to a ground station
/// (decentralized coordination vs a TSP ferry baseline).
#[derive(Parser)]
#[command(name = "mulesim", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one scenario and write a summary CSV row (and optionally a trace).
    Run(RunArgs),
    /// Run the Cartesian product of the given axes; one CSV row per cell.
    Sweep(SweepArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Scenario file (flat `key = value`; see the bundled scenarios/)
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory for summary.csv and trace files
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Suppress the timestamp comment line in the CSV (stable re-runs)
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Args, Clone)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Override the scenario seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the relay policy: flooding|mam0|mam1
    #[arg(long)]
    policy: Option<String>,
    /// Override the mam1 freshness window in ms
    #[arg(long)]
    delta_ms: Option<u64>,
    /// Override the fleet strategy:
    /// dadca-naive|dadca-parted|dadca-2opt|dadca-2opt-cut|tsp-ferry
    #[arg(long)]
    strategy: Option<String>,
    /// Override the density class: sparse|dense|full
    #[arg(long)]
    density: Option<String>,
    /// Write the full event trace next to the CSV
    #[arg(long)]
    trace: bool,
}

#[derive(Args, Clone)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Seeds, comma-separated (e.g. 1,2,3) or an inclusive range (1..10)
    #[arg(long, default_value = "1")]
    seeds: String,
    /// Relay policies, comma-separated
    #[arg(long)]
    policies: Option<String>,
    /// mam1 freshness windows in ms, comma-separated
    #[arg(long)]
    deltas_ms: Option<String>,
    /// Fleet strategies, comma-separated
    #[arg(long)]
    strategies: Option<String>,
    /// Density classes, comma-separated
    #[arg(long)]
    densities: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // help/version are not errors
            use clap::error::ErrorKind::*;
            let code = match e.kind() {
                DisplayHelp | DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.cmd {
        Cmd::Run(args) => cmd_run(args),
        Cmd::Sweep(args) => cmd_sweep(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Invariant(msg)) => {
            eprintln!("invariant violated: {msg}");
            ExitCode::from(2)
        }
    }
}

enum AppError {
    Validation(String),
    Invariant(String),
}

fn load_builder(path: &Path) -> Result<ScenarioBuilder, AppError> {
    let text = fs::read_to_string(path)
        .map_err(|e| AppError::Validation(format!("{}: {e}", path.display())))?;
    ScenarioBuilder::parse(&text)
        .map_err(|e| AppError::Validation(format!("{}: {e}", path.display())))
}

/// Apply a CLI override through the same setter the file parser uses, so
/// flags and keys can never drift apart. Line 0 marks "from flag".
fn apply(b: &mut ScenarioBuilder, key: &str, value: &str) -> Result<(), AppError> {
    b.set(key, value, 0)
        .map_err(|e| AppError::Validation(format!("--{}: {e}", key.replace('_', "-"))))
}

fn execute(cfg: &Scenario, keep_trace: bool) -> Result<(RunMetrics, Option<Vec<String>>), AppError> {
    match cfg.kind {
        ScenarioKind::Ground => run_ground(cfg, keep_trace)
            .map(|o| (o.metrics, o.trace))
            .map_err(|e| AppError::Invariant(e.to_string())),
        ScenarioKind::Air => run_air(cfg, keep_trace)
            .map(|o| (o.metrics, o.trace))
            .map_err(|e| AppError::Invariant(e.to_string())),
    }
}

const CSV_HEADER: &str = "scenario,kind,policy,strategy,density,delta_ms,seed,\
generated_bytes,unique_collected_bytes,duplicate_collected_bytes,collected_ratio,\
delay_median_ms,delay_p95_ms,delay_samples,in_flight_bytes,\
dropped_stale,dropped_overflow,dropped_ttl,dropped_loss,dropped_sleep,dropped_dedup,\
relay_tx_total,planning_ops_total,replan_ops_total,events_processed,final_clock_ms,\
status,trace_hash";

fn csv_row(cfg: &Scenario, m: &RunMetrics, status: &str) -> String {
    let delta = match cfg.policy {
        mulesim::routing::RelayPolicy::Mam1 { delta } => delta.0.to_string(),
        _ => String::new(),
    };
    let density = cfg
        .density
        .map(|d| format!("{d:?}").to_lowercase())
        .unwrap_or_default();
    let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
    let drop = |cause: &str| m.dropped_bytes.get(cause).copied().unwrap_or(0);
    // policy applies to ground runs, strategy to air runs
    let (policy, strategy) = match cfg.kind {
        ScenarioKind::Ground => (cfg.policy.name(), ""),
        ScenarioKind::Air => ("", cfg.strategy.name()),
    };
    format!(
        "{},{:?},{},{},{},{},{},{},{},{},{:.6},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        cfg.name,
        cfg.kind,
        policy,
        strategy,
        density,
        delta,
        cfg.seed,
        m.generated_bytes,
        m.unique_collected_bytes,
        m.duplicate_collected_bytes,
        m.collected_ratio,
        opt(m.delay_median_ms),
        opt(m.delay_p95_ms),
        m.delay_samples,
        m.in_flight_bytes,
        drop("stale"),
        drop("overflow"),
        drop("ttl"),
        drop("loss"),
        drop("sleep"),
        drop("dedup"),
        m.relay_tx_total,
        m.planning_ops_total,
        m.replan_ops.iter().sum::<u64>(),
        m.events_processed,
        m.final_clock_ms,
        status,
        m.trace_hash,
    )
}

fn write_csv(path: &Path, rows: &[String], timestamp: bool) -> Result<(), AppError> {
    let mut out = String::new();
    if timestamp {
        out.push_str(&format!(
            "# generated {}\n",
            std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        ));
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(r);
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| AppError::Validation(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<(), AppError> {
    let mut b = load_builder(&args.common.scenario)?;
    if let Some(v) = args.seed {
        apply(&mut b, "seed", &v.to_string())?;
    }
    if let Some(v) = &args.policy {
        apply(&mut b, "policy", v)?;
    }
    if let Some(v) = args.delta_ms {
        apply(&mut b, "delta_ms", &v.to_string())?;
    }
    if let Some(v) = &args.strategy {
        apply(&mut b, "strategy", v)?;
    }
    if let Some(v) = &args.density {
        apply(&mut b, "density", v)?;
    }
    let cfg = b
        .build()
        .map_err(|e| AppError::Validation(e.to_string()))?;
    let (metrics, trace) = execute(&cfg, args.trace)?;

    fs::create_dir_all(&args.common.out_dir)
        .map_err(|e| AppError::Validation(format!("{}: {e}", args.common.out_dir.display())))?;
    let row = csv_row(&cfg, &metrics, "ok");
    write_csv(
        &args.common.out_dir.join("summary.csv"),
        &[row],
        !args.common.no_timestamp,
    )?;
    if let Some(lines) = trace {
        let name = format!(
            "{}_{}_{}_{}.trace",
            cfg.name,
            cfg.policy.name(),
            cfg.strategy.name(),
            cfg.seed
        );
        let path = args.common.out_dir.join(name);
        fs::write(&path, lines.join("\n") + "\n")
            .map_err(|e| AppError::Validation(format!("{}: {e}", path.display())))?;
    }
    println!(
        "{}: seed {} unique {} B ratio {:.3} hash {}",
        cfg.name, cfg.seed, metrics.unique_collected_bytes, metrics.collected_ratio, metrics.trace_hash
    );
    Ok(())
}

fn parse_seeds(spec: &str) -> Result<Vec<u64>, AppError> {
    let bad = || AppError::Validation(format!("--seeds: cannot parse `{spec}`"));
    if let Some((a, b)) = spec.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| bad())?;
        let b: u64 = b.trim().parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        return Ok((a..=b).collect());
    }
    spec.split(',')
        .map(|s| s.trim().parse().map_err(|_| bad()))
        .collect()
}

fn split_list(spec: &Option<String>) -> Vec<Option<String>> {
    match spec {
        None => vec![None],
        Some(s) => s.split(',').map(|v| Some(v.trim().to_string())).collect(),
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<(), AppError> {
    let base = load_builder(&args.common.scenario)?;
    let seeds = parse_seeds(&args.seeds)?;
    let policies = split_list(&args.policies);
    let deltas = split_list(&args.deltas_ms);
    let strategies = split_list(&args.strategies);
    let densities = split_list(&args.densities);

    // materialize every cell first so a bad axis value fails fast
    let mut cells: Vec<Scenario> = Vec::new();
    for policy in &policies {
        for delta in &deltas {
            // delta only matters under mam1; skip redundant cells
            if delta.is_some() && policy.as_deref().map_or(true, |p| p != "mam1") && deltas.len() > 1
            {
                continue;
            }
            for strategy in &strategies {
                for density in &densities {
                    for &seed in &seeds {
                        let mut b = base.clone();
                        apply(&mut b, "seed", &seed.to_string())?;
                        if let Some(v) = policy {
                            apply(&mut b, "policy", v)?;
                        }
                        if let Some(v) = delta {
                            apply(&mut b, "delta_ms", v)?;
                        }
                        if let Some(v) = strategy {
                            apply(&mut b, "strategy", v)?;
                        }
                        if let Some(v) = density {
                            apply(&mut b, "density", v)?;
                        }
                        cells.push(
                            b.build().map_err(|e| AppError::Validation(e.to_string()))?,
                        );
                    }
                }
            }
        }
    }

    // cells are independent single-threaded instances; a failing cell is
    // recorded in its row without aborting the sweep
    let rows: Vec<String> = cells
        .par_iter()
        .map(|cfg| match execute(cfg, false) {
            Ok((m, _)) => csv_row(cfg, &m, "ok"),
            Err(AppError::Invariant(msg)) | Err(AppError::Validation(msg)) => {
                csv_row(cfg, &RunMetrics::default(), &format!("failed: {}", msg.replace(',', ";")))
            }
        })
        .collect();

    fs::create_dir_all(&args.common.out_dir)
        .map_err(|e| AppError::Validation(format!("{}: {e}", args.common.out_dir.display())))?;
    write_csv(
        &args.common.out_dir.join("sweep.csv"),
        &rows,
        !args.common.no_timestamp,
    )?;
    println!("{} cells -> {}", rows.len(), args.common.out_dir.join("sweep.csv").display());
    Ok(())
}
