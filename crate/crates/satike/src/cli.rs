//! Command-line front end: single runs, matrix sweeps, reference
//! comparisons, and dumps of the built-in scenarios and algorithm registry.
//!
//! Exit statuses: 0 on success, 1 when `compare` finds a violated ordering
//! invariant (or any runtime error), 2 on usage errors.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::crypto::{registry_table, Level, Variant};
use crate::harness::{
    compare_reference, emit, render, sweep, AggregateResult, EmitFormat, ReferenceTable,
    SweepConfig,
};
use crate::netsim::{
    build_scenario, run_handshake_seeded, SimConfig, DEFAULT_TIMEOUT_MS, SCENARIO_NAMES,
};

/// Environment variable naming the directory relative output paths resolve
/// against.
pub const OUTPUT_DIR_ENV: &str = "SATIKE_OUTPUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "satike", version, about = "Satellite IKE handshake simulator")]
pub struct CliConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one handshake and print its report.
    Run(RunArgs),
    /// Run the (variant, level, scenario) matrix and aggregate statistics.
    Sweep(SweepArgs),
    /// Check sweep results against the shipped reference measurements.
    Compare(CompareArgs),
    /// Print the built-in scenario definitions.
    DumpScenarios,
    /// Print the algorithm registry with its frozen artifact sizes.
    DumpRegistry,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long, value_parser = parse_variant)]
    pub variant: Variant,
    #[arg(long, value_parser = parse_level)]
    pub level: Level,
    #[arg(long, default_value = "LEO")]
    pub scenario: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Override the per-variant header-compression default.
    #[arg(long)]
    pub rohc: Option<bool>,
    #[arg(long, default_value_t = 1500)]
    pub mtu: usize,
    /// Per-message processing delay, ms.
    #[arg(long, default_value_t = 10.0)]
    pub processing_ms: f64,
    /// Disable link jitter for a deterministic run.
    #[arg(long)]
    pub no_jitter: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Restrict to one variant (default: all five).
    #[arg(long, value_parser = parse_variant)]
    pub variant: Option<Variant>,
    /// Restrict to one level (default: both).
    #[arg(long, value_parser = parse_level)]
    pub level: Option<Level>,
    /// Restrict to one scenario (default: LEO, MEO and GEO).
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long, default_value_t = 30)]
    pub runs: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long)]
    pub rohc: Option<bool>,
    #[arg(long, default_value_t = 1500)]
    pub mtu: usize,
    #[arg(long, default_value_t = 10.0)]
    pub processing_ms: f64,
    #[arg(long)]
    pub no_jitter: bool,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_parser = parse_format, default_value = "csv")]
    pub format: EmitFormat,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// CSV produced by `sweep`; when omitted, a fresh default sweep runs.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 30)]
    pub runs: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    Variant::from_name(s).ok_or_else(|| format!("unknown variant '{s}' (TB1/TB2/LW1/LW2/LW3)"))
}

fn parse_level(s: &str) -> Result<Level, String> {
    Level::from_name(s).ok_or_else(|| format!("unknown level '{s}' (I/III)"))
}

fn parse_format(s: &str) -> Result<EmitFormat, String> {
    match s.to_ascii_lowercase().as_str() {
        "csv" => Ok(EmitFormat::Csv),
        "json" => Ok(EmitFormat::Json),
        _ => Err(format!("unknown format '{s}' (csv/json)")),
    }
}

/// Parse an argument vector into a config. The zeroth element is the
/// program name.
pub fn parse_args<I, T>(argv: I) -> Result<CliConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    CliConfig::try_parse_from(argv)
}

fn resolve_output(path: &Path) -> PathBuf {
    if path.is_relative() {
        if let Ok(dir) = std::env::var(OUTPUT_DIR_ENV) {
            return PathBuf::from(dir).join(path);
        }
    }
    path.to_path_buf()
}

fn write_or_print(text: &str, output: Option<&PathBuf>) -> Result<(), String> {
    match output {
        Some(path) => {
            let path = resolve_output(path);
            std::fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))
        }
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Parse one line of the sweep CSV back into an aggregate record.
fn parse_csv_row(line: &str, number: usize) -> Result<AggregateResult, String> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 9 {
        return Err(format!("line {number}: expected 9 fields, got {}", fields.len()));
    }
    let bad = |what: &str| format!("line {number}: bad {what}");
    Ok(AggregateResult {
        variant: Variant::from_name(fields[0]).ok_or_else(|| bad("variant"))?,
        level: Level::from_name(fields[1]).ok_or_else(|| bad("level"))?,
        scenario: fields[2].to_string(),
        runs: fields[3].parse().map_err(|_| bad("runs"))?,
        failed_runs: 0,
        mean_ms: fields[4].parse().map_err(|_| bad("mean_ms"))?,
        stddev_ms: fields[5].parse().map_err(|_| bad("stddev_ms"))?,
        bytes_total: fields[6].parse().map_err(|_| bad("bytes_total"))?,
        bytes_total_with_headers: 0,
        reference_ms: fields[7].parse().ok(),
        reference_bytes: None,
        deviation_fraction: fields[8].parse().ok(),
    })
}

fn load_results(path: &Path) -> Result<Vec<AggregateResult>, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| "empty results file".to_string())?;
    if header
        != "variant,level,scenario,runs,mean_ms,stddev_ms,bytes_total,reference_ms,deviation"
    {
        return Err("unrecognized results header".to_string());
    }
    lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_csv_row(l, i + 2))
        .collect()
}

fn sweep_config(args: &SweepArgs) -> SweepConfig {
    let mut config = SweepConfig {
        runs: args.runs,
        base_seed: args.seed,
        jitter_enabled: !args.no_jitter,
        processing_ms: Some(args.processing_ms),
        mtu: Some(args.mtu),
        rohc: args.rohc,
        ..SweepConfig::default()
    };
    if let Some(variant) = args.variant {
        config.variants = vec![variant];
    }
    if let Some(level) = args.level {
        config.levels = vec![level];
    }
    if let Some(scenario) = &args.scenario {
        config.scenarios = vec![scenario.to_ascii_uppercase()];
    }
    config
}

fn execute_inner(config: &CliConfig) -> Result<i32, String> {
    match &config.command {
        Command::Run(args) => {
            let scenario = build_scenario(&args.scenario, args.seed)
                .map_err(|e| e.to_string())?
                .with_jitter(!args.no_jitter)
                .with_processing_ms(args.processing_ms);
            let mut sim = SimConfig::for_variant(args.variant);
            if let Some(rohc) = args.rohc {
                sim.overhead.rohc_enabled = rohc;
            }
            sim.overhead = sim.overhead.with_mtu(args.mtu);
            sim.timeout_ms = DEFAULT_TIMEOUT_MS;
            let report =
                run_handshake_seeded(&scenario, args.variant, args.level, sim, args.seed)
                    .map_err(|e| e.to_string())?;
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            write_or_print(&text, args.output.as_ref())?;
            Ok(if report.failed { 1 } else { 0 })
        }
        Command::Sweep(args) => {
            let results = sweep(&sweep_config(args)).map_err(|e| e.to_string())?;
            match &args.output {
                Some(path) => {
                    emit(&results, args.format, &resolve_output(path))
                        .map_err(|e| e.to_string())?;
                }
                None => println!("{}", render(&results, args.format)),
            }
            Ok(0)
        }
        Command::Compare(args) => {
            let results = match &args.input {
                Some(path) => load_results(path)?,
                None => sweep(&SweepConfig {
                    runs: args.runs,
                    base_seed: args.seed,
                    ..SweepConfig::default()
                })
                .map_err(|e| e.to_string())?,
            };
            let report = compare_reference(&results, &ReferenceTable::embedded());
            println!(
                "{}",
                serde_json::to_string_pretty(&report).expect("report serializes")
            );
            Ok(if report.all_orderings_ok() { 0 } else { 1 })
        }
        Command::DumpScenarios => {
            for name in SCENARIO_NAMES {
                let scenario = build_scenario(name, 1).map_err(|e| e.to_string())?;
                println!("{}", scenario.to_toml());
            }
            Ok(0)
        }
        Command::DumpRegistry => {
            println!(
                "{:<18} {:<4} {:>10} {:>10} {:>8}",
                "algorithm", "role", "public", "ct/sig", "secret"
            );
            for spec in registry_table() {
                println!(
                    "{:<18} {:<4} {:>10} {:>10} {:>8}",
                    spec.id.name(),
                    format!("{:?}", spec.role),
                    spec.public_key_bytes,
                    spec.ciphertext_or_sig_bytes,
                    spec.shared_secret_bytes
                );
            }
            Ok(0)
        }
    }
}

/// Run a parsed config, returning the process exit status.
pub fn execute(config: &CliConfig) -> i32 {
    match execute_inner(config) {
        Ok(status) => status,
        Err(message) => {
            eprintln!("error: {message}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn run_args_parse() {
        let config =
            parse_args(["satike", "run", "--variant", "lw3", "--level", "I", "--scenario", "geo",
                "--seed", "7"])
            .unwrap();
        match config.command {
            Command::Run(args) => {
                assert_eq!(args.variant, Variant::Lw3);
                assert_eq!(args.level, Level::I);
                assert_eq!(args.scenario, "geo");
                assert_eq!(args.seed, 7);
                assert_eq!(args.mtu, 1500);
                assert_eq!(args.processing_ms, 10.0);
            }
            _ => panic!("wrong command"),
        }
    }

    #[test]
    fn bare_sweep_is_full_default_matrix() {
        let config = parse_args(["satike", "sweep"]).unwrap();
        match config.command {
            Command::Sweep(args) => {
                let sc = sweep_config(&args);
                assert_eq!(sc.variants.len(), 5);
                assert_eq!(sc.levels.len(), 2);
                assert_eq!(sc.scenarios.len(), 3);
                assert_eq!(sc.runs, 30);
                assert!(sc.jitter_enabled);
            }
            _ => panic!("wrong command"),
        }
    }

    #[test]
    fn unknown_variant_and_flag_rejected() {
        assert!(parse_args(["satike", "run", "--variant", "tb9", "--level", "I"]).is_err());
        assert!(parse_args(["satike", "sweep", "--bogus"]).is_err());
        assert!(parse_args(["satike"]).is_err());
    }

    #[test]
    fn compare_round_trip_through_csv() {
        let dir = tempfile::tempdir().unwrap();
        let config = SweepConfig {
            runs: 1,
            jitter_enabled: false,
            ..SweepConfig::default()
        };
        let results = sweep(&config).unwrap();
        let path = dir.path().join("results.csv");
        emit(&results, EmitFormat::Csv, &path).unwrap();
        let loaded = load_results(&path).unwrap();
        assert_eq!(loaded.len(), results.len());
        let report = compare_reference(&loaded, &ReferenceTable::embedded());
        assert!(report.all_orderings_ok());
    }

    #[test]
    fn run_execute_reports_established_handshake() {
        let config = parse_args([
            "satike", "run", "--variant", "tb2", "--level", "I", "--scenario", "LEO",
            "--no-jitter",
        ])
        .unwrap();
        assert_eq!(execute(&config), 0);
    }

    #[test]
    fn dump_commands_succeed() {
        assert_eq!(execute(&parse_args(["satike", "dump-scenarios"]).unwrap()), 0);
        assert_eq!(execute(&parse_args(["satike", "dump-registry"]).unwrap()), 0);
    }

    #[test]
    fn bad_results_file_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "nope\n1,2,3").unwrap();
        assert!(load_results(&path).is_err());
    }
}
