//! Batch experiment runner: sweeps the (variant, level, scenario) matrix,
//! aggregates repeated seeded runs, and compares latency and byte cost
//! against stored reference measurements and the analytic latency model.

use std::fs;
use std::path::Path;

use serde::Serialize;
use thiserror::Error;

use crate::crypto::{Level, Variant};
use crate::netsim::{
    build_scenario, run_handshake_seeded, NetsimError, Scenario, SimConfig, DEFAULT_TIMEOUT_MS,
    SCENARIO_NAMES,
};

/// Reference measurements (mean handshake latency per scenario and total
/// handshake bytes per level) from hardware-in-the-loop runs.
const REFERENCE_CSV: &str = include_str!("../../data/reference.csv");

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Netsim(#[from] NetsimError),
    #[error("bad reference table: {0}")]
    BadReference(String),
    #[error("sweep cell produced no successful runs")]
    EmptyCell,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// What a reference record measures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReferenceKind {
    /// Mean handshake completion time.
    Latency,
    /// Total handshake bytes (scenario-independent).
    Bytes,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceRecord {
    pub kind: ReferenceKind,
    pub variant: Variant,
    pub level: Level,
    /// Empty for scenario-independent records.
    pub scenario: Option<String>,
    pub value: f64,
    pub unit: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceTable {
    pub records: Vec<ReferenceRecord>,
}

impl ReferenceTable {
    /// The table shipped with the crate.
    pub fn embedded() -> ReferenceTable {
        ReferenceTable::parse(REFERENCE_CSV).expect("embedded table is well-formed")
    }

    /// Parse `kind,variant,level,scenario,value,unit` records.
    pub fn parse(text: &str) -> Result<ReferenceTable, HarnessError> {
        let mut records = Vec::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || idx == 0 {
                continue; // header
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 6 {
                return Err(HarnessError::BadReference(format!(
                    "line {}: expected 6 fields, got {}",
                    idx + 1,
                    fields.len()
                )));
            }
            let kind = match fields[0] {
                "latency" => ReferenceKind::Latency,
                "bytes" => ReferenceKind::Bytes,
                other => {
                    return Err(HarnessError::BadReference(format!("unknown kind {other}")))
                }
            };
            let variant = Variant::from_name(fields[1])
                .ok_or_else(|| HarnessError::BadReference(format!("unknown variant {}", fields[1])))?;
            let level = Level::from_name(fields[2])
                .ok_or_else(|| HarnessError::BadReference(format!("unknown level {}", fields[2])))?;
            let scenario = if fields[3].is_empty() {
                None
            } else {
                Some(fields[3].to_string())
            };
            let value: f64 = fields[4]
                .parse()
                .map_err(|e| HarnessError::BadReference(format!("bad value: {e}")))?;
            records.push(ReferenceRecord {
                kind,
                variant,
                level,
                scenario,
                value,
                unit: fields[5].to_string(),
            });
        }
        Ok(ReferenceTable { records })
    }

    /// Reference mean latency in seconds for one cell.
    pub fn latency_s(&self, variant: Variant, level: Level, scenario: &str) -> Option<f64> {
        self.records
            .iter()
            .find(|r| {
                r.kind == ReferenceKind::Latency
                    && r.variant == variant
                    && r.level == level
                    && r.scenario.as_deref() == Some(scenario)
            })
            .map(|r| r.value)
    }

    /// Reference total handshake bytes for a (variant, level).
    pub fn bytes(&self, variant: Variant, level: Level) -> Option<f64> {
        self.records
            .iter()
            .find(|r| r.kind == ReferenceKind::Bytes && r.variant == variant && r.level == level)
            .map(|r| r.value)
    }
}

/// Aggregated statistics for one sweep cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateResult {
    pub variant: Variant,
    pub level: Level,
    pub scenario: String,
    pub runs: usize,
    pub failed_runs: usize,
    pub mean_ms: f64,
    pub stddev_ms: f64,
    /// Protocol bytes excluding network headers; invariant across runs.
    pub bytes_total: usize,
    pub bytes_total_with_headers: usize,
    pub reference_ms: Option<f64>,
    pub reference_bytes: Option<f64>,
    /// |mean − reference| / reference on latency, when a reference exists.
    pub deviation_fraction: Option<f64>,
}

/// The experiment matrix and shared run options.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub variants: Vec<Variant>,
    pub levels: Vec<Level>,
    pub scenarios: Vec<String>,
    pub runs: usize,
    pub base_seed: u64,
    pub jitter_enabled: bool,
    /// Override of the per-message processing delay, ms.
    pub processing_ms: Option<f64>,
    /// Override of the MTU.
    pub mtu: Option<usize>,
    /// Override of the per-variant header-compression default.
    pub rohc: Option<bool>,
    pub timeout_ms: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            variants: Variant::ALL.to_vec(),
            levels: Level::ALL.to_vec(),
            scenarios: SCENARIO_NAMES.iter().map(|s| s.to_string()).collect(),
            runs: 30,
            base_seed: 1,
            jitter_enabled: true,
            processing_ms: None,
            mtu: None,
            rohc: None,
            timeout_ms: DEFAULT_TIMEOUT_MS,
        }
    }
}

impl SweepConfig {
    fn sim_config(&self, variant: Variant) -> SimConfig {
        let mut config = SimConfig::for_variant(variant);
        if let Some(rohc) = self.rohc {
            config.overhead.rohc_enabled = rohc;
        }
        if let Some(mtu) = self.mtu {
            config.overhead = config.overhead.with_mtu(mtu);
        }
        config.timeout_ms = self.timeout_ms;
        config
    }

    fn scenario(&self, name: &str) -> Result<Scenario, HarnessError> {
        let mut scenario = build_scenario(name, self.base_seed)?.with_jitter(self.jitter_enabled);
        if let Some(p) = self.processing_ms {
            scenario = scenario.with_processing_ms(p);
        }
        Ok(scenario)
    }
}

/// Expected handshake completion time under the latency model with jitter
/// off: per message, one path traversal plus one processing delay,
/// accumulated in simulator order so the comparison is exact.
pub fn analytic_latency_oracle(variant: Variant, scenario: &Scenario) -> f64 {
    let mut clock = 0.0f64;
    for _ in 0..variant.message_count() {
        clock += scenario.one_way_path_ms();
        clock += scenario.processing_ms;
    }
    clock
}

/// Run the full matrix: `runs` seeded handshakes per cell, aggregated to
/// mean and standard deviation, annotated with reference values.
pub fn sweep(config: &SweepConfig) -> Result<Vec<AggregateResult>, HarnessError> {
    let reference = ReferenceTable::embedded();
    let mut results = Vec::new();
    for &variant in &config.variants {
        for &level in &config.levels {
            for name in &config.scenarios {
                let scenario = config.scenario(name)?;
                let sim = config.sim_config(variant);
                let mut times = Vec::with_capacity(config.runs);
                let mut failed_runs = 0usize;
                let mut bytes_total = 0usize;
                let mut bytes_with_headers = 0usize;
                for i in 0..config.runs {
                    let seed = config.base_seed.wrapping_add(i as u64);
                    let report = run_handshake_seeded(&scenario, variant, level, sim, seed)?;
                    if report.failed {
                        failed_runs += 1;
                        continue;
                    }
                    times.push(report.completion_ms);
                    bytes_total = report.bytes_total;
                    bytes_with_headers = report.bytes_total_with_headers;
                }
                if times.is_empty() {
                    return Err(HarnessError::EmptyCell);
                }
                let mean = times.iter().sum::<f64>() / times.len() as f64;
                let stddev = if times.len() > 1 {
                    let var = times.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>()
                        / (times.len() - 1) as f64;
                    var.sqrt()
                } else {
                    0.0
                };
                let reference_ms =
                    reference.latency_s(variant, level, name).map(|s| s * 1000.0);
                let deviation_fraction =
                    reference_ms.map(|r| (mean - r).abs() / r);
                results.push(AggregateResult {
                    variant,
                    level,
                    scenario: name.clone(),
                    runs: times.len(),
                    failed_runs,
                    mean_ms: mean,
                    stddev_ms: stddev,
                    bytes_total,
                    bytes_total_with_headers: bytes_with_headers,
                    reference_ms,
                    reference_bytes: reference.bytes(variant, level),
                    deviation_fraction,
                });
            }
        }
    }
    Ok(results)
}

/// Per-cell latency comparison against the reference table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellComparison {
    pub variant: Variant,
    pub level: Level,
    pub scenario: String,
    pub mean_ms: f64,
    pub reference_ms: Option<f64>,
    pub deviation_fraction: Option<f64>,
}

/// Comparison outcome: per-cell deviations plus the structural ordering
/// checks that must hold regardless of absolute calibration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub cells: Vec<CellComparison>,
    /// For every (variant, level): LEO mean < MEO mean < GEO mean.
    pub latency_ordering_ok: bool,
    /// Per level: bytes(LW3) < bytes(TB2) < bytes(TB1) < min(bytes(LW1), bytes(LW2)).
    pub bytes_ordering_ok: bool,
    pub ordering_failures: Vec<String>,
}

impl ComparisonReport {
    pub fn all_orderings_ok(&self) -> bool {
        self.latency_ordering_ok && self.bytes_ordering_ok
    }
}

/// Compare sweep results against a reference table and evaluate the ordering
/// invariants.
pub fn compare_reference(
    results: &[AggregateResult],
    reference: &ReferenceTable,
) -> ComparisonReport {
    let mut cells = Vec::with_capacity(results.len());
    for r in results {
        let reference_ms = reference
            .latency_s(r.variant, r.level, &r.scenario)
            .map(|s| s * 1000.0);
        cells.push(CellComparison {
            variant: r.variant,
            level: r.level,
            scenario: r.scenario.clone(),
            mean_ms: r.mean_ms,
            reference_ms,
            deviation_fraction: reference_ms.map(|x| (r.mean_ms - x).abs() / x),
        });
    }

    let mut failures = Vec::new();
    let find = |variant: Variant, level: Level, scenario: &str| -> Option<f64> {
        results
            .iter()
            .find(|r| r.variant == variant && r.level == level && r.scenario == scenario)
            .map(|r| r.mean_ms)
    };

    let mut latency_ok = true;
    for r in results {
        if let (Some(leo), Some(meo), Some(geo)) = (
            find(r.variant, r.level, "LEO"),
            find(r.variant, r.level, "MEO"),
            find(r.variant, r.level, "GEO"),
        ) {
            if !(leo < meo && meo < geo) {
                latency_ok = false;
                failures.push(format!(
                    "latency ordering violated for {} level {}: LEO {leo:.3} MEO {meo:.3} GEO {geo:.3}",
                    r.variant, r.level
                ));
            }
        }
    }

    let mut bytes_ok = true;
    for &level in &Level::ALL {
        let bytes = |variant: Variant| -> Option<usize> {
            results
                .iter()
                .find(|r| r.variant == variant && r.level == level)
                .map(|r| r.bytes_total)
        };
        if let (Some(tb1), Some(tb2), Some(lw1), Some(lw2), Some(lw3)) = (
            bytes(Variant::Tb1),
            bytes(Variant::Tb2),
            bytes(Variant::Lw1),
            bytes(Variant::Lw2),
            bytes(Variant::Lw3),
        ) {
            if !(lw3 < tb2 && tb2 < tb1 && tb1 < lw1.min(lw2)) {
                bytes_ok = false;
                failures.push(format!(
                    "byte ordering violated at level {level}: LW3 {lw3} TB2 {tb2} TB1 {tb1} LW1 {lw1} LW2 {lw2}"
                ));
            }
        }
    }

    // Deduplicate the per-variant latency failures produced once per cell.
    failures.dedup();

    ComparisonReport {
        cells,
        latency_ordering_ok: latency_ok,
        bytes_ordering_ok: bytes_ok,
        ordering_failures: failures,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitFormat {
    Csv,
    Json,
}

/// Render sweep results in the given format.
pub fn render(results: &[AggregateResult], format: EmitFormat) -> String {
    match format {
        EmitFormat::Csv => {
            let mut out = String::from(
                "variant,level,scenario,runs,mean_ms,stddev_ms,bytes_total,reference_ms,deviation\n",
            );
            for r in results {
                let reference = r
                    .reference_ms
                    .map(|v| format!("{v:.3}"))
                    .unwrap_or_default();
                let deviation = r
                    .deviation_fraction
                    .map(|v| format!("{v:.6}"))
                    .unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{:.6},{:.6},{},{},{}\n",
                    r.variant.name(),
                    r.level.name(),
                    r.scenario,
                    r.runs,
                    r.mean_ms,
                    r.stddev_ms,
                    r.bytes_total,
                    reference,
                    deviation
                ));
            }
            out
        }
        EmitFormat::Json => {
            serde_json::to_string_pretty(results).expect("results serialize")
        }
    }
}

/// Write sweep results to a file.
pub fn emit(
    results: &[AggregateResult],
    format: EmitFormat,
    path: &Path,
) -> Result<(), HarnessError> {
    fs::write(path, render(results, format))?;
    Ok(())
}
