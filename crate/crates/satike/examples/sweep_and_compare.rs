//! Run a reduced sweep, render the CSV, and compare against the shipped
//! reference measurements.
//!
//!     cargo run --example sweep_and_compare

use satike::harness::{
    compare_reference, render, sweep, EmitFormat, ReferenceTable, SweepConfig,
};
use satike::Variant;

fn main() {
    let config = SweepConfig {
        variants: vec![Variant::Tb1, Variant::Tb2, Variant::Lw3],
        runs: 10,
        ..SweepConfig::default()
    };
    let results = sweep(&config).unwrap();
    println!("{}", render(&results, EmitFormat::Csv));

    let report = compare_reference(&results, &ReferenceTable::embedded());
    for cell in &report.cells {
        if let (Some(reference), Some(deviation)) = (cell.reference_ms, cell.deviation_fraction) {
            println!(
                "{} {} {}: mean {:8.2} ms, reference {:8.2} ms, deviation {:5.1}%",
                cell.variant,
                cell.level,
                cell.scenario,
                cell.mean_ms,
                reference,
                deviation * 100.0
            );
        }
    }
    println!(
        "latency ordering ok: {}; byte ordering ok: {}",
        report.latency_ordering_ok, report.bytes_ordering_ok
    );
}
