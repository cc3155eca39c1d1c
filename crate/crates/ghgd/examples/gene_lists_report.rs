//! End-to-end run on identifier files.
//!
//! Reads the four demo gene lists shipped under `examples/data/gene_lists/`,
//! checks them against a universe of 19815 identifiers, tallies the overlap
//! profile, and prints the full significance report. This is the library
//! equivalent of
//!
//! ```text
//! ghgd report examples/data/gene_lists/list_*.txt --universe-size 19815
//! ```
//!
//! Run with `cargo run --example gene_lists_report`.

use std::path::{Path, PathBuf};

use ghgd::inference::{build_report, InferenceConfig};
use ghgd::input::{ingest, UniverseSpec};

fn main() -> ghgd::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/gene_lists");
    let paths: Vec<PathBuf> = ["list_a.txt", "list_b.txt", "list_c.txt", "list_d.txt"]
        .iter()
        .map(|name| dir.join(name))
        .collect();

    let ingested = ingest(&paths, &UniverseSpec::Size(19_815), false)?;
    for warning in &ingested.warnings {
        eprintln!("warning: {warning}");
    }

    let lists = &ingested.lists;
    for (name, ids) in lists.names().iter().zip(lists.lists()) {
        let short = Path::new(name).file_name().unwrap_or_default();
        println!("{}: {} identifiers", short.to_string_lossy(), ids.len());
    }
    println!();

    let spec = lists.problem_spec()?;
    let observed = lists.observed_lo_counts();
    let report = build_report(&spec, &observed, InferenceConfig::default())?;
    print!("{}", report.render_text());
    Ok(())
}
