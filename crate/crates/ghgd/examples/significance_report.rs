//! Significance report from an observed overlap profile.
//!
//! Instead of reading identifier files this example supplies the observed
//! level histogram directly: how many universe elements landed in exactly
//! 0, 1, ..., T of the subsets. The report bounds, for every feature, how
//! likely a deviation at least as large as the observed one would be under
//! uniform random subset draws.
//!
//! Run with `cargo run --example significance_report`.

use ghgd::inference::{build_report, InferenceConfig, ZMinRule};
use ghgd::{LOHistogram, ProblemSpec};

fn main() -> ghgd::Result<()> {
    let spec = ProblemSpec::new(19815, vec![127, 110, 87, 110])?;
    // 14 elements hit by all four subsets, 25 by exactly three, 44 by
    // exactly two, 215 by exactly one; the rest untouched.
    let observed = LOHistogram::new(vec![19_517, 215, 44, 25, 14])?;

    let config = InferenceConfig {
        alpha: 0.05,
        mode_gap_s: 1.0,
        z_min_rule: ZMinRule::FloorOfInterval,
    };
    let report = build_report(&spec, &observed, config)?;
    print!("{}", report.render_text());

    println!();
    println!("same report, tab separated:");
    print!("{}", report.render_tsv());
    Ok(())
}
