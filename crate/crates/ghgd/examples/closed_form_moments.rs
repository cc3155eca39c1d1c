//! Closed-form moments without enumerating any distribution.
//!
//! The moment kernels run in time polynomial in the number of subsets, so
//! they handle universe sizes that are far beyond the reach of the exact
//! state-space engine. This example reproduces the mean/variance table for
//! a four-list problem over a 19815-element universe, then pushes the same
//! kernels to N = 10^6 with seven subsets.
//!
//! Run with `cargo run --example closed_form_moments`.

use std::time::Instant;

use ghgd::kernel::decimal_string;
use ghgd::moments::{expectation_partial, indicator_moments, raw_moments_full};
use ghgd::{OverlapFeature, ProblemSpec};

fn main() -> ghgd::Result<()> {
    let spec = ProblemSpec::new(19815, vec![127, 110, 87, 110])?;
    println!("{spec}");
    println!("{:>10}  {:>12}  {:>12}", "feature", "mean", "variance");
    for feature in all_features(spec.t_count() as u32) {
        let mean = expectation_partial(&spec, feature)?;
        let moments = indicator_moments(&spec, feature)?;
        println!(
            "{:>10}  {:>12}  {:>12}",
            feature.to_string(),
            decimal_string(&mean, 6),
            decimal_string(&moments.variance, 6),
        );
    }
    println!();

    // Raw moments of the full-overlap count E(k^v) for a small problem.
    let spec = ProblemSpec::new(6, vec![3, 2, 3])?;
    let raw = raw_moments_full(&spec, 4);
    println!("{spec}  raw moments of the full overlap count");
    for (v, value) in raw.iter().enumerate() {
        println!("  E(k^{v}) = {value}");
    }
    println!();

    // Large universe: exact expectations in well under a second.
    let spec = ProblemSpec::new(
        1_000_000,
        vec![40_000, 35_000, 30_000, 25_000, 20_000, 15_000, 10_000],
    )?;
    let start = Instant::now();
    println!("{spec}");
    for t in 1..=spec.t_count() as u32 {
        let mean = expectation_partial(&spec, OverlapFeature::AtLeast(t))?;
        println!("  E(LO >= {t}) = {}", decimal_string(&mean, 6));
    }
    println!("computed in {:?}", start.elapsed());
    Ok(())
}

fn all_features(t_count: u32) -> impl Iterator<Item = OverlapFeature> {
    (1..=t_count)
        .rev()
        .map(OverlapFeature::Exactly)
        .chain((1..=t_count).rev().map(OverlapFeature::AtLeast))
}
