//! Exact overlap distributions for a small universe.
//!
//! Builds the full distribution of the overlap statistic for every feature
//! (`LO = t` and `LO >= t`) of a three-subset problem, entirely in exact
//! rational arithmetic, and prints each pmf table.
//!
//! Run with `cargo run --example exact_distribution`.

use ghgd::kernel::decimal_string;
use ghgd::{exact_distribution, OverlapFeature, ProblemSpec};

fn main() -> ghgd::Result<()> {
    let spec = ProblemSpec::new(12, vec![5, 4, 6])?;
    println!("{spec}");
    println!();

    let t_count = spec.t_count() as u32;
    let features = (1..=t_count)
        .map(OverlapFeature::Exactly)
        .chain((1..=t_count).map(OverlapFeature::AtLeast));

    for feature in features {
        let dist = exact_distribution(&spec, feature)?;
        println!("feature {feature}  (normalizer {})", dist.normalizer());
        println!("{:>4}  {:>14}  {:>10}", "k", "count", "pmf");
        for (k, count) in dist.counts() {
            let pmf = dist.pmf(*k);
            println!("{k:>4}  {count:>14}  {:>10}", decimal_string(&pmf, 6));
        }
        println!(
            "mean {}  variance {}  mode {}  unimodal {}",
            decimal_string(&dist.mean(), 6),
            decimal_string(&dist.variance(), 6),
            dist.mode(),
            dist.is_unimodal(),
        );
        println!();
    }

    // With two subsets the statistic "exactly 2 overlaps" is the classical
    // hypergeometric draw, so the pmf must equal C(m0,k) C(n-m0, m1-k) / C(n,m1).
    let spec = ProblemSpec::new(20, vec![7, 9])?;
    let dist = exact_distribution(&spec, OverlapFeature::Exactly(2))?;
    println!("{spec}  feature {}", dist.feature());
    for k in dist.counts().keys() {
        println!("  P(k = {k}) = {}", decimal_string(&dist.pmf(*k), 6));
    }
    Ok(())
}
