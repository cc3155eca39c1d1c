//! Monte Carlo sampling cross-checked against exact results.
//!
//! Draws random subset tuples and compares the empirical histogram with the
//! exact distribution (small problem) and the closed-form mean (large
//! problem where the exact distribution is out of reach).
//!
//! Run with `cargo run --release --example monte_carlo_validation`.

use ghgd::kernel::{decimal_string, ratio_to_f64};
use ghgd::moments::{expectation_partial, indicator_moments};
use ghgd::{exact_distribution, sample_distribution, OverlapFeature, ProblemSpec};

fn main() -> ghgd::Result<()> {
    // Small problem: total variation distance between the empirical and the
    // exact distribution.
    let spec = ProblemSpec::new(5, vec![2, 2])?;
    let feature = OverlapFeature::Exactly(2);
    let exact = exact_distribution(&spec, feature)?;
    let draws = 200_000;
    let report = sample_distribution(&spec, feature, draws, 42)?;

    println!("{spec}  feature {feature}  draws {draws}");
    println!("{:>4}  {:>10}  {:>10}", "k", "empirical", "exact");
    let mut tv = 0.0_f64;
    for (k, &hits) in report.histogram() {
        let emp = hits as f64 / draws as f64;
        let exa = ratio_to_f64(&exact.pmf(*k));
        tv += (emp - exa).abs();
        println!("{k:>4}  {emp:>10.6}  {exa:>10.6}");
    }
    println!("total variation distance {:.6}", tv / 2.0);
    println!();

    // Large problem: empirical mean of LO >= 1 against the closed form.
    let spec = ProblemSpec::new(19815, vec![127, 110, 87, 110])?;
    let feature = OverlapFeature::AtLeast(1);
    let mean = expectation_partial(&spec, feature)?;
    let sd = ratio_to_f64(&indicator_moments(&spec, feature)?.variance).sqrt();
    let draws = 100_000;
    let report = sample_distribution(&spec, feature, draws, 7)?;
    let emp = report.empirical_mean();
    let se = sd / (draws as f64).sqrt();

    println!("{spec}  feature {feature}  draws {draws}");
    println!("exact mean     {}", decimal_string(&mean, 6));
    println!("empirical mean {emp:.6}  (standard error {se:.6})");
    println!(
        "deviation      {:+.6}  ({:+.2} standard errors)",
        emp - ratio_to_f64(&mean),
        (emp - ratio_to_f64(&mean)) / se,
    );
    Ok(())
}
