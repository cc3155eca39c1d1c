//! Exact statistics for the overlap of `T` subsets drawn uniformly and
//! independently from an `N`-element universe.
//!
//! The statistic of interest is the number of universe elements covered by
//! exactly `t` (or at least `t`) of the subsets. Everything that can be
//! exact is exact: tuple counts are big integers, probabilities and moments
//! are big rationals, and floating point only appears at the display and
//! bound-evaluation edges.
//!
//! The crate is organized bottom-up:
//!
//! * [`kernel`]: binomial coefficients, elementary symmetric polynomials,
//!   alternating sums, decimal rendering.
//! * [`problem`]: problem descriptions ([`ProblemSpec`]), overlap features
//!   ([`OverlapFeature`]), observed histograms ([`LOHistogram`]).
//! * [`distribution`]: the exact distribution of the statistic via a
//!   layered dynamic program, a brute-force enumeration oracle, and the
//!   full-overlap recursion, plus canonical JSON.
//! * [`moments`]: closed-form means, variances, raw/central moments.
//! * [`sample`]: seeded, reproducible Monte Carlo sampling.
//! * [`inference`]: Chebyshev-style tail bounds, credibility intervals,
//!   significance thresholds, and the full report.
//! * [`input`]: ingestion of element-list files.
//! * [`cli`]: the `ghgd` command-line tool built from the layers above.
//!
//! The `examples/` directory exercises each capability end to end:
//!
//! * `exact_distribution.rs`: full pmf tables, modes, the classical
//!   hypergeometric special case.
//! * `closed_form_moments.rs`: moments without touching a distribution.
//! * `monte_carlo_validation.rs`: sampled tallies against exact masses.
//! * `significance_report.rs`: the inference layer on a synthetic problem.
//! * `gene_lists_report.rs`: end-to-end run from identifier files on disk.
//!
//! ```
//! use ghgd::{exact_distribution, OverlapFeature, ProblemSpec};
//!
//! let spec = ProblemSpec::new(5, vec![2, 2])?;
//! let dist = exact_distribution(&spec, OverlapFeature::Exactly(2))?;
//! assert_eq!(dist.normalizer().to_string(), "100");
//! assert_eq!(dist.pmf(2).to_string(), "1/10");
//! # Ok::<(), ghgd::Error>(())
//! ```

pub mod cli;
pub mod distribution;
pub mod error;
pub mod inference;
pub mod input;
pub mod kernel;
pub mod moments;
pub mod problem;
pub mod sample;

pub use distribution::{
    count_full_overlap, enumerate_oracle, exact_distribution, full_overlap_counts,
    reduction_identity_check, total_selections, ExactOverlapDistribution,
};
pub use error::{Error, Result};
pub use inference::{build_report, InferenceConfig, InferenceReport, ZMinRule};
pub use input::{ingest, ElementLists, UniverseSpec};
pub use kernel::Count;
pub use moments::{
    expectation_full, expectation_partial, indicator_moments, variance_full, SummaryStatistics,
};
pub use problem::{LOHistogram, OverlapFeature, ProblemSpec, SubsetSizes};
pub use sample::{sample_distribution, SampleReport};
