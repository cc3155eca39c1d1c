//! Monte Carlo sampling of the overlap statistic.
//!
//! Draws subset tuples uniformly with a seeded ChaCha12 generator
//! (`rand_chacha`, seeded via `seed_from_u64`), so runs are reproducible
//! across platforms for a fixed seed.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::problem::{OverlapFeature, ProblemSpec};

/// Empirical distribution of the statistic over `draws` sampled tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleReport {
    spec: ProblemSpec,
    feature: OverlapFeature,
    draws: u64,
    seed: u64,
    histogram: BTreeMap<u64, u64>,
}

/// Samples `draws` subset tuples and tallies the statistic.
///
/// Each subset comes from a partial Fisher-Yates shuffle of a scratch
/// permutation; the swaps are reverted afterwards, so per-draw cost is
/// `O(sum M_i)` regardless of `N`.
pub fn sample_distribution(
    spec: &ProblemSpec,
    feature: OverlapFeature,
    draws: u64,
    seed: u64,
) -> Result<SampleReport> {
    feature.validate(spec)?;
    let n = spec.n();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut scratch: Vec<u64> = (0..n).collect();
    let mut level = vec![0u32; n as usize];
    let mut touched: Vec<u64> = Vec::new();
    let mut swaps: Vec<(usize, usize)> = Vec::new();
    let mut histogram: BTreeMap<u64, u64> = BTreeMap::new();
    let zero_matches = feature.matches(0);

    for _ in 0..draws {
        for &m in spec.m() {
            swaps.clear();
            for j in 0..m as usize {
                let pick = rng.gen_range(j..n as usize);
                scratch.swap(j, pick);
                swaps.push((j, pick));
                let element = scratch[j];
                if level[element as usize] == 0 {
                    touched.push(element);
                }
                level[element as usize] += 1;
            }
            debug_assert!(distinct(&scratch[..m as usize]), "subset must not repeat elements");
            for &(a, b) in swaps.iter().rev() {
                scratch.swap(a, b);
            }
        }
        let mut k = touched
            .iter()
            .filter(|&&e| feature.matches(level[e as usize]))
            .count() as u64;
        if zero_matches {
            k += n - touched.len() as u64;
        }
        *histogram.entry(k).or_insert(0) += 1;
        for &e in &touched {
            level[e as usize] = 0;
        }
        touched.clear();
    }

    Ok(SampleReport {
        spec: spec.clone(),
        feature,
        draws,
        seed,
        histogram,
    })
}

fn distinct(subset: &[u64]) -> bool {
    let mut seen: Vec<u64> = subset.to_vec();
    seen.sort_unstable();
    seen.windows(2).all(|w| w[0] != w[1])
}

impl SampleReport {
    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn feature(&self) -> OverlapFeature {
        self.feature
    }

    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Tally of statistic values over the draws.
    pub fn histogram(&self) -> &BTreeMap<u64, u64> {
        &self.histogram
    }

    pub fn empirical_mean(&self) -> f64 {
        if self.draws == 0 {
            return 0.0;
        }
        let total: f64 = self
            .histogram
            .iter()
            .map(|(&k, &c)| k as f64 * c as f64)
            .sum();
        total / self.draws as f64
    }

    /// Population variance of the sampled values.
    pub fn empirical_variance(&self) -> f64 {
        if self.draws == 0 {
            return 0.0;
        }
        let mean = self.empirical_mean();
        let total: f64 = self
            .histogram
            .iter()
            .map(|(&k, &c)| {
                let dev = k as f64 - mean;
                dev * dev * c as f64
            })
            .sum();
        total / self.draws as f64
    }

    /// Fraction of draws with statistic `>= k0`.
    pub fn tail_fraction(&self, k0: u64) -> f64 {
        if self.draws == 0 {
            return 0.0;
        }
        let hits: u64 = self.histogram.range(k0..).map(|(_, &c)| c).sum();
        hits as f64 / self.draws as f64
    }

    /// Same JSON document as the exact distribution, with the tally as
    /// counts, the number of draws as normalizer, and `draws`/`seed`
    /// appended.
    pub fn to_json_string(&self) -> String {
        let doc = SampleDoc {
            n: self.spec.n(),
            m: self.spec.m().to_vec(),
            feature: self.feature,
            normalizer: self.draws.to_string(),
            counts: self
                .histogram
                .iter()
                .map(|(&k, &c)| (k, c.to_string()))
                .collect(),
            draws: self.draws,
            seed: self.seed,
        };
        serde_json::to_string(&doc).expect("document serializes")
    }

    /// Parses the sample document; round-trips byte-for-byte.
    pub fn from_json_str(json: &str) -> Result<Self> {
        let doc: SampleDoc = serde_json::from_str(json)?;
        let spec = ProblemSpec::new(doc.n, doc.m)?;
        doc.feature.validate(&spec)?;
        let mut histogram = BTreeMap::new();
        let mut total = 0u64;
        for (k, c) in doc.counts {
            let c: u64 = c.parse().map_err(|_| {
                crate::error::Error::InvalidSpec(format!("invalid tally `{c}`"))
            })?;
            total += c;
            histogram.insert(k, c);
        }
        if total != doc.draws || doc.normalizer != doc.draws.to_string() {
            return Err(crate::error::Error::InvalidSpec(format!(
                "sample tally sums to {total}, expected {} draws",
                doc.draws
            )));
        }
        Ok(Self {
            spec,
            feature: doc.feature,
            draws: doc.draws,
            seed: doc.seed,
            histogram,
        })
    }
}

#[derive(Serialize, Deserialize)]
struct SampleDoc {
    n: u64,
    m: Vec<u64>,
    feature: OverlapFeature,
    normalizer: String,
    #[serde(with = "crate::distribution::count_entries")]
    counts: BTreeMap<u64, String>,
    draws: u64,
    seed: u64,
}
