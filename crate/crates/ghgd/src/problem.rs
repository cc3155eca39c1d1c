//! Problem descriptions: a universe size, the family of subset sizes drawn
//! from it, and the overlap feature under study.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{self, Count};

/// Sizes of the subsets drawn from the universe, in draw order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetSizes(Vec<u64>);

impl SubsetSizes {
    /// At least one subset is required.
    pub fn new(sizes: Vec<u64>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::InvalidSpec("no subset sizes given".into()));
        }
        Ok(Self(sizes))
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    /// Number of subsets `T`.
    pub fn t_count(&self) -> usize {
        self.0.len()
    }

    /// Smallest subset size; caps the full-overlap count.
    pub fn m_min(&self) -> u64 {
        *self.0.iter().min().expect("non-empty")
    }

    /// Elementary symmetric polynomial of degree `z` over the sizes.
    pub fn elementary_symmetric(&self, z: usize) -> Result<Count> {
        kernel::elementary_symmetric(&self.0, z)
    }
}

/// A universe of `n` distinguishable elements and the subset sizes drawn
/// uniformly and independently from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProblemSpec {
    n: u64,
    sizes: SubsetSizes,
}

impl ProblemSpec {
    pub fn new(n: u64, sizes: Vec<u64>) -> Result<Self> {
        let sizes = SubsetSizes::new(sizes)?;
        if let Some(&too_big) = sizes.values().iter().find(|&&m| m > n) {
            return Err(Error::InvalidSpec(format!(
                "subset size {too_big} exceeds universe size {n}"
            )));
        }
        Ok(Self { n, sizes })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn sizes(&self) -> &SubsetSizes {
        &self.sizes
    }

    /// Subset sizes as a plain slice.
    pub fn m(&self) -> &[u64] {
        self.sizes.values()
    }

    pub fn t_count(&self) -> usize {
        self.sizes.t_count()
    }

    /// The reduced problem `(N-1, M-1)` that drives the moment recursion.
    /// `None` once any subset would go negative or the universe is empty.
    pub fn reduced(&self) -> Option<ProblemSpec> {
        if self.n == 0 || self.m().contains(&0) {
            return None;
        }
        let sizes = self.m().iter().map(|&m| m - 1).collect();
        Some(ProblemSpec::new(self.n - 1, sizes).expect("reduction preserves bounds"))
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "N={}, M={:?}", self.n, self.m())
    }
}

/// Which function of the per-element overlap level `LO` is being counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OverlapFeature {
    /// Elements hit by exactly `t` of the subsets.
    Exactly(u32),
    /// Elements hit by at least `t` of the subsets.
    AtLeast(u32),
}

impl OverlapFeature {
    pub fn t(&self) -> u32 {
        match *self {
            OverlapFeature::Exactly(t) | OverlapFeature::AtLeast(t) => t,
        }
    }

    /// Checks `t <= T` for the given problem.
    pub fn validate(&self, spec: &ProblemSpec) -> Result<()> {
        let t_count = spec.t_count();
        if self.t() as usize > t_count {
            return Err(Error::LevelOutOfRange {
                t: self.t(),
                t_count,
            });
        }
        Ok(())
    }

    /// Overlap count of an element seen `lo` times matches this feature?
    pub fn matches(&self, lo: u32) -> bool {
        match *self {
            OverlapFeature::Exactly(t) => lo == t,
            OverlapFeature::AtLeast(t) => lo >= t,
        }
    }
}

impl fmt::Display for OverlapFeature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            OverlapFeature::Exactly(t) => write!(f, "exactly:{t}"),
            OverlapFeature::AtLeast(t) => write!(f, "at_least:{t}"),
        }
    }
}

impl FromStr for OverlapFeature {
    type Err = Error;

    /// Parses `exactly:<t>` or `at_least:<t>`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidSpec(format!("unrecognized feature `{s}`, expected exactly:<t> or at_least:<t>"));
        let (kind, level) = s.split_once(':').ok_or_else(bad)?;
        let t: u32 = level.trim().parse().map_err(|_| bad())?;
        match kind.trim() {
            "exactly" => Ok(OverlapFeature::Exactly(t)),
            "at_least" => Ok(OverlapFeature::AtLeast(t)),
            _ => Err(bad()),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum FeatureKind {
    Exactly,
    AtLeast,
}

#[derive(Serialize, Deserialize)]
struct FeatureDoc {
    kind: FeatureKind,
    t: u32,
}

impl Serialize for OverlapFeature {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let doc = match *self {
            OverlapFeature::Exactly(t) => FeatureDoc {
                kind: FeatureKind::Exactly,
                t,
            },
            OverlapFeature::AtLeast(t) => FeatureDoc {
                kind: FeatureKind::AtLeast,
                t,
            },
        };
        doc.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OverlapFeature {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let doc = FeatureDoc::deserialize(deserializer)?;
        Ok(match doc.kind {
            FeatureKind::Exactly => OverlapFeature::Exactly(doc.t),
            FeatureKind::AtLeast => OverlapFeature::AtLeast(doc.t),
        })
    }
}

/// Observed per-level tallies: `counts[t]` is the number of universe
/// elements with overlap level exactly `t`, for `t = 0..=T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LOHistogram(Vec<u64>);

impl LOHistogram {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::HistogramMismatch("empty histogram".into()));
        }
        Ok(Self(counts))
    }

    pub fn counts(&self) -> &[u64] {
        &self.0
    }

    /// Number of subsets the histogram describes.
    pub fn t_count(&self) -> usize {
        self.0.len() - 1
    }

    /// Total elements tallied; must equal the universe size.
    pub fn total(&self) -> u64 {
        self.0.iter().sum()
    }

    /// Consistency with a problem: length `T+1`, mass `N`, and the
    /// weighted tally matching the total subset mass.
    pub fn validate_for(&self, spec: &ProblemSpec) -> Result<()> {
        if self.t_count() != spec.t_count() {
            return Err(Error::HistogramMismatch(format!(
                "histogram covers {} subsets, problem has {}",
                self.t_count(),
                spec.t_count()
            )));
        }
        if self.total() != spec.n() {
            return Err(Error::HistogramMismatch(format!(
                "histogram mass {} differs from universe size {}",
                self.total(),
                spec.n()
            )));
        }
        let weighted: u64 = self
            .0
            .iter()
            .enumerate()
            .map(|(t, &c)| t as u64 * c)
            .sum();
        let subset_mass: u64 = spec.m().iter().sum();
        if weighted != subset_mass {
            return Err(Error::HistogramMismatch(format!(
                "weighted tally {weighted} differs from total subset mass {subset_mass}"
            )));
        }
        Ok(())
    }

    /// Number of elements whose level matches the feature.
    pub fn observed(&self, feature: OverlapFeature) -> u64 {
        self.0
            .iter()
            .enumerate()
            .filter(|(t, _)| feature.matches(*t as u32))
            .map(|(_, &c)| c)
            .sum()
    }
}
