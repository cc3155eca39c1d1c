//! Exact distribution of the overlap statistic.
//!
//! The central object is [`ExactOverlapDistribution`]: for a problem and an
//! overlap feature it holds the exact count of subset tuples producing each
//! value `k` of the statistic, plus the normalizer `prod_i C(N, M_i)`.
//!
//! Three independent routes produce counts:
//! * [`exact_distribution`]: a layered dynamic program over overlap-level
//!   profiles, polynomial in practice and the workhorse.
//! * [`enumerate_oracle`]: brute-force walk over every subset tuple, for
//!   cross-checking small problems.
//! * [`full_overlap_counts`]: the inclusion-exclusion recursion for the
//!   special case "every subset overlaps in exactly k elements".

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::{binom, Count};
use crate::problem::{OverlapFeature, ProblemSpec};

/// Default cap on cumulative weighted states in the layered DP.
pub const DEFAULT_STATE_BUDGET: u64 = 100_000_000;

/// Default cap on subset tuples visited by the enumeration oracle.
pub const DEFAULT_ENUM_BUDGET: u64 = 10_000_000;

/// Number of equally likely subset tuples: `prod_i C(N, M_i)`.
pub fn total_selections(spec: &ProblemSpec) -> Count {
    spec.m().iter().map(|&m| binom(spec.n(), m)).product()
}

/// Counts of tuples whose common intersection has size exactly `k`, for
/// `k = 0..=m_min`. Computed top-down: the product
/// `C(N,k) * prod_i C(N-k, M_i-k)` fixes a k-element core and lets the
/// remainders fall anywhere, so the tuples with a strictly larger core are
/// subtracted back out.
pub fn full_overlap_counts(spec: &ProblemSpec) -> Vec<Count> {
    let n = spec.n();
    let m_min = spec.sizes().m_min();
    let mut counts = vec![BigInt::zero(); m_min as usize + 1];
    for k in (0..=m_min).rev() {
        let mut at_least: BigInt = BigInt::from(binom(n, k));
        for &m in spec.m() {
            at_least *= BigInt::from(binom(n - k, m - k));
        }
        let mut overshoot = BigInt::zero();
        for i in k + 1..=m_min {
            overshoot += BigInt::from(binom(i, k)) * &counts[i as usize];
        }
        counts[k as usize] = at_least - overshoot;
    }
    counts
        .into_iter()
        .map(|c| {
            let (sign, mag) = c.into_parts();
            assert_ne!(sign, num_bigint::Sign::Minus, "full-overlap count went negative");
            mag
        })
        .collect()
}

/// Count of tuples whose common intersection has size exactly `k`.
/// Zero for `k` above the smallest subset size.
pub fn count_full_overlap(spec: &ProblemSpec, k: u64) -> Count {
    if k > spec.sizes().m_min() {
        return Count::zero();
    }
    full_overlap_counts(spec).swap_remove(k as usize)
}

/// Integer identity linking a problem to its reduction:
/// `k * C_{N,M}(k) == N * C_{N-1,M-1}(k-1)`, checked in exact arithmetic.
pub fn reduction_identity_check(spec: &ProblemSpec, k: u64) -> Result<bool> {
    if k < 1 || k > spec.sizes().m_min() {
        return Err(Error::InvalidSpec(format!(
            "reduction identity needs 1 <= k <= m_min, got k={k}"
        )));
    }
    let reduced = spec.reduced().ok_or_else(|| {
        Error::InvalidSpec("reduction identity needs every subset non-empty".into())
    })?;
    let lhs = count_full_overlap(spec, k) * k;
    let rhs = count_full_overlap(&reduced, k - 1) * spec.n();
    Ok(lhs == rhs)
}

/// Overlap-level profile: `state[lo]` elements are covered by exactly `lo`
/// of the subsets placed so far.
type Profile = Vec<u64>;

/// Runs the layered DP and returns the terminal profiles with their
/// weights. Weights are relative to one fixed placement of the first
/// subset; multiply by `C(N, M_0)` to recover tuple counts.
fn terminal_profiles(spec: &ProblemSpec, state_budget: u64) -> Result<Vec<(Profile, Count)>> {
    let n = spec.n();
    let m = spec.m();
    let mut layer: HashMap<Profile, Count> = HashMap::new();
    layer.insert(vec![n - m[0], m[0]], Count::one());
    let mut reached = 1u64;

    for &m_i in &m[1..] {
        let mut next: HashMap<Profile, Count> = HashMap::new();
        for (profile, weight) in &layer {
            expand_profile(profile, weight, m_i, &mut next);
            let used = reached + next.len() as u64;
            if used > state_budget {
                return Err(Error::StateBudgetExceeded {
                    reached: used,
                    budget: state_budget,
                });
            }
        }
        reached += next.len() as u64;
        layer = next;
    }
    Ok(layer.into_iter().collect())
}

/// Distributes a new subset of size `m_i` over the levels of `profile`:
/// each way of taking `km[j]` elements from level `j` (with the counts
/// summing to `m_i`) promotes those elements one level and carries the
/// product of per-level selection counts as its weight.
fn expand_profile(profile: &[u64], weight: &Count, m_i: u64, next: &mut HashMap<Profile, Count>) {
    let levels = profile.len();
    // suffix_room[j] = how much of m_i the levels after j can still absorb.
    let mut suffix_room = vec![0u64; levels + 1];
    for j in (0..levels).rev() {
        suffix_room[j] = suffix_room[j + 1] + profile[j];
    }

    let mut taken = vec![0u64; levels];
    fn rec(
        j: usize,
        rem: u64,
        factor: Count,
        profile: &[u64],
        suffix_room: &[u64],
        taken: &mut Vec<u64>,
        next: &mut HashMap<Profile, Count>,
    ) {
        if j == profile.len() {
            debug_assert_eq!(rem, 0);
            let mut successor = Vec::with_capacity(profile.len() + 1);
            successor.push(profile[0] - taken[0]);
            for lo in 1..profile.len() {
                successor.push(profile[lo] - taken[lo] + taken[lo - 1]);
            }
            successor.push(taken[profile.len() - 1]);
            *next.entry(successor).or_insert_with(Count::zero) += factor;
            return;
        }
        let low = rem.saturating_sub(suffix_room[j + 1]);
        let high = profile[j].min(rem);
        for km in low..=high {
            taken[j] = km;
            let f = &factor * binom(profile[j], km);
            rec(j + 1, rem - km, f, profile, suffix_room, taken, next);
        }
    }
    if m_i > suffix_room[0] {
        return; // cannot happen for valid specs; keeps the recursion total
    }
    rec(0, m_i, weight.clone(), profile, &suffix_room, &mut taken, next);
}

/// Exact distribution via the layered DP, default state budget.
pub fn exact_distribution(
    spec: &ProblemSpec,
    feature: OverlapFeature,
) -> Result<ExactOverlapDistribution> {
    exact_distribution_budgeted(spec, feature, DEFAULT_STATE_BUDGET)
}

/// Exact distribution via the layered DP with an explicit state budget.
pub fn exact_distribution_budgeted(
    spec: &ProblemSpec,
    feature: OverlapFeature,
    state_budget: u64,
) -> Result<ExactOverlapDistribution> {
    feature.validate(spec)?;
    let terminal = terminal_profiles(spec, state_budget)?;
    let first_subset_ways = binom(spec.n(), spec.m()[0]);
    let mut counts: BTreeMap<u64, Count> = BTreeMap::new();
    for (profile, weight) in terminal {
        let k = statistic(&profile, feature);
        *counts.entry(k).or_insert_with(Count::zero) += weight;
    }
    for weight in counts.values_mut() {
        *weight *= &first_subset_ways;
    }
    ExactOverlapDistribution::from_counts(spec.clone(), feature, counts)
}

fn statistic(profile: &[u64], feature: OverlapFeature) -> u64 {
    match feature {
        OverlapFeature::Exactly(t) => profile[t as usize],
        OverlapFeature::AtLeast(t) => profile[t as usize..].iter().sum(),
    }
}

/// Exact distribution by walking every subset tuple, default budget.
pub fn enumerate_oracle(
    spec: &ProblemSpec,
    feature: OverlapFeature,
) -> Result<ExactOverlapDistribution> {
    enumerate_oracle_budgeted(spec, feature, DEFAULT_ENUM_BUDGET)
}

/// Exact distribution by brute-force enumeration of all subset tuples.
/// Refuses problems whose tuple count exceeds `tuple_budget`.
pub fn enumerate_oracle_budgeted(
    spec: &ProblemSpec,
    feature: OverlapFeature,
    tuple_budget: u64,
) -> Result<ExactOverlapDistribution> {
    feature.validate(spec)?;
    let total = total_selections(spec);
    if total > Count::from(tuple_budget) {
        return Err(Error::EnumerationBudgetExceeded {
            tuples: total,
            budget: tuple_budget,
        });
    }

    let n = spec.n();
    let zero_matches = feature.matches(0);
    let mut combos: Vec<Vec<u64>> = spec.m().iter().map(|&m| (0..m).collect()).collect();
    let mut lo = vec![0u32; n as usize];
    let mut touched: Vec<u64> = Vec::new();
    let mut tally: BTreeMap<u64, u64> = BTreeMap::new();
    let mut visited = 0u64;

    'tuples: loop {
        for combo in &combos {
            for &e in combo {
                if lo[e as usize] == 0 {
                    touched.push(e);
                }
                lo[e as usize] += 1;
            }
        }
        let mut k = touched
            .iter()
            .filter(|&&e| feature.matches(lo[e as usize]))
            .count() as u64;
        if zero_matches {
            k += n - touched.len() as u64;
        }
        *tally.entry(k).or_insert(0) += 1;
        visited += 1;
        for &e in &touched {
            lo[e as usize] = 0;
        }
        touched.clear();

        // Odometer step: advance the last subset, carrying on wrap.
        for i in (0..combos.len()).rev() {
            if next_combination(&mut combos[i], n) {
                continue 'tuples;
            }
            for (pos, slot) in combos[i].iter_mut().enumerate() {
                *slot = pos as u64;
            }
            if i == 0 {
                break 'tuples;
            }
        }
        break;
    }

    assert_eq!(Count::from(visited), total, "oracle walked every tuple");
    let counts = tally
        .into_iter()
        .map(|(k, c)| (k, Count::from(c)))
        .collect();
    ExactOverlapDistribution::from_counts(spec.clone(), feature, counts)
}

/// Advances `combo` to the next `|combo|`-element combination of `0..n` in
/// lexicographic order. Returns false (leaving `combo` untouched) after the
/// last one.
fn next_combination(combo: &mut [u64], n: u64) -> bool {
    let len = combo.len();
    for j in (0..len).rev() {
        if combo[j] < n - (len - j) as u64 {
            combo[j] += 1;
            for l in j + 1..len {
                combo[l] = combo[l - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Exact probability mass of the overlap statistic for one problem and
/// feature: integer tuple counts per value of the statistic over a common
/// normalizer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactOverlapDistribution {
    spec: ProblemSpec,
    feature: OverlapFeature,
    counts: BTreeMap<u64, Count>,
    normalizer: Count,
}

impl ExactOverlapDistribution {
    fn from_counts(
        spec: ProblemSpec,
        feature: OverlapFeature,
        counts: BTreeMap<u64, Count>,
    ) -> Result<Self> {
        let normalizer = total_selections(&spec);
        let total: Count = counts.values().sum();
        if total != normalizer {
            return Err(Error::InvalidSpec(format!(
                "distribution checksum failed: counts sum to {total}, expected {normalizer}"
            )));
        }
        Ok(Self {
            spec,
            feature,
            counts,
            normalizer,
        })
    }

    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn feature(&self) -> OverlapFeature {
        self.feature
    }

    /// Tuple counts per statistic value; only values with mass appear.
    pub fn counts(&self) -> &BTreeMap<u64, Count> {
        &self.counts
    }

    pub fn normalizer(&self) -> &Count {
        &self.normalizer
    }

    /// Statistic values with non-zero mass, ascending.
    pub fn support(&self) -> Vec<u64> {
        self.counts.keys().copied().collect()
    }

    pub fn pmf(&self, k: u64) -> BigRational {
        match self.counts.get(&k) {
            Some(c) => ratio(c.clone(), self.normalizer.clone()),
            None => BigRational::zero(),
        }
    }

    /// Exact `P(X >= k0)`.
    pub fn tail_probability(&self, k0: u64) -> BigRational {
        let mass: Count = self
            .counts
            .range(k0..)
            .map(|(_, c)| c)
            .sum();
        ratio(mass, self.normalizer.clone())
    }

    pub fn mean(&self) -> BigRational {
        self.raw_moment(1)
    }

    /// Exact `E[X^v]`; `v = 0` gives 1.
    pub fn raw_moment(&self, v: u32) -> BigRational {
        let mut acc = Count::zero();
        for (&k, c) in &self.counts {
            acc += Count::from(k).pow(v) * c;
        }
        ratio(acc, self.normalizer.clone())
    }

    pub fn variance(&self) -> BigRational {
        let mean = self.mean();
        self.raw_moment(2) - &mean * &mean
    }

    /// Statistic value of largest mass; smallest such value on ties.
    pub fn mode(&self) -> u64 {
        self.counts
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(&k, _)| k)
            .expect("distribution has mass")
    }

    /// True when the mass over the contiguous range of the support rises to
    /// a single peak and falls afterwards (plateaus allowed).
    pub fn is_unimodal(&self) -> bool {
        let support = self.support();
        let (first, last) = match (support.first(), support.last()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => return true,
        };
        let zero = Count::zero();
        let masses: Vec<&Count> = (first..=last)
            .map(|k| self.counts.get(&k).unwrap_or(&zero))
            .collect();
        let peak = masses
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        masses[..=peak].windows(2).all(|w| w[0] <= w[1])
            && masses[peak..].windows(2).all(|w| w[0] >= w[1])
    }

    /// Serializes to the canonical JSON document: decimal strings for all
    /// big integers, counts keyed by statistic value in ascending order.
    pub fn to_json_string(&self) -> String {
        let doc = DistributionDoc {
            n: self.spec.n(),
            m: self.spec.m().to_vec(),
            feature: self.feature,
            normalizer: self.normalizer.to_string(),
            counts: self
                .counts
                .iter()
                .map(|(k, c)| (*k, c.to_string()))
                .collect(),
        };
        serde_json::to_string(&doc).expect("document serializes")
    }

    /// Parses the canonical JSON document, revalidating the problem and the
    /// checksum. Round-trips byte-for-byte with [`Self::to_json_string`].
    pub fn from_json_str(json: &str) -> Result<Self> {
        let doc: DistributionDoc = serde_json::from_str(json)?;
        let spec = ProblemSpec::new(doc.n, doc.m)?;
        doc.feature.validate(&spec)?;
        let mut counts = BTreeMap::new();
        for (k, c) in doc.counts {
            counts.insert(k, parse_count(&c)?);
        }
        let dist = Self::from_counts(spec, doc.feature, counts)?;
        if parse_count(&doc.normalizer)? != dist.normalizer {
            return Err(Error::InvalidSpec(
                "normalizer does not match the problem".into(),
            ));
        }
        Ok(dist)
    }
}

fn ratio(numer: Count, denom: Count) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

fn parse_count(s: &str) -> Result<Count> {
    s.parse::<BigUint>()
        .map_err(|_| Error::InvalidSpec(format!("invalid count `{s}`")))
}

#[derive(Serialize, Deserialize)]
struct DistributionDoc {
    n: u64,
    m: Vec<u64>,
    feature: OverlapFeature,
    normalizer: String,
    #[serde(with = "count_entries")]
    counts: BTreeMap<u64, String>,
}

/// Serializes count maps as JSON objects with decimal-string keys in
/// ascending numeric order.
pub(crate) mod count_entries {
    use std::collections::BTreeMap;

    use serde::de::Error as _;
    use serde::ser::SerializeMap;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(
        counts: &BTreeMap<u64, String>,
        serializer: S,
    ) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(counts.len()))?;
        for (k, v) in counts {
            map.serialize_entry(&k.to_string(), v)?;
        }
        map.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(
        deserializer: D,
    ) -> Result<BTreeMap<u64, String>, D::Error> {
        let raw = BTreeMap::<String, String>::deserialize(deserializer)?;
        raw.into_iter()
            .map(|(k, v)| {
                let k = k
                    .parse::<u64>()
                    .map_err(|_| D::Error::custom(format!("invalid statistic value `{k}`")))?;
                Ok((k, v))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problem::OverlapFeature::{AtLeast, Exactly};

    fn spec(n: u64, m: &[u64]) -> ProblemSpec {
        ProblemSpec::new(n, m.to_vec()).unwrap()
    }

    #[test]
    fn normalizer_is_product_of_choices() {
        assert_eq!(
            total_selections(&spec(5, &[2, 2])),
            Count::from(100u32)
        );
        assert_eq!(total_selections(&spec(4, &[1, 2, 3])), Count::from(96u32));
        assert_eq!(total_selections(&spec(0, &[0])), Count::one());
    }

    #[test]
    fn full_overlap_small_case() {
        // N=5, M={2,2}: k=2 means identical pairs (10 of them); k=1 means
        // sharing exactly one element; k=0 disjoint.
        let counts = full_overlap_counts(&spec(5, &[2, 2]));
        assert_eq!(counts, vec![
            Count::from(30u32),
            Count::from(60u32),
            Count::from(10u32)
        ]);
        assert_eq!(count_full_overlap(&spec(5, &[2, 2]), 2), Count::from(10u32));
        assert_eq!(count_full_overlap(&spec(5, &[2, 2]), 3), Count::zero());
    }

    #[test]
    fn full_overlap_matches_distribution_at_top_level() {
        let s = spec(6, &[3, 2, 2]);
        let counts = full_overlap_counts(&s);
        let top = exact_distribution(&s, Exactly(3)).unwrap();
        for (k, want) in counts.iter().enumerate() {
            let got = top.counts().get(&(k as u64)).cloned().unwrap_or_default();
            assert_eq!(&got, want, "k={k}");
        }
    }

    #[test]
    fn dp_matches_documented_example() {
        let d = exact_distribution(&spec(5, &[2, 2]), Exactly(2)).unwrap();
        assert_eq!(d.normalizer(), &Count::from(100u32));
        let want: BTreeMap<u64, Count> = [
            (0u64, Count::from(30u32)),
            (1, Count::from(60u32)),
            (2, Count::from(10u32)),
        ]
        .into_iter()
        .collect();
        assert_eq!(d.counts(), &want);
    }

    #[test]
    fn dp_matches_oracle_on_small_grid() {
        for (n, m) in [
            (4u64, vec![2u64, 2]),
            (5, vec![2, 2, 1]),
            (6, vec![3, 2, 2]),
            (5, vec![5, 3]),
            (3, vec![1, 1, 1]),
            (4, vec![4, 4]),
            (2, vec![1, 2, 1]),
        ] {
            let s = spec(n, &m);
            for t in 0..=m.len() as u32 {
                for feature in [Exactly(t), AtLeast(t)] {
                    let dp = exact_distribution(&s, feature).unwrap();
                    let oracle = enumerate_oracle(&s, feature).unwrap();
                    assert_eq!(dp.counts(), oracle.counts(), "{s} {feature}");
                }
            }
        }
    }

    #[test]
    fn single_subset_problem() {
        let d = exact_distribution(&spec(5, &[3]), Exactly(1)).unwrap();
        assert_eq!(d.pmf(3), BigRational::one());
        let d0 = exact_distribution(&spec(5, &[3]), Exactly(0)).unwrap();
        assert_eq!(d0.pmf(2), BigRational::one());
    }

    #[test]
    fn empty_universe() {
        let d = exact_distribution(&spec(0, &[0, 0]), AtLeast(1)).unwrap();
        assert_eq!(d.pmf(0), BigRational::one());
        assert_eq!(d.normalizer(), &Count::one());
    }

    #[test]
    fn zero_level_features() {
        let s = spec(5, &[2, 2]);
        let never = exact_distribution(&s, AtLeast(0)).unwrap();
        assert_eq!(never.pmf(5), BigRational::one());
        let missed = exact_distribution(&s, Exactly(0)).unwrap();
        let hit = exact_distribution(&s, AtLeast(1)).unwrap();
        for k in 0..=5 {
            assert_eq!(missed.pmf(k), hit.pmf(5 - k));
        }
    }

    #[test]
    fn moments_and_shape() {
        let d = exact_distribution(&spec(5, &[2, 2]), Exactly(2)).unwrap();
        // E = 4/5 * ... : mean = M1*M2/N = 4/5.
        assert_eq!(
            d.mean(),
            BigRational::new(BigInt::from(4), BigInt::from(5))
        );
        assert_eq!(d.raw_moment(0), BigRational::one());
        assert!(d.is_unimodal());
        assert_eq!(d.mode(), 1);
        assert_eq!(d.tail_probability(0), BigRational::one());
        assert_eq!(
            d.tail_probability(2),
            BigRational::new(BigInt::from(1), BigInt::from(10))
        );
        assert_eq!(d.tail_probability(3), BigRational::zero());
    }

    #[test]
    fn state_budget_is_enforced() {
        let err = exact_distribution_budgeted(&spec(30, &[10, 10, 10]), Exactly(3), 5);
        assert!(matches!(err, Err(Error::StateBudgetExceeded { .. })));
    }

    #[test]
    fn enumeration_budget_is_enforced() {
        let err = enumerate_oracle_budgeted(&spec(30, &[10, 10, 10]), Exactly(3), 1000);
        assert!(matches!(err, Err(Error::EnumerationBudgetExceeded { .. })));
    }

    #[test]
    fn reduction_identity_holds() {
        let s = spec(7, &[3, 2, 4]);
        for k in 1..=2 {
            assert!(reduction_identity_check(&s, k).unwrap());
        }
        assert!(reduction_identity_check(&spec(5, &[0, 2]), 1).is_err());
        assert!(reduction_identity_check(&spec(5, &[2, 2]), 3).is_err());
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let d = exact_distribution(&spec(5, &[2, 2]), Exactly(2)).unwrap();
        let json = d.to_json_string();
        assert_eq!(
            json,
            r#"{"n":5,"m":[2,2],"feature":{"kind":"exactly","t":2},"normalizer":"100","counts":{"0":"30","1":"60","2":"10"}}"#
        );
        let back = ExactOverlapDistribution::from_json_str(&json).unwrap();
        assert_eq!(back, d);
        assert_eq!(back.to_json_string(), json);
    }

    #[test]
    fn json_rejects_corrupt_documents() {
        let d = exact_distribution(&spec(5, &[2, 2]), Exactly(2)).unwrap();
        let json = d.to_json_string();
        let tampered = json.replace("\"30\"", "\"31\"");
        assert!(ExactOverlapDistribution::from_json_str(&tampered).is_err());
        let bad_m = json.replace("[2,2]", "[9,2]");
        assert!(ExactOverlapDistribution::from_json_str(&bad_m).is_err());
    }

    #[test]
    fn keys_above_nine_round_trip() {
        let s = spec(12, &[10, 11]);
        let d = exact_distribution(&s, AtLeast(1)).unwrap();
        assert!(d.support().iter().any(|&k| k >= 10));
        let back = ExactOverlapDistribution::from_json_str(&d.to_json_string()).unwrap();
        assert_eq!(back, d);
    }
}
