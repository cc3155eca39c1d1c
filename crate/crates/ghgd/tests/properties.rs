//! Randomized invariants, mostly pinning the exact kernels against each
//! other and against brute force on small instances.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::collection::vec;
use proptest::prelude::*;

use ghgd::inference::{z_min, ZMinRule};
use ghgd::kernel::{alt_binom_sum, binom, decimal_string, ratio_to_f64};
use ghgd::moments::{expectation_partial, indicator_moments};
use ghgd::{
    enumerate_oracle, exact_distribution, sample_distribution, ExactOverlapDistribution,
    OverlapFeature, ProblemSpec, SubsetSizes,
};

fn tiny_spec() -> impl Strategy<Value = ProblemSpec> {
    (1..=6u64, 1..=3usize)
        .prop_flat_map(|(n, t)| vec(1..=n, t).prop_map(move |m| ProblemSpec::new(n, m).unwrap()))
}

fn small_spec() -> impl Strategy<Value = ProblemSpec> {
    (1..=30u64, 1..=5usize)
        .prop_flat_map(|(n, t)| vec(1..=n, t).prop_map(move |m| ProblemSpec::new(n, m).unwrap()))
}

fn feature_for(spec: &ProblemSpec) -> impl Strategy<Value = OverlapFeature> {
    let t_count = spec.t_count() as u32;
    (0..=t_count, prop::bool::ANY).prop_map(|(t, exactly)| {
        if exactly {
            OverlapFeature::Exactly(t)
        } else {
            OverlapFeature::AtLeast(t)
        }
    })
}

proptest! {
    #[test]
    fn binom_symmetry_and_pascal(n in 0u64..=200, k in 0u64..=200) {
        let k = k.min(n);
        prop_assert_eq!(binom(n, k), binom(n, n - k));
        if n > 0 && k > 0 {
            prop_assert_eq!(binom(n, k), binom(n - 1, k - 1) + binom(n - 1, k));
        }
    }

    #[test]
    fn symmetric_polynomials_match_generating_function(sizes in vec(0u64..=50, 1..=7)) {
        // Convolve (1 + m_i x) one factor at a time.
        let mut poly = vec![BigUint::one()];
        for &m in &sizes {
            let mut next = vec![BigUint::zero(); poly.len() + 1];
            for (i, c) in poly.iter().enumerate() {
                next[i] += c;
                next[i + 1] += c * BigUint::from(m);
            }
            poly = next;
        }
        let subset = SubsetSizes::new(sizes).unwrap();
        for (z, want) in poly.iter().enumerate() {
            prop_assert_eq!(&subset.elementary_symmetric(z).unwrap(), want);
        }
    }

    #[test]
    fn alternating_binomial_sums(n in 1u64..=80) {
        // The full alternating row cancels.
        prop_assert_eq!(alt_binom_sum(n, 0, n as i64).unwrap(), BigInt::zero());
        // Prefix recurrence.
        let mut acc = BigInt::zero();
        for m in 0..=n {
            let term = BigInt::from(binom(n, m));
            acc += if m % 2 == 0 { term } else { -term };
            prop_assert_eq!(alt_binom_sum(n, 0, m as i64).unwrap(), acc.clone());
        }
    }

    #[test]
    fn decimal_rendering_is_close_to_float(p in -1_000_000i64..=1_000_000, q in 1i64..=999_983) {
        let x = BigRational::new(p.into(), q.into());
        let shown: f64 = decimal_string(&x, 6).parse().unwrap();
        prop_assert!((shown - ratio_to_f64(&x)).abs() <= 5e-7);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn engine_matches_oracle(
        (spec, feature) in tiny_spec().prop_flat_map(|s| {
            let f = feature_for(&s);
            (Just(s), f)
        })
    ) {
        let dp = exact_distribution(&spec, feature).unwrap();
        let oracle = enumerate_oracle(&spec, feature).unwrap();
        prop_assert_eq!(dp.counts(), oracle.counts());
    }

    #[test]
    fn engine_is_invariant_under_subset_order(
        spec in tiny_spec(), shift in 0usize..3, t in 1u32..=3
    ) {
        let t = t.min(spec.t_count() as u32);
        let mut rotated = spec.m().to_vec();
        let by = shift % rotated.len();
        rotated.rotate_left(by);
        let other = ProblemSpec::new(spec.n(), rotated).unwrap();
        let a = exact_distribution(&spec, OverlapFeature::AtLeast(t)).unwrap();
        let b = exact_distribution(&other, OverlapFeature::AtLeast(t)).unwrap();
        prop_assert_eq!(a.counts(), b.counts());
    }

    #[test]
    fn pmf_is_a_distribution_and_json_round_trips(
        (spec, feature) in tiny_spec().prop_flat_map(|s| {
            let f = feature_for(&s);
            (Just(s), f)
        })
    ) {
        let dist = exact_distribution(&spec, feature).unwrap();
        prop_assert_eq!(dist.tail_probability(0), BigRational::one());
        prop_assert!(dist.mean() >= BigRational::zero());

        let json = dist.to_json_string();
        let back = ExactOverlapDistribution::from_json_str(&json).unwrap();
        prop_assert_eq!(back.to_json_string(), json);
        prop_assert_eq!(back.counts(), dist.counts());
    }

    #[test]
    fn closed_form_mean_matches_distribution(
        (spec, feature) in small_spec().prop_flat_map(|s| {
            let f = feature_for(&s);
            (Just(s), f)
        })
    ) {
        let fast = expectation_partial(&spec, feature).unwrap();
        let indicator = indicator_moments(&spec, feature).unwrap().mean;
        prop_assert_eq!(&fast, &indicator);
        // Spot-check against the full engine where it is cheap.
        if spec.n() <= 12 {
            let dist = exact_distribution(&spec, feature).unwrap();
            prop_assert_eq!(&fast, &dist.mean());
            prop_assert_eq!(
                indicator_moments(&spec, feature).unwrap().variance,
                dist.variance()
            );
        }
    }

    #[test]
    fn sampler_mass_and_support(
        (spec, feature) in small_spec().prop_flat_map(|s| {
            let f = feature_for(&s);
            (Just(s), f)
        }),
        seed in 0u64..1000,
    ) {
        let draws = 400u64;
        let report = sample_distribution(&spec, feature, draws, seed).unwrap();
        let mass: u64 = report.histogram().values().sum();
        prop_assert_eq!(mass, draws);
        for &k in report.histogram().keys() {
            prop_assert!(k <= spec.n());
        }
        let again = sample_distribution(&spec, feature, draws, seed).unwrap();
        prop_assert_eq!(report.histogram(), again.histogram());
    }

    #[test]
    fn z_min_rules_bracket_the_interval(
        mean_num in 0i64..=2_000, var_num in 0i64..=2_000, denom in 1i64..=97,
        alpha_mil in 1u32..=999_999,
    ) {
        let mean = BigRational::new(mean_num.into(), denom.into());
        let variance = BigRational::new(var_num.into(), denom.into());
        let alpha = alpha_mil as f64 / 1_000_000.0;

        let floor = z_min(&mean, &variance, alpha, ZMinRule::FloorOfInterval);
        let strict = z_min(&mean, &variance, alpha, ZMinRule::StrictCeil);
        prop_assert_eq!(strict, floor + 1);

        // floor is inside the band, floor+1 is not
        let cut = &variance / BigRational::from_float(alpha).unwrap();
        let inside = |z: u64| {
            let zr = BigRational::from_integer(z.into());
            if zr <= mean {
                return true;
            }
            let d = &zr - &mean;
            &d * &d <= cut
        };
        prop_assert!(inside(floor));
        prop_assert!(!inside(floor + 1));
    }
}

#[test]
fn ingest_is_stable_under_line_order_and_duplicates() {
    use ghgd::input::{ingest, UniverseSpec};
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let a1 = write("a1.txt", "x1\nx2\nx3\n");
    let a2 = write("a2.txt", "x3\n# comment\n\nx1\nx2\nx1\n");
    let b = write("b.txt", "x2\nx9\n");

    let first = ingest(
        &[a1.clone(), b.clone()],
        &UniverseSpec::Size(50),
        false,
    )
    .unwrap();
    let second = ingest(&[a2, b], &UniverseSpec::Size(50), false).unwrap();
    assert_eq!(
        first.lists.problem_spec().unwrap().m(),
        second.lists.problem_spec().unwrap().m()
    );
    assert_eq!(
        first.lists.observed_lo_counts().counts(),
        second.lists.observed_lo_counts().counts()
    );
    assert!(first.warnings.is_empty());
    assert_eq!(second.warnings.len(), 1);
}

#[test]
fn report_rendering_is_deterministic() {
    use ghgd::inference::{build_report, InferenceConfig};
    use ghgd::LOHistogram;
    let spec = ProblemSpec::new(500, vec![40, 25, 30]).unwrap();
    let observed = LOHistogram::new(vec![425, 60, 10, 5]).unwrap();
    let a = build_report(&spec, &observed, InferenceConfig::default()).unwrap();
    let b = build_report(&spec, &observed, InferenceConfig::default()).unwrap();
    assert_eq!(a.render_text(), b.render_text());
    assert_eq!(a.render_tsv(), b.render_tsv());
    assert_eq!(a.to_json_string(), b.to_json_string());
}
