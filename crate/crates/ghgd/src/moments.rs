//! Closed-form moments of the overlap statistic.
//!
//! Everything here is exact rational arithmetic, no distribution required:
//! * full-overlap expectation and the raw-moment recursion over reduced
//!   problems,
//! * central moments via the binomial transform,
//! * per-level expectations from alternating sums of elementary symmetric
//!   polynomials,
//! * means and variances for any feature via indicator decomposition over
//!   single elements and pairs.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::kernel::{alt_binom_sum, binom, Count};
use crate::problem::{OverlapFeature, ProblemSpec};

/// Largest subset count accepted by the indicator-decomposition path.
pub const DEFAULT_PATTERN_BUDGET: usize = 16;

/// Mean, variance and the low-order moments behind them.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStatistics {
    pub mean: BigRational,
    pub variance: BigRational,
    /// `E[X^v]` for `v = 0..`, as far as the producing routine goes.
    pub raw_moments: Vec<BigRational>,
    /// `E[(X-mean)^v]`, same orders as `raw_moments`.
    pub central_moments: Vec<BigRational>,
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn rat_pow(base: &BigRational, exp: u32) -> BigRational {
    num_traits::pow::pow(base.clone(), exp as usize)
}

/// Expectation of the full-overlap count: `prod_i M_i / N^(T-1)`.
pub fn expectation_full(spec: &ProblemSpec) -> BigRational {
    expectation_full_at_depth(spec, 0)
}

/// Full-overlap expectation of the `d`-fold reduced problem `(N-d, M-d)`,
/// zero as soon as some subset is exhausted.
fn expectation_full_at_depth(spec: &ProblemSpec, d: u64) -> BigRational {
    if spec.m().iter().any(|&m| m <= d) {
        return BigRational::zero();
    }
    let mut numer = BigInt::one();
    for &m in spec.m() {
        numer *= BigInt::from(m - d);
    }
    let denom = BigInt::from(Count::from(spec.n() - d).pow(spec.t_count() as u32 - 1));
    BigRational::new(numer, denom)
}

/// Raw moments `E[X^v]` of the full-overlap count for `v = 0..=v_max`.
///
/// Order `v` at reduction depth `d` factors through depth `d+1`:
/// `E_d[X^v] = E_d[X] * sum_{i<v} C(v-1, i) * E_{d+1}[X^i]`, grounded at
/// `E[X^0] = 1`. Each reduction step shrinks the universe and every subset
/// by one, so the whole table needs `O(v_max^2)` rational multiplies.
pub fn raw_moments_full(spec: &ProblemSpec, v_max: u32) -> Vec<BigRational> {
    let v_max = v_max as usize;
    // rows[d] holds orders 0..=v_max-d.
    let mut rows: Vec<Vec<BigRational>> = vec![Vec::new(); v_max + 1];
    for d in (0..=v_max).rev() {
        let width = v_max - d;
        let mut row = vec![BigRational::one()];
        let e1 = expectation_full_at_depth(spec, d as u64);
        for v in 1..=width {
            let value = if e1.is_zero() {
                BigRational::zero()
            } else {
                let mut inner = BigRational::zero();
                for (i, deeper) in rows[d + 1].iter().enumerate().take(v) {
                    inner += rat(BigInt::from(binom(v as u64 - 1, i as u64))) * deeper;
                }
                &e1 * inner
            };
            row.push(value);
        }
        rows[d] = row;
    }
    rows.swap_remove(0)
}

/// Central moments `E[(X-mean)^v]` of the full-overlap count for
/// `v = 0..=v_max`, by binomial transform of the raw moments.
pub fn central_moments_full(spec: &ProblemSpec, v_max: u32) -> Vec<BigRational> {
    let raw = raw_moments_full(spec, v_max);
    let mean = if v_max >= 1 {
        raw[1].clone()
    } else {
        return vec![BigRational::one()];
    };
    let neg_mean = -mean;
    (0..=v_max as usize)
        .map(|v| {
            let mut acc = BigRational::zero();
            for (j, raw_j) in raw.iter().enumerate().take(v + 1) {
                acc += rat(BigInt::from(binom(v as u64, j as u64)))
                    * raw_j
                    * rat_pow(&neg_mean, (v - j) as u32);
            }
            acc
        })
        .collect()
}

/// Variance of the full-overlap count in closed form:
/// `E * (1 + E' - E)` with `E'` the expectation of the reduced problem.
pub fn variance_full(spec: &ProblemSpec) -> BigRational {
    let e = expectation_full(spec);
    if e.is_zero() {
        return BigRational::zero();
    }
    let e_reduced = match spec.reduced() {
        Some(r) => expectation_full(&r),
        None => BigRational::zero(),
    };
    &e * (BigRational::one() + e_reduced - &e)
}

/// Expected number of elements whose overlap level matches `feature`, from
/// alternating sums of elementary symmetric polynomials of the sizes.
pub fn expectation_partial(spec: &ProblemSpec, feature: OverlapFeature) -> Result<BigRational> {
    feature.validate(spec)?;
    if spec.n() == 0 {
        return Ok(BigRational::zero());
    }
    let t = feature.t();
    match feature {
        OverlapFeature::AtLeast(0) => Ok(rat(BigInt::from(spec.n()))),
        OverlapFeature::Exactly(0) => {
            let covered = expectation_partial(spec, OverlapFeature::AtLeast(1))?;
            Ok(rat(BigInt::from(spec.n())) - covered)
        }
        _ => level_expectation(spec, t, matches!(feature, OverlapFeature::AtLeast(_))),
    }
}

/// Shared series for `t >= 1`: degree-`t+l` symmetric polynomial terms over
/// `N^(t+l-1)`, weighted by a single signed binomial for the exact level
/// and by a partial alternating sum for the tail.
fn level_expectation(spec: &ProblemSpec, t: u32, tail: bool) -> Result<BigRational> {
    let t_count = spec.t_count() as u32;
    let mut acc = BigRational::zero();
    for l in 0..=(t_count - t) {
        let degree = (t + l) as u64;
        let coeff = if tail {
            alt_binom_sum(degree, 0, l as i64)?
        } else {
            let c = BigInt::from(binom(degree, l as u64));
            if l % 2 == 0 {
                c
            } else {
                -c
            }
        };
        if coeff.is_zero() {
            continue;
        }
        let sym = BigInt::from(spec.sizes().elementary_symmetric(degree as usize)?);
        if sym.is_zero() {
            continue;
        }
        let denom = BigInt::from(Count::from(spec.n()).pow(degree as u32 - 1));
        acc += BigRational::new(coeff * sym, denom);
    }
    Ok(acc)
}

/// Mean and variance of the statistic for any feature via indicator
/// decomposition: one dynamic program over the subsets for a single
/// element's level, one for a pair of elements' joint levels.
pub fn indicator_moments(spec: &ProblemSpec, feature: OverlapFeature) -> Result<SummaryStatistics> {
    indicator_moments_budgeted(spec, feature, DEFAULT_PATTERN_BUDGET)
}

/// As [`indicator_moments`] with an explicit cap on the subset count. The
/// cap mirrors the regime the pair decomposition has been validated on.
pub fn indicator_moments_budgeted(
    spec: &ProblemSpec,
    feature: OverlapFeature,
    max_subsets: usize,
) -> Result<SummaryStatistics> {
    feature.validate(spec)?;
    let t_count = spec.t_count();
    if t_count > max_subsets {
        return Err(Error::PatternBudgetExceeded {
            t_count,
            budget: max_subsets,
        });
    }
    let n = spec.n();
    if n == 0 {
        let zero = BigRational::zero();
        return Ok(SummaryStatistics {
            mean: zero.clone(),
            variance: zero.clone(),
            raw_moments: vec![BigRational::one(), zero.clone(), zero.clone()],
            central_moments: vec![BigRational::one(), zero.clone(), zero],
        });
    }

    let p_single = single_element_match(spec, feature);
    let mean = rat(BigInt::from(n)) * &p_single;

    let ek2 = if n >= 2 {
        let p_pair = element_pair_match(spec, feature);
        &mean + rat(BigInt::from(n) * BigInt::from(n - 1)) * p_pair
    } else {
        mean.clone() // k is 0/1-valued, so E[X^2] = E[X]
    };
    let variance = &ek2 - &mean * &mean;
    Ok(SummaryStatistics {
        mean: mean.clone(),
        variance: variance.clone(),
        raw_moments: vec![BigRational::one(), mean, ek2],
        central_moments: vec![BigRational::one(), BigRational::zero(), variance],
    })
}

/// P(one fixed element's level matches the feature).
fn single_element_match(spec: &ProblemSpec, feature: OverlapFeature) -> BigRational {
    let n = rat(BigInt::from(spec.n()));
    let mut level = vec![BigRational::one()];
    for &m in spec.m() {
        let p_in = rat(BigInt::from(m)) / &n;
        let p_out = BigRational::one() - &p_in;
        let mut next = vec![BigRational::zero(); level.len() + 1];
        for (c, p) in level.iter().enumerate() {
            next[c] += p * &p_out;
            next[c + 1] += p * &p_in;
        }
        level = next;
    }
    level
        .iter()
        .enumerate()
        .filter(|(c, _)| feature.matches(*c as u32))
        .map(|(_, p)| p.clone())
        .sum()
}

/// P(both elements of a fixed pair match the feature). Needs `N >= 2`.
fn element_pair_match(spec: &ProblemSpec, feature: OverlapFeature) -> BigRational {
    let n = spec.n();
    let pair_denom = rat(BigInt::from(n) * BigInt::from(n - 1));
    let t_count = spec.t_count();
    // joint[a][b] = P(first element in a subsets so far, second in b).
    let mut joint = vec![vec![BigRational::zero(); t_count + 1]; t_count + 1];
    joint[0][0] = BigRational::one();
    for (i, &m) in spec.m().iter().enumerate() {
        let both = rat(BigInt::from(m) * BigInt::from(m.saturating_sub(1))) / &pair_denom;
        let one = rat(BigInt::from(m) * BigInt::from(n - m)) / &pair_denom;
        let neither = rat(BigInt::from(n - m) * BigInt::from((n - m).saturating_sub(1))) / &pair_denom;
        let mut next = vec![vec![BigRational::zero(); t_count + 1]; t_count + 1];
        for a in 0..=i {
            for b in 0..=i {
                let p = &joint[a][b];
                if p.is_zero() {
                    continue;
                }
                next[a + 1][b + 1] += p * &both;
                next[a + 1][b] += p * &one;
                next[a][b + 1] += p * &one;
                next[a][b] += p * &neither;
            }
        }
        joint = next;
    }
    let mut acc = BigRational::zero();
    for (a, row) in joint.iter().enumerate() {
        if !feature.matches(a as u32) {
            continue;
        }
        for (b, p) in row.iter().enumerate() {
            if feature.matches(b as u32) {
                acc += p;
            }
        }
    }
    acc
}

/// `E[X^2] - E[X]` for the level-`t` statistic when every subset has the
/// same size `m`, in closed form. Needs `n >= 2` and `1 <= t <= t_count`.
pub fn second_moment_equal_m_closed(
    n: u64,
    m: u64,
    t_count: usize,
    t: u32,
) -> Result<BigRational> {
    if n < 2 {
        return Err(Error::InvalidSpec(format!(
            "closed-form second moment needs n >= 2, got {n}"
        )));
    }
    if m > n {
        return Err(Error::InvalidSpec(format!(
            "subset size {m} exceeds universe size {n}"
        )));
    }
    if t < 1 || t as usize > t_count {
        return Err(Error::LevelOutOfRange { t, t_count });
    }
    let d = t_count as u64 - t as u64;
    let m_rat = rat(BigInt::from(m));
    let n_rat = rat(BigInt::from(n));
    let n1_rat = rat(BigInt::from(n - 1));
    let mut acc = BigRational::zero();
    for x in 0..=d {
        for o in 0..=d {
            for l in 0..=(t as u64 + o) {
                let c = BigInt::from(binom(d, o))
                    * BigInt::from(binom(d + l - o, d))
                    * BigInt::from(binom(t as u64 + o, l))
                    * BigInt::from(binom(t as u64 + x, x))
                    * BigInt::from(binom(t_count as u64, t as u64 + x));
                if c.is_zero() {
                    continue;
                }
                let mut term = rat(c) * rat_pow(&m_rat, (l + t as u64 + x) as u32);
                term /= signed_pow(&n1_rat, t as i64 + o as i64 - 1);
                term /= signed_pow(&n_rat, t as i64 + x as i64 - 1);
                if (t as u64 + l + x) % 2 == 1 {
                    term = -term;
                }
                acc += term;
            }
        }
    }
    Ok(acc)
}

fn signed_pow(base: &BigRational, exp: i64) -> BigRational {
    if exp >= 0 {
        rat_pow(base, exp as u32)
    } else {
        rat_pow(&base.recip(), (-exp) as u32)
    }
}
