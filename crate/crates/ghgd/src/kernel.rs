//! Exact integer and rational primitives shared by every layer above:
//! memoized binomial coefficients, elementary symmetric polynomials,
//! alternating binomial sums, and decimal rendering of exact ratios.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact count of selections; never negative.
pub type Count = BigUint;

/// Keep at most this many memoized binomial entries. Past the cap the
/// coefficient is still computed exactly, just not cached.
const BINOM_CACHE_CAP: usize = 1 << 20;

fn binom_cache() -> &'static Mutex<HashMap<(u64, u64), Count>> {
    static CACHE: OnceLock<Mutex<HashMap<(u64, u64), Count>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn binom_direct(n: u64, k: u64) -> Count {
    // Multiplicative form; every prefix product of (n-k+1..=n) is divisible
    // by the matching prefix of k!, so the division stays exact.
    let mut acc = Count::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Binomial coefficient `C(n, k)`, exact. Returns 0 when `k > n`.
pub fn binom(n: u64, k: u64) -> Count {
    if k > n {
        return Count::zero();
    }
    let k = k.min(n - k);
    if k == 0 {
        return Count::one();
    }
    if k == 1 {
        return Count::from(n);
    }
    if let Ok(cache) = binom_cache().lock() {
        if let Some(hit) = cache.get(&(n, k)) {
            return hit.clone();
        }
    }
    let value = binom_direct(n, k);
    if let Ok(mut cache) = binom_cache().lock() {
        if cache.len() < BINOM_CACHE_CAP {
            cache.insert((n, k), value.clone());
        }
    }
    value
}

/// Alternating sum of binomial coefficients
/// `sum_{m=m1..=m2} (-1)^m C(n, m)`.
///
/// Terms with `m < 0` or `m > n` contribute nothing; the range itself must
/// be non-empty.
pub fn alt_binom_sum(n: u64, m1: i64, m2: i64) -> Result<BigInt> {
    if m1 > m2 {
        return Err(Error::EmptySumRange { m1, m2 });
    }
    let mut acc = BigInt::zero();
    for m in m1..=m2 {
        if m < 0 || m as u64 > n {
            continue;
        }
        let term = BigInt::from(binom(n, m as u64));
        if m & 1 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// Elementary symmetric polynomial of degree `z` over the subset sizes:
/// the sum of all products of `z` distinct entries. Degree 0 yields 1.
///
/// Single pass over the inputs, updating partial sums for every degree in
/// descending order; never touches the C(T, z) individual products.
pub fn elementary_symmetric(sizes: &[u64], z: usize) -> Result<Count> {
    if z > sizes.len() {
        return Err(Error::DegreeOutOfRange {
            degree: z,
            t_count: sizes.len(),
        });
    }
    let mut e = vec![Count::zero(); z + 1];
    e[0] = Count::one();
    for &m in sizes {
        for j in (1..=z).rev() {
            let add = &e[j - 1] * m;
            e[j] += add;
        }
    }
    Ok(e.pop().expect("degree slot exists"))
}

/// Render an exact ratio as a fixed-point decimal with `places` fractional
/// digits, rounding half to even.
pub fn decimal_string(value: &BigRational, places: usize) -> String {
    let negative = value.is_negative();
    let numer = value.numer().magnitude();
    let denom = value.denom().magnitude();
    let scale = BigUint::from(10u32).pow(places as u32);
    let (mut q, r) = (numer * &scale).div_rem(denom);
    let twice = &r * 2u32;
    if twice > *denom || (twice == *denom && q.is_odd()) {
        q += 1u32;
    }
    let (int_part, frac_part) = q.div_rem(&scale);
    let sign = if negative && !q.is_zero() { "-" } else { "" };
    if places == 0 {
        format!("{sign}{int_part}")
    } else {
        format!("{sign}{int_part}.{frac_part:0places$}")
    }
}

/// Lossy conversion of an exact ratio to `f64`, usable even when numerator
/// and denominator individually overflow the float range.
pub fn ratio_to_f64(value: &BigRational) -> f64 {
    let numer = value.numer();
    let denom = value.denom();
    if numer.is_zero() {
        return 0.0;
    }
    if let Some(direct) = value.to_f64() {
        if !direct.is_nan() {
            return direct;
        }
    }
    // Scale to a ~64-bit quotient and reattach the binary exponent.
    let shift = numer.bits() as i64 - denom.bits() as i64;
    let (n_shift, d_shift) = if shift >= 0 { (0, shift) } else { (-shift, 0) };
    let scaled_n = numer.magnitude() << (n_shift as u32 + 64);
    let scaled_d = denom.magnitude() << d_shift as u32;
    let q64 = (scaled_n / scaled_d).to_f64().unwrap_or(f64::MAX);
    let magnitude = q64 * (shift as f64 - 64.0).exp2();
    if numer.sign() == Sign::Minus {
        -magnitude
    } else {
        magnitude
    }
}
