//! Distribution-free significance statements about observed overlaps.
//!
//! Given exact means and variances from the moments layer and an observed
//! per-level histogram, this module bounds tail probabilities with
//! Chebyshev's inequality (plus a unimodal sharpening), derives credibility
//! intervals, and reports how far each observed count sits above the
//! largest value still compatible with chance at level alpha.

use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{decimal_string, ratio_to_f64};
use crate::moments::{expectation_partial, indicator_moments};
use crate::problem::{LOHistogram, OverlapFeature, ProblemSpec};

/// How the significance threshold `z_min` is derived from the credibility
/// interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ZMinRule {
    /// Floor of the interval's upper end: the largest count still inside.
    FloorOfInterval,
    /// Smallest integer strictly above the mean whose standard Chebyshev
    /// bound is strictly below alpha.
    StrictCeil,
}

/// Report parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InferenceConfig {
    /// Significance level in (0, 1).
    pub alpha: f64,
    /// Assumed bound on |mean - mode| for the unimodal tail bound.
    pub mode_gap_s: f64,
    pub z_min_rule: ZMinRule,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        Self {
            alpha: 0.05,
            mode_gap_s: 1.0,
            z_min_rule: ZMinRule::FloorOfInterval,
        }
    }
}

impl InferenceConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.mode_gap_s.is_nan() || self.mode_gap_s < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "mode gap s must be non-negative, got {}",
                self.mode_gap_s
            )));
        }
        Ok(())
    }
}

/// Which inequality produced a tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundForm {
    Standard,
    Unimodal,
}

/// A tail-probability bound; `raw` may exceed 1 and is clamped only for
/// display.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailBound {
    pub raw: f64,
    pub form: BoundForm,
}

/// Where the observed count sits relative to the expectation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    AboveMean,
    BelowMean,
    AtMean,
}

/// Standard Chebyshev bound `P(|X - mean| >= lambda) <= variance/lambda^2`.
/// The deviation must be positive.
pub fn chebyshev_standard(variance: f64, lambda: f64) -> Result<f64> {
    if lambda <= 0.0 {
        return Err(Error::InvalidDeviation(lambda));
    }
    Ok(variance / (lambda * lambda))
}

/// Sharpened bound for unimodal laws whose mode sits within `s` of the
/// mean: `P(|X - mean| >= lambda) <= 4 (variance + s^2) / (9 (lambda-s)^2)`.
/// Inapplicable (None) unless `lambda > s`.
pub fn chebyshev_unimodal(variance: f64, s: f64, lambda: f64) -> Option<f64> {
    if lambda <= s {
        return None;
    }
    let gap = lambda - s;
    Some(4.0 * (variance + s * s) / (9.0 * gap * gap))
}

/// The tighter applicable bound at deviation `lambda`, or None when no form
/// applies (`lambda <= 0`).
pub fn best_tail_bound(variance: f64, s: f64, lambda: f64) -> Option<TailBound> {
    let standard = chebyshev_standard(variance, lambda).ok()?;
    match chebyshev_unimodal(variance, s, lambda) {
        Some(unimodal) if unimodal < standard => Some(TailBound {
            raw: unimodal,
            form: BoundForm::Unimodal,
        }),
        _ => Some(TailBound {
            raw: standard,
            form: BoundForm::Standard,
        }),
    }
}

/// Two-sided credibility interval `mean ± sigma/sqrt(alpha)`, clamped at
/// zero on the left.
pub fn credibility_interval(mean: f64, variance: f64, alpha: f64) -> (f64, f64) {
    let half_width = (variance / alpha).sqrt();
    ((mean - half_width).max(0.0), mean + half_width)
}

/// Largest (floor rule) or first strictly significant (strict rule) integer
/// count for the interval at level `alpha`, decided in exact arithmetic.
///
/// A float estimate seeds the search; the final placement only uses exact
/// rational comparisons of `(z - mean)^2` against `variance/alpha`, so ties
/// at integer interval ends are resolved correctly.
pub fn z_min(mean: &BigRational, variance: &BigRational, alpha: f64, rule: ZMinRule) -> u64 {
    let alpha_exact = BigRational::from_f64(alpha).expect("alpha is finite");
    let cut = variance / alpha_exact;
    let mean_f = ratio_to_f64(mean);
    let var_f = ratio_to_f64(variance);
    let estimate = (mean_f + (var_f / alpha).sqrt()).floor().max(0.0) as i64;

    let inside = |z: i64| {
        let z_r = BigRational::from_integer(z.into());
        if z_r <= *mean {
            return true;
        }
        let dev = &z_r - mean;
        &dev * &dev <= cut
    };
    match rule {
        ZMinRule::FloorOfInterval => {
            let mut z = estimate.max(0);
            while !inside(z) && z > 0 {
                z -= 1;
            }
            while inside(z + 1) {
                z += 1;
            }
            z as u64
        }
        ZMinRule::StrictCeil => {
            // Strictly outside the interval and strictly above the mean.
            let mut z = (estimate + 1).max(1);
            while z > 1 && !inside(z - 1) {
                z -= 1;
            }
            while inside(z) {
                z += 1;
            }
            z as u64
        }
    }
}

/// Surplus of an observed count over the significance threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HitStatistics {
    pub z_min: u64,
    /// Significant-hit number `noess - z_min`; None when the observation is
    /// not significantly high.
    pub shn: Option<u64>,
    /// Significant-hit ratio `shn / noess`.
    pub shr: Option<f64>,
}

pub fn hit_statistics(
    mean: &BigRational,
    variance: &BigRational,
    noess: u64,
    config: &InferenceConfig,
) -> HitStatistics {
    let z = z_min(mean, variance, config.alpha, config.z_min_rule);
    let noess_r = BigRational::from_integer(noess.into());
    if noess <= z || noess_r < *mean {
        return HitStatistics {
            z_min: z,
            shn: None,
            shr: None,
        };
    }
    let shn = noess - z;
    HitStatistics {
        z_min: z,
        shn: Some(shn),
        shr: Some(shn as f64 / noess as f64),
    }
}

/// One feature's line in the report.
#[derive(Debug, Clone, PartialEq)]
pub struct InferenceRow {
    pub feature: OverlapFeature,
    pub mean: BigRational,
    pub variance: BigRational,
    /// Number of elements observed at the feature's level ("number of
    /// elements with significant sharing" candidate).
    pub noess: u64,
    pub direction: Direction,
    /// Bound on seeing a deviation at least as large as the observed one.
    pub p_hit: Option<TailBound>,
    /// Bound on seeing any matching element at all; inapplicable once the
    /// expectation reaches 1.
    pub p_all_hit: Option<TailBound>,
    pub interval: (f64, f64),
    pub z_min: u64,
    pub shn: Option<u64>,
    pub shr: Option<f64>,
    /// Exact `P(X >= noess)`, attached on request.
    pub exact_tail: Option<BigRational>,
    /// Monte Carlo estimate of the same tail, attached on request.
    pub mc_tail: Option<f64>,
}

/// Full significance report over every level of both feature kinds.
#[derive(Debug, Clone, PartialEq)]
pub struct InferenceReport {
    pub spec: ProblemSpec,
    pub config: InferenceConfig,
    pub observed: LOHistogram,
    pub rows: Vec<InferenceRow>,
}

/// Builds the report: rows for `exactly t` with `t = T..1`, then
/// `at_least t` with `t = T..1`. Means come from the symmetric-polynomial
/// series, variances from indicator decomposition, all exact.
pub fn build_report(
    spec: &ProblemSpec,
    observed: &LOHistogram,
    config: InferenceConfig,
) -> Result<InferenceReport> {
    config.validate()?;
    observed.validate_for(spec)?;
    let t_count = spec.t_count() as u32;
    let mut rows = Vec::new();
    for kind in [OverlapFeature::Exactly as fn(u32) -> _, OverlapFeature::AtLeast] {
        for t in (1..=t_count).rev() {
            rows.push(build_row(spec, observed, &config, kind(t))?);
        }
    }
    Ok(InferenceReport {
        spec: spec.clone(),
        config,
        observed: observed.clone(),
        rows,
    })
}

fn build_row(
    spec: &ProblemSpec,
    observed: &LOHistogram,
    config: &InferenceConfig,
    feature: OverlapFeature,
) -> Result<InferenceRow> {
    let mean = expectation_partial(spec, feature)?;
    let variance = indicator_moments(spec, feature)?.variance;
    let noess = observed.observed(feature);
    let noess_r = BigRational::from_integer(noess.into());

    let deviation = &noess_r - &mean;
    let direction = if deviation.is_zero() {
        Direction::AtMean
    } else if deviation.is_positive() {
        Direction::AboveMean
    } else {
        Direction::BelowMean
    };
    let var_f = ratio_to_f64(&variance);
    let mean_f = ratio_to_f64(&mean);
    let p_hit = best_tail_bound(
        var_f,
        config.mode_gap_s,
        ratio_to_f64(&deviation.abs()),
    );
    let one = BigRational::from_integer(1.into());
    let p_all_hit = if mean < one {
        best_tail_bound(var_f, config.mode_gap_s, 1.0 - mean_f)
    } else {
        None
    };
    let interval = credibility_interval(mean_f, var_f, config.alpha);
    let hits = hit_statistics(&mean, &variance, noess, config);
    Ok(InferenceRow {
        feature,
        mean,
        variance,
        noess,
        direction,
        p_hit,
        p_all_hit,
        interval,
        z_min: hits.z_min,
        shn: hits.shn,
        shr: hits.shr,
        exact_tail: None,
        mc_tail: None,
    })
}

fn feature_label(feature: OverlapFeature) -> String {
    match feature {
        OverlapFeature::Exactly(t) => format!("LO = {t}"),
        OverlapFeature::AtLeast(t) => format!("LO >= {t}"),
    }
}

/// Clamps a bound into [0, 1] and renders it: fixed point down to 1e-3,
/// scientific below.
fn bound_display(raw: f64) -> String {
    let clamped = raw.clamp(0.0, 1.0);
    if clamped == 0.0 || clamped >= 1e-3 {
        format!("{clamped:.6}")
    } else {
        format!("{clamped:.3e}")
    }
}

fn option_bound(bound: &Option<TailBound>) -> String {
    match bound {
        Some(b) => bound_display(b.raw),
        None => "n/a".into(),
    }
}

fn direction_marker(direction: Direction) -> &'static str {
    match direction {
        Direction::AboveMean => "above",
        Direction::BelowMean => "below",
        Direction::AtMean => "at",
    }
}

fn rule_label(rule: ZMinRule) -> &'static str {
    match rule {
        ZMinRule::FloorOfInterval => "floor_of_interval",
        ZMinRule::StrictCeil => "strict_ceil",
    }
}

impl InferenceReport {
    fn has_exact_tails(&self) -> bool {
        self.rows.iter().any(|r| r.exact_tail.is_some())
    }

    fn has_mc_tails(&self) -> bool {
        self.rows.iter().any(|r| r.mc_tail.is_some())
    }

    /// Human-readable table, one row per feature.
    pub fn render_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "universe N={}  subset sizes M={:?}\n",
            self.spec.n(),
            self.spec.m()
        ));
        out.push_str(&format!(
            "alpha={}  mode gap s={}  z_min rule={}\n\n",
            self.config.alpha,
            self.config.mode_gap_s,
            rule_label(self.config.z_min_rule)
        ));
        let exact_col = self.has_exact_tails();
        let mc_col = self.has_mc_tails();
        let mut header = format!(
            "{:<9} {:>14} {:>14} {:>7} {:>6} {:>12} {:>12} {:>25} {:>6} {:>6} {:>8}",
            "feature",
            "mean",
            "variance",
            "noess",
            "dir",
            "p_hit",
            "p(X>=1)",
            "interval",
            "z_min",
            "shn",
            "shr"
        );
        if exact_col {
            header.push_str(&format!(" {:>12}", "p_exact"));
        }
        if mc_col {
            header.push_str(&format!(" {:>12}", "p_mc"));
        }
        out.push_str(&header);
        out.push('\n');
        for row in &self.rows {
            let interval = format!(
                "[{}, {}]",
                format_f64(row.interval.0),
                format_f64(row.interval.1)
            );
            let mut line = format!(
                "{:<9} {:>14} {:>14} {:>7} {:>6} {:>12} {:>12} {:>25} {:>6} {:>6} {:>8}",
                feature_label(row.feature),
                decimal_string(&row.mean, 6),
                decimal_string(&row.variance, 6),
                row.noess,
                direction_marker(row.direction),
                option_bound(&row.p_hit),
                option_bound(&row.p_all_hit),
                interval,
                row.z_min,
                row.shn.map_or("n/a".into(), |v| v.to_string()),
                row.shr
                    .map_or("n/a".into(), |v| format!("{:.2}%", v * 100.0)),
            );
            if exact_col {
                let cell = row
                    .exact_tail
                    .as_ref()
                    .map_or("n/a".into(), |p| bound_display(ratio_to_f64(p)));
                line.push_str(&format!(" {cell:>12}"));
            }
            if mc_col {
                let cell = row.mc_tail.map_or("n/a".into(), bound_display);
                line.push_str(&format!(" {cell:>12}"));
            }
            out.push_str(&line);
            out.push('\n');
        }
        out.push('\n');
        out.push_str(
            "p_hit bounds P(|X - mean| >= |noess - mean|); p(X>=1) bounds the chance of any\n\
             matching element and is n/a once the mean reaches 1. shn/shr are n/a when the\n\
             observation is not significantly above chance.\n",
        );
        out
    }

    /// Tab-separated table with a fixed column set.
    pub fn render_tsv(&self) -> String {
        let mut out = String::new();
        out.push_str(
            "feature\tt\tmean\tvariance\tnoess\tdirection\tp_hit\tp_hit_form\tp_all_hit\t\
             p_all_hit_form\tinterval_low\tinterval_high\tz_min\tshn\tshr\texact_tail\tmc_tail\n",
        );
        for row in &self.rows {
            let kind = match row.feature {
                OverlapFeature::Exactly(_) => "exactly",
                OverlapFeature::AtLeast(_) => "at_least",
            };
            let cells = [
                kind.to_string(),
                row.feature.t().to_string(),
                decimal_string(&row.mean, 6),
                decimal_string(&row.variance, 6),
                row.noess.to_string(),
                direction_marker(row.direction).to_string(),
                option_bound(&row.p_hit),
                row.p_hit
                    .map_or("n/a".into(), |b| format!("{:?}", b.form).to_lowercase()),
                option_bound(&row.p_all_hit),
                row.p_all_hit
                    .map_or("n/a".into(), |b| format!("{:?}", b.form).to_lowercase()),
                format_f64(row.interval.0),
                format_f64(row.interval.1),
                row.z_min.to_string(),
                row.shn.map_or("n/a".into(), |v| v.to_string()),
                row.shr.map_or("n/a".into(), |v| format!("{v:.6}")),
                row.exact_tail
                    .as_ref()
                    .map_or("n/a".into(), fraction_string),
                row.mc_tail.map_or("n/a".into(), |v| format!("{v:.6}")),
            ];
            out.push_str(&cells.join("\t"));
            out.push('\n');
        }
        out
    }

    /// Canonical JSON document; all exact values appear both as 6 d.p.
    /// decimals and as `numerator/denominator` strings.
    pub fn to_json_string(&self) -> String {
        #[derive(Serialize)]
        struct BoundDoc {
            raw: f64,
            form: BoundForm,
            display: String,
        }
        #[derive(Serialize)]
        struct RowDoc {
            feature: OverlapFeature,
            mean: String,
            mean_exact: String,
            variance: String,
            variance_exact: String,
            noess: u64,
            direction: Direction,
            p_hit: Option<BoundDoc>,
            p_all_hit: Option<BoundDoc>,
            interval: [f64; 2],
            z_min: u64,
            shn: Option<u64>,
            shr: Option<f64>,
            exact_tail: Option<String>,
            mc_tail: Option<f64>,
        }
        #[derive(Serialize)]
        struct ReportDoc<'a> {
            version: &'a str,
            n: u64,
            m: &'a [u64],
            alpha: f64,
            mode_gap_s: f64,
            z_min_rule: ZMinRule,
            observed: &'a [u64],
            rows: Vec<RowDoc>,
        }
        let bound_doc = |b: &Option<TailBound>| {
            b.map(|b| BoundDoc {
                raw: b.raw,
                form: b.form,
                display: bound_display(b.raw),
            })
        };
        let doc = ReportDoc {
            version: env!("CARGO_PKG_VERSION"),
            n: self.spec.n(),
            m: self.spec.m(),
            alpha: self.config.alpha,
            mode_gap_s: self.config.mode_gap_s,
            z_min_rule: self.config.z_min_rule,
            observed: self.observed.counts(),
            rows: self
                .rows
                .iter()
                .map(|row| RowDoc {
                    feature: row.feature,
                    mean: decimal_string(&row.mean, 6),
                    mean_exact: fraction_string(&row.mean),
                    variance: decimal_string(&row.variance, 6),
                    variance_exact: fraction_string(&row.variance),
                    noess: row.noess,
                    direction: row.direction,
                    p_hit: bound_doc(&row.p_hit),
                    p_all_hit: bound_doc(&row.p_all_hit),
                    interval: [row.interval.0, row.interval.1],
                    z_min: row.z_min,
                    shn: row.shn,
                    shr: row.shr,
                    exact_tail: row.exact_tail.as_ref().map(fraction_string),
                    mc_tail: row.mc_tail,
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("report serializes")
    }
}

fn format_f64(v: f64) -> String {
    format!("{v:.6}")
}

fn fraction_string(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}
