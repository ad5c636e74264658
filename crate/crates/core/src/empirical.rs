//! Samples, order statistics, empirical CDFs and the order-statistic
//! estimators of a monotone transformation.
//!
//! With `X = g(Y)` and `g` increasing, `g(y) = F_X^{-1}(F_Y(y))`. The
//! estimators below replace `F_X^{-1}` by an order statistic of the
//! contaminated sample and `F_Y` by either a known CDF or the empirical CDF
//! of a training sample.

use serde::{Deserialize, Serialize};

use crate::distributions::{normal_cdf, normal_quantile};
use crate::error::{Error, Result};

/// A nonempty vector of finite observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_sorted(self) -> SortedSample {
        let mut ordered = self.values;
        ordered.sort_by(f64::total_cmp);
        SortedSample { ordered }
    }
}

/// Order-statistic view of a [`Sample`]: values in nondecreasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct SortedSample {
    ordered: Vec<f64>,
}

/// Sorts a sample into its order statistics.
pub fn sort_sample(s: &Sample) -> SortedSample {
    s.clone().into_sorted()
}

impl SortedSample {
    /// Builds a sorted sample from raw values, validating as [`Sample::new`].
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Ok(Sample::new(values)?.into_sorted())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.ordered
    }

    pub fn len(&self) -> usize {
        self.ordered.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn min(&self) -> f64 {
        self.ordered[0]
    }

    pub fn max(&self) -> f64 {
        self.ordered[self.ordered.len() - 1]
    }

    /// The `rank`-th order statistic, 1-based.
    pub fn order_stat(&self, rank: usize) -> f64 {
        self.ordered[rank - 1]
    }

    /// `#{i : x_i <= y}`.
    pub fn count_le(&self, y: f64) -> usize {
        self.ordered.partition_point(|&v| v <= y)
    }
}

/// A known, invertible reference CDF.
pub trait KnownCdf: Send + Sync {
    fn cdf(&self, x: f64) -> f64;

    /// Inverse of `cdf` on `(0, 1)`.
    fn quantile(&self, p: f64) -> f64;
}

impl KnownCdf for crate::distributions::StdNormal {
    fn cdf(&self, x: f64) -> f64 {
        normal_cdf(x)
    }

    fn quantile(&self, p: f64) -> f64 {
        normal_quantile(p).unwrap_or(f64::NAN)
    }
}

/// Normal reference with arbitrary location and scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalCdf {
    pub mean: f64,
    pub sd: f64,
}

impl KnownCdf for NormalCdf {
    fn cdf(&self, x: f64) -> f64 {
        normal_cdf((x - self.mean) / self.sd)
    }

    fn quantile(&self, p: f64) -> f64 {
        self.mean + self.sd * normal_quantile(p).unwrap_or(f64::NAN)
    }
}

/// Reference CDF given as a quantile table, linearly interpolated between
/// knots. Support is bounded: the CDF is 0 below the first knot and 1 above
/// the last.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinearCdf {
    probs: Vec<f64>,
    knots: Vec<f64>,
}

impl PiecewiseLinearCdf {
    /// `table` holds `(p, x)` rows: probabilities nondecreasing from 0 to 1,
    /// quantiles strictly increasing.
    pub fn from_quantile_table(table: &[(f64, f64)]) -> Result<Self> {
        if table.len() < 2 {
            return Err(Error::InvalidConfig("quantile table needs at least two rows".into()));
        }
        let (probs, knots): (Vec<f64>, Vec<f64>) = table.iter().copied().unzip();
        if probs[0] != 0.0 || probs[probs.len() - 1] != 1.0 {
            return Err(Error::InvalidConfig(
                "quantile table must run from p = 0 to p = 1".into(),
            ));
        }
        for w in probs.windows(2) {
            if !(w[1] >= w[0]) {
                return Err(Error::InvalidConfig(
                    "quantile table probabilities must be nondecreasing".into(),
                ));
            }
        }
        for w in knots.windows(2) {
            if !(w[1] > w[0]) || !w[0].is_finite() || !w[1].is_finite() {
                return Err(Error::InvalidConfig(
                    "quantile table values must be strictly increasing".into(),
                ));
            }
        }
        Ok(Self { probs, knots })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }
}

impl KnownCdf for PiecewiseLinearCdf {
    fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support();
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let j = self.knots.partition_point(|&k| k <= x);
        let (x0, x1) = (self.knots[j - 1], self.knots[j]);
        let (p0, p1) = (self.probs[j - 1], self.probs[j]);
        p0 + (p1 - p0) * (x - x0) / (x1 - x0)
    }

    fn quantile(&self, p: f64) -> f64 {
        if !(p > 0.0 && p < 1.0) {
            return f64::NAN;
        }
        let j = self.probs.partition_point(|&q| q < p);
        let (p0, p1) = (self.probs[j - 1], self.probs[j]);
        let (x0, x1) = (self.knots[j - 1], self.knots[j]);
        x0 + (x1 - x0) * (p - p0) / (p1 - p0)
    }
}

/// Right-continuous step CDF of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCdf {
    support: SortedSample,
}

impl EmpiricalCdf {
    pub fn new(support: SortedSample) -> Self {
        Self { support }
    }

    pub fn from_sample(s: &Sample) -> Self {
        Self::new(sort_sample(s))
    }

    pub fn support(&self) -> &SortedSample {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Number of support points at or below `y`.
    pub fn count_le(&self, y: f64) -> usize {
        self.support.count_le(y)
    }

    pub fn eval(&self, y: f64) -> f64 {
        ecdf_eval(self, y)
    }
}

/// `(1/n) #{i : values[i] <= y}`.
pub fn ecdf_eval(f: &EmpiricalCdf, y: f64) -> f64 {
    f.count_le(y) as f64 / f.len() as f64
}

/// Value of a transformation estimator at one query point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformEstimate {
    /// Query point in signal units.
    pub at: f64,
    /// Selected order statistic, in observation units.
    pub value: f64,
    /// 1-based rank of the selected order statistic.
    pub index: usize,
}

/// Estimator with a known reference CDF: `X_(floor(n F_Y(y)) + 1)`, rank
/// clamped to `n` when `F_Y(y) = 1`.
pub fn g_hat_case1(x: &SortedSample, f_y: &dyn KnownCdf, y: f64) -> TransformEstimate {
    g_hat_at_level(x, f_y.cdf(y), y)
}

/// Same as [`g_hat_case1`] with the reference CDF value already computed.
pub fn g_hat_at_level(x: &SortedSample, level: f64, y: f64) -> TransformEstimate {
    let n = x.len();
    let raw = (n as f64 * level).floor();
    let rank = if raw >= n as f64 {
        n
    } else if raw <= 0.0 {
        1
    } else {
        raw as usize + 1
    };
    TransformEstimate {
        at: y,
        value: x.order_stat(rank),
        index: rank,
    }
}

/// Estimator with an estimated reference CDF: `X_(floor(n_x F̂_Y(y)))`,
/// rank clamped into `1..=n_x`.
///
/// The rank is computed in integer arithmetic from the count behind
/// `F̂_Y(y)`, so `n_x = n_y` selects exactly the count's order statistic.
pub fn g_hat_case2(x: &SortedSample, f_y_hat: &EmpiricalCdf, y: f64) -> TransformEstimate {
    let n_x = x.len();
    let raw = n_x * f_y_hat.count_le(y) / f_y_hat.len();
    let rank = raw.clamp(1, n_x);
    TransformEstimate {
        at: y,
        value: x.order_stat(rank),
        index: rank,
    }
}

/// Weighted convex combination of two estimates at the same point.
pub fn aggregate_estimator(g1: &TransformEstimate, g2: &TransformEstimate, w1: f64, w2: f64) -> Result<f64> {
    if !(w1 >= 0.0 && w2 >= 0.0) || !(w1 + w2 > 0.0) {
        return Err(Error::WeightSum);
    }
    if g1.at != g2.at {
        return Err(Error::QueryMismatch {
            left: g1.at,
            right: g2.at,
        });
    }
    let v = (w1 * g1.value + w2 * g2.value) / (w1 + w2);
    // keep the result inside the hull despite rounding
    let (lo, hi) = if g1.value <= g2.value {
        (g1.value, g2.value)
    } else {
        (g2.value, g1.value)
    };
    Ok(v.clamp(lo, hi))
}

/// Kolmogorov-Smirnov distance `sup |F̂_n(t) - F(t)|` between the sample
/// `sorted` (nondecreasing) and a continuous CDF.
pub fn ks_distance(sorted: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &t) in sorted.iter().enumerate() {
        let f = cdf(t);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    d
}
