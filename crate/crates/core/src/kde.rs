//! Quartic-kernel density estimation with a lower trimming floor.
//!
//! The floor keeps the density plug-ins in the variance estimators away
//! from zero: `f̂(y) = max((1/(n h)) Σ K((X_i - y)/h), e)`.

use serde::{Deserialize, Serialize};

use crate::empirical::SortedSample;
use crate::error::{Error, Result};

/// Kernel family. Only the quartic (biweight) kernel is provided.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelSpec {
    #[default]
    Quartic,
}

impl KernelSpec {
    pub fn eval(self, u: f64) -> f64 {
        match self {
            KernelSpec::Quartic => quartic_kernel(u),
        }
    }

    /// Half-width of the kernel support.
    pub fn support_radius(self) -> f64 {
        1.0
    }
}

/// `K(u) = 15/16 (1 - u^2)^2` on `|u| < 1`, zero elsewhere.
#[inline]
pub fn quartic_kernel(u: f64) -> f64 {
    if u.abs() < 1.0 {
        let t = 1.0 - u * u;
        0.9375 * t * t
    } else {
        0.0
    }
}

/// Bandwidth and trimming exponents: `h_n = n^-c1`, `e_n = n^-c2`.
///
/// `k` is the assumed smoothness order of the true density. It only feeds
/// [`SmoothingSchedule::satisfies_rate_condition`] and never changes the
/// numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingSchedule {
    pub c1: f64,
    pub c2: f64,
    pub k: u32,
}

impl Default for SmoothingSchedule {
    fn default() -> Self {
        Self { c1: 0.5, c2: 0.2, k: 2 }
    }
}

impl SmoothingSchedule {
    pub fn new(c1: f64, c2: f64, k: u32) -> Result<Self> {
        if !(c1 > 0.0) || !c1.is_finite() {
            return Err(Error::Domain {
                what: "bandwidth exponent",
                value: c1,
            });
        }
        if !(c2 > 0.0) || !c2.is_finite() {
            return Err(Error::Domain {
                what: "trim exponent",
                value: c2,
            });
        }
        if k == 0 {
            return Err(Error::Domain {
                what: "smoothness order",
                value: 0.0,
            });
        }
        Ok(Self { c1, c2, k })
    }

    pub fn bandwidth(&self, n: usize) -> f64 {
        (n.max(1) as f64).powf(-self.c1)
    }

    pub fn trim(&self, n: usize) -> f64 {
        (n.max(1) as f64).powf(-self.c2)
    }

    /// `c2/k < c1 < 1/(1+2k)`, the exponent window under which the
    /// chi-squared limit is guaranteed. The default exponents fall outside
    /// it for `k = 2`; this is reported, not enforced.
    pub fn satisfies_rate_condition(&self) -> bool {
        let k = self.k as f64;
        self.c2 / k < self.c1 && self.c1 < 1.0 / (1.0 + 2.0 * k)
    }
}

/// `(h, e) = (n^-1/2, n^-1/5)`.
pub fn default_schedule(n: usize) -> (f64, f64) {
    let s = SmoothingSchedule::default();
    (s.bandwidth(n), s.trim(n))
}

/// A trimmed kernel density estimate over a sorted sample.
#[derive(Debug, Clone, PartialEq)]
pub struct TrimmedDensityEstimate<'a> {
    sample: &'a SortedSample,
    bandwidth: f64,
    floor: f64,
    kernel: KernelSpec,
}

impl<'a> TrimmedDensityEstimate<'a> {
    pub fn new(sample: &'a SortedSample, bandwidth: f64, floor: f64) -> Result<Self> {
        if !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(Error::Domain {
                what: "bandwidth",
                value: bandwidth,
            });
        }
        if !(floor > 0.0) || !floor.is_finite() {
            return Err(Error::Domain {
                what: "trim floor",
                value: floor,
            });
        }
        Ok(Self {
            sample,
            bandwidth,
            floor,
            kernel: KernelSpec::Quartic,
        })
    }

    pub fn with_schedule(sample: &'a SortedSample, schedule: &SmoothingSchedule) -> Result<Self> {
        let n = sample.len();
        Self::new(sample, schedule.bandwidth(n), schedule.trim(n))
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn floor(&self) -> f64 {
        self.floor
    }

    /// Kernel estimate without the floor.
    ///
    /// Only points with `|X_i - y| < h` contribute; they are located by
    /// binary search on the sorted sample and summed in ascending index
    /// order, which gives the same bits as summing over every point.
    pub fn eval_untrimmed(&self, y: f64) -> f64 {
        let xs = self.sample.as_slice();
        let h = self.bandwidth;
        let r = self.kernel.support_radius();
        let lo = xs.partition_point(|&x| (x - y) / h <= -r);
        let hi = xs.partition_point(|&x| (x - y) / h < r);
        let mut sum = 0.0;
        for &x in &xs[lo..hi] {
            sum += self.kernel.eval((x - y) / h);
        }
        sum / (xs.len() as f64 * h)
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.eval_untrimmed(y).max(self.floor)
    }
}

/// `max((1/(n h)) Σ K((X_i - y)/h), e)`.
pub fn kde_eval(d: &TrimmedDensityEstimate<'_>, y: f64) -> f64 {
    d.eval(y)
}
