//! Probability kernel: standard normal, regularized incomplete gamma, and
//! the central / noncentral chi-squared distributions with one degree of
//! freedom.
//!
//! Everything here is a pure function of its arguments. The chi-squared
//! routines go through the regularized incomplete gamma function, using the
//! power series below `s + 1` and a Lentz continued fraction above it.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

const EPS: f64 = 1e-16;
const TINY: f64 = 1e-300;
const MAX_ITER: usize = 100_000;

/// Poisson mass left out of the noncentral mixture.
pub const NONCENTRAL_TAIL: f64 = 1e-12;

const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos, g = 7).
pub fn ln_gamma(x: f64) -> f64 {
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    let t = x + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn check_gamma_args(s: f64, x: f64) -> Result<()> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Domain {
            what: "gamma shape",
            value: s,
        });
    }
    if !(x >= 0.0) {
        return Err(Error::Domain {
            what: "gamma argument",
            value: x,
        });
    }
    Ok(())
}

fn gamma_prefactor(s: f64, x: f64) -> f64 {
    (s * x.ln() - x - ln_gamma(s)).exp()
}

fn lower_series(s: f64, x: f64) -> f64 {
    let mut ap = s;
    let mut term = 1.0 / s;
    let mut sum = term;
    for _ in 0..MAX_ITER {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if term.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum * gamma_prefactor(s, x)
}

fn upper_continued_fraction(s: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - s;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_ITER {
        let an = -(i as f64) * (i as f64 - s);
        b += 2.0;
        d = an * d + b;
        if d.abs() < TINY {
            d = TINY;
        }
        c = b + an / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < EPS {
            break;
        }
    }
    gamma_prefactor(s, x) * h
}

/// Regularized lower incomplete gamma `P(s, x)`.
pub fn reg_inc_gamma_lower(s: f64, x: f64) -> Result<f64> {
    check_gamma_args(s, x)?;
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    let p = if x < s + 1.0 {
        lower_series(s, x)
    } else {
        1.0 - upper_continued_fraction(s, x)
    };
    Ok(p.clamp(0.0, 1.0))
}

/// Regularized upper incomplete gamma `Q(s, x) = 1 - P(s, x)`, computed
/// without cancellation in the far tail.
pub fn reg_inc_gamma_upper(s: f64, x: f64) -> Result<f64> {
    check_gamma_args(s, x)?;
    if x == 0.0 {
        return Ok(1.0);
    }
    if x.is_infinite() {
        return Ok(0.0);
    }
    let q = if x < s + 1.0 {
        1.0 - lower_series(s, x)
    } else {
        upper_continued_fraction(s, x)
    };
    Ok(q.clamp(0.0, 1.0))
}

/// Chi-squared distribution with one degree of freedom.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ChiSquared1;

impl ChiSquared1 {
    pub fn cdf(&self, x: f64) -> Result<f64> {
        chi2_cdf(x)
    }

    pub fn sf(&self, x: f64) -> Result<f64> {
        chi2_sf(x)
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        chi2_quantile(p)
    }
}

/// `P(Z <= x)` for `Z ~ chi2(1)`.
pub fn chi2_cdf(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain {
            what: "chi-squared argument",
            value: x,
        });
    }
    reg_inc_gamma_lower(0.5, 0.5 * x)
}

/// Upper tail `P(Z > x)` for `Z ~ chi2(1)`; used for p-values.
pub fn chi2_sf(x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::Domain {
            what: "chi-squared argument",
            value: x,
        });
    }
    reg_inc_gamma_upper(0.5, 0.5 * x)
}

fn chi2_density(x: f64) -> f64 {
    (-0.5 * x).exp() / (2.0 * std::f64::consts::PI * x).sqrt()
}

/// Inverse of [`chi2_cdf`] on `(0, 1)`.
pub fn chi2_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain {
            what: "probability",
            value: p,
        });
    }
    // chi2(1) is the square of a standard normal
    let z = normal_quantile(0.5 + 0.5 * p)?;
    let mut x = z * z;
    for _ in 0..8 {
        if x <= 0.0 {
            break;
        }
        // work on the smaller tail to keep the residual exact
        let resid = if p < 0.5 {
            chi2_cdf(x)? - p
        } else {
            (1.0 - p) - chi2_sf(x)?
        };
        let step = resid / chi2_density(x);
        let next = x - step;
        x = if next > 0.0 { next } else { 0.5 * x };
        if step.abs() <= 1e-15 * x {
            break;
        }
    }
    Ok(x)
}

/// Noncentral chi-squared with one degree of freedom and noncentrality
/// `lambda`, i.e. the law of `(Z + sqrt(lambda))^2` with `Z ~ N(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoncentralChiSquared1 {
    lambda: f64,
}

impl NoncentralChiSquared1 {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !lambda.is_finite() {
            return Err(Error::Domain {
                what: "noncentrality",
                value: lambda,
            });
        }
        Ok(Self { lambda })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        noncentral_chi2_cdf(self.lambda, x)
    }

    pub fn mean(&self) -> f64 {
        1.0 + self.lambda
    }
}

/// CDF of the noncentral chi-squared (1 df) as a Poisson(lambda/2) mixture
/// of central chi-squared CDFs with `1 + 2j` degrees of freedom.
///
/// The sum starts at the Poisson mode and walks outwards; it stops once the
/// accumulated Poisson mass is within [`NONCENTRAL_TAIL`] of one.
pub fn noncentral_chi2_cdf(lambda: f64, x: f64) -> Result<f64> {
    if !(lambda >= 0.0) || !lambda.is_finite() {
        return Err(Error::Domain {
            what: "noncentrality",
            value: lambda,
        });
    }
    if !(x >= 0.0) {
        return Err(Error::Domain {
            what: "chi-squared argument",
            value: x,
        });
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if lambda == 0.0 {
        return chi2_cdf(x);
    }
    let mu = 0.5 * lambda;
    let half_x = 0.5 * x;
    let mode = mu.floor() as u64;
    let log_weight = |j: u64| -> f64 { j as f64 * mu.ln() - mu - ln_gamma(j as f64 + 1.0) };

    let mut mass = 0.0;
    let mut total = 0.0;

    // downward from the mode, including it
    let mut w = log_weight(mode).exp();
    let mut j = mode;
    loop {
        mass += w;
        total += w * reg_inc_gamma_lower(0.5 + j as f64, half_x)?;
        if j == 0 || w < TINY {
            break;
        }
        w *= j as f64 / mu;
        j -= 1;
    }

    // upward until the remaining Poisson mass is negligible
    let mut w = log_weight(mode).exp();
    let mut j = mode;
    let limit = mode + 10 * (mu.sqrt() as u64 + 10) + 1_000;
    while 1.0 - mass > NONCENTRAL_TAIL && j < limit {
        w *= mu / (j + 1) as f64;
        j += 1;
        mass += w;
        total += w * reg_inc_gamma_lower(0.5 + j as f64, half_x)?;
    }
    Ok(total.clamp(0.0, 1.0))
}

/// The standard normal distribution.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StdNormal;

impl StdNormal {
    pub fn cdf(&self, x: f64) -> f64 {
        normal_cdf(x)
    }

    pub fn quantile(&self, p: f64) -> Result<f64> {
        normal_quantile(p)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        normal_sample(rng)
    }
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal CDF via `erfc(z) = Q(1/2, z^2)`.
pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    // both arguments are valid, so the gamma call cannot fail
    let half_tail = 0.5 * reg_inc_gamma_upper(0.5, 0.5 * x * x).unwrap_or(0.0);
    if x < 0.0 {
        half_tail
    } else {
        1.0 - half_tail
    }
}

// Acklam's rational approximation, refined below by one Halley step.
const ACKLAM_A: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const ACKLAM_B: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const ACKLAM_C: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const ACKLAM_D: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];

fn acklam_lower(p: f64) -> f64 {
    // p <= 0.5
    const P_LOW: f64 = 0.024_25;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((ACKLAM_C[0] * q + ACKLAM_C[1]) * q + ACKLAM_C[2]) * q + ACKLAM_C[3]) * q + ACKLAM_C[4]) * q + ACKLAM_C[5])
            / ((((ACKLAM_D[0] * q + ACKLAM_D[1]) * q + ACKLAM_D[2]) * q + ACKLAM_D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((ACKLAM_A[0] * r + ACKLAM_A[1]) * r + ACKLAM_A[2]) * r + ACKLAM_A[3]) * r + ACKLAM_A[4]) * r + ACKLAM_A[5])
            * q
            / (((((ACKLAM_B[0] * r + ACKLAM_B[1]) * r + ACKLAM_B[2]) * r + ACKLAM_B[3]) * r + ACKLAM_B[4]) * r + 1.0)
    }
}

/// Inverse standard normal CDF on `(0, 1)`.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::Domain {
            what: "probability",
            value: p,
        });
    }
    if p > 0.5 {
        // 1 - p is exact here
        return Ok(-lower_quantile(1.0 - p));
    }
    Ok(lower_quantile(p))
}

fn lower_quantile(p: f64) -> f64 {
    let mut x = acklam_lower(p);
    for _ in 0..2 {
        let e = normal_cdf(x) - p;
        let u = e * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
        x -= u / (1.0 + 0.5 * x * u);
    }
    x
}

/// One standard normal draw (ziggurat).
pub fn normal_sample<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}
