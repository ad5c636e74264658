//! Pointwise tests of `H0: g = g̃` at an evaluation point `y`.
//!
//! Both statistics have the form `m σ̂^-2(y) (ĝ(y) - ĝ̃(y))^2` and are
//! compared with the chi-squared(1) limit. `T1` uses known reference CDFs,
//! `T2` replaces them by empirical CDFs of training samples.
//!
//! The limiting weights `a` and `b` are replaced by their finite-sample
//! ratios, and the trimmed density estimates are evaluated at the estimated
//! transforms `ĝ(y)`, `ĝ̃(y)`.

use serde::{Deserialize, Serialize};

use crate::distributions::{chi2_quantile, chi2_sf};
use crate::empirical::{g_hat_case1, g_hat_case2, EmpiricalCdf, KnownCdf, Sample, SortedSample};
use crate::error::{Error, Result};
use crate::kde::{SmoothingSchedule, TrimmedDensityEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Case1,
    Case2,
}

/// Inputs of the known-reference test.
#[derive(Clone, Copy)]
pub struct Case1Inputs<'a> {
    pub x: &'a SortedSample,
    pub x_tilde: &'a SortedSample,
    pub f_y: &'a dyn KnownCdf,
    pub f_y_tilde: &'a dyn KnownCdf,
    pub schedule: SmoothingSchedule,
    pub y: f64,
}

/// Inputs of the training-sample test. The training samples enter through
/// their empirical CDFs.
#[derive(Debug, Clone, Copy)]
pub struct Case2Inputs<'a> {
    pub x: &'a SortedSample,
    pub x_tilde: &'a SortedSample,
    pub f_y_hat: &'a EmpiricalCdf,
    pub f_y_tilde_hat: &'a EmpiricalCdf,
    pub schedule: SmoothingSchedule,
    pub y: f64,
}

/// Training samples turned into empirical CDFs, for building [`Case2Inputs`].
pub fn training_cdfs(y: &Sample, y_tilde: &Sample) -> (EmpiricalCdf, EmpiricalCdf) {
    (EmpiricalCdf::from_sample(y), EmpiricalCdf::from_sample(y_tilde))
}

/// Every intermediate quantity of one test evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceParts {
    pub g_hat: f64,
    pub g_tilde_hat: f64,
    /// Reference CDF at `y` for each sample.
    pub level: f64,
    pub level_tilde: f64,
    /// Trimmed density estimates at `ĝ(y)` and `ĝ̃(y)`.
    pub density: f64,
    pub density_tilde: f64,
    /// Weight `a` (case 1) or `b` (case 2) on the second term.
    pub weight: f64,
    pub sigma2: f64,
    pub effective_m: f64,
}

/// Outcome of one test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub case: Case,
    pub y: f64,
    pub g_hat: f64,
    pub g_tilde_hat: f64,
    pub sigma2_hat: f64,
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
    pub effective_m: f64,
    /// Contaminated sample sizes.
    pub n: usize,
    pub n_tilde: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_y: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_y_tilde: Option<usize>,
}

fn check_level(which: &'static str, level: f64, y: f64) -> Result<()> {
    if level > 0.0 && level < 1.0 {
        Ok(())
    } else {
        Err(Error::DegeneratePoint { which, cdf: level, y })
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "alpha",
            value: alpha,
        })
    }
}

fn two_term_variance(weight: f64, level: f64, density: f64, level_tilde: f64, density_tilde: f64) -> f64 {
    (1.0 - weight) * level * (1.0 - level) / (density * density)
        + weight * level_tilde * (1.0 - level_tilde) / (density_tilde * density_tilde)
}

/// `m σ̂^-2 (ĝ - ĝ̃)^2`.
pub fn chi2_statistic(effective_m: f64, sigma2: f64, g_hat: f64, g_tilde_hat: f64) -> f64 {
    let d = g_hat - g_tilde_hat;
    effective_m * d * d / sigma2
}

/// All intermediate quantities of `T1` at `inputs.y`.
pub fn case1_parts(inputs: &Case1Inputs<'_>) -> Result<VarianceParts> {
    let y = inputs.y;
    let level = inputs.f_y.cdf(y);
    let level_tilde = inputs.f_y_tilde.cdf(y);
    check_level("F_Y(y)", level, y)?;
    check_level("F_Ytilde(y)", level_tilde, y)?;

    let g = g_hat_case1(inputs.x, inputs.f_y, y).value;
    let gt = g_hat_case1(inputs.x_tilde, inputs.f_y_tilde, y).value;
    let density = TrimmedDensityEstimate::with_schedule(inputs.x, &inputs.schedule)?.eval(g);
    let density_tilde = TrimmedDensityEstimate::with_schedule(inputs.x_tilde, &inputs.schedule)?.eval(gt);

    let n = inputs.x.len() as f64;
    let nt = inputs.x_tilde.len() as f64;
    let a = n / (n + nt);
    let sigma2 = two_term_variance(a, level, density, level_tilde, density_tilde);
    Ok(VarianceParts {
        g_hat: g,
        g_tilde_hat: gt,
        level,
        level_tilde,
        density,
        density_tilde,
        weight: a,
        sigma2,
        effective_m: n * nt / (n + nt),
    })
}

/// All intermediate quantities of `T2` at `inputs.y`.
pub fn case2_parts(inputs: &Case2Inputs<'_>) -> Result<VarianceParts> {
    let y = inputs.y;
    let level = inputs.f_y_hat.eval(y);
    let level_tilde = inputs.f_y_tilde_hat.eval(y);
    check_level("F̂_Y(y)", level, y)?;
    check_level("F̂_Ytilde(y)", level_tilde, y)?;

    let g = g_hat_case2(inputs.x, inputs.f_y_hat, y).value;
    let gt = g_hat_case2(inputs.x_tilde, inputs.f_y_tilde_hat, y).value;
    let density = TrimmedDensityEstimate::with_schedule(inputs.x, &inputs.schedule)?.eval(g);
    let density_tilde = TrimmedDensityEstimate::with_schedule(inputs.x_tilde, &inputs.schedule)?.eval(gt);

    let harmonic = |a: usize, b: usize| (a as f64 * b as f64) / (a as f64 + b as f64);
    let big_n = harmonic(inputs.x.len(), inputs.f_y_hat.len());
    let big_nt = harmonic(inputs.x_tilde.len(), inputs.f_y_tilde_hat.len());
    let b = big_n / (big_n + big_nt);
    let sigma2 = two_term_variance(b, level, density, level_tilde, density_tilde);
    Ok(VarianceParts {
        g_hat: g,
        g_tilde_hat: gt,
        level,
        level_tilde,
        density,
        density_tilde,
        weight: b,
        sigma2,
        effective_m: big_n * big_nt / (big_n + big_nt),
    })
}

pub fn sigma2_case1(inputs: &Case1Inputs<'_>) -> Result<f64> {
    Ok(case1_parts(inputs)?.sigma2)
}

pub fn sigma2_case2(inputs: &Case2Inputs<'_>) -> Result<f64> {
    Ok(case2_parts(inputs)?.sigma2)
}

/// Rejection threshold `chi2_quantile(1 - alpha)`.
pub fn critical_value(alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    chi2_quantile(1.0 - alpha)
}

impl TestResult {
    /// Assembles a result from computed parts. `critical` must be
    /// [`critical_value`]`(alpha)`; it is passed in so that repeated tests
    /// can share it.
    pub fn from_parts(
        case: Case,
        y: f64,
        parts: &VarianceParts,
        alpha: f64,
        critical: f64,
        sizes: [usize; 2],
    ) -> Result<Self> {
        let statistic = chi2_statistic(parts.effective_m, parts.sigma2, parts.g_hat, parts.g_tilde_hat);
        Ok(Self {
            case,
            y,
            g_hat: parts.g_hat,
            g_tilde_hat: parts.g_tilde_hat,
            sigma2_hat: parts.sigma2,
            statistic,
            p_value: chi2_sf(statistic)?,
            reject: statistic > critical,
            alpha,
            effective_m: parts.effective_m,
            n: sizes[0],
            n_tilde: sizes[1],
            n_y: None,
            n_y_tilde: None,
        })
    }
}

/// `T1(y) = (n ñ/(n + ñ)) σ̂^-2(y) (ĝ(y) - ĝ̃(y))^2`.
pub fn t1_statistic(inputs: &Case1Inputs<'_>, alpha: f64) -> Result<TestResult> {
    let critical = critical_value(alpha)?;
    let parts = case1_parts(inputs)?;
    TestResult::from_parts(
        Case::Case1,
        inputs.y,
        &parts,
        alpha,
        critical,
        [inputs.x.len(), inputs.x_tilde.len()],
    )
}

/// `T2(y) = (N Ñ/(N + Ñ)) σ̂^-2(y) (ĝ(y) - ĝ̃(y))^2`.
pub fn t2_statistic(inputs: &Case2Inputs<'_>, alpha: f64) -> Result<TestResult> {
    let critical = critical_value(alpha)?;
    let parts = case2_parts(inputs)?;
    let mut r = TestResult::from_parts(
        Case::Case2,
        inputs.y,
        &parts,
        alpha,
        critical,
        [inputs.x.len(), inputs.x_tilde.len()],
    )?;
    r.n_y = Some(inputs.f_y_hat.len());
    r.n_y_tilde = Some(inputs.f_y_tilde_hat.len());
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::{normal_cdf, normal_sample, StdNormal};
    use crate::empirical::NormalCdf;
    use crate::rng::substream;
    use proptest::prelude::*;

    fn draws(seed: u64, n: usize) -> Vec<f64> {
        let mut rng = substream(seed, 0);
        (0..n).map(|_| normal_sample(&mut rng)).collect()
    }

    fn sorted(v: Vec<f64>) -> SortedSample {
        SortedSample::from_values(v).unwrap()
    }

    // Straight-line reimplementation: sort, index, double-loop KDE, formula.
    fn oracle_sigma2(x: &[f64], xt: &[f64], p: f64, pt: f64, rank: usize, rank_t: usize, weight: f64) -> f64 {
        let kde = |xs: &[f64], at: f64| {
            let n = xs.len() as f64;
            let h = n.powf(-0.5);
            let e = n.powf(-0.2);
            let mut s = 0.0;
            for &v in xs {
                let u = (v - at) / h;
                if u.abs() < 1.0 {
                    s += 15.0 / 16.0 * (1.0 - u * u).powi(2);
                }
            }
            (s / (n * h)).max(e)
        };
        let mut xs = x.to_vec();
        xs.sort_by(f64::total_cmp);
        let mut xts = xt.to_vec();
        xts.sort_by(f64::total_cmp);
        let f = kde(&xs, xs[rank - 1]);
        let ft = kde(&xts, xts[rank_t - 1]);
        (1.0 - weight) * p * (1.0 - p) / f.powi(2) + weight * pt * (1.0 - pt) / ft.powi(2)
    }

    #[test]
    fn case1_symmetric_terms_agree() {
        let x = sorted(draws(1, 300));
        let inputs = Case1Inputs {
            x: &x,
            x_tilde: &x,
            f_y: &StdNormal,
            f_y_tilde: &StdNormal,
            schedule: SmoothingSchedule::default(),
            y: 0.3,
        };
        let p = case1_parts(&inputs).unwrap();
        let single = p.level * (1.0 - p.level) / (p.density * p.density);
        assert!((p.sigma2 - single).abs() < 1e-12 * single);
        let r = t1_statistic(&inputs, 0.05).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(!r.reject);
    }

    #[test]
    fn case1_floor_algebra() {
        // widely spread points and a near-zero trim exponent put both
        // densities on the floor
        let x = sorted((0..50).map(|i| i as f64 * 1000.0).collect());
        let xt = sorted((0..80).map(|i| i as f64 * 700.0 + 3.0).collect());
        let schedule = SmoothingSchedule::new(0.5, 1e-3, 2).unwrap();
        let fy = NormalCdf { mean: 0.0, sd: 1.0 };
        let fyt = NormalCdf { mean: 0.5, sd: 2.0 };
        let inputs = Case1Inputs {
            x: &x,
            x_tilde: &xt,
            f_y: &fy,
            f_y_tilde: &fyt,
            schedule,
            y: 0.2,
        };
        let p = case1_parts(&inputs).unwrap();
        let e = schedule.trim(50);
        let et = schedule.trim(80);
        assert_eq!(p.density, e);
        assert_eq!(p.density_tilde, et);
        let a = 50.0 / 130.0;
        let (f, ft) = (fy.cdf(0.2), fyt.cdf(0.2));
        let expected = (1.0 - a) * f * (1.0 - f) / (e * e) + a * ft * (1.0 - ft) / (et * et);
        assert!((p.sigma2 - expected).abs() < 1e-12 * expected);
    }

    #[test]
    fn case1_matches_formula_oracle() {
        let xr = draws(2, 100);
        let xtr = draws(3, 100);
        let x = sorted(xr.clone());
        let xt = sorted(xtr.clone());
        for &y in &[-1.2, -0.1, 0.4, 1.7] {
            let inputs = Case1Inputs {
                x: &x,
                x_tilde: &xt,
                f_y: &StdNormal,
                f_y_tilde: &StdNormal,
                schedule: SmoothingSchedule::default(),
                y,
            };
            let got = sigma2_case1(&inputs).unwrap();
            let p = normal_cdf(y);
            let rank = ((100.0 * p).floor() as usize + 1).min(100);
            let want = oracle_sigma2(&xr, &xtr, p, p, rank, rank, 0.5);
            assert!((got - want).abs() < 1e-12 * want.max(1.0), "y={y}: {got} vs {want}");
        }
    }

    #[test]
    fn case1_degenerate_point() {
        let x = sorted(draws(4, 20));
        let inputs = Case1Inputs {
            x: &x,
            x_tilde: &x,
            f_y: &StdNormal,
            f_y_tilde: &StdNormal,
            schedule: SmoothingSchedule::default(),
            y: -40.0,
        };
        assert!(matches!(sigma2_case1(&inputs), Err(Error::DegeneratePoint { .. })));
        assert!(matches!(
            t1_statistic(&inputs, 0.05),
            Err(Error::DegeneratePoint { .. })
        ));
    }

    #[test]
    fn doubling_variance_halves_statistic() {
        let t = chi2_statistic(100.0, 2.0, 1.3, 0.9);
        let t2 = chi2_statistic(100.0, 4.0, 1.3, 0.9);
        assert!((t - 2.0 * t2).abs() < 1e-12 * t);
    }

    #[test]
    fn case2_symmetric_and_oracle() {
        let x = sorted(draws(5, 120));
        let y = Sample::new(draws(6, 90)).unwrap();
        let (f, ft) = training_cdfs(&y, &y);
        let inputs = Case2Inputs {
            x: &x,
            x_tilde: &x,
            f_y_hat: &f,
            f_y_tilde_hat: &ft,
            schedule: SmoothingSchedule::default(),
            y: 0.1,
        };
        let p = case2_parts(&inputs).unwrap();
        assert_eq!(p.weight, 0.5);
        let r = t2_statistic(&inputs, 0.05).unwrap();
        assert_eq!(r.statistic, 0.0);

        // asymmetric sizes against the straight-line formula
        let xr = draws(7, 150);
        let xtr = draws(8, 60);
        let yr = draws(9, 110);
        let ytr = draws(10, 70);
        let x = sorted(xr.clone());
        let xt = sorted(xtr.clone());
        let f = EmpiricalCdf::new(sorted(yr.clone()));
        let ft = EmpiricalCdf::new(sorted(ytr.clone()));
        let at = 0.25;
        let inputs = Case2Inputs {
            x: &x,
            x_tilde: &xt,
            f_y_hat: &f,
            f_y_tilde_hat: &ft,
            schedule: SmoothingSchedule::default(),
            y: at,
        };
        let got = sigma2_case2(&inputs).unwrap();
        let count = |v: &[f64]| v.iter().filter(|&&u| u <= at).count();
        let (k, kt) = (count(&yr), count(&ytr));
        let p = k as f64 / 110.0;
        let pt = kt as f64 / 70.0;
        let rank = (150 * k / 110).clamp(1, 150);
        let rank_t = (60 * kt / 70).clamp(1, 60);
        let n1 = 150.0 * 110.0 / 260.0;
        let n2 = 60.0 * 70.0 / 130.0;
        let want = oracle_sigma2(&xr, &xtr, p, pt, rank, rank_t, n1 / (n1 + n2));
        assert!((got - want).abs() < 1e-12 * want.max(1.0), "{got} vs {want}");
    }

    #[test]
    fn case2_degenerate_below_training_range() {
        let x = sorted(draws(11, 50));
        let f = EmpiricalCdf::new(sorted(draws(12, 50)));
        let inputs = Case2Inputs {
            x: &x,
            x_tilde: &x,
            f_y_hat: &f,
            f_y_tilde_hat: &f,
            schedule: SmoothingSchedule::default(),
            y: -10.0,
        };
        assert!(matches!(sigma2_case2(&inputs), Err(Error::DegeneratePoint { .. })));
        let inputs = Case2Inputs { y: 10.0, ..inputs };
        assert!(matches!(
            t2_statistic(&inputs, 0.05),
            Err(Error::DegeneratePoint { .. })
        ));
    }

    #[test]
    fn bad_alpha_is_rejected() {
        let x = sorted(draws(13, 30));
        let inputs = Case1Inputs {
            x: &x,
            x_tilde: &x,
            f_y: &StdNormal,
            f_y_tilde: &StdNormal,
            schedule: SmoothingSchedule::default(),
            y: 0.0,
        };
        assert!(t1_statistic(&inputs, 0.0).is_err());
        assert!(t1_statistic(&inputs, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn statistics_nonnegative_and_order_free(
            xs in prop::collection::vec(-3.0f64..3.0, 5..60),
            xts in prop::collection::vec(-3.0f64..3.0, 5..60),
            ys in prop::collection::vec(-2.0f64..2.0, 5..60),
            yts in prop::collection::vec(-2.0f64..2.0, 5..60),
            y in -1.5f64..1.5,
        ) {
            let x = sorted(xs.clone());
            let xt = sorted(xts.clone());
            let mut xs_rev = xs.clone();
            xs_rev.reverse();
            let x_rev = sorted(xs_rev);
            let s = SmoothingSchedule::default();

            let i1 = Case1Inputs { x: &x, x_tilde: &xt, f_y: &StdNormal, f_y_tilde: &StdNormal, schedule: s, y };
            let i1r = Case1Inputs { x: &x_rev, ..i1 };
            let r1 = t1_statistic(&i1, 0.05).unwrap();
            prop_assert!(r1.statistic >= 0.0);
            prop_assert_eq!(r1.statistic == 0.0, r1.g_hat == r1.g_tilde_hat);
            prop_assert_eq!(r1, t1_statistic(&i1r, 0.05).unwrap());

            let f = EmpiricalCdf::new(sorted(ys.clone()));
            let mut yr = ys.clone();
            yr.reverse();
            let fr = EmpiricalCdf::new(sorted(yr));
            let ft = EmpiricalCdf::new(sorted(yts));
            let i2 = Case2Inputs { x: &x, x_tilde: &xt, f_y_hat: &f, f_y_tilde_hat: &ft, schedule: s, y };
            if let Ok(r2) = t2_statistic(&i2, 0.05) {
                prop_assert!(r2.statistic >= 0.0);
                prop_assert_eq!(r2.statistic == 0.0, r2.g_hat == r2.g_tilde_hat);
                let i2r = Case2Inputs { x: &x_rev, f_y_hat: &fr, ..i2 };
                prop_assert_eq!(r2, t2_statistic(&i2r, 0.05).unwrap());
                let crit = critical_value(0.05).unwrap();
                prop_assert_eq!(r2.reject, r2.statistic > crit);
            }
        }
    }
}
