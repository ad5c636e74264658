//! Real-data pipeline: descriptive statistics, estimator grids on the
//! common support, OLS linearization and moment predictions.

use std::fmt::Write as _;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::distributions::normal_cdf;
use crate::empirical::{aggregate_estimator, g_hat_case2, ks_distance, EmpiricalCdf, Sample, SortedSample};
use crate::error::{Error, Result};

/// Default number of grid points.
pub const DEFAULT_GRID_POINTS: usize = 50;
/// Default OLS window in observation units (systolic blood pressure, mmHg).
pub const DEFAULT_WINDOW: (f64, f64) = (100.0, 200.0);

/// Summary statistics of one sample.
///
/// Variance uses `1/(n-1)`. Skewness is `m3/m2^1.5` and kurtosis the raw
/// `m4/m2^2` (a normal sample gives about 3, not 0), both from central
/// moments with `1/n`. `ks_normal` compares the sample with a normal law
/// using the sample mean and standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DescriptiveStats {
    pub n: usize,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub ks_normal: f64,
}

/// Linear-interpolation quantile (the `type 7` rule) of a sorted slice.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn describe(s: &Sample) -> Result<DescriptiveStats> {
    let n = s.len();
    if n < 2 {
        return Err(Error::InsufficientPoints { found: n });
    }
    let sorted = s.clone().into_sorted();
    let xs = sorted.as_slice();
    let nf = n as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    if m2 == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let variance = m2 / (nf - 1.0);
    let (m2, m3, m4) = (m2 / nf, m3 / nf, m4 / nf);
    let sd = variance.sqrt();
    Ok(DescriptiveStats {
        n,
        min: xs[0],
        q1: quantile_sorted(xs, 0.25),
        median: quantile_sorted(xs, 0.5),
        mean,
        q3: quantile_sorted(xs, 0.75),
        max: xs[n - 1],
        variance,
        skewness: m3 / m2.powf(1.5),
        kurtosis: m4 / (m2 * m2),
        ks_normal: ks_distance(xs, |t| normal_cdf((t - mean) / sd)),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub y: f64,
    pub g_hat: f64,
    pub g_tilde_hat: f64,
    pub g0_hat: f64,
}

/// `ĝ`, `ĝ̃` and the aggregate `ĝ₀` on `y_i = c + (d - c) i / M`, `i = 1..=M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorGrid {
    pub c: f64,
    pub d: f64,
    pub points: Vec<GridPoint>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridColumn {
    G,
    GTilde,
    G0,
}

impl GridColumn {
    pub const ALL: [GridColumn; 3] = [GridColumn::G, GridColumn::GTilde, GridColumn::G0];

    pub fn pick(self, p: &GridPoint) -> f64 {
        match self {
            GridColumn::G => p.g_hat,
            GridColumn::GTilde => p.g_tilde_hat,
            GridColumn::G0 => p.g0_hat,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            GridColumn::G => "g_hat",
            GridColumn::GTilde => "g_tilde_hat",
            GridColumn::G0 => "g0_hat",
        }
    }
}

/// Evaluates the training-sample estimators on a regular grid over the
/// overlap `[c, d]` of the two reference samples.
///
/// `ĝ₀` weights each side by its total size, `n_x + n_y` against
/// `ñ_x + ñ_y`.
pub fn build_grid(
    y: &Sample,
    y_tilde: &Sample,
    x: &SortedSample,
    x_tilde: &SortedSample,
    m: usize,
) -> Result<EstimatorGrid> {
    if m < 2 {
        return Err(Error::InvalidConfig(format!("grid needs at least 2 points, got {m}")));
    }
    let f = EmpiricalCdf::from_sample(y);
    let ft = EmpiricalCdf::from_sample(y_tilde);
    let c = f.support().min().max(ft.support().min());
    let d = f.support().max().min(ft.support().max());
    if !(c < d) {
        return Err(Error::NoOverlap { c, d });
    }
    let w = (x.len() + y.len()) as f64;
    let wt = (x_tilde.len() + y_tilde.len()) as f64;
    let points = (1..=m)
        .map(|i| {
            let at = c + (d - c) * i as f64 / m as f64;
            let g = g_hat_case2(x, &f, at);
            let gt = g_hat_case2(x_tilde, &ft, at);
            let g0 = aggregate_estimator(&g, &gt, w, wt)?;
            Ok(GridPoint {
                y: at,
                g_hat: g.value,
                g_tilde_hat: gt.value,
                g0_hat: g0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EstimatorGrid { c, d, points })
}

/// Affine fit `slope * y + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
    /// Range of the regressor actually used.
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl LinearFit {
    pub fn eval(&self, y: f64) -> f64 {
        self.slope * y + self.intercept
    }
}

/// Least squares of `u` on `t`, centred for stability.
fn least_squares(t: &[f64], u: &[f64]) -> Result<(f64, f64)> {
    let n = t.len() as f64;
    let mt = t.iter().sum::<f64>() / n;
    let mu = u.iter().sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for (&a, &b) in t.iter().zip(u) {
        sxx += (a - mt) * (a - mt);
        sxy += (a - mt) * (b - mu);
    }
    if sxx == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let slope = sxy / sxx;
    Ok((slope, mu - slope * mt))
}

/// OLS line through the grid points of one column with `y` in `[lo, hi]`.
pub fn ols_fit(grid: &EstimatorGrid, column: GridColumn, window: (f64, f64)) -> Result<LinearFit> {
    let (lo, hi) = window;
    let (t, u): (Vec<f64>, Vec<f64>) = grid
        .points
        .iter()
        .filter(|p| p.y >= lo && p.y <= hi)
        .map(|p| (p.y, column.pick(p)))
        .unzip();
    if t.len() < 2 {
        return Err(Error::InsufficientPoints { found: t.len() });
    }
    let (slope, intercept) = least_squares(&t, &u).map_err(|_| Error::InsufficientPoints { found: 1 })?;
    Ok(LinearFit {
        slope,
        intercept,
        lo: t[0],
        hi: t[t.len() - 1],
        points: t.len(),
    })
}

/// Paired regression benchmark `a = cov(X, Y) / var(Y)`, `b = mean(X) - a mean(Y)`.
pub fn parametric_affine(x: &Sample, y: &Sample) -> Result<LinearFit> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let ys = y.values();
    let (slope, intercept) = least_squares(ys, x.values())?;
    let (lo, hi) = ys
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
    Ok(LinearFit {
        slope,
        intercept,
        lo,
        hi,
        points: ys.len(),
    })
}

/// Weighted average of coefficients, used to pool two parametric fits
/// into one common transformation.
pub fn pooled_fit(a: &LinearFit, wa: f64, b: &LinearFit, wb: f64) -> Result<LinearFit> {
    if !(wa >= 0.0 && wb >= 0.0) || !(wa + wb > 0.0) {
        return Err(Error::WeightSum);
    }
    let s = wa + wb;
    Ok(LinearFit {
        slope: (wa * a.slope + wb * b.slope) / s,
        intercept: (wa * a.intercept + wb * b.intercept) / s,
        lo: a.lo.min(b.lo),
        hi: a.hi.max(b.hi),
        points: a.points + b.points,
    })
}

/// Mean and variance of `fit(Y)` given the mean and variance of `Y`.
pub fn predict_moments(fit: &LinearFit, mean_in: f64, var_in: f64) -> (f64, f64) {
    (fit.slope * mean_in + fit.intercept, fit.slope * fit.slope * var_in)
}

/// Predicted against observed first two moments of one output signal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentComparison {
    pub signal: String,
    pub method: String,
    pub predicted_mean: f64,
    pub predicted_variance: f64,
    pub observed_mean: f64,
    pub observed_variance: f64,
}

/// Everything the pipeline produces apart from the grid itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub grid_points: usize,
    pub window: [f64; 2],
    pub c: f64,
    pub d: f64,
    pub stats_y: DescriptiveStats,
    pub stats_x: DescriptiveStats,
    pub stats_y_tilde: DescriptiveStats,
    pub stats_x_tilde: DescriptiveStats,
    pub fit_g: LinearFit,
    pub fit_g_tilde: LinearFit,
    pub fit_g0: LinearFit,
    /// Paired regressions; absent when the samples are not paired.
    pub parametric: Option<ParametricFits>,
    pub moments: Vec<MomentComparison>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParametricFits {
    pub fit: LinearFit,
    pub fit_tilde: LinearFit,
    pub pooled: LinearFit,
}

/// Input signals of the pipeline. `x[i]` and `y[i]` are paired when both
/// have the same length, likewise for the tilde pair.
pub struct AnalysisInputs {
    pub x: Sample,
    pub y: Sample,
    pub x_tilde: Sample,
    pub y_tilde: Sample,
}

pub fn run_pipeline(inputs: &AnalysisInputs, m: usize, window: (f64, f64)) -> Result<(EstimatorGrid, AnalysisReport)> {
    let xs = inputs.x.clone().into_sorted();
    let xts = inputs.x_tilde.clone().into_sorted();
    let grid = build_grid(&inputs.y, &inputs.y_tilde, &xs, &xts, m)?;
    let fit_g = ols_fit(&grid, GridColumn::G, window)?;
    let fit_g_tilde = ols_fit(&grid, GridColumn::GTilde, window)?;
    let fit_g0 = ols_fit(&grid, GridColumn::G0, window)?;
    let stats_y = describe(&inputs.y)?;
    let stats_x = describe(&inputs.x)?;
    let stats_y_tilde = describe(&inputs.y_tilde)?;
    let stats_x_tilde = describe(&inputs.x_tilde)?;

    let parametric = match (
        parametric_affine(&inputs.x, &inputs.y),
        parametric_affine(&inputs.x_tilde, &inputs.y_tilde),
    ) {
        (Ok(a), Ok(b)) => Some(ParametricFits {
            fit: a,
            fit_tilde: b,
            pooled: pooled_fit(&a, a.points as f64, &b, b.points as f64)?,
        }),
        (Err(Error::LengthMismatch { .. }), _) | (_, Err(Error::LengthMismatch { .. })) => None,
        (Err(e), _) | (_, Err(e)) => return Err(e),
    };

    let mut moments = Vec::new();
    let mut push = |signal: &str, method: &str, fit: &LinearFit, input: &DescriptiveStats, obs: &DescriptiveStats| {
        let (pm, pv) = predict_moments(fit, input.mean, input.variance);
        moments.push(MomentComparison {
            signal: signal.into(),
            method: method.into(),
            predicted_mean: pm,
            predicted_variance: pv,
            observed_mean: obs.mean,
            observed_variance: obs.variance,
        });
    };
    push("x", "nonparametric", &fit_g0, &stats_y, &stats_x);
    push("x_tilde", "nonparametric", &fit_g0, &stats_y_tilde, &stats_x_tilde);
    if let Some(p) = &parametric {
        push("x", "parametric", &p.pooled, &stats_y, &stats_x);
        push("x_tilde", "parametric", &p.pooled, &stats_y_tilde, &stats_x_tilde);
    }

    let report = AnalysisReport {
        grid_points: m,
        window: [window.0, window.1],
        c: grid.c,
        d: grid.d,
        stats_y,
        stats_x,
        stats_y_tilde,
        stats_x_tilde,
        fit_g,
        fit_g_tilde,
        fit_g0,
        parametric,
        moments,
    };
    Ok((grid, report))
}

/// Writes `y,g_hat,g_tilde_hat,g0_hat` rows.
pub fn write_grid_csv<W: Write>(grid: &EstimatorGrid, out: W) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["y", "g_hat", "g_tilde_hat", "g0_hat"])?;
    for p in &grid.points {
        w.serialize((p.y, p.g_hat, p.g_tilde_hat, p.g0_hat))?;
    }
    w.flush()
}

/// Static line plot of the three estimator curves.
pub fn grid_svg(grid: &EstimatorGrid) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const PAD: f64 = 48.0;
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &grid.points {
        for c in GridColumn::ALL {
            lo = lo.min(c.pick(p));
            hi = hi.max(c.pick(p));
        }
    }
    if hi <= lo {
        hi = lo + 1.0;
    }
    let (x0, x1) = (grid.points[0].y, grid.points[grid.points.len() - 1].y);
    let sx = |v: f64| PAD + (v - x0) / (x1 - x0).max(f64::MIN_POSITIVE) * (W - 2.0 * PAD);
    let sy = |v: f64| H - PAD - (v - lo) / (hi - lo) * (H - 2.0 * PAD);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(s, r#"<rect width="{W}" height="{H}" fill="white"/>"#);
    let _ = writeln!(
        s,
        r#"<path d="M{PAD} {PAD} V{b} H{r}" fill="none" stroke="black"/>"#,
        b = H - PAD,
        r = W - PAD
    );
    let _ = writeln!(
        s,
        r#"<text x="{PAD}" y="{}" font-size="12">{x0:.6}</text>"#,
        H - PAD + 16.0
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="end">{x1:.6}</text>"#,
        W - PAD,
        H - PAD + 16.0
    );
    let _ = writeln!(s, r#"<text x="4" y="{}" font-size="12">{lo:.6}</text>"#, H - PAD);
    let _ = writeln!(s, r#"<text x="4" y="{}" font-size="12">{hi:.6}</text>"#, PAD);
    let colours = ["#1f77b4", "#d62728", "#2ca02c"];
    for (i, (c, colour)) in GridColumn::ALL.iter().zip(colours).enumerate() {
        let pts: Vec<String> = grid
            .points
            .iter()
            .map(|p| format!("{:.3},{:.3}", sx(p.y), sy(c.pick(p))))
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{}"/>"#,
            pts.join(" ")
        );
        let ly = PAD + 16.0 * i as f64;
        let _ = writeln!(
            s,
            r#"<text x="{}" y="{ly}" font-size="12" fill="{colour}">{}</text>"#,
            PAD + 8.0,
            c.label()
        );
    }
    s.push_str("</svg>\n");
    s
}
