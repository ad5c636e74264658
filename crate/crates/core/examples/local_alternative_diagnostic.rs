//! Chi-squared calibration under the null and the noncentral comparison
//! at the detection boundary beta = 1/2.

use xformtest::montecarlo::{chi2_calibration, noncentral_diagnostic, LocalBase, Runner, Statistic};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let runner = Runner::new(None)?;
    for stat in [Statistic::T1, Statistic::T2] {
        let ks = chi2_calibration(&runner, stat, 2000, 2000, 42)?;
        println!("{stat}: KS distance to chi2(1) under the null = {ks:.4}");
    }
    for y in [-0.5, 0.0, 0.5] {
        let d = noncentral_diagnostic(&runner, Statistic::T1, 2000, y, 2000, 42, LocalBase::SampleSize)?;
        println!(
            "y = {y:>4}: lambda = {:.3}  mean T1 = {:.3} (expected {:.3})  KS = {:.4}",
            d.lambda, d.mean_statistic, d.expected_mean, d.ks_distance
        );
    }
    Ok(())
}
