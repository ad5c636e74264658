//! Spread of the sample median: n Var(median) approaches
//! p(1-p)/f(0)^2 = pi/2 for standard normal data.

use xformtest::distributions::normal_sample;
use xformtest::empirical::{g_hat_at_level, SortedSample};
use xformtest::rng::substream;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (n, reps) = (10_000, 2000);
    let meds: Vec<f64> = (0..reps)
        .map(|r| {
            let mut rng = substream(5, r);
            let s = SortedSample::from_values((0..n).map(|_| normal_sample(&mut rng)).collect())?;
            Ok(g_hat_at_level(&s, 0.5, 0.0).value * (n as f64).sqrt())
        })
        .collect::<Result<_, xformtest::error::Error>>()?;
    let mean = meds.iter().sum::<f64>() / reps as f64;
    let var = meds.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (reps - 1) as f64;
    println!(
        "variance of sqrt(n) * median = {var:.4}, pi/2 = {:.4}",
        std::f64::consts::FRAC_PI_2
    );
    Ok(())
}
