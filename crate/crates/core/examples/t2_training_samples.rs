//! T2 with reference distributions learned from training samples, and the
//! JSON form of the result.

use xformtest::distributions::normal_sample;
use xformtest::empirical::Sample;
use xformtest::kde::SmoothingSchedule;
use xformtest::rng::substream;
use xformtest::testing::{t2_statistic, training_cdfs, Case2Inputs};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = substream(4, 0);
    let mut normals = |n: usize| -> Vec<f64> { (0..n).map(|_| normal_sample(&mut rng)).collect() };

    let y_train = Sample::new(normals(400))?;
    let yt_train = Sample::new(normals(300))?;
    let x = Sample::new(normals(500).into_iter().map(|y| 4.0 * y + 5.0).collect())?.into_sorted();
    let xt = Sample::new(normals(450).into_iter().map(|y| 4.0 * y + 5.5).collect())?.into_sorted();
    let (f, ft) = training_cdfs(&y_train, &yt_train);

    let inputs = Case2Inputs {
        x: &x,
        x_tilde: &xt,
        f_y_hat: &f,
        f_y_tilde_hat: &ft,
        schedule: SmoothingSchedule::default(),
        y: -0.4,
    };
    let r = t2_statistic(&inputs, 0.05)?;
    println!("{}", serde_json::to_string_pretty(&r)?);
    Ok(())
}
