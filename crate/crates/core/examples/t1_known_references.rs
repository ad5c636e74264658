//! T1 on one pair of samples under the null and under a shifted
//! alternative, with standard normal references.

use xformtest::distributions::{normal_sample, StdNormal};
use xformtest::empirical::SortedSample;
use xformtest::kde::SmoothingSchedule;
use xformtest::rng::substream;
use xformtest::testing::{t1_statistic, Case1Inputs};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = |y: f64| ((y + 3.0) / (y + 5.0)).exp();
    let mut rng = substream(3, 0);
    let n = 500;
    let mut draw =
        |f: &dyn Fn(f64) -> f64| SortedSample::from_values((0..n).map(|_| f(normal_sample(&mut rng))).collect());

    let x = draw(&g)?;
    let same = draw(&g)?;
    let shifted = draw(&|y| g(y) + 1.0)?;

    for (label, xt) in [("null", &same), ("g + 1", &shifted)] {
        let inputs = Case1Inputs {
            x: &x,
            x_tilde: xt,
            f_y: &StdNormal,
            f_y_tilde: &StdNormal,
            schedule: SmoothingSchedule::default(),
            y: 0.3,
        };
        let r = t1_statistic(&inputs, 0.05)?;
        println!(
            "{label:>6}: T1 = {:>10.4}  p = {:.4}  reject = {}",
            r.statistic, r.p_value, r.reject
        );
    }
    Ok(())
}
