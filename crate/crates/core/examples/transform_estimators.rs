//! Order-statistic estimators of the transformation with a known and an
//! estimated reference CDF, plus the aggregate estimator.

use xformtest::distributions::{normal_sample, StdNormal};
use xformtest::empirical::{aggregate_estimator, g_hat_case1, g_hat_case2, EmpiricalCdf, Sample};
use xformtest::rng::substream;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = |y: f64| ((y + 3.0) / (y + 5.0)).exp();
    let mut rng = substream(1, 0);
    let n = 2000;

    // contaminated signal X = g(Y) and a separate training sample of Y
    let x = Sample::new((0..n).map(|_| g(normal_sample(&mut rng))).collect())?.into_sorted();
    let train = Sample::new((0..n).map(|_| normal_sample(&mut rng)).collect())?;
    let f_hat = EmpiricalCdf::from_sample(&train);

    println!("    y      g(y)   known F   trained F   aggregate");
    for y in [-1.5, -0.5, 0.0, 0.5, 1.5] {
        let a = g_hat_case1(&x, &StdNormal, y);
        let b = g_hat_case2(&x, &f_hat, y);
        let agg = aggregate_estimator(&a, &b, 1.0, 1.0)?;
        println!(
            "{y:>5.1}  {:>8.5}  {:>8.5}  {:>10.5}  {:>10.5}",
            g(y),
            a.value,
            b.value,
            agg
        );
    }
    Ok(())
}
