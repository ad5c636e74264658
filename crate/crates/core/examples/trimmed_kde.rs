//! Quartic kernel density estimate with the trimming floor.

use xformtest::distributions::{normal_pdf, normal_sample};
use xformtest::empirical::Sample;
use xformtest::kde::{SmoothingSchedule, TrimmedDensityEstimate};
use xformtest::rng::substream;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = substream(2, 0);
    let sched = SmoothingSchedule::default();
    for n in [100, 10_000] {
        let s = Sample::new((0..n).map(|_| normal_sample(&mut rng)).collect())?.into_sorted();
        let d = TrimmedDensityEstimate::with_schedule(&s, &sched)?;
        println!("n = {n}: h = {:.4}, floor = {:.4}", d.bandwidth(), d.floor());
        for y in [-3.0, -2.0, -1.0, 0.0, 1.0, 2.0, 3.0] {
            println!(
                "  y = {y:>4.1}  phi = {:.4}  raw = {:.4}  trimmed = {:.4}",
                normal_pdf(y),
                d.eval_untrimmed(y),
                d.eval(y)
            );
        }
    }
    println!(
        "rate condition satisfied by defaults: {}",
        sched.satisfies_rate_condition()
    );
    Ok(())
}
