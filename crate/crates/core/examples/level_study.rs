//! Empirical levels of T1 and T2 under the null.
//!
//! Usage: cargo run --release --example level_study [REPLICATIONS]

use xformtest::montecarlo::{run_table1, SimulationOptions};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let replications = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(2000);
    let report = run_table1(&SimulationOptions {
        replications,
        ..Default::default()
    })?;
    println!("stat      n   level %   retries");
    for r in &report.rows {
        println!("{:<4} {:>6} {:>9.2} {:>9}", r.statistic, r.n, r.reject_pct, r.retries);
    }
    println!("({replications} replications, {:.1}s)", report.wall_clock_secs);
    Ok(())
}
