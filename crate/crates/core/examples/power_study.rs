//! Empirical powers against the fixed alternatives and the local
//! alternative family.
//!
//! Usage: cargo run --release --example power_study [REPLICATIONS]

use xformtest::montecarlo::{run_table3, run_table4, SimulationOptions, SimulationReport, DEFAULT_BETAS};

fn show(report: &SimulationReport) {
    for r in &report.rows {
        let beta = r.beta.map(|b| format!("{b}")).unwrap_or_default();
        println!(
            "{:<4} {:<4} {:>5} {:>6} {:>8.2}",
            r.statistic, r.alternative, beta, r.n, r.reject_pct
        );
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let replications = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(2000);
    let opts = SimulationOptions {
        replications,
        ..Default::default()
    };
    println!("stat alt   beta      n  power %");
    show(&run_table3(&opts)?);
    show(&run_table4(&opts, &DEFAULT_BETAS)?);
    Ok(())
}
