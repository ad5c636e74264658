pub mod analysis;
pub mod cli;
pub mod distributions;
pub mod empirical;
pub mod error;
pub mod kde;
pub mod montecarlo;
pub mod rng;
pub mod testing;
