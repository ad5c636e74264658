//! Chi-squared, noncentral chi-squared and normal helpers.

use xformtest::distributions::{chi2_cdf, chi2_quantile, chi2_sf, noncentral_chi2_cdf, normal_cdf, normal_quantile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let q = chi2_quantile(0.95)?;
    println!("chi2(1) 95% quantile  {q:.6}");
    println!("cdf at that point     {:.12}", chi2_cdf(q)?);
    println!("upper tail at 10      {:.6e}", chi2_sf(10.0)?);

    println!("\n   x   P(chi2 <= x)  lambda=1  lambda=5");
    for x in [0.5, 1.0, 2.0, 3.841459, 8.0] {
        println!(
            "{x:>6.3}  {:>10.6}  {:>8.6}  {:>8.6}",
            chi2_cdf(x)?,
            noncentral_chi2_cdf(1.0, x)?,
            noncentral_chi2_cdf(5.0, x)?
        );
    }

    println!(
        "\nPhi(1.96) = {:.8}, Phi^-1(0.975) = {:.8}",
        normal_cdf(1.96),
        normal_quantile(0.975)?
    );
    Ok(())
}
