//! Sizing the disturbance ellipsoid with the chi-squared quantile and
//! checking its Gaussian mass by sampling.

use lagreach::prob::{chi2_cdf, chi2_inv, GaussianDisturbance};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (beta, n) = (0.8f64, 5);
    let p = beta.powf(1.0 / n as f64);
    let r2 = chi2_inv(2, p)?;
    println!("per-step mass {p:.6}, R^2 = {r2:.6}, cdf(R^2) = {:.6}", chi2_cdf(2, r2)?);

    let w = GaussianDisturbance::isotropic(2, 0.005)?;
    let e = w.level_set(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let trials = 200_000;
    let hits = (0..trials).filter(|_| e.contains(&w.sample(&mut rng))).count();
    println!("sampled mass {:.5} over {trials} draws", hits as f64 / trials as f64);
    Ok(())
}
