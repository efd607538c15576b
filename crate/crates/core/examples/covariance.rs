//! Free walks under several step laws: empirical Var[X-Y]/Var[X+Y] against theory.
//!
//! cargo run --release --example covariance

use bipolar::simulate::{covariance_report, free_walk, rng_for};
use bipolar::weights::{FaceWeights, StepDistribution};

fn main() -> bipolar::Result<()> {
    for (k, name) in ["tri", "quad", "uniform", "kgon:5"].into_iter().enumerate() {
        let d = StepDistribution::from_weights(&FaceWeights::load(name)?)?;
        let walk = free_walk(&d, 100_000, &mut rng_for(7, k as u64));
        let th = d.theory_stats()?;
        let r = covariance_report(&[walk], Some(&th), 7)?;
        println!("{name:<8} ratio {:.4}  95% CI [{:.4}, {:.4}]", r.ratio, r.ratio_ci.0, r.ratio_ci.1);
    }
    Ok(())
}
