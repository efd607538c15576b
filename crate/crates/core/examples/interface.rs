//! Rescaled interface path of a sampled triangulation, as CSV on stdout.
//!
//! cargo run --release --example interface > path.csv

use bipolar::simulate::{interface_csv, interface_export, rng_for, Method, Sampler};
use bipolar::weights::{FaceWeights, StepDistribution};

fn main() -> bipolar::Result<()> {
    let tri = FaceWeights::triangulations();
    let sampler = Sampler::new(Some(&tri), StepDistribution::from_weights(&tri)?, 0, 1, 3000, Method::Exact)?;
    let walk = sampler.draw(&mut rng_for(3, 0))?;
    print!("{}", interface_csv(&interface_export(&walk, 201)));
    Ok(())
}
