//! Samples a large uniform triangulation and tabulates vertex degrees read off the walk.
//!
//! cargo run --release --example degrees [edges] [seed]

use bipolar::simulate::{degree_stats, degrees_from_walk, rng_for, Method, Sampler, DEFAULT_TRIM};
use bipolar::weights::{FaceWeights, StepDistribution};

fn main() -> bipolar::Result<()> {
    let mut args = std::env::args().skip(1);
    let edges: usize = args.next().map_or(30_000, |a| a.parse().expect("edges"));
    let seed: u64 = args.next().map_or(1, |a| a.parse().expect("seed"));

    let tri = FaceWeights::triangulations();
    let sampler = Sampler::new(Some(&tri), StepDistribution::from_weights(&tri)?, 0, 1, edges, Method::Exact)?;
    let walk = sampler.draw(&mut rng_for(seed, 0))?;
    let trace = degrees_from_walk(&walk)?;
    let st = degree_stats(&[(trace, walk.len())], DEFAULT_TRIM)?;

    println!("{} bulk vertices", st.vertices);
    println!("{:>3}{:>10}{:>10}{:>10}", "k", "in", "out", "geom");
    for k in 1..=10 {
        let geom = (1.0 / 3.0) * (2.0f64 / 3.0).powi(k as i32 - 1);
        let share = |h: &[u64]| h.get(k).copied().unwrap_or(0) as f64 / st.vertices as f64;
        println!("{k:>3}{:>10.4}{:>10.4}{:>10.4}", share(&st.in_hist), share(&st.out_hist), geom);
    }
    println!("TV in/out {:.4} / {:.4}, corr {:.4}", st.tv_in, st.tv_out, st.correlation);
    Ok(())
}
