//! Step laws induced by face weights: λ, C, the edge probability, period and variances.
//!
//! cargo run --example weights

use bipolar::weights::{FaceWeights, StepDistribution};

fn main() -> bipolar::Result<()> {
    println!("{:<10}{:>10}{:>10}{:>10}{:>4}{:>12}{:>12}{:>8}", "weights", "lambda", "C", "p0", "b", "Var[X-Y]", "Var[X+Y]", "ratio");
    for name in ["tri", "quad", "kgon:5", "kgon:6", "uniform"] {
        let d = StepDistribution::from_weights(&FaceWeights::load(name)?)?;
        let t = d.theory_stats()?;
        let f = |x: Option<f64>| x.map_or("-".into(), |v| format!("{v:.6}"));
        println!(
            "{name:<10}{:>10}{:>10}{:>10.6}{:>4}{:>12.6}{:>12.6}{:>8.4}",
            f(d.lambda),
            f(d.c),
            d.p0,
            d.period,
            t.var_diff,
            t.var_sum,
            t.var_diff / t.var_sum
        );
    }

    // a hand-made law: zero drift and symmetric, but not induced by face weights
    let skew = StepDistribution::parse_direct("1 -1 9/20\n-1 1 7/20\n-1 0 1/10\n0 1 1/10\n")?;
    let t = skew.theory_stats()?;
    println!("direct law ratio {:.4}", t.var_diff / t.var_sum);
    Ok(())
}
