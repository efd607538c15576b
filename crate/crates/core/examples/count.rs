//! Exact counts of bipolar-oriented maps by edges, from the walk count tables.
//!
//! cargo run --example count

use bipolar::enumeration::{closed_form_triangulations_by_edges, triangulation_table, weighted_table};
use bipolar::weights::{feasible, FaceWeights};

fn main() -> bipolar::Result<()> {
    println!("triangulations of the sphere");
    for edges in (3..=30).step_by(3) {
        let table = triangulation_table(0, 1, edges)?.count();
        println!("  {edges:>3} edges  {table:>24}  closed form {}", closed_form_triangulations_by_edges(edges));
    }

    // every face has weight 1, so the table counts maps
    println!("all bipolar maps with boundary (1, 1)");
    for edges in 1..=10 {
        let total = weighted_table(&FaceWeights::Uniform, 1, 1, edges)?.count();
        println!("  {edges:>3} edges  {total:>8}");
    }

    let quad = FaceWeights::quadrangulations();
    for (m, n, edges) in [(0, 0, 9), (0, 0, 10), (0, 1, 9)] {
        println!("quad ({m},{n}) {edges} edges: {}", feasible(&quad, m, n, edges)?.reason);
    }
    Ok(())
}
