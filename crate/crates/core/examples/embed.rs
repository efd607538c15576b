//! Straight-line upward drawing of a simple triangulation, written as SVG.
//!
//! cargo run --release --example embed [out.svg]

use bipolar::bijection::walk_to_map;
use bipolar::embed::{render_svg, upward_embed, SvgOptions};
use bipolar::geometry::check_drawing;
use bipolar::simulate::{rng_for, sample_simple_triangulation};

fn main() -> bipolar::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "triangulation.svg".into());
    let walk = sample_simple_triangulation(0, 1, 60, &mut rng_for(2, 0), 1000)?;
    let map = walk_to_map(&walk)?;
    let emb = upward_embed(&map)?;
    assert!(check_drawing(&map, emb.exact.as_ref().unwrap()).is_empty());
    std::fs::write(&path, render_svg(&map, &emb, &SvgOptions::default())?)?;
    println!("{} vertices, {} coordinate bits, wrote {path}", map.num_vertices(), emb.max_coordinate_bits());
    Ok(())
}
