//! Dual orientation and the two spanning trees of a small map.
//!
//! cargo run --example dual

use bipolar::enumeration::{enumerate_maps, triangulation_table};

fn main() -> bipolar::Result<()> {
    let table = triangulation_table(0, 1, 6)?;
    for map in enumerate_maps(&table) {
        let dual = map.dual_map()?;
        let nw: Vec<usize> = map.nw_tree()?.edges().collect();
        let se: Vec<usize> = map.se_tree()?.edges().collect();
        println!(
            "{} vertices -> dual with {} vertices, {} edges; NW tree {nw:?}, SE tree {se:?}",
            map.num_vertices(),
            dual.num_vertices(),
            dual.num_edges()
        );
        assert_eq!(dual.dual_map()?.reversed().canonical_form(), map.canonical_form());
    }
    Ok(())
}
