//! Sews a short walk into a bipolar map and reads the walk back off the map.
//!
//! cargo run --example sew

use bipolar::bijection::{map_to_walk, sew, unsew, walk_to_map, LatticeWalk, Move};

fn main() -> bipolar::Result<()> {
    let moves = vec![Move::Face(0, 1), Move::Edge, Move::Face(0, 2), Move::Edge, Move::Face(1, 0), Move::Edge, Move::Edge];
    let walk = LatticeWalk::new((0, 1), moves);
    println!("walk points: {:?}", walk.points());

    let map = walk_to_map(&walk)?;
    println!("{} vertices, {} edges, {} interior faces", map.num_vertices(), map.num_edges(), map.interior_faces().len());
    println!("{}", map.to_json());

    assert_eq!(map_to_walk(&map)?, walk);
    // any move sequence, even one leaving the quadrant, sews to a marked map and back
    let wild = vec![Move::Face(2, 0), Move::Edge, Move::Face(1, 3)];
    assert_eq!(unsew(&sew(&wild))?, wild);
    println!("round trips ok");
    Ok(())
}
