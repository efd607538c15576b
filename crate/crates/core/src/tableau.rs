//! Exact uniform triangulation walks of any length, via standard Young tableaux.
//!
//! A triangulation walk that starts and ends at the origin with `3N` steps is
//! a ballot sequence in three letters: reading `1` as `m_{0,1}`, `2` as `m_e`
//! and `3` as `m_{1,0}` and tracking `x = c_2 - c_3`, `y = c_1 - c_2` turns
//! "stays in the quadrant" into `c_1 ≥ c_2 ≥ c_3`. Those words are exactly the
//! row-reading words of standard tableaux of shape `(N, N, N)`, which the hook
//! walk samples uniformly in `O(N log N)` expected time, with no count table.

use rand::Rng;

use crate::bijection::{LatticeWalk, Move};
use crate::error::{Error, Result};

/// Uniform standard Young tableau of the given shape, as the row (0-based) of each entry `1..=n`.
pub fn sample_tableau_rows<R: Rng + ?Sized>(shape: &[usize], rng: &mut R) -> Vec<usize> {
    let mut rows: Vec<usize> = shape.iter().copied().filter(|&r| r > 0).collect();
    debug_assert!(rows.windows(2).all(|w| w[0] >= w[1]), "shape must be a partition");
    let total: usize = rows.iter().sum();
    let mut word = vec![0; total];
    for k in (0..total).rev() {
        // uniform cell of the remaining diagram
        let mut u = rng.gen_range(0..=k);
        let mut r = 0;
        while u >= rows[r] {
            u -= rows[r];
            r += 1;
        }
        let mut c = u;
        loop {
            let arm = rows[r] - c - 1;
            let leg = rows[r + 1..].iter().take_while(|&&len| len > c).count();
            if arm + leg == 0 {
                break;
            }
            let v = rng.gen_range(0..arm + leg);
            if v < arm {
                c += 1 + v;
            } else {
                r += 1 + (v - arm);
            }
        }
        word[k] = r;
        rows[r] -= 1;
        while rows.last() == Some(&0) {
            rows.pop();
        }
    }
    word
}

/// Uniform triangulation walk of `3n` steps from the origin back to the origin.
pub fn sample_triangulation_excursion<R: Rng + ?Sized>(n: usize, rng: &mut R) -> LatticeWalk {
    let moves = sample_tableau_rows(&[n, n, n], rng)
        .into_iter()
        .map(|r| match r {
            0 => Move::Face(0, 1),
            1 => Move::Edge,
            _ => Move::Face(1, 0),
        })
        .collect();
    LatticeWalk::new((0, 0), moves)
}

/// Uniform bipolar-oriented triangulation walk with `ℓ` edges and boundary `(m, n)`
/// for the two boundary shapes this sampler covers: `(0, 0)` and `(0, 1)`.
pub fn sample_triangulation_walk<R: Rng + ?Sized>(m: usize, n: usize, edges: usize, rng: &mut R) -> Result<LatticeWalk> {
    match (m, n) {
        (0, 0) if edges % 3 == 1 => Ok(sample_triangulation_excursion((edges - 1) / 3, rng)),
        (0, 1) if edges % 3 == 0 && edges > 0 => {
            // the last step of an excursion is always m_{1,0} from (1, 0)
            let mut w = sample_triangulation_excursion(edges / 3, rng);
            w.moves.pop();
            Ok(w)
        }
        (0, 0) | (0, 1) => Err(Error::NoSuchMaps),
        _ => Err(Error::Unsupported(format!("unsupported: tableau sampler handles boundaries (0, 0) and (0, 1), not ({m}, {n})"))),
    }
}
