//! Exact counting of quadrant walks and uniform (or weighted) sampling from the counts.
//!
//! Layer `r` of a [`CountTable`] holds, for each point of a bounding box, the
//! total weight of the `r`-step walks from that point to the target that stay
//! in the quadrant. Layers are kept so that walks can be drawn backward-
//! proportionally without recomputation.

use std::fmt;
use std::ops::{AddAssign, Mul};

use num_bigint::{BigInt, BigUint, RandBigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rayon::prelude::*;

use crate::bijection::{walk_to_map, LatticeWalk, Move};
use crate::error::{Error, Result};
use crate::map::PlanarMap;
use crate::weights::FaceWeights;

/// Default cap on stored cells.
pub const DEFAULT_BUDGET: u128 = 50_000_000;

/// Exact arithmetic usable as a walk weight.
pub trait Weight:
    Clone + Zero + One + PartialEq + Send + Sync + fmt::Display + for<'a> AddAssign<&'a Self> + for<'a> Mul<&'a Self, Output = Self>
{
    /// Index `k` drawn with probability `weights[k] / Σ weights`.
    fn pick<R: Rng + ?Sized>(rng: &mut R, weights: &[Self]) -> usize;
}

fn pick_integers<R: Rng + ?Sized>(rng: &mut R, weights: &[BigUint]) -> usize {
    let total: BigUint = weights.iter().sum();
    let mut u = rng.gen_biguint_below(&total);
    for (k, w) in weights.iter().enumerate() {
        if &u < w {
            return k;
        }
        u -= w;
    }
    unreachable!("draw below the total falls in some bucket")
}

impl Weight for BigUint {
    fn pick<R: Rng + ?Sized>(rng: &mut R, weights: &[BigUint]) -> usize {
        pick_integers(rng, weights)
    }
}

impl Weight for BigRational {
    fn pick<R: Rng + ?Sized>(rng: &mut R, weights: &[BigRational]) -> usize {
        let lcm = weights.iter().fold(BigInt::one(), |l, w| l.lcm(w.denom()));
        let ints: Vec<BigUint> = weights
            .iter()
            .map(|w| {
                let scaled = w.numer() * (&lcm / w.denom());
                scaled.to_biguint().filter(|_| scaled.sign() != Sign::Minus).unwrap_or_default()
            })
            .collect();
        pick_integers(rng, &ints)
    }
}

/// Allowed moves with their weights.
#[derive(Clone, Debug, PartialEq)]
pub struct StepSet<W> {
    pub steps: Vec<(Move, W)>,
}

impl<W: Weight> StepSet<W> {
    pub fn unweighted(moves: &[Move]) -> StepSet<W> {
        StepSet { steps: moves.iter().map(|&m| (m, W::one())).collect() }
    }

    fn max_i(&self) -> i64 {
        self.steps.iter().map(|(m, _)| -m.increment().0).max().unwrap_or(0).max(0)
    }

    fn max_j(&self) -> i64 {
        self.steps.iter().map(|(m, _)| m.increment().1).max().unwrap_or(0).max(0)
    }
}

impl StepSet<BigUint> {
    /// `m_e`, `m_{1,0}`, `m_{0,1}`.
    pub fn triangulation() -> StepSet<BigUint> {
        StepSet::unweighted(&[Move::Edge, Move::Face(1, 0), Move::Face(0, 1)])
    }
}

impl StepSet<BigRational> {
    /// Face moves weighted by `a_{i+j+2}`. Infinite supports are cut at `i ≤ max_i`, `j ≤ max_j`,
    /// which loses nothing when the caps are the largest steps a walk in the box can take.
    pub fn from_weights(weights: &FaceWeights, max_i: usize, max_j: usize) -> StepSet<BigRational> {
        let mut steps = vec![(Move::Edge, BigRational::one())];
        for i in 0..=max_i {
            for j in 0..=max_j {
                let a = weights.weight(i + j + 2);
                if !a.is_zero() {
                    steps.push((Move::Face(i, j), a));
                }
            }
        }
        StepSet { steps }
    }
}

#[derive(Clone, Debug)]
struct Layer<W> {
    xmax: i64,
    ymax: i64,
    cells: Vec<W>,
}

impl<W> Layer<W> {
    fn index(&self, x: i64, y: i64) -> Option<usize> {
        (x >= 0 && y >= 0 && x <= self.xmax && y <= self.ymax).then(|| (x * (self.ymax + 1) + y) as usize)
    }
}

/// Walk counts for every remaining-step index `r = 0..=T`.
#[derive(Clone, Debug)]
pub struct CountTable<W> {
    steps: StepSet<W>,
    start: (i64, i64),
    end: (i64, i64),
    length: usize,
    layers: Vec<Layer<W>>,
}

impl<W: Weight> CountTable<W> {
    pub fn build(steps: StepSet<W>, start: (i64, i64), end: (i64, i64), length: usize) -> Result<CountTable<W>> {
        CountTable::build_with_budget(steps, start, end, length, DEFAULT_BUDGET)
    }

    pub fn build_with_budget(
        steps: StepSet<W>,
        start: (i64, i64),
        end: (i64, i64),
        length: usize,
        budget: u128,
    ) -> Result<CountTable<W>> {
        let (imax, jmax) = (steps.max_i(), steps.max_j());
        let t = length as i64;
        let dims: Vec<(i64, i64)> = (0..=t)
            .map(|r| {
                let xmax = (start.0 + (t - r)).min(end.0 + r * imax);
                let ymax = (start.1 + (t - r) * jmax).min(end.1 + r);
                (xmax, ymax)
            })
            .collect();
        let required: u128 = dims
            .iter()
            .map(|&(x, y)| if x < 0 || y < 0 { 0 } else { ((x + 1) * (y + 1)) as u128 })
            .sum();
        if required > budget {
            return Err(Error::Resource { required, budget });
        }

        let mut layers: Vec<Layer<W>> = Vec::with_capacity(length + 1);
        for (r, &(xmax, ymax)) in dims.iter().enumerate() {
            let (xmax, ymax) = if xmax < 0 || ymax < 0 { (-1, -1) } else { (xmax, ymax) };
            let n = ((xmax + 1) * (ymax + 1)) as usize;
            let cells: Vec<W> = if r == 0 {
                (0..n)
                    .map(|c| {
                        let (x, y) = (c as i64 / (ymax + 1), c as i64 % (ymax + 1));
                        if (x, y) == end {
                            W::one()
                        } else {
                            W::zero()
                        }
                    })
                    .collect()
            } else {
                let prev = &layers[r - 1];
                let steps = &steps.steps;
                (0..n)
                    .into_par_iter()
                    .map(|c| {
                        let (x, y) = (c as i64 / (ymax + 1), c as i64 % (ymax + 1));
                        let mut acc = W::zero();
                        for (m, w) in steps {
                            let (dx, dy) = m.increment();
                            if let Some(k) = prev.index(x + dx, y + dy) {
                                let v = &prev.cells[k];
                                if !v.is_zero() {
                                    acc += &(w.clone() * v);
                                }
                            }
                        }
                        acc
                    })
                    .collect()
            };
            layers.push(Layer { xmax, ymax, cells });
        }
        Ok(CountTable { steps, start, end, length, layers })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn start(&self) -> (i64, i64) {
        self.start
    }

    pub fn end(&self) -> (i64, i64) {
        self.end
    }

    pub fn steps(&self) -> &StepSet<W> {
        &self.steps
    }

    /// Weight of `r`-step walks from `(x, y)` to the target.
    pub fn get(&self, r: usize, x: i64, y: i64) -> W {
        let layer = &self.layers[r];
        layer.index(x, y).map_or_else(W::zero, |k| layer.cells[k].clone())
    }

    fn get_ref(&self, r: usize, x: i64, y: i64) -> Option<&W> {
        let layer = &self.layers[r];
        layer.index(x, y).map(|k| &layer.cells[k]).filter(|v| !v.is_zero())
    }

    pub fn count(&self) -> W {
        self.get(self.length, self.start.0, self.start.1)
    }

    /// Number of stored cells.
    pub fn cells(&self) -> usize {
        self.layers.iter().map(|l| l.cells.len()).sum()
    }

    /// Draws a walk with probability proportional to its weight.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LatticeWalk> {
        if self.count().is_zero() {
            return Err(Error::NoSuchMaps);
        }
        let (mut x, mut y) = self.start;
        let mut moves = Vec::with_capacity(self.length);
        let mut options: Vec<(Move, W)> = Vec::with_capacity(self.steps.steps.len());
        for r in (1..=self.length).rev() {
            options.clear();
            for (m, w) in &self.steps.steps {
                let (dx, dy) = m.increment();
                if let Some(v) = self.get_ref(r - 1, x + dx, y + dy) {
                    options.push((*m, w.clone() * v));
                }
            }
            let weights: Vec<W> = options.iter().map(|(_, w)| w.clone()).collect();
            let (m, _) = options[W::pick(rng, &weights)];
            let (dx, dy) = m.increment();
            x += dx;
            y += dy;
            moves.push(m);
        }
        Ok(LatticeWalk::new(self.start, moves))
    }

    /// Every walk with nonzero weight, in lexicographic step order.
    pub fn walks(&self) -> WalkIter<'_, W> {
        WalkIter { table: self, moves: Vec::new(), points: vec![self.start], cursor: Vec::new(), state: IterState::Fresh }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum IterState {
    Fresh,
    Running,
    Done,
}

/// Depth-first walk enumeration that only enters branches with nonzero count.
pub struct WalkIter<'a, W> {
    table: &'a CountTable<W>,
    moves: Vec<Move>,
    points: Vec<(i64, i64)>,
    // next step index to try at each depth
    cursor: Vec<usize>,
    state: IterState,
}

impl<W: Weight> Iterator for WalkIter<'_, W> {
    type Item = LatticeWalk;

    fn next(&mut self) -> Option<LatticeWalk> {
        let t = self.table;
        match self.state {
            IterState::Done => return None,
            IterState::Fresh => {
                if t.count().is_zero() {
                    self.state = IterState::Done;
                    return None;
                }
                if t.length == 0 {
                    self.state = IterState::Done;
                    return Some(LatticeWalk::new(t.start, Vec::new()));
                }
                self.state = IterState::Running;
                self.cursor.push(0);
            }
            IterState::Running => {}
        }
        let steps = &t.steps.steps;
        loop {
            let depth = self.moves.len();
            let k = self.cursor[depth];
            if k == steps.len() {
                self.cursor.pop();
                if self.moves.pop().is_none() {
                    self.state = IterState::Done;
                    return None;
                }
                self.points.pop();
                *self.cursor.last_mut().unwrap() += 1;
                continue;
            }
            let m = steps[k].0;
            let (dx, dy) = m.increment();
            let (x, y) = *self.points.last().unwrap();
            let next = (x + dx, y + dy);
            if t.get_ref(t.length - depth - 1, next.0, next.1).is_none() {
                self.cursor[depth] += 1;
                continue;
            }
            self.moves.push(m);
            if self.moves.len() == t.length {
                let walk = LatticeWalk::new(t.start, self.moves.clone());
                self.moves.pop();
                self.cursor[depth] += 1;
                return Some(walk);
            }
            self.points.push(next);
            self.cursor.push(0);
        }
    }
}

/// Number of quadrant walks of `length` steps from `start` to `end`.
pub fn count_walks(moves: &[Move], start: (i64, i64), end: (i64, i64), length: usize) -> Result<BigUint> {
    Ok(CountTable::build(StepSet::<BigUint>::unweighted(moves), start, end, length)?.count())
}

/// `2 (3n)! / ((n+2)! (n+1)! n!)`: bipolar-oriented triangulations with `3n` edges.
pub fn closed_form_triangulations(n: usize) -> BigUint {
    let fact = |k: usize| (1..=k).fold(BigUint::one(), |acc, i| acc * BigUint::from(i));
    BigUint::from(2u32) * fact(3 * n) / (fact(n + 2) * fact(n + 1) * fact(n))
}

/// The same count indexed by the number of edges; zero unless `3 | ℓ`.
pub fn closed_form_triangulations_by_edges(edges: usize) -> BigUint {
    if edges == 0 || edges % 3 != 0 {
        BigUint::zero()
    } else {
        closed_form_triangulations(edges / 3)
    }
}

/// Weighted count table for maps with `m + 1` west edges, `n + 1` east edges and `ℓ` edges.
pub fn weighted_table(weights: &FaceWeights, m: usize, n: usize, edges: usize) -> Result<CountTable<BigRational>> {
    weighted_table_with_budget(weights, m, n, edges, DEFAULT_BUDGET)
}

pub fn weighted_table_with_budget(
    weights: &FaceWeights,
    m: usize,
    n: usize,
    edges: usize,
    budget: u128,
) -> Result<CountTable<BigRational>> {
    if edges == 0 {
        return Err(Error::Infeasible("a map needs at least one edge".into()));
    }
    let t = edges - 1;
    // x never exceeds t, y never exceeds m + t; a face step larger than that leaves the box
    let (cap_i, cap_j) = match weights.max_degree() {
        Some(k) => (k - 2, k - 2),
        None => (t, m + t),
    };
    let steps = StepSet::from_weights(weights, cap_i.min(t), cap_j.min(n + t));
    CountTable::build_with_budget(steps, (0, m as i64), (n as i64, 0), t, budget)
}

/// Unweighted count table for triangulations.
pub fn triangulation_table(m: usize, n: usize, edges: usize) -> Result<CountTable<BigUint>> {
    if edges == 0 {
        return Err(Error::Infeasible("a map needs at least one edge".into()));
    }
    CountTable::build(StepSet::triangulation(), (0, m as i64), (n as i64, 0), edges - 1)
}

/// All maps with the given boundary lengths and edge count, one per walk.
pub fn enumerate_maps<W: Weight>(table: &CountTable<W>) -> impl Iterator<Item = PlanarMap> + '_ {
    table.walks().map(|w| walk_to_map(&w).expect("counted walks are closed codes"))
}

/// One exact draw from the weighted measure on walks.
pub fn exact_sample<W: Weight, R: Rng + ?Sized>(table: &CountTable<W>, rng: &mut R) -> Result<LatticeWalk> {
    table.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tri() -> Vec<Move> {
        vec![Move::Edge, Move::Face(1, 0), Move::Face(0, 1)]
    }

    #[test]
    fn small_counts() {
        assert_eq!(count_walks(&tri(), (0, 0), (1, 0), 2).unwrap(), BigUint::from(1u32));
        assert_eq!(count_walks(&tri(), (0, 0), (1, 0), 5).unwrap(), BigUint::from(5u32));
        assert_eq!(count_walks(&tri(), (0, 0), (1, 0), 0).unwrap(), BigUint::zero());
        assert_eq!(count_walks(&tri(), (0, 0), (0, 0), 0).unwrap(), BigUint::one());
    }

    #[test]
    fn closed_form_values() {
        let expect = [1u32, 5, 42, 462, 6006, 87516];
        for (n, &e) in (1..=6).zip(&expect) {
            assert_eq!(closed_form_triangulations(n), BigUint::from(e));
            assert_eq!(count_walks(&tri(), (0, 0), (1, 0), 3 * n - 1).unwrap(), BigUint::from(e));
        }
        assert_eq!(closed_form_triangulations_by_edges(7), BigUint::zero());
    }

    #[test]
    fn enumeration_sizes() {
        let t = triangulation_table(0, 1, 3).unwrap();
        assert_eq!(enumerate_maps(&t).count(), 1);
        let t = triangulation_table(0, 1, 6).unwrap();
        let forms: std::collections::HashSet<_> = enumerate_maps(&t).map(|m| m.canonical_form()).collect();
        assert_eq!(forms.len(), 5);
        let t = triangulation_table(0, 1, 4).unwrap();
        assert_eq!(enumerate_maps(&t).count(), 0);
    }

    #[test]
    fn weighted_matches_unweighted_for_triangulations() {
        let w = weighted_table(&FaceWeights::triangulations(), 0, 1, 9).unwrap();
        assert_eq!(w.count(), BigRational::from_integer(42.into()));
    }

    #[test]
    fn budget_is_enforced() {
        let err = CountTable::build_with_budget(StepSet::triangulation(), (0, 0), (1, 0), 50, 10).unwrap_err();
        assert!(matches!(err, Error::Resource { budget: 10, .. }));
    }

    #[test]
    fn sampling_is_reproducible() {
        let t = triangulation_table(0, 1, 12).unwrap();
        let a = t.sample(&mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = t.sample(&mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
        assert!(a.is_closed_code());
        let t3 = triangulation_table(0, 1, 3).unwrap();
        for s in 0..5 {
            let w = t3.sample(&mut ChaCha8Rng::seed_from_u64(s)).unwrap();
            assert_eq!(w.moves, vec![Move::Face(0, 1), Move::Edge]);
        }
        let empty = triangulation_table(0, 1, 4).unwrap();
        assert!(matches!(empty.sample(&mut ChaCha8Rng::seed_from_u64(0)), Err(Error::NoSuchMaps)));
    }
}
