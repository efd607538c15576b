use std::collections::{BTreeMap, HashMap};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;

use bipolar::bijection::Move;
use bipolar::enumeration::{
    closed_form_triangulations, count_walks, enumerate_maps, exact_sample, triangulation_table, weighted_table,
};
use bipolar::simulate::{chi_square_gof, rng_for};
use bipolar::weights::{feasible, period, FaceWeights, StepDistribution};

const TRI: [Move; 3] = [Move::Edge, Move::Face(1, 0), Move::Face(0, 1)];
const QUAD: [Move; 4] = [Move::Edge, Move::Face(2, 0), Move::Face(1, 1), Move::Face(0, 2)];

/// Tries every step sequence.
fn brute_force(steps: &[Move], start: (i64, i64), end: (i64, i64), len: usize) -> u64 {
    let k = steps.len();
    let mut hits = 0;
    for code in 0..k.pow(len as u32) {
        let (mut x, mut y) = start;
        let mut c = code;
        let mut ok = true;
        for _ in 0..len {
            let (dx, dy) = steps[c % k].increment();
            c /= k;
            x += dx;
            y += dy;
            if x < 0 || y < 0 {
                ok = false;
                break;
            }
        }
        if ok && (x, y) == end {
            hits += 1;
        }
    }
    hits
}

#[test]
fn table_matches_brute_force() {
    for len in 0..=10 {
        for (m, n) in [(0, 1), (0, 0), (1, 0), (2, 1), (1, 3)] {
            let dp = count_walks(&TRI, (0, m), (n, 0), len).unwrap();
            assert_eq!(dp, BigUint::from(brute_force(&TRI, (0, m), (n, 0), len)), "tri len {len} ({m},{n})");
        }
    }
    for len in 0..=8 {
        for (m, n) in [(0, 0), (1, 1), (0, 2), (2, 1)] {
            let dp = count_walks(&QUAD, (0, m), (n, 0), len).unwrap();
            assert_eq!(dp, BigUint::from(brute_force(&QUAD, (0, m), (n, 0), len)), "quad len {len} ({m},{n})");
        }
    }
    assert!(count_walks(&TRI, (0, 1), (2, 0), 0).unwrap().is_zero());
}

#[test]
fn product_formula_matches_table() {
    for k in 1..=6 {
        let dp = count_walks(&TRI, (0, 0), (1, 0), 3 * k - 1).unwrap();
        assert_eq!(dp, closed_form_triangulations(k));
    }
    assert_eq!(
        (1..=5).map(closed_form_triangulations).collect::<Vec<_>>(),
        [1u32, 5, 42, 462, 6006].map(BigUint::from).to_vec()
    );
}

#[test]
fn enumeration_yields_each_walk_once() {
    let table = triangulation_table(1, 1, 9).unwrap();
    let walks: Vec<_> = table.walks().collect();
    assert_eq!(BigUint::from(walks.len()), table.count());
    let distinct: std::collections::HashSet<_> = walks.iter().map(|w| w.moves.clone()).collect();
    assert_eq!(distinct.len(), walks.len());
    assert!(walks.iter().all(|w| w.is_closed_code() && w.end() == (1, 0)));
    assert_eq!(enumerate_maps(&triangulation_table(0, 1, 3).unwrap()).count(), 1);
    assert_eq!(enumerate_maps(&triangulation_table(0, 1, 4).unwrap()).count(), 0);
}

#[test]
fn sample_marginals_match_the_table() {
    let table = triangulation_table(0, 1, 12).unwrap();
    let t_len = table.length();
    let mut rng = rng_for(11, 0);
    let draws = 10_000;
    let walks: Vec<_> = (0..draws).map(|_| exact_sample(&table, &mut rng).unwrap()).collect();
    let total = table.count().to_f64().unwrap();
    for t in [2, 5, 8] {
        // exact law of S_t: paths into the point times paths out of it
        let mut law = BTreeMap::new();
        for x in 0..=t as i64 {
            for y in 0..=t as i64 {
                let into = count_walks(&TRI, (0, 0), (x, y), t).unwrap();
                let out = count_walks(&TRI, (x, y), (1, 0), t_len - t).unwrap();
                let w = (into * out).to_f64().unwrap();
                if w > 0.0 {
                    law.insert((x, y), w / total);
                }
            }
        }
        let mut observed: BTreeMap<(i64, i64), u64> = law.keys().map(|&k| (k, 0)).collect();
        for w in &walks {
            *observed.get_mut(&w.points()[t]).expect("sampled point has positive law") += 1;
        }
        let probs: Vec<f64> = law.values().copied().collect();
        let counts: Vec<u64> = observed.values().copied().collect();
        assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        let chi = chi_square_gof(&counts, &probs);
        assert!(chi.p_value > 0.001, "t = {t}: {chi:?}");
    }
}

#[test]
fn counts_never_contradict_feasibility() {
    for name in ["tri", "quad", "kgon:5", "uniform"] {
        let w = FaceWeights::load(name).unwrap();
        for m in 0..=3 {
            for n in 0..=3 {
                for edges in 1..=10 {
                    let c = weighted_table(&w, m, n, edges).unwrap().count();
                    if !c.is_zero() {
                        assert!(feasible(&w, m, n, edges).unwrap().pass, "{name} ({m},{n},{edges})");
                    }
                }
            }
        }
    }
}

/// Lengths `T ≤ max` at which the unconstrained walk can return to its start.
fn return_times(steps: &[Move], max: usize) -> Vec<usize> {
    let mut layer: HashMap<(i64, i64), bool> = HashMap::from([((0, 0), true)]);
    let mut out = Vec::new();
    for t in 1..=max {
        let mut next = HashMap::new();
        for &(x, y) in layer.keys() {
            for s in steps {
                let (dx, dy) = s.increment();
                // points too far to come back are dropped
                if (x + dx).abs() + (y + dy).abs() <= (max - t) as i64 * 8 {
                    next.insert((x + dx, y + dy), true);
                }
            }
        }
        layer = next;
        if layer.contains_key(&(0, 0)) {
            out.push(t);
        }
    }
    out
}

fn face_moves(degrees: &[usize]) -> Vec<Move> {
    let mut steps = vec![Move::Edge];
    for &k in degrees {
        for i in 0..=k - 2 {
            steps.push(Move::Face(i, k - 2 - i));
        }
    }
    steps
}

#[test]
fn period_from_return_times() {
    for degrees in [vec![3], vec![4], vec![5], vec![6], vec![3, 4], vec![4, 6], vec![2, 5]] {
        let text: String = degrees.iter().map(|k| format!("{k} 1\n")).collect();
        let b = period(&FaceWeights::parse(&text).unwrap()).unwrap();
        let times = return_times(&face_moves(&degrees), 60);
        let g = times.iter().fold(0usize, |g, &t| g.gcd(&t));
        assert_eq!(g, b, "degrees {degrees:?}");
        assert!(times.iter().all(|t| t % b == 0));
        // every multiple of b from 40 on is attained
        assert!((40..=60).filter(|t| t % b == 0).all(|t| times.contains(&t)), "degrees {degrees:?}");
    }
}

#[test]
fn random_weights_obey_the_variance_identity() {
    let mut rng = rng_for(4, 0);
    let mut accepted = 0;
    let mut tried = 0;
    while accepted < 100 {
        tried += 1;
        assert!(tried < 10_000);
        let mut text = String::new();
        for k in 2..=8 {
            if rng.gen_bool(0.5) {
                let num: u32 = rng.gen_range(1..=20);
                let den: u32 = rng.gen_range(1..=20);
                text.push_str(&format!("{k} {num}/{den}\n"));
            }
        }
        let Ok(w) = FaceWeights::parse(&text) else { continue };
        let Ok(dist) = StepDistribution::from_weights(&w) else { continue };
        accepted += 1;
        assert!((dist.total() - 1.0).abs() < 1e-9);
        let (dx, dy) = dist.drift();
        assert!(dx.abs() <= 1e-9 && dy.abs() <= 1e-9, "{text}");
        let t = dist.theory_stats().unwrap();
        assert!((t.var_diff - 3.0 * t.var_sum).abs() <= 1e-9, "{text}: {t:?}");
    }
}
