use std::collections::HashMap;

use bipolar::bijection::{walk_to_map, LatticeWalk, Move};
use bipolar::enumeration::{exact_sample, triangulation_table, weighted_table};
use bipolar::simulate::{
    chi_square_gof, chi_square_two_sample, covariance_report, degrees_from_walk, free_walk, interface_export,
    rejection_sample, rng_for, sample_simple_triangulation, Method, Sampler,
};
use bipolar::weights::{FaceWeights, StepDistribution};

const DRAWS: usize = 10_000;

/// Counts per walk, in the order of `support`.
fn histogram(support: &[LatticeWalk], walks: &[LatticeWalk]) -> Vec<u64> {
    let index: HashMap<&LatticeWalk, usize> = support.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut counts = vec![0u64; support.len()];
    for w in walks {
        counts[*index.get(w).expect("walk lies in the support")] += 1;
    }
    counts
}

fn draw(n: usize, seed: u64, mut f: impl FnMut(&mut rand_chacha::ChaCha8Rng) -> LatticeWalk) -> Vec<LatticeWalk> {
    let mut rng = rng_for(seed, 0);
    (0..n).map(|_| f(&mut rng)).collect()
}

#[test]
fn three_samplers_are_uniform_at_six_edges() {
    let table = triangulation_table(0, 1, 6).unwrap();
    let support: Vec<LatticeWalk> = table.walks().collect();
    assert_eq!(support.len(), 5);
    let uniform = vec![1.0 / 5.0; 5];
    let tri = StepDistribution::from_weights(&FaceWeights::triangulations()).unwrap();
    let tableau = Sampler::new(Some(&FaceWeights::triangulations()), tri.clone(), 0, 1, 6, Method::Exact).unwrap();

    let a = histogram(&support, &draw(DRAWS, 1, |r| tableau.draw(r).unwrap()));
    let b = histogram(&support, &draw(DRAWS, 2, |r| exact_sample(&table, r).unwrap()));
    let c = histogram(&support, &draw(DRAWS, 3, |r| rejection_sample(&tri, 0, 1, 6, r, 1_000_000).unwrap()));
    for counts in [&a, &b, &c] {
        let chi = chi_square_gof(counts, &uniform);
        assert!(chi.p_value > 0.001, "{counts:?} {chi:?}");
    }
    assert!(chi_square_two_sample(&a, &c).p_value > 0.001);
    assert!(chi_square_two_sample(&b, &c).p_value > 0.001);
}

#[test]
fn weighted_exact_and_rejection_agree_at_nine_edges() {
    let w = FaceWeights::Uniform;
    let dist = StepDistribution::from_weights(&w).unwrap();
    let table = weighted_table(&w, 1, 1, 9).unwrap();
    let support: Vec<LatticeWalk> = table.walks().collect();
    assert!(support.len() > 100);
    let exact = Sampler::new(Some(&w), dist.clone(), 1, 1, 9, Method::Exact).unwrap();
    let a = histogram(&support, &draw(DRAWS, 4, |r| exact.draw(r).unwrap()));
    let b = histogram(&support, &draw(DRAWS, 5, |r| rejection_sample(&dist, 1, 1, 9, r, 1_000_000).unwrap()));
    let chi = chi_square_two_sample(&a, &b);
    assert!(chi.p_value > 0.001, "{chi:?}");
}

#[test]
fn frontier_degrees_match_the_map() {
    let mut rng = rng_for(6, 0);
    for edges in [3, 6, 30, 300] {
        let walk = sample_simple_triangulation(0, 1, edges, &mut rng, 1000)
            .or_else(|_| exact_sample(&triangulation_table(0, 1, edges).unwrap(), &mut rng))
            .unwrap();
        let map = walk_to_map(&walk).unwrap();
        let tr = degrees_from_walk(&walk).unwrap();
        let mut ins = vec![0; map.num_vertices()];
        let mut outs = vec![0; map.num_vertices()];
        for &[t, h] in map.edges() {
            outs[t] += 1;
            ins[h] += 1;
        }
        assert_eq!(tr.in_degree, ins, "{edges}");
        assert_eq!(tr.out_degree, outs, "{edges}");
    }
}

#[test]
fn free_walk_step_frequencies() {
    let steps = 100_000;
    let mut rng = rng_for(7, 0);
    let uniform = StepDistribution::from_weights(&FaceWeights::Uniform).unwrap();
    let walk = free_walk(&uniform, steps, &mut rng);
    let mut freq: HashMap<Move, u64> = HashMap::new();
    for &m in &walk.moves {
        *freq.entry(m).or_default() += 1;
    }
    let mut probes = vec![(Move::Edge, 0.5)];
    for s in 0..=3usize {
        for i in 0..=s {
            probes.push((Move::Face(i, s - i), 0.5f64.powi(s as i32 + 3)));
        }
    }
    for (mv, p) in probes {
        assert!((uniform.prob(mv) - p).abs() < 1e-12, "{mv}");
        let got = *freq.get(&mv).unwrap_or(&0) as f64 / steps as f64;
        let sd = (p * (1.0 - p) / steps as f64).sqrt();
        assert!((got - p).abs() < 5.0 * sd, "{mv}: {got} vs {p}");
    }
    let r = covariance_report(&[walk], uniform.theory_stats().ok().as_ref(), 7).unwrap();
    assert!(r.ratio_ci.0 < 3.0 && 3.0 < r.ratio_ci.1, "{r:?}");
}

#[test]
fn skewed_direct_law_breaks_the_ratio() {
    let dist = StepDistribution::parse_direct("1 -1 9/20\n-1 1 7/20\n-1 0 1/10\n0 1 1/10\n").unwrap();
    let th = dist.theory_stats().unwrap();
    let ratio = th.var_diff / th.var_sum;
    assert!((ratio - 3.4 / 0.2).abs() < 1e-9, "{ratio}");
    let walk = free_walk(&dist, 100_000, &mut rng_for(8, 0));
    let r = covariance_report(&[walk], Some(&th), 8).unwrap();
    assert!(r.ratio_ci.0 > 3.0 && (r.ratio - ratio).abs() < 0.05 * ratio, "{r:?}");
}

#[test]
fn interface_export_hits_both_ends() {
    let walk = exact_sample(&triangulation_table(2, 1, 25).unwrap(), &mut rng_for(9, 0)).unwrap();
    let rows = interface_export(&walk, 11);
    assert_eq!(rows.len(), 11);
    let s = 25f64.sqrt();
    assert_eq!(rows[0], (0.0, 0.0, 2.0 / s));
    assert_eq!(rows[10], (1.0, 1.0 / s, 0.0));
    assert!(rows.windows(2).all(|w| w[0].0 < w[1].0));
}

#[test]
fn replicas_are_reproducible() {
    let tri = StepDistribution::from_weights(&FaceWeights::triangulations()).unwrap();
    let s = Sampler::new(Some(&FaceWeights::triangulations()), tri, 0, 1, 60, Method::Exact).unwrap();
    let a = s.draw_replicas(10, 8).unwrap();
    assert_eq!(a, s.draw_replicas(10, 8).unwrap());
    assert_eq!(a[3], s.draw(&mut rng_for(10, 3)).unwrap());
    assert_ne!(a[0], a[1]);
}

#[test]
fn guided_sampler_gives_simple_triangulations() {
    let mut rng = rng_for(12, 0);
    for (m, n, edges) in [(0, 1, 30), (0, 1, 60), (1, 2, 40), (2, 2, 50)] {
        for _ in 0..20 {
            let Ok(walk) = sample_simple_triangulation(m, n, edges, &mut rng, 1000) else { continue };
            assert!(walk.is_quadrant_valid() && walk.end() == (n as i64, 0) && walk.len() == edges - 1);
            let map = walk_to_map(&walk).unwrap();
            assert!(map.is_simple() && map.is_triangulation(), "{}", walk.to_text());
        }
    }
}
