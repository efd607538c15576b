//! Acceptance suite: one PASS/FAIL line per criterion, fixed seeds throughout.
//! Runs without the test harness so the lines reach the terminal unbuffered.

use std::collections::HashMap;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;

use bipolar::bijection::{map_to_walk, sew, unsew, walk_to_map, LatticeWalk, Move};
use bipolar::embed::upward_embed;
use bipolar::enumeration::{
    closed_form_triangulations_by_edges, count_walks, enumerate_maps, exact_sample, triangulation_table,
    weighted_table,
};
use bipolar::geometry::check_drawing;
use bipolar::map::PlanarMap;
use bipolar::simulate::{
    chi_square_gof, chi_square_two_sample, covariance_report, degree_stats, degrees_from_walk, free_walk,
    rejection_sample, rng_for, sample_simple_triangulation, Method, Sampler, DEFAULT_TRIM,
};
use bipolar::weights::{feasible, solve_lambda, FaceWeights, StepDistribution};

const TRI: [Move; 3] = [Move::Edge, Move::Face(1, 0), Move::Face(0, 1)];
const QUAD: [Move; 4] = [Move::Edge, Move::Face(2, 0), Move::Face(1, 1), Move::Face(0, 2)];

/// What a criterion reports; `artifact` is compared byte for byte on a rerun.
struct Outcome {
    pass: bool,
    detail: String,
    artifact: String,
}

fn outcome(failures: &[String], detail: String, artifact: String) -> Outcome {
    let detail = match failures.first() {
        None => detail,
        Some(f) => format!("{} failure(s), first: {f}", failures.len()),
    };
    Outcome { pass: failures.is_empty(), detail, artifact }
}

macro_rules! check {
    ($fails:expr, $cond:expr, $($msg:tt)+) => {
        if !$cond {
            $fails.push(format!($($msg)+));
        }
    };
}

fn brute_force(steps: &[Move], start: (i64, i64), end: (i64, i64), len: usize) -> u64 {
    let k = steps.len();
    (0..k.pow(len as u32))
        .filter(|&code| {
            let (mut x, mut y) = start;
            let mut c = code;
            for _ in 0..len {
                let (dx, dy) = steps[c % k].increment();
                c /= k;
                x += dx;
                y += dy;
                if x < 0 || y < 0 {
                    return false;
                }
            }
            (x, y) == end
        })
        .count() as u64
}

fn enumeration() -> Outcome {
    let mut fails = Vec::new();
    let want = [1u32, 5, 42, 462, 6006, 87516];
    for (k, &w) in want.iter().enumerate() {
        let ell = 3 * (k + 1);
        let dp = count_walks(&TRI, (0, 0), (1, 0), ell - 1).unwrap();
        let cf = closed_form_triangulations_by_edges(ell);
        check!(fails, dp == BigUint::from(w) && cf == dp, "ell {ell}: table {dp}, closed form {cf}, want {w}");
        if ell <= 9 {
            let bf = brute_force(&TRI, (0, 0), (1, 0), ell - 1);
            check!(fails, BigUint::from(bf) == dp, "ell {ell}: brute force {bf}");
        }
    }
    outcome(&fails, "1 5 42 462 6006 87516".into(), String::new())
}

/// Random moves; with `confined` each step is redrawn until the walk stays in the quadrant.
fn random_moves<R: Rng>(rng: &mut R, len: usize, confined: bool) -> Vec<Move> {
    let (mut x, mut y) = (0i64, 0i64);
    (0..len)
        .map(|_| loop {
            let mv = if rng.gen_bool(0.4) { Move::Edge } else { Move::Face(rng.gen_range(0..4), rng.gen_range(0..4)) };
            let (dx, dy) = mv.increment();
            if !confined || (x + dx >= 0 && y + dy >= 0) {
                x += dx;
                y += dy;
                break mv;
            }
        })
        .collect()
}

fn sew_round_trip() -> Outcome {
    let mut fails = Vec::new();
    let mut rng = rng_for(21, 0);
    let mut exiting = 0;
    let mut artifact = String::new();
    for k in 0..10_000 {
        let len = rng.gen_range(1..=200);
        let moves = random_moves(&mut rng, len, k % 2 == 0);
        exiting += usize::from(!LatticeWalk::new((0, 0), moves.clone()).is_quadrant_valid());
        artifact.push_str(&format!("{}\n", sew(&moves).num_vertices()));
        match unsew(&sew(&moves)) {
            Ok(back) => check!(fails, back == moves, "mismatch at length {len}"),
            Err(e) => fails.push(format!("length {len}: {e}")),
        }
    }
    check!(fails, exiting > 1000, "only {exiting} quadrant-exiting sequences");
    outcome(&fails, format!("10^4 sequences, {exiting} leave the quadrant"), artifact)
}

fn walk_map_round_trip(walk: &LatticeWalk, fails: &mut Vec<String>) {
    let map = match walk_to_map(walk) {
        Ok(m) => m,
        Err(e) => return fails.push(format!("{e}")),
    };
    let back = map_to_walk(&map).ok();
    check!(fails, back.as_ref() == Some(walk), "walk {} came back as {back:?}", walk.to_text().trim());
    let json = PlanarMap::from_json(&map.to_json()).map(|m| m.canonical_form()).ok();
    check!(fails, json == Some(map.canonical_form()), "JSON round trip");
}

fn map_round_trips() -> Outcome {
    let mut fails = Vec::new();
    let mut small = 0;
    for edges in 1..=9 {
        for m in 0..=3 {
            for n in 0..=3 {
                for w in triangulation_table(m, n, edges).unwrap().walks() {
                    walk_map_round_trip(&w, &mut fails);
                    small += 1;
                }
            }
        }
    }
    let tri = StepDistribution::from_weights(&FaceWeights::triangulations()).unwrap();
    let s = Sampler::new(Some(&FaceWeights::triangulations()), tri, 0, 0, 1000, Method::Exact).unwrap();
    let walks = s.draw_replicas(22, 1000).unwrap();
    for w in &walks {
        walk_map_round_trip(w, &mut fails);
    }
    let artifact = walks.iter().map(|w| w.to_text()).collect();
    outcome(&fails, format!("{small} walks with ell <= 9, 1000 at ell = 1000"), artifact)
}

fn duals() -> Outcome {
    let mut fails = Vec::new();
    let mut maps = 0;
    for edges in 1..=9 {
        for m in 0..=2 {
            for n in 0..=2 {
                let tri = triangulation_table(m, n, edges).unwrap();
                let all = weighted_table(&FaceWeights::Uniform, m, n, edges).unwrap();
                for map in enumerate_maps(&tri).chain(enumerate_maps(&all)) {
                    maps += 1;
                    let d = match map.dual_map() {
                        Ok(d) => d,
                        Err(e) => {
                            fails.push(format!("{e}"));
                            continue;
                        }
                    };
                    check!(fails, d.validate_bipolar().is_valid(), "dual invalid: {}", map.to_json());
                    let dd = d.dual_map().map(|x| x.reversed().canonical_form()).ok();
                    check!(fails, dd == Some(map.canonical_form()), "double dual differs");
                }
            }
        }
    }
    outcome(&fails, format!("{maps} maps"), String::new())
}

fn identity_holds(dist: &StepDistribution) -> Result<(), String> {
    let (dx, dy) = dist.drift();
    let t = dist.theory_stats().map_err(|e| e.to_string())?;
    if dx.abs() > 1e-9 || dy.abs() > 1e-9 {
        return Err(format!("drift ({dx}, {dy})"));
    }
    if (t.var_diff - 3.0 * t.var_sum).abs() > 1e-9 {
        return Err(format!("{} vs 3 * {}", t.var_diff, t.var_sum));
    }
    Ok(())
}

fn step_theory() -> Outcome {
    let mut fails = Vec::new();
    let lu = solve_lambda(&FaceWeights::Uniform, 1e-13).unwrap();
    let lt = solve_lambda(&FaceWeights::triangulations(), 1e-13).unwrap();
    check!(fails, (lu - 0.5).abs() <= 1e-9, "uniform lambda {lu}");
    check!(fails, (lt - 1.0).abs() <= 1e-9, "tri lambda {lt}");
    for name in ["tri", "quad", "uniform", "kgon:5"] {
        let d = StepDistribution::from_weights(&FaceWeights::load(name).unwrap()).unwrap();
        if let Err(e) = identity_holds(&d) {
            fails.push(format!("{name}: {e}"));
        }
    }
    let mut rng = rng_for(24, 0);
    let mut accepted = 0;
    while accepted < 100 {
        let mut text = String::new();
        for k in 2..=8 {
            if rng.gen_bool(0.5) {
                text.push_str(&format!("{k} {}/{}\n", rng.gen_range(1..=20u32), rng.gen_range(1..=20u32)));
            }
        }
        let Ok(w) = FaceWeights::parse(&text) else { continue };
        let Ok(d) = StepDistribution::from_weights(&w) else { continue };
        accepted += 1;
        if let Err(e) = identity_holds(&d) {
            fails.push(format!("{}: {e}", text.replace('\n', "; ")));
        }
    }
    outcome(&fails, format!("lambda uniform {lu:.12}, tri {lt:.12}; 4 presets + 100 random"), String::new())
}

fn histogram(support: &[LatticeWalk], walks: &[LatticeWalk]) -> Vec<u64> {
    let index: HashMap<&LatticeWalk, usize> = support.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut counts = vec![0u64; support.len()];
    for w in walks {
        counts[index[w]] += 1;
    }
    counts
}

fn sampler_exactness() -> Outcome {
    let mut fails = Vec::new();
    let table = triangulation_table(0, 1, 6).unwrap();
    let support: Vec<LatticeWalk> = table.walks().collect();
    let tri = StepDistribution::from_weights(&FaceWeights::triangulations()).unwrap();
    let mut r1 = rng_for(25, 0);
    let mut r2 = rng_for(25, 1);
    let a: Vec<LatticeWalk> = (0..10_000).map(|_| exact_sample(&table, &mut r1).unwrap()).collect();
    let b: Vec<LatticeWalk> = (0..10_000).map(|_| rejection_sample(&tri, 0, 1, 6, &mut r2, 1_000_000).unwrap()).collect();
    let (ha, hb) = (histogram(&support, &a), histogram(&support, &b));
    let uniform = vec![0.2; 5];
    let pa = chi_square_gof(&ha, &uniform).p_value;
    let pb = chi_square_gof(&hb, &uniform).p_value;
    let pab = chi_square_two_sample(&ha, &hb).p_value;
    check!(fails, support.len() == 5, "{} maps", support.len());
    check!(fails, pa > 0.001 && pb > 0.001 && pab > 0.001, "p = {pa}, {pb}, {pab}");
    let artifact = format!("{ha:?} {hb:?}");
    outcome(&fails, format!("exact {ha:?} p={pa:.3}; rejection {hb:?} p={pb:.3}; mutual p={pab:.3}"), artifact)
}

fn degree_law() -> Outcome {
    let mut fails = Vec::new();
    let tri = StepDistribution::from_weights(&FaceWeights::triangulations()).unwrap();
    let s = Sampler::new(Some(&FaceWeights::triangulations()), tri, 0, 1, 30_000, Method::Exact).unwrap();
    let walk = s.draw(&mut rng_for(26, 0)).unwrap();
    let tr = degrees_from_walk(&walk).unwrap();
    let map = walk_to_map(&walk).unwrap();
    let exact = (0..map.num_vertices()).all(|v| tr.in_degree[v] == map.in_degree(v) && tr.out_degree[v] == map.out_degree(v));
    check!(fails, exact && tr.in_degree.len() == map.num_vertices(), "frontier degrees differ from the map");
    let st = degree_stats(&[(tr, walk.len())], DEFAULT_TRIM).unwrap();
    check!(fails, st.tv_in < 0.02 && st.tv_out < 0.02, "TV {} / {}", st.tv_in, st.tv_out);
    check!(fails, st.correlation.abs() < 0.05, "corr {}", st.correlation);
    let detail = format!(
        "{} bulk vertices, TV in/out {:.4}/{:.4}, corr {:.4}",
        st.vertices, st.tv_in, st.tv_out, st.correlation
    );
    outcome(&fails, detail, walk.to_text())
}

fn covariance() -> Outcome {
    let mut fails = Vec::new();
    let mut detail = Vec::new();
    let mut artifact = String::new();
    for (k, name) in ["tri", "uniform"].into_iter().enumerate() {
        let d = StepDistribution::from_weights(&FaceWeights::load(name).unwrap()).unwrap();
        let th = d.theory_stats().unwrap();
        let walk = free_walk(&d, 100_000, &mut rng_for(27, k as u64));
        let r = covariance_report(&[walk], Some(&th), 27).unwrap();
        check!(fails, (r.ratio - 3.0).abs() < 0.15, "{name}: ratio {}", r.ratio);
        check!(fails, r.ratio_ci.0 <= 3.0 && 3.0 <= r.ratio_ci.1, "{name}: CI {:?}", r.ratio_ci);
        // theory matrix is (3 Var[X+Y] / 2) * ((2/3, -1/3), (-1/3, 2/3))
        let scale = 1.5 * th.var_sum;
        let shape = [[2.0 / 3.0, -1.0 / 3.0], [-1.0 / 3.0, 2.0 / 3.0]];
        for i in 0..2 {
            for j in 0..2 {
                let want = scale * shape[i][j];
                let got = r.covariance[i][j];
                check!(fails, (got - want).abs() <= 0.05 * want.abs(), "{name}: cov[{i}][{j}] {got} vs {want}");
            }
        }
        detail.push(format!("{name} ratio {:.4} CI [{:.3}, {:.3}]", r.ratio, r.ratio_ci.0, r.ratio_ci.1));
        artifact.push_str(&serde_json::to_string(&r).unwrap());
    }
    outcome(&fails, detail.join("; "), artifact)
}

fn embedding_of(walk: &LatticeWalk) -> Result<(String, u64), String> {
    let map = walk_to_map(walk).map_err(|e| e.to_string())?;
    let emb = upward_embed(&map).map_err(|e| e.to_string())?;
    let pts = emb.exact.as_ref().ok_or("no exact coordinates")?;
    let bad = check_drawing(&map, pts);
    if !bad.is_empty() {
        return Err(format!("{} violations, first {:?}", bad.len(), bad[0]));
    }
    let text: String = pts.iter().map(|(x, y)| format!("{x} {y}\n")).collect();
    Ok((text, emb.max_coordinate_bits()))
}

fn embedding() -> Outcome {
    let mut fails = Vec::new();
    let mut small = 0;
    for edges in 1..=12 {
        for m in 0..=3 {
            for n in 0..=3 {
                for w in triangulation_table(m, n, edges).unwrap().walks() {
                    if !walk_to_map(&w).unwrap().is_simple() {
                        continue;
                    }
                    small += 1;
                    if let Err(e) = embedding_of(&w) {
                        fails.push(format!("{}: {e}", w.to_text().trim()));
                    }
                }
            }
        }
    }
    let results: Vec<Result<(String, u64), String>> = (0..100u64)
        .into_par_iter()
        .map(|r| {
            let walk = sample_simple_triangulation(0, 1, 300, &mut rng_for(28, r), 1000).map_err(|e| e.to_string())?;
            embedding_of(&walk).map(|(t, b)| (walk.to_text() + &t, b))
        })
        .collect();
    let mut artifact = String::new();
    let mut bits = 0;
    for r in results {
        match r {
            Ok((t, b)) => {
                artifact.push_str(&t);
                bits = bits.max(b);
            }
            Err(e) => fails.push(e),
        }
    }
    outcome(&fails, format!("{small} simple maps with ell <= 12, 100 at ell = 300, max {bits} bits"), artifact)
}

fn feasibility() -> Outcome {
    let mut fails = Vec::new();
    let quad = FaceWeights::quadrangulations();
    let tri = FaceWeights::triangulations();
    let mut small_zeros = 0;
    for m in 0..=4usize {
        for n in 0..=4usize {
            for ell in 1..=14usize {
                let q = count_walks(&QUAD, (0, m as i64), (n as i64, 0), ell - 1).unwrap();
                let fq = feasible(&quad, m, n, ell).unwrap().pass;
                if (m + n) % 2 == 1 {
                    check!(fails, q.is_zero() && !fq, "quad ({m},{n}) ell {ell}: {q} walks");
                }
                check!(fails, q.is_zero() || fq, "quad ({m},{n}) ell {ell}: {q} walks but infeasible");
                // feasible yet empty only while ell is too short to reach the corner
                if fq && q.is_zero() {
                    small_zeros += 1;
                    check!(fails, ell < 8, "quad ({m},{n}) ell {ell}: feasible but empty");
                }
                let t = count_walks(&TRI, (0, m as i64), (n as i64, 0), ell - 1).unwrap();
                let ft = feasible(&tri, m, n, ell).unwrap().pass;
                if (2 * (ell - 1)) % 3 != (m + n) % 3 {
                    check!(fails, t.is_zero() && !ft, "tri ({m},{n}) ell {ell}: {t} walks");
                }
                check!(fails, t.is_zero() || ft, "tri ({m},{n}) ell {ell}: {t} walks but infeasible");
            }
        }
    }
    let detail = format!("m, n <= 4, ell <= 14; quad empty for odd m+n, {small_zeros} feasible cases below ell = 8 empty");
    outcome(&fails, detail, String::new())
}

struct Criterion {
    id: &'static str,
    name: &'static str,
    budget: f64,
    run: fn() -> Outcome,
    stochastic: bool,
}

const CRITERIA: [Criterion; 10] = [
    Criterion { id: "1", name: "enumeration", budget: 10.0, run: enumeration, stochastic: false },
    Criterion { id: "2a", name: "unsew after sew", budget: 60.0, run: sew_round_trip, stochastic: true },
    Criterion { id: "2b", name: "walk <-> map", budget: 60.0, run: map_round_trips, stochastic: true },
    Criterion { id: "3", name: "duals", budget: f64::INFINITY, run: duals, stochastic: false },
    Criterion { id: "4", name: "step law theory", budget: f64::INFINITY, run: step_theory, stochastic: false },
    Criterion { id: "5", name: "sampler exactness", budget: 120.0, run: sampler_exactness, stochastic: true },
    Criterion { id: "6", name: "degree law", budget: 120.0, run: degree_law, stochastic: true },
    Criterion { id: "7", name: "covariance", budget: 60.0, run: covariance, stochastic: true },
    Criterion { id: "8", name: "embedding", budget: 300.0, run: embedding, stochastic: true },
    Criterion { id: "9", name: "feasibility", budget: f64::INFINITY, run: feasibility, stochastic: false },
];

fn report(id: &str, name: &str, pass: bool, secs: f64, detail: &str) {
    println!("{} {:<3} {:<18} {:>7.2}s  {detail}", if pass { "PASS" } else { "FAIL" }, id, name, secs);
}

/// Criterion ids given on the command line select a subset; `10` reruns whatever was selected.
fn main() {
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if std::env::args().any(|a| a == "--list") {
        return;
    }
    let wanted = |id: &str| args.is_empty() || args.iter().any(|a| a == id);
    let mut failed = 0;
    let mut artifacts = Vec::new();
    for c in CRITERIA.iter().filter(|c| wanted(c.id)) {
        let t = Instant::now();
        let o = (c.run)();
        let secs = t.elapsed().as_secs_f64();
        let pass = o.pass && secs < c.budget;
        let detail = if o.pass && !pass { format!("over budget {}s; {}", c.budget, o.detail) } else { o.detail };
        report(c.id, c.name, pass, secs, &detail);
        failed += usize::from(!pass);
        if c.stochastic {
            artifacts.push((c, o.artifact));
        }
    }
    if wanted("10") {
        let t = Instant::now();
        let differing: Vec<&str> =
            artifacts.iter().filter(|(c, a)| (c.run)().artifact != *a).map(|(c, _)| c.id).collect();
        let pass = differing.is_empty();
        let detail = if pass {
            format!("{} stochastic runs repeated byte for byte", artifacts.len())
        } else {
            format!("differ: {differing:?}")
        };
        report("10", "reproducibility", pass, t.elapsed().as_secs_f64(), &detail);
        failed += usize::from(!pass);
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
