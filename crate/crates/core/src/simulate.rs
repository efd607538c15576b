//! Samplers and the statistics run on their output.
//!
//! Every stochastic routine takes its generator from [`rng_for`]: ChaCha8
//! keyed by the global seed, with the replica index as stream number, so a
//! run is reproducible from `(seed, replica)` on any platform.

use std::collections::HashSet;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::bijection::{LatticeWalk, Move};
use crate::enumeration::{triangulation_table, weighted_table, CountTable, StepSet, Weight};
use crate::error::{Error, Result};
use crate::tableau::sample_triangulation_walk;
use crate::weights::{FaceWeights, StepDistribution, TheoryStats};

pub const BOOTSTRAP_RESAMPLES: usize = 1000;
/// Fraction of the walk dropped at each end before degree statistics.
pub const DEFAULT_TRIM: f64 = 0.05;

pub fn rng_for(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// Steps drawn i.i.d. from `dist`, conditioned on staying in the quadrant and
/// ending at `(n, 0)`. Walks are abandoned as soon as they cannot succeed.
pub fn rejection_sample<R: Rng + ?Sized>(
    dist: &StepDistribution,
    m: usize,
    n: usize,
    edges: usize,
    rng: &mut R,
    max_tries: u64,
) -> Result<LatticeWalk> {
    let f = dist.feasible(m, n, edges);
    if !f.pass {
        return Err(Error::Infeasible(f.reason));
    }
    let t = edges - 1;
    let (m, n) = (m as i64, n as i64);
    let mut moves = Vec::with_capacity(t);
    'tries: for _ in 0..max_tries {
        moves.clear();
        let (mut x, mut y) = (0i64, m);
        for r in (0..t).rev() {
            let mv = dist.sample(rng);
            let (dx, dy) = mv.increment();
            x += dx;
            y += dy;
            // y falls by at most 1 per step and x grows by at most 1
            if x < 0 || y < 0 || y > r as i64 || x + (r as i64) < n {
                continue 'tries;
            }
            moves.push(mv);
        }
        if (x, y) == (n, 0) {
            return Ok(LatticeWalk::new((0, m), moves));
        }
    }
    let acceptance = 0.5 / max_tries as f64;
    Err(Error::MaxTries { tries: max_tries, acceptance })
}

/// Triangulation walk whose map has no multiple edge.
///
/// Steps are drawn in proportion to the number of ways to finish the walk,
/// except that an `m_{1,0}` which would join two already adjacent vertices is
/// never taken; a walk with no way forward is restarted. The result is NOT
/// uniform over simple triangulations.
pub fn sample_simple_triangulation<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    edges: usize,
    rng: &mut R,
    max_tries: usize,
) -> Result<LatticeWalk> {
    let table = triangulation_table(m, n, edges)?;
    if table.count().is_zero() {
        return Err(Error::NoSuchMaps);
    }
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    'tries: for _ in 0..max_tries {
        let (mut x, mut y) = table.start();
        let mut below = vec![0usize];
        let mut above: Vec<usize> = Vec::new();
        let mut active = 1usize;
        let mut fresh = 2usize;
        let mut adj: HashSet<(usize, usize)> = HashSet::from([(0, 1)]);
        let mut moves = Vec::with_capacity(table.length());
        for r in (1..=table.length()).rev() {
            let mut options = Vec::with_capacity(3);
            let mut weights = Vec::with_capacity(3);
            for &(mv, _) in &table.steps().steps {
                if mv == Move::Face(1, 0) && below.len() >= 2 && adj.contains(&key(below[below.len() - 2], active)) {
                    continue;
                }
                let (dx, dy) = mv.increment();
                let c = table.get(r - 1, x + dx, y + dy);
                if !c.is_zero() {
                    options.push(mv);
                    weights.push(c);
                }
            }
            if options.is_empty() {
                continue 'tries;
            }
            let mv = options[BigUint::pick(rng, &weights)];
            match mv {
                Move::Edge => {
                    below.push(active);
                    active = above.pop().unwrap_or_else(|| {
                        fresh += 1;
                        fresh - 1
                    });
                    adj.insert(key(*below.last().unwrap(), active));
                }
                Move::Face(1, 0) => {
                    let lower = below.pop().unwrap();
                    let from = below.last().copied().unwrap_or_else(|| {
                        fresh += 1;
                        fresh - 1
                    });
                    if below.is_empty() {
                        below.push(from);
                    }
                    adj.insert(key(from, lower));
                    adj.insert(key(from, active));
                }
                _ => {
                    let lower = *below.last().unwrap();
                    above.push(active);
                    active = fresh;
                    fresh += 1;
                    adj.insert(key(lower, active));
                    adj.insert(key(active, *above.last().unwrap()));
                }
            }
            let (dx, dy) = mv.increment();
            x += dx;
            y += dy;
            moves.push(mv);
        }
        return Ok(LatticeWalk::new(table.start(), moves));
    }
    Err(Error::MaxTries { tries: max_tries as u64, acceptance: 0.0 })
}

/// `steps` unconditioned i.i.d. steps from the origin.
pub fn free_walk<R: Rng + ?Sized>(dist: &StepDistribution, steps: usize, rng: &mut R) -> LatticeWalk {
    LatticeWalk::new((0, 0), (0..steps).map(|_| dist.sample(rng)).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Exact,
    Rejection,
    Free,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Method> {
        match s {
            "exact" => Ok(Method::Exact),
            "rejection" => Ok(Method::Rejection),
            "free" => Ok(Method::Free),
            _ => Err(Error::Parse { line: 0, msg: format!("unknown method {s:?}") }),
        }
    }
}

enum Engine {
    Tableau,
    Integer(CountTable<BigUint>),
    Rational(CountTable<BigRational>),
    Rejection(u64),
    Free,
}

/// A prepared sampler; count tables are built once and shared by all replicas.
pub struct Sampler {
    dist: StepDistribution,
    m: usize,
    n: usize,
    edges: usize,
    engine: Engine,
}

impl Sampler {
    pub fn new(
        weights: Option<&FaceWeights>,
        dist: StepDistribution,
        m: usize,
        n: usize,
        edges: usize,
        method: Method,
    ) -> Result<Sampler> {
        if edges == 0 {
            return Err(Error::Infeasible("a map needs at least one edge".into()));
        }
        let engine = match method {
            Method::Free => Engine::Free,
            Method::Rejection => Engine::Rejection(10_000_000),
            Method::Exact => {
                let f = dist.feasible(m, n, edges);
                if !f.pass {
                    return Err(Error::Infeasible(f.reason));
                }
                match weights {
                    Some(w) if *w == FaceWeights::triangulations() && m == 0 && n <= 1 => Engine::Tableau,
                    Some(w) if *w == FaceWeights::triangulations() => {
                        Engine::Integer(crate::enumeration::triangulation_table(m, n, edges)?)
                    }
                    Some(w) => Engine::Rational(weighted_table(w, m, n, edges)?),
                    None => {
                        let steps = dist
                            .support()
                            .into_iter()
                            .filter_map(|(mv, p)| BigRational::from_float(p).map(|r| (mv, r)))
                            .collect();
                        Engine::Rational(CountTable::build(
                            StepSet { steps },
                            (0, m as i64),
                            (n as i64, 0),
                            edges - 1,
                        )?)
                    }
                }
            }
        };
        Ok(Sampler { dist, m, n, edges, engine })
    }

    pub fn with_max_tries(mut self, tries: u64) -> Sampler {
        if let Engine::Rejection(_) = self.engine {
            self.engine = Engine::Rejection(tries);
        }
        self
    }

    pub fn distribution(&self) -> &StepDistribution {
        &self.dist
    }

    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<LatticeWalk> {
        match &self.engine {
            Engine::Tableau => sample_triangulation_walk(self.m, self.n, self.edges, rng),
            Engine::Integer(t) => t.sample(rng),
            Engine::Rational(t) => t.sample(rng),
            Engine::Rejection(tries) => rejection_sample(&self.dist, self.m, self.n, self.edges, rng, *tries),
            Engine::Free => Ok(free_walk(&self.dist, self.edges - 1, rng)),
        }
    }

    /// One walk per replica, replica `r` drawn from `rng_for(seed, r)`.
    pub fn draw_replicas(&self, seed: u64, replicas: usize) -> Result<Vec<LatticeWalk>> {
        (0..replicas as u64)
            .into_par_iter()
            .map(|r| self.draw(&mut rng_for(seed, r)))
            .collect()
    }
}

/// Per-vertex degrees read off the frontier while a triangulation walk is sewn.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrontierTrace {
    pub in_degree: Vec<usize>,
    pub out_degree: Vec<usize>,
    /// Index of the move that created each vertex; the two initial vertices have 0.
    pub created: Vec<usize>,
}

/// Replays the frontier: position 0 is the active vertex, position 1 the vertex
/// just below it. Every move adds one edge from position 1 to position 0.
/// Vertex ids agree with [`crate::bijection::sew`].
pub fn degrees_from_walk(walk: &LatticeWalk) -> Result<FrontierTrace> {
    let mut tr = FrontierTrace { in_degree: vec![0, 1], out_degree: vec![1, 0], created: vec![0, 0] };
    let mut below: Vec<usize> = vec![0];
    let mut above: Vec<usize> = Vec::new();
    let mut active = 1;
    for (t, &mv) in walk.moves.iter().enumerate() {
        let fresh = |tr: &mut FrontierTrace| {
            tr.in_degree.push(0);
            tr.out_degree.push(0);
            tr.created.push(t + 1);
            tr.in_degree.len() - 1
        };
        match mv {
            Move::Edge => {
                below.push(active);
                active = match above.pop() {
                    Some(v) => v,
                    None => fresh(&mut tr),
                };
            }
            Move::Face(1, 0) => {
                below.pop();
                if below.is_empty() {
                    below.push(fresh(&mut tr));
                }
            }
            Move::Face(0, 1) => {
                above.push(active);
                active = fresh(&mut tr);
            }
            other => {
                return Err(Error::Unsupported(format!(
                    "unsupported: frontier tracing covers triangulation steps only, got {other}"
                )))
            }
        }
        tr.in_degree[active] += 1;
        tr.out_degree[*below.last().unwrap()] += 1;
    }
    Ok(tr)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeStats {
    pub vertices: usize,
    /// `in_hist[k]` vertices of in-degree `k`.
    pub in_hist: Vec<u64>,
    pub out_hist: Vec<u64>,
    /// `(in, out, count)` for every observed pair.
    pub joint: Vec<(usize, usize, u64)>,
    pub tv_in: f64,
    pub tv_out: f64,
    pub correlation: f64,
    pub mean_in: f64,
    pub mean_out: f64,
}

/// TV distance from the empirical law of `hist` to the geometric law on `{1, 2, ...}` with mean `1/p`.
pub fn tv_to_geometric(hist: &[u64], p: f64) -> f64 {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return 1.0;
    }
    let mut tv = 0.0;
    let mut covered = 0.0;
    for (k, &c) in hist.iter().enumerate() {
        let emp = c as f64 / total as f64;
        let geo = if k == 0 { 0.0 } else { p * (1.0 - p).powi(k as i32 - 1) };
        covered += geo;
        tv += (emp - geo).abs();
    }
    0.5 * (tv + (1.0 - covered).max(0.0))
}

/// Degree histograms of bulk vertices: those created after the first and before the last `trim` fraction of moves.
pub fn degree_stats(traces: &[(FrontierTrace, usize)], trim: f64) -> Result<DegreeStats> {
    let mut pairs = Vec::new();
    for (tr, moves) in traces {
        let lo = (trim * *moves as f64).ceil() as usize;
        let hi = (*moves as f64 * (1.0 - trim)).floor() as usize;
        for v in 0..tr.created.len() {
            if tr.created[v] >= lo.max(1) && tr.created[v] <= hi {
                pairs.push((tr.in_degree[v], tr.out_degree[v]));
            }
        }
    }
    if pairs.is_empty() {
        return Err(Error::Degenerate("no bulk vertices".into()));
    }
    let max_in = pairs.iter().map(|p| p.0).max().unwrap();
    let max_out = pairs.iter().map(|p| p.1).max().unwrap();
    let mut in_hist = vec![0u64; max_in + 1];
    let mut out_hist = vec![0u64; max_out + 1];
    let mut joint = std::collections::BTreeMap::new();
    for &(i, o) in &pairs {
        in_hist[i] += 1;
        out_hist[o] += 1;
        *joint.entry((i, o)).or_insert(0u64) += 1;
    }
    let n = pairs.len() as f64;
    let mean_in = pairs.iter().map(|p| p.0 as f64).sum::<f64>() / n;
    let mean_out = pairs.iter().map(|p| p.1 as f64).sum::<f64>() / n;
    let cov = pairs.iter().map(|p| (p.0 as f64 - mean_in) * (p.1 as f64 - mean_out)).sum::<f64>() / n;
    let sd_in = (pairs.iter().map(|p| (p.0 as f64 - mean_in).powi(2)).sum::<f64>() / n).sqrt();
    let sd_out = (pairs.iter().map(|p| (p.1 as f64 - mean_out).powi(2)).sum::<f64>() / n).sqrt();
    let correlation = if sd_in > 0.0 && sd_out > 0.0 { cov / (sd_in * sd_out) } else { 0.0 };
    Ok(DegreeStats {
        vertices: pairs.len(),
        tv_in: tv_to_geometric(&in_hist, 1.0 / 3.0),
        tv_out: tv_to_geometric(&out_hist, 1.0 / 3.0),
        in_hist,
        out_hist,
        joint: joint.into_iter().map(|((i, o), c)| (i, o, c)).collect(),
        correlation,
        mean_in,
        mean_out,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheorySummary {
    pub var_diff: f64,
    pub var_sum: f64,
    pub ratio: f64,
    pub covariance: [[f64; 2]; 2],
}

impl From<&TheoryStats> for TheorySummary {
    fn from(t: &TheoryStats) -> TheorySummary {
        TheorySummary { var_diff: t.var_diff, var_sum: t.var_sum, ratio: t.var_diff / t.var_sum, covariance: t.covariance }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StatReport {
    pub walks: usize,
    pub steps: usize,
    pub var_diff: f64,
    pub var_sum: f64,
    pub ratio: f64,
    /// 95% bootstrap interval for the ratio.
    pub ratio_ci: (f64, f64),
    pub covariance: [[f64; 2]; 2],
    pub theory: Option<TheorySummary>,
    pub degrees: Option<DegreeStats>,
}

fn moments(incs: &[(i64, i64)], idx: impl Iterator<Item = usize>) -> (f64, f64, [[f64; 2]; 2]) {
    let (mut n, mut sx, mut sy, mut sxx, mut syy, mut sxy) = (0f64, 0f64, 0f64, 0f64, 0f64, 0f64);
    for k in idx {
        let (x, y) = (incs[k].0 as f64, incs[k].1 as f64);
        n += 1.0;
        sx += x;
        sy += y;
        sxx += x * x;
        syy += y * y;
        sxy += x * y;
    }
    let (mx, my) = (sx / n, sy / n);
    let vx = sxx / n - mx * mx;
    let vy = syy / n - my * my;
    let cxy = sxy / n - mx * my;
    (vx + vy - 2.0 * cxy, vx + vy + 2.0 * cxy, [[vx, cxy], [cxy, vy]])
}

/// Step covariance of the pooled increments, with a bootstrap interval for `Var[X-Y] / Var[X+Y]`.
pub fn covariance_report(walks: &[LatticeWalk], theory: Option<&TheoryStats>, seed: u64) -> Result<StatReport> {
    let incs: Vec<(i64, i64)> = walks.iter().flat_map(|w| w.moves.iter().map(|m| m.increment())).collect();
    if incs.len() < 2 {
        return Err(Error::Degenerate(format!("{} steps are too few", incs.len())));
    }
    let (var_diff, var_sum, covariance) = moments(&incs, 0..incs.len());
    if var_sum <= 0.0 {
        return Err(Error::Degenerate("Var[X+Y] is zero".into()));
    }
    let n = incs.len();
    let mut ratios: Vec<f64> = (0..BOOTSTRAP_RESAMPLES as u64)
        .into_par_iter()
        .map(|b| {
            let mut rng = rng_for(seed, b);
            let (d, s, _) = moments(&incs, (0..n).map(|_| rng.gen_range(0..n)));
            d / s
        })
        .collect();
    ratios.sort_by(|a, b| a.total_cmp(b));
    let q = |p: f64| ratios[((p * (ratios.len() - 1) as f64).round() as usize).min(ratios.len() - 1)];
    Ok(StatReport {
        walks: walks.len(),
        steps: n,
        var_diff,
        var_sum,
        ratio: var_diff / var_sum,
        ratio_ci: (q(0.025), q(0.975)),
        covariance,
        theory: theory.map(TheorySummary::from),
        degrees: None,
    })
}

impl fmt::Display for StatReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "walks           {}", self.walks)?;
        writeln!(f, "steps           {}", self.steps)?;
        let th = self.theory.as_ref();
        let col = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.6}"));
        writeln!(f, "{:<16}{:>12}{:>12}", "", "empirical", "theory")?;
        writeln!(f, "{:<16}{:>12.6}{:>12}", "Var[X-Y]", self.var_diff, col(th.map(|t| t.var_diff)))?;
        writeln!(f, "{:<16}{:>12.6}{:>12}", "Var[X+Y]", self.var_sum, col(th.map(|t| t.var_sum)))?;
        writeln!(f, "{:<16}{:>12.6}{:>12}", "ratio", self.ratio, col(th.map(|t| t.ratio)))?;
        writeln!(f, "ratio 95% CI    [{:.4}, {:.4}]", self.ratio_ci.0, self.ratio_ci.1)?;
        writeln!(
            f,
            "covariance      [[{:.4}, {:.4}], [{:.4}, {:.4}]]",
            self.covariance[0][0], self.covariance[0][1], self.covariance[1][0], self.covariance[1][1]
        )?;
        if let Some(d) = &self.degrees {
            writeln!(f, "bulk vertices   {}", d.vertices)?;
            writeln!(f, "mean in/out     {:.4} / {:.4}", d.mean_in, d.mean_out)?;
            writeln!(f, "TV in/out       {:.4} / {:.4}  (vs geometric, mean 3)", d.tv_in, d.tv_out)?;
            writeln!(f, "corr(in, out)   {:.4}", d.correlation)?;
        }
        Ok(())
    }
}

/// `(t, X_{⌊ℓt⌋}/√ℓ, Y_{⌊ℓt⌋}/√ℓ)` on `grid_points ≥ 2` evenly spaced `t ∈ [0, 1]`, where `ℓ = T + 1`.
pub fn interface_export(walk: &LatticeWalk, grid_points: usize) -> Vec<(f64, f64, f64)> {
    let pts = walk.points();
    let ell = (walk.len() + 1) as f64;
    let scale = ell.sqrt();
    let g = grid_points.max(2);
    (0..g)
        .map(|k| {
            let t = k as f64 / (g - 1) as f64;
            let idx = ((ell * t).floor() as usize).min(pts.len() - 1);
            let (x, y) = pts[idx];
            (t, x as f64 / scale, y as f64 / scale)
        })
        .collect()
}

pub fn interface_csv(rows: &[(f64, f64, f64)]) -> String {
    let mut s = String::from("t,x,y\n");
    for (t, x, y) in rows {
        s.push_str(&format!("{t},{x},{y}\n"));
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChiSquare {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

fn chi_p(statistic: f64, df: usize) -> f64 {
    if df == 0 {
        return 1.0;
    }
    ChiSquared::new(df as f64).map(|c| c.sf(statistic)).unwrap_or(f64::NAN)
}

/// Goodness of fit of `observed` counts to `probs`.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> ChiSquare {
    let n: u64 = observed.iter().sum();
    let statistic = observed
        .iter()
        .zip(probs)
        .filter(|(_, &p)| p > 0.0)
        .map(|(&o, &p)| {
            let e = p * n as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let df = probs.iter().filter(|&&p| p > 0.0).count().saturating_sub(1);
    ChiSquare { statistic, df, p_value: chi_p(statistic, df) }
}

/// Homogeneity of two count vectors over the same categories.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> ChiSquare {
    let (na, nb) = (a.iter().sum::<u64>() as f64, b.iter().sum::<u64>() as f64);
    let total = na + nb;
    let mut statistic = 0.0;
    let mut cats = 0usize;
    for (&x, &y) in a.iter().zip(b) {
        let col = (x + y) as f64;
        if col == 0.0 {
            continue;
        }
        cats += 1;
        for (obs, rowsum) in [(x as f64, na), (y as f64, nb)] {
            let e = rowsum * col / total;
            statistic += (obs - e).powi(2) / e;
        }
    }
    let df = cats.saturating_sub(1);
    ChiSquare { statistic, df, p_value: chi_p(statistic, df) }
}
