//! Face weights and the zero-drift step law they induce.
//!
//! Weighting a map by `∏ a_{deg f}` and choosing `λ` so that the step law has
//! no drift turns the weighted map measure into a random walk conditioned to
//! stay in the quadrant. A face move `m_{i,j}` gets probability
//! `a_k λ^{k-2} / C` with `k = i + j + 2`, the edge move `λ^{-2} / C`.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::bijection::Move;
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-12;

// Terms of the all-ones series beyond this degree are below 2^-400.
const UNIFORM_CUTOFF: usize = 400;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FaceWeights {
    /// `a_k` for finitely many `k ≥ 2`; radius of convergence is infinite.
    Finite(BTreeMap<usize, BigRational>),
    /// `a_k = 1` for every `k ≥ 2`; radius of convergence 1.
    Uniform,
}

impl FaceWeights {
    pub fn triangulations() -> FaceWeights {
        FaceWeights::k_gons(3)
    }

    pub fn quadrangulations() -> FaceWeights {
        FaceWeights::k_gons(4)
    }

    pub fn k_gons(k: usize) -> FaceWeights {
        FaceWeights::Finite(BTreeMap::from([(k, BigRational::one())]))
    }

    /// `tri`, `quad`, `uniform` or `kgon:K`.
    pub fn preset(name: &str) -> Option<FaceWeights> {
        match name {
            "tri" => Some(FaceWeights::triangulations()),
            "quad" => Some(FaceWeights::quadrangulations()),
            "uniform" => Some(FaceWeights::Uniform),
            _ => {
                let k = name.strip_prefix("kgon:")?.parse::<usize>().ok()?;
                (k >= 2).then(|| FaceWeights::k_gons(k))
            }
        }
    }

    /// Parses lines `k a_k`, or the single keyword `uniform`. `#` starts a comment.
    pub fn parse(text: &str) -> Result<FaceWeights> {
        let mut map = BTreeMap::new();
        let mut uniform = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: idx + 1, msg };
            if line == "uniform" {
                uniform = true;
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [k, a] = toks.as_slice() else {
                return Err(err(format!("expected \"k a_k\", got {line:?}")));
            };
            let k = k.parse::<usize>().map_err(|e| err(format!("bad face size {k:?}: {e}")))?;
            if k < 2 {
                return Err(err(format!("face size {k} is below 2")));
            }
            let a = parse_rational(a).ok_or_else(|| err(format!("bad weight {a:?}")))?;
            if a < BigRational::zero() {
                return Err(err(format!("negative weight for k = {k}")));
            }
            if map.insert(k, a).is_some() {
                return Err(err(format!("face size {k} listed twice")));
            }
        }
        match (uniform, map.is_empty()) {
            (true, true) => Ok(FaceWeights::Uniform),
            (true, false) => Err(Error::Weights("\"uniform\" cannot be combined with explicit weights".into())),
            (false, _) => {
                map.retain(|_, a| !a.is_zero());
                if map.is_empty() {
                    return Err(Error::Weights("no positive face weight".into()));
                }
                Ok(FaceWeights::Finite(map))
            }
        }
    }

    /// A preset name or a path to a weights file.
    pub fn load(spec: &str) -> Result<FaceWeights> {
        match FaceWeights::preset(spec) {
            Some(w) => Ok(w),
            None => FaceWeights::parse(&std::fs::read_to_string(Path::new(spec))?),
        }
    }

    pub fn weight(&self, k: usize) -> BigRational {
        match self {
            FaceWeights::Finite(map) => map.get(&k).cloned().unwrap_or_else(BigRational::zero),
            FaceWeights::Uniform => {
                if k >= 2 {
                    BigRational::one()
                } else {
                    BigRational::zero()
                }
            }
        }
    }

    /// Weight contributed by one move: `a_{i+j+2}` for a face move, 1 for an edge move.
    pub fn move_weight(&self, mv: Move) -> BigRational {
        match mv {
            Move::Edge => BigRational::one(),
            Move::Face(i, j) => self.weight(i + j + 2),
        }
    }

    /// Largest face degree with positive weight; `None` for infinite support.
    pub fn max_degree(&self) -> Option<usize> {
        match self {
            FaceWeights::Finite(map) => map.keys().next_back().copied(),
            FaceWeights::Uniform => None,
        }
    }

    fn degrees_f64(&self) -> Vec<(usize, f64)> {
        match self {
            FaceWeights::Finite(map) => map.iter().map(|(&k, a)| (k, a.to_f64().unwrap_or(f64::NAN))).collect(),
            FaceWeights::Uniform => (2..=UNIFORM_CUTOFF).map(|k| (k, 1.0)).collect(),
        }
    }

    fn radius(&self) -> f64 {
        match self {
            FaceWeights::Finite(_) => f64::INFINITY,
            FaceWeights::Uniform => 1.0,
        }
    }

    /// `Σ (k-1)(k-2)/2 · a_k λ^k`.
    fn lambda_series(&self, lambda: f64) -> f64 {
        match self {
            FaceWeights::Uniform => (lambda / (1.0 - lambda)).powi(3),
            FaceWeights::Finite(_) => self
                .degrees_f64()
                .iter()
                .map(|&(k, a)| ((k - 1) * (k - 2)) as f64 / 2.0 * a * lambda.powi(k as i32))
                .sum(),
        }
    }
}

impl FromStr for FaceWeights {
    type Err = Error;

    fn from_str(s: &str) -> Result<FaceWeights> {
        FaceWeights::preset(s).map_or_else(|| FaceWeights::parse(s), Ok)
    }
}

/// Parses `3`, `-0.25`, `1.5e-3` or `3/4` exactly.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    if let Some((n, d)) = s.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        return (!d.is_zero()).then(|| BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(p) => (&s[..p], s[p + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let num = BigInt::from_str(&format!("{int}{frac}").trim_start_matches('0').to_string()).unwrap_or_default();
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut r = BigRational::from_integer(num);
    if scale >= 0 {
        r *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        r /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if neg { -r } else { r })
}

/// Finds `λ` with `Σ (k-1)(k-2)/2 · a_k λ^k = 1` by bisection.
pub fn solve_lambda(weights: &FaceWeights, tol: f64) -> Result<f64> {
    let f = |l: f64| weights.lambda_series(l) - 1.0;
    let r = weights.radius();
    let (lo, mut hi) = if r.is_finite() { (tol, r - tol) } else { (tol, 1.0) };
    if r.is_finite() {
        if f(hi) < 0.0 {
            return Err(Error::NoZeroDrift(format!("the series stays below 1 up to the radius {r}")));
        }
    } else {
        if !weights.degrees_f64().iter().any(|&(k, a)| k >= 3 && a > 0.0) {
            return Err(Error::NoZeroDrift("every face has degree 2".into()));
        }
        while f(hi) < 0.0 {
            hi *= 2.0;
        }
    }
    let mut lo = lo;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v.abs() <= tol || hi - lo <= f64::EPSILON * hi {
            return Ok(mid);
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `b` such that closed walks have lengths in `bZ`, from the supported face degrees.
pub fn period_of_degrees(degrees: impl IntoIterator<Item = usize>) -> Result<usize> {
    let g = degrees
        .into_iter()
        .filter(|&k| k >= 2)
        .map(|k| if k % 2 == 0 { k / 2 } else { k })
        .fold(0, |g: usize, x| g.gcd(&x));
    if g == 0 {
        Err(Error::Weights("empty face-degree support".into()))
    } else {
        Ok(g)
    }
}

pub fn period(weights: &FaceWeights) -> Result<usize> {
    match weights {
        FaceWeights::Uniform => Ok(1),
        FaceWeights::Finite(map) => period_of_degrees(map.iter().filter(|(_, a)| !a.is_zero()).map(|(&k, _)| k)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Feasibility {
    /// The necessary conditions hold; maps exist for all large enough `ℓ` in this class.
    pub pass: bool,
    pub reason: String,
}

fn feasible_for_degrees(degrees: &[usize], b: usize, m: usize, n: usize, edges: usize) -> Feasibility {
    if edges == 0 {
        return Feasibility { pass: false, reason: "a map needs at least one edge".into() };
    }
    if (m + n) % 2 == 1 && degrees.iter().all(|k| k % 2 == 0) {
        return Feasibility { pass: false, reason: format!("m + n = {} is odd and every face has even degree", m + n) };
    }
    // with only even faces, (Y - X)/2 falls by 1 mod b at every step
    if degrees.iter().all(|k| k % 2 == 0) && (edges - 1) % b != ((m + n) / 2) % b {
        return Feasibility {
            pass: false,
            reason: format!("every face has even degree, so ℓ-1 = {} must be (m+n)/2 = {} mod {b}", edges - 1, (m + n) / 2),
        };
    }
    let lhs = (2 * (edges - 1)) % b;
    let rhs = (m + n) % b;
    if lhs != rhs {
        return Feasibility {
            pass: false,
            reason: format!("2(ℓ-1) = {} is {lhs} mod {b} but m + n = {} is {rhs} mod {b}", 2 * (edges - 1), m + n),
        };
    }
    Feasibility { pass: true, reason: "necessary-conditions-pass".into() }
}

/// Necessary conditions for maps with `m + 1` west and `n + 1` east boundary edges and `ℓ` edges.
pub fn feasible(weights: &FaceWeights, m: usize, n: usize, edges: usize) -> Result<Feasibility> {
    let b = period(weights)?;
    let degrees: Vec<usize> = match weights {
        FaceWeights::Uniform => vec![2, 3],
        FaceWeights::Finite(map) => map.keys().copied().collect(),
    };
    Ok(feasible_for_degrees(&degrees, b, m, n, edges))
}

#[derive(Clone, Debug, PartialEq)]
enum FaceLaw {
    /// Explicit probabilities, indexed alongside `moves`.
    Table { moves: Vec<Move>, probs: Vec<f64>, index: WeightedIndex<f64> },
    /// `ν(-i, j) = 2^{-i-j-3}`.
    Geometric,
}

/// Law of one walk step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepDistribution {
    /// `None` for a directly supplied law.
    pub lambda: Option<f64>,
    pub c: Option<f64>,
    pub p0: f64,
    pub period: usize,
    law: FaceLaw,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoryStats {
    pub var_diff: f64,
    pub var_sum: f64,
    /// Covariance matrix of one step `(dX, dY)`.
    pub covariance: [[f64; 2]; 2],
    /// `(k, P[a typical face has degree k])`.
    pub degree_law: Vec<(usize, f64)>,
}

impl StepDistribution {
    pub fn from_weights(weights: &FaceWeights) -> Result<StepDistribution> {
        StepDistribution::from_weights_tol(weights, DEFAULT_TOL)
    }

    pub fn from_weights_tol(weights: &FaceWeights, tol: f64) -> Result<StepDistribution> {
        let lambda = solve_lambda(weights, tol)?;
        let period = period(weights)?;
        match weights {
            FaceWeights::Uniform => {
                let c = lambda.powi(-2) + (1.0 - lambda).powi(-2);
                Ok(StepDistribution { lambda: Some(lambda), c: Some(c), p0: lambda.powi(-2) / c, period, law: FaceLaw::Geometric })
            }
            FaceWeights::Finite(_) => {
                let degs = weights.degrees_f64();
                let c = lambda.powi(-2) + degs.iter().map(|&(k, a)| (k - 1) as f64 * a * lambda.powi(k as i32 - 2)).sum::<f64>();
                let mut moves = Vec::new();
                let mut probs = Vec::new();
                for &(k, a) in &degs {
                    let p = a * lambda.powi(k as i32 - 2) / c;
                    for i in 0..=k - 2 {
                        moves.push(Move::Face(i, k - 2 - i));
                        probs.push(p);
                    }
                }
                let p0 = lambda.powi(-2) / c;
                moves.push(Move::Edge);
                probs.push(p0);
                StepDistribution::table(Some(lambda), Some(c), p0, period, moves, probs)
            }
        }
    }

    fn table(
        lambda: Option<f64>,
        c: Option<f64>,
        p0: f64,
        period: usize,
        moves: Vec<Move>,
        probs: Vec<f64>,
    ) -> Result<StepDistribution> {
        let index = WeightedIndex::new(&probs).map_err(|e| Error::Weights(e.to_string()))?;
        Ok(StepDistribution { lambda, c, p0, period, law: FaceLaw::Table { moves, probs, index } })
    }

    /// A law given as `(move, probability)` pairs; must have zero drift and the reflection symmetry.
    pub fn direct(pairs: &[(Move, f64)]) -> Result<StepDistribution> {
        let mut acc: BTreeMap<Move, f64> = BTreeMap::new();
        for &(mv, p) in pairs {
            if !(p >= 0.0 && p <= 1.0) {
                return Err(Error::Weights(format!("probability {p} of {mv} is outside [0, 1]")));
            }
            *acc.entry(mv).or_default() += p;
        }
        acc.retain(|_, p| *p > 0.0);
        let total: f64 = acc.values().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Weights(format!("probabilities sum to {total}")));
        }
        for (&mv, &p) in &acc {
            let mirror = match mv {
                Move::Edge => Move::Edge,
                Move::Face(i, j) => Move::Face(j, i),
            };
            let q = acc.get(&mirror).copied().unwrap_or(0.0);
            if (p - q).abs() > 1e-12 {
                return Err(Error::Weights(format!("law is not symmetric: P[{mv}] = {p} but P[{mirror}] = {q}")));
            }
        }
        let p0 = acc.get(&Move::Edge).copied().unwrap_or(0.0);
        let degrees: Vec<usize> = acc.keys().filter_map(|m| match m {
            Move::Face(i, j) => Some(i + j + 2),
            Move::Edge => None,
        }).collect();
        let period = period_of_degrees(degrees)?;
        let (moves, probs): (Vec<Move>, Vec<f64>) = acc.into_iter().unzip();
        let dist = StepDistribution::table(None, None, p0, period, moves, probs)?;
        let (dx, dy) = dist.drift();
        if dx.abs() > 1e-9 || dy.abs() > 1e-9 {
            return Err(Error::NoZeroDrift(format!("drift is ({dx}, {dy})")));
        }
        Ok(dist)
    }

    /// Parses lines `dx dy prob`.
    pub fn parse_direct(text: &str) -> Result<StepDistribution> {
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Parse { line: idx + 1, msg };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let [dx, dy, p] = toks.as_slice() else {
                return Err(err(format!("expected \"dx dy prob\", got {line:?}")));
            };
            let dx: i64 = dx.parse().map_err(|e| err(format!("bad dx: {e}")))?;
            let dy: i64 = dy.parse().map_err(|e| err(format!("bad dy: {e}")))?;
            let p = parse_rational(p).and_then(|r| r.to_f64()).ok_or_else(|| err(format!("bad probability {p:?}")))?;
            let mv = Move::from_increment(dx, dy).ok_or_else(|| err(format!("({dx}, {dy}) is not a walk step")))?;
            pairs.push((mv, p));
        }
        StepDistribution::direct(&pairs)
    }

    /// Moves with positive probability. Infinite laws are cut where the remaining mass is below `2^-60`.
    pub fn support(&self) -> Vec<(Move, f64)> {
        match &self.law {
            FaceLaw::Table { moves, probs, .. } => moves.iter().copied().zip(probs.iter().copied()).collect(),
            FaceLaw::Geometric => {
                let mut v = vec![(Move::Edge, self.p0)];
                for s in 0..=60usize {
                    for i in 0..=s {
                        v.push((Move::Face(i, s - i), 0.5f64.powi(s as i32 + 3)));
                    }
                }
                v
            }
        }
    }

    pub fn prob(&self, mv: Move) -> f64 {
        match &self.law {
            FaceLaw::Table { moves, probs, .. } => moves.iter().position(|&m| m == mv).map_or(0.0, |p| probs[p]),
            FaceLaw::Geometric => match mv {
                Move::Edge => self.p0,
                Move::Face(i, j) => 0.5f64.powi((i + j + 3) as i32),
            },
        }
    }

    /// Face degrees `i + j + 2` reachable by one move.
    pub fn face_degrees(&self) -> Vec<usize> {
        match &self.law {
            FaceLaw::Geometric => vec![2, 3],
            FaceLaw::Table { moves, .. } => {
                let mut d: Vec<usize> = moves
                    .iter()
                    .filter_map(|m| match m {
                        Move::Face(i, j) => Some(i + j + 2),
                        Move::Edge => None,
                    })
                    .collect();
                d.sort_unstable();
                d.dedup();
                d
            }
        }
    }

    pub fn feasible(&self, m: usize, n: usize, edges: usize) -> Feasibility {
        feasible_for_degrees(&self.face_degrees(), self.period, m, n, edges)
    }

    /// Largest `i` and `j` among supported face moves; `None` when unbounded.
    pub fn max_face_steps(&self) -> Option<(usize, usize)> {
        match &self.law {
            FaceLaw::Table { moves, .. } => Some(moves.iter().fold((0, 0), |(a, b), m| match *m {
                Move::Face(i, j) => (a.max(i), b.max(j)),
                Move::Edge => (a, b),
            })),
            FaceLaw::Geometric => None,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Move {
        match &self.law {
            FaceLaw::Table { moves, index, .. } => moves[index.sample(rng)],
            FaceLaw::Geometric => {
                if rng.gen_bool(0.5) {
                    Move::Edge
                } else {
                    let geom = |rng: &mut R| {
                        let mut k = 0;
                        while rng.gen_bool(0.5) {
                            k += 1;
                        }
                        k
                    };
                    let i = geom(rng);
                    let j = geom(rng);
                    Move::Face(i, j)
                }
            }
        }
    }

    pub fn total(&self) -> f64 {
        match &self.law {
            FaceLaw::Table { probs, .. } => probs.iter().sum(),
            // p0 + Σ_{s≥0} (s+1) 2^{-s-3}
            FaceLaw::Geometric => self.p0 + 0.5,
        }
    }

    pub fn drift(&self) -> (f64, f64) {
        match &self.law {
            FaceLaw::Table { .. } => self.support().iter().fold((0.0, 0.0), |(x, y), &(m, p)| {
                let (dx, dy) = m.increment();
                (x + p * dx as f64, y + p * dy as f64)
            }),
            // E[i] = E[j] = 1 under Geom(1/2), times 1/2
            FaceLaw::Geometric => (self.p0 - 0.5, 0.5 - self.p0),
        }
    }

    /// `p_k`: mean probability of one face move of degree `k`, i.e. total mass of degree `k` over `k - 1`.
    pub fn p_k(&self) -> BTreeMap<usize, f64> {
        if matches!(self.law, FaceLaw::Geometric) {
            return (2..=UNIFORM_CUTOFF).map(|k| (k, 0.5f64.powi(k as i32 + 1))).collect();
        }
        let mut pk: BTreeMap<usize, f64> = BTreeMap::new();
        for (m, p) in self.support() {
            if let Move::Face(i, j) = m {
                *pk.entry(i + j + 2).or_default() += p / (i + j + 1) as f64;
            }
        }
        pk
    }

    pub fn theory_stats(&self) -> Result<TheoryStats> {
        let (var_diff, var_sum) = match &self.law {
            FaceLaw::Geometric => self.closed_form_variances(),
            FaceLaw::Table { .. } => {
                // second moments straight from the law; equal to the closed forms under symmetry
                self.support().iter().fold((0.0, 0.0), |(d, s), &(m, p)| {
                    let (dx, dy) = m.increment();
                    (d + p * ((dx - dy) * (dx - dy)) as f64, s + p * ((dx + dy) * (dx + dy)) as f64)
                })
            }
        };
        let vx = (var_sum + var_diff) / 4.0;
        let cov = (var_sum - var_diff) / 4.0;
        let norm = 1.0 - self.p0;
        if norm <= 0.0 {
            return Err(Error::Degenerate("law has no face moves".into()));
        }
        let degree_law = self
            .p_k()
            .into_iter()
            .map(|(k, p)| (k, (k - 1) as f64 * p / norm))
            .filter(|&(_, p)| p > 0.0)
            .collect();
        Ok(TheoryStats { var_diff, var_sum, covariance: [[vx, cov], [cov, vx]], degree_law })
    }

    /// The closed-form variances `4p_0 + Σ (k-2)²(k-1)p_k` and `Σ 2·C(k,3) p_k`.
    pub fn closed_form_variances(&self) -> (f64, f64) {
        let pk = self.p_k();
        let d = 4.0 * self.p0 + pk.iter().map(|(&k, &p)| ((k - 2) * (k - 2) * (k - 1)) as f64 * p).sum::<f64>();
        let s = pk.iter().map(|(&k, &p)| 2.0 * binom3(k) * p).sum::<f64>();
        (d, s)
    }
}

fn binom3(k: usize) -> f64 {
    if k < 3 {
        0.0
    } else {
        (k * (k - 1) * (k - 2)) as f64 / 6.0
    }
}
