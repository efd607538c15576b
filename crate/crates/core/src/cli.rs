//! Command-line front end. The binary only parses arguments; everything else is here
//! so that it can be driven from tests.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::bijection::{map_to_walk, reverse_moves, sew, unsew, walk_to_map, LatticeWalk, Move};
use crate::embed::{auto_embed, render_svg, upward_embed, SvgOptions};
use crate::enumeration::{
    closed_form_triangulations_by_edges, count_walks, enumerate_maps, triangulation_table, weighted_table,
};
use crate::error::{Error, Result};
use crate::map::PlanarMap;
use crate::simulate::{
    covariance_report, degree_stats, degrees_from_walk, interface_csv, interface_export, rng_for, Method, Sampler,
    DEFAULT_TRIM,
};
use crate::weights::{feasible, solve_lambda, FaceWeights, StepDistribution, DEFAULT_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verb {
    Count,
    Sample,
    Stats,
    Interface,
    Walk2map,
    Map2walk,
    Embed,
    Verify,
}

/// Everything a run needs. Also the schema of `--config` files; flags given on
/// the command line override the file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub verb: Option<Verb>,
    /// Preset name (`tri`, `quad`, `uniform`, `kgon:K`) or weights file.
    pub weights: Option<String>,
    /// File of `dx dy prob` lines giving the step law directly.
    pub nu: Option<PathBuf>,
    pub m: Option<usize>,
    pub n: Option<usize>,
    pub edges: Option<usize>,
    pub seed: Option<u64>,
    pub replicas: Option<usize>,
    pub method: Option<Method>,
    pub max_tries: Option<u64>,
    pub tol: Option<f64>,
    pub trim: Option<f64>,
    pub grid: Option<usize>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub closed_form: bool,
    pub layers_fallback: bool,
    pub quick: bool,
}

impl RunConfig {
    /// `self` with every field set in `over` replaced.
    pub fn overlay(self, over: RunConfig) -> RunConfig {
        RunConfig {
            verb: over.verb.or(self.verb),
            weights: over.weights.or(self.weights),
            nu: over.nu.or(self.nu),
            m: over.m.or(self.m),
            n: over.n.or(self.n),
            edges: over.edges.or(self.edges),
            seed: over.seed.or(self.seed),
            replicas: over.replicas.or(self.replicas),
            method: over.method.or(self.method),
            max_tries: over.max_tries.or(self.max_tries),
            tol: over.tol.or(self.tol),
            trim: over.trim.or(self.trim),
            grid: over.grid.or(self.grid),
            input: over.input.or(self.input),
            output: over.output.or(self.output),
            closed_form: over.closed_form || self.closed_form,
            layers_fallback: over.layers_fallback || self.layers_fallback,
            quick: over.quick || self.quick,
        }
    }

    pub fn from_json_file(path: &Path) -> Result<RunConfig> {
        serde_json::from_str(&fs::read_to_string(path)?).map_err(|e| Error::Usage(format!("config {}: {e}", path.display())))
    }

    fn need<T: Copy>(v: Option<T>, flag: &str) -> Result<T> {
        v.ok_or_else(|| Error::Usage(format!("--{flag} is required")))
    }

    fn seed(&self) -> Result<u64> {
        self.seed.ok_or_else(|| Error::Usage("--seed is required for random output".into()))
    }

    fn sizes(&self) -> Result<(usize, usize, usize)> {
        Ok((Self::need(self.m, "m")?, Self::need(self.n, "n")?, Self::need(self.edges, "edges")?))
    }

    fn face_weights(&self) -> Result<Option<FaceWeights>> {
        match (&self.weights, &self.nu) {
            (Some(_), Some(_)) => Err(Error::Usage("give --weights or --nu, not both".into())),
            (Some(w), None) => FaceWeights::load(w).map(Some),
            (None, Some(_)) => Ok(None),
            (None, None) => Err(Error::Usage("one of --weights or --nu is required".into())),
        }
    }

    fn distribution(&self, weights: Option<&FaceWeights>) -> Result<StepDistribution> {
        match weights {
            Some(w) => StepDistribution::from_weights_tol(w, self.tol.unwrap_or(DEFAULT_TOL)),
            None => StepDistribution::parse_direct(&fs::read_to_string(self.nu.as_ref().expect("checked"))?),
        }
    }
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "bipolar", version, about = "Bipolar-oriented planar maps and quadrant walks")]
pub struct Cli {
    /// JSON file with default settings (same field names as the flags, `in`/`out` as `input`/`output`).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub verb: Option<Command>,
}

#[derive(Args, Debug, Default)]
pub struct ModelArgs {
    /// Face weights: tri, quad, uniform, kgon:K, or a file of "k a_k" lines.
    #[arg(long)]
    pub weights: Option<String>,
    /// Step law file with "dx dy prob" lines, instead of --weights.
    #[arg(long)]
    pub nu: Option<PathBuf>,
    /// West boundary has m + 1 edges.
    #[arg(long = "m")]
    pub m: Option<usize>,
    /// East boundary has n + 1 edges.
    #[arg(long = "n")]
    pub n: Option<usize>,
    /// Number of edges ℓ.
    #[arg(long)]
    pub edges: Option<usize>,
    /// Tolerance for solving the zero-drift equation.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct DrawArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replicas: Option<usize>,
    /// exact, rejection or free.
    #[arg(long, value_parser = parse_method)]
    pub method: Option<Method>,
    /// Give up rejection sampling after this many tries.
    #[arg(long)]
    pub max_tries: Option<u64>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact number (or total weight) of maps with the given boundary and size.
    Count {
        #[command(flatten)]
        model: ModelArgs,
        /// Use the product formula (triangulations, m = 0, n = 1).
        #[arg(long)]
        closed_form: bool,
    },
    /// Random walks and their maps.
    Sample {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        draw: DrawArgs,
        /// Output prefix: writes PREFIX.walk and PREFIX.json (PREFIX.R.* for several replicas).
        #[arg(long = "out")]
        output: Option<PathBuf>,
    },
    /// Step covariance and degree statistics as JSON; a readable table goes to stderr.
    Stats {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        draw: DrawArgs,
        /// Fraction of the walk dropped at each end for degree statistics.
        #[arg(long)]
        trim: Option<f64>,
        #[arg(long = "out")]
        output: Option<PathBuf>,
    },
    /// Scaled interface functions as CSV, for a walk file or a fresh sample.
    Interface {
        #[command(flatten)]
        model: ModelArgs,
        #[command(flatten)]
        draw: DrawArgs,
        /// Number of grid points in [0, 1].
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long = "out")]
        output: Option<PathBuf>,
    },
    /// Walk text to map JSON.
    Walk2map {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long = "out")]
        output: Option<PathBuf>,
    },
    /// Map JSON to walk text.
    Map2walk {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long = "out")]
        output: Option<PathBuf>,
    },
    /// Upward straight-line SVG drawing of a map.
    Embed {
        #[arg(long = "in")]
        input: Option<PathBuf>,
        #[arg(long = "out")]
        output: Option<PathBuf>,
        /// Draw maps that are not simple triangulations with a layered layout (may cross).
        #[arg(long)]
        layers_fallback: bool,
    },
    /// Run the built-in invariant checks.
    Verify {
        /// Smaller sizes, a few seconds.
        #[arg(long)]
        quick: bool,
    },
}

impl From<Command> for RunConfig {
    fn from(cmd: Command) -> RunConfig {
        let model = |c: &mut RunConfig, a: ModelArgs| {
            c.weights = a.weights;
            c.nu = a.nu;
            c.m = a.m;
            c.n = a.n;
            c.edges = a.edges;
            c.tol = a.tol;
        };
        let draw = |c: &mut RunConfig, a: DrawArgs| {
            c.seed = a.seed;
            c.replicas = a.replicas;
            c.method = a.method;
            c.max_tries = a.max_tries;
        };
        let mut c = RunConfig::default();
        match cmd {
            Command::Count { model: a, closed_form } => {
                c.verb = Some(Verb::Count);
                model(&mut c, a);
                c.closed_form = closed_form;
            }
            Command::Sample { model: a, draw: d, output } => {
                c.verb = Some(Verb::Sample);
                model(&mut c, a);
                draw(&mut c, d);
                c.output = output;
            }
            Command::Stats { model: a, draw: d, trim, output } => {
                c.verb = Some(Verb::Stats);
                model(&mut c, a);
                draw(&mut c, d);
                c.trim = trim;
                c.output = output;
            }
            Command::Interface { model: a, draw: d, grid, input, output } => {
                c.verb = Some(Verb::Interface);
                model(&mut c, a);
                draw(&mut c, d);
                c.grid = grid;
                c.input = input;
                c.output = output;
            }
            Command::Walk2map { input, output } => {
                c.verb = Some(Verb::Walk2map);
                c.input = input;
                c.output = output;
            }
            Command::Map2walk { input, output } => {
                c.verb = Some(Verb::Map2walk);
                c.input = input;
                c.output = output;
            }
            Command::Embed { input, output, layers_fallback } => {
                c.verb = Some(Verb::Embed);
                c.input = input;
                c.output = output;
                c.layers_fallback = layers_fallback;
            }
            Command::Verify { quick } => {
                c.verb = Some(Verb::Verify);
                c.quick = quick;
            }
        }
        c
    }
}

impl Cli {
    /// The effective configuration: the `--config` file, overridden by flags.
    pub fn into_config(self) -> Result<RunConfig> {
        let base = match &self.config {
            Some(p) => RunConfig::from_json_file(p)?,
            None => RunConfig::default(),
        };
        Ok(base.overlay(self.verb.map(RunConfig::from).unwrap_or_default()))
    }
}

/// Process exit status for an error: 2 usage, 3 resource budget, 1 otherwise.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Usage(_) | Error::Json(_) => 2,
        Error::Resource { .. } => 3,
        _ => 1,
    }
}

fn read_input(path: Option<&Path>) -> Result<String> {
    match path {
        Some(p) if p != Path::new("-") => Ok(fs::read_to_string(p)?),
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s)?;
            Ok(s)
        }
    }
}

fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => fs::write(p, text)?,
        _ => out.write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Runs one verb; data goes to `out` (or the configured output file), diagnostics to stderr.
pub fn run(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let verb = cfg.verb.ok_or_else(|| Error::Usage("no verb given (see --help)".into()))?;
    match verb {
        Verb::Count => run_count(cfg, out),
        Verb::Sample => run_sample(cfg, out),
        Verb::Stats => run_stats(cfg, out),
        Verb::Interface => run_interface(cfg, out),
        Verb::Walk2map => {
            let walk = LatticeWalk::parse(&read_input(cfg.input.as_deref())?)?;
            emit(cfg.output.as_deref(), &walk_to_map(&walk)?.to_json(), out)
        }
        Verb::Map2walk => {
            let map = PlanarMap::from_json(&read_input(cfg.input.as_deref())?)?;
            emit(cfg.output.as_deref(), &map_to_walk(&map)?.to_text(), out)
        }
        Verb::Embed => {
            let map = PlanarMap::from_json(&read_input(cfg.input.as_deref())?)?;
            let emb = auto_embed(&map, cfg.layers_fallback)?;
            match &emb.warning {
                Some(w) => eprintln!("warning: {w}"),
                None => eprintln!("max coordinate bit length: {}", emb.max_coordinate_bits()),
            }
            emit(cfg.output.as_deref(), &render_svg(&map, &emb, &SvgOptions::default())?, out)
        }
        Verb::Verify => {
            let results = verify_suite(cfg.quick);
            let mut failed = 0;
            for r in &results {
                writeln!(out, "{} {:<32} {:>8.2}s  {}", if r.pass { "ok  " } else { "FAIL" }, r.name, r.seconds, r.detail)?;
                failed += usize::from(!r.pass);
            }
            if failed > 0 {
                return Err(Error::Internal(format!("{failed} of {} checks failed", results.len())));
            }
            Ok(())
        }
    }
}

fn check_feasible(weights: Option<&FaceWeights>, dist: &StepDistribution, m: usize, n: usize, edges: usize) -> Result<()> {
    let f = match weights {
        Some(w) => feasible(w, m, n, edges)?,
        None => dist.feasible(m, n, edges),
    };
    if f.pass {
        Ok(())
    } else {
        Err(Error::Infeasible(f.reason))
    }
}

fn run_count(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let (m, n, edges) = cfg.sizes()?;
    let weights = cfg.face_weights()?.ok_or_else(|| Error::Usage("count needs --weights".into()))?;
    let f = feasible(&weights, m, n, edges)?;
    if !f.pass {
        return Err(Error::Infeasible(f.reason));
    }
    if cfg.closed_form {
        if weights != FaceWeights::triangulations() || (m, n) != (0, 1) {
            return Err(Error::Usage("--closed-form applies to --weights tri with --m 0 --n 1".into()));
        }
        writeln!(out, "{}", closed_form_triangulations_by_edges(edges))?;
        return Ok(());
    }
    if weights == FaceWeights::triangulations() {
        writeln!(out, "{}", triangulation_table(m, n, edges)?.count())?;
    } else {
        writeln!(out, "{}", weighted_table(&weights, m, n, edges)?.count())?;
    }
    Ok(())
}

fn sampler(cfg: &RunConfig, default_method: Method) -> Result<(Sampler, Option<FaceWeights>)> {
    let (m, n, edges) = cfg.sizes()?;
    let weights = cfg.face_weights()?;
    let dist = cfg.distribution(weights.as_ref())?;
    let method = cfg.method.unwrap_or(default_method);
    if method != Method::Free {
        check_feasible(weights.as_ref(), &dist, m, n, edges)?;
    }
    let mut s = Sampler::new(weights.as_ref(), dist, m, n, edges, method)?;
    if let Some(t) = cfg.max_tries {
        s = s.with_max_tries(t);
    }
    Ok((s, weights))
}

fn run_sample(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let seed = cfg.seed()?;
    let replicas = cfg.replicas.unwrap_or(1);
    let (s, _) = sampler(cfg, Method::Exact)?;
    let walks = s.draw_replicas(seed, replicas)?;
    let prefix = cfg.output.as_deref().filter(|p| *p != Path::new("-"));
    for (r, walk) in walks.iter().enumerate() {
        let closed = walk.is_closed_code();
        match prefix {
            Some(p) => {
                let stem = if replicas == 1 { p.display().to_string() } else { format!("{}.{r}", p.display()) };
                fs::write(format!("{stem}.walk"), walk.to_text())?;
                if closed {
                    fs::write(format!("{stem}.json"), walk_to_map(walk)?.to_json())?;
                }
            }
            None => {
                if replicas > 1 {
                    writeln!(out, "# replica {r}")?;
                }
                out.write_all(walk.to_text().as_bytes())?;
            }
        }
    }
    Ok(())
}

fn run_stats(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let seed = cfg.seed()?;
    let (s, _) = sampler(cfg, Method::Free)?;
    let walks = s.draw_replicas(seed, cfg.replicas.unwrap_or(1))?;
    let theory = s.distribution().theory_stats().ok();
    let mut report = covariance_report(&walks, theory.as_ref(), seed)?;
    if s.distribution().face_degrees() == [3] && walks.iter().all(|w| w.is_closed_code()) {
        let traces = walks.iter().map(|w| Ok((degrees_from_walk(w)?, w.len()))).collect::<Result<Vec<_>>>()?;
        report.degrees = degree_stats(&traces, cfg.trim.unwrap_or(DEFAULT_TRIM)).ok();
    }
    eprint!("{report}");
    emit(cfg.output.as_deref(), &(serde_json::to_string_pretty(&report)? + "\n"), out)
}

fn run_interface(cfg: &RunConfig, out: &mut dyn Write) -> Result<()> {
    let walk = match &cfg.input {
        Some(p) => LatticeWalk::parse(&read_input(Some(p))?)?,
        None => {
            let seed = cfg.seed()?;
            let (s, _) = sampler(cfg, Method::Exact)?;
            s.draw(&mut rng_for(seed, 0))?
        }
    };
    let rows = interface_export(&walk, cfg.grid.unwrap_or(101));
    emit(cfg.output.as_deref(), &interface_csv(&rows), out)
}

/// One named invariant check.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

fn timed(name: &str, f: impl FnOnce() -> Result<String>) -> CheckResult {
    let t = Instant::now();
    let (pass, detail) = match f() {
        Ok(d) => (true, d),
        Err(e) => (false, e.to_string()),
    };
    CheckResult { name: name.into(), pass, detail, seconds: t.elapsed().as_secs_f64() }
}

fn fail(msg: String) -> Error {
    Error::Internal(msg)
}

fn small_triangulations(max_edges: usize) -> Result<Vec<PlanarMap>> {
    let mut maps = Vec::new();
    for edges in 1..=max_edges {
        for m in 0..=2 {
            for n in 0..=2 {
                maps.extend(enumerate_maps(&triangulation_table(m, n, edges)?));
            }
        }
    }
    Ok(maps)
}

/// Round trips, enumeration against the product formula, drift and variance
/// identities, frontier degrees and embedding post-checks.
pub fn verify_suite(quick: bool) -> Vec<CheckResult> {
    let max_edges = if quick { 7 } else { 9 };
    let mut results = Vec::new();

    results.push(timed("counts = product formula", || {
        let top = if quick { 12 } else { 18 };
        let tri = [Move::Edge, Move::Face(1, 0), Move::Face(0, 1)];
        for edges in (3..=top).step_by(3) {
            let dp = count_walks(&tri, (0, 0), (1, 0), edges - 1)?;
            if dp != closed_form_triangulations_by_edges(edges) {
                return Err(fail(format!("ℓ = {edges}: table gives {dp}")));
            }
        }
        Ok(format!("ℓ = 3..{top}"))
    }));

    results.push(timed("unsew after sew", || {
        use rand::Rng;
        let mut rng = rng_for(7, 0);
        let runs = if quick { 500 } else { 10_000 };
        for k in 0..runs {
            let len = rng.gen_range(1..=200);
            let moves: Vec<Move> = (0..len)
                .map(|_| if rng.gen_bool(0.5) { Move::Edge } else { Move::Face(rng.gen_range(0..3), rng.gen_range(0..3)) })
                .collect();
            if unsew(&sew(&moves))? != moves {
                return Err(fail(format!("sequence {k} differs after unsewing")));
            }
            if reverse_moves(&reverse_moves(&moves)) != moves {
                return Err(fail(format!("sequence {k}: reversal is not an involution")));
            }
        }
        Ok(format!("{runs} sequences"))
    }));

    let maps = small_triangulations(max_edges);
    results.push(timed("walk ↔ map ↔ JSON", || {
        let maps = maps.as_ref().map_err(|e| fail(e.to_string()))?;
        for map in maps {
            let walk = map_to_walk(map)?;
            if walk_to_map(&walk)?.canonical_form() != map.canonical_form() {
                return Err(fail(format!("map of walk\n{}differs", walk.to_text())));
            }
            if PlanarMap::from_json(&map.to_json())?.canonical_form() != map.canonical_form() {
                return Err(fail("JSON round trip changed a map".into()));
            }
        }
        Ok(format!("{} maps, ℓ ≤ {max_edges}", maps.len()))
    }));

    results.push(timed("duals", || {
        let maps = maps.as_ref().map_err(|e| fail(e.to_string()))?;
        for map in maps {
            let d = map.dual_map()?;
            d.ensure_valid()?;
            if d.dual_map()?.reversed().canonical_form() != map.canonical_form() {
                return Err(fail("double dual is not the reversed map".into()));
            }
        }
        Ok(format!("{} maps", maps.len()))
    }));

    results.push(timed("frontier degrees", || {
        let maps = maps.as_ref().map_err(|e| fail(e.to_string()))?;
        for map in maps {
            let walk = map_to_walk(map)?;
            let sewn = walk_to_map(&walk)?;
            let tr = degrees_from_walk(&walk)?;
            for v in 0..sewn.num_vertices() {
                if tr.in_degree[v] != sewn.in_degree(v) || tr.out_degree[v] != sewn.out_degree(v) {
                    return Err(fail(format!("v{v} of\n{}", walk.to_text())));
                }
            }
        }
        Ok(format!("{} walks", maps.len()))
    }));

    results.push(timed("drift and variance ratio", || {
        let mut worst: f64 = 0.0;
        for name in ["tri", "quad", "uniform", "kgon:5"] {
            let dist = StepDistribution::from_weights(&FaceWeights::load(name)?)?;
            let (dx, dy) = dist.drift();
            let t = dist.theory_stats()?;
            let gap = (t.var_diff - 3.0 * t.var_sum).abs();
            if dx.abs() > 1e-9 || dy.abs() > 1e-9 || gap > 1e-9 {
                return Err(fail(format!("{name}: drift ({dx}, {dy}), Var[X-Y] - 3 Var[X+Y] = {gap}")));
            }
            worst = worst.max(gap);
        }
        let lam = solve_lambda(&FaceWeights::Uniform, 1e-13)?;
        if (lam - 0.5).abs() > 1e-9 {
            return Err(fail(format!("uniform λ = {lam}")));
        }
        Ok(format!("max identity gap {worst:.1e}"))
    }));

    results.push(timed("feasibility never contradicted", || {
        let top = if quick { 9 } else { 12 };
        for name in ["tri", "quad"] {
            let w = FaceWeights::load(name)?;
            for m in 0..=3 {
                for n in 0..=3 {
                    for edges in 1..=top {
                        let c = weighted_table(&w, m, n, edges)?.count();
                        if !c.is_zero() && !feasible(&w, m, n, edges)?.pass {
                            return Err(fail(format!("{name} ({m}, {n}, {edges}) has maps but fails the conditions")));
                        }
                    }
                }
            }
        }
        Ok(format!("tri, quad; m, n ≤ 3; ℓ ≤ {top}"))
    }));

    results.push(timed("embedding post-checks", || {
        let maps = maps.as_ref().map_err(|e| fail(e.to_string()))?;
        let mut drawn = 0;
        for map in maps.iter().filter(|m| m.is_simple()) {
            upward_embed(map)?;
            drawn += 1;
        }
        Ok(format!("{drawn} simple triangulations"))
    }));

    results
}
