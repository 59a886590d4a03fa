//! Seeded, parallel Monte Carlo campaigns.
//!
//! Every campaign derives trial `i`'s random stream from
//! `(master_seed, i)` alone and merges results in trial order, so aggregates
//! are bit-identical for any worker count.

use std::io::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphgen::{
    blue_cycle_lengths, gen_hamilton_union, gen_regular, gen_twofactor_union, gen_union, Color,
    ColoredGraph,
};
use crate::seeding::{splitmix64, trial_rng, trial_seed};
use crate::theory::{self, theta_flip, CoverConstant, Model};
use crate::walks::{
    default_phase_length, default_step_cap, step, CoverResult, CoverStatus, StepMode, WalkPolicy,
    Walker,
};

/// Random graph ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum GraphModel {
    /// Uncolored `d`-regular graph; all edges are stored red.
    Regular { n: usize, d: usize },
    Union { n: usize, r: usize, b: usize },
    /// Red `r`-regular graph over a blue Hamilton cycle.
    Hamilton { n: usize, r: usize },
    /// Red `r`-regular graph over a blue random 2-factor.
    TwoFactor { n: usize, r: usize },
}

impl GraphModel {
    pub fn n(&self) -> usize {
        match *self {
            GraphModel::Regular { n, .. }
            | GraphModel::Union { n, .. }
            | GraphModel::Hamilton { n, .. }
            | GraphModel::TwoFactor { n, .. } => n,
        }
    }

    pub fn red_degree(&self) -> usize {
        match *self {
            GraphModel::Regular { d, .. } => d,
            GraphModel::Union { r, .. } | GraphModel::Hamilton { r, .. } | GraphModel::TwoFactor { r, .. } => r,
        }
    }

    pub fn blue_degree(&self) -> usize {
        match *self {
            GraphModel::Regular { .. } => 0,
            GraphModel::Union { b, .. } => b,
            GraphModel::Hamilton { .. } | GraphModel::TwoFactor { .. } => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GraphModel::Regular { .. } => "regular",
            GraphModel::Union { .. } => "union",
            GraphModel::Hamilton { .. } => "hamilton",
            GraphModel::TwoFactor { .. } => "twofactor",
        }
    }

    pub fn generate(&self, seed: u64) -> Result<ColoredGraph> {
        match *self {
            GraphModel::Regular { n, d } => Ok(gen_regular(n, d, seed)?.into_colored(Color::Red)),
            GraphModel::Union { n, r, b } => gen_union(n, r, b, seed),
            GraphModel::Hamilton { n, r } => gen_hamilton_union(n, r, seed),
            GraphModel::TwoFactor { n, r } => gen_twofactor_union(n, r, seed),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphSpec {
    #[serde(flatten)]
    pub model: GraphModel,
    pub seed: u64,
}

/// `n·ln n`.
pub fn n_log_n(n: usize) -> f64 {
    let n = n as f64;
    n * n.ln()
}

/// Red-use budget for an oblivious walk whose all-edge phase should last
/// about `frac·σ_RB·n·ln n` steps: `frac·σ_RB·n·ln n·r/(r+b)`, rounded.
pub fn oblivious_budget(frac: f64, r: usize, b: usize, n: usize) -> Result<u64> {
    if !(frac >= 0.0 && frac.is_finite()) {
        return Err(Error::param(format!("budget fraction must be non-negative (got {frac})")));
    }
    let share = r as f64 / (r + b) as f64;
    Ok((frac * theory::sigma_rb(r, b)? * share * n_log_n(n)).round() as u64)
}

/// Smooth policy with the default phase length and the red budget
/// `⌈γ(α)·n·ln n⌉`.
pub fn smooth_policy(alpha: f64, r: usize, b: usize, n: usize) -> Result<WalkPolicy> {
    let gamma = theory::gamma_budget(alpha, r, b)?;
    Ok(WalkPolicy::Smooth {
        alpha,
        phase_length: default_phase_length(n),
        budget: (gamma * n_log_n(n)).ceil() as u64,
    })
}

/// Theory model matching a graph ensemble and policy, if there is one.
pub fn theory_model(graph: &GraphModel, policy: &WalkPolicy) -> Option<Model> {
    let n = graph.n();
    let (r, b) = (graph.red_degree(), graph.blue_degree());
    match (graph, policy) {
        (GraphModel::Regular { d, .. }, WalkPolicy::Simple) => Some(Model::Simple { r: 0, b: *d }),
        (GraphModel::Hamilton { .. } | GraphModel::TwoFactor { .. } | GraphModel::Union { .. }, WalkPolicy::Simple) => {
            Some(Model::Simple { r, b })
        }
        (GraphModel::Union { .. }, &WalkPolicy::Flip { rho_r, rho_b }) => Some(Model::Flip { r, b, rho_r, rho_b }),
        (GraphModel::Union { .. }, &WalkPolicy::Smooth { alpha, .. }) if b >= 3 => Some(Model::Smooth { alpha, r, b }),
        (GraphModel::Hamilton { .. }, &WalkPolicy::Congestion { peak, off_peak }) => {
            Some(Model::Congestion { peak, off_peak, r })
        }
        (_, &WalkPolicy::Oblivious { budget }) => {
            let unit = oblivious_budget(1.0, r, b, n).ok()?;
            let budget_frac = if unit == 0 { 0.0 } else { budget as f64 / unit as f64 };
            match graph {
                GraphModel::Union { .. } if b >= 3 => Some(Model::ObliviousUnion { r, b, budget_frac }),
                GraphModel::Hamilton { .. } => Some(Model::ObliviousHamilton { r, budget_frac }),
                GraphModel::TwoFactor { .. } => Some(Model::ObliviousTwoFactor { r, budget_frac }),
                _ => None,
            }
        }
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub graph: GraphSpec,
    pub policy: WalkPolicy,
    pub trials: usize,
    pub master_seed: u64,
    /// Defaults to `100·n²`.
    pub step_cap: Option<u64>,
    /// Sorted step counts at which to record the number of unvisited vertices.
    pub checkpoints: Vec<u64>,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
    /// Keep the unvisited vertices of failed trials.
    pub record_unvisited: bool,
}

impl ExperimentConfig {
    pub fn new(graph: GraphSpec, policy: WalkPolicy, trials: usize, master_seed: u64) -> Self {
        ExperimentConfig {
            graph,
            policy,
            trials,
            master_seed,
            step_cap: None,
            checkpoints: Vec::new(),
            threads: None,
            record_unvisited: false,
        }
    }

    pub fn resolved_step_cap(&self) -> u64 {
        self.step_cap.unwrap_or_else(|| default_step_cap(self.graph.model.n()))
    }

    fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::param("trials must be at least 1"));
        }
        if self.step_cap == Some(0) {
            return Err(Error::param("step_cap must be at least 1"));
        }
        if self.threads == Some(0) {
            return Err(Error::param("threads must be at least 1"));
        }
        if self.checkpoints.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::param("checkpoints must be sorted"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    pub result: CoverResult,
    /// Unvisited counts at each checkpoint.
    pub unvisited_at: Vec<usize>,
    /// Final position, for failed trials when requested.
    pub final_vertex: Option<usize>,
    /// Unvisited vertices, for failed trials when requested.
    pub unvisited: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub std: f64,
    pub stderr: f64,
    pub min: f64,
    pub max: f64,
    pub q10: f64,
    pub median: f64,
    pub q90: f64,
}

/// Linear-interpolation quantile of sorted data.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

impl Summary {
    /// Sample statistics; `None` for empty input. `std` uses the `n-1`
    /// denominator and is 0 for a single value.
    pub fn of(values: &[f64]) -> Option<Summary> {
        if values.is_empty() {
            return None;
        }
        let count = values.len();
        let mean = values.iter().sum::<f64>() / count as f64;
        let std = if count > 1 {
            (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (count - 1) as f64).sqrt()
        } else {
            0.0
        };
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Some(Summary {
            count,
            mean,
            std,
            stderr: std / (count as f64).sqrt(),
            min: sorted[0],
            max: sorted[count - 1],
            q10: quantile(&sorted, 0.1),
            median: quantile(&sorted, 0.5),
            q90: quantile(&sorted, 0.9),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub n: usize,
    pub r: usize,
    pub b: usize,
    pub step_cap: u64,
    pub trials: Vec<TrialRecord>,
    /// Cover-time statistics over covered trials.
    pub cover: Option<Summary>,
    pub red_uses: Option<Summary>,
    pub completed: usize,
    pub failures: usize,
    /// Mean cover time over `n·ln n`.
    pub normalized: Option<f64>,
    pub theory: Option<CoverConstant>,
    /// `(mean cover - predicted)/predicted`.
    pub deviation: Option<f64>,
}

fn with_pool<T: Send>(threads: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(job()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| Error::Experiment(format!("cannot start worker pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

fn run_trial(cfg: &ExperimentConfig, g: &ColoredGraph, step_cap: u64, trial: usize) -> Result<TrialRecord> {
    let seed = trial_seed(cfg.master_seed, trial as u64);
    let mut rng = trial_rng(cfg.master_seed, trial as u64);
    let start = rng.random_range(0..g.n());
    let mut walker = Walker::new(g, cfg.policy.clone(), start, step_cap)?;
    let mut unvisited_at = Vec::with_capacity(cfg.checkpoints.len());
    for &t in &cfg.checkpoints {
        walker.run_until(t, &mut rng);
        unvisited_at.push(walker.unvisited());
    }
    let result = walker.run(&mut rng);
    let failed = result.status() == CoverStatus::Failed;
    let (final_vertex, unvisited) = if failed && cfg.record_unvisited {
        let missing = walker
            .visited()
            .iter()
            .enumerate()
            .filter(|&(_, &seen)| !seen)
            .map(|(v, _)| v as u32)
            .collect();
        (Some(walker.position()), Some(missing))
    } else {
        (None, None)
    };
    Ok(TrialRecord { trial, seed, result, unvisited_at, final_vertex, unvisited })
}

/// Estimates the cover time of `cfg.policy` on one graph drawn from
/// `cfg.graph`. Each trial starts at a vertex drawn from its own stream.
pub fn estimate_cover(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let g = cfg.graph.model.generate(cfg.graph.seed).map_err(|e| match e {
        Error::Generation(m) => Error::Experiment(format!("graph generation: {m}")),
        other => other,
    })?;
    estimate_cover_on(cfg, &g)
}

/// [`estimate_cover`] on a given graph; `cfg.graph` only labels the output.
pub fn estimate_cover_on(cfg: &ExperimentConfig, g: &ColoredGraph) -> Result<ExperimentResult> {
    cfg.validate()?;
    if !g.is_connected() {
        return Err(Error::Experiment("graph is disconnected".into()));
    }
    cfg.policy.validate(g)?;
    let step_cap = cfg.resolved_step_cap();
    let trials = with_pool(cfg.threads, || {
        (0..cfg.trials)
            .into_par_iter()
            .map(|i| run_trial(cfg, g, step_cap, i))
            .collect::<Result<Vec<_>>>()
    })??;
    Ok(summarize(cfg.clone(), g, step_cap, trials))
}

fn summarize(config: ExperimentConfig, g: &ColoredGraph, step_cap: u64, trials: Vec<TrialRecord>) -> ExperimentResult {
    let n = g.n();
    let covers: Vec<f64> = trials.iter().filter_map(|t| t.result.cover_time).map(|c| c as f64).collect();
    let reds: Vec<f64> = trials.iter().map(|t| t.result.red_uses as f64).collect();
    let cover = Summary::of(&covers);
    let completed = covers.len();
    let failures = trials.len() - completed;
    let normalized = cover.map(|s| s.mean / n_log_n(n));
    let theory = theory_model(&config.graph.model, &config.policy).and_then(|m| theory::predict(&m, n).ok());
    let deviation = match (cover, theory.as_ref().and_then(|t| t.predicted_cover())) {
        (Some(s), Some(p)) => Some((s.mean - p) / p),
        _ => None,
    };
    ExperimentResult {
        config,
        n,
        r: g.red_degree(),
        b: g.blue_degree(),
        step_cap,
        trials,
        cover,
        red_uses: Summary::of(&reds),
        completed,
        failures,
        normalized,
        theory,
        deviation,
    }
}

fn check_vertex(g: &ColoredGraph, v: usize) -> Result<()> {
    if v >= g.n() {
        return Err(Error::param(format!("vertex {v} outside [0, {})", g.n())));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReturnEstimate {
    pub vertex: usize,
    /// Mean number of visits to the vertex in `[0, horizon]`, counting time 0.
    pub mean: f64,
    pub stderr: f64,
    pub trials: usize,
}

/// Mean visits of a simple walk started at `v` to `v` itself during
/// `[0, horizon]`, for each `v` in `vertices`.
pub fn estimate_returns(
    g: &ColoredGraph,
    vertices: &[usize],
    horizon: u64,
    trials: usize,
    master_seed: u64,
) -> Result<Vec<ReturnEstimate>> {
    if trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    for &v in vertices {
        check_vertex(g, v)?;
    }
    Ok(vertices
        .par_iter()
        .enumerate()
        .map(|(k, &v)| {
            let mut rng = trial_rng(master_seed, k as u64);
            let counts: Vec<f64> = (0..trials)
                .map(|_| {
                    let (mut pos, mut visits) = (v, 1u64);
                    for _ in 0..horizon {
                        pos = step(g, pos, StepMode::AllEdges, &mut rng).0;
                        visits += (pos == v) as u64;
                    }
                    visits as f64
                })
                .collect();
            let s = Summary::of(&counts).expect("trials ≥ 1");
            ReturnEstimate { vertex: v, mean: s.mean, stderr: s.stderr, trials }
        })
        .collect())
}

/// Transition probabilities of the simple walk applied to a row vector:
/// `(μP)(u) = Σ_w μ(w)·m(w,u)/d`, counting parallel edges with multiplicity.
fn push_forward(g: &ColoredGraph, mu: &[f64], out: &mut [f64]) {
    let d = g.degree() as f64;
    out.iter_mut().for_each(|x| *x = 0.0);
    for (w, &m) in mu.iter().enumerate() {
        if m != 0.0 {
            let share = m / d;
            for &u in g.neighbors(w) {
                out[u as usize] += share;
            }
        }
    }
}

/// `Σ_{t=0}^{horizon} (P^t(v,v) - π_v)`, the expected visits to `v` in excess
/// of the stationary rate. Tends to the fundamental-matrix entry `Z_vv` as
/// the horizon grows.
pub fn excess_returns(g: &ColoredGraph, v: usize, horizon: u64) -> Result<f64> {
    check_vertex(g, v)?;
    let pi = 1.0 / g.n() as f64;
    let mut mu = vec![0.0; g.n()];
    let mut next = vec![0.0; g.n()];
    mu[v] = 1.0;
    let mut total = 1.0 - pi;
    for _ in 0..horizon {
        push_forward(g, &mu, &mut next);
        std::mem::swap(&mut mu, &mut next);
        total += mu[v] - pi;
    }
    Ok(total)
}

/// Operational mixing horizon `⌈10·ln n⌉`.
pub fn t_mix(n: usize) -> u64 {
    (10.0 * (n as f64).ln()).ceil() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonvisitPoint {
    pub t: u64,
    /// Fraction of trials in which `v` was not visited during `[T_mix, t]`.
    pub empirical: f64,
    pub stderr: f64,
    /// `(1+p_v)^(-t)`.
    pub predicted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonvisitCurve {
    pub vertex: usize,
    pub t_mix: u64,
    pub p_v: f64,
    pub r_v: f64,
    pub locally_tree_like: bool,
    pub trials: usize,
    pub points: Vec<NonvisitPoint>,
}

/// Empirical probability that a simple walk from a uniform start leaves `v`
/// unvisited during `[T_mix, t]`, against the predictor `(1+p_v)^(-t)` with
/// `p_v = π_v/r_v`. `r_v` defaults to the tree value `(d-1)/(d-2)`.
pub fn nonvisit_curve(
    g: &ColoredGraph,
    v: usize,
    t_grid: &[u64],
    trials: usize,
    r_v: Option<f64>,
    master_seed: u64,
) -> Result<NonvisitCurve> {
    check_vertex(g, v)?;
    if trials == 0 {
        return Err(Error::param("trials must be at least 1"));
    }
    if t_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::param("t grid must be sorted"));
    }
    let n = g.n();
    let tm = t_mix(n);
    if let Some(&t) = t_grid.first() {
        if t < tm {
            return Err(Error::param(format!("t grid must start at or after T_mix = {tm}")));
        }
    }
    let r_v = match r_v {
        Some(x) => x,
        None => theory::returns_tree(g.degree())?,
    };
    let p_v = theory::p_v(1.0 / n as f64, r_v)?;
    let tree_like = crate::graphgen::locally_tree_like(g, crate::graphgen::sigma_for(n))[v];
    let t_max = t_grid.last().copied().unwrap_or(tm);
    // For each trial, the first visit to v at or after T_mix (or None).
    let first_hits: Vec<Option<u64>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(master_seed, i as u64);
            let mut pos = rng.random_range(0..n);
            for t in 1..=t_max {
                pos = step(g, pos, StepMode::AllEdges, &mut rng).0;
                if t >= tm && pos == v {
                    return Some(t);
                }
            }
            if tm == 0 && pos == v {
                return Some(0);
            }
            None
        })
        .collect();
    let mut points = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let missed = first_hits.iter().filter(|h| h.is_none_or(|s| s > t)).count();
        let p = missed as f64 / trials as f64;
        points.push(NonvisitPoint {
            t,
            empirical: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            predicted: theory::nonvisit_prob(p_v, t as f64)?,
        });
    }
    Ok(NonvisitCurve { vertex: v, t_mix: tm, p_v, r_v, locally_tree_like: tree_like, trials, points })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoFactorSample {
    pub seed: u64,
    pub cycle_count: usize,
    pub largest: usize,
    pub second_largest: usize,
    /// Cycles of length at least `n/ln²n`.
    pub long_cycles: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoFactorStats {
    pub n: usize,
    /// `n/ln²n`.
    pub long_threshold: f64,
    /// `3·log₂ n`.
    pub count_bound: f64,
    pub samples: Vec<TwoFactorSample>,
    /// Fraction of samples with at least two long cycles.
    pub frac_two_long: f64,
    /// Fraction of samples whose cycle count is at most `count_bound`.
    pub frac_within_bound: f64,
    pub mean_cycle_count: f64,
}

/// Cycle statistics of random 2-factors on `n` vertices drawn from the
/// configuration model.
pub fn twofactor_stats(n: usize, samples: usize, seed: u64) -> Result<TwoFactorStats> {
    if n < 3 {
        return Err(Error::param(format!("n ≥ 3 required (n={n})")));
    }
    if samples == 0 {
        return Err(Error::param("samples must be at least 1"));
    }
    let ln = (n as f64).ln();
    let long_threshold = n as f64 / (ln * ln);
    let count_bound = 3.0 * (n as f64).log2();
    let samples = (0..samples)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(seed, i as u64);
            let g = gen_regular(n, 2, s)?.into_colored(Color::Blue);
            let lengths = blue_cycle_lengths(&g).expect("2-regular blue graph");
            Ok(TwoFactorSample {
                seed: s,
                cycle_count: lengths.len(),
                largest: lengths[0],
                second_largest: lengths.get(1).copied().unwrap_or(0),
                long_cycles: lengths.iter().filter(|&&l| l as f64 >= long_threshold).count(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let m = samples.len() as f64;
    Ok(TwoFactorStats {
        n,
        long_threshold,
        count_bound,
        frac_two_long: samples.iter().filter(|s| s.long_cycles >= 2).count() as f64 / m,
        frac_within_bound: samples.iter().filter(|s| s.cycle_count as f64 <= count_bound).count() as f64 / m,
        mean_cycle_count: samples.iter().map(|s| s.cycle_count as f64).sum::<f64>() / m,
        samples,
    })
}

/// One row of the aggregate CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AggregateRow {
    pub q_or_alpha: f64,
    pub theory_theta: f64,
    pub empirical_theta: f64,
    pub stderr: f64,
    pub trials: usize,
    pub n: usize,
}

impl AggregateRow {
    /// `(empirical - theory)/theory`.
    pub fn deviation(&self) -> f64 {
        (self.empirical_theta - self.theory_theta) / self.theory_theta
    }
}

/// Smallest `n` accepted by [`theta_sweep`].
pub const SWEEP_MIN_N: usize = 10_000;

/// Empirical flip-walk constant `θ(q)` for `rho_r = 1-q`, `rho_b = q/2` on
/// one `r = 1, b = 2` union graph drawn from `seed`.
pub fn theta_sweep(
    q_grid: &[f64],
    n: usize,
    trials: usize,
    seed: u64,
    threads: Option<usize>,
) -> Result<Vec<AggregateRow>> {
    if n < SWEEP_MIN_N {
        return Err(Error::param(format!("theta sweep needs n ≥ {SWEEP_MIN_N} (n={n})")));
    }
    if let Some(q) = q_grid.iter().find(|q| !(**q > 0.0 && **q < 1.0)) {
        return Err(Error::param(format!("q must lie in (0, 1) (q={q})")));
    }
    let graph = GraphSpec { model: GraphModel::Union { n, r: 1, b: 2 }, seed };
    let g = graph.model.generate(seed)?;
    let scale = n_log_n(n);
    q_grid
        .iter()
        .enumerate()
        .map(|(k, &q)| {
            let policy = WalkPolicy::Flip { rho_r: 1.0 - q, rho_b: q / 2.0 };
            let mut cfg = ExperimentConfig::new(graph, policy, trials, splitmix64(seed.wrapping_add(k as u64 + 1)));
            cfg.threads = threads;
            let res = estimate_cover_on(&cfg, &g)?;
            let cover = res.cover.ok_or_else(|| Error::Experiment(format!("no trial covered at q={q}")))?;
            Ok(AggregateRow {
                q_or_alpha: q,
                theory_theta: theta_flip(q)?,
                empirical_theta: cover.mean / scale,
                stderr: cover.stderr / scale,
                trials: cover.count,
                n,
            })
        })
        .collect()
}

/// Writes one row per trial:
/// `trial,seed,n,r,b,policy,param_json,cover_time,red_uses,status`.
pub fn write_trials_csv<W: Write>(res: &ExperimentResult, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["trial", "seed", "n", "r", "b", "policy", "param_json", "cover_time", "red_uses", "status"])?;
    let params = res.config.policy.params_json();
    let policy = res.config.policy.name();
    for t in &res.trials {
        let status = match t.result.status() {
            CoverStatus::Covered => "COVERED",
            CoverStatus::Failed => "FAILED",
        };
        w.write_record([
            t.trial.to_string(),
            t.seed.to_string(),
            res.n.to_string(),
            res.r.to_string(),
            res.b.to_string(),
            policy.to_string(),
            params.clone(),
            t.result.cover_time.map(|c| c.to_string()).unwrap_or_default(),
            t.result.red_uses.to_string(),
            status.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `q_or_alpha,theory_theta,empirical_theta,stderr,trials,n`.
pub fn write_aggregate_csv<W: Write>(rows: &[AggregateRow], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record(["q_or_alpha", "theory_theta", "empirical_theta", "stderr", "trials", "n"])?;
    }
    w.flush()?;
    Ok(())
}
