use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use budgetwalk::experiments::{
    estimate_cover, estimate_cover_on, oblivious_budget, smooth_policy, theta_sweep, write_aggregate_csv,
    write_trials_csv, ExperimentConfig, ExperimentResult, GraphModel, GraphSpec,
};
use budgetwalk::graphgen::{analyze_structure, read_graph, write_graph};
use budgetwalk::theory::{self, Model};
use budgetwalk::walks::default_phase_length;
use budgetwalk::{ColoredGraph, Error, Result, WalkPolicy};

#[derive(Parser)]
#[command(name = "budgetwalk", version, about = "Budget-constrained random walks on red/blue random regular graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a graph and write it as an edge list.
    Gen(GenArgs),
    /// Cover-time constants and return-probability solutions.
    #[command(subcommand)]
    Theory(TheoryCommand),
    /// One cover-time trajectory on a graph file.
    Run(RunArgs),
    /// A Monte Carlo campaign on a freshly sampled graph.
    Experiment(ExperimentArgs),
    /// Structure report of a graph file.
    Analyze(AnalyzeArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModelName {
    Regular,
    Union,
    Hamilton,
    Twofactor,
}

#[derive(Args)]
struct GraphArgs {
    #[arg(long, value_enum)]
    model: ModelName,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 1)]
    r: usize,
    /// Blue degree (union only).
    #[arg(long, default_value_t = 2)]
    b: usize,
    /// Degree (regular only).
    #[arg(long, default_value_t = 3)]
    d: usize,
}

impl GraphArgs {
    fn model(&self) -> GraphModel {
        let (n, r) = (self.n, self.r);
        match self.model {
            ModelName::Regular => GraphModel::Regular { n, d: self.d },
            ModelName::Union => GraphModel::Union { n, r, b: self.b },
            ModelName::Hamilton => GraphModel::Hamilton { n, r },
            ModelName::Twofactor => GraphModel::TwoFactor { n, r },
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout if absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PolicyName {
    Simple,
    Oblivious,
    Flip,
    Smooth,
    Congestion,
}

#[derive(Args)]
struct PolicyArgs {
    #[arg(long, value_enum, default_value = "simple")]
    policy: PolicyName,
    /// Absolute red-use budget (oblivious, smooth).
    #[arg(long, conflicts_with = "budget_frac")]
    budget: Option<u64>,
    /// Oblivious budget as a fraction of σ_RB·n·ln n steps.
    #[arg(long)]
    budget_frac: Option<f64>,
    #[arg(long)]
    rho_r: Option<f64>,
    #[arg(long)]
    rho_b: Option<f64>,
    /// Flip walk with red mass 1-q and blue mass q.
    #[arg(long, conflicts_with_all = ["rho_r", "rho_b"])]
    q: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    phase_length: Option<u64>,
    /// Blue-only peak period C.
    #[arg(long)]
    peak: Option<u64>,
    /// All-edge off-peak period F.
    #[arg(long)]
    off_peak: Option<u64>,
}

fn required<T>(value: Option<T>, flag: &str, policy: &str) -> Result<T> {
    value.ok_or_else(|| Error::Parameter(format!("{policy} policy needs --{flag}")))
}

impl PolicyArgs {
    fn resolve(&self, n: usize, r: usize, b: usize) -> Result<WalkPolicy> {
        Ok(match self.policy {
            PolicyName::Simple => WalkPolicy::Simple,
            PolicyName::Oblivious => {
                let budget = match (self.budget, self.budget_frac) {
                    (Some(x), _) => x,
                    (None, Some(frac)) => oblivious_budget(frac, r, b, n)?,
                    (None, None) => return Err(Error::Parameter("oblivious policy needs --budget or --budget-frac".into())),
                };
                WalkPolicy::Oblivious { budget }
            }
            PolicyName::Flip => {
                let (rho_r, rho_b) = match self.q {
                    Some(q) => ((1.0 - q) / r as f64, q / b as f64),
                    None => (required(self.rho_r, "rho-r", "flip")?, required(self.rho_b, "rho-b", "flip")?),
                };
                WalkPolicy::Flip { rho_r, rho_b }
            }
            PolicyName::Smooth => {
                let alpha = required(self.alpha, "alpha", "smooth")?;
                let mut policy = smooth_policy(alpha, r, b, n)?;
                if let WalkPolicy::Smooth { phase_length, budget, .. } = &mut policy {
                    if let Some(p) = self.phase_length {
                        *phase_length = p;
                    }
                    if let Some(x) = self.budget {
                        *budget = x;
                    }
                }
                policy
            }
            PolicyName::Congestion => {
                let default = default_phase_length(n);
                WalkPolicy::Congestion { peak: self.peak.unwrap_or(default), off_peak: self.off_peak.unwrap_or(default) }
            }
        })
    }
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    policy: PolicyArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to 100·n².
    #[arg(long)]
    step_cap: Option<u64>,
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    policy: PolicyArgs,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    /// Master seed for the trials.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Graph seed; defaults to the master seed.
    #[arg(long)]
    graph_seed: Option<u64>,
    #[arg(long)]
    step_cap: Option<u64>,
    #[arg(long, env = "BUDGETWALK_THREADS")]
    threads: Option<usize>,
    /// Comma-separated q values: run a flip-walk θ(q) sweep on r=1, b=2
    /// union graphs instead of a single campaign.
    #[arg(long, value_delimiter = ',')]
    q_grid: Option<Vec<f64>>,
    /// Per-trial CSV (or the sweep table).
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Subcommand)]
enum TheoryCommand {
    /// σ_RB and σ_B.
    Sigma {
        #[arg(long)]
        r: usize,
        #[arg(long)]
        b: usize,
    },
    /// Flip-walk return equations, from q or from (rho_r, rho_b).
    Flip {
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 2)]
        b: usize,
        #[arg(long, conflicts_with_all = ["rho_r", "rho_b"])]
        q: Option<f64>,
        #[arg(long, requires = "rho_b")]
        rho_r: Option<f64>,
        #[arg(long, requires = "rho_r")]
        rho_b: Option<f64>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// θ(q) on an even grid, as CSV.
    SweepTheta {
        #[arg(long, default_value_t = 0.05)]
        from: f64,
        #[arg(long, default_value_t = 0.99)]
        to: f64,
        #[arg(long, default_value_t = 95)]
        steps: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Smooth-walk red budget γ(α) as a multiple of n·ln n.
    Budget {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        b: usize,
        /// Also print the absolute budget for this n.
        #[arg(long)]
        n: Option<usize>,
    },
    /// α·σ_RB + (1-α)·σ_B.
    Smooth {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        b: usize,
    },
    /// (1 + C/F)·(r+1)/r.
    Congestion {
        #[arg(long)]
        peak: u64,
        #[arg(long)]
        off_peak: u64,
        #[arg(long, default_value_t = 1)]
        r: usize,
    },
    /// Predicted cover time of a graph model and policy.
    Predict {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        policy: PolicyArgs,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn announce<T: Serialize>(what: &str, config: &T) -> Result<()> {
    eprintln!("{what}: {}", serde_json::to_string(config)?);
    Ok(())
}

fn write_json<T: Serialize>(value: &T, mut out: impl Write) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// Writes `key,value` CSV rows.
fn write_pairs(pairs: &[(&str, String)], mut out: impl Write) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut out);
    w.write_record(["quantity", "value"])?;
    for (k, v) in pairs {
        w.write_record([*k, v.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

fn cmd_gen(args: &GenArgs) -> Result<()> {
    let spec = GraphSpec { model: args.graph.model(), seed: args.seed };
    announce("graph", &spec)?;
    let g = spec.model.generate(spec.seed)?;
    let mut out = open_out(args.out.as_deref())?;
    write_graph(&g, &mut out)?;
    out.flush()?;
    Ok(())
}

fn flip_solution(r: usize, b: usize, q: Option<f64>, rho: Option<(f64, f64)>) -> Result<theory::FlipSolution> {
    let (rho_r, rho_b) = match (q, rho) {
        (Some(q), _) => ((1.0 - q) / r as f64, q / b as f64),
        (None, Some(p)) => p,
        (None, None) => return Err(Error::Parameter("theory flip needs --q or --rho-r/--rho-b".into())),
    };
    theory::flip_fixed_point(r, b, rho_r, rho_b)
}

fn cmd_theory(cmd: &TheoryCommand) -> Result<()> {
    let stdout = || open_out(None);
    match cmd {
        TheoryCommand::Sigma { r, b } => {
            let mut pairs = vec![("sigma_rb", theory::sigma_rb(*r, *b)?.to_string())];
            match theory::sigma_b(*b) {
                Ok(s) => pairs.push(("sigma_b", s.to_string())),
                Err(_) => pairs.push(("sigma_b", "undefined".into())),
            }
            write_pairs(&pairs, stdout()?)
        }
        TheoryCommand::Flip { r, b, q, rho_r, rho_b, format } => {
            let sol = flip_solution(*r, *b, *q, rho_r.zip(*rho_b))?;
            if !sol.within_hypothesis {
                eprintln!("note: rho_r > rho_b, outside the regime where transience is guaranteed");
            }
            match format {
                Format::Json => write_json(&sol, stdout()?),
                Format::Csv => {
                    let mut pairs = vec![
                        ("rho_r", sol.rho_r.to_string()),
                        ("rho_b", sol.rho_b.to_string()),
                        ("psi_r", sol.psi_r.to_string()),
                        ("psi_b", sol.psi_b.to_string()),
                        ("f", sol.f.to_string()),
                        ("xi_r", sol.xi_r.to_string()),
                        ("xi_b", sol.xi_b.to_string()),
                        ("theta", sol.expected_returns.to_string()),
                    ];
                    if let (Some(q), 1, 2) = (q, r, b) {
                        pairs.push(("theta_closed_form", theory::theta_flip(*q)?.to_string()));
                    }
                    write_pairs(&pairs, stdout()?)
                }
            }
        }
        TheoryCommand::SweepTheta { from, to, steps, out } => {
            if *steps < 2 || !(from < to) {
                return Err(Error::Parameter("sweep needs --from < --to and --steps ≥ 2".into()));
            }
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(open_out(out.as_deref())?);
            w.write_record(["q", "theta"])?;
            for k in 0..*steps {
                let q = from + (to - from) * k as f64 / (*steps - 1) as f64;
                w.write_record([q.to_string(), theory::theta_flip(q)?.to_string()])?;
            }
            w.flush()?;
            Ok(())
        }
        TheoryCommand::Budget { alpha, r, b, n } => {
            let gamma = theory::gamma_budget(*alpha, *r, *b)?;
            let mut pairs = vec![("gamma", gamma.to_string())];
            if let Some(n) = n {
                let nl = *n as f64 * (*n as f64).ln();
                pairs.push(("budget", ((gamma * nl).ceil() as u64).to_string()));
            }
            write_pairs(&pairs, stdout()?)
        }
        TheoryCommand::Smooth { alpha, r, b } => {
            write_pairs(&[("theta", theory::smooth_cover_const(*alpha, *r, *b)?.to_string())], stdout()?)
        }
        TheoryCommand::Congestion { peak, off_peak, r } => write_pairs(
            &[("theta", theory::congestion_cover_const(*peak, *off_peak, *r)?.to_string())],
            stdout()?,
        ),
        TheoryCommand::Predict { graph, policy, format } => {
            let model = graph.model();
            let walk = policy.resolve(model.n(), model.red_degree(), model.blue_degree())?;
            let m: Model = budgetwalk::experiments::theory_model(&model, &walk)
                .ok_or_else(|| Error::Parameter(format!("no prediction for {} walk on {} graphs", walk.name(), model.name())))?;
            let c = theory::predict(&m, model.n())?;
            match format {
                Format::Json => write_json(&c, stdout()?),
                Format::Csv => write_pairs(
                    &[
                        ("theta", c.theta().map(|t| t.to_string()).unwrap_or_default()),
                        ("predicted_cover", c.predicted_cover().map(|t| t.to_string()).unwrap_or_default()),
                    ],
                    stdout()?,
                ),
            }
        }
    }
}

fn cmd_run(args: &RunArgs) -> Result<()> {
    let g: ColoredGraph = read_graph(&args.graph)?;
    let policy = args.policy.resolve(g.n(), g.red_degree(), g.blue_degree())?;
    // The spec only labels the output; the graph comes from the file.
    let label = GraphSpec { model: GraphModel::Union { n: g.n(), r: g.red_degree(), b: g.blue_degree() }, seed: 0 };
    let mut cfg = ExperimentConfig::new(label, policy, 1, args.seed);
    cfg.step_cap = args.step_cap;
    announce(
        "run",
        &serde_json::json!({
            "graph": args.graph, "n": g.n(), "r": g.red_degree(), "b": g.blue_degree(),
            "policy": cfg.policy, "seed": cfg.master_seed,
            "trial_seed": budgetwalk::seeding::trial_seed(cfg.master_seed, 0),
            "step_cap": cfg.resolved_step_cap(),
        }),
    )?;
    let res = estimate_cover_on(&cfg, &g)?;
    let out = open_out(args.out.as_deref())?;
    match args.format {
        Format::Csv => write_trials_csv(&res, out),
        Format::Json => write_json(&res.trials[0], out),
    }
}

#[derive(Serialize)]
struct CampaignSummary<'a> {
    model: &'a str,
    policy: &'a str,
    n: usize,
    r: usize,
    b: usize,
    trials: usize,
    completed: usize,
    failed: usize,
    mean_cover: Option<f64>,
    std_cover: Option<f64>,
    stderr_cover: Option<f64>,
    normalized: Option<f64>,
    theory_theta: Option<f64>,
    predicted_cover: Option<f64>,
    deviation: Option<f64>,
    mean_red_uses: Option<f64>,
}

fn summary(res: &ExperimentResult) -> CampaignSummary<'_> {
    CampaignSummary {
        model: res.config.graph.model.name(),
        policy: res.config.policy.name(),
        n: res.n,
        r: res.r,
        b: res.b,
        trials: res.trials.len(),
        completed: res.completed,
        failed: res.failures,
        mean_cover: res.cover.map(|s| s.mean),
        std_cover: res.cover.map(|s| s.std),
        stderr_cover: res.cover.map(|s| s.stderr),
        normalized: res.normalized,
        theory_theta: res.theory.as_ref().and_then(|t| t.theta()),
        predicted_cover: res.theory.as_ref().and_then(|t| t.predicted_cover()),
        deviation: res.deviation,
        mean_red_uses: res.red_uses.map(|s| s.mean),
    }
}

fn cmd_experiment(args: &ExperimentArgs) -> Result<()> {
    let model = args.graph.model();
    let seed = args.graph_seed.unwrap_or(args.seed);
    if let Some(grid) = &args.q_grid {
        if model != (GraphModel::Union { n: model.n(), r: 1, b: 2 }) {
            return Err(Error::Parameter("--q-grid runs on --model union --r 1 --b 2 only".into()));
        }
        announce(
            "sweep",
            &serde_json::json!({"q_grid": grid, "n": model.n(), "trials": args.trials, "seed": seed, "threads": args.threads}),
        )?;
        let rows = theta_sweep(grid, model.n(), args.trials, seed, args.threads)?;
        return match args.format {
            Format::Csv => write_aggregate_csv(&rows, open_out(args.out.as_deref())?),
            Format::Json => write_json(&rows, open_out(args.out.as_deref())?),
        };
    }
    let policy = args.policy.resolve(model.n(), model.red_degree(), model.blue_degree())?;
    let mut cfg = ExperimentConfig::new(GraphSpec { model, seed }, policy, args.trials, args.seed);
    cfg.step_cap = args.step_cap;
    cfg.threads = args.threads;
    announce(
        "experiment",
        &serde_json::json!({"config": cfg, "step_cap": cfg.resolved_step_cap()}),
    )?;
    let res = estimate_cover(&cfg)?;
    if let Some(path) = &args.out {
        write_trials_csv(&res, open_out(Some(path))?)?;
    }
    let s = summary(&res);
    let mut out = open_out(None)?;
    match args.format {
        Format::Json => write_json(&s, out),
        Format::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(&mut out);
            w.serialize(&s)?;
            w.flush()?;
            Ok(())
        }
    }
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    let g = read_graph(&args.graph)?;
    announce("analyze", &serde_json::json!({"graph": args.graph, "n": g.n(), "r": g.red_degree(), "b": g.blue_degree()}))?;
    let report = analyze_structure(&g)?;
    let out = open_out(args.out.as_deref())?;
    match args.format {
        Format::Json => write_json(&report, out),
        Format::Csv => {
            let cycles = report.blue_cycle_lengths.as_ref().map(|c| {
                c.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
            });
            write_pairs(
                &[
                    ("n", report.n.to_string()),
                    ("sigma", report.sigma.to_string()),
                    ("locally_tree_like", report.locally_tree_like.len().to_string()),
                    ("non_tree_like", report.non_tree_like_count.to_string()),
                    ("lambda2", report.lambda2.to_string()),
                    ("blue_cycle_lengths", cycles.unwrap_or_default()),
                ],
                out,
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Theory(t) => cmd_theory(t),
        Command::Run(a) => cmd_run(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::Analyze(a) => cmd_analyze(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 1 } else { 2 })
        }
    }
}
