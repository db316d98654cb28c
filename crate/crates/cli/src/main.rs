//! `hyperboot`: sample hypergraphs, run bootstrap percolation, evaluate the
//! recurrences and drive Monte Carlo sweeps from the shell.
//!
//! CSV and hypergraph outputs start with a `# config: {...}` line. JSON
//! outputs are left bare and the config is echoed on stderr instead.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use hyperboot::analytics::DEFAULT_ETA;
use hyperboot::labrunner::initial_size;
use hyperboot::{
    delta_diagnostics, failure_decay_scan, fixed_point_classify, gw_spec_from_state, gw_total_size,
    run_bootstrap, run_sweep, run_trial, sample_initial_set, threshold_b, trajectory_eq1, trajectory_eq2,
    ExperimentConfig, Hypergraph, HypergraphSampler, ModelParams,
};
use serde::Serialize;
use serde_json::json;

#[derive(Parser)]
#[command(name = "hyperboot", version, about = "Bootstrap percolation on random k-uniform hypergraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the critical initial size b_{k,r}.
    Threshold(ThresholdArgs),
    /// Sample H_k(n, p) and write it in the plain-text hypergraph format.
    Sample(SampleArgs),
    /// Run one percolation and print the outcome as JSON.
    Run(RunArgs),
    /// Evaluate the mean-field recurrence and write a CSV trajectory.
    Trajectory(TrajectoryArgs),
    /// Classify an initial size with the fixed-point map (JSON).
    Classify(ClassifyArgs),
    /// Estimate the subcritical tail with the branching-process coupling (JSON).
    Gw(GwArgs),
    /// Monte Carlo sweep over a/b; one CSV row per trial.
    Sweep(SweepArgs),
    /// Failure fraction across a grid of n with p = n^{-c} (CSV).
    Decay(DecayArgs),
}

#[derive(Args, Serialize, Clone)]
struct ModelArgs {
    /// Number of vertices.
    #[arg(long)]
    n: Option<u32>,
    /// Edge size.
    #[arg(long, default_value_t = 2)]
    k: u32,
    /// Infection threshold.
    #[arg(long, default_value_t = 2)]
    r: u32,
    /// Edge probability.
    #[arg(long, conflicts_with = "p_exponent")]
    p: Option<f64>,
    /// Set p = n^{-c}.
    #[arg(long = "p-exponent", value_name = "C")]
    p_exponent: Option<f64>,
}

impl ModelArgs {
    fn params(&self) -> Result<ModelParams> {
        let n = self.n.context("--n is required")?;
        self.params_with_n(n)
    }

    fn params_with_n(&self, n: u32) -> Result<ModelParams> {
        let params = match (self.p, self.p_exponent) {
            (Some(p), None) => ModelParams::new(n, self.k, self.r, p)?,
            (None, Some(c)) => ModelParams::with_p_exponent(n, self.k, self.r, c)?,
            _ => bail!("give exactly one of --p and --p-exponent"),
        };
        Ok(params)
    }
}

#[derive(Args, Serialize, Clone)]
struct SizeArgs {
    /// Initial infected set size.
    #[arg(long, conflicts_with = "a_over_b")]
    a: Option<f64>,
    /// Initial size as a multiple of b_{k,r}.
    #[arg(long = "a-over-b", value_name = "X")]
    a_over_b: Option<f64>,
}

impl SizeArgs {
    /// Real-valued size for the analytic commands.
    fn real(&self, params: &ModelParams) -> Result<f64> {
        match (self.a, self.a_over_b) {
            (Some(a), None) => Ok(a),
            (None, Some(x)) => Ok(x * threshold_b(params)?.value),
            _ => bail!("give exactly one of --a and --a-over-b"),
        }
    }

    /// Integer size for simulations, rounded the same way as sweeps.
    fn count(&self, params: &ModelParams) -> Result<u64> {
        match (self.a, self.a_over_b) {
            (Some(a), None) if a >= 0.0 && a.fract() == 0.0 => Ok(a as u64),
            (Some(a), None) => bail!("--a must be a non-negative integer here, got {a}"),
            (None, Some(x)) => Ok(initial_size(x, threshold_b(params)?.value, params.n)),
            _ => bail!("give exactly one of --a and --a-over-b"),
        }
    }
}

#[derive(Args, Serialize)]
struct ThresholdArgs {
    #[command(flatten)]
    model: ModelArgs,
}

#[derive(Args, Serialize)]
struct SampleArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct RunArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    size: SizeArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Percolate on this hypergraph file instead of sampling one.
    #[arg(long)]
    graph: Option<PathBuf>,
    /// Record per-round class sizes.
    #[arg(long)]
    snapshot: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum RecurrenceArg {
    /// Incremental form.
    Eq2,
    /// Closed form.
    Eq1,
}

#[derive(Args, Serialize)]
struct TrajectoryArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    size: SizeArgs,
    #[arg(long, value_enum, default_value_t = RecurrenceArg::Eq2)]
    recurrence: RecurrenceArg,
    /// Maximum number of rounds.
    #[arg(long = "t-max", default_value_t = 1000)]
    t_max: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct ClassifyArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    size: SizeArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct GwArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    size: SizeArgs,
    /// Slack on the class sizes when building the offspring law.
    #[arg(long, default_value_t = 0.1)]
    delta: f64,
    /// Increment level, relative to b, at which to switch to the branching process.
    #[arg(long, default_value_t = DEFAULT_ETA)]
    eta: f64,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Report P(total > x) for each x.
    #[arg(long = "exceed", value_delimiter = ',')]
    exceed: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct SweepOptions {
    /// Trials per grid point.
    #[arg(long, default_value_t = 50)]
    trials: usize,
    /// Master seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Near-full means at least (1 - zeta) n infected.
    #[arg(long, default_value_t = 0.1)]
    zeta: f64,
    /// Small means at most C b infected.
    #[arg(long = "small-multiple", default_value_t = 10.0)]
    small_multiple: f64,
    /// Record per-round class sizes for every trial.
    #[arg(long)]
    snapshot: bool,
}

impl SweepOptions {
    fn config(&self, params: ModelParams, p_exponent: Option<f64>, grid: Vec<f64>) -> ExperimentConfig {
        let mut config = ExperimentConfig::new(params, grid, self.trials, self.seed);
        config.p_exponent = p_exponent;
        config.near_full_fraction = self.zeta;
        config.small_multiple = self.small_multiple;
        config.snapshot = self.snapshot;
        config
    }
}

#[derive(Args, Serialize)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Grid of a/b values.
    #[arg(long = "a-over-b", value_delimiter = ',', default_value = "0.5,2")]
    a_over_b: Vec<f64>,
    #[command(flatten)]
    options: SweepOptions,
    /// Also write per-point summaries here.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Serialize)]
struct DecayArgs {
    /// Vertex counts to scan.
    #[arg(long = "n-grid", value_delimiter = ',', required = true)]
    n_grid: Vec<u32>,
    #[arg(long, default_value_t = 2)]
    r: u32,
    /// p = n^{-c} at every n.
    #[arg(long = "p-exponent", value_name = "C")]
    p_exponent: f64,
    #[arg(long = "a-over-b", value_delimiter = ',', default_value = "0.5,2")]
    a_over_b: Vec<f64>,
    #[command(flatten)]
    options: SweepOptions,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn config_line<T: Serialize>(command: &str, args: &T) -> String {
    let body = serde_json::to_value(args).expect("arguments serialise");
    format!("config: {}", json!({ "command": command, "args": body }))
}

fn write_json<T: Serialize>(path: &Option<PathBuf>, value: &T) -> Result<()> {
    let mut w = output(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn threshold(args: ThresholdArgs) -> Result<()> {
    let params = args.model.params()?;
    let t = threshold_b(&params)?;
    let regime = params.regime();
    if !regime.regime_ok {
        eprintln!(
            "warning: p is outside the model window (n^(k-1) p = {:.3e}, n^(k-2+1/r) p = {:.3e})",
            regime.lower_margin, regime.upper_margin
        );
    }
    println!("{}", t.value);
    Ok(())
}

fn sample(args: SampleArgs) -> Result<()> {
    let params = args.model.params()?;
    let sampled = HypergraphSampler::default().sample(&params, args.seed)?;
    let mut w = output(&args.out)?;
    writeln!(w, "# {}", config_line("sample", &args))?;
    sampled.graph.write_text(&mut w)?;
    w.flush()?;
    eprintln!(
        "{} edges ({:?} edge count)",
        sampled.graph.edge_count(),
        sampled.edge_count_draw
    );
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    eprintln!("{}", config_line("run", &args));
    let outcome = match &args.graph {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let graph = Hypergraph::from_text(&text)?;
            if graph.k() != args.model.k {
                bail!("graph is {}-uniform but --k is {}", graph.k(), args.model.k);
            }
            let a = match (args.size.a, args.size.a_over_b) {
                // a/b needs p; a plain --a does not.
                (None, Some(_)) => args.size.count(&args.model.params_with_n(graph.n())?)?,
                (Some(a), None) if a >= 0.0 && a.fract() == 0.0 => a as u64,
                _ => bail!("give exactly one of --a (a non-negative integer) and --a-over-b"),
            };
            let initial = sample_initial_set(graph.n(), a, args.seed)?;
            run_bootstrap(&graph, &initial, args.model.r, args.snapshot)?
        }
        None => {
            let params = args.model.params()?;
            let a = args.size.count(&params)?;
            run_trial(&params, a, args.seed, args.snapshot, hyperboot::hypermodel::DEFAULT_EDGE_BUDGET)?
        }
    };
    write_json(&args.out, &outcome)
}

fn trajectory(args: TrajectoryArgs) -> Result<()> {
    let params = args.model.params()?;
    let a = args.size.real(&params)?;
    let traj = match args.recurrence {
        RecurrenceArg::Eq2 => trajectory_eq2(&params, a, args.t_max)?,
        RecurrenceArg::Eq1 => trajectory_eq1(&params, a, args.t_max)?,
    };
    let mut w = output(&args.out)?;
    traj.write_csv(&mut w, Some(&config_line("trajectory", &args)))?;
    w.flush()?;
    Ok(())
}

fn classify(args: ClassifyArgs) -> Result<()> {
    eprintln!("{}", config_line("classify", &args));
    let params = args.model.params()?;
    let cls = fixed_point_classify(&params, args.size.real(&params)?)?;
    write_json(&args.out, &cls)
}

fn gw(args: GwArgs) -> Result<()> {
    eprintln!("{}", config_line("gw", &args));
    let params = args.model.params()?;
    let b = threshold_b(&params)?.value;
    let a = args.size.real(&params)?;
    let traj = trajectory_eq2(&params, a, 100_000)?;
    let Some(tau) = delta_diagnostics(&traj, b, args.eta).tau else {
        bail!("the trajectory from a = {a} never settles below eta * b; it is not subcritical");
    };
    let roots = traj.deltas[tau].round().max(1.0) as u64;
    let spec = gw_spec_from_state(&params, &traj.classes[tau], args.delta, roots)?;
    let estimate = gw_total_size(&spec, args.trials, args.seed, &args.exceed)?;
    let predicted_final = traj.infected(tau) + estimate.mean;
    write_json(
        &args.out,
        &json!({
            "tau": tau,
            "infected_at_tau": traj.infected(tau),
            "spec": spec,
            "estimate": estimate,
            "predicted_final": predicted_final,
        }),
    )
}

fn sweep(args: SweepArgs) -> Result<()> {
    let params = args.model.params()?;
    let config = args.options.config(params, args.model.p_exponent, args.a_over_b.clone());
    let result = run_sweep(&config)?;
    let mut w = output(&args.out)?;
    result.write_csv(&mut w)?;
    w.flush()?;
    if let Some(path) = &args.summary {
        let mut s = output(&Some(path.clone()))?;
        result.write_summary_csv(&mut s)?;
        s.flush()?;
    }
    for p in &result.points {
        eprintln!(
            "a/b={} a={}: small {:.3} near-full {:.3} intermediate {:.3} failed {:.3}",
            p.a_over_b, p.a, p.frac_small, p.frac_near_full, p.frac_intermediate, p.frac_failed
        );
    }
    Ok(())
}

fn decay(args: DecayArgs) -> Result<()> {
    let first = *args.n_grid.first().context("--n-grid is empty")?;
    let params = ModelParams::with_p_exponent(first, 2, args.r, args.p_exponent)?;
    let config = args.options.config(params, Some(args.p_exponent), args.a_over_b.clone());
    let table = failure_decay_scan(&config, &args.n_grid, args.p_exponent)?;
    let mut w = output(&args.out)?;
    table.write_csv(&mut w)?;
    w.flush()?;
    Ok(())
}

fn main() -> Result<()> {
    let result = match Cli::parse().command {
        Command::Threshold(a) => threshold(a),
        Command::Sample(a) => sample(a),
        Command::Run(a) => run(a),
        Command::Trajectory(a) => trajectory(a),
        Command::Classify(a) => classify(a),
        Command::Gw(a) => gw(a),
        Command::Sweep(a) => sweep(a),
        Command::Decay(a) => decay(a),
    };
    // A closed pipe (e.g. `| head`) is not a failure.
    match result {
        Err(e) if e.downcast_ref::<io::Error>().is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe) => Ok(()),
        other => other,
    }
}
