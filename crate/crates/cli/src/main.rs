//! `rpnn`: fit, evaluate and benchmark random projection networks.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rpnn::baselines::{fit_baseline, BaselineKind};
use rpnn::benchmarks::{BenchmarkFunction, FunctionSpec};
use rpnn::harness::{
    emit_csv, emit_plot_script, emit_summary_csv, l2_error, run_convergence_sweep, run_tolerance_sweep,
    set_thread_limit, summarize, write_csv, CellSummary, SweepConfig, SweepRecord, ToleranceSweepConfig,
    DEFAULT_TOLERANCES,
};
use rpnn::theorem::{exact_interpolation_check, mimicry_study};
use rpnn::train::{SolveOptions, Tolerance, TrainingProblem};
use rpnn::{CenterPlacement, Error, RankRule, RpnnModel, SelectionStrategy, SolverKind, StrategyKind};

#[derive(Parser)]
#[command(name = "rpnn", version, about = "Random projection neural networks for 1-D approximation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one network on equispaced samples of a benchmark function.
    Fit(FitArgs),
    /// Evaluate a saved model.
    Eval(EvalArgs),
    /// Monte-Carlo convergence sweep described by a TOML config.
    Sweep(SweepArgs),
    /// Rank-tolerance study at fixed N for both solvers.
    Tolsweep(TolSweepArgs),
    /// Executable checks of exact interpolation and polynomial mimicry.
    #[command(subcommand)]
    Theorem(TheoremCommand),
    /// Evaluate a benchmark function.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct FunctionArgs {
    /// Benchmark target: f1, f2, f3, f4 or f5.
    #[arg(long, visible_alias = "target", default_value = "f1")]
    function: String,
    /// Frequency parameter of f1 / f2 (defaults 10 and 1).
    #[arg(long, allow_negative_numbers = true)]
    k: Option<f64>,
    /// Time of the Burgers solution f3 (default 1/pi).
    #[arg(long)]
    t: Option<f64>,
    /// Viscosity of f3 (default 0.01/pi).
    #[arg(long)]
    nu: Option<f64>,
    /// Shift of f4 / f5 (default 1/(10 pi)).
    #[arg(long)]
    eps: Option<f64>,
}

impl FunctionArgs {
    fn spec(&self) -> Result<FunctionSpec, Error> {
        FunctionSpec::from_parts(&self.function, self.k, self.t, self.nu, self.eps)
    }
}

#[derive(Args, Clone)]
struct StrategyArgs {
    /// naive, agnostic or informed.
    #[arg(long, default_value = "informed", value_parser = parse_strategy)]
    strategy: StrategyKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Slope factor of the informed strategy.
    #[arg(long, default_value_t = SelectionStrategy::DEFAULT_GAMMA)]
    gamma: f64,
    /// Center placement of the agnostic strategy: uniform or equally_spaced.
    #[arg(long, default_value = "uniform", value_parser = parse_centers)]
    centers: CenterPlacement,
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// svd or cod.
    #[arg(long, default_value = "cod", value_parser = parse_solver)]
    solver: SolverKind,
    /// Rank tolerance: `auto` (n eps(||R||)/1000) or a positive number.
    #[arg(long = "tol", default_value = "auto")]
    tolerance: Tolerance,
    /// COD rank rule: relative or absolute.
    #[arg(long, default_value = "relative", value_parser = parse_rule)]
    rank_rule: RankRule,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    function: FunctionArgs,
    #[command(flatten)]
    strategy: StrategyArgs,
    #[command(flatten)]
    solver: SolverArgs,
    /// Number of hidden neurons.
    #[arg(long = "N", visible_alias = "neurons")]
    neurons: usize,
    /// Training points (default 5 N).
    #[arg(long)]
    points: Option<usize>,
    /// Test-grid size of the reported L2 error.
    #[arg(long, default_value_t = 10_000)]
    grid: usize,
    /// Also report a classical baseline with N + 1 degrees of freedom.
    #[arg(long, value_parser = parse_baseline)]
    baseline: Vec<BaselineKind>,
    /// Where to write the model JSON.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    /// Model JSON written by `fit`.
    #[arg(long)]
    model: PathBuf,
    /// Abscissae to evaluate.
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    x: Vec<f64>,
    /// File with one abscissa per line.
    #[arg(long)]
    batch: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// TOML file mirroring the sweep configuration.
    #[arg(long)]
    config: PathBuf,
    /// CSV destination; overrides `output` in the config. Without either the
    /// CSV goes to stdout.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Also write a matplotlib script.
    #[arg(long)]
    plot: Option<PathBuf>,
    /// Also write per-cell geometric and arithmetic means.
    #[arg(long)]
    summary: Option<PathBuf>,
    /// Override the master seed of the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct TolSweepArgs {
    /// TOML file; when given, the remaining study flags are ignored.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    function: FunctionArgs,
    #[command(flatten)]
    strategy: StrategyArgs,
    #[arg(long = "N", visible_alias = "neurons", default_value_t = 400)]
    neurons: usize,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Comma-separated tolerance grid.
    #[arg(long, value_delimiter = ',')]
    tolerances: Vec<f64>,
    /// Comma-separated solvers.
    #[arg(long, value_delimiter = ',', default_value = "svd,cod", value_parser = parse_solver)]
    solvers: Vec<SolverKind>,
    /// COD rank rule.
    #[arg(long, default_value = "absolute", value_parser = parse_rule)]
    rank_rule: RankRule,
    #[arg(long, default_value_t = 10_000)]
    grid: usize,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Subcommand)]
enum TheoremCommand {
    /// Interpolate N + 1 equispaced points with N neurons.
    Interp(InterpArgs),
    /// Solve the polynomial mimicry system for increasing degree.
    Mimic(MimicArgs),
}

#[derive(Args)]
struct InterpArgs {
    #[command(flatten)]
    function: FunctionArgs,
    /// naive, agnostic or informed.
    #[arg(long, default_value = "agnostic", value_parser = parse_strategy)]
    strategy: StrategyKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "N", visible_alias = "neurons", value_delimiter = ',', default_value = "5,10,20")]
    neurons: Vec<usize>,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Pass threshold on max |residual| / max |y|.
    #[arg(long, default_value_t = 1e-8)]
    threshold: f64,
}

#[derive(Args)]
struct MimicArgs {
    #[command(flatten)]
    function: FunctionArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Comma-separated polynomial degrees.
    #[arg(long, visible_alias = "n", value_delimiter = ',', default_value = "1,2,3,4,5,6,7,8")]
    degrees: Vec<usize>,
    #[arg(long, default_value_t = 25)]
    draws: usize,
    /// Coefficient errors are judged only below this condition number.
    #[arg(long, default_value_t = 1e12)]
    gate: f64,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    function: FunctionArgs,
    #[arg(long, allow_hyphen_values = true, value_delimiter = ',')]
    x: Vec<f64>,
    /// Tabulate on this many equispaced points of the domain.
    #[arg(long)]
    grid: Option<usize>,
}

fn parse_strategy(s: &str) -> Result<StrategyKind, String> {
    StrategyKind::from_label(s).map_err(|e| e.to_string())
}

fn parse_solver(s: &str) -> Result<SolverKind, String> {
    SolverKind::from_label(s).map_err(|e| e.to_string())
}

fn parse_rule(s: &str) -> Result<RankRule, String> {
    RankRule::from_label(s).map_err(|e| e.to_string())
}

fn parse_baseline(s: &str) -> Result<BaselineKind, String> {
    BaselineKind::from_label(s).map_err(|e| e.to_string())
}

fn parse_centers(s: &str) -> Result<CenterPlacement, String> {
    match s {
        "uniform" => Ok(CenterPlacement::Uniform),
        "equally_spaced" | "equispaced" => Ok(CenterPlacement::EquallySpaced),
        other => Err(format!("unknown center placement '{other}'")),
    }
}

enum Failure {
    Numerical(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Numerical(_) | Error::NonFinite { .. } => Failure::Numerical(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = apply_thread_limit().and_then(|()| match cli.command {
        Command::Fit(a) => fit(a),
        Command::Eval(a) => eval(a),
        Command::Sweep(a) => sweep(a),
        Command::Tolsweep(a) => tolsweep(a),
        Command::Theorem(TheoremCommand::Interp(a)) => interp(a),
        Command::Theorem(TheoremCommand::Mimic(a)) => mimic(a),
        Command::Bench(a) => bench(a),
    });
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Numerical(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn apply_thread_limit() -> CmdResult {
    match std::env::var("RPNN_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| Failure::Usage(format!("RPNN_THREADS must be a positive integer, got '{v}'")))?;
            set_thread_limit(n)?;
            Ok(())
        }
        Err(_) => Ok(()),
    }
}

fn strategy_of(a: &StrategyArgs) -> SelectionStrategy {
    SelectionStrategy::new(a.strategy, a.seed).with_gamma(a.gamma).with_centers(a.centers)
}

fn fit(a: FitArgs) -> CmdResult {
    let spec = a.function.spec()?;
    let target = BenchmarkFunction::new(spec)?;
    let domain = target.domain();
    let points = a.points.unwrap_or(5 * a.neurons);
    let xs = domain.linspace(points);
    let ys = xs.iter().map(|&x| target.evaluate(x)).collect::<Result<Vec<_>, _>>()?;
    let strategy = strategy_of(&a.strategy);
    let problem = TrainingProblem::new(&xs, &ys, domain, a.neurons, &strategy)?;
    let tol = problem.resolve_tolerance(a.solver.tolerance)?;
    let options = SolveOptions {
        solver: a.solver.solver,
        tolerance: Tolerance::Fixed(tol),
        rank_rule: a.solver.rank_rule,
    };
    let solution = problem.solve(options)?;
    let model = problem.model(&solution.wtilde)?;
    let l2 = l2_error(|x| target.evaluate_unchecked(x), |x| model.evaluate_unchecked(x), domain, a.grid)?;
    let max_err = domain
        .linspace(a.grid)
        .iter()
        .map(|&x| (target.evaluate_unchecked(x) - model.evaluate_unchecked(x)).abs())
        .fold(0.0, f64::max);

    println!("function: {spec}");
    println!("strategy: {}", a.strategy.strategy.label());
    println!("seed: {}", a.strategy.seed);
    println!("solver: {} ({})", a.solver.solver.label(), a.solver.rank_rule.label());
    println!("tolerance: {tol:e} ({})", a.solver.tolerance);
    println!("N: {}", a.neurons);
    println!("points: {points}");
    println!("effective_rank: {}", solution.effective_rank);
    println!("residual_norm: {:e}", solution.residual_norm);
    println!("l2_error: {l2:e}");
    println!("max_error: {max_err:e}");
    for kind in a.baseline {
        let b = fit_baseline(kind, |x| target.evaluate_unchecked(x), domain, a.neurons)?;
        let e = l2_error(|x| target.evaluate_unchecked(x), |x| b.evaluate_unchecked(x), domain, a.grid)?;
        println!("{}_l2_error: {e:e}", kind.label());
    }
    if let Some(path) = a.output {
        std::fs::write(&path, model.to_json()?)?;
        println!("model: {}", path.display());
    }
    Ok(())
}

fn read_batch(path: &Path) -> Result<Vec<f64>, Failure> {
    let text = std::fs::read_to_string(path)?;
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.parse::<f64>().map_err(|_| Failure::Usage(format!("not a number in batch file: '{l}'"))))
        .collect()
}

fn eval(a: EvalArgs) -> CmdResult {
    let text = std::fs::read_to_string(&a.model)?;
    let model = RpnnModel::from_json(&text).map_err(|e| Failure::Usage(format!("{}: {e}", a.model.display())))?;
    let mut xs = a.x;
    if let Some(batch) = &a.batch {
        xs.extend(read_batch(batch)?);
    }
    if xs.is_empty() {
        return Err(Failure::Usage("give --x or --batch".into()));
    }
    let domain = model.domain();
    for x in xs {
        if !domain.contains(x) {
            eprintln!("warning: x = {x} lies outside the model domain [{}, {}]", domain.lo(), domain.hi());
        }
        println!("{:.16e}", model.evaluate(x)?);
    }
    Ok(())
}

fn print_summary(cells: &[CellSummary], to_stderr: bool) {
    let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_owned(), |x| format!("{x:.6e}"));
    for c in cells {
        let line = format!(
            "{} {} {} N={} trials={} failed={} geomean={} mean={}",
            c.function,
            c.strategy,
            c.solver,
            c.n,
            c.trials,
            c.failures,
            fmt(c.geometric_mean),
            fmt(c.arithmetic_mean)
        );
        if to_stderr {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
    }
}

fn emit(records: &[SweepRecord], output: Option<&Path>, plot: Option<&Path>) -> Result<bool, Failure> {
    match output {
        Some(p) => emit_csv(records, p)?,
        None => write_csv(records, std::io::stdout().lock())?,
    }
    if let Some(p) = plot {
        emit_plot_script(records, p)?;
    }
    Ok(output.is_none())
}

fn sweep(a: SweepArgs) -> CmdResult {
    let mut cfg = SweepConfig::load(&a.config)?;
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    let output = a.output.or_else(|| cfg.output.clone());
    let info = format!("seed: {}\ntolerance: {} ({})", cfg.seed, cfg.tolerance, cfg.rank_rule.label());
    let records = run_convergence_sweep(&cfg)?;
    let on_stdout = emit(&records, output.as_deref(), a.plot.as_deref())?;
    let cells = summarize(&records);
    if let Some(p) = &a.summary {
        emit_summary_csv(&cells, p)?;
    }
    if on_stdout {
        eprintln!("{info}");
    } else {
        println!("{info}");
    }
    print_summary(&cells, on_stdout);
    Ok(())
}

fn tolsweep(a: TolSweepArgs) -> CmdResult {
    let cfg = match &a.config {
        Some(p) => ToleranceSweepConfig::from_toml(&std::fs::read_to_string(p)?)?,
        None => {
            let tolerances = if a.tolerances.is_empty() { DEFAULT_TOLERANCES.to_vec() } else { a.tolerances.clone() };
            let cfg = ToleranceSweepConfig {
                strategy: a.strategy.strategy,
                neurons: a.neurons,
                tolerances,
                solvers: a.solvers.clone(),
                trials: a.trials,
                test_grid: a.grid,
                rank_rule: a.rank_rule,
                seed: a.strategy.seed,
                gamma: a.strategy.gamma,
                centers: a.strategy.centers,
                output: a.output.clone(),
                ..ToleranceSweepConfig::new(a.function.spec()?)
            };
            cfg.validate()?;
            cfg
        }
    };
    let output = a.output.clone().or_else(|| cfg.output.clone());
    let tols: Vec<String> = cfg.tolerances.iter().map(|t| format!("{t:e}")).collect();
    let info = format!("seed: {}\ntolerance: {} ({})", cfg.seed, tols.join(","), cfg.rank_rule.label());
    let records = run_tolerance_sweep(&cfg)?;
    let on_stdout = emit(&records, output.as_deref(), a.plot.as_deref())?;
    if on_stdout {
        eprintln!("{info}");
    } else {
        println!("{info}");
    }
    print_summary(&summarize(&records), on_stdout);
    Ok(())
}

fn interp(a: InterpArgs) -> CmdResult {
    let spec = a.function.spec()?;
    let target = BenchmarkFunction::new(spec)?;
    let domain = target.domain();
    if a.trials == 0 {
        return Err(Failure::Usage("trials must be at least 1".into()));
    }
    println!("seed: {}", a.seed);
    println!("tolerance: {:e} (relative)", rpnn::theorem::INTERPOLATION_TOL);
    for &n in &a.neurons {
        let mut pass = 0;
        let mut worst = 0.0f64;
        for trial in 0..a.trials {
            let seed = rpnn::harness::trial_seed(a.seed, a.strategy, n, trial);
            let strategy = SelectionStrategy::new(a.strategy, seed);
            let check = exact_interpolation_check(|x| target.evaluate_unchecked(x), domain, n, &strategy)?;
            let r = check.relative_residual();
            worst = worst.max(r);
            if r <= a.threshold {
                pass += 1;
            }
        }
        println!(
            "{spec} {} N={n}: {pass}/{} within {:e}, worst relative residual {worst:e}",
            a.strategy.label(),
            a.trials,
            a.threshold
        );
    }
    Ok(())
}

fn mimic(a: MimicArgs) -> CmdResult {
    let spec = a.function.spec()?;
    let target = BenchmarkFunction::new(spec)?;
    println!("seed: {}", a.seed);
    println!("tolerance: condition gate {:e}", a.gate);
    let rows = mimicry_study(|x| target.evaluate_unchecked(x), target.domain(), &a.degrees, a.seed, a.draws, a.gate)?;
    for r in rows {
        let err = r.worst_gated_error.map_or_else(|| "-".to_owned(), |e| format!("{e:e}"));
        println!(
            "n={} cond_geomean={:.6e} cond_max={:.6e} gated={}/{} worst_coeff_error={err}",
            r.degree, r.condition_geomean, r.condition_max, r.gated, r.draws
        );
    }
    Ok(())
}

fn bench(a: BenchArgs) -> CmdResult {
    let spec = a.function.spec()?;
    let target = BenchmarkFunction::new(spec)?;
    let mut xs = a.x;
    if let Some(g) = a.grid {
        if g < 2 {
            return Err(Failure::Usage("grid needs at least 2 points".into()));
        }
        xs.extend(target.domain().linspace(g));
    }
    if xs.is_empty() {
        return Err(Failure::Usage("give --x or --grid".into()));
    }
    for x in xs {
        println!("{x:.16e} {:.16e}", target.evaluate(x)?);
    }
    Ok(())
}
