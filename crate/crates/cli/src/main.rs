use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lackwalk_core::coin::HadamardKind;
use lackwalk_core::fit::{fit_power_law, fit_scaled_sqrt_log, FitReport, LogBase};
use lackwalk_core::harness::{
    emit_table, parse_sweep_spec, place_targets, preset, preset_names, read_table, run_sweep, write_self_loop_csv,
    write_series_csv, CoinRule, Preset, SelfLoopRule, SweepRow, TableFormat, TargetToken,
};
use lackwalk_core::reference::verify_equivalence;
use lackwalk_core::search::{amplified_complexity, first_peak, run_search};
use lackwalk_core::walk::{OracleMode, OracleSpec};
use lackwalk_core::{CoinSpec, Error, Geometry};

#[derive(Parser, Debug)]
#[command(name = "lackwalk", version, about = "Lackadaisical quantum-walk search simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one search and write its success-probability series.
    Run(RunArgs),
    /// Run a parameter sweep from a preset or a spec file.
    Sweep(SweepArgs),
    /// Fit a running-time model to a sweep table.
    Fit(FitArgs),
    /// Compare the sparse engine against the dense reference operator.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CoinKind {
    Grover,
    Hadamard,
}

#[derive(Args, Debug)]
struct WalkArgs {
    /// Lattice dimension.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    dim: u32,
    /// Vertices per axis.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    side: u64,
    /// Absolute self-loop weight.
    #[arg(long, conflicts_with = "self_loop_rule")]
    self_loop: Option<f64>,
    /// Self-loop weight as a rule of N, e.g. `4.01/N`.
    #[arg(long)]
    self_loop_rule: Option<SelfLoopRule>,
    #[arg(long, value_enum, default_value = "grover")]
    coin: CoinKind,
    /// Hadamard coin parameter.
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Hadamard coin parameter at targets (replaces the oracle).
    #[arg(long)]
    target_gamma: Option<f64>,
    /// Hadamard variant: 0 biased, 1 symmetric.
    #[arg(long, default_value_t = 0, value_parser = clap::value_parser!(u8).range(0..=1))]
    delta: u8,
    /// Target as a flat index or `x,y` coordinates; repeatable.
    #[arg(long = "targets", conflicts_with = "place")]
    targets: Vec<TargetToken>,
    /// Use the standard placement of M targets.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    place: Option<u64>,
    #[arg(long, default_value = "per_target_flip")]
    oracle_mode: OracleMode,
    /// Number of walk steps.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    steps: u64,
}

impl WalkArgs {
    fn geometry(&self) -> Result<Geometry, Error> {
        Geometry::new(self.dim as usize, self.side as usize)
    }

    fn coin(&self, g: &Geometry) -> Result<CoinSpec, Error> {
        let a = match (self.self_loop, self.self_loop_rule) {
            (Some(a), _) => a,
            (None, Some(rule)) => rule.weight(g.n_vertices()),
            (None, None) => 0.0,
        };
        let rule = match self.coin {
            CoinKind::Grover => CoinRule::Grover,
            CoinKind::Hadamard => CoinRule::Hadamard {
                gamma: self.gamma,
                target_gamma: self.target_gamma,
                kind: HadamardKind::from_delta(self.delta)?,
            },
        };
        let coin = rule.build(a)?;
        coin.validate(g)?;
        Ok(coin)
    }

    fn oracle(&self, g: &Geometry) -> Result<OracleSpec, Error> {
        let targets = match self.place {
            Some(m) => place_targets(g, m as usize)?,
            None => self.targets.iter().map(|t| t.resolve(g)).collect::<Result<_, _>>()?,
        };
        let oracle = OracleSpec::new(targets, self.oracle_mode);
        oracle.validate(g)?;
        Ok(oracle)
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    walk: WalkArgs,
    /// Peak floor; defaults to 2M/N.
    #[arg(long)]
    floor: Option<f64>,
    /// Series CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["preset", "spec"])))]
struct SweepArgs {
    /// Named preset.
    #[arg(long, value_parser = clap::builder::PossibleValuesParser::new(preset_names()))]
    preset: Option<String>,
    /// SweepSpec file.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Output path; overrides the spec's `output`. Stdout when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: TableFormat,
    /// Worker threads; 0 uses every core.
    #[arg(long, env = "LACKWALK_JOBS", default_value_t = 0)]
    jobs: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModelArg {
    PowerLaw,
    ScaledSqrtLog,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ColumnArg {
    TPeak,
    TThreshold,
}

#[derive(Args, Debug)]
struct FitArgs {
    /// Sweep table in CSV form.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "scaled-sqrt-log")]
    model: ModelArg,
    #[arg(long, value_enum, default_value = "t-peak")]
    column: ColumnArg,
    /// Multiply each time by the repetitions needed to amplify 1/ln N to O(1).
    #[arg(long)]
    amplify: bool,
    /// Drop rows with a smaller side.
    #[arg(long, default_value_t = 50)]
    min_side: usize,
    /// Logarithm base for the scaled-sqrt-log model: `2` or `e`.
    #[arg(long, default_value = "2")]
    log_base: LogBase,
    /// Fit report JSON destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    walk: WalkArgs,
    /// Largest tolerated max-norm deviation.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

/// Failure classes and their exit codes.
enum Failure {
    Invalid(String),
    Verification(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Failure + '_ {
    move |e| Failure::Invalid(format!("{}: {e}", path.display()))
}

/// Open `path` for writing, or stdout.
fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).map_err(io_err(p))?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn finish(mut w: Box<dyn Write>) -> Result<(), Failure> {
    w.flush().map_err(|e| Failure::Invalid(format!("write failed: {e}")))
}

fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let g = args.walk.geometry()?;
    let coin = args.walk.coin(&g)?;
    let oracle = args.walk.oracle(&g)?;
    if let Some(f) = args.floor {
        if !(f.is_finite() && f >= 0.0) {
            return Err(Failure::Invalid(format!("--floor must be a non-negative number, got {f}")));
        }
    }
    let series = run_search(&g, &coin, &oracle, args.walk.steps as usize)?;
    let floor = args.floor.unwrap_or_else(|| series.default_floor());
    match first_peak(&series, floor) {
        Some(p) => eprintln!("first peak: t={} p={:.6}", p.t, p.p),
        None => eprintln!("no first peak within {} steps", series.t_max()),
    }
    let mut w = sink(args.out.as_deref())?;
    write_series_csv(&series.probabilities, &mut w)?;
    finish(w)
}

fn cmd_sweep(args: SweepArgs) -> Result<(), Failure> {
    let (name, loaded) = match (&args.preset, &args.spec) {
        (Some(name), _) => (name.clone(), preset(name)?),
        (None, Some(path)) => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            (path.display().to_string(), Preset::Sweeps(vec![parse_sweep_spec(&text)?]))
        }
        (None, None) => unreachable!("clap requires one source"),
    };
    let from_file = args.spec.is_some() && args.preset.is_none();
    match loaded {
        Preset::Series(spec) => {
            let series = spec.run()?;
            let mut w = sink(args.out.as_deref())?;
            write_series_csv(&series.probabilities, &mut w)?;
            finish(w)
        }
        Preset::Sweeps(specs) => {
            let mut rows: Vec<SweepRow> = Vec::new();
            for spec in &specs {
                log::info!("sweep {name}: M={} over {} sizes", spec.targets, spec.sides.len());
                rows.extend(run_sweep(spec, args.jobs)?);
            }
            let target = args.out.clone().or_else(|| if from_file { specs[0].output.clone() } else { None });
            emit_table(&rows, args.format, target.as_deref())?;
            Ok(())
        }
        Preset::SelfLoop(sweep) => {
            if matches!(args.format, TableFormat::Json) {
                return Err(Failure::Invalid(format!("preset {name} only supports --format csv")));
            }
            let result = sweep.run(args.jobs)?;
            let mut w = sink(args.out.as_deref())?;
            write_self_loop_csv(&result, &mut w)?;
            finish(w)
        }
    }
}

fn cmd_fit(args: FitArgs) -> Result<(), Failure> {
    let file = File::open(&args.input).map_err(io_err(&args.input))?;
    let rows: Vec<SweepRow> = read_table(file)?.into_iter().filter(|r| r.side >= args.min_side).collect();
    let Some(m) = rows.first().map(|r| r.m) else {
        return Err(Failure::Invalid(format!("{}: no rows with side >= {}", args.input.display(), args.min_side)));
    };
    if rows.iter().any(|r| r.m != m) {
        return Err(Failure::Invalid("table mixes several target counts M".into()));
    }
    let mut points = Vec::with_capacity(rows.len());
    for r in &rows {
        let t = match args.column {
            ColumnArg::TPeak => r.t_peak,
            ColumnArg::TThreshold => r.t_threshold.ok_or_else(|| {
                Failure::Invalid(format!("row N={} has no t_threshold", r.n))
            })?,
        };
        let t = if args.amplify { amplified_complexity(t, 1.0 / (r.n as f64).ln())?.total } else { t };
        points.push((r.n as f64, t as f64));
    }
    let fit = match args.model {
        ModelArg::PowerLaw => fit_power_law(&points)?,
        ModelArg::ScaledSqrtLog => fit_scaled_sqrt_log(&points, m, args.log_base)?,
    };
    let report = FitReport::new(&fit, m, &points);
    let mut w = sink(args.out.as_deref())?;
    serde_json::to_writer_pretty(&mut w, &report).map_err(|e| Failure::Invalid(e.to_string()))?;
    writeln!(w).map_err(|e| Failure::Invalid(e.to_string()))?;
    finish(w)
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    if !(args.tol.is_finite() && args.tol >= 0.0) {
        return Err(Failure::Invalid(format!("--tol must be a non-negative number, got {}", args.tol)));
    }
    let g = args.walk.geometry()?;
    let coin = args.walk.coin(&g)?;
    let oracle = args.walk.oracle(&g)?;
    let report = verify_equivalence(&g, &coin, &oracle, args.walk.steps as usize, args.tol)?;
    let line = format!(
        "{} max_deviation={:e} tol={:e} steps={}",
        if report.passed { "pass" } else { "fail" },
        report.max_deviation,
        report.tolerance,
        report.steps
    );
    if report.passed {
        println!("{line}");
        Ok(())
    } else {
        Err(Failure::Verification(line))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verification(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
    }
}
