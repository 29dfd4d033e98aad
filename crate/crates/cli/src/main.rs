//! Command-line front end: transforms, density inversion, simulation and verification.
//!
//! Exit codes: 0 success, 1 a verification failed, 2 usage or validation
//! error, 3 numerical failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use bessel_hitting::inversion::{Contour, InversionConfig};
use bessel_hitting::numerics::{Complex64, QuadratureConfig};
use bessel_hitting::simulate::{simulate_hitting_times, MomentEstimate, SimConfig};
use bessel_hitting::transforms::{mellin, BesselSpec, Boundary, IndexSign};
use bessel_hitting::verify::{format_table, run_check, run_negative_control, Check, VerificationReport};
use bessel_hitting::Error;
use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Debug, Parser)]
#[command(name = "bessel-hitting", version, about = "Hitting times of square-root boundaries by Bessel processes")]
struct Cli {
    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, action = ArgAction::Count, global = true)]
    verbose: u8,
    /// Worker threads (defaults to one per core). Does not change any output.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Output format (csv for transform, density and simulate; json for verify).
    #[arg(long, value_enum, global = true)]
    format: Option<Format>,
    /// Write the result here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate E[(b + σ)^-s] in closed form.
    Transform(TransformArgs),
    /// Density and CDF of b + σ by contour inversion.
    Density(DensityArgs),
    /// Monte-Carlo hitting times.
    Simulate(SimulateArgs),
    /// Run identity checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Index {
    Neg,
    Pos,
}

#[derive(Debug, Args, Serialize)]
struct ModelArgs {
    /// Sign of the Bessel index.
    #[arg(long, value_enum)]
    index: Index,
    /// Index magnitude ν > 0.
    #[arg(long)]
    nu: f64,
    /// Boundary offset, 0 < b < c.
    #[arg(long)]
    b: f64,
    /// Boundary slope parameter.
    #[arg(long)]
    c: f64,
}

impl ModelArgs {
    fn resolve(&self) -> Result<(BesselSpec, Boundary), CliError> {
        let sign = match self.index {
            Index::Neg => IndexSign::Negative,
            Index::Pos => IndexSign::Positive,
        };
        let spec = BesselSpec::new(self.nu, sign).map_err(CliError::usage)?;
        let bnd = Boundary::new(self.b, self.c).map_err(CliError::usage)?;
        Ok((spec, bnd))
    }

    fn flags(&self) -> String {
        let index = match self.index {
            Index::Neg => "neg",
            Index::Pos => "pos",
        };
        format!("--index {index} --nu {} --b {} --c {}", self.nu, self.b, self.c)
    }
}

#[derive(Debug, Args, Serialize)]
struct QuadArgs {
    #[arg(long, default_value_t = 1e-10)]
    abs_tol: f64,
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    #[arg(long, default_value_t = 2000)]
    max_subdivisions: usize,
    #[arg(long, default_value_t = 200)]
    laguerre_order: usize,
}

impl QuadArgs {
    fn resolve(&self) -> Result<QuadratureConfig, CliError> {
        let cfg = QuadratureConfig {
            abs_tol: self.abs_tol,
            rel_tol: self.rel_tol,
            max_subdivisions: self.max_subdivisions,
            laguerre_order: self.laguerre_order,
        };
        cfg.validate().map_err(CliError::usage)?;
        Ok(cfg)
    }

    fn flags(&self) -> String {
        format!(
            "--abs-tol {:e} --rel-tol {:e} --max-subdivisions {} --laguerre-order {}",
            self.abs_tol, self.rel_tol, self.max_subdivisions, self.laguerre_order
        )
    }
}

#[derive(Debug, Args, Serialize)]
struct TransformArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Evaluation point s (repeatable).
    #[arg(long = "s", required = true)]
    s: Vec<f64>,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Spacing {
    Linear,
    Log,
}

#[derive(Debug, Args, Serialize)]
struct DensityArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Left end of the grid (with --ymax); omit both for an automatic grid
    /// from the 1e-9 to the 1 - 1e-6 quantile.
    #[arg(long, requires = "ymax")]
    ymin: Option<f64>,
    #[arg(long, requires = "ymin")]
    ymax: Option<f64>,
    #[arg(long, default_value_t = 2000)]
    points: usize,
    /// Spacing of an explicit grid.
    #[arg(long, value_enum, default_value_t = Spacing::Linear)]
    spacing: Spacing,
    #[arg(long, default_value_t = InversionConfig::default().abscissa)]
    abscissa: f64,
    #[arg(long, default_value_t = InversionConfig::default().half_height)]
    half_height: f64,
    #[arg(long, default_value_t = InversionConfig::default().step)]
    step: f64,
    #[arg(long, default_value_t = InversionConfig::default().tail_tol)]
    tail_tol: f64,
    #[command(flatten)]
    quad: QuadArgs,
}

#[derive(Debug, Args, Serialize)]
struct SimulateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 10_000)]
    paths: usize,
    #[arg(long, default_value_t = 1e-4)]
    dt: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream_id: u64,
    #[arg(long, default_value_t = 50.0)]
    max_bm_time: f64,
    /// Exponents s of the reported moments E[(b + σ)^-s] (repeatable).
    #[arg(long = "moment-s", default_values_t = [0.5, 1.0, 2.0])]
    moment_s: Vec<f64>,
    /// Write the JSON summary here (csv format only; defaults to stderr).
    #[arg(long)]
    #[serde(skip)]
    summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum CheckArg {
    Dufresne,
    Affine,
    TransformMc,
    Duality,
    Whittaker,
    Inversion,
    DtHalving,
    All,
}

impl CheckArg {
    fn checks(self) -> Vec<Check> {
        match self {
            CheckArg::Dufresne => vec![Check::Dufresne],
            CheckArg::Affine => vec![Check::Affine],
            CheckArg::TransformMc => vec![Check::TransformMc],
            CheckArg::Duality => vec![Check::Duality],
            CheckArg::Whittaker => vec![Check::Whittaker],
            CheckArg::Inversion => vec![Check::Inversion],
            CheckArg::DtHalving => vec![Check::DtHalving],
            CheckArg::All => Check::SUITE.to_vec(),
        }
    }

    fn name(self) -> &'static str {
        match self {
            CheckArg::Dufresne => "dufresne",
            CheckArg::Affine => "affine",
            CheckArg::TransformMc => "transform-mc",
            CheckArg::Duality => "duality",
            CheckArg::Whittaker => "whittaker",
            CheckArg::Inversion => "inversion",
            CheckArg::DtHalving => "dt-halving",
            CheckArg::All => "all",
        }
    }
}

#[derive(Debug, Args, Serialize)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    check: CheckArg,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Run the deliberately broken variant of each selected check instead.
    #[arg(long)]
    negative_control: bool,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Numerical(Error),
    Io(io::Error),
}

impl CliError {
    fn usage(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) | CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "invalid arguments: {m}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Numerical(e)
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(e.into())
    }
}

/// Where a command writes, with the resolved configuration it echoes.
struct Sink {
    out: Box<dyn Write>,
    format: Format,
    command: String,
    config: Value,
}

impl Sink {
    fn header(&mut self) -> io::Result<()> {
        writeln!(self.out, "# bessel-hitting {}", env!("CARGO_PKG_VERSION"))?;
        writeln!(self.out, "# command: {}", self.command)?;
        writeln!(self.out, "# config: {}", self.config)
    }

    fn json(&mut self, body: Value) -> Result<(), CliError> {
        let doc = json!({
            "version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
            "config": self.config,
            "result": body,
        });
        serde_json::to_writer_pretty(&mut self.out, &doc)?;
        writeln!(self.out)?;
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    env_logger::Builder::new()
        .filter_level(match cli.verbose {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            _ => log::LevelFilter::Debug,
        })
        .init();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(e.to_string()))?;
    }
    let open = |default: Format| -> Result<(Box<dyn Write>, Format), CliError> {
        let out: Box<dyn Write> = match &cli.output {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        };
        Ok((out, cli.format.unwrap_or(default)))
    };
    let format_flag = |f: Format| match f {
        Format::Csv => "--format csv",
        Format::Json => "--format json",
    };
    match &cli.command {
        Command::Transform(args) => {
            let (out, format) = open(Format::Csv)?;
            let command = format!(
                "bessel-hitting transform {} {} {} {}",
                args.model.flags(),
                args.s.iter().map(|s| format!("--s {s}")).collect::<Vec<_>>().join(" "),
                args.quad.flags(),
                format_flag(format)
            );
            let config = serde_json::to_value(args)?;
            cmd_transform(args, Sink { out, format, command, config })
        }
        Command::Density(args) => {
            let (out, format) = open(Format::Csv)?;
            let grid = match (args.ymin, args.ymax) {
                (Some(lo), Some(hi)) => format!(
                    "--ymin {lo} --ymax {hi} --spacing {}",
                    if args.spacing == Spacing::Log { "log" } else { "linear" }
                ),
                _ => String::new(),
            };
            let command = format!(
                "bessel-hitting density {} {grid} --points {} --abscissa {} --half-height {} --step {} --tail-tol {:e} {} {}",
                args.model.flags(),
                args.points,
                args.abscissa,
                args.half_height,
                args.step,
                args.tail_tol,
                args.quad.flags(),
                format_flag(format)
            )
            .replace("  ", " ");
            let config = serde_json::to_value(args)?;
            cmd_density(args, Sink { out, format, command, config })
        }
        Command::Simulate(args) => {
            let (out, format) = open(Format::Csv)?;
            let command = format!(
                "bessel-hitting simulate {} --paths {} --dt {} --seed {} --stream-id {} --max-bm-time {} {} {}",
                args.model.flags(),
                args.paths,
                args.dt,
                args.seed,
                args.stream_id,
                args.max_bm_time,
                args.moment_s.iter().map(|s| format!("--moment-s {s}")).collect::<Vec<_>>().join(" "),
                format_flag(format)
            );
            let config = serde_json::to_value(args)?;
            cmd_simulate(args, Sink { out, format, command, config })
        }
        Command::Verify(args) => {
            let (out, format) = open(Format::Json)?;
            let command = format!(
                "bessel-hitting verify --check {} --seed {}{} {}",
                args.check.name(),
                args.seed,
                if args.negative_control { " --negative-control" } else { "" },
                format_flag(format)
            );
            let config = serde_json::to_value(args)?;
            cmd_verify(args, Sink { out, format, command, config })
        }
    }
}

fn cmd_transform(args: &TransformArgs, mut sink: Sink) -> Result<u8, CliError> {
    let (spec, bnd) = args.model.resolve()?;
    let quad = args.quad.resolve()?;
    for &s in &args.s {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(CliError::Usage(format!("--s must be finite and non-negative, got {s}")));
        }
    }
    let values = args
        .s
        .iter()
        .map(|&s| mellin(&spec, &bnd, Complex64::new(s, 0.0), &quad).map(|v| (s, v.re)))
        .collect::<Result<Vec<_>, _>>()?;
    match sink.format {
        Format::Csv => {
            sink.header()?;
            writeln!(sink.out, "s,value")?;
            for (s, v) in &values {
                writeln!(sink.out, "{s},{v}")?;
            }
        }
        Format::Json => {
            let rows: Vec<Value> = values.iter().map(|(s, v)| json!({"s": s, "value": v})).collect();
            sink.json(Value::Array(rows))?;
        }
    }
    sink.out.flush()?;
    Ok(0)
}

fn cmd_density(args: &DensityArgs, mut sink: Sink) -> Result<u8, CliError> {
    let (spec, bnd) = args.model.resolve()?;
    let quad = args.quad.resolve()?;
    let cfg = InversionConfig {
        abscissa: args.abscissa,
        half_height: args.half_height,
        step: args.step,
        tail_tol: args.tail_tol,
    };
    cfg.validate().map_err(CliError::usage)?;
    if args.points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let grid = match (args.ymin, args.ymax) {
        (Some(lo), Some(hi)) => {
            if !(lo > bnd.b() && hi > lo && hi.is_finite()) {
                return Err(CliError::Usage(format!(
                    "grid needs b < ymin < ymax (b = {}, ymin = {lo}, ymax = {hi})",
                    bnd.b()
                )));
            }
            let n = args.points;
            (0..n)
                .map(|k| {
                    let w = k as f64 / (n - 1) as f64;
                    match args.spacing {
                        Spacing::Linear => lo + w * (hi - lo),
                        Spacing::Log => (lo.ln() + w * (hi.ln() - lo.ln())).exp(),
                    }
                })
                .collect()
        }
        _ => Vec::new(),
    };
    let contour = Contour::new(spec, bnd, cfg, &quad)?;
    let grid = if grid.is_empty() {
        contour.auto_grid(args.points, 1e-9, 1e-6)?
    } else {
        grid
    };
    let curve = contour.density_curve(grid)?;
    let cdf = curve
        .grid
        .iter()
        .map(|&y| contour.cdf(y).map(|v| v.clamp(0.0, 1.0)))
        .collect::<Result<Vec<_>, _>>()?;
    let mass = curve.mass();
    match sink.format {
        Format::Csv => {
            sink.header()?;
            writeln!(sink.out, "# mass: {mass}")?;
            writeln!(sink.out, "# most_negative_density: {}", curve.most_negative)?;
            writeln!(sink.out, "# truncation_error: {:e}", curve.truncation_error)?;
            writeln!(sink.out, "y,pdf,cdf")?;
            for ((y, f), cdf_y) in curve.grid.iter().zip(&curve.values).zip(&cdf) {
                writeln!(sink.out, "{y:e},{f:e},{cdf_y:e}")?;
            }
        }
        Format::Json => sink.json(json!({
            "mass": mass,
            "most_negative_density": curve.most_negative,
            "truncation_error": curve.truncation_error,
            "y": curve.grid,
            "pdf": curve.values,
            "cdf": cdf,
        }))?,
    }
    sink.out.flush()?;
    Ok(0)
}

fn cmd_simulate(args: &SimulateArgs, mut sink: Sink) -> Result<u8, CliError> {
    let (spec, bnd) = args.model.resolve()?;
    let cfg = SimConfig {
        dt: args.dt,
        max_bm_time: args.max_bm_time,
        n_paths: args.paths,
        seed: args.seed,
        stream_id: args.stream_id,
        normals_per_step: 1,
    };
    cfg.validate().map_err(CliError::usage)?;
    let batch = simulate_hitting_times(&spec, &bnd, &cfg)?;
    let set = batch.sample_set("sigma")?;
    let moments = args
        .moment_s
        .iter()
        .map(|&s| {
            let est = batch.mellin_estimate(s).ok();
            json!({
                "s": s,
                "mean": est.map(|e: MomentEstimate| e.mean),
                "std_error": est.map(|e| e.std_error),
                "n": est.map_or(0, |e| e.n),
            })
        })
        .collect::<Vec<_>>();
    let summary = json!({
        "n_requested": cfg.n_paths,
        "n_crossed": batch.n_crossed(),
        "excluded_fraction": batch.excluded_fraction(),
        "moments": moments,
    });
    match sink.format {
        Format::Csv => {
            sink.header()?;
            set.write_csv(&mut sink.out)?;
            let doc = json!({"command": sink.command, "config": sink.config, "summary": summary});
            match &args.summary {
                Some(path) => {
                    let mut f = BufWriter::new(File::create(path)?);
                    serde_json::to_writer_pretty(&mut f, &doc)?;
                    writeln!(f)?;
                    f.flush()?;
                }
                None => eprintln!("{}", serde_json::to_string_pretty(&doc)?),
            }
        }
        Format::Json => sink.json(json!({"summary": summary, "samples": set}))?,
    }
    sink.out.flush()?;
    Ok(0)
}

fn cmd_verify(args: &VerifyArgs, mut sink: Sink) -> Result<u8, CliError> {
    let mut reports: Vec<VerificationReport> = Vec::new();
    for check in args.check.checks() {
        let batch = if args.negative_control {
            match check {
                Check::Whittaker | Check::DtHalving if args.check == CheckArg::All => continue,
                Check::Whittaker | Check::DtHalving => {
                    return Err(CliError::Usage(format!(
                        "no negative control exists for --check {}",
                        args.check.name()
                    )))
                }
                _ => run_negative_control(check, args.seed)?,
            }
        } else {
            run_check(check, args.seed)?
        };
        reports.extend(batch);
    }
    let passed = reports.iter().all(|r| r.passed);
    eprint!("{}", format_table(&reports));
    match sink.format {
        Format::Json => sink.json(json!({"passed": passed, "reports": reports}))?,
        Format::Csv => {
            sink.header()?;
            writeln!(sink.out, "name,statistic,threshold,passed,n_samples,seed")?;
            for r in &reports {
                let seed = r.seed.map(|s| s.to_string()).unwrap_or_default();
                writeln!(
                    sink.out,
                    "{},{:e},{:e},{},{},{seed}",
                    r.name, r.statistic, r.threshold, r.passed, r.n_samples
                )?;
            }
        }
    }
    sink.out.flush()?;
    Ok(if passed { 0 } else { 1 })
}
