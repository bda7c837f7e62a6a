use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use magnetic_eigenmaps::generators::GeneratorSpec;
use magnetic_eigenmaps::pipeline::{
    cmd_diagnose, cmd_diffusion_baseline, cmd_embed, cmd_generate, cmd_spectrum, InputSource, RunConfig, SolverKind,
};
use magnetic_eigenmaps::{Charge, Error};

#[derive(Parser)]
#[command(name = "meigen", version, about = "Torus embeddings of directed graphs from magnetic Laplacian eigenvectors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic graph as an edge list (plus labels.csv when labeled).
    Generate {
        /// e.g. `flow-groups:seed=3` or `cluster-hubs`
        #[arg(long)]
        generator: String,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Phase embedding: coords.csv, spectrum.csv, diagnostics.json and plots.
    Embed(RunArgs),
    /// Lowest eigenvalues at g and at 0.
    Spectrum(RunArgs),
    /// Frustration, holonomies, bounds and potential as JSON.
    Diagnose(RunArgs),
    /// Real eigenvectors 1 and 2 of the undirected problem.
    Baseline(RunArgs),
}

#[derive(Clone, Copy, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Solver {
    Dense,
    Power,
}

#[derive(Args, Default)]
struct RunArgs {
    /// Edge list, or GML when the extension is `.gml`.
    #[arg(long, conflicts_with = "generator")]
    input: Option<PathBuf>,
    #[arg(long)]
    generator: Option<String>,
    /// TOML file with the same keys as these flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Charge as `k/m` in [0, 1/2].
    #[arg(long)]
    g: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    /// Eigen indices for the two torus axes, `i,j`.
    #[arg(long)]
    axes: Option<String>,
    #[arg(long, value_enum)]
    solver: Option<Solver>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    drop_isolated: bool,
    /// Shift one phase axis after gauge fixing, `index,angle` (repeatable).
    #[arg(long)]
    rotate: Vec<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    input: Option<PathBuf>,
    generator: Option<toml::Value>,
    g: Option<String>,
    k: Option<usize>,
    axes: Option<[usize; 2]>,
    solver: Option<Solver>,
    tol: Option<f64>,
    max_iter: Option<usize>,
    seed: Option<u64>,
    drop_isolated: Option<bool>,
    rotate: Option<Vec<(usize, f64)>>,
    out: Option<PathBuf>,
}

/// Marks errors in user-supplied arguments or config (exit code 2).
#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn parse_pair<T: std::str::FromStr>(text: &str, what: &str) -> anyhow::Result<(usize, T)> {
    let (a, b) = text
        .split_once(',')
        .ok_or_else(|| usage(format!("{what}: expected two comma-separated values, got `{text}`")))?;
    let a = a.trim().parse().map_err(|_| usage(format!("{what}: bad index `{a}`")))?;
    let b = b.trim().parse().map_err(|_| usage(format!("{what}: bad value `{b}`")))?;
    Ok((a, b))
}

fn input_from_path(path: PathBuf) -> InputSource {
    let is_gml = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("gml"));
    if is_gml {
        InputSource::Gml(path)
    } else {
        InputSource::EdgeList(path)
    }
}

fn generator_from_toml(value: toml::Value) -> anyhow::Result<GeneratorSpec> {
    match value {
        toml::Value::String(s) => Ok(GeneratorSpec::parse_cli(&s)?),
        other => other
            .try_into()
            .map_err(|e| usage(format!("config: bad generator table: {e}"))),
    }
}

fn read_config(path: &Path) -> anyhow::Result<FileConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn build_config(args: RunArgs) -> anyhow::Result<RunConfig> {
    let file = match &args.config {
        Some(p) => read_config(p)?,
        None => FileConfig::default(),
    };
    let input = if let Some(p) = args.input {
        input_from_path(p)
    } else if let Some(spec) = args.generator {
        InputSource::Generator(GeneratorSpec::parse_cli(&spec)?)
    } else if let Some(p) = file.input {
        if file.generator.is_some() {
            bail!(usage("config: set either `input` or `generator`, not both"));
        }
        input_from_path(p)
    } else if let Some(g) = file.generator {
        InputSource::Generator(generator_from_toml(g)?)
    } else {
        bail!(usage("no input: pass --input, --generator or a config with one of them"));
    };

    let mut cfg = RunConfig::new(input);
    if let Some(g) = args.g.or(file.g) {
        cfg.charge = g.parse::<Charge>().map_err(|e| usage(e.to_string()))?;
    }
    if let Some(k) = args.k.or(file.k) {
        cfg.k = k;
    }
    if let Some(axes) = args.axes {
        cfg.axes = parse_pair::<usize>(&axes, "--axes")?;
    } else if let Some([a, b]) = file.axes {
        cfg.axes = (a, b);
    }
    // axes beyond the default k pull k up with them
    if args.k.or(file.k).is_none() {
        cfg.k = cfg.k.max(cfg.axes.0.max(cfg.axes.1) + 1);
    }
    cfg.solver = match args.solver.or(file.solver) {
        Some(Solver::Power) => SolverKind::Power,
        _ => SolverKind::Dense,
    };
    if let Some(t) = args.tol.or(file.tol) {
        cfg.power.tol = t;
    }
    if let Some(m) = args.max_iter.or(file.max_iter) {
        cfg.power.max_iter = m;
    }
    cfg.seed = args.seed.or(file.seed);
    cfg.drop_isolated = args.drop_isolated || file.drop_isolated.unwrap_or(false);
    cfg.rotate = if args.rotate.is_empty() {
        file.rotate.unwrap_or_default()
    } else {
        args.rotate
            .iter()
            .map(|r| parse_pair::<f64>(r, "--rotate"))
            .collect::<anyhow::Result<_>>()?
    };
    if let Some(out) = args.out.or(file.out) {
        cfg.out_dir = out;
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn tidy(x: f64) -> f64 {
    if x.abs() < 5e-11 {
        0.0
    } else {
        x
    }
}

fn print_warnings(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let mut stdout = std::io::stdout().lock();
    match cli.command {
        Command::Generate { generator, seed, out } => {
            let mut spec = GeneratorSpec::parse_cli(&generator)?;
            if let Some(s) = seed {
                spec = spec.with_seed(s);
            }
            let (graph, labels) = cmd_generate(&spec, &out)?;
            writeln!(
                stdout,
                "wrote {} ({} nodes, {} arcs){}",
                out.join("graph.edges").display(),
                graph.node_count(),
                graph.arc_count(),
                if labels.is_some() { " and labels.csv" } else { "" }
            )?;
        }
        Command::Embed(args) => {
            let cfg = build_config(args)?;
            let run = cmd_embed(&cfg)?;
            print_warnings(&run.report.warnings);
            writeln!(stdout, "nodes {}  edges {}  g {}", run.report.nodes, run.report.edges, run.report.charge)?;
            writeln!(stdout, "lambda_0 {:.6e}  frustration {:.6}", run.report.lambda0, run.report.frustration)?;
            for s in &run.report.cluster_scores {
                writeln!(stdout, "cluster score on axis {}: {:.3}", s.eigen_index, s.score)?;
            }
            writeln!(stdout, "outputs in {}", cfg.out_dir.display())?;
        }
        Command::Spectrum(args) => {
            let cfg = build_config(args)?;
            let run = cmd_spectrum(&cfg)?;
            print_warnings(&run.report.warnings);
            writeln!(stdout, "k  lambda_g  lambda_0")?;
            for (k, (a, b)) in run.eigen.eigenvalues().iter().zip(&run.baseline).enumerate() {
                // round-off below the solver tolerance would print as -0.0000000000
                let (a, b) = (tidy(*a), tidy(*b));
                writeln!(stdout, "{k}  {a:.10}  {b:.10}")?;
            }
        }
        Command::Diagnose(args) => {
            let cfg = build_config(args)?;
            let report = cmd_diagnose(&cfg)?;
            print_warnings(&report.warnings);
            let failed: Vec<&str> = report.bounds.iter().filter(|b| !b.holds()).map(|b| b.name.as_str()).collect();
            writeln!(
                stdout,
                "lambda_0 {:.6e}  epsilon {:.6}  beta1 {}  potential {}",
                report.lambda0,
                report.epsilon,
                report.beta1,
                if report.potential.exists { "exists" } else { "obstructed" }
            )?;
            if failed.is_empty() {
                writeln!(stdout, "all {} bounds hold", report.bounds.len())?;
            } else {
                writeln!(stdout, "violated bounds: {}", failed.join(", "))?;
            }
        }
        Command::Baseline(args) => {
            let cfg = build_config(args)?;
            let (loaded, diff) = cmd_diffusion_baseline(&cfg)?;
            print_warnings(&loaded.warnings);
            writeln!(
                stdout,
                "eigenvalues {:?}; wrote baseline.csv and baseline.svg to {}",
                diff.eigenvalues,
                cfg.out_dir.display()
            )?;
        }
    }
    Ok(())
}

fn is_broken_pipe(err: &anyhow::Error) -> bool {
    err.downcast_ref::<std::io::Error>()
        .is_some_and(|e| e.kind() == std::io::ErrorKind::BrokenPipe)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(e) if e.is_parse_error() => 2,
        Some(e) if e.is_numerical() => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("error")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // the reader went away, e.g. `meigen spectrum | head`
        Err(err) if is_broken_pipe(&err) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
