//! Command-line driver: built-in examples, benchmark tables and problem files.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use igabem::experiments::{
    emit_outputs, format_block, method_of, run_builtin, run_loaded, table, Block, ClassOrders, Method, RunConfig,
};
use igabem::problem::load_problem_file;

#[derive(Parser)]
#[command(
    name = "igabem",
    version,
    about = "Symmetric Galerkin boundary elements for the 2D Laplace equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a built-in example (`example1` to `example4`) or a problem file.
    Run {
        #[command(subcommand)]
        target: Target,
    },
    /// Reproduce one of the benchmark tables 1 to 8.
    Table {
        number: usize,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Subcommand)]
enum Target {
    /// Problem described by a TOML file.
    File {
        path: PathBuf,
        #[command(flatten)]
        opts: RunArgs,
    },
    #[command(external_subcommand)]
    Builtin(Vec<String>),
}

#[derive(Args, Clone, Debug, Default)]
struct OutputArgs {
    /// Directory receiving the CSV and plot-data files.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write zero in the `seconds` column so that output is reproducible.
    #[arg(long)]
    no_timing: bool,
}

#[derive(Args, Clone, Debug, Default)]
struct RunArgs {
    /// iga, curvilinear (c-sgbem), standard (s-sgbem) or iga-collocation.
    #[arg(long)]
    method: Option<String>,
    #[arg(long)]
    degree: Option<usize>,
    /// Number of uniform refinements.
    #[arg(long)]
    levels: Option<usize>,
    /// Comma-separated element counts, one row each.
    #[arg(long, value_delimiter = ',')]
    elements: Option<Vec<usize>>,
    /// Example variant: t1/t2 (example 1), c2/c1/uniform (example 2), a/b (example 3).
    #[arg(long)]
    variant: Option<String>,
    /// Gauss nodes per direction for every pair class.
    #[arg(long)]
    quad_order: Option<usize>,
    #[arg(long)]
    quad_coincident: Option<usize>,
    #[arg(long)]
    quad_adjacent: Option<usize>,
    #[arg(long)]
    quad_disjoint: Option<usize>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Parser)]
#[command(no_binary_name = true)]
struct BuiltinArgs {
    name: String,
    #[command(flatten)]
    opts: RunArgs,
}

impl RunArgs {
    fn config(&self, default_method: Method, default_levels: usize) -> Result<RunConfig> {
        let method = match &self.method {
            Some(m) => m.parse()?,
            None => default_method,
        };
        let mut cfg = RunConfig::new(method, self.levels.unwrap_or(default_levels)).timing(!self.output.no_timing);
        cfg.degree = self.degree;
        cfg.elements = self.elements.clone();
        cfg.variant = self.variant.clone();
        cfg.quad_order = self.quad_order;
        cfg.class_orders = ClassOrders {
            coincident: self.quad_coincident,
            adjacent: self.quad_adjacent,
            disjoint: self.quad_disjoint,
        };
        Ok(cfg)
    }
}

fn report(out: &mut dyn Write, blocks: &[Block], output: &OutputArgs, stem: &str) -> Result<()> {
    for b in blocks {
        writeln!(out, "{}", format_block(b))?;
    }
    if let Some(dir) = &output.out {
        for p in emit_outputs(blocks, dir, stem)? {
            writeln!(out, "wrote {}", p.display())?;
        }
    }
    Ok(())
}

fn example_number(name: &str) -> Result<usize> {
    name.strip_prefix("example")
        .and_then(|n| n.parse().ok())
        .with_context(|| format!("unknown target '{name}'; expected example1 to example4 or file <path>"))
}

fn run_file(out: &mut dyn Write, path: &Path, opts: &RunArgs) -> Result<()> {
    let (problem, settings) = load_problem_file(path)?;
    let cfg = opts.config(method_of(&settings)?, 0)?;
    let block = run_loaded(problem, &settings, &cfg, &path.display().to_string())?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("problem");
    report(out, &[block], &opts.output, stem)
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Run {
            target: Target::File { path, opts },
        } => run_file(out, &path, &opts),
        Command::Run {
            target: Target::Builtin(args),
        } => {
            let args = BuiltinArgs::try_parse_from(&args)?;
            let n = example_number(&args.name)?;
            let cfg = args.opts.config(Method::Iga, 4)?;
            let block = run_builtin(n, &cfg)?;
            report(out, &[block], &args.opts.output, &args.name)
        }
        Command::Table { number, output } => {
            if !(1..=8).contains(&number) {
                bail!("there is no table {number}; choose 1 to 8");
            }
            let blocks = table(number, !output.no_timing)?;
            report(out, &blocks, &output, &format!("table{number}"))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse(), &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e)
            if e.downcast_ref::<std::io::Error>()
                .is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) =>
        {
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
