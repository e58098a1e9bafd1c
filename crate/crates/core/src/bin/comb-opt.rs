use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use combopt::pipeline::{
    configure_threads, exit_code, render, run, Family, OutputFormat, RunConfig, RunOutput, TaskConfig, Tolerances,
};

/// Optimal networks for transforming uses of unitary channels.
#[derive(Parser, Debug)]
#[command(name = "comb-opt", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct Common {
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Result file (figure directory for reproduce-figures).
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1e-10)]
    solver_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    comb_tol: f64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    circuit_tol: f64,
    #[arg(long, global = true, default_value_t = 200_000)]
    max_iter: usize,
    #[arg(long, global = true, default_value_t = 2000)]
    haar_samples: usize,
    /// Largest explicit comb dimension that is built and checked.
    #[arg(long, global = true, default_value_t = 1024)]
    explicit_max_dim: usize,
    /// Include wall time in the record.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Spin β to spin a.
    IrrepTransform {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        a: f64,
    },
    /// 1→N cloning of qubit unitaries.
    CloneSu2 {
        #[arg(long)]
        n: usize,
    },
    /// 1→N cloning of qubit phase gates.
    ClonePhase {
        #[arg(long)]
        n: usize,
        /// Check the circuit and isometry realizations (n = 2).
        #[arg(long)]
        verify_circuit: bool,
    },
    /// 1→2 cloning of SU(d) unitaries.
    CloneSud {
        #[arg(long)]
        d: usize,
    },
    /// Solve and additionally check the parallel realization and random combs.
    Verify {
        #[command(subcommand)]
        family: VerifyFamily,
        #[arg(long, global = true, default_value_t = 100)]
        trials: usize,
    },
    /// Write the figure data as CSV files.
    ReproduceFigures,
}

#[derive(Subcommand, Debug)]
enum VerifyFamily {
    IrrepTransform {
        #[arg(long)]
        beta: f64,
        #[arg(long)]
        a: f64,
    },
    CloneSu2 {
        #[arg(long)]
        n: usize,
    },
    ClonePhase {
        #[arg(long)]
        n: usize,
    },
    CloneSud {
        #[arg(long)]
        d: usize,
    },
}

impl VerifyFamily {
    fn family(&self) -> Family {
        match *self {
            VerifyFamily::IrrepTransform { beta, a } => Family::IrrepTransform { beta, a },
            VerifyFamily::CloneSu2 { n } => Family::CloneSu2 { n },
            VerifyFamily::ClonePhase { n } => Family::ClonePhase { n },
            VerifyFamily::CloneSud { d } => Family::CloneSud { d },
        }
    }
}

fn config(cli: &Cli) -> RunConfig {
    let task = match &cli.command {
        Command::IrrepTransform { beta, a } => TaskConfig::Solve(Family::IrrepTransform { beta: *beta, a: *a }),
        Command::CloneSu2 { n } => TaskConfig::Solve(Family::CloneSu2 { n: *n }),
        Command::ClonePhase { n, .. } => TaskConfig::Solve(Family::ClonePhase { n: *n }),
        Command::CloneSud { d } => TaskConfig::Solve(Family::CloneSud { d: *d }),
        Command::Verify { family, .. } => TaskConfig::Verify(family.family()),
        Command::ReproduceFigures => TaskConfig::ReproduceFigures,
    };
    let c = &cli.common;
    let mut cfg = RunConfig::new(task);
    cfg.tolerances = Tolerances { solver: c.solver_tol, comb: c.comb_tol, circuit: c.circuit_tol };
    cfg.seed = c.seed;
    cfg.format = match c.format {
        Format::Json => OutputFormat::Json,
        Format::Csv => OutputFormat::Csv,
    };
    cfg.output = c.output.clone();
    cfg.max_iter = c.max_iter;
    cfg.haar_samples = c.haar_samples;
    cfg.explicit_max_dim = c.explicit_max_dim;
    cfg.timing = c.timing;
    if let Command::ClonePhase { verify_circuit, .. } = cli.command {
        cfg.verify_circuit = verify_circuit;
    }
    if let Command::Verify { trials, .. } = cli.command {
        cfg.trials = trials;
    }
    if matches!(cfg.task, TaskConfig::ReproduceFigures) && cfg.output.is_none() {
        cfg.output = Some(PathBuf::from("figures"));
    }
    cfg
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let cfg = config(&cli);
    let result = run(&cfg);
    match &result {
        Ok(RunOutput::Record(rec)) => {
            if cfg.output.is_none() {
                match render(rec, cfg.format) {
                    Ok(s) => print!("{s}"),
                    Err(e) => eprintln!("error: {e}"),
                }
            }
            for f in &rec.failures {
                eprintln!("verification failed: {f}");
            }
        }
        Ok(RunOutput::Figures(figs)) => {
            for path in &figs.files {
                println!("{}", path.display());
            }
            for f in &figs.failures {
                eprintln!("verification failed: {f}");
            }
        }
        Err(e) => eprintln!("error: {e}"),
    }
    ExitCode::from(exit_code(&result) as u8)
}
