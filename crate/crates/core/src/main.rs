use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sedpccu::harness::{compare, converge, load_config, run_case, CaseConfig, CaseKind};
use sedpccu::{Result, SolverError};

/// Shallow-water sediment transport on Cartesian grids.
#[derive(Parser, Debug)]
#[command(name = "sedpccu", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a case and write CSV snapshots.
    Run(RunArgs),
    /// Self-convergence study over successively doubled grids.
    Converge(ConvergeArgs),
    /// Compare a snapshot with a measured profile.
    Compare(CompareArgs),
}

#[derive(Args, Debug)]
struct CaseArgs {
    /// Built-in case; also the defaults for keys missing from --config.
    #[arg(long)]
    case: Option<CaseKind>,
    /// TOML configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl CaseArgs {
    fn load(&self) -> Result<CaseConfig> {
        match (&self.config, self.case) {
            (Some(path), case) => load_config(path, case),
            (None, Some(case)) => Ok(CaseConfig::defaults(case)),
            (None, None) => Err(SolverError::config("case", "give --case or --config")),
        }
    }
}

#[derive(Args, Debug)]
struct RunArgs {
    #[command(flatten)]
    case: CaseArgs,
    #[arg(long)]
    nx: Option<usize>,
    #[arg(long)]
    ny: Option<usize>,
    #[arg(long)]
    cfl: Option<f64>,
    #[arg(long)]
    t_end: Option<f64>,
    /// Output directory; defaults to `out/<case>`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ConvergeArgs {
    #[command(flatten)]
    case: CaseArgs,
    /// Resolutions, each double the previous.
    #[arg(long, value_delimiter = ',', default_value = "50,100,200")]
    n_list: Vec<usize>,
    /// Fields to measure.
    #[arg(long, value_delimiter = ',', default_value = "h,zb")]
    field: Vec<String>,
    #[arg(long)]
    t_end: Option<f64>,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long)]
    snapshot: PathBuf,
    /// Two-column `x value` file.
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "eta")]
    field: String,
}

fn run(args: RunArgs) -> Result<()> {
    let mut cfg = args.case.load()?;
    if let Some(n) = args.nx {
        cfg.nx = n;
    }
    if let Some(n) = args.ny {
        cfg.ny = n;
    }
    if let Some(c) = args.cfl {
        cfg.cfl = c;
    }
    if let Some(t) = args.t_end {
        cfg.t_end = t;
        cfg.snapshots.retain(|&s| s <= t);
    }
    cfg.output_dir = args
        .out
        .or(cfg.output_dir)
        .or_else(|| Some(PathBuf::from("out").join(cfg.case.name())));
    for r in run_case(&cfg)? {
        println!(
            "{}: t = {:.6}, {} steps, min h = {:.3e}, resonant cell-steps = {}, {:.2?}",
            r.label, r.t, r.steps, r.min_h, r.resonance_count, r.wall_time
        );
        for (_, path) in &r.snapshots {
            if let Some(p) = path {
                println!("  wrote {}", p.display());
            }
        }
    }
    Ok(())
}

fn study(args: ConvergeArgs) -> Result<()> {
    let mut cfg = args.case.load()?;
    if let Some(t) = args.t_end {
        cfg.t_end = t;
    }
    let fields: Vec<&str> = args.field.iter().map(String::as_str).collect();
    for table in converge(&cfg, &args.n_list, &fields)? {
        println!("field {}", table.field);
        println!("{:>6} {:>14} {:>8}", "N", "L1 diff", "rate");
        for row in &table.rows {
            let diff = row.diff.map_or("-".to_string(), |d| format!("{d:.6e}"));
            let rate = row.rate.map_or("-".to_string(), |r| format!("{r:.3}"));
            println!("{:>6} {:>14} {:>8}", row.n, diff, rate);
        }
    }
    Ok(())
}

fn check(args: CompareArgs) -> Result<()> {
    let c = compare(&args.snapshot, &args.data, &args.field)?;
    println!("{:>12} {:>12} {:>12}", "x", "measured", "simulated");
    for (x, m, s) in &c.points {
        println!("{x:>12.5} {m:>12.5} {s:>12.5}");
    }
    println!("mean |misfit| of {} = {:.6e}", c.field, c.misfit);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Run(a) => run(a),
        Command::Converge(a) => study(a),
        Command::Compare(a) => check(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
