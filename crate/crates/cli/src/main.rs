use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use mmwave_snc_cli::scenario::{SimSpec, Sweep};
use mmwave_snc_cli::{run_scenario, write, Axis, CliError, Delta, Format, Result, Scenario};

#[derive(Parser)]
#[command(
    name = "mmwave-snc",
    version,
    about = "Backlog and delay bounds for shadowed wireless links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario file.
    Run(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    scenario: PathBuf,
    /// Sweep axis with an optional grid, e.g. `rate:1,2,3` or `none`.
    #[arg(long, value_name = "AXIS[:V,..]")]
    sweep: Option<String>,
    /// Comma-separated violation probabilities.
    #[arg(long, value_name = "LIST")]
    epsilon: Option<String>,
    /// Inverse-moment step, or `limit`.
    #[arg(long, value_name = "VALUE|limit")]
    delta: Option<Delta>,
    /// Run the simulator at every sweep point.
    #[arg(long)]
    simulate: bool,
    #[arg(long)]
    replications: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    format: Format,
    /// Directory for per-point raw simulation samples.
    #[arg(long, value_name = "DIR")]
    dump_samples: Option<PathBuf>,
}

fn parse_list(text: &str, what: &str) -> Result<Vec<f64>> {
    if text.trim().is_empty() {
        return Err(CliError::Usage(format!("the {what} list is empty")));
    }
    text.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("bad {what} value {s:?}")))
        })
        .collect()
}

fn apply_overrides(scenario: &mut Scenario, args: &RunArgs) -> Result<()> {
    if let Some(spec) = &args.sweep {
        let (axis, grid) = match spec.split_once(':') {
            Some((a, g)) => (a, Some(g)),
            None => (spec.as_str(), None),
        };
        let axis: Axis = axis.parse().map_err(CliError::Usage)?;
        let values = match grid {
            Some(g) => parse_list(g, "sweep")?,
            None if axis == scenario.sweep.axis || axis == Axis::None => {
                scenario.sweep.values.clone()
            }
            None => {
                return Err(CliError::Usage(format!(
                    "--sweep {spec} needs a grid, e.g. {spec}:1,2,3"
                )))
            }
        };
        if axis == Axis::Epsilon && scenario.sweep.axis != Axis::Epsilon {
            scenario.query.epsilons.clear();
        }
        scenario.sweep = Sweep {
            axis,
            values: if axis == Axis::None {
                Vec::new()
            } else {
                values
            },
        };
    }
    if let Some(list) = &args.epsilon {
        let eps = parse_list(list, "epsilon")?;
        if scenario.sweep.axis == Axis::Epsilon {
            scenario.sweep.values = eps;
        } else {
            scenario.query.epsilons = eps;
        }
    }
    if let Some(delta) = args.delta {
        scenario.delta = delta;
    }
    if args.simulate || args.replications.is_some() || args.seed.is_some() {
        let sim = scenario.simulate.get_or_insert_with(SimSpec::default);
        if let Some(n) = args.replications {
            sim.replications = n;
        }
        if let Some(seed) = args.seed {
            sim.seed = seed;
        }
    }
    Ok(())
}

fn run(args: RunArgs) -> Result<()> {
    let mut scenario = Scenario::load(&args.scenario)?;
    apply_overrides(&mut scenario, &args)?;
    let table = run_scenario(&scenario)?;
    match &args.out {
        Some(path) => {
            let mut out = BufWriter::new(File::create(path)?);
            write(&mut out, args.format, &scenario, &table)?;
            out.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            write(stdout.lock(), args.format, &scenario, &table)?;
        }
    }
    if let Some(dir) = &args.dump_samples {
        std::fs::create_dir_all(dir)?;
        for (i, samples) in table.samples.iter().enumerate() {
            if let Some(samples) = samples {
                let file = File::create(dir.join(format!("point-{i}.csv")))?;
                samples.write_samples(BufWriter::new(file))?;
            }
        }
    }
    Ok(())
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run(args) => run(args),
    };
    if let Err(e) = result {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
