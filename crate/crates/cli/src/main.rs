//! `addbasis`: sumsets, bounds, lattice coverings and basis synthesis from
//! JSON instance files, with JSON reports.

mod commands;
mod error;
mod instance;
mod report;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use addbasis_core::limits;
use clap::{Parser, Subcommand, ValueEnum};

use commands::{bounds, lattice, search, sumset, verify, Outcome};
use error::{CliError, EXIT_INVARIANT};
use report::Report;

#[derive(Parser)]
#[command(
    name = "addbasis",
    version,
    about = "Additive bases, subset sums and lattice coverings"
)]
struct Cli {
    /// Worker threads for data-parallel loops (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Seed for every random choice in this invocation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    /// Leave wall-clock timings out of the report.
    #[arg(long, global = true)]
    omit_timing: bool,
    /// Largest group order enumerated densely.
    #[arg(long, global = true)]
    max_order: Option<u64>,
    /// Largest cube dimension k*r enumerated.
    #[arg(long, global = true)]
    max_cube_dim: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Subset-sum trace and additive-basis verdict for a group_sets instance.
    Sumset {
        instance: PathBuf,
        /// Use only the first k sets.
        #[arg(long)]
        k: Option<usize>,
        /// Decompose this element, given as comma-separated coordinates.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        witness: Option<Vec<i64>>,
    },
    /// Compare a lower bound with the measured sumset size.
    Bounds {
        instance: PathBuf,
        #[arg(long, value_enum)]
        which: bounds::Which,
    },
    /// Covering numbers, obliqueness, and conversions between lattices and basis systems.
    Lattice {
        instance: PathBuf,
        #[arg(long)]
        cover: bool,
        #[arg(long)]
        oblique: bool,
        #[arg(long)]
        from_bases: bool,
        #[arg(long)]
        to_bases: bool,
        /// Block shape for int_lattice inputs.
        #[arg(long, requires_all = ["k", "r"])]
        p: Option<u64>,
        #[arg(long, requires = "p")]
        k: Option<usize>,
        #[arg(long, requires = "p")]
        r: Option<usize>,
        /// Run synthesis even when p < k (failures are reported, not fatal).
        #[arg(long)]
        allow_small_field: bool,
    },
    /// Random search for small covering numbers or sumsets.
    Search {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1000)]
        budget: u64,
        #[arg(long, value_enum, default_value = "min_cover")]
        mode: search::Mode,
        /// Also write one CSV row per sample.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run the acceptance criteria.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// Also write one CSV row per criterion.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Print a bundled JSON schema.
    Schema {
        #[arg(value_enum)]
        which: SchemaKind,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemaKind {
    Instance,
    Report,
}

fn write_csv(path: &Path, rows: &[Vec<String>]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?;
    for row in rows {
        w.write_record(row).map_err(|e| CliError::io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::io(e.to_string()))
}

fn execute(cli: &Cli) -> Result<(&'static str, Outcome), CliError> {
    let seed = cli.seed;
    Ok(match &cli.command {
        Command::Sumset { instance, k, witness } => {
            let loaded = instance::load(instance)?;
            let args = sumset::Args {
                k: *k,
                witness: witness.clone(),
            };
            ("sumset", sumset::run(loaded, &args)?)
        }
        Command::Bounds { instance, which } => ("bounds", bounds::run(instance::load(instance)?, *which)?),
        Command::Lattice {
            instance,
            cover,
            oblique,
            from_bases,
            to_bases,
            p,
            k,
            r,
            allow_small_field,
        } => {
            let loaded = instance::load(instance)?;
            let args = lattice::Args {
                cover: *cover,
                oblique: *oblique,
                from_bases: *from_bases,
                to_bases: *to_bases,
                shape: p.zip(*k).zip(*r).map(|((p, k), r)| (p, k, r)),
                allow_small_field: *allow_small_field,
                seed,
            };
            ("lattice", lattice::run(loaded, &args)?)
        }
        Command::Search {
            k, r, p, budget, mode, ..
        } => {
            let args = search::Args {
                k: *k,
                r: *r,
                p: *p,
                budget: *budget,
                mode: *mode,
                seed,
            };
            ("search", search::run(&args)?)
        }
        Command::Verify { suite, .. } => ("verify", verify::run(suite, seed, !cli.omit_timing)?),
        Command::Schema { .. } => unreachable!("handled before execute"),
    })
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    if let Command::Schema { which } = cli.command {
        let text = match which {
            SchemaKind::Instance => instance::INSTANCE_SCHEMA,
            SchemaKind::Report => instance::REPORT_SCHEMA,
        };
        print!("{text}");
        return Ok(0);
    }
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::validation("invalid_threads", e.to_string()))?;
    }
    if let Some(cap) = cli.max_order {
        limits::set_max_order(cap);
    }
    if let Some(cap) = cli.max_cube_dim {
        limits::set_max_cube_dim(cap);
    }

    let start = Instant::now();
    let (command, outcome) = execute(cli)?;
    let mut report = Report::new(command, outcome.input_digest, cli.seed, outcome.outputs);
    if !cli.omit_timing {
        report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    let value = serde_json::to_value(&report).expect("report serializes");
    let problems = instance::validate_report(&value);
    if !problems.is_empty() {
        return Err(CliError {
            exit: EXIT_INVARIANT,
            class: "invariant",
            code: "report_schema".into(),
            message: problems.join("; "),
        });
    }

    let csv_path = match &cli.command {
        Command::Search { csv, .. } | Command::Verify { csv, .. } => csv.as_deref(),
        _ => None,
    };
    if let (Some(path), Some(rows)) = (csv_path, &outcome.csv) {
        write_csv(path, rows)?;
    }
    let text = report.to_json();
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(format!("{}: {e}", path.display())))?,
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .map_err(|e| CliError::io(e.to_string()))?;
        }
    }
    Ok(outcome.exit)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            let body = serde_json::json!({ "error": e });
            eprintln!("{body}");
            ExitCode::from(e.exit)
        }
    }
}
