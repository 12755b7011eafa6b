//! Command-line front end: sweeps to CSV, plus an oracle audit.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use bufrelay::model::BufferCapacity;
use bufrelay::par::{with_threads, Execution};
use bufrelay::schemes::SchemeId;
use bufrelay::sweep::{parse_values, sweep_csv, SourcePower, SweepAxis, SweepSpec, SweepTemplate};
use bufrelay::SweepError;

#[derive(Debug, Parser)]
#[command(
    name = "bufrelay",
    version,
    about = "Relay selection and power allocation sweeps for buffered relay networks"
)]
#[command(args_conflicts_with_subcommands = true)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    sweep: SweepArgs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Audit the boundary-power rule and JPASS against brute force
    #[cfg(feature = "oracle")]
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Schemes, comma separated (jpass, rss, mmrs, ba-sor, min-power, chd)
    #[arg(long, default_value = "jpass,rss,mmrs,ba-sor,min-power,chd")]
    scheme: String,
    /// Sweep axis (pmax_db, n, sigma_eta_sq); inferred from the multi-valued flag
    #[arg(long)]
    axis: Option<String>,
    /// Relay count(s): `6`, `3,4,5` or `3:8:1`
    #[arg(long, default_value = "6")]
    n: String,
    /// Relay power limit in dB: single value, list, or `start:stop:step`
    #[arg(long, default_value = "21")]
    pmax_db: String,
    /// Minimum S-R rate (bits/s/Hz)
    #[arg(long, default_value_t = 1.0)]
    r1: f64,
    /// Minimum R-D rate (bits/s/Hz)
    #[arg(long, default_value_t = 1.0)]
    r2: f64,
    /// Source power equals the relay power limit (the default unless --ps-db is given)
    #[arg(long, conflicts_with = "ps_db")]
    ps_follows_pmax: bool,
    /// Source power as a multiple of the relay power limit
    #[arg(long, conflicts_with = "ps_db")]
    ps_mult: Option<f64>,
    /// Fixed source power in dB
    #[arg(long)]
    ps_db: Option<f64>,
    /// Buffer capacity in bits
    #[arg(long, conflicts_with = "infinite_buffer")]
    qmax: Option<f64>,
    /// Remove the buffer constraints
    #[arg(long)]
    infinite_buffer: bool,
    /// Initial bits in every relay buffer (default: half the capacity, or a standing backlog)
    #[arg(long)]
    qs: Option<f64>,
    #[arg(long, default_value_t = 50_000)]
    slots: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Channel estimation error variance(s)
    #[arg(long, default_value = "0")]
    sigma_eta_sq: String,
    /// Under imperfect CSI, a hop decided above its true capacity delivers nothing
    #[arg(long)]
    csi_outage: bool,
    /// Reset buffers to the initial fill every slot
    #[arg(long)]
    per_slot_reset: bool,
    /// Worker threads (default: all cores)
    #[arg(long)]
    threads: Option<usize>,
    /// Output file (default: stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[cfg(feature = "oracle")]
#[derive(Debug, Args)]
struct VerifyArgs {
    /// Random feasible instances for the boundary check
    #[arg(long, default_value_t = 10_000)]
    instances: usize,
    /// Random states for the JPASS vs exhaustive comparison
    #[arg(long, default_value_t = 1_000)]
    contexts: usize,
    /// Grid points per power interval
    #[arg(long, default_value_t = 1_000)]
    grid: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn build_spec(a: &SweepArgs) -> Result<SweepSpec, SweepError> {
    let schemes = a
        .scheme
        .split(',')
        .map(|s| {
            s.trim().parse::<SchemeId>().map_err(|_| SweepError::UnknownScheme {
                name: s.trim().to_string(),
                allowed: SchemeId::allowed_names(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;

    let lists = [
        (SweepAxis::PmaxDb, parse_values(&a.pmax_db)?),
        (SweepAxis::RelayCount, parse_values(&a.n)?),
        (SweepAxis::SigmaEtaSq, parse_values(&a.sigma_eta_sq)?),
    ];
    let axis = match &a.axis {
        Some(name) => name.parse::<SweepAxis>()?,
        None => {
            let multi: Vec<SweepAxis> = lists.iter().filter(|(_, v)| v.len() > 1).map(|(ax, _)| *ax).collect();
            match multi.as_slice() {
                [] => SweepAxis::PmaxDb,
                [one] => *one,
                _ => {
                    return Err(SweepError::Invalid(
                        "only one of --pmax-db, --n, --sigma-eta-sq may list several values".into(),
                    ))
                }
            }
        }
    };
    let single = |ax: SweepAxis| -> Result<f64, SweepError> {
        let (_, v) = lists.iter().find(|(a, _)| *a == ax).expect("all axes listed");
        match v.as_slice() {
            [x] => Ok(*x),
            _ => Err(SweepError::Invalid(format!(
                "--{} must be a single value unless it is the sweep axis",
                ax.name().replace('_', "-")
            ))),
        }
    };
    let values = lists
        .iter()
        .find(|(ax, _)| *ax == axis)
        .map(|(_, v)| v.clone())
        .expect("axis listed");

    let source_power = match a.ps_db {
        Some(db) => SourcePower::FixedDb(db),
        None => SourcePower::FollowsPmax {
            mult: a.ps_mult.unwrap_or(1.0),
        },
    };
    let buffer = if a.infinite_buffer {
        BufferCapacity::Infinite
    } else {
        BufferCapacity::Finite(a.qmax.unwrap_or(bufrelay::sim::DEFAULT_FINITE_CAPACITY))
    };
    let relay_count = if axis == SweepAxis::RelayCount {
        2
    } else {
        single(SweepAxis::RelayCount)? as usize
    };
    let template = SweepTemplate {
        pmax_db: if axis == SweepAxis::PmaxDb {
            0.0
        } else {
            single(SweepAxis::PmaxDb)?
        },
        source_power,
        relay_count,
        r1: a.r1,
        r2: a.r2,
        buffer,
        initial_fill: a.qs,
        slots: a.slots,
        seed: a.seed,
        sigma_eta_sq: if axis == SweepAxis::SigmaEtaSq {
            0.0
        } else {
            single(SweepAxis::SigmaEtaSq)?
        },
        csi_outage: a.csi_outage,
        per_slot_reset: a.per_slot_reset,
    };
    if axis != SweepAxis::RelayCount && (relay_count < 2 || single(SweepAxis::RelayCount)?.fract() != 0.0) {
        return Err(SweepError::Invalid("--n must be an integer >= 2".into()));
    }
    let spec = SweepSpec {
        axis,
        values,
        template,
        schemes,
    };
    spec.validate()?;
    Ok(spec)
}

fn run_sweep_command(a: &SweepArgs) -> Result<(), SweepError> {
    let spec = build_spec(a)?;
    let go = || sweep_csv(&spec, Execution::default());
    let csv = match a.threads {
        Some(t) => with_threads(t.max(1), go),
        None => go(),
    }?;
    match &a.out {
        Some(path) => File::create(path)?.write_all(csv.as_bytes())?,
        None => io::stdout().lock().write_all(csv.as_bytes())?,
    }
    Ok(())
}

#[cfg(feature = "oracle")]
fn run_verify(v: &VerifyArgs) -> ExitCode {
    let report = bufrelay::oracle::audit(v.instances, v.contexts, v.grid, v.seed, Execution::default());
    println!(
        "boundary: {} instances, {} grid points, max grid excess {:.3e}, violations {}",
        report.instances, v.grid, report.max_grid_excess, report.boundary_violations
    );
    println!(
        "jpass vs exhaustive: {} contexts, mismatches {}",
        report.contexts, report.selection_mismatches
    );
    if report.passed() {
        println!("PASS");
        ExitCode::SUCCESS
    } else {
        println!("FAIL");
        ExitCode::FAILURE
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match &cli.command {
        #[cfg(feature = "oracle")]
        Some(Command::Verify(v)) => run_verify(v),
        #[allow(unreachable_patterns)]
        _ => match run_sweep_command(&cli.sweep) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        },
    }
}
