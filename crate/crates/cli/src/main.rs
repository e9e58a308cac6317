//! `subplanck` command-line front end.
//!
//! Every command resolves its flags, an optional `--config` file and the
//! built-in defaults into one flat set of `key = value` settings. Those
//! settings are stored in the `<output>.meta.json` sidecar, which `--config`
//! also accepts, so a run can be repeated exactly.

mod jobs;
mod output;
mod settings;

use std::io::{self, Write as _};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use subplanck::fock::{IMAGINARY_RESIDUE_LIMIT, OVERLAP_SLACK};
use subplanck::metrics::{BISECTION_TOLERANCE, RADIUS_BOUND, SCAN_BOUND, SCAN_STEP, ZERO_THRESHOLD};
use subplanck::phasespace::{default_policy, DEGENERATE_ORIGIN, WEIGHT_TOLERANCE};

use jobs::{CommandKind, Job, Outcome};
use output::{tagged_path, Format};
use settings::{sidecar_path, Settings};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{flag}: {message}")]
    Usage { flag: String, message: String },
    #[error(transparent)]
    Numeric(#[from] subplanck::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    pub fn usage(flag: &str, message: String) -> Self {
        CliError::Usage { flag: flag.to_string(), message }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Numeric(_) => 2,
            CliError::Usage { .. } | CliError::Io { .. } => 1,
        }
    }
}

const GRID_HELP: &str = "Grids: Wigner fields default to [-6,6]^2 with 241 nodes per axis and overlap maps to \
[-1.5,1.5]^2 with 121 nodes per axis. Both resolve the finest oscillation at n = 50 with at least six \
samples per period along the axes.";

#[derive(Debug, Parser)]
#[command(name = "subplanck", version, about = "Sub-Planck phase-space structure of photon-added and photon-subtracted squeezed states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Mean photon number and origin Wigner value of one state
    State {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        backend: BackendArg,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Wigner function on a grid or at points, as long-format x,p,value
    #[command(after_help = GRID_HELP)]
    Wigner {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        backend: BackendArg,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Displacement overlap |<psi|D(da)|psi>|^2 over (dx, dp), normalised to 1 at the origin
    #[command(after_help = GRID_HELP)]
    Overlap {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        backend: BackendArg,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Half width at half magnitude of the central Wigner tile
    TileExtent {
        #[command(flatten)]
        state: StateArgs,
        /// Comma list of x, p, diagonal, anti_diagonal [default: x,p]
        #[arg(long, value_name = "LIST")]
        axis: Option<String>,
        #[command(flatten)]
        backend: BackendArg,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Central-tile extents over a range of n (or x0 for coherent and compass states)
    #[command(after_help = "Pass the swept value as a range a:b[:step] or a comma list, e.g. --n 1:20 or --x0 4:16.")]
    Sweep {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        backend: BackendArg,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Mean photon numbers of PASVS, PSSVS, SPASVS and SPSSVS against n
    PhotonStats {
        /// Photon numbers, a:b[:step] or a comma list [default: 0:20]
        #[arg(long, value_name = "LIST")]
        n: Option<String>,
        /// Squeezing parameter [default: 0.5]
        #[arg(long)]
        r: Option<String>,
        /// closed_form, oracle or both [default: oracle]
        #[arg(long)]
        backend: Option<String>,
        #[command(flatten)]
        io: IoArgs,
    },
    /// Residuals between the closed-form and oracle backends for one state
    Compare {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        io: IoArgs,
    },
}

#[derive(Debug, Args)]
struct StateArgs {
    /// coherent, compass, svs, pasvs, pssvs, spasvs, spssvs, mix_pa or mix_ps
    #[arg(long)]
    family: Option<String>,
    /// Photons added or subtracted [default: 10]
    #[arg(long)]
    n: Option<String>,
    /// Squeezing parameter in [0, 3] [default: 0.5]
    #[arg(long)]
    r: Option<String>,
    /// Squeezing branch of single-branch states, + or - [default: +]
    #[arg(long, allow_hyphen_values = true)]
    branch: Option<String>,
    /// Weight of the S(+r) branch, e.g. 0.6 or 0.6+0.1i [default: 1/sqrt(2)]
    #[arg(long, allow_hyphen_values = true)]
    c1: Option<String>,
    /// Weight of the S(-r) branch [default: sqrt(1 - |c1|^2)]
    #[arg(long, allow_hyphen_values = true)]
    c2: Option<String>,
    /// Coherent amplitude on the x axis [default: 4 for compass, 0 for coherent]
    #[arg(long, allow_hyphen_values = true)]
    x0: Option<String>,
    /// origin or physical [default: origin]
    #[arg(long)]
    normalization: Option<String>,
}

#[derive(Debug, Args)]
struct GridArgs {
    #[arg(long, allow_hyphen_values = true)]
    x_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    x_max: Option<String>,
    /// Nodes along x
    #[arg(long)]
    nx: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    p_min: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    p_max: Option<String>,
    /// Nodes along p
    #[arg(long)]
    np: Option<String>,
    /// Evaluate at x,p instead of on a grid; repeatable
    #[arg(long, value_name = "X,P", allow_hyphen_values = true)]
    at: Vec<String>,
}

#[derive(Debug, Args)]
struct BackendArg {
    /// closed_form, oracle or both [default: closed_form]
    #[arg(long)]
    backend: Option<String>,
}

#[derive(Debug, Args)]
struct IoArgs {
    /// Data file; a <output>.meta.json sidecar is written next to it. Prints to stdout when absent
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// csv or json [default: from the output extension, else csv]
    #[arg(long)]
    format: Option<String>,
    /// Worker threads [default: available cores]
    #[arg(long)]
    threads: Option<String>,
    /// key = value file or the .meta.json sidecar of an earlier run; flags override it
    #[arg(long)]
    config: Option<PathBuf>,
}

fn put(s: &mut Settings, key: &str, v: &Option<String>) {
    if let Some(v) = v {
        s.set(key, v.as_str());
    }
}

impl StateArgs {
    fn collect(&self, s: &mut Settings) {
        put(s, "family", &self.family);
        put(s, "n", &self.n);
        put(s, "r", &self.r);
        put(s, "branch", &self.branch);
        put(s, "c1", &self.c1);
        put(s, "c2", &self.c2);
        put(s, "x0", &self.x0);
        put(s, "normalization", &self.normalization);
    }
}

impl GridArgs {
    fn collect(&self, s: &mut Settings) {
        put(s, "x-min", &self.x_min);
        put(s, "x-max", &self.x_max);
        put(s, "nx", &self.nx);
        put(s, "p-min", &self.p_min);
        put(s, "p-max", &self.p_max);
        put(s, "np", &self.np);
        if !self.at.is_empty() {
            s.set("at", self.at.join(";"));
        }
    }
}

impl Command {
    /// Command kind, flag settings and I/O options.
    fn split(&self) -> (CommandKind, Settings, &IoArgs) {
        let mut s = Settings::default();
        let (kind, io) = match self {
            Command::State { state, backend, io } => {
                state.collect(&mut s);
                put(&mut s, "backend", &backend.backend);
                (CommandKind::State, io)
            }
            Command::Wigner { state, grid, backend, io } | Command::Overlap { state, grid, backend, io } => {
                state.collect(&mut s);
                grid.collect(&mut s);
                put(&mut s, "backend", &backend.backend);
                let kind = if matches!(self, Command::Wigner { .. }) { CommandKind::Wigner } else { CommandKind::Overlap };
                (kind, io)
            }
            Command::TileExtent { state, axis, backend, io } => {
                state.collect(&mut s);
                put(&mut s, "axis", axis);
                put(&mut s, "backend", &backend.backend);
                (CommandKind::TileExtent, io)
            }
            Command::Sweep { state, backend, io } => {
                state.collect(&mut s);
                put(&mut s, "backend", &backend.backend);
                (CommandKind::Sweep, io)
            }
            Command::PhotonStats { n, r, backend, io } => {
                put(&mut s, "n", n);
                put(&mut s, "r", r);
                put(&mut s, "backend", backend);
                (CommandKind::PhotonStats, io)
            }
            Command::Compare { state, io } => {
                state.collect(&mut s);
                (CommandKind::Compare, io)
            }
        };
        put(&mut s, "threads", &io.threads);
        (kind, s, io)
    }
}

fn tolerances(job: &Job) -> serde_json::Value {
    let policy = job.spec().map(default_policy).unwrap_or_default();
    json!({
        "bisection": BISECTION_TOLERANCE,
        "scan_step": SCAN_STEP,
        "scan_bound": SCAN_BOUND,
        "zero_threshold": ZERO_THRESHOLD,
        "radius_bound": RADIUS_BOUND,
        "weight": WEIGHT_TOLERANCE,
        "degenerate_origin": DEGENERATE_ORIGIN,
        "oracle_tail": policy.tail_tolerance,
        "oracle_max_cutoff": policy.max_cutoff,
        "imaginary_residue": IMAGINARY_RESIDUE_LIMIT,
        "overlap_slack": OVERLAP_SLACK,
    })
}

fn check_output(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            Err(CliError::usage("--output", format!("directory {} does not exist", dir.display())))
        }
        _ => Ok(()),
    }
}

/// A completed run, ready to be written out.
struct Finished {
    kind: CommandKind,
    settings: Settings,
    job: Job,
    outcome: Outcome,
    threads: usize,
    seconds: f64,
}

fn emit(run: &Finished, output: Option<&Path>, format: Format) -> Result<(), CliError> {
    let Finished { kind, settings, job, outcome, threads, seconds } = run;
    let several = outcome.tables.len() > 1;
    let Some(output) = output else {
        let mut stdout = io::stdout().lock();
        for (backend, table) in &outcome.tables {
            if several {
                let _ = writeln!(stdout, "# {}", backend.map(|b| b.to_string()).unwrap_or_default());
            }
            let _ = stdout.write_all(table.render(format).as_bytes());
        }
        return Ok(());
    };
    let mut files = Vec::new();
    for (backend, table) in &outcome.tables {
        let path = match backend {
            Some(b) if several => tagged_path(output, &b.to_string(), format),
            _ => output.to_path_buf(),
        };
        output::write(&path, &table.render(format))?;
        eprintln!("wrote {}", path.display());
        files.push(json!({
            "path": path.file_name().map(|n| n.to_string_lossy().into_owned()),
            "backend": backend,
            "schema": table.schema.id(),
            "rows": table.rows.len(),
        }));
    }
    let meta = json!({
        "tool": "subplanck",
        "version": subplanck::VERSION,
        "cli_version": env!("CARGO_PKG_VERSION"),
        "command": kind.name(),
        "settings": settings,
        "spec": job.spec(),
        "grid": job.grid(),
        "backends": job.backends(),
        "cutoff": outcome.cutoffs,
        "tolerances": tolerances(job),
        "threads": threads,
        "format": format,
        "wall_time_s": seconds,
        "outputs": files,
        "comparison": outcome.comparison(),
        "details": outcome.details,
    });
    let meta_path = sidecar_path(output);
    output::write(&meta_path, &(serde_json::to_string_pretty(&meta).expect("metadata serialises") + "\n"))?;
    eprintln!("wrote {}", meta_path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (kind, flags, io) = cli.command.split();
    let mut settings = Settings::default();
    if let Some(path) = &io.config {
        let (recorded, loaded) = Settings::load(path)?;
        if let Some(cmd) = recorded.filter(|c| c != kind.name()) {
            return Err(CliError::usage("--config", format!("sidecar was written by '{cmd}', not '{kind}'")));
        }
        settings = loaded;
    }
    settings.overlay(flags);

    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    settings.set_default("threads", &cores.to_string());
    let threads: usize = settings.require("threads")?;
    if threads == 0 {
        return Err(CliError::usage("--threads", "must be at least 1".into()));
    }
    let job = jobs::resolve(kind, &mut settings)?;
    let format = Format::resolve(io.format.as_deref(), io.output.as_deref())?;
    if let Some(out) = &io.output {
        check_output(out)?;
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::usage("--threads", e.to_string()))?;
    let start = Instant::now();
    let outcome = pool.install(|| jobs::run(&job))?;
    let seconds = start.elapsed().as_secs_f64();
    let finished = Finished { kind, settings, job, outcome, threads, seconds };
    emit(&finished, io.output.as_deref(), format)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
