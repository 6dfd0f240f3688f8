use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};

use ncrelay_cli::figures::{run_figure, FigureId, FigureOptions, DEFAULT_PSD_STEP};
use ncrelay_cli::point::{AlphaChoice, Point, SimMode, SimSettings};
use ncrelay_cli::row::{write_rows, Row};
use ncrelay_cli::sweep::{manifest, SweepSpec};
use ncrelay_cli::{CliError, Result};
use ncrelay_core::simulate::{DEFAULT_FIELD_SIZE, DEFAULT_MAX_SLOTS};
use ncrelay_core::{
    optimize_alpha, ChannelParams, EnergyParams, ObjectiveKind, Scheme, SchemeConfig, SimConfig, DEFAULT_GRID_POINTS,
};

/// Completion time, throughput and energy of network-coded relaying.
#[derive(Debug, Parser)]
#[command(name = "ncrelay", version)]
struct Cli {
    /// Worker threads for sweeps, figures and simulations.
    #[arg(long, global = true, env = "NCRELAY_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate one parameter point.
    Eval {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        sim: SimArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Optimize the source time share for one configuration.
    Optimize {
        #[command(flatten)]
        point: PointArgs,
        /// Also emit a row for every alpha on the search grid.
        #[arg(long)]
        curve: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate the cross product described by a sweep file.
    Sweep {
        spec: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides `max-points` from the sweep file.
        #[arg(long)]
        max_points: Option<usize>,
    },
    /// Write the data for a named figure.
    Figure {
        id: FigureId,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = DEFAULT_PSD_STEP)]
        psd_step: f64,
        #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
        grid_points: usize,
        #[command(flatten)]
        sim: SimArgs,
    },
    /// Evaluate one point and estimate it by Monte Carlo.
    Simulate {
        #[command(flatten)]
        point: PointArgs,
        #[command(flatten)]
        sim: SimParams,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
struct PointArgs {
    #[arg(long)]
    scheme: Scheme,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Relay memory for source-only coding; defaults to n.
    #[arg(long)]
    x: Option<usize>,
    /// Source time share; optimized for --objective when omitted.
    #[arg(long, conflicts_with = "objective")]
    alpha: Option<f64>,
    #[arg(long)]
    objective: Option<ObjectiveKind>,
    #[arg(long)]
    psd: f64,
    #[arg(long)]
    psr: f64,
    #[arg(long)]
    prd: f64,
    #[arg(long, default_value_t = 1.0)]
    etx: f64,
    #[arg(long, default_value_t = 1.0)]
    erx: f64,
    #[arg(long, default_value_t = 1.0)]
    enc: f64,
    #[arg(long, default_value_t = 1.0)]
    eack: f64,
    #[arg(long, default_value_t = DEFAULT_GRID_POINTS)]
    grid_points: usize,
    #[arg(long, default_value = "")]
    label: String,
}

impl PointArgs {
    fn objective(&self) -> ObjectiveKind {
        self.objective.unwrap_or(ObjectiveKind::Time)
    }

    fn point(&self) -> Result<Point> {
        Ok(Point {
            scheme: self.scheme,
            n: self.n,
            x: self.x,
            alpha: match self.alpha {
                Some(a) => AlphaChoice::Fixed(a),
                None => AlphaChoice::Optimal(self.objective()),
            },
            channel: ChannelParams::new(self.psd, self.psr, self.prd)?,
            energy: EnergyParams::new(self.etx, self.erx, self.enc, self.eack)?,
            label: self.label.clone(),
        })
    }
}

#[derive(Debug, Args)]
struct SimParams {
    #[arg(long, default_value_t = SimMode::Packets)]
    sim_mode: SimMode,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_FIELD_SIZE)]
    field_size: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_SLOTS)]
    max_slots: u64,
    /// Drop and count capped trials instead of failing with exit code 4.
    #[arg(long)]
    allow_truncation: bool,
}

impl SimParams {
    fn settings(&self) -> SimSettings {
        SimSettings {
            mode: self.sim_mode,
            config: SimConfig {
                trials: self.trials,
                master_seed: self.seed,
                field_size: self.field_size,
                max_slots: self.max_slots,
                fail_on_truncation: !self.allow_truncation,
            },
        }
    }
}

#[derive(Debug, Args)]
struct SimArgs {
    /// Add Monte Carlo estimates to every row.
    #[arg(long)]
    simulate: bool,
    #[command(flatten)]
    params: SimParams,
}

impl SimArgs {
    fn settings(&self) -> Option<SimSettings> {
        self.simulate.then(|| self.params.settings())
    }
}

fn emit(out: Option<&Path>, rows: &[Row]) -> Result<()> {
    match out {
        Some(path) => {
            let mut buf = Vec::new();
            write_rows(&mut buf, rows)?;
            fs::write(path, buf)?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_rows(&mut lock, rows)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn optimize_rows(args: &PointArgs, curve: bool) -> Result<Vec<Row>> {
    let point = args.point()?;
    let base = SchemeConfig::new(point.scheme, point.n, point.x.unwrap_or(point.n), 1.0)?;
    let kind = args.objective();
    let mut rows = Vec::new();
    if curve {
        let opt = optimize_alpha(&base, &point.channel, &point.energy, kind, args.grid_points)?;
        let label = if point.label.is_empty() {
            "grid".to_string()
        } else {
            point.label.clone()
        };
        for &(alpha, _) in &opt.curve {
            let p = Point {
                alpha: AlphaChoice::Fixed(alpha),
                label: label.clone(),
                ..point.clone()
            };
            rows.push(p.compute_or_unsolved(args.grid_points, None)?);
        }
    }
    let optimum = Point {
        alpha: AlphaChoice::Optimal(kind),
        label: if point.label.is_empty() {
            "optimum".to_string()
        } else {
            point.label.clone()
        },
        ..point
    };
    rows.push(optimum.compute(args.grid_points, None)?);
    Ok(rows)
}

fn run(cli: Cli) -> Result<()> {
    if let Some(threads) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot start {threads} worker threads: {e}")))?;
    }
    match cli.command {
        Command::Eval { point, sim, out } => {
            let row = point.point()?.compute(point.grid_points, sim.settings().as_ref())?;
            emit(out.as_deref(), &[row])
        }
        Command::Optimize { point, curve, out } => emit(out.as_deref(), &optimize_rows(&point, curve)?),
        Command::Simulate { point, sim, out } => {
            let row = point.point()?.compute(point.grid_points, Some(&sim.settings()))?;
            emit(out.as_deref(), &[row])
        }
        Command::Sweep { spec, out, max_points } => {
            let text = fs::read_to_string(&spec)
                .map_err(|e| CliError::Usage(format!("cannot read sweep file {}: {e}", spec.display())))?;
            let mut parsed = SweepSpec::parse(&text)?;
            if let Some(cap) = max_points {
                parsed.max_points = cap;
            }
            let count = parsed.points()?.len();
            eprintln!("sweep: {count} points");
            let rows = parsed.run()?;
            emit(Some(&out), &rows)?;
            let timestamp = SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            let mut manifest_path = out.into_os_string();
            manifest_path.push(".manifest");
            fs::write(
                manifest_path,
                manifest(&parsed, &text, &spec.display().to_string(), rows.len(), timestamp),
            )?;
            Ok(())
        }
        Command::Figure {
            id,
            out,
            psd_step,
            grid_points,
            sim,
        } => {
            let opts = FigureOptions {
                psd_step,
                grid_points,
                energy: EnergyParams::unit(),
            };
            emit(Some(&out), &run_figure(id, &opts, sim.settings().as_ref())?)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
