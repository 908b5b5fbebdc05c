//! Argument parsing and dispatch.
//!
//! Exit codes: 0 clean, 1 usage or input error, 2 numerical diagnostics
//! (output files are still written).

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use efimov_core::SValue;

use crate::commands::{self, DumpMatrix, Status};
use crate::config::{self, CommandKind, FileConfig, Format, GridSection, Layers, Preset, RunConfig};

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DIAGNOSTICS: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "efimov", version, about = "Three-body Efimov physics of spin-1, 2 and 3 condensates")]
pub struct Cli {
    /// TOML configuration file; flags override its keys.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Asymptotic root table for every region and F3b block.
    Table(TableArgs),
    /// Adiabatic potential curves U(R), one file per F3b block.
    Potentials(PotentialArgs),
    /// Two- and three-body mean-field coefficients and dominance report.
    Meanfield(MeanFieldArgs),
    /// Resonance-model three-body scattering lengths along a sweep.
    A3b(A3bArgs),
    /// Write one basis or interaction matrix as CSV (17 digits).
    Dump(DumpArgs),
}

#[derive(Debug, Args)]
pub struct SystemArgs {
    /// Atomic spin f (1, 2 or 3).
    #[arg(long)]
    pub f: Option<u32>,
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    #[arg(long, allow_negative_numbers = true)]
    pub a0: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a4: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub a6: Option<f64>,
    /// Atomic mass in units of m.
    #[arg(long)]
    pub mass: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TableArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Sign pattern of the surrogate lengths, e.g. `--signs=-1,1`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub signs: Option<Vec<f64>>,
    #[arg(long)]
    pub smax: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PotentialArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long)]
    pub rmin: Option<f64>,
    #[arg(long)]
    pub rmax: Option<f64>,
    /// Grid points per decade of R.
    #[arg(long)]
    pub ppd: Option<u32>,
    #[arg(long)]
    pub smax: Option<f64>,
    /// Permit R_min below one van der Waals length.
    #[arg(long)]
    pub allow_short_range: bool,
}

#[derive(Debug, Args)]
pub struct MeanFieldArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Atom density (units of r_vdW⁻³).
    #[arg(long)]
    pub density: Option<f64>,
    /// Real parts of a3b, one per fully symmetric F3b, ascending.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub a3b: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub a3b_im: Option<Vec<f64>>,
    /// Take a3b from the resonance formulas at the given lengths.
    #[arg(long)]
    pub a3b_from_model: bool,
    #[command(flatten)]
    pub resonance: ResonanceArgs,
}

#[derive(Debug, Args)]
pub struct ResonanceArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
    /// Loss parameter η ≥ 0.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Resonance position a⁻ for every channel.
    #[arg(long, allow_negative_numbers = true)]
    pub a_minus: Option<f64>,
}

#[derive(Debug, Args)]
pub struct A3bArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    /// Swept length: a0, a2 or a4.
    #[arg(long)]
    pub sweep: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub from: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub to: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[command(flatten)]
    pub resonance: ResonanceArgs,
}

#[derive(Debug, Args)]
pub struct DumpArgs {
    #[command(flatten)]
    pub system: SystemArgs,
    #[arg(long, value_enum)]
    pub matrix: DumpMatrix,
    /// Hyperradius for Q.
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
    /// |s| for Q.
    #[arg(long, default_value_t = 0.5)]
    pub s: f64,
    /// Put s on the imaginary axis.
    #[arg(long)]
    pub imaginary: bool,
}

impl SystemArgs {
    fn apply(&self, flags: &mut FileConfig) -> [Option<f64>; 4] {
        flags.f = self.f;
        flags.mass = self.mass;
        [self.a0, self.a2, self.a4, self.a6]
    }
}

impl ResonanceArgs {
    fn apply(&self, flags: &mut FileConfig) {
        let r = &mut flags.resonance;
        r.alpha = self.alpha;
        r.beta = self.beta;
        r.gamma = self.gamma;
        r.eta = self.eta;
        r.a_minus_default = self.a_minus;
    }
}

fn layers(cli: &Cli) -> anyhow::Result<(CommandKind, Layers)> {
    let mut flags = FileConfig { output: cli.out.clone(), format: cli.format, jobs: cli.jobs, ..Default::default() };
    let (kind, system) = match &cli.command {
        Command::Table(a) => {
            flags.table.signs = a.signs.clone();
            flags.table.s_max = a.smax;
            (CommandKind::Table, &a.system)
        }
        Command::Potentials(a) => {
            flags.grid = GridSection {
                r_min: a.rmin,
                r_max: a.rmax,
                points_per_decade: a.ppd,
                s_max: a.smax,
                allow_short_range: a.allow_short_range.then_some(true),
            };
            (CommandKind::Potentials, &a.system)
        }
        Command::Meanfield(a) => {
            flags.meanfield.density = a.density;
            flags.meanfield.a3b = a.a3b.clone();
            flags.meanfield.a3b_im = a.a3b_im.clone();
            flags.meanfield.a3b_from_model = a.a3b_from_model.then_some(true);
            a.resonance.apply(&mut flags);
            (CommandKind::MeanField, &a.system)
        }
        Command::A3b(a) => {
            flags.scan.sweep = a.sweep.clone();
            flags.scan.from = a.from;
            flags.scan.to = a.to;
            flags.scan.points = a.points;
            a.resonance.apply(&mut flags);
            (CommandKind::A3b, &a.system)
        }
        Command::Dump(a) => (CommandKind::Dump, &a.system),
    };
    let single_lengths = system.apply(&mut flags);
    let file = cli.config.as_deref().map(FileConfig::load).transpose()?;
    Ok((kind, Layers { file, preset: system.preset, flags, single_lengths }))
}

fn dispatch(cli: &Cli, cfg: &RunConfig) -> anyhow::Result<Status> {
    match &cli.command {
        Command::Table(_) => commands::run_table(cfg),
        Command::Potentials(_) => commands::run_potentials(cfg),
        Command::Meanfield(_) => commands::run_meanfield(cfg),
        Command::A3b(_) => commands::run_a3b(cfg),
        Command::Dump(a) => {
            let s = if a.imaginary { SValue::imaginary(a.s) } else { SValue::real(a.s) };
            commands::run_dump(cfg, a.matrix, a.r, s)
        }
    }
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_CLEAN };
        }
    };
    let cfg = match layers(&cli).and_then(|(kind, l)| config::resolve(kind, &l)) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_USAGE;
        }
    };
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cfg.jobs.unwrap_or(0)).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match pool.install(|| dispatch(&cli, &cfg)) {
        Ok(Status::Clean) => EXIT_CLEAN,
        Ok(Status::Diagnostics) => EXIT_DIAGNOSTICS,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}
