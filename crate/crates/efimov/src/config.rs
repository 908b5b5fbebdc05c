//! Run configuration: built-in defaults, then the TOML file, then a preset,
//! then individual flags, each layer overriding the one before.
//!
//! ```toml
//! f = 2
//! lengths = [-8.97, -6.91, -4.73]
//! output = "out"
//! format = "csv"
//!
//! [grid]
//! r_max = 1e3
//! points_per_decade = 64
//!
//! [resonance]
//! alpha = 0.1
//! eta = 0.05
//! a_minus = { 3 = -12.0 }
//! ```

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::ValueEnum;
use efimov_core::a3b_model::{PowerLaws, ResonanceParams};
use efimov_core::potentials::TraceOptions;
use efimov_core::{ScatteringLengths, Spin};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Named parameter sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// f = 1 with a0 = 1e2, a2 = 1e5, traced to R = 1e7.
    Fig2,
    /// ⁸⁵Rb f = 2 lengths traced to R = 1e3.
    Fig3,
    /// ⁸⁵Rb f = 2: a0 = −8.97, a2 = −6.91, a4 = −4.73.
    Rb85,
    /// ⁸⁷Rb f = 1: a0 = 1.23, a2 = 1.21.
    Rb87,
}

pub const RB85: [f64; 3] = [-8.97, -6.91, -4.73];
pub const RB87: [f64; 2] = [1.23, 1.21];
pub const FIG2: [f64; 2] = [1e2, 1e5];

impl Preset {
    fn layer(self) -> FileConfig {
        let (f, lengths, r_max) = match self {
            Preset::Fig2 => (1, FIG2.to_vec(), Some(1e7)),
            Preset::Fig3 => (2, RB85.to_vec(), Some(1e3)),
            Preset::Rb85 => (2, RB85.to_vec(), Some(1e3)),
            Preset::Rb87 => (1, RB87.to_vec(), None),
        };
        FileConfig {
            f: Some(f),
            lengths: Some(lengths),
            grid: GridSection { r_max, ..Default::default() },
            ..Default::default()
        }
    }
}

/// Which command the configuration is resolved for; defaults differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Table,
    Potentials,
    MeanField,
    A3b,
    Dump,
}

/// The TOML schema. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub f: Option<u32>,
    pub lengths: Option<Vec<f64>>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub jobs: Option<usize>,
    /// Atomic mass in units of m; energies and couplings scale with it.
    pub mass: Option<f64>,
    #[serde(default)]
    pub table: TableSection,
    #[serde(default)]
    pub grid: GridSection,
    #[serde(default)]
    pub meanfield: MeanFieldSection,
    #[serde(default)]
    pub resonance: ResonanceSection,
    #[serde(default)]
    pub scan: ScanSection,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TableSection {
    pub signs: Option<Vec<f64>>,
    pub s_max: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub r_min: Option<f64>,
    pub r_max: Option<f64>,
    pub points_per_decade: Option<u32>,
    pub s_max: Option<f64>,
    pub allow_short_range: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeanFieldSection {
    pub density: Option<f64>,
    /// Real parts of a3b, one per fully symmetric F3b in ascending order.
    pub a3b: Option<Vec<f64>>,
    pub a3b_im: Option<Vec<f64>>,
    /// Take a3b from the resonance formulas at the configured lengths.
    pub a3b_from_model: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResonanceSection {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub gamma: Option<f64>,
    pub eta: Option<f64>,
    pub s0: Option<f64>,
    pub s0_prime: Option<f64>,
    pub a_minus_default: Option<f64>,
    /// Per-channel a⁻, keyed by F3b.
    pub a_minus: Option<BTreeMap<String, f64>>,
    #[serde(default)]
    pub powers: PowersSection,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowersSection {
    pub f1_f3b1: Option<f64>,
    pub f2_f3b2: Option<f64>,
    pub f2_f3b4: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSection {
    /// "a0", "a2" or "a4".
    pub sweep: Option<String>,
    pub from: Option<f64>,
    pub to: Option<f64>,
    pub points: Option<usize>,
}

macro_rules! overlay {
    ($base:expr, $top:expr; $($field:ident),+) => {
        $( if $top.$field.is_some() { $base.$field = $top.$field.clone(); } )+
    };
}

impl FileConfig {
    pub fn from_toml(text: &str) -> anyhow::Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("parsing {}", path.display()))
    }

    /// Keys set in `top` replace those of `self`.
    pub fn overlay(mut self, top: &FileConfig) -> FileConfig {
        overlay!(self, top; f, lengths, output, format, jobs, mass);
        overlay!(self.table, top.table; signs, s_max);
        overlay!(self.grid, top.grid; r_min, r_max, points_per_decade, s_max, allow_short_range);
        overlay!(self.meanfield, top.meanfield; density, a3b, a3b_im, a3b_from_model);
        overlay!(self.resonance, top.resonance; alpha, beta, gamma, eta, s0, s0_prime, a_minus_default, a_minus);
        overlay!(self.resonance.powers, top.resonance.powers; f1_f3b1, f2_f3b2, f2_f3b4);
        overlay!(self.scan, top.scan; sweep, from, to, points);
        self
    }
}

/// Layers in increasing priority. `single_lengths` are the `--a0 … --a6`
/// flags, applied last, element by element.
#[derive(Debug, Clone, Default)]
pub struct Layers {
    pub file: Option<FileConfig>,
    pub preset: Option<Preset>,
    pub flags: FileConfig,
    pub single_lengths: [Option<f64>; 4],
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSettings {
    pub swept_index: usize,
    pub from: f64,
    pub to: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ThreeBodyInput {
    /// Not supplied: every a3b is zero.
    Zero,
    Given(Vec<Complex64>),
    FromModel,
}

/// Fully resolved settings for one command.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub spin: Spin,
    pub lengths: Option<ScatteringLengths>,
    pub signs: Vec<f64>,
    pub table_s_max: f64,
    pub grid: TraceOptions,
    pub mass: f64,
    pub density: f64,
    pub three_body: ThreeBodyInput,
    pub resonance: ResonanceParams,
    pub scan: ScanSettings,
    pub output: PathBuf,
    pub format: Format,
    pub jobs: Option<usize>,
}

impl RunConfig {
    pub fn lengths(&self) -> anyhow::Result<&ScatteringLengths> {
        self.lengths.as_ref().ok_or_else(|| {
            anyhow!(
                "no scattering lengths for f={}: set `lengths` in the config or pass --a0 … --a{}",
                self.spin.value(),
                2 * self.spin.value()
            )
        })
    }
}

fn default_lengths(kind: CommandKind, f: u32) -> Option<Vec<f64>> {
    match (kind, f) {
        (CommandKind::MeanField, 1) => Some(RB87.to_vec()),
        (CommandKind::A3b, 1) => Some(vec![-1e4, -10.0]),
        (CommandKind::A3b, 2) => Some(vec![-1e8, -1e4, -10.0]),
        (_, 1) => Some(FIG2.to_vec()),
        (_, 2) => Some(RB85.to_vec()),
        _ => None,
    }
}

fn positive(name: &str, x: f64) -> anyhow::Result<f64> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        bail!("{name} must be positive and finite, got {x}")
    }
}

pub fn resolve(kind: CommandKind, layers: &Layers) -> anyhow::Result<RunConfig> {
    let mut merged = FileConfig::default();
    if let Some(file) = &layers.file {
        merged = merged.overlay(file);
    }
    if let Some(p) = layers.preset {
        merged = merged.overlay(&p.layer());
    }
    merged = merged.overlay(&layers.flags);

    let f = merged.f.unwrap_or(1);
    let spin = Spin::new(f).map_err(|e| anyhow!("{e}"))?;
    let n = f as usize + 1;

    let mut values = merged.lengths.clone().or_else(|| default_lengths(kind, f));
    if let Some(v) = &values {
        if v.len() != n {
            bail!("f={f} needs {n} scattering lengths (a0 … a{}), got {}", 2 * f, v.len());
        }
    }
    for (k, x) in layers.single_lengths.iter().enumerate() {
        let Some(x) = *x else { continue };
        if k >= n {
            bail!("--a{} is not a channel for f={f}", 2 * k);
        }
        match values.as_mut() {
            Some(v) => v[k] = x,
            None => {
                if layers.single_lengths[..n].iter().all(Option::is_some) {
                    values = Some(layers.single_lengths[..n].iter().map(|x| x.unwrap()).collect());
                } else {
                    bail!("f={f} has no default lengths: pass all of --a0 … --a{}", 2 * f);
                }
            }
        }
    }
    let lengths = values.map(|v| ScatteringLengths::new(spin, &v).map_err(|e| anyhow!("{e}"))).transpose()?;

    let signs = merged.table.signs.clone().unwrap_or_else(|| vec![-1.0; n]);
    if signs.len() != n || signs.iter().any(|&s| s != 1.0 && s != -1.0) {
        bail!("sign pattern needs {n} entries of ±1");
    }
    let table_s_max = positive("table s_max", merged.table.s_max.unwrap_or(5.0))?;

    let largest = lengths.as_ref().map_or(0.0, |l| l.values().iter().fold(0.0f64, |m, a| m.max(a.abs())));
    let grid = TraceOptions {
        r_min: merged.grid.r_min.unwrap_or(1.0),
        r_max: merged.grid.r_max.unwrap_or((100.0 * largest).max(1e3)),
        points_per_decade: merged.grid.points_per_decade.unwrap_or(64),
        s_max: positive("grid s_max", merged.grid.s_max.unwrap_or(5.0))?,
        allow_short_range: merged.grid.allow_short_range.unwrap_or(false),
    };

    let mass = positive("mass", merged.mass.unwrap_or(1.0))?;
    let density = positive("density", merged.meanfield.density.unwrap_or(1e-6))?;

    let three_body = match (&merged.meanfield.a3b, &merged.meanfield.a3b_im, merged.meanfield.a3b_from_model) {
        (_, _, Some(true)) => ThreeBodyInput::FromModel,
        (None, None, _) => ThreeBodyInput::Zero,
        (re, im, _) => {
            let re = re.clone().unwrap_or_default();
            let im = im.clone().unwrap_or_else(|| vec![0.0; re.len()]);
            let re = if re.is_empty() { vec![0.0; im.len()] } else { re };
            if re.len() != im.len() {
                bail!("a3b and a3b_im must have the same length");
            }
            ThreeBodyInput::Given(re.iter().zip(&im).map(|(&x, &y)| Complex64::new(x, y)).collect())
        }
    };

    let resonance = resonance_params(&merged.resonance)?;
    let scan = scan_settings(f, &merged.scan, lengths.as_ref(), kind)?;

    Ok(RunConfig {
        spin,
        lengths,
        signs,
        table_s_max,
        grid,
        mass,
        density,
        three_body,
        resonance,
        scan,
        output: merged.output.clone().unwrap_or_else(|| PathBuf::from("efimov-out")),
        format: merged.format.unwrap_or_default(),
        jobs: merged.jobs,
    })
}

fn resonance_params(r: &ResonanceSection) -> anyhow::Result<ResonanceParams> {
    let d = ResonanceParams::default();
    let dp = PowerLaws::default();
    let mut a_minus = Vec::new();
    for (key, &a) in r.a_minus.iter().flatten() {
        let f3b: u32 = key.trim().parse().map_err(|_| anyhow!("a_minus key `{key}` is not an F3b value"))?;
        a_minus.push((f3b, a));
    }
    let p = ResonanceParams {
        alpha: r.alpha.unwrap_or(d.alpha),
        beta: r.beta.unwrap_or(d.beta),
        gamma: r.gamma.unwrap_or(d.gamma),
        a_minus,
        a_minus_default: r.a_minus_default.unwrap_or(d.a_minus_default),
        s0: r.s0.unwrap_or(d.s0),
        s0_prime: r.s0_prime.unwrap_or(d.s0_prime),
        eta: r.eta.unwrap_or(d.eta),
        powers: PowerLaws {
            f1_f3b1: r.powers.f1_f3b1.unwrap_or(dp.f1_f3b1),
            f2_f3b2: r.powers.f2_f3b2.unwrap_or(dp.f2_f3b2),
            f2_f3b4: r.powers.f2_f3b4.unwrap_or(dp.f2_f3b4),
        },
    };
    p.validate().map_err(|e| anyhow!("{e}"))?;
    Ok(p)
}

fn scan_settings(f: u32, s: &ScanSection, lengths: Option<&ScatteringLengths>, kind: CommandKind) -> anyhow::Result<ScanSettings> {
    let swept_index = match s.sweep.as_deref() {
        None => f as usize,
        Some(name) => {
            let k: u32 = name
                .strip_prefix('a')
                .and_then(|x| x.parse().ok())
                .filter(|k| k % 2 == 0 && *k <= 2 * f)
                .ok_or_else(|| anyhow!("cannot sweep `{name}` for f={f}"))?;
            (k / 2) as usize
        }
    };
    let points = s.points.unwrap_or(200);
    if points == 0 {
        bail!("scan needs at least one point");
    }
    // Without an explicit range, one decade either side of the fixed value.
    let centre = lengths.map(|l| l.values()[swept_index]).unwrap_or(-10.0);
    let (from, to) = (s.from.unwrap_or(centre / 10.0), s.to.unwrap_or(centre * 10.0));
    if kind == CommandKind::A3b && !(from.is_finite() && to.is_finite() && from * to > 0.0) {
        bail!("scan range must be finite, nonzero and of one sign");
    }
    Ok(ScanSettings { swept_index, from, to, points })
}
