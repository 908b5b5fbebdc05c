//! The four subcommands plus the matrix dump. Each writes its files through
//! an [`OutputSet`] and reports whether numerical diagnostics occurred.

use anyhow::{anyhow, bail};
use efimov_core::a3b_model::{a3b, resonance_channels, resonance_scan, ResonanceParams};
use efimov_core::hyperangular_solver::{q_matrix, table_cell, table_columns, TableRow};
use efimov_core::meanfield::{
    alpha_2b, alpha_3b, couplings, dominance_report, to_f64, Expansion, LinearCombination,
};
use efimov_core::potentials::{hyperradial_grid, trace_channels, TraceDiagnostic};
use efimov_core::spin_algebra::{permutation_matrix, s_transformation, Permutation};
use efimov_core::{QContext, Region, SValue, ScatteringLengths};
use num_complex::Complex64;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, RunConfig, ThreeBodyInput};
use crate::formats::{
    curve_records, curves_csv, json_bytes, matrix_csv, round10, scan_csv, scan_records, table_csv, table_records,
    ComplexValue,
};
use crate::manifest::OutputSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Clean,
    Diagnostics,
}

impl Status {
    pub fn from_diagnostics(any: bool) -> Self {
        if any {
            Status::Diagnostics
        } else {
            Status::Clean
        }
    }
}

pub const PLACEHOLDER_WARNING: &str =
    "resonance constants use placeholder values (alpha=0, beta=1, gamma=0 or a_minus=-10); a3b values are illustrative only";

fn rounded(xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|&x| round10(x)).collect()
}

fn warn_all(warnings: &[String]) {
    for w in warnings {
        eprintln!("warning: {w}");
    }
}

pub fn run_table(cfg: &RunConfig) -> anyhow::Result<Status> {
    let f = cfg.spin;
    let regions = Region::all(f);
    let columns = table_columns(f);
    let jobs: Vec<(usize, u32)> = (0..regions.len()).flat_map(|i| columns.iter().map(move |&c| (i, c))).collect();
    let cells: Vec<_> = jobs.par_iter().map(|&(i, f3b)| table_cell(&regions[i], f3b, &cfg.signs, cfg.table_s_max)).collect();
    let mut cells = cells.into_iter();
    let rows: Vec<TableRow> = regions
        .into_iter()
        .map(|region| TableRow { region, cells: cells.by_ref().take(columns.len()).collect() })
        .collect();

    let records = table_records(f.value(), &rows);
    let diagnostics: Vec<String> = records
        .iter()
        .filter_map(|r| r.diagnostic.as_ref().map(|d| format!("{} F3b={}: {d}", r.region, r.f3b)))
        .collect();
    let bytes = match cfg.format {
        Format::Csv => table_csv(&records)?,
        Format::Json => json_bytes(&records)?,
    };
    let mut out = OutputSet::create(&cfg.output)?;
    out.write(&format!("table_f{}.{}", f.value(), cfg.format.extension()), &bytes)?;
    let run = json!({
        "f": f.value(),
        "signs": cfg.signs,
        "s_max": round10(cfg.table_s_max),
        "diagnostics": diagnostics,
    });
    warn_all(&diagnostics);
    out.finish("table", &run, Vec::new())?;
    Ok(Status::from_diagnostics(!diagnostics.is_empty()))
}

fn diagnostic_text(d: &TraceDiagnostic) -> String {
    match d {
        TraceDiagnostic::Ambiguous { f3b, channel, r, chosen, alternative } => {
            format!("F3b={f3b} channel {channel}: ambiguous continuation at R={r:.6e} (chose {chosen:.6}, rival {alternative:.6})")
        }
        TraceDiagnostic::Discontinuity { f3b, channel, r } => {
            format!("F3b={f3b} channel {channel}: discontinuity at R={r:.6e}")
        }
        TraceDiagnostic::Unclassified { f3b, channel } => {
            format!("F3b={f3b} channel {channel}: no asymptotic class")
        }
    }
}

pub fn run_potentials(cfg: &RunConfig) -> anyhow::Result<Status> {
    let lengths = cfg.lengths()?;
    let f = cfg.spin.value();
    let grid = hyperradial_grid(&cfg.grid).map_err(|e| anyhow!("{e}"))?;
    let blocks = table_columns(cfg.spin);
    let traces: Vec<_> = blocks.par_iter().map(|&f3b| trace_channels(lengths, f3b, &cfg.grid)).collect();

    let mut out = OutputSet::create(&cfg.output)?;
    let mut diagnostics = Vec::new();
    for (&f3b, trace) in blocks.iter().zip(traces) {
        match trace {
            Ok(t) => {
                let bytes = match cfg.format {
                    Format::Csv => curves_csv(&t.curves, cfg.mass)?,
                    Format::Json => json_bytes(&curve_records(&t.curves, cfg.mass))?,
                };
                out.write(&format!("potentials_f{f}_F3b{f3b}.{}", cfg.format.extension()), &bytes)?;
                diagnostics.extend(t.diagnostics.iter().map(diagnostic_text));
            }
            Err(e) => diagnostics.push(format!("F3b={f3b}: {e}")),
        }
    }
    let run = json!({
        "f": f,
        "lengths": rounded(lengths.values()),
        "mass": round10(cfg.mass),
        "grid": {
            "r_min": round10(cfg.grid.r_min),
            "r_max": round10(cfg.grid.r_max),
            "points_per_decade": cfg.grid.points_per_decade,
            "points": grid.len(),
            "s_max": round10(cfg.grid.s_max),
            "allow_short_range": cfg.grid.allow_short_range,
        },
        "diagnostics": diagnostics,
    });
    warn_all(&diagnostics);
    out.finish("potentials", &run, Vec::new())?;
    Ok(Status::from_diagnostics(!diagnostics.is_empty()))
}

#[derive(Serialize)]
struct Coefficient {
    length: String,
    fraction: String,
    decimal: f64,
}

#[derive(Serialize)]
struct AlphaEntry<V: Serialize> {
    n: usize,
    expression: String,
    coefficients: Vec<Coefficient>,
    value: V,
}

fn coefficients(c: &LinearCombination) -> Vec<Coefficient> {
    c.terms
        .iter()
        .map(|(label, q)| Coefficient { length: format!("{}{label}", c.symbol), fraction: q.to_string(), decimal: round10(to_f64(q)) })
        .collect()
}

fn exact(x: f64) -> anyhow::Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| anyhow!("{x} is not a finite length"))
}

/// αₙ evaluated in exact arithmetic on the binary values of the inputs, so
/// equal lengths give exchange terms that are exactly zero.
fn evaluate_exact(e: &Expansion, values: &[f64]) -> anyhow::Result<Vec<f64>> {
    let q = values.iter().map(|&x| exact(x)).collect::<anyhow::Result<Vec<_>>>()?;
    Ok(e.evaluate_exact(&q).map_err(|err| anyhow!("{err}"))?.iter().map(to_f64).collect())
}

fn three_body_lengths(cfg: &RunConfig, lengths: &ScatteringLengths, e: &Expansion) -> anyhow::Result<Result<Vec<Complex64>, String>> {
    let n = e.channels.len();
    Ok(match &cfg.three_body {
        ThreeBodyInput::Zero => Ok(vec![Complex64::new(0.0, 0.0); n]),
        ThreeBodyInput::Given(v) => {
            if v.len() != n {
                bail!("f={} needs {n} three-body lengths (F3b = {:?}), got {}", cfg.spin.value(), e.channels, v.len());
            }
            Ok(v.clone())
        }
        ThreeBodyInput::FromModel => {
            resonance_channels(cfg.spin).map_err(|err| anyhow!("{err}"))?;
            e.channels
                .iter()
                .map(|&f3b| a3b(cfg.spin, f3b, lengths.values(), &cfg.resonance).map(|v| v.value))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|err| err.to_string())
        }
    })
}

pub fn run_meanfield(cfg: &RunConfig) -> anyhow::Result<Status> {
    let lengths = cfg.lengths()?;
    let f = cfg.spin;
    let e2 = alpha_2b(f);
    let e3 = alpha_3b(f);
    let alpha2 = evaluate_exact(&e2, lengths.values())?;

    let mut notes = Vec::new();
    let mut warnings = Vec::new();
    if f.value() == 3 {
        notes.push("f=3 three-body coefficients come from the same exact solve; no published values exist to compare".to_string());
    }
    match cfg.three_body {
        ThreeBodyInput::Zero => notes.push("three-body lengths not supplied; all taken as zero".to_string()),
        ThreeBodyInput::FromModel if cfg.resonance.uses_placeholders() => warnings.push(PLACEHOLDER_WARNING.to_string()),
        _ => {}
    }

    let three = three_body_lengths(cfg, lengths, &e3)?;
    let mut diagnostics = Vec::new();
    let (alpha3_json, couplings_json, dominance_json) = match &three {
        Ok(a3) => {
            let re = evaluate_exact(&e3, &a3.iter().map(|z| z.re).collect::<Vec<_>>())?;
            let im = evaluate_exact(&e3, &a3.iter().map(|z| z.im).collect::<Vec<_>>())?;
            let alpha3: Vec<Complex64> = re.iter().zip(&im).map(|(&x, &y)| Complex64::new(x, y)).collect();
            let c = couplings(&alpha2, &alpha3, cfg.mass).map_err(|err| anyhow!("{err}"))?;
            let d = dominance_report(cfg.density, &c).map_err(|err| anyhow!("{err}"))?;
            let entries: Vec<AlphaEntry<ComplexValue>> = e3
                .alpha
                .iter()
                .zip(&alpha3)
                .enumerate()
                .map(|(n, (c, v))| AlphaEntry { n, expression: c.to_string(), coefficients: coefficients(c), value: (*v).into() })
                .collect();
            (
                serde_json::to_value(entries)?,
                json!({
                    "g2b": rounded(&c.g2b),
                    "g3b": c.g3b.iter().map(|&z| ComplexValue::from(z)).collect::<Vec<_>>(),
                }),
                json!({
                    "density": round10(d.density),
                    "energy_2b": rounded(&d.energy_2b),
                    "energy_3b": d.energy_3b.iter().map(|&z| ComplexValue::from(z)).collect::<Vec<_>>(),
                    "phase": d.phase.as_str(),
                    "three_body_dominates": d.three_body_dominates,
                    "opposite_sign": d.opposite_sign,
                }),
            )
        }
        Err(err) => {
            diagnostics.push(format!("three-body lengths: {err}"));
            (Value::Null, Value::Null, Value::Null)
        }
    };

    let alpha2_json: Vec<AlphaEntry<f64>> = e2
        .alpha
        .iter()
        .zip(&alpha2)
        .enumerate()
        .map(|(n, (c, &v))| AlphaEntry { n, expression: c.to_string(), coefficients: coefficients(c), value: round10(v) })
        .collect();
    let a3_inputs: Value = match &three {
        Ok(v) => json!(e3
            .channels
            .iter()
            .zip(v)
            .map(|(&f3b, &z)| json!({ "F3b": f3b, "value": ComplexValue::from(z) }))
            .collect::<Vec<_>>()),
        Err(_) => Value::Null,
    };
    let inputs = json!({
        "f": f.value(),
        "lengths": rounded(lengths.values()),
        "density": round10(cfg.density),
        "mass": round10(cfg.mass),
        "three_body_lengths": a3_inputs,
        "three_body_source": match cfg.three_body {
            ThreeBodyInput::Zero => "zero",
            ThreeBodyInput::Given(_) => "given",
            ThreeBodyInput::FromModel => "resonance-model",
        },
    });
    let report = json!({
        "inputs": inputs,
        "alpha_2b": alpha2_json,
        "alpha_3b": alpha3_json,
        "couplings": couplings_json,
        "dominance": dominance_json,
        "notes": notes,
        "warnings": warnings,
        "diagnostics": diagnostics,
    });

    let mut out = OutputSet::create(&cfg.output)?;
    out.write(&format!("meanfield_f{}.json", f.value()), &json_bytes(&report)?)?;
    warn_all(&warnings);
    warn_all(&diagnostics);
    out.finish("meanfield", &inputs, warnings)?;
    Ok(Status::from_diagnostics(!diagnostics.is_empty()))
}

fn resonance_json(p: &ResonanceParams) -> Value {
    json!({
        "alpha": round10(p.alpha),
        "beta": round10(p.beta),
        "gamma": round10(p.gamma),
        "eta": round10(p.eta),
        "s0": round10(p.s0),
        "s0_prime": round10(p.s0_prime),
        "a_minus_default": round10(p.a_minus_default),
        "a_minus": p.a_minus.iter().map(|&(c, a)| json!({ "F3b": c, "value": round10(a) })).collect::<Vec<_>>(),
        "powers": [round10(p.powers.f1_f3b1), round10(p.powers.f2_f3b2), round10(p.powers.f2_f3b4)],
    })
}

pub fn run_a3b(cfg: &RunConfig) -> anyhow::Result<Status> {
    let lengths = cfg.lengths()?;
    let f = cfg.spin.value();
    let s = cfg.scan;
    let scan = resonance_scan(cfg.spin, s.swept_index, s.from, s.to, lengths.values(), &cfg.resonance, s.points)
        .map_err(|e| anyhow!("{e}"))?;
    let bytes = match cfg.format {
        Format::Csv => scan_csv(&scan)?,
        Format::Json => json_bytes(&scan_records(&scan))?,
    };
    let warnings: Vec<String> =
        if cfg.resonance.uses_placeholders() { vec![PLACEHOLDER_WARNING.to_string()] } else { Vec::new() };
    let errors: Vec<String> = scan
        .rows
        .iter()
        .filter_map(|r| match &r.status {
            efimov_core::a3b_model::ScanStatus::Domain(e) => Some(format!("F3b={} at {:.6e}: {e}", r.f3b, r.swept)),
            _ => None,
        })
        .collect();

    let mut out = OutputSet::create(&cfg.output)?;
    out.write(&format!("a3b_f{f}_sweep_a{}.{}", 2 * s.swept_index, cfg.format.extension()), &bytes)?;
    let run = json!({
        "f": f,
        "lengths": rounded(lengths.values()),
        "sweep": format!("a{}", 2 * s.swept_index),
        "from": round10(s.from),
        "to": round10(s.to),
        "points": s.points,
        "channels": scan.channels,
        "resonance": resonance_json(&cfg.resonance),
        "domain_errors": errors.len(),
    });
    warn_all(&warnings);
    if !errors.is_empty() {
        eprintln!("warning: {} rows outside the validity domain (status column)", errors.len());
    }
    out.finish("a3b", &run, warnings)?;
    Ok(Status::from_diagnostics(!errors.is_empty()))
}

/// Matrices available to `dump`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum DumpMatrix {
    /// Product → coupled basis transformation.
    S,
    PPlus,
    PMinus,
    /// Q(s) on the product basis at the configured lengths.
    Q,
}

pub fn run_dump(cfg: &RunConfig, which: DumpMatrix, r: f64, s: SValue) -> anyhow::Result<Status> {
    let f = cfg.spin;
    let m = match which {
        DumpMatrix::S => s_transformation(f).matrix,
        DumpMatrix::PPlus => permutation_matrix(f, Permutation::Cyclic),
        DumpMatrix::PMinus => permutation_matrix(f, Permutation::Anticyclic),
        DumpMatrix::Q => {
            let ctx = QContext::new(cfg.lengths()?.clone(), r).map_err(|e| anyhow!("{e}"))?;
            q_matrix(&ctx, s).map_err(|e| anyhow!("{e}"))?
        }
    };
    let name = match which {
        DumpMatrix::S => "s",
        DumpMatrix::PPlus => "p_plus",
        DumpMatrix::PMinus => "p_minus",
        DumpMatrix::Q => "q",
    };
    let mut out = OutputSet::create(&cfg.output)?;
    out.write(&format!("matrix_{name}_f{}.csv", f.value()), matrix_csv(&m).as_bytes())?;
    let mut run = json!({ "f": f.value(), "matrix": name, "rows": m.nrows(), "cols": m.ncols() });
    if which == DumpMatrix::Q {
        run["lengths"] = json!(rounded(cfg.lengths()?.values()));
        run["R"] = json!(round10(r));
        run["s"] = json!({ "magnitude": round10(s.magnitude), "axis": s.axis.as_str() });
    }
    out.finish("dump", &run, Vec::new())?;
    Ok(Status::Clean)
}
