//! Text renderings shared by every output file.
//!
//! Data files carry ten significant digits; matrix dumps carry seventeen so
//! that they round-trip exactly.

use efimov_core::a3b_model::ResonanceScan;
use efimov_core::hyperangular_solver::{RootSet, TableRow};
use efimov_core::potentials::{ChannelClass, PotentialCurve};
use efimov_core::Matrix;
use num_complex::Complex64;
use serde::Serialize;

/// `x` with ten significant digits: positional for moderate exponents,
/// scientific otherwise. Zero prints as `0`.
pub fn sig10(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{x:.9e}");
    let exp: i32 = sci.rsplit('e').next().and_then(|e| e.parse().ok()).unwrap_or(0);
    if (-5..10).contains(&exp) {
        format!("{:.*}", (9 - exp) as usize, x)
    } else {
        sci
    }
}

/// `x` rounded to ten significant digits, for JSON numbers.
pub fn round10(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.9e}").parse().unwrap_or(x)
    } else {
        x
    }
}

/// Row-major CSV with 17 significant digits per entry.
pub fn matrix_csv(m: &Matrix) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = m.row(i).iter().map(|x| format!("{x:.16e}")).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Axis-tagged roots joined by `;`, e.g. `1.006237825i^(2);2.166220246`.
pub fn roots_text(set: &RootSet) -> String {
    let parts: Vec<String> = set
        .roots
        .iter()
        .map(|r| {
            let tag = if r.value.is_imaginary() { "i" } else { "" };
            let mult = if r.multiplicity > 1 { format!("^({})", r.multiplicity) } else { String::new() };
            format!("{}{tag}{mult}", sig10(r.value.magnitude))
        })
        .collect();
    parts.join(";")
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootEntry {
    pub magnitude: f64,
    pub axis: &'static str,
    pub multiplicity: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRecord {
    pub f: u32,
    pub region: String,
    #[serde(rename = "F3b")]
    pub f3b: u32,
    pub roots: Vec<RootEntry>,
    pub roots_text: String,
    pub diagnostic: Option<String>,
}

/// One record per (region, F3b) cell, rows in table order.
pub fn table_records(f: u32, rows: &[TableRow]) -> Vec<TableRecord> {
    let mut out = Vec::new();
    for row in rows {
        for cell in &row.cells {
            let (roots, roots_text, diagnostic) = match &cell.result {
                Ok(set) => (
                    set.roots
                        .iter()
                        .map(|r| RootEntry {
                            magnitude: round10(r.value.magnitude),
                            axis: r.value.axis.as_str(),
                            multiplicity: r.multiplicity,
                        })
                        .collect(),
                    roots_text(set),
                    None,
                ),
                Err(e) => (Vec::new(), format!("diagnostic: {e}"), Some(e.to_string())),
            };
            out.push(TableRecord { f, region: row.region.label(), f3b: cell.f3b, roots, roots_text, diagnostic });
        }
    }
    out
}

pub fn table_csv(records: &[TableRecord]) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["f", "region", "F3b", "roots"])?;
    for r in records {
        w.write_record([r.f.to_string(), r.region.clone(), r.f3b.to_string(), r.roots_text.clone()])?;
    }
    Ok(w.into_inner()?)
}

/// Class label for curve files; threshold energies scale with `1/mass`.
pub fn class_label(class: Option<ChannelClass>, mass: f64) -> String {
    match class {
        Some(ChannelClass::Efimov) => "efimov".to_string(),
        Some(ChannelClass::Barrier) => "barrier".to_string(),
        Some(ChannelClass::AtomDimer { f2b, threshold }) => {
            format!("atom_dimer(F2b={f2b};threshold={})", sig10(threshold / mass))
        }
        None => "unclassified".to_string(),
    }
}

/// Curve CSV for one F3b block: one row per (channel, grid point).
pub fn curves_csv(curves: &[PotentialCurve], mass: f64) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["R", "U", "s_magnitude", "s_axis", "channel_id", "channel_class"])?;
    for c in curves {
        let class = class_label(c.class, mass);
        for ((r, s), u) in c.r.iter().zip(&c.s).zip(&c.u) {
            w.write_record([
                sig10(*r),
                sig10(u / mass),
                sig10(s.magnitude),
                s.axis.as_str().to_string(),
                c.channel_id.to_string(),
                class.clone(),
            ])?;
        }
    }
    Ok(w.into_inner()?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    #[serde(rename = "R")]
    pub r: f64,
    #[serde(rename = "U")]
    pub u: f64,
    pub s_magnitude: f64,
    pub s_axis: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurveRecord {
    #[serde(rename = "F3b")]
    pub f3b: u32,
    pub channel_id: usize,
    pub channel_class: String,
    pub points: Vec<CurvePoint>,
}

pub fn curve_records(curves: &[PotentialCurve], mass: f64) -> Vec<CurveRecord> {
    curves
        .iter()
        .map(|c| CurveRecord {
            f3b: c.f3b,
            channel_id: c.channel_id,
            channel_class: class_label(c.class, mass),
            points: c
                .r
                .iter()
                .zip(&c.s)
                .zip(&c.u)
                .map(|((r, s), u)| CurvePoint {
                    r: round10(*r),
                    u: round10(u / mass),
                    s_magnitude: round10(s.magnitude),
                    s_axis: s.axis.as_str(),
                })
                .collect(),
        })
        .collect()
}

/// Long-format scan table: one row per (swept value, F3b).
pub fn scan_csv(scan: &ResonanceScan) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["swept", "F3b", "re", "im", "status"])?;
    for row in &scan.rows {
        let (re, im) = match row.value {
            Some(v) => (sig10(v.re), sig10(v.im)),
            None => (String::new(), String::new()),
        };
        w.write_record([sig10(row.swept), row.f3b.to_string(), re, im, row.status.as_str().to_string()])?;
    }
    Ok(w.into_inner()?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRecord {
    pub swept: f64,
    #[serde(rename = "F3b")]
    pub f3b: u32,
    pub value: Option<ComplexValue>,
    pub status: &'static str,
}

pub fn scan_records(scan: &ResonanceScan) -> Vec<ScanRecord> {
    scan.rows
        .iter()
        .map(|r| ScanRecord {
            swept: round10(r.swept),
            f3b: r.f3b,
            value: r.value.map(ComplexValue::from),
            status: r.status.as_str(),
        })
        .collect()
}

/// A complex number as parts plus magnitude and phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
    pub phase: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        ComplexValue { re: round10(z.re), im: round10(z.im), magnitude: round10(z.norm()), phase: round10(z.arg()) }
    }
}

/// Pretty JSON with a trailing newline.
pub fn json_bytes<T: Serialize>(value: &T) -> anyhow::Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}
