//! Adiabatic potentials U(R) = (s² − 1/4)/(2μR²) traced over a hyperradial
//! grid, and their asymptotic classification.
//!
//! Channels are continued from one grid point to the next by nearest value
//! in s² (so a root passing through s = 0 from the real to the imaginary
//! axis stays one channel). When two candidates are comparably close the
//! assignment is still made but reported as a diagnostic.

use alloc::vec::Vec;

use crate::hyperangular_solver::{
    find_block_roots, BlockGeometry, ReducedBlock, RootOptions, SolverError, REDUCED_MASS,
};
use crate::interaction::{SValue, ScatteringLengths};

/// Relative s² change above which two grid points are never matched.
const MATCH_MAX: f64 = 0.5;
/// A second candidate within this factor of the best distance is ambiguous.
const AMBIGUITY_RATIO: f64 = 2.0;
/// Asymptotic s within this distance of 2 or 4 counts as a barrier.
const BARRIER_TOL: f64 = 0.1;
/// Relative tolerance on the dimer threshold −1/a².
const DIMER_TOL: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TraceError {
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("R_min = {0} lies in the non-universal region R < 1 r_vdW (enable short-range explicitly)")]
    ShortRange(f64),
    #[error("invalid hyperradial grid: {0}")]
    InvalidGrid(&'static str),
}

/// U(R) for one root, units ħ = m = 1.
pub fn potential_from_root(s: SValue, r: f64) -> f64 {
    (s.squared() - 0.25) / (2.0 * REDUCED_MASS * r * r)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelClass {
    Efimov,
    Barrier,
    /// Atom plus an F2b dimer of energy `threshold` = −1/a².
    AtomDimer { f2b: u32, threshold: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PotentialCurve {
    pub f3b: u32,
    pub channel_id: usize,
    pub r: Vec<f64>,
    pub s: Vec<SValue>,
    pub u: Vec<f64>,
    /// `None` when no class matched; a diagnostic is emitted alongside.
    pub class: Option<ChannelClass>,
}

impl PotentialCurve {
    fn new(f3b: u32, channel_id: usize) -> Self {
        PotentialCurve { f3b, channel_id, r: Vec::new(), s: Vec::new(), u: Vec::new(), class: None }
    }

    fn push(&mut self, r: f64, s: SValue) {
        self.r.push(r);
        self.s.push(s);
        self.u.push(potential_from_root(s, r));
    }

    /// Value at grid point `r`, if the channel exists there.
    pub fn at(&self, r: f64) -> Option<(SValue, f64)> {
        let i = self.r.iter().position(|&x| (x - r).abs() <= 1e-12 * r)?;
        Some((self.s[i], self.u[i]))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TraceDiagnostic {
    /// Two roots were comparably close to a channel's previous value.
    Ambiguous { f3b: u32, channel: usize, r: f64, chosen: SValue, alternative: SValue },
    /// A step much larger than its neighbours: a crossing may have been missed.
    Discontinuity { f3b: u32, channel: usize, r: f64 },
    Unclassified { f3b: u32, channel: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceResult {
    pub curves: Vec<PotentialCurve>,
    pub diagnostics: Vec<TraceDiagnostic>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    pub r_min: f64,
    pub r_max: f64,
    pub points_per_decade: u32,
    /// Real-axis window; the imaginary window grows as max(s_max, 3R/a⁺_min).
    pub s_max: f64,
    /// Permit R_min < 1, inside the non-universal short-range zone.
    pub allow_short_range: bool,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { r_min: 1.0, r_max: 1e7, points_per_decade: 64, s_max: 5.0, allow_short_range: false }
    }
}

/// Log-spaced grid from `r_min` to `r_max` inclusive.
pub fn hyperradial_grid(opts: &TraceOptions) -> Result<Vec<f64>, TraceError> {
    if !(opts.r_min.is_finite() && opts.r_max.is_finite() && opts.r_min > 0.0) {
        return Err(TraceError::InvalidGrid("R bounds must be positive and finite"));
    }
    if opts.r_max <= opts.r_min {
        return Err(TraceError::InvalidGrid("R_max must exceed R_min"));
    }
    if opts.points_per_decade == 0 {
        return Err(TraceError::InvalidGrid("points per decade must be positive"));
    }
    if opts.r_min < 1.0 && !opts.allow_short_range {
        return Err(TraceError::ShortRange(opts.r_min));
    }
    let decades = libm::log10(opts.r_max / opts.r_min);
    let n = libm::ceil(decades * opts.points_per_decade as f64 - 1e-9).max(1.0) as usize;
    let step = decades / n as f64;
    let mut grid: Vec<f64> = (0..n).map(|k| opts.r_min * libm::pow(10.0, k as f64 * step)).collect();
    grid.push(opts.r_max);
    Ok(grid)
}

fn distance(from: f64, to: f64) -> f64 {
    (to - from).abs() / (1.0 + from.abs())
}

/// Traces every channel of one F3b block across the grid.
pub fn trace_channels(lengths: &ScatteringLengths, f3b: u32, opts: &TraceOptions) -> Result<TraceResult, TraceError> {
    let grid = hyperradial_grid(opts)?;
    let geometry = BlockGeometry::new(lengths.spin(), f3b)?;
    let a_min = lengths.min_positive();

    let mut curves: Vec<PotentialCurve> = Vec::new();
    let mut diagnostics = Vec::new();
    // (curve index, last s²) of channels alive at the previous grid point.
    let mut active: Vec<(usize, f64)> = Vec::new();

    for &r in &grid {
        let block = ReducedBlock::new(&geometry, lengths, r);
        let imag_max = a_min.map_or(opts.s_max, |a| opts.s_max.max(3.0 * r / a));
        let root_opts = RootOptions { s_max: opts.s_max, imag_max: Some(imag_max), ..RootOptions::default() };
        let roots = find_block_roots(&block, f3b, &root_opts)?.expanded();
        let q: Vec<f64> = roots.iter().map(SValue::squared).collect();

        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (i, &(_, last)) in active.iter().enumerate() {
            for (j, &qj) in q.iter().enumerate() {
                pairs.push((distance(last, qj), i, j));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut chan_of_root: Vec<Option<usize>> = alloc::vec![None; q.len()];
        let mut taken = alloc::vec![false; active.len()];
        for &(d, i, j) in &pairs {
            if d > MATCH_MAX {
                break;
            }
            if taken[i] || chan_of_root[j].is_some() {
                continue;
            }
            taken[i] = true;
            chan_of_root[j] = Some(i);
            let last = active[i].1;
            let rival = q.iter().enumerate().filter(|&(k, &qk)| k != j && distance(q[j], qk) > 1e-6).find(|&(_, &qk)| {
                let dk = distance(last, qk);
                d > 1e-9 && dk <= AMBIGUITY_RATIO * d
            });
            if let Some((k, _)) = rival {
                diagnostics.push(TraceDiagnostic::Ambiguous {
                    f3b,
                    channel: active[i].0,
                    r,
                    chosen: roots[j],
                    alternative: roots[k],
                });
            }
        }

        let mut next = Vec::with_capacity(q.len());
        for (j, slot) in chan_of_root.iter().enumerate() {
            let idx = match slot {
                Some(i) => active[*i].0,
                None => {
                    curves.push(PotentialCurve::new(f3b, curves.len()));
                    curves.len() - 1
                }
            };
            curves[idx].push(r, roots[j]);
            next.push((idx, q[j]));
        }
        active = next;
    }

    for c in &curves {
        diagnostics.extend(discontinuities(c));
    }
    for c in curves.iter_mut() {
        c.class = classify_asymptotics(c, lengths, opts).ok();
        if c.class.is_none() {
            diagnostics.push(TraceDiagnostic::Unclassified { f3b, channel: c.channel_id });
        }
    }
    Ok(TraceResult { curves, diagnostics })
}

/// Steps in s² more than ten times both neighbouring steps.
fn discontinuities(c: &PotentialCurve) -> Vec<TraceDiagnostic> {
    let q: Vec<f64> = c.s.iter().map(SValue::squared).collect();
    let steps: Vec<f64> = q.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let mut out = Vec::new();
    for i in 1..steps.len().saturating_sub(1) {
        let local = steps[i - 1].max(steps[i + 1]);
        if steps[i] > 10.0 * local && steps[i] > 1e-3 * (1.0 + q[i].abs()) {
            out.push(TraceDiagnostic::Discontinuity { f3b: c.f3b, channel: c.channel_id, r: c.r[i + 1] });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ClassifyError {
    #[error("curve is empty")]
    Empty,
    #[error("no asymptotic class matches channel {0}")]
    Unclassified(usize),
}

/// Asymptotic class of a traced curve, judged at its last grid point.
///
/// * atom–dimer: U within 1% of −1/a² for a positive a_{F2b} of the block,
///   provided the curve reaches two decades beyond the largest positive a;
/// * barrier: real s within 0.1 of 2 or 4 at R_max, or a real root that
///   left the search window upwards;
/// * Efimov: an imaginary root that persists to R_max.
pub fn classify_asymptotics(
    curve: &PotentialCurve,
    lengths: &ScatteringLengths,
    opts: &TraceOptions,
) -> Result<ChannelClass, ClassifyError> {
    let (&r, &s, &u) = match (curve.r.last(), curve.s.last(), curve.u.last()) {
        (Some(r), Some(s), Some(u)) => (r, s, u),
        _ => return Err(ClassifyError::Empty),
    };
    let reaches_end = r >= opts.r_max * (1.0 - 1e-12);
    let largest_positive = lengths.iter().map(|(_, a)| a).filter(|&a| a > 0.0).reduce(f64::max);
    let dimers_resolved = largest_positive.is_none_or(|a| r >= 100.0 * a);

    if s.is_imaginary() && dimers_resolved {
        let f = lengths.spin().value();
        let dimer = lengths.iter().find(|&(f2b, a)| {
            let allowed = f.abs_diff(f2b) <= curve.f3b && curve.f3b <= f + f2b;
            let threshold = -1.0 / (a * a);
            allowed && a > 0.0 && (u - threshold).abs() <= DIMER_TOL * threshold.abs()
        });
        if let Some((f2b, a)) = dimer {
            return Ok(ChannelClass::AtomDimer { f2b, threshold: -1.0 / (a * a) });
        }
    }
    if s.is_imaginary() && reaches_end {
        return Ok(ChannelClass::Efimov);
    }
    if !s.is_imaginary() && u > 0.0 {
        let near_free = [2.0, 4.0].iter().any(|&v| (s.magnitude - v).abs() <= BARRIER_TOL);
        let exited = !reaches_end && s.magnitude >= opts.s_max - BARRIER_TOL;
        if (reaches_end && near_free) || exited {
            return Ok(ChannelClass::Barrier);
        }
    }
    Err(ClassifyError::Unclassified(curve.channel_id))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_algebra::Spin;

    #[test]
    fn potential_examples() {
        assert_eq!(potential_from_root(SValue::real(0.5), 7.0), 0.0);
        let u = potential_from_root(SValue::real(2.0), 1.0);
        assert!((u - 3.75 * libm::sqrt(3.0) / 2.0).abs() < 1e-12);
        let u = potential_from_root(SValue::imaginary(1.0062), 10.0);
        assert!(u < 0.0);
        // Falls off faster than the critical −1/(8μR²) for bound-state collapse.
        assert!(u * 2.0 * REDUCED_MASS * 100.0 < -0.25);
    }

    #[test]
    fn grid_shape() {
        let g = hyperradial_grid(&TraceOptions { r_max: 1e2, points_per_decade: 4, ..Default::default() }).unwrap();
        assert_eq!(g.len(), 9);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert!((g[4] - 10.0).abs() < 1e-12);
        let short = TraceOptions { r_min: 0.5, ..Default::default() };
        assert!(matches!(hyperradial_grid(&short), Err(TraceError::ShortRange(_))));
        assert!(hyperradial_grid(&TraceOptions { allow_short_range: true, ..short }).is_ok());
    }

    #[test]
    fn negative_lengths_never_give_dimers() {
        let f = Spin::new(1).unwrap();
        let a = ScatteringLengths::new(f, &[-50.0, -20.0]).unwrap();
        let opts = TraceOptions { r_max: 1e4, points_per_decade: 8, ..Default::default() };
        for f3b in 1..=3 {
            let t = trace_channels(&a, f3b, &opts).unwrap();
            assert!(t.curves.iter().all(|c| !matches!(c.class, Some(ChannelClass::AtomDimer { .. }))));
        }
    }
}
