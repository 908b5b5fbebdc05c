//! Log-periodic closed forms for the three-body scattering lengths near
//! Efimov resonances (f = 1 and f = 2, all two-body lengths negative), with
//! an optional inelasticity η entering as tan(x + iη).
//!
//! Ratios of lengths are taken as ratios of magnitudes: every length in the
//! valid domain is negative, so the ratios are positive.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;

use crate::hyperangular_solver::{region_roots, Region, SolverError};
use crate::interaction::Axis;
use crate::spin_algebra::Spin;

pub const S0: f64 = 1.0062;
pub const S0_PRIME: f64 = 0.3788;
pub const DEFAULT_A_MINUS: f64 = -10.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum A3bError {
    #[error("F3b = {f3b} has no resonance formula for f = {f}")]
    UnsupportedChannel { f: u32, f3b: u32 },
    #[error("resonance formulas exist only for f = 1 and f = 2, got f = {0}")]
    UnsupportedSpin(u32),
    #[error("out of domain: {0}")]
    Domain(&'static str),
    #[error("invalid parameters: {0}")]
    Params(&'static str),
    #[error("invalid scan: {0}")]
    Scan(&'static str),
}

/// Prefactor exponents of the non-resonant power laws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaws {
    /// f = 1, F3b = 1: (a2/a0)^p.
    pub f1_f3b1: f64,
    /// f = 2, F3b = 2: (a2/a0)^p.
    pub f2_f3b2: f64,
    /// f = 2, F3b = 4: (a4/a2)^p.
    pub f2_f3b4: f64,
}

impl Default for PowerLaws {
    fn default() -> Self {
        PowerLaws { f1_f3b1: 0.82, f2_f3b2: 1.37, f2_f3b4: 1.04 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Resonance positions a⁻ per F3b; channels not listed use `a_minus_default`.
    pub a_minus: Vec<(u32, f64)>,
    pub a_minus_default: f64,
    pub s0: f64,
    pub s0_prime: f64,
    pub eta: f64,
    pub powers: PowerLaws,
}

/// Placeholder universal constants α = 0, β = 1, γ = 0 and a⁻ = −10 r_vdW for
/// every channel; these are not fitted values.
impl Default for ResonanceParams {
    fn default() -> Self {
        ResonanceParams {
            alpha: 0.0,
            beta: 1.0,
            gamma: 0.0,
            a_minus: Vec::new(),
            a_minus_default: DEFAULT_A_MINUS,
            s0: S0,
            s0_prime: S0_PRIME,
            eta: 0.0,
            powers: PowerLaws::default(),
        }
    }
}

impl ResonanceParams {
    pub fn a_minus(&self, f3b: u32) -> f64 {
        self.a_minus.iter().find(|(c, _)| *c == f3b).map(|&(_, a)| a).unwrap_or(self.a_minus_default)
    }

    /// True while any of α, β, γ or a⁻ still has its placeholder value.
    pub fn uses_placeholders(&self) -> bool {
        let d = ResonanceParams::default();
        self.alpha == d.alpha
            || self.beta == d.beta
            || self.gamma == d.gamma
            || self.a_minus_default == d.a_minus_default
            || self.a_minus.iter().any(|&(_, a)| a == d.a_minus_default)
    }

    pub fn validate(&self) -> Result<(), A3bError> {
        if ![self.alpha, self.beta, self.gamma, self.s0, self.s0_prime].iter().all(|x| x.is_finite()) {
            return Err(A3bError::Params("α, β, γ, s0 and s0' must be finite"));
        }
        if !(self.eta >= 0.0 && self.eta.is_finite()) {
            return Err(A3bError::Params("η must be finite and ≥ 0"));
        }
        let neg = |a: f64| a < 0.0 && a.is_finite();
        if !neg(self.a_minus_default) || !self.a_minus.iter().all(|&(_, a)| neg(a)) {
            return Err(A3bError::Params("resonance positions a⁻ must be negative"));
        }
        Ok(())
    }
}

/// tan(x + iy) = (sin 2x + i sinh 2y) / (cos 2x + cosh 2y).
pub fn complex_tan(z: Complex64) -> Complex64 {
    let (x, y) = (2.0 * z.re, 2.0 * z.im);
    let den = libm::cos(x) + libm::cosh(y);
    Complex64::new(libm::sin(x) / den, libm::sinh(y) / den)
}

/// One evaluated closed form: `[α − β tan(phase + iη)]·scale + γ·offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct A3bValue {
    pub value: Complex64,
    /// Real argument of the tangent.
    pub phase: f64,
    /// The tangent sits on its pole (η = 0); `value` is not finite.
    pub divergent: bool,
}

fn closed_form(p: &ResonanceParams, phase: f64, scale: f64, offset: f64) -> A3bValue {
    let t = complex_tan(Complex64::new(phase, p.eta));
    let value = (Complex64::new(p.alpha, 0.0) - t * p.beta) * scale + p.gamma * offset;
    A3bValue { value, phase, divergent: !(value.re.is_finite() && value.im.is_finite()) }
}

fn ratio(a: f64, b: f64) -> f64 {
    libm::fabs(a) / libm::fabs(b)
}

fn pow4(a: f64) -> f64 {
    let a2 = a * a;
    a2 * a2
}

fn check_negative(lengths: &[f64]) -> Result<(), A3bError> {
    if lengths.iter().all(|&a| a < 0.0 && a.is_finite()) {
        Ok(())
    } else {
        Err(A3bError::Domain("all two-body lengths must be negative and finite"))
    }
}

/// f = 1, F3b ∈ {1, 3}; valid for a0, a2 < 0 with |a0| ≫ |a2|.
pub fn a3b_f1(f3b: u32, a0: f64, a2: f64, p: &ResonanceParams) -> Result<A3bValue, A3bError> {
    p.validate()?;
    check_negative(&[a0, a2])?;
    if libm::fabs(a0) <= libm::fabs(a2) {
        return Err(A3bError::Domain("requires |a0| > |a2|"));
    }
    let phase = p.s0 * libm::log(ratio(a2, p.a_minus(f3b)));
    match f3b {
        1 => Ok(closed_form(p, phase, libm::pow(ratio(a2, a0), p.powers.f1_f3b1) * pow4(a0), pow4(a0))),
        3 => Ok(closed_form(p, phase, pow4(a2), 0.0)),
        _ => Err(A3bError::UnsupportedChannel { f: 1, f3b }),
    }
}

/// f = 2, F3b ∈ {0, 2, 3, 4, 6}; valid for negative lengths with
/// |a0| ≫ |a2| ≫ |a4|.
pub fn a3b_f2(f3b: u32, a0: f64, a2: f64, a4: f64, p: &ResonanceParams) -> Result<A3bValue, A3bError> {
    p.validate()?;
    check_negative(&[a0, a2, a4])?;
    if !(libm::fabs(a0) > libm::fabs(a2) && libm::fabs(a2) > libm::fabs(a4)) {
        return Err(A3bError::Domain("requires |a0| > |a2| > |a4|"));
    }
    let am = p.a_minus(f3b);
    let slow = p.s0_prime * libm::log(ratio(a2, a4));
    match f3b {
        0 => Ok(closed_form(p, p.s0 * libm::log(ratio(a2, am)), pow4(a2), 0.0)),
        2 => {
            let scale = libm::pow(ratio(a2, a0), p.powers.f2_f3b2) * pow4(a0);
            Ok(closed_form(p, p.s0 * libm::log(ratio(a4, am)) + slow, scale, pow4(a0)))
        }
        3 => Ok(closed_form(p, p.s0 * libm::log(ratio(a4, am)) + slow, pow4(a2), 0.0)),
        4 => {
            let scale = libm::pow(ratio(a4, a2), p.powers.f2_f3b4) * pow4(a2);
            Ok(closed_form(p, p.s0 * libm::log(ratio(a4, am)), scale, pow4(a2)))
        }
        6 => Ok(closed_form(p, p.s0 * libm::log(ratio(a4, am)), pow4(a4), 0.0)),
        _ => Err(A3bError::UnsupportedChannel { f: 2, f3b }),
    }
}

/// Channels with a closed form.
pub fn resonance_channels(f: Spin) -> Result<&'static [u32], A3bError> {
    match f.value() {
        1 => Ok(&[1, 3]),
        2 => Ok(&[0, 2, 3, 4, 6]),
        other => Err(A3bError::UnsupportedSpin(other)),
    }
}

/// Dispatches on spin; `lengths` is (a0, a2) or (a0, a2, a4).
pub fn a3b(f: Spin, f3b: u32, lengths: &[f64], p: &ResonanceParams) -> Result<A3bValue, A3bError> {
    match (f.value(), lengths) {
        (1, &[a0, a2]) => a3b_f1(f3b, a0, a2, p),
        (2, &[a0, a2, a4]) => a3b_f2(f3b, a0, a2, a4, p),
        (1, _) | (2, _) => Err(A3bError::Scan("wrong number of two-body lengths")),
        (other, _) => Err(A3bError::UnsupportedSpin(other)),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScanStatus {
    Ok,
    /// The tangent passes through a pole between this point and the previous
    /// one (or sits on it); only possible for η = 0.
    Pole,
    /// Re a3b changed sign since the previous point without a pole.
    SignChange,
    Domain(A3bError),
}

impl ScanStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScanStatus::Ok => "ok",
            ScanStatus::Pole => "pole",
            ScanStatus::SignChange => "sign-change",
            ScanStatus::Domain(_) => "domain-error",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub swept: f64,
    pub f3b: u32,
    pub value: Option<Complex64>,
    pub status: ScanStatus,
}

/// Long-format scan: for each swept point, one row per channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ResonanceScan {
    pub spin: Spin,
    /// Index of the swept length in (a0, a2, a4).
    pub swept_index: usize,
    pub channels: Vec<u32>,
    pub rows: Vec<ScanRow>,
}

impl ResonanceScan {
    pub fn column(&self, f3b: u32) -> impl Iterator<Item = &ScanRow> {
        self.rows.iter().filter(move |r| r.f3b == f3b)
    }

    pub fn has_errors(&self) -> bool {
        self.rows.iter().any(|r| matches!(r.status, ScanStatus::Domain(_)))
    }
}

/// Log-spaced points between two same-sign endpoints, inclusive.
pub fn log_points(lo: f64, hi: f64, points: usize) -> Result<Vec<f64>, A3bError> {
    if points < 2 {
        return Err(A3bError::Scan("need at least two points"));
    }
    if !(lo.is_finite() && hi.is_finite()) || lo == 0.0 || hi == 0.0 || (lo < 0.0) != (hi < 0.0) {
        return Err(A3bError::Scan("range endpoints must be finite, non-zero and of equal sign"));
    }
    let sign = if lo < 0.0 { -1.0 } else { 1.0 };
    let (l0, l1) = (libm::log(libm::fabs(lo)), libm::log(libm::fabs(hi)));
    Ok((0..points)
        .map(|i| {
            if i == 0 {
                lo
            } else if i + 1 == points {
                hi
            } else {
                sign * libm::exp(l0 + (l1 - l0) * i as f64 / (points - 1) as f64)
            }
        })
        .collect())
}

/// Sweeps length number `swept_index` of `fixed` (a0, a2[, a4]) over
/// `[lo, hi]` on a log grid and tabulates every closed form.
pub fn resonance_scan(
    f: Spin,
    swept_index: usize,
    lo: f64,
    hi: f64,
    fixed: &[f64],
    p: &ResonanceParams,
    points: usize,
) -> Result<ResonanceScan, A3bError> {
    let channels = resonance_channels(f)?;
    if fixed.len() != f.value() as usize + 1 {
        return Err(A3bError::Scan("wrong number of two-body lengths"));
    }
    if swept_index >= fixed.len() {
        return Err(A3bError::Scan("swept length index out of range"));
    }
    p.validate()?;
    let xs = log_points(lo, hi, points)?;
    let mut rows = Vec::with_capacity(xs.len() * channels.len());
    let mut previous: Vec<Option<A3bValue>> = alloc::vec![None; channels.len()];
    for &x in &xs {
        let mut lengths = fixed.to_vec();
        lengths[swept_index] = x;
        for (k, &c) in channels.iter().enumerate() {
            let row = match a3b(f, c, &lengths, p) {
                Err(e) => {
                    previous[k] = None;
                    ScanRow { swept: x, f3b: c, value: None, status: ScanStatus::Domain(e) }
                }
                Ok(v) => {
                    let status = classify_step(previous[k].as_ref(), &v, p.eta);
                    previous[k] = Some(v);
                    ScanRow { swept: x, f3b: c, value: Some(v.value), status }
                }
            };
            rows.push(row);
        }
    }
    Ok(ResonanceScan { spin: f, swept_index, channels: channels.to_vec(), rows })
}

fn classify_step(prev: Option<&A3bValue>, cur: &A3bValue, eta: f64) -> ScanStatus {
    if cur.divergent {
        return ScanStatus::Pole;
    }
    let Some(prev) = prev else { return ScanStatus::Ok };
    // tan(x) has poles at x = π/2 + kπ: count which branch each phase is on.
    let branch = |x: f64| libm::floor((x - PI / 2.0) / PI);
    if eta == 0.0 && !prev.divergent && branch(prev.phase) != branch(cur.phase) {
        return ScanStatus::Pole;
    }
    if (prev.value.re < 0.0) != (cur.value.re < 0.0) && prev.value.re != 0.0 && cur.value.re != 0.0 {
        return ScanStatus::SignChange;
    }
    ScanStatus::Ok
}

/// Comparison of a printed power-law exponent with twice the lowest real
/// channel strength of the region where that channel is repulsive.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentCheck {
    pub spin: u32,
    pub f3b: u32,
    pub region: alloc::string::String,
    pub printed: f64,
    pub lowest_real: f64,
    pub implied: f64,
}

/// Regions where the non-resonant prefactors originate. The relation
/// exponent ≈ 2 p is a consistency report, not an identity.
pub fn exponent_cross_check(powers: &PowerLaws) -> Result<Vec<ExponentCheck>, SolverError> {
    let cases: [(u32, u32, &[u32], f64); 3] =
        [(1, 1, &[0], powers.f1_f3b1), (2, 2, &[0], powers.f2_f3b2), (2, 4, &[0, 2], powers.f2_f3b4)];
    cases
        .iter()
        .map(|&(f, f3b, resonant, printed)| {
            let spin = Spin::new(f).map_err(SolverError::Spin)?;
            let region = Region::new(spin, resonant)?;
            let roots = region_roots(&region, f3b)?;
            let p = roots
                .roots
                .iter()
                .find(|r| r.value.axis == Axis::Real)
                .map(|r| r.value.magnitude)
                .unwrap_or(f64::NAN);
            Ok(ExponentCheck { spin: f, f3b, region: region.label(), printed, lowest_real: p, implied: 2.0 * p })
        })
        .collect()
}
