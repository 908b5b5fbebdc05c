//! sin(πx) and cos(πx) with exact argument reduction, so zeros at integer
//! and half-integer `x` come out exactly and nearby values keep full relative
//! precision.

use core::f64::consts::PI;

fn reduce(x: f64) -> (i64, f64) {
    let n = libm::round(2.0 * x);
    (n as i64, x - 0.5 * n)
}

pub fn sin_pi(x: f64) -> f64 {
    let (n, r) = reduce(x);
    match n.rem_euclid(4) {
        0 => libm::sin(PI * r),
        1 => libm::cos(PI * r),
        2 => -libm::sin(PI * r),
        _ => -libm::cos(PI * r),
    }
}

pub fn cos_pi(x: f64) -> f64 {
    let (n, r) = reduce(x);
    match n.rem_euclid(4) {
        0 => libm::cos(PI * r),
        1 => -libm::sin(PI * r),
        2 => -libm::cos(PI * r),
        _ => libm::sin(PI * r),
    }
}

/// sinh(πσ/6) / cosh(πσ/2) for σ ≥ 0, free of overflow.
pub fn sinh6_over_cosh2(sigma: f64) -> f64 {
    let e3 = libm::exp(-PI * sigma / 3.0);
    e3 * (1.0 - e3) / (1.0 + libm::exp(-PI * sigma))
}

/// sinh(πσ/6) / sinh(πσ/2) for σ > 0, free of overflow.
pub fn sinh6_over_sinh2(sigma: f64) -> f64 {
    let e3 = libm::exp(-PI * sigma / 3.0);
    e3 * (1.0 - e3) / -libm::expm1(-PI * sigma)
}
