//! Bracketing and bisection on the sorted eigenvalue branches of a
//! symmetric-matrix-valued function of one real variable.
//!
//! A scalar function is the 1×1 case.

use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Unconverged {
    pub lo: f64,
    pub hi: f64,
}

const MAX_BISECTIONS: usize = 400;

fn bisect<F: FnMut(f64) -> Vec<f64>>(
    eval: &mut F,
    branch: usize,
    mut lo: f64,
    mut hi: f64,
    lo_value: f64,
    tol: f64,
) -> Result<f64, Unconverged> {
    let lo_neg = lo_value < 0.0;
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol * lo.abs().max(1.0) {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let v = eval(mid)[branch];
        if v == 0.0 {
            return Ok(mid);
        }
        if (v < 0.0) == lo_neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Unconverged { lo, hi })
}

/// Fine scan of `[lo, hi]`: every sign change of a sorted branch between
/// neighbouring grid points is bisected to `tol`.
pub(crate) fn scan_branches<F: FnMut(f64) -> Vec<f64>>(
    eval: &mut F,
    lo: f64,
    hi: f64,
    step: f64,
    tol: f64,
    out: &mut Vec<f64>,
) -> Result<(), Unconverged> {
    if hi <= lo {
        return Ok(());
    }
    let n = libm::ceil((hi - lo) / step).max(1.0) as usize;
    let h = (hi - lo) / n as f64;
    let mut x0 = lo;
    let mut v0 = eval(x0);
    out.extend(v0.iter().filter(|&&v| v == 0.0).map(|_| x0));
    for i in 1..=n {
        let x1 = if i == n { hi } else { lo + i as f64 * h };
        let v1 = eval(x1);
        for j in 0..v0.len() {
            let (a, b) = (v0[j], v1[j]);
            if b == 0.0 {
                out.push(x1);
            } else if a != 0.0 && (a < 0.0) != (b < 0.0) {
                out.push(bisect(eval, j, x0, x1, a, tol)?);
            }
        }
        x0 = x1;
        v0 = v1;
    }
    Ok(())
}

/// Bracketing on an interval where every branch is known to be monotone:
/// at most one root per branch, found from the end-point signs.
pub(crate) fn monotone_branches<F: FnMut(f64) -> Vec<f64>>(
    eval: &mut F,
    lo: f64,
    hi: f64,
    tol: f64,
    out: &mut Vec<f64>,
) -> Result<(), Unconverged> {
    if hi <= lo {
        return Ok(());
    }
    let va = eval(lo);
    let vb = eval(hi);
    for j in 0..va.len() {
        let (a, b) = (va[j], vb[j]);
        if b == 0.0 {
            out.push(hi);
        } else if a != 0.0 && (a < 0.0) != (b < 0.0) {
            out.push(bisect(eval, j, lo, hi, a, tol)?);
        }
    }
    Ok(())
}

/// Sorts and merges roots closer than `rel · max(1, |x|)`; the count of a
/// cluster is its multiplicity.
pub(crate) fn merge(mut xs: Vec<f64>, rel: f64) -> Vec<(f64, u32)> {
    xs.sort_by(f64::total_cmp);
    let mut out: Vec<(f64, u32, f64)> = Vec::new();
    for x in xs {
        match out.last_mut() {
            Some((mean, count, last)) if (x - *last).abs() <= rel * x.abs().max(1.0) => {
                *mean = (*mean * *count as f64 + x) / (*count as f64 + 1.0);
                *count += 1;
                *last = x;
            }
            _ => out.push((x, 1, x)),
        }
    }
    out.into_iter().map(|(m, c, _)| (m, c)).collect()
}
