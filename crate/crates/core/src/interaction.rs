//! Zero-range scattering-length operator in the two- and three-body spin
//! bases, and the s-dependent M matrices built from it.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::linalg::Matrix;
use crate::spin_algebra::{cg, product_index, product_state, ProductState, Spin};
use crate::trig::{cos_pi, sin_pi, sinh6_over_sinh2};

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Threshold on |sin(πs/2)| below which real-axis factors are refused.
pub const POLE_THRESHOLD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum InteractionError {
    #[error("f = {f} needs {expected} scattering lengths (a0, a2, …), got {got}")]
    WrongCount { f: u32, expected: usize, got: usize },
    #[error("scattering length a{f2b} is not finite")]
    NonFinite { f2b: u32 },
    #[error("spectator index must be 1, 2 or 3, got {0}")]
    BadSpectator(usize),
    #[error("M({index}) needs the spectator-{index} A matrix, got spectator {got}")]
    SpectatorMismatch { index: usize, got: usize },
    #[error("s = {0} is on a pole of the angular factors")]
    Pole(SValue),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axis {
    Imaginary,
    Real,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::Real => "real",
            Axis::Imaginary => "imaginary",
        }
    }
}

/// A point on the real or imaginary s axis, stored as a magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SValue {
    pub magnitude: f64,
    pub axis: Axis,
}

impl SValue {
    pub fn real(x: f64) -> Self {
        SValue { magnitude: x, axis: Axis::Real }
    }

    pub fn imaginary(x: f64) -> Self {
        SValue { magnitude: x, axis: Axis::Imaginary }
    }

    /// s², negative on the imaginary axis.
    pub fn squared(&self) -> f64 {
        match self.axis {
            Axis::Real => self.magnitude * self.magnitude,
            Axis::Imaginary => -self.magnitude * self.magnitude,
        }
    }

    pub fn is_imaginary(&self) -> bool {
        self.axis == Axis::Imaginary
    }
}

impl fmt::Display for SValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let suffix = if self.is_imaginary() { "i" } else { "" };
        match f.precision() {
            Some(p) => write!(f, "{:.*}{suffix}", p, self.magnitude),
            None => write!(f, "{}{suffix}", self.magnitude),
        }
    }
}

/// The even-channel lengths {a0, a2, …, a2f} (units of r_vdW).
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringLengths {
    spin: Spin,
    values: Vec<f64>,
}

impl ScatteringLengths {
    /// `values[n]` is the length for F2b = 2n.
    pub fn new(spin: Spin, values: &[f64]) -> Result<Self, InteractionError> {
        let expected = spin.value() as usize + 1;
        if values.len() != expected {
            return Err(InteractionError::WrongCount { f: spin.value(), expected, got: values.len() });
        }
        if let Some(n) = values.iter().position(|a| !a.is_finite()) {
            return Err(InteractionError::NonFinite { f2b: 2 * n as u32 });
        }
        Ok(ScatteringLengths { spin, values: values.to_vec() })
    }

    pub fn uniform(spin: Spin, a: f64) -> Result<Self, InteractionError> {
        Self::new(spin, &alloc::vec![a; spin.value() as usize + 1])
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// a_{F2b}; zero for odd channels, which do not interact.
    pub fn get(&self, f2b: u32) -> f64 {
        if f2b % 2 == 1 {
            0.0
        } else {
            self.values.get(f2b as usize / 2).copied().unwrap_or(0.0)
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.values.iter().enumerate().map(|(n, &a)| (2 * n as u32, a))
    }

    pub fn scaled(&self, k: f64) -> Self {
        ScatteringLengths { spin: self.spin, values: self.values.iter().map(|a| k * a).collect() }
    }

    /// Smallest strictly positive length, if any.
    pub fn min_positive(&self) -> Option<f64> {
        self.values.iter().copied().filter(|&a| a > 0.0).reduce(f64::min)
    }
}

/// Â on the two-body coupled basis |F2b M⟩ (F2b ascending, M descending).
#[derive(Debug, Clone)]
pub struct TwoBodyOperator {
    pub matrix: Matrix,
    pub labels: Vec<(u32, i32)>,
}

pub fn scattering_operator(a: &ScatteringLengths) -> TwoBodyOperator {
    let f = a.spin().value();
    let labels: Vec<(u32, i32)> = (0..=2 * f)
        .flat_map(|ff| (-(ff as i32)..=ff as i32).rev().map(move |m| (ff, m)))
        .collect();
    let diag: Vec<f64> = labels.iter().map(|&(ff, _)| a.get(ff)).collect();
    TwoBodyOperator { matrix: Matrix::from_diagonal(&diag), labels }
}

/// Â on the two-atom product basis |m_i m_j⟩ (descending m).
pub fn pair_operator_product_basis(a: &ScatteringLengths) -> Matrix {
    let f = a.spin().int();
    let n = (2 * f + 1) as usize;
    let m_of = |i: usize| f - i as i32;
    Matrix::from_fn(n * n, n * n, |r, c| {
        let (mi, mj) = (m_of(r / n), m_of(r % n));
        let (mi2, mj2) = (m_of(c / n), m_of(c % n));
        let mm = mi + mj;
        if mm != mi2 + mj2 {
            return 0.0;
        }
        a.iter()
            .filter(|&(ff, x)| x != 0.0 && mm.abs() <= ff as i32)
            .map(|(ff, x)| {
                let ff = ff as i32;
                x * cg(f, mi, f, mj, ff, mm) * cg(f, mi2, f, mj2, ff, mm)
            })
            .sum()
    })
}

/// A⁽ᵏ⁾: the pair operator for the pair not containing atom `k`, acting on
/// the three-atom product basis.
#[derive(Debug, Clone)]
pub struct SpectatorAMatrix {
    pub k: usize,
    pub matrix: Matrix,
}

pub fn spectator_a_matrix(a: &ScatteringLengths, k: usize) -> Result<SpectatorAMatrix, InteractionError> {
    if !(1..=3).contains(&k) {
        return Err(InteractionError::BadSpectator(k));
    }
    let f = a.spin();
    let n = f.multiplicity();
    let fi = f.int();
    let pair = pair_operator_product_basis(a);
    let pidx = |mi: i32, mj: i32| (fi - mi) as usize * n + (fi - mj) as usize;
    // (spectator, first, second) of each product state for this k.
    let split = |s: ProductState| match k {
        1 => (s.m1, s.m2, s.m3),
        2 => (s.m2, s.m3, s.m1),
        _ => (s.m3, s.m1, s.m2),
    };
    let join = |sp: i32, x: i32, y: i32| match k {
        1 => ProductState::new(sp, x, y),
        2 => ProductState::new(y, sp, x),
        _ => ProductState::new(x, y, sp),
    };
    let dim = f.product_dim();
    let mut m = Matrix::zeros(dim, dim);
    for row in 0..dim {
        let (sp, x, y) = split(product_state(f, row));
        for x2 in -fi..=fi {
            let y2 = x + y - x2;
            if y2.abs() > fi {
                continue;
            }
            let v = pair[(pidx(x, y), pidx(x2, y2))];
            if v != 0.0 {
                m[(row, product_index(f, join(sp, x2, y2)))] = v;
            }
        }
    }
    Ok(SpectatorAMatrix { k, matrix: m })
}

/// Scalar factors multiplying A⁽¹⁾ and A⁽²·³⁾ in the M matrices:
/// `(s cot(πs/2), −4 sin(πs/6) / (√3 sin(πs/2)))`, in hyperbolic form on the
/// imaginary axis so both stay real.
pub fn m_factors(s: SValue) -> Result<(f64, f64), InteractionError> {
    let x = s.magnitude;
    if x.abs() < 1e-8 {
        return Ok((2.0 / PI, -4.0 / (3.0 * SQRT3)));
    }
    match s.axis {
        Axis::Real => {
            let sn = sin_pi(x / 2.0);
            if sn.abs() < POLE_THRESHOLD {
                return Err(InteractionError::Pole(s));
            }
            Ok((x * cos_pi(x / 2.0) / sn, -4.0 * sin_pi(x / 6.0) / (SQRT3 * sn)))
        }
        Axis::Imaginary => {
            let coth = 1.0 / libm::tanh(PI * x / 2.0);
            Ok((x * coth, -4.0 * sinh6_over_sinh2(x.abs()) / SQRT3))
        }
    }
}

/// M⁽ⁱ⁾(s) for spectator `i`, built from the matching A⁽ⁱ⁾.
pub fn m_matrix(i: usize, s: SValue, a: &SpectatorAMatrix) -> Result<Matrix, InteractionError> {
    if !(1..=3).contains(&i) {
        return Err(InteractionError::BadSpectator(i));
    }
    if a.k != i {
        return Err(InteractionError::SpectatorMismatch { index: i, got: a.k });
    }
    let (diag, exch) = m_factors(s)?;
    Ok(a.matrix.scaled(if i == 1 { diag } else { exch }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin_algebra::{permutation_matrix, Permutation};

    fn lengths(f: u32, a: &[f64]) -> ScatteringLengths {
        ScatteringLengths::new(Spin::new(f).unwrap(), a).unwrap()
    }

    #[test]
    fn operator_degeneracies() {
        let op = scattering_operator(&lengths(1, &[1.0, 2.0]));
        let d: Vec<f64> = (0..9).map(|i| op.matrix[(i, i)]).collect();
        assert_eq!(d.iter().filter(|&&x| x == 1.0).count(), 1);
        assert_eq!(d.iter().filter(|&&x| x == 2.0).count(), 5);
        assert_eq!(d.iter().filter(|&&x| x == 0.0).count(), 3);

        let zero = scattering_operator(&lengths(2, &[0.0; 3]));
        assert_eq!(zero.matrix.max_abs(), 0.0);

        let a4 = scattering_operator(&lengths(2, &[0.0, 0.0, 1.0]));
        assert_eq!(a4.matrix.rank(1e-12), 9);
    }

    #[test]
    fn length_validation() {
        let f = Spin::new(2).unwrap();
        assert!(ScatteringLengths::new(f, &[1.0, 2.0]).is_err());
        assert!(ScatteringLengths::new(f, &[1.0, f64::NAN, 2.0]).is_err());
        assert_eq!(lengths(1, &[3.0, 4.0]).get(1), 0.0);
    }

    #[test]
    fn spectator_matrices_cycle_under_permutation() {
        let a = lengths(1, &[1.3, -0.4]);
        let f = a.spin();
        let pp = permutation_matrix(f, Permutation::Cyclic);
        let pm = permutation_matrix(f, Permutation::Anticyclic);
        let a1 = spectator_a_matrix(&a, 1).unwrap().matrix;
        let a2 = spectator_a_matrix(&a, 2).unwrap().matrix;
        let a3 = spectator_a_matrix(&a, 3).unwrap().matrix;
        assert!(pm.matmul(&a1).matmul(&pp).max_abs_diff(&a2) < 1e-14);
        assert!(pp.matmul(&a1).matmul(&pm).max_abs_diff(&a3) < 1e-14);
        assert!(a1.is_symmetric(1e-15));
    }

    #[test]
    fn equal_lengths_give_scaled_even_projector() {
        let a = lengths(1, &[0.7, 0.7]);
        let a1 = spectator_a_matrix(&a, 1).unwrap().matrix;
        let p = a1.scaled(1.0 / 0.7);
        assert!(p.matmul(&p).max_abs_diff(&p) < 1e-14);
        assert!((p.trace() - 3.0 * 6.0).abs() < 1e-12);
    }

    #[test]
    fn trace_counts_degeneracies() {
        for (f, a) in [(1, alloc::vec![0.5, 2.0]), (2, alloc::vec![1.0, -2.0, 3.0]), (3, alloc::vec![1.0, 2.0, 3.0, 4.0])] {
            let l = lengths(f, &a);
            let want: f64 = (2 * f + 1) as f64 * l.iter().map(|(ff, x)| (2 * ff + 1) as f64 * x).sum::<f64>();
            for k in 1..=3 {
                let t = spectator_a_matrix(&l, k).unwrap().matrix.trace();
                assert!((t - want).abs() < 1e-10, "f={f} k={k}: {t} vs {want}");
            }
        }
    }

    #[test]
    fn angular_factor_limits() {
        let (d, e) = m_factors(SValue::real(1e-10)).unwrap();
        assert!((d - 2.0 / PI).abs() < 1e-15 && (e + 4.0 / (3.0 * SQRT3)).abs() < 1e-15);
        let (d, _) = m_factors(SValue::real(1e-4)).unwrap();
        assert!((d - 2.0 / PI).abs() < 1e-7);
        let sigma = 0.8;
        let (d, _) = m_factors(SValue::imaginary(sigma)).unwrap();
        assert!((d - sigma / libm::tanh(PI * sigma / 2.0)).abs() < 1e-15);
        let (d, _) = m_factors(SValue::real(1.0)).unwrap();
        assert!(d.abs() < 1e-15);
        assert!(matches!(m_factors(SValue::real(2.0)), Err(InteractionError::Pole(_))));
        assert!(m_factors(SValue::real(4.0 + 1e-12)).is_err());
    }

    #[test]
    fn m_matrix_checks_spectator() {
        let a = lengths(1, &[1.0, 1.0]);
        let a2 = spectator_a_matrix(&a, 2).unwrap();
        assert!(m_matrix(1, SValue::real(0.5), &a2).is_err());
        assert!(m_matrix(2, SValue::real(0.5), &a2).is_ok());
        assert!(spectator_a_matrix(&a, 4).is_err());
    }
}
