//! Direct and spin-exchange expansion of the two- and three-body contact
//! interactions.
//!
//! The scattering-length operator of a pair is diagonal in F2b with
//! eigenvalue a_{F2b}; since f₁·f₂ is diagonal there too, with eigenvalue
//! λ(F2b) = F2b(F2b+1)/2 − f(f+1), the operator is a polynomial in f₁·f₂
//! whose coefficients solve a Vandermonde system. The three-body case is the
//! same with Σ_{i<j} f_i·f_j on the fully symmetric F3b sectors.
//!
//! All solves are exact over ℚ; floats enter only when a combination is
//! evaluated on numeric lengths.

use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::interaction::ScatteringLengths;
use crate::linalg::Matrix;
use crate::spin_algebra::{product_spin_operators, symmetry_classify, Spin, SpinError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeanFieldError {
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error("F2b = {f2b} is outside 0..={max}")]
    PairTotal { f2b: u32, max: u32 },
    #[error("three-body lengths for f = {f} must cover F3b = {expected:?}, got {got} values")]
    ThreeBodyCount { f: u32, expected: Vec<u32>, got: usize },
    #[error("atomic mass must be positive and finite, got {0}")]
    Mass(f64),
    #[error("density must be positive and finite, got {0}")]
    Density(f64),
    #[error("expected {expected} values to evaluate the combination, got {got}")]
    Arity { expected: usize, got: usize },
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Eigenvalue of f₁·f₂ on a pair with total spin `f2b`.
pub fn pair_eigenvalue(f: Spin, f2b: u32) -> Result<BigRational, MeanFieldError> {
    if f2b > 2 * f.value() {
        return Err(MeanFieldError::PairTotal { f2b, max: 2 * f.value() });
    }
    let (ff, f) = (f2b as i64, f.value() as i64);
    Ok(BigRational::new(BigInt::from(ff * (ff + 1)), BigInt::from(2)) - int(f * (f + 1)))
}

/// Eigenvalue of Σ_{i<j} f_i·f_j on three atoms with total spin `f3b`.
pub fn triple_eigenvalue(f: Spin, f3b: u32) -> Result<BigRational, MeanFieldError> {
    f.check_f3b(f3b)?;
    let (ff, f) = (f3b as i64, f.value() as i64);
    Ok(BigRational::new(BigInt::from(ff * (ff + 1) - 3 * f * (f + 1)), BigInt::from(2)))
}

/// Values of F3b whose sector contains a fully symmetric three-atom state,
/// ascending.
pub fn fully_symmetric_f3b(f: Spin) -> Vec<u32> {
    (0..=f.max_f3b())
        .filter(|&t| symmetry_classify(f, t).map(|tally| tally.symmetric > 0).unwrap_or(false))
        .collect()
}

/// Exact inverse of V[k][n] = x_kⁿ by Gauss–Jordan elimination.
///
/// Panics if the nodes are not distinct.
pub fn vandermonde_inverse(nodes: &[BigRational]) -> Vec<Vec<BigRational>> {
    let n = nodes.len();
    let mut a: Vec<Vec<BigRational>> = nodes
        .iter()
        .map(|x| {
            let mut row = Vec::with_capacity(2 * n);
            let mut p = BigRational::one();
            for _ in 0..n {
                row.push(p.clone());
                p *= x;
            }
            row
        })
        .collect();
    for (i, row) in a.iter_mut().enumerate() {
        row.extend((0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }));
    }
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero()).expect("Vandermonde nodes must be distinct");
        a.swap(col, pivot);
        let inv = a[col][col].recip();
        for x in a[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in 0..2 * n {
                    let delta = &factor * &a[col][c];
                    a[r][c] -= delta;
                }
            }
        }
    }
    a.into_iter().map(|row| row[n..].to_vec()).collect()
}

/// Σ_k c_k·x_{label_k} with exact rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearCombination {
    /// Symbol stem, e.g. `"a"` renders terms as `a0`, `a2`, ….
    pub symbol: &'static str,
    pub terms: Vec<(u32, BigRational)>,
}

impl LinearCombination {
    pub fn coefficient(&self, label: u32) -> BigRational {
        self.terms.iter().find(|(l, _)| *l == label).map(|(_, c)| c.clone()).unwrap_or_else(BigRational::zero)
    }

    pub fn labels(&self) -> impl Iterator<Item = u32> + '_ {
        self.terms.iter().map(|(l, _)| *l)
    }

    fn check_arity(&self, got: usize) -> Result<(), MeanFieldError> {
        if got == self.terms.len() {
            Ok(())
        } else {
            Err(MeanFieldError::Arity { expected: self.terms.len(), got })
        }
    }

    /// Evaluates on values given in label order.
    pub fn evaluate(&self, values: &[f64]) -> Result<f64, MeanFieldError> {
        self.check_arity(values.len())?;
        Ok(self.terms.iter().zip(values).map(|((_, c), x)| to_f64(c) * x).sum())
    }

    pub fn evaluate_complex(&self, values: &[Complex64]) -> Result<Complex64, MeanFieldError> {
        self.check_arity(values.len())?;
        Ok(self.terms.iter().zip(values).map(|((_, c), x)| x * to_f64(c)).sum())
    }

    pub fn evaluate_exact(&self, values: &[BigRational]) -> Result<BigRational, MeanFieldError> {
        self.check_arity(values.len())?;
        Ok(self.terms.iter().zip(values).fold(BigRational::zero(), |acc, ((_, c), x)| acc + c * x))
    }
}

/// Renders as e.g. `-2/5·a0 + 8/7·a2 + 9/35·a4`; zero terms are dropped.
impl fmt::Display for LinearCombination {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (label, c) in self.terms.iter().filter(|(_, c)| !c.is_zero()) {
            let mag = c.abs();
            match (first, c.is_negative()) {
                (true, true) => write!(out, "-")?,
                (true, false) => {}
                (false, true) => write!(out, " - ")?,
                (false, false) => write!(out, " + ")?,
            }
            if mag.is_one() {
                write!(out, "{}{}", self.symbol, label)?;
            } else {
                write!(out, "{}·{}{}", mag, self.symbol, label)?;
            }
            first = false;
        }
        if first {
            write!(out, "0")?;
        }
        Ok(())
    }
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Coefficients α⁽ⁿ⁾, n = 0..N−1, of a polynomial expansion, each a linear
/// combination of the channel lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expansion {
    pub spin: Spin,
    /// Channel totals (F2b or F3b) in the order lengths are supplied.
    pub channels: Vec<u32>,
    /// Eigenvalue of the expansion operator on each channel.
    pub nodes: Vec<BigRational>,
    pub alpha: Vec<LinearCombination>,
}

impl Expansion {
    fn solve(spin: Spin, symbol: &'static str, channels: Vec<u32>, nodes: Vec<BigRational>) -> Self {
        let inv = vandermonde_inverse(&nodes);
        let alpha = inv
            .into_iter()
            .map(|row| LinearCombination { symbol, terms: channels.iter().copied().zip(row).collect() })
            .collect();
        Expansion { spin, channels, nodes, alpha }
    }

    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    pub fn evaluate(&self, lengths: &[f64]) -> Result<Vec<f64>, MeanFieldError> {
        self.alpha.iter().map(|c| c.evaluate(lengths)).collect()
    }

    pub fn evaluate_complex(&self, lengths: &[Complex64]) -> Result<Vec<Complex64>, MeanFieldError> {
        self.alpha.iter().map(|c| c.evaluate_complex(lengths)).collect()
    }

    pub fn evaluate_exact(&self, lengths: &[BigRational]) -> Result<Vec<BigRational>, MeanFieldError> {
        self.alpha.iter().map(|c| c.evaluate_exact(lengths)).collect()
    }

    /// Channel lengths back from coefficients: a_k = Σ_n α⁽ⁿ⁾ λ_kⁿ.
    pub fn reconstruct_exact(&self, alpha: &[BigRational]) -> Vec<BigRational> {
        self.nodes
            .iter()
            .map(|x| {
                let mut p = BigRational::one();
                let mut acc = BigRational::zero();
                for a in alpha {
                    acc += a * &p;
                    p *= x;
                }
                acc
            })
            .collect()
    }
}

/// Two-body expansion Â = Σ_n α₂ᵦ⁽ⁿ⁾ (f₁·f₂)ⁿ, n = 0..f, in terms of
/// a0, a2, …, a2f.
pub fn alpha_2b(f: Spin) -> Expansion {
    let channels: Vec<u32> = f.even_channels().collect();
    let nodes = channels.iter().map(|&c| pair_eigenvalue(f, c).expect("even channel in range")).collect();
    Expansion::solve(f, "a", channels, nodes)
}

/// Three-body expansion Â₃ᵦ = Σ_n α₃ᵦ⁽ⁿ⁾ (Σ_{i<j} f_i·f_j)ⁿ over the fully
/// symmetric sectors, in terms of a3b^(F3b).
pub fn alpha_3b(f: Spin) -> Expansion {
    let channels = fully_symmetric_f3b(f);
    let nodes = channels.iter().map(|&c| triple_eigenvalue(f, c).expect("F3b in range")).collect();
    Expansion::solve(f, "a3b^", channels, nodes)
}

/// α₂ᵦ evaluated on numeric lengths.
pub fn alpha_2b_values(a: &ScatteringLengths) -> Vec<f64> {
    alpha_2b(a.spin()).evaluate(a.values()).expect("one length per even channel")
}

/// Three-body scattering lengths a3b^(F3b) (units r_vdW⁴) for the fully
/// symmetric sectors, possibly complex when losses are included.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeBodyLengths {
    spin: Spin,
    channels: Vec<u32>,
    values: Vec<Complex64>,
}

impl ThreeBodyLengths {
    pub fn new(spin: Spin, values: &[f64]) -> Result<Self, MeanFieldError> {
        let v: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::complex(spin, &v)
    }

    pub fn complex(spin: Spin, values: &[Complex64]) -> Result<Self, MeanFieldError> {
        let channels = fully_symmetric_f3b(spin);
        if channels.len() != values.len() {
            return Err(MeanFieldError::ThreeBodyCount { f: spin.value(), expected: channels, got: values.len() });
        }
        Ok(ThreeBodyLengths { spin, channels, values: values.to_vec() })
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn channels(&self) -> &[u32] {
        &self.channels
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn alpha(&self) -> Vec<Complex64> {
        alpha_3b(self.spin).evaluate_complex(&self.values).expect("one length per symmetric sector")
    }
}

/// Σ_n α⁽ⁿ⁾ (f₁·f₂)ⁿ on the two-atom product basis |m₁ m₂⟩ (descending m).
pub fn pair_expansion_operator(f: Spin, alpha: &[f64]) -> Matrix {
    let ops = product_spin_operators(&[f.value(); 2]);
    let j = f.value() as f64;
    let n = ops.fz.nrows();
    let dot = ops.squared().sub(&Matrix::identity(n).scaled(2.0 * j * (j + 1.0))).scaled(0.5);
    let mut power = Matrix::identity(n);
    let mut out = Matrix::zeros(n, n);
    for &a in alpha {
        out = out.add(&power.scaled(a));
        power = power.matmul(&dot);
    }
    out
}

/// g₂ᵦ⁽ⁿ⁾ = 4π α₂ᵦ⁽ⁿ⁾/m and g₃ᵦ⁽ⁿ⁾ = 12√3 π α₃ᵦ⁽ⁿ⁾/m.
#[derive(Debug, Clone, PartialEq)]
pub struct Couplings {
    pub mass: f64,
    pub g2b: Vec<f64>,
    pub g3b: Vec<Complex64>,
}

pub fn couplings(alpha2b: &[f64], alpha3b: &[Complex64], mass: f64) -> Result<Couplings, MeanFieldError> {
    if !(mass > 0.0 && mass.is_finite()) {
        return Err(MeanFieldError::Mass(mass));
    }
    let c2 = 4.0 * PI / mass;
    let c3 = 12.0 * libm::sqrt(3.0) * PI / mass;
    Ok(Couplings {
        mass,
        g2b: alpha2b.iter().map(|a| c2 * a).collect(),
        g3b: alpha3b.iter().map(|a| a * c3).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MagneticPhase {
    Ferromagnetic,
    Antiferromagnetic,
    /// α₂ᵦ⁽¹⁾ = 0: no two-body exchange preference.
    Undetermined,
}

impl MagneticPhase {
    pub fn as_str(self) -> &'static str {
        match self {
            MagneticPhase::Ferromagnetic => "ferromagnetic",
            MagneticPhase::Antiferromagnetic => "antiferromagnetic",
            MagneticPhase::Undetermined => "undetermined",
        }
    }
}

/// Mean-field energies at density n and the comparison of the n = 1
/// (spin-exchange) terms.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceReport {
    pub density: f64,
    /// n·g₂ᵦ⁽ᵏ⁾ per order k.
    pub energy_2b: Vec<f64>,
    /// n²·g₃ᵦ⁽ᵏ⁾ per order k.
    pub energy_3b: Vec<Complex64>,
    pub phase: MagneticPhase,
    /// n²|g₃ᵦ⁽¹⁾| > n|g₂ᵦ⁽¹⁾|.
    pub three_body_dominates: bool,
    /// Re g₃ᵦ⁽¹⁾ and g₂ᵦ⁽¹⁾ have strictly opposite signs.
    pub opposite_sign: bool,
}

pub fn dominance_report(density: f64, c: &Couplings) -> Result<DominanceReport, MeanFieldError> {
    if !(density > 0.0 && density.is_finite()) {
        return Err(MeanFieldError::Density(density));
    }
    let g2 = c.g2b.get(1).copied().unwrap_or(0.0);
    let g3 = c.g3b.get(1).copied().unwrap_or_default();
    let phase = if g2 < 0.0 {
        MagneticPhase::Antiferromagnetic
    } else if g2 > 0.0 {
        MagneticPhase::Ferromagnetic
    } else {
        MagneticPhase::Undetermined
    };
    Ok(DominanceReport {
        density,
        energy_2b: c.g2b.iter().map(|g| density * g).collect(),
        energy_3b: c.g3b.iter().map(|g| g * (density * density)).collect(),
        phase,
        three_body_dominates: density * density * g3.norm() > density * g2.abs(),
        opposite_sign: g2 * g3.re < 0.0,
    })
}
