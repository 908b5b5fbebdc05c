//! Fixed-R hyperangular problem: the Q matrix, its spin blocks, and the
//! roots s of det[S Q Sᵀ] = 0 on the real and imaginary axes.
//!
//! # How roots are found
//!
//! `q_matrix` and `block_determinant` build Q literally over the product
//! basis. Root finding works on an equivalent reduced problem instead.
//! Conjugating with the cyclic permutations turns the spectator-2 and -3
//! terms into spectator-3 ones, and A⁽³⁾ (pair 12) is diagonal in the coupled
//! basis with entries a_{F2b}. Inside a (F3b, M) block, only the even-F2b
//! rows with a ≠ 0 survive, leaving the real symmetric matrix
//!
//! ```text
//! M(s) = s cos(πs/2) I − (4/√3) sin(πs/6) B − sin(πs/2) W
//! B    = S_b (P₊ + P₋) S_bᵀ,    W = diag(d R / a_F)
//! ```
//!
//! whose determinant vanishes together with the block determinant (apart
//! from removable zeros at even s, which are skipped). M(s) is entire, so it
//! has no poles to step around. On the imaginary axis s = iσ the same matrix
//! divided by i·cosh(πσ/2) stays real and bounded.
//!
//! Roots are bracketed on the sorted eigenvalue branches of M. A root where
//! two branches vanish together has multiplicity 2.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::interaction::{m_factors, spectator_a_matrix, Axis, InteractionError, SValue, ScatteringLengths};
use crate::linalg::Matrix;
use crate::roots::{merge, monotone_branches, scan_branches, Unconverged};
use crate::spin_algebra::{block_basis, permutation_map, Permutation, Spin, SpinError};
use crate::trig::{cos_pi, sin_pi, sinh6_over_cosh2};

/// Jacobi-coordinate constant d = 2^{1/2}/3^{1/4}.
pub const JACOBI_D: f64 = 1.074_569_931_823_541_9;
/// Three-body reduced mass 1/√3 (atomic mass m = 1).
pub const REDUCED_MASS: f64 = 0.577_350_269_189_625_8;
const FOUR_OVER_SQRT3: f64 = 2.309_401_076_758_503;

/// Real scan starts here: s = 0 is a trivial zero of every branch.
const SCAN_START: f64 = 1e-6;
/// Half-width of the skipped interval around even real s.
const EVEN_GAP: f64 = 1e-11;
/// Roots closer than this (relative) are one root with multiplicity.
const MERGE_REL: f64 = 1e-7;
/// Surrogate |a|/R for resonant lengths in an asymptotic region.
pub const PLATEAU_SCALE: f64 = 1e8;
/// Relative agreement required when the surrogate scale is raised tenfold.
pub const PLATEAU_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolverError {
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error(transparent)]
    Interaction(#[from] InteractionError),
    #[error("hyperradius must be positive and finite, got {0}")]
    InvalidHyperradius(f64),
    #[error("root bracket [{lo}, {hi}] on the {axis} axis did not converge")]
    Unconverged { axis: Axis, lo: f64, hi: f64 },
    #[error("{multiplicity} coincident roots at s = {value}; multiplicities above 2 are not resolved")]
    HighMultiplicity { value: SValue, multiplicity: u32 },
    #[error("region {region}, F3b = {f3b}: roots are not constant under rescaling ({detail})")]
    NonPlateau { region: String, f3b: u32, detail: String },
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("sign pattern needs {expected} entries of +1 or -1")]
    InvalidSigns { expected: usize },
    #[error("scalar f=1 equations exist for F3b = 1, 2, 3 only (got {0})")]
    NoScalarEquation(u32),
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Everything Q depends on at fixed R.
#[derive(Debug, Clone, PartialEq)]
pub struct QContext {
    pub lengths: ScatteringLengths,
    pub r: f64,
}

impl QContext {
    pub fn new(lengths: ScatteringLengths, r: f64) -> Result<Self, SolverError> {
        if !(r.is_finite() && r > 0.0) {
            return Err(SolverError::InvalidHyperradius(r));
        }
        Ok(QContext { lengths, r })
    }

    pub fn spin(&self) -> Spin {
        self.lengths.spin()
    }

    /// 3^{1/4} / (2^{1/2} R).
    pub fn prefactor(&self) -> f64 {
        1.0 / (JACOBI_D * self.r)
    }
}

/// Q(s) = c (M⁽¹⁾ + M⁽²⁾P₋ + M⁽³⁾P₊) − I over the full product basis.
pub fn q_matrix(ctx: &QContext, s: SValue) -> Result<Matrix, SolverError> {
    let f = ctx.spin();
    let c = ctx.prefactor();
    let (diag, exch) = m_factors(s)?;
    let a1 = spectator_a_matrix(&ctx.lengths, 1)?.matrix;
    let a2 = spectator_a_matrix(&ctx.lengths, 2)?.matrix;
    let a3 = spectator_a_matrix(&ctx.lengths, 3)?.matrix;
    let pm = permutation_map(f, Permutation::Anticyclic);
    let pp = permutation_map(f, Permutation::Cyclic);
    let n = f.product_dim();
    let mut q = a1.scaled(c * diag);
    for i in 0..n {
        for k in 0..n {
            // (A P)[i, map[k]] = A[i, k] for a permutation matrix P.
            let (x2, x3) = (a2[(i, k)], a3[(i, k)]);
            if x2 != 0.0 {
                q[(i, pm[k])] += c * exch * x2;
            }
            if x3 != 0.0 {
                q[(i, pp[k])] += c * exch * x3;
            }
        }
        q[(i, i)] -= 1.0;
    }
    Ok(q)
}

/// det of the (F3b, M = F3b) block of S Q Sᵀ.
pub fn block_determinant(ctx: &QContext, s: SValue, f3b: u32) -> Result<f64, SolverError> {
    block_determinant_projected(ctx, s, f3b, f3b as i32)
}

/// As [`block_determinant`] for an arbitrary projection M.
pub fn block_determinant_projected(ctx: &QContext, s: SValue, f3b: u32, m: i32) -> Result<f64, SolverError> {
    let f = ctx.spin();
    f.check_f3b(f3b)?;
    let (_, v) = block_basis(f, f3b, m);
    if v.nrows() == 0 {
        return Ok(1.0);
    }
    let q = q_matrix(ctx, s)?;
    Ok(v.matmul(&q).matmul(&v.transpose()).determinant())
}

/// Length-independent data of one spin block: its even pair channels and
/// the exchange matrix B = S_b (P₊ + P₋) S_bᵀ between them.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockGeometry {
    pub spin: Spin,
    pub f3b: u32,
    pub m: i32,
    /// Block dimension, counting odd F2b.
    pub dimension: usize,
    /// Even F2b values present in the block, ascending.
    pub channels: Vec<u32>,
    pub exchange: Matrix,
}

impl BlockGeometry {
    pub fn new(f: Spin, f3b: u32) -> Result<Self, SolverError> {
        Self::with_projection(f, f3b, f3b as i32)
    }

    pub fn with_projection(f: Spin, f3b: u32, m: i32) -> Result<Self, SolverError> {
        f.check_f3b(f3b)?;
        if m.unsigned_abs() > f3b {
            return Err(SpinError::InvalidArgument("|M| exceeds F3b").into());
        }
        let (states, v) = block_basis(f, f3b, m);
        let even: Vec<usize> = (0..states.len()).filter(|&i| states[i].f2b % 2 == 0).collect();
        let pp = permutation_map(f, Permutation::Cyclic);
        let pm = permutation_map(f, Permutation::Anticyclic);
        let exchange = Matrix::from_fn(even.len(), even.len(), |i, j| {
            let (vi, vj) = (v.row(even[i]), v.row(even[j]));
            (0..vi.len()).map(|k| vi[k] * (vj[pp[k]] + vj[pm[k]])).sum()
        });
        Ok(BlockGeometry {
            spin: f,
            f3b,
            m,
            dimension: states.len(),
            channels: even.iter().map(|&i| states[i].f2b).collect(),
            exchange,
        })
    }
}

/// The reduced root function of one block at fixed lengths and R.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedBlock {
    /// Interacting channels (even F2b with a ≠ 0).
    pub channels: Vec<u32>,
    pub exchange: Matrix,
    /// d R / a_F for each interacting channel.
    pub inverse_strength: Vec<f64>,
}

impl ReducedBlock {
    pub fn new(geometry: &BlockGeometry, lengths: &ScatteringLengths, r: f64) -> Self {
        let active: Vec<usize> =
            (0..geometry.channels.len()).filter(|&i| lengths.get(geometry.channels[i]) != 0.0).collect();
        let exchange = Matrix::from_fn(active.len(), active.len(), |i, j| geometry.exchange[(active[i], active[j])]);
        ReducedBlock {
            channels: active.iter().map(|&i| geometry.channels[i]).collect(),
            exchange,
            inverse_strength: active.iter().map(|&i| JACOBI_D * r / lengths.get(geometry.channels[i])).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.channels.len()
    }

    /// M(s) on the real axis, or M(iσ)/(i cosh(πσ/2)) on the imaginary axis.
    pub fn matrix(&self, s: SValue) -> Matrix {
        let x = s.magnitude;
        let (diag, exch, wscale) = match s.axis {
            Axis::Real => (x * cos_pi(x / 2.0), FOUR_OVER_SQRT3 * sin_pi(x / 6.0), sin_pi(x / 2.0)),
            Axis::Imaginary => (x, FOUR_OVER_SQRT3 * sinh6_over_cosh2(x), libm::tanh(PI * x / 2.0)),
        };
        let n = self.dim();
        Matrix::from_fn(n, n, |i, j| {
            let mut v = -exch * self.exchange[(i, j)];
            if i == j {
                v += diag - wscale * self.inverse_strength[i];
            }
            v
        })
    }

    pub fn eigenvalues(&self, s: SValue) -> Vec<f64> {
        self.matrix(s).symmetric_eigenvalues()
    }

    /// σ beyond which every imaginary-axis branch is strictly increasing.
    fn monotone_from(&self) -> f64 {
        // |d/dσ| of the exchange term ≤ 19.35 e^{−πσ/3} (‖B‖ ≤ 2) and of the
        // W term ≤ 2π max|w| e^{−πσ}; keep their sum below 1/2.
        let wmax = self.inverse_strength.iter().fold(0.0f64, |m, w| m.max(w.abs()));
        let s1 = 3.0 / PI * libm::log(19.35 / 0.25);
        let s2 = if wmax > 0.0 { libm::log(2.0 * PI * wmax / 0.25) / PI } else { 0.0 };
        5.0f64.max(s1).max(s2)
    }
}

/// Search window and accuracy for [`find_roots_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    /// Upper end of the real-axis window, and of the imaginary one unless
    /// `imag_max` is set.
    pub s_max: f64,
    pub imag_max: Option<f64>,
    pub step: f64,
    pub tol: f64,
}

impl Default for RootOptions {
    fn default() -> Self {
        RootOptions { s_max: 5.0, imag_max: None, step: 1e-3, tol: 1e-10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub value: SValue,
    pub multiplicity: u32,
}

/// Roots of one F3b block: imaginary ones first, each axis ascending.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct RootSet {
    pub f3b: u32,
    pub roots: Vec<Root>,
}

impl RootSet {
    pub fn imaginary(&self) -> impl Iterator<Item = &Root> + '_ {
        self.roots.iter().filter(|r| r.value.is_imaginary())
    }

    pub fn real(&self) -> impl Iterator<Item = &Root> + '_ {
        self.roots.iter().filter(|r| !r.value.is_imaginary())
    }

    pub fn lowest_real(&self) -> Option<&Root> {
        self.real().next()
    }

    /// Most attractive (largest |s|) imaginary root.
    pub fn deepest_imaginary(&self) -> Option<&Root> {
        self.imaginary().last()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Roots counted with multiplicity.
    pub fn count(&self) -> u32 {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    /// Every root repeated according to its multiplicity.
    pub fn expanded(&self) -> Vec<SValue> {
        self.roots.iter().flat_map(|r| core::iter::repeat(r.value).take(r.multiplicity as usize)).collect()
    }

    /// The entries a table lists: all imaginary roots plus the lowest real one.
    pub fn table_entry(&self) -> RootSet {
        let mut roots: Vec<Root> = self.imaginary().copied().collect();
        roots.extend(self.lowest_real().copied());
        RootSet { f3b: self.f3b, roots }
    }

    fn from_axes(f3b: u32, imag: Vec<(f64, u32)>, real: Vec<(f64, u32)>) -> Result<Self, SolverError> {
        let roots: Vec<Root> = imag
            .into_iter()
            .map(|(x, m)| Root { value: SValue::imaginary(x), multiplicity: m })
            .chain(real.into_iter().map(|(x, m)| Root { value: SValue::real(x), multiplicity: m }))
            .collect();
        if let Some(r) = roots.iter().find(|r| r.multiplicity > 2) {
            return Err(SolverError::HighMultiplicity { value: r.value, multiplicity: r.multiplicity });
        }
        Ok(RootSet { f3b, roots })
    }
}

impl fmt::Display for RootSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.roots.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match f.precision() {
                Some(p) => write!(f, "{:.*}", p, r.value)?,
                None => write!(f, "{}", r.value)?,
            }
            if r.multiplicity > 1 {
                write!(f, "^({})", r.multiplicity)?;
            }
        }
        Ok(())
    }
}

fn unconverged(axis: Axis) -> impl Fn(Unconverged) -> SolverError {
    move |u| SolverError::Unconverged { axis, lo: u.lo, hi: u.hi }
}

/// Real-axis scan over `(0, s_max]`, skipping a tiny interval around each
/// even integer where removable zeros of the reduced function sit.
fn real_axis_roots<F: FnMut(f64) -> Vec<f64>>(eval: &mut F, opts: &RootOptions) -> Result<Vec<f64>, SolverError> {
    let mut out = Vec::new();
    let mut lo = SCAN_START;
    let mut even = 2.0;
    while even < opts.s_max {
        scan_branches(eval, lo, even - EVEN_GAP, opts.step, opts.tol, &mut out).map_err(unconverged(Axis::Real))?;
        lo = even + EVEN_GAP;
        even += 2.0;
    }
    scan_branches(eval, lo, opts.s_max, opts.step, opts.tol, &mut out).map_err(unconverged(Axis::Real))?;
    Ok(out)
}

/// Roots of a reduced block in the window described by `opts`.
pub fn find_block_roots(block: &ReducedBlock, f3b: u32, opts: &RootOptions) -> Result<RootSet, SolverError> {
    if block.dim() == 0 {
        return Ok(RootSet { f3b, roots: Vec::new() });
    }
    let real = real_axis_roots(&mut |x| block.eigenvalues(SValue::real(x)), opts)?;

    let imag_max = opts.imag_max.unwrap_or(opts.s_max);
    let linear = block.monotone_from();
    let fine_hi = imag_max.min(linear);
    let mut imag = Vec::new();
    let mut eval = |x| block.eigenvalues(SValue::imaginary(x));
    scan_branches(&mut eval, SCAN_START, fine_hi, opts.step, opts.tol, &mut imag)
        .map_err(unconverged(Axis::Imaginary))?;
    if imag_max > fine_hi {
        monotone_branches(&mut eval, fine_hi, imag_max, opts.tol, &mut imag).map_err(unconverged(Axis::Imaginary))?;
    }
    RootSet::from_axes(f3b, merge(imag, MERGE_REL), merge(real, MERGE_REL))
}

/// All roots of the (F3b, M = F3b) block with |s| ≤ `s_max` on both axes.
pub fn find_roots(ctx: &QContext, f3b: u32, s_max: f64) -> Result<RootSet, SolverError> {
    find_roots_with(ctx, f3b, &RootOptions { s_max, ..RootOptions::default() })
}

pub fn find_roots_with(ctx: &QContext, f3b: u32, opts: &RootOptions) -> Result<RootSet, SolverError> {
    let geometry = BlockGeometry::new(ctx.spin(), f3b)?;
    find_block_roots(&ReducedBlock::new(&geometry, &ctx.lengths, ctx.r), f3b, opts)
}

/// An asymptotic region: which lengths are large compared with R.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    spin: Spin,
    resonant: Vec<u32>,
}

impl Region {
    pub fn new(f: Spin, resonant: &[u32]) -> Result<Self, SolverError> {
        let mut res: Vec<u32> = resonant.to_vec();
        res.sort_unstable();
        res.dedup();
        if let Some(bad) = res.iter().find(|&&x| x % 2 == 1 || x > 2 * f.value()) {
            return Err(SolverError::InvalidRegion(format!("a{bad} is not a channel for f={}", f.value())));
        }
        Ok(Region { spin: f, resonant: res })
    }

    pub fn spin(&self) -> Spin {
        self.spin
    }

    pub fn resonant(&self) -> &[u32] {
        &self.resonant
    }

    pub fn non_resonant(&self) -> Vec<u32> {
        self.spin.even_channels().filter(|c| !self.resonant.contains(c)).collect()
    }

    /// Root-table row order: non-resonant sets by size, then
    /// lexicographically.
    pub fn all(f: Spin) -> Vec<Region> {
        let channels: Vec<u32> = f.even_channels().collect();
        let n = channels.len();
        let mut subsets: Vec<Vec<usize>> = (0u32..1 << n)
            .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).collect())
            .collect();
        subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        subsets
            .into_iter()
            .map(|small| Region {
                spin: f,
                resonant: (0..n).filter(|i| !small.contains(i)).map(|i| channels[i]).collect(),
            })
            .collect()
    }

    /// Label in the style `|a0|<<R<<|a{2,4}|`.
    pub fn label(&self) -> String {
        fn set(xs: &[u32]) -> String {
            match xs {
                [x] => format!("a{x}"),
                _ => {
                    let parts: Vec<String> = xs.iter().map(|x| format!("{x}")).collect();
                    format!("a{{{}}}", parts.join(","))
                }
            }
        }
        let small = self.non_resonant();
        match (small.is_empty(), self.resonant.is_empty()) {
            (true, _) => format!("R<<|{}|", set(&self.resonant)),
            (_, true) => format!("R>>|{}|", set(&small)),
            _ => format!("|{}|<<R<<|{}|", set(&small), set(&self.resonant)),
        }
    }

    fn surrogate(&self, signs: &[f64], scale: f64) -> ScatteringLengths {
        let values: Vec<f64> = self
            .spin
            .even_channels()
            .zip(signs)
            .map(|(c, &sg)| sg * if self.resonant.contains(&c) { scale } else { 1.0 / scale })
            .collect();
        ScatteringLengths::new(self.spin, &values).expect("surrogate lengths are finite")
    }
}

/// All-negative signs, the default for region evaluation.
pub fn default_signs(f: Spin) -> Vec<f64> {
    vec![-1.0; f.value() as usize + 1]
}

fn same_plateau(a: &RootSet, b: &RootSet) -> bool {
    a.roots.len() == b.roots.len()
        && a.roots.iter().zip(&b.roots).all(|(x, y)| {
            x.multiplicity == y.multiplicity
                && x.value.axis == y.value.axis
                && (x.value.magnitude - y.value.magnitude).abs() <= PLATEAU_TOL * x.value.magnitude.max(1e-3)
        })
}

/// Constant-s roots of an asymptotic region with all-negative lengths.
pub fn region_roots(region: &Region, f3b: u32) -> Result<RootSet, SolverError> {
    region_roots_with(region, f3b, &default_signs(region.spin()), 5.0)
}

/// Region roots for a sign pattern (one ±1 per even channel), obtained at
/// |a|/R = 10^{±8} and confirmed at 10^{±9}.
pub fn region_roots_with(region: &Region, f3b: u32, signs: &[f64], s_max: f64) -> Result<RootSet, SolverError> {
    let f = region.spin();
    if signs.len() != f.value() as usize + 1 || signs.iter().any(|&s| s != 1.0 && s != -1.0) {
        return Err(SolverError::InvalidSigns { expected: f.value() as usize + 1 });
    }
    let geometry = BlockGeometry::new(f, f3b)?;
    let opts = RootOptions { s_max, ..RootOptions::default() };
    let at = |scale: f64| {
        let block = ReducedBlock::new(&geometry, &region.surrogate(signs, scale), 1.0);
        find_block_roots(&block, f3b, &opts)
    };
    let coarse = at(PLATEAU_SCALE)?;
    let fine = at(10.0 * PLATEAU_SCALE)?;
    if !same_plateau(&coarse, &fine) {
        return Err(SolverError::NonPlateau {
            region: region.label(),
            f3b,
            detail: format!("[{coarse:.6}] vs [{fine:.6}]"),
        });
    }
    Ok(coarse)
}

/// F3b values shown as root-table columns: blocks with an even pair channel.
pub fn table_columns(f: Spin) -> Vec<u32> {
    (0..=f.max_f3b())
        .filter(|&f3b| (0..=2 * f.value()).step_by(2).any(|c| f.value().abs_diff(c) <= f3b && f3b <= f.value() + c))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableCell {
    pub f3b: u32,
    pub result: Result<RootSet, SolverError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub region: Region,
    pub cells: Vec<TableCell>,
}

/// One root-table cell: the listed entries (imaginary roots and lowest real).
pub fn table_cell(region: &Region, f3b: u32, signs: &[f64], s_max: f64) -> TableCell {
    TableCell { f3b, result: region_roots_with(region, f3b, signs, s_max).map(|r| r.table_entry()) }
}

/// Every region × F3b cell for spin f, in root-table row order.
pub fn table_one(f: Spin) -> Vec<TableRow> {
    let signs = default_signs(f);
    Region::all(f)
        .into_iter()
        .map(|region| {
            let cells = table_columns(f).into_iter().map(|f3b| table_cell(&region, f3b, &signs, 5.0)).collect();
            TableRow { region, cells }
        })
        .collect()
}

/// Roots of the closed-form f = 1 equations for F3b = 1, 2, 3.
///
/// F3b = 1 uses the five-term equation term by term. For F3b = 2 and 3 the
/// single-length equations are c a₂ [s cot(πs/2) + μ' 4 sin(πs/6)/(√3
/// sin(πs/2))] = 1 with μ' = +1 (F3b = 2) and −2 (F3b = 3). Each is
/// multiplied through by powers of sin(πs/2) so the scanned function is
/// entire.
pub fn f1_transcendental_roots(which: u32, a0: f64, a2: f64, r: f64, s_max: f64) -> Result<RootSet, SolverError> {
    if !(1..=3).contains(&which) {
        return Err(SolverError::NoScalarEquation(which));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(SolverError::InvalidHyperradius(r));
    }
    const Q4: f64 = 1.316_074_012_952_492_5; // 3^{1/4}
    const SQRT2: f64 = core::f64::consts::SQRT_2;
    const SQRT3: f64 = 1.732_050_807_568_877_2;
    // Each axis supplies (s cos(πs/2), sin(πs/6), sin(πs/2)); on the
    // imaginary axis all three carry a common factor i cosh(πσ/2) dropped here.
    let equation = move |x: f64, y6: f64, sn: f64| -> f64 {
        match which {
            1 => {
                Q4 * (a0 + a2) / (SQRT2 * r) * x * sn - SQRT3 * a0 * a2 / (2.0 * r * r) * x * x
                    - 2.0 * SQRT2 * (2.0 * a0 + a2) / (Q4 * Q4 * Q4 * Q4 * Q4 * r) * y6 * sn
                    + 2.0 * a0 * a2 / (r * r) * x * y6
                    + 16.0 * a0 * a2 / (SQRT3 * r * r) * y6 * y6
                    - sn * sn
            }
            2 => Q4 * a2 / (SQRT2 * r) * x + 2.0 * SQRT2 * a2 / (Q4 * r) * y6 - sn,
            _ => Q4 * a2 / (SQRT2 * r) * x - 4.0 * SQRT2 * a2 / (Q4 * r) * y6 - sn,
        }
    };
    let opts = RootOptions { s_max, ..RootOptions::default() };
    let real = real_axis_roots(
        &mut |s| vec![equation(s * cos_pi(s / 2.0), sin_pi(s / 6.0), sin_pi(s / 2.0))],
        &opts,
    )?;
    let mut imag = Vec::new();
    scan_branches(
        &mut |x| vec![equation(x, sinh6_over_cosh2(x), libm::tanh(PI * x / 2.0))],
        SCAN_START,
        s_max,
        opts.step,
        opts.tol,
        &mut imag,
    )
    .map_err(unconverged(Axis::Imaginary))?;
    RootSet::from_axes(which, merge(imag, MERGE_REL), merge(real, MERGE_REL))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spin(f: u32) -> Spin {
        Spin::new(f).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn constants() {
        assert!(close(JACOBI_D, libm::sqrt(2.0) / libm::pow(3.0, 0.25), 1e-16));
        assert!(close(REDUCED_MASS, 1.0 / libm::sqrt(3.0), 1e-16));
    }

    #[test]
    fn free_case() {
        let ctx = QContext::new(ScatteringLengths::uniform(spin(1), 0.0).unwrap(), 3.0).unwrap();
        let q = q_matrix(&ctx, SValue::real(0.7)).unwrap();
        assert_eq!(q, Matrix::identity(27).scaled(-1.0));
        assert!(close(block_determinant(&ctx, SValue::real(0.7), 1).unwrap(), -1.0, 1e-13));
        assert!(find_roots(&ctx, 1, 5.0).unwrap().is_empty());
    }

    #[test]
    fn block_dimension_counts_couplings() {
        let g = BlockGeometry::new(spin(1), 1).unwrap();
        assert_eq!(g.dimension, 3);
        assert_eq!(g.channels, vec![0, 2]);
    }

    #[test]
    fn pole_is_reported() {
        let ctx = QContext::new(ScatteringLengths::uniform(spin(1), 1.0).unwrap(), 1.0).unwrap();
        assert!(matches!(
            block_determinant(&ctx, SValue::real(2.0), 1),
            Err(SolverError::Interaction(InteractionError::Pole(_)))
        ));
    }

    #[test]
    fn exchange_spectrum_is_two_and_minus_one() {
        for f in 1..=3 {
            for f3b in table_columns(spin(f)) {
                let g = BlockGeometry::new(spin(f), f3b).unwrap();
                for ev in g.exchange.symmetric_eigenvalues() {
                    assert!(close(ev, 2.0, 1e-12) || close(ev, -1.0, 1e-12), "f={f} F3b={f3b}: {ev}");
                }
            }
        }
    }

    #[test]
    fn find_roots_examples() {
        let big = |f: u32| QContext::new(ScatteringLengths::uniform(spin(f), -1e8).unwrap(), 1.0).unwrap();
        let rs = find_roots(&big(1), 1, 5.0).unwrap().table_entry();
        assert_eq!(rs.roots.len(), 2);
        assert!(close(rs.roots[0].value.magnitude, 1.0062, 5e-5) && rs.roots[0].value.is_imaginary());
        assert!(close(rs.roots[1].value.magnitude, 2.1662, 5e-5));

        let ctx = QContext::new(ScatteringLengths::new(spin(2), &[-1e8, -1e8, -1e-8]).unwrap(), 1.0).unwrap();
        let rs = find_roots(&ctx, 3, 5.0).unwrap().table_entry();
        assert!(close(rs.roots[0].value.magnitude, 0.5528, 5e-5) && rs.roots[0].value.is_imaginary());
        assert!(close(rs.roots[1].value.magnitude, 3.5151, 5e-5));

        let rs = find_roots(&big(3), 3, 5.0).unwrap().table_entry();
        assert_eq!(rs.roots.len(), 2);
        assert_eq!((rs.roots[0].multiplicity, rs.roots[1].multiplicity), (2, 2));
        assert!(close(rs.roots[0].value.magnitude, 1.0062, 5e-5));
        assert!(close(rs.roots[1].value.magnitude, 2.1662, 5e-5));
    }

    #[test]
    fn region_examples() {
        let r = Region::new(spin(1), &[]).unwrap();
        let rs = region_roots(&r, 2).unwrap().table_entry();
        assert_eq!(rs.roots.len(), 1);
        assert!(close(rs.roots[0].value.magnitude, 4.0, 1e-6));

        let r = Region::new(spin(2), &[2, 4]).unwrap();
        let rs = region_roots(&r, 2).unwrap().table_entry();
        assert_eq!(rs.roots.len(), 1);
        assert!(close(rs.roots[0].value.magnitude, 0.49050, 5e-5));

        let r = Region::new(spin(3), &[0, 2, 4]).unwrap();
        let rs = region_roots(&r, 5).unwrap();
        assert!(close(rs.deepest_imaginary().unwrap().value.magnitude, 0.3351, 5e-5));
    }

    #[test]
    fn region_labels_and_order() {
        let labels: Vec<String> = Region::all(spin(1)).iter().map(Region::label).collect();
        assert_eq!(labels, ["R<<|a{0,2}|", "|a0|<<R<<|a2|", "|a2|<<R<<|a0|", "R>>|a{0,2}|"]);
        assert_eq!(Region::all(spin(2)).len(), 8);
        assert_eq!(Region::all(spin(3)).len(), 16);
        assert_eq!(Region::all(spin(3))[5].label(), "|a{0,2}|<<R<<|a{4,6}|");
        assert!(Region::new(spin(1), &[4]).is_err());
    }

    #[test]
    fn table_columns_per_spin() {
        assert_eq!(table_columns(spin(1)), vec![1, 2, 3]);
        assert_eq!(table_columns(spin(2)), (0..=6).collect::<Vec<_>>());
        assert_eq!(table_columns(spin(3)), (1..=9).collect::<Vec<_>>());
    }

    #[test]
    fn scalar_equation_examples() {
        let rs = f1_transcendental_roots(3, 0.0, -1e8, 1.0, 5.0).unwrap();
        assert!(close(rs.deepest_imaginary().unwrap().value.magnitude, 1.0062, 5e-5));
        let rs = f1_transcendental_roots(2, 0.0, -1e8, 1.0, 5.0).unwrap();
        assert!(close(rs.lowest_real().unwrap().value.magnitude, 2.1662, 5e-5));
        let rs = f1_transcendental_roots(1, -1e-8, -1e8, 1.0, 5.0).unwrap();
        assert!(rs.imaginary().next().is_none());
        assert!(close(rs.lowest_real().unwrap().value.magnitude, 0.7429, 5e-5));
        assert!(f1_transcendental_roots(0, 1.0, 1.0, 1.0, 5.0).is_err());
    }
}
