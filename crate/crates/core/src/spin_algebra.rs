//! Angular-momentum machinery for three identical spin-f atoms.
//!
//! Conventions used everywhere in the crate:
//!
//! * Product basis `|m1 m2 m3⟩` in lexicographic order with each `m`
//!   descending from `f` to `-f`; `(f, f, f)` is index 0.
//! * Coupled states `|F3b M (F2b)⟩` couple the pair (1,2) to `F2b` first and
//!   then add particle 3. Clebsch–Gordan coefficients use the Condon–Shortley
//!   phase convention.
//! * Coupled states are ordered by `F3b` ascending, then `M` descending, then
//!   `F2b` ascending. Rows with equal `(F3b, M)` are therefore contiguous.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::linalg::Matrix;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpinError {
    #[error("unsupported atomic spin f = {0}; supported values are 1, 2 and 3")]
    UnsupportedSpin(u32),
    #[error("invalid angular momentum argument: {0}")]
    InvalidArgument(&'static str),
    #[error("invalid coupled state (F2b={f2b}, F3b={f3b}, M={m}) for f={f}")]
    InvalidCoupledState { f: u32, f2b: u32, f3b: u32, m: i32 },
    #[error("F3b = {f3b} out of range for f = {f}")]
    InvalidTotal { f: u32, f3b: u32 },
}

/// Atomic hyperfine spin, restricted to 1 ≤ f ≤ 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Spin(u32);

impl Spin {
    pub fn new(f: u32) -> Result<Self, SpinError> {
        if (1..=3).contains(&f) {
            Ok(Spin(f))
        } else {
            Err(SpinError::UnsupportedSpin(f))
        }
    }

    pub fn value(self) -> u32 {
        self.0
    }

    pub(crate) fn int(self) -> i32 {
        self.0 as i32
    }

    /// Number of single-atom states, 2f+1.
    pub fn multiplicity(self) -> usize {
        2 * self.0 as usize + 1
    }

    /// Dimension of the three-atom product space, (2f+1)³.
    pub fn product_dim(self) -> usize {
        self.multiplicity().pow(3)
    }

    /// Largest total three-body spin, 3f.
    pub fn max_f3b(self) -> u32 {
        3 * self.0
    }

    /// Even pair channels 0, 2, …, 2f — the only ones allowed to interact.
    pub fn even_channels(self) -> impl Iterator<Item = u32> {
        (0..=self.0).map(|n| 2 * n)
    }

    pub fn check_f3b(self, f3b: u32) -> Result<(), SpinError> {
        if f3b <= self.max_f3b() {
            Ok(())
        } else {
            Err(SpinError::InvalidTotal { f: self.0, f3b })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ProductState {
    pub m1: i32,
    pub m2: i32,
    pub m3: i32,
}

impl ProductState {
    pub fn new(m1: i32, m2: i32, m3: i32) -> Self {
        ProductState { m1, m2, m3 }
    }

    pub fn total_m(&self) -> i32 {
        self.m1 + self.m2 + self.m3
    }

    fn is_valid(&self, f: Spin) -> bool {
        let f = f.int();
        [self.m1, self.m2, self.m3].iter().all(|m| m.abs() <= f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CoupledState {
    pub f2b: u32,
    pub f3b: u32,
    pub m: i32,
}

impl CoupledState {
    pub fn new(f: Spin, f2b: u32, f3b: u32, m: i32) -> Result<Self, SpinError> {
        let c = CoupledState { f2b, f3b, m };
        if c.is_valid(f) {
            Ok(c)
        } else {
            Err(SpinError::InvalidCoupledState { f: f.value(), f2b, f3b, m })
        }
    }

    pub fn is_valid(&self, f: Spin) -> bool {
        let fv = f.value();
        self.f2b <= 2 * fv
            && fv.abs_diff(self.f2b) <= self.f3b
            && self.f3b <= fv + self.f2b
            && self.m.unsigned_abs() <= self.f3b
    }
}

const FACTORIALS: [f64; 41] = {
    let mut t = [1.0; 41];
    let mut i = 1;
    while i < 41 {
        t[i] = t[i - 1] * i as f64;
        i += 1;
    }
    t
};

fn fact(n: i32) -> f64 {
    FACTORIALS[n as usize]
}

/// ⟨j1 m1 j2 m2 | J M⟩ for integer spins, Condon–Shortley phases.
///
/// Returns 0 when `M ≠ m1 + m2` or the triangle rule fails; rejects negative
/// `j` and `|m| > j`.
pub fn clebsch_gordan(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> Result<f64, SpinError> {
    if j1 < 0 || j2 < 0 || j < 0 {
        return Err(SpinError::InvalidArgument("negative angular momentum"));
    }
    if m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return Err(SpinError::InvalidArgument("projection exceeds angular momentum"));
    }
    if j1 + j2 + j + 1 >= FACTORIALS.len() as i32 {
        return Err(SpinError::InvalidArgument("angular momentum too large"));
    }
    if m != m1 + m2 || j < (j1 - j2).abs() || j > j1 + j2 {
        return Ok(0.0);
    }
    let pre = (2 * j + 1) as f64 * fact(j1 + j2 - j) * fact(j1 - j2 + j) * fact(j2 - j1 + j)
        / fact(j1 + j2 + j + 1)
        * fact(j + m)
        * fact(j - m)
        * fact(j1 - m1)
        * fact(j1 + m1)
        * fact(j2 - m2)
        * fact(j2 + m2);
    let kmin = 0.max(j2 - j - m1).max(j1 + m2 - j);
    let kmax = (j1 + j2 - j).min(j1 - m1).min(j2 + m2);
    let mut sum = 0.0;
    for k in kmin..=kmax {
        let term = 1.0
            / (fact(k)
                * fact(j1 + j2 - j - k)
                * fact(j1 - m1 - k)
                * fact(j2 + m2 - k)
                * fact(j - j2 + m1 + k)
                * fact(j - j1 - m2 + k));
        sum += if k % 2 == 0 { term } else { -term };
    }
    Ok(libm::sqrt(pre) * sum)
}

/// CG coefficient for arguments already known to be valid.
pub(crate) fn cg(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> f64 {
    if m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return 0.0;
    }
    clebsch_gordan(j1, m1, j2, m2, j, m).unwrap_or(0.0)
}

/// Index of `|m1 m2 m3⟩` in the product basis.
pub fn product_index(f: Spin, s: ProductState) -> usize {
    debug_assert!(s.is_valid(f));
    let n = f.multiplicity();
    let d = |m: i32| (f.int() - m) as usize;
    (d(s.m1) * n + d(s.m2)) * n + d(s.m3)
}

/// Product state at basis position `idx`.
pub fn product_state(f: Spin, idx: usize) -> ProductState {
    let n = f.multiplicity();
    let m = |k: usize| f.int() - k as i32;
    ProductState::new(m(idx / (n * n)), m(idx / n % n), m(idx % n))
}

/// All (2f+1)³ product states, lexicographic with m descending from f.
pub fn build_product_basis(f: Spin) -> Vec<ProductState> {
    (0..f.product_dim()).map(|i| product_state(f, i)).collect()
}

/// Expansion of a coupled state over the product basis.
pub fn coupled_state_vector(f: Spin, c: CoupledState) -> Result<Vec<f64>, SpinError> {
    if !c.is_valid(f) {
        return Err(SpinError::InvalidCoupledState { f: f.value(), f2b: c.f2b, f3b: c.f3b, m: c.m });
    }
    let fi = f.int();
    let (f2, f3) = (c.f2b as i32, c.f3b as i32);
    let mut v = vec![0.0; f.product_dim()];
    for m1 in -fi..=fi {
        for m2 in -fi..=fi {
            let m3 = c.m - m1 - m2;
            let m12 = m1 + m2;
            if m3.abs() > fi || m12.abs() > f2 {
                continue;
            }
            let w = cg(fi, m1, fi, m2, f2, m12) * cg(f2, m12, fi, m3, f3, c.m);
            v[product_index(f, ProductState::new(m1, m2, m3))] = w;
        }
    }
    Ok(v)
}

/// Coupled states with `(F3b, M)` fixed, F2b ascending.
pub fn block_states(f: Spin, f3b: u32, m: i32) -> Vec<CoupledState> {
    (0..=2 * f.value())
        .map(|f2b| CoupledState { f2b, f3b, m })
        .filter(|c| c.is_valid(f))
        .collect()
}

/// Every coupled state in S-matrix row order.
pub fn coupled_states(f: Spin) -> Vec<CoupledState> {
    let mut out = Vec::with_capacity(f.product_dim());
    for f3b in 0..=f.max_f3b() {
        for m in (-(f3b as i32)..=f3b as i32).rev() {
            out.extend(block_states(f, f3b, m));
        }
    }
    out
}

/// Elements of the permutation group S₃ acting on particle labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Permutation {
    Identity,
    /// P₊ of the three-body problem.
    Cyclic,
    /// P₋ = P₊ᵀ.
    Anticyclic,
    Swap12,
    Swap23,
    Swap13,
}

impl Permutation {
    pub const ALL: [Permutation; 6] = [
        Permutation::Identity,
        Permutation::Cyclic,
        Permutation::Anticyclic,
        Permutation::Swap12,
        Permutation::Swap23,
        Permutation::Swap13,
    ];

    pub fn is_odd(self) -> bool {
        matches!(self, Permutation::Swap12 | Permutation::Swap23 | Permutation::Swap13)
    }

    /// The state Σ' with `P[Σ, Σ'] = 1`.
    pub fn source(self, s: ProductState) -> ProductState {
        let ProductState { m1, m2, m3 } = s;
        match self {
            Permutation::Identity => s,
            Permutation::Cyclic => ProductState::new(m3, m1, m2),
            Permutation::Anticyclic => ProductState::new(m2, m3, m1),
            Permutation::Swap12 => ProductState::new(m2, m1, m3),
            Permutation::Swap23 => ProductState::new(m1, m3, m2),
            Permutation::Swap13 => ProductState::new(m3, m2, m1),
        }
    }
}

/// `map[Σ] = Σ'` so that `(P v)[Σ] = v[map[Σ]]`.
pub fn permutation_map(f: Spin, p: Permutation) -> Vec<usize> {
    (0..f.product_dim())
        .map(|i| product_index(f, p.source(product_state(f, i))))
        .collect()
}

/// Dense 0/1 permutation matrix over the product basis.
pub fn permutation_matrix(f: Spin, p: Permutation) -> Matrix {
    let map = permutation_map(f, p);
    let n = map.len();
    let mut m = Matrix::zeros(n, n);
    for (row, &col) in map.iter().enumerate() {
        m[(row, col)] = 1.0;
    }
    m
}

/// The orthogonal change of basis from product to coupled states.
#[derive(Debug, Clone)]
pub struct STransform {
    pub matrix: Matrix,
    pub labels: Vec<CoupledState>,
}

impl STransform {
    /// Row range carrying the `(F3b, M)` block.
    pub fn block(&self, f3b: u32, m: i32) -> Range<usize> {
        let start = self.labels.iter().position(|c| c.f3b == f3b && c.m == m);
        match start {
            None => 0..0,
            Some(s) => {
                let len = self.labels[s..].iter().take_while(|c| c.f3b == f3b && c.m == m).count();
                s..s + len
            }
        }
    }
}

pub fn s_transformation(f: Spin) -> STransform {
    let labels = coupled_states(f);
    let n = f.product_dim();
    let mut matrix = Matrix::zeros(labels.len(), n);
    for (r, c) in labels.iter().enumerate() {
        let v = coupled_state_vector(f, *c).expect("labels are valid by construction");
        for (j, x) in v.into_iter().enumerate() {
            matrix[(r, j)] = x;
        }
    }
    STransform { matrix, labels }
}

/// Rows of S restricted to one `(F3b, M)` block, as a `d × (2f+1)³` matrix.
pub fn block_basis(f: Spin, f3b: u32, m: i32) -> (Vec<CoupledState>, Matrix) {
    let states = block_states(f, f3b, m);
    let rows: Vec<Vec<f64>> = states
        .iter()
        .map(|c| coupled_state_vector(f, *c).expect("valid block state"))
        .collect();
    let mat = if rows.is_empty() { Matrix::zeros(0, f.product_dim()) } else { Matrix::from_rows(&rows) };
    (states, mat)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SymmetryTally {
    pub symmetric: usize,
    pub mixed: usize,
    pub antisymmetric: usize,
}

impl SymmetryTally {
    pub fn total(&self) -> usize {
        self.symmetric + self.mixed + self.antisymmetric
    }
}

/// Projector `Σ_g χ(g) P_g / 6` restricted to a block basis (rows of `v`).
fn restricted_projector(f: Spin, v: &Matrix, sign_of: impl Fn(Permutation) -> f64) -> Matrix {
    let d = v.nrows();
    let mut out = Matrix::zeros(d, d);
    for p in Permutation::ALL {
        let map = permutation_map(f, p);
        let w = sign_of(p) / 6.0;
        for i in 0..d {
            for j in 0..d {
                let (ri, rj) = (v.row(i), v.row(j));
                let x: f64 = (0..map.len()).map(|k| ri[k] * rj[map[k]]).sum();
                out[(i, j)] += w * x;
            }
        }
    }
    out
}

/// Counts symmetric / mixed / antisymmetric states in the `(F3b, M = F3b)`
/// block by diagonalising the S₃ symmetriser and antisymmetriser there.
pub fn symmetry_classify(f: Spin, f3b: u32) -> Result<SymmetryTally, SpinError> {
    f.check_f3b(f3b)?;
    let (_, v) = block_basis(f, f3b, f3b as i32);
    let count = |m: &Matrix| m.symmetric_eigen().0.iter().filter(|&&x| x > 0.5).count();
    let sym = restricted_projector(f, &v, |_| 1.0);
    let anti = restricted_projector(f, &v, |p| if p.is_odd() { -1.0 } else { 1.0 });
    let symmetric = if v.nrows() == 0 { 0 } else { count(&sym) };
    let antisymmetric = if v.nrows() == 0 { 0 } else { count(&anti) };
    Ok(SymmetryTally { symmetric, antisymmetric, mixed: v.nrows() - symmetric - antisymmetric })
}

/// Total-spin operators on a product space of arbitrary integer spins.
#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub fz: Matrix,
    pub raising: Matrix,
    pub lowering: Matrix,
}

impl SpinOperators {
    /// F² = F₋F₊ + F_z² + F_z.
    pub fn squared(&self) -> Matrix {
        self.lowering
            .matmul(&self.raising)
            .add(&self.fz.matmul(&self.fz))
            .add(&self.fz)
    }
}

/// Builds `Σ_i f_i` on `⊗_i |j_i m_i⟩` in lexicographic descending-m order.
pub fn product_spin_operators(spins: &[u32]) -> SpinOperators {
    let dims: Vec<usize> = spins.iter().map(|&j| 2 * j as usize + 1).collect();
    let n: usize = dims.iter().product();
    let mut fz = Matrix::zeros(n, n);
    let mut raising = Matrix::zeros(n, n);
    let decode = |mut idx: usize| -> Vec<i32> {
        let mut ms = vec![0; spins.len()];
        for k in (0..spins.len()).rev() {
            ms[k] = spins[k] as i32 - (idx % dims[k]) as i32;
            idx /= dims[k];
        }
        ms
    };
    let encode = |ms: &[i32]| -> usize {
        ms.iter().zip(spins).zip(&dims).fold(0, |acc, ((&m, &j), &d)| acc * d + (j as i32 - m) as usize)
    };
    for col in 0..n {
        let ms = decode(col);
        fz[(col, col)] = ms.iter().sum::<i32>() as f64;
        for k in 0..spins.len() {
            let (j, m) = (spins[k] as i32, ms[k]);
            if m < j {
                let mut up = ms.clone();
                up[k] += 1;
                raising[(encode(&up), col)] += libm::sqrt(((j - m) * (j + m + 1)) as f64);
            }
        }
    }
    let lowering = raising.transpose();
    SpinOperators { fz, raising, lowering }
}

/// Total-spin operators on the three-atom product basis.
pub fn total_spin_operators(f: Spin) -> SpinOperators {
    product_spin_operators(&[f.value(); 3])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spin(f: u32) -> Spin {
        Spin::new(f).unwrap()
    }

    #[test]
    fn cg_examples() {
        assert_eq!(clebsch_gordan(1, 1, 1, 1, 2, 2).unwrap(), 1.0);
        let x = clebsch_gordan(1, 1, 1, -1, 0, 0).unwrap();
        assert!((x - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!(clebsch_gordan(1, 0, 1, 0, 1, 0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn cg_rejects_bad_arguments_and_zeroes_forbidden_ones() {
        assert!(clebsch_gordan(-1, 0, 1, 0, 1, 0).is_err());
        assert!(clebsch_gordan(1, 2, 1, 0, 2, 2).is_err());
        assert_eq!(clebsch_gordan(1, 1, 1, 0, 2, 0).unwrap(), 0.0);
        assert_eq!(clebsch_gordan(1, 0, 1, 0, 3, 0).unwrap(), 0.0);
    }

    #[test]
    fn spin_range() {
        assert!(Spin::new(0).is_err());
        assert!(Spin::new(4).is_err());
        assert_eq!(spin(2).product_dim(), 125);
    }

    #[test]
    fn product_basis_counts_and_order() {
        let b = build_product_basis(spin(1));
        assert_eq!(b.len(), 27);
        assert_eq!(b[0], ProductState::new(1, 1, 1));
        assert_eq!(b[1], ProductState::new(1, 1, 0));
        assert_eq!(build_product_basis(spin(2)).len(), 125);
        assert_eq!(build_product_basis(spin(3)).len(), 343);
        for (i, s) in b.iter().enumerate() {
            assert_eq!(product_index(spin(1), *s), i);
        }
    }

    #[test]
    fn coupled_vector_examples() {
        let f = spin(1);
        let v = coupled_state_vector(f, CoupledState::new(f, 2, 3, 3).unwrap()).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-15);
        assert!(v[1..].iter().all(|x| x.abs() < 1e-15));

        let v = coupled_state_vector(f, CoupledState::new(f, 0, 1, 1).unwrap()).unwrap();
        let i = product_index(f, ProductState::new(1, -1, 1));
        assert!((v[i] - 1.0 / 3f64.sqrt()).abs() < 1e-15);

        assert!(CoupledState::new(f, 1, 3, 0).is_err());
        assert!(CoupledState::new(f, 2, 1, 2).is_err());
    }

    #[test]
    fn cyclic_permutation_moves_documented_state() {
        let f = spin(1);
        let p = permutation_matrix(f, Permutation::Cyclic);
        let from = product_index(f, ProductState::new(1, 0, -1));
        let to = product_index(f, ProductState::new(0, -1, 1));
        let mut e = vec![0.0; 27];
        e[from] = 1.0;
        let img = p.matvec(&e);
        assert_eq!(img[to], 1.0);
        assert_eq!(img.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn s_matrix_stretched_row_unique() {
        let s = s_transformation(spin(2));
        assert_eq!(s.labels.len(), 125);
        assert_eq!(s.labels.iter().filter(|c| c.f3b == 6 && c.m == 6).count(), 1);
        assert_eq!(s.block(1, 1).len(), 3);
    }

    #[test]
    fn symmetry_examples() {
        assert_eq!(
            symmetry_classify(spin(1), 0).unwrap(),
            SymmetryTally { symmetric: 0, mixed: 0, antisymmetric: 1 }
        );
        let t = symmetry_classify(spin(2), 5).unwrap();
        assert!(t.mixed > 0 && t.symmetric == 0 && t.antisymmetric == 0);
        assert_eq!(
            symmetry_classify(spin(1), 3).unwrap(),
            SymmetryTally { symmetric: 1, mixed: 0, antisymmetric: 0 }
        );
    }
}
