use efimov_core::interaction::pair_operator_product_basis;
use efimov_core::linalg::Matrix;
use efimov_core::meanfield::{
    alpha_2b, alpha_2b_values, alpha_3b, couplings, dominance_report, pair_expansion_operator, Expansion,
    LinearCombination, MagneticPhase, ThreeBodyLengths,
};
use efimov_core::spin_algebra::{
    block_basis, permutation_matrix, total_spin_operators, Permutation,
};
use efimov_core::{ScatteringLengths, Spin};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;

fn spin(f: u32) -> Spin {
    Spin::new(f).unwrap()
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn assert_terms(c: &LinearCombination, expected: &[(u32, (i64, i64))]) {
    assert_eq!(c.terms.len(), expected.len(), "{c}");
    for &(label, (n, d)) in expected {
        assert_eq!(c.coefficient(label), q(n, d), "coefficient of label {label} in {c}");
    }
}

fn check(e: &Expansion, rows: &[&[(u32, (i64, i64))]]) {
    assert_eq!(e.alpha.len(), rows.len());
    for (c, row) in e.alpha.iter().zip(rows) {
        assert_terms(c, row);
    }
}

#[test]
fn two_body_spin_one() {
    check(&alpha_2b(spin(1)), &[&[(0, (1, 3)), (2, (2, 3))], &[(0, (-1, 3)), (2, (1, 3))]]);
}

#[test]
fn two_body_spin_two() {
    check(
        &alpha_2b(spin(2)),
        &[
            &[(0, (-2, 5)), (2, (8, 7)), (4, (9, 35))],
            &[(0, (-1, 30)), (2, (-2, 21)), (4, (9, 70))],
            &[(0, (1, 30)), (2, (-1, 21)), (4, (1, 70))],
        ],
    );
}

/// Printed with superscripts 0, 2, 4, 6; these are the n = 0..3 terms.
#[test]
fn two_body_spin_three() {
    check(
        &alpha_2b(spin(3)),
        &[
            &[(0, (9, 35)), (2, (-4, 7)), (4, (486, 385)), (6, (4, 77))],
            &[(0, (9, 70)), (2, (-17, 63)), (4, (81, 770)), (6, (25, 693))],
            &[(0, (-1, 315)), (2, (5, 378)), (4, (-6, 385)), (6, (23, 4158))],
            &[(0, (-1, 630)), (2, (1, 378)), (4, (-1, 770)), (6, (1, 4158))],
        ],
    );
}

#[test]
fn three_body_spin_one() {
    check(&alpha_3b(spin(1)), &[&[(1, (3, 5)), (3, (2, 5))], &[(1, (-1, 5)), (3, (1, 5))]]);
}

#[test]
fn three_body_spin_two() {
    check(
        &alpha_3b(spin(2)),
        &[
            &[(0, (2, 35)), (2, (-2, 7)), (3, (3, 5)), (4, (243, 385)), (6, (-1, 385))],
            &[(0, (-1, 30)), (2, (23, 126)), (3, (-29, 60)), (4, (513, 1540)), (6, (1, 990))],
            &[(0, (-29, 1260)), (2, (13, 126)), (3, (-43, 360)), (4, (117, 3080)), (6, (1, 770))],
            &[(0, (-1, 945)), (2, (1, 1134)), (3, (1, 540)), (4, (-3, 1540)), (6, (17, 62370))],
            &[(0, (1, 3780)), (2, (-1, 1134)), (3, (1, 1080)), (4, (-1, 3080)), (6, (1, 62370))],
        ],
    );
}

#[test]
fn three_body_spin_three_has_seven_terms() {
    let e = alpha_3b(spin(3));
    assert_eq!(e.channels, [1, 3, 4, 5, 6, 7, 9]);
    assert_eq!(e.alpha.len(), 7);
    // The highest power isolates the Lagrange leading coefficient.
    let top = &e.alpha[6];
    for (k, (label, c)) in top.terms.iter().enumerate() {
        let xk = &e.nodes[k];
        let denom = e.nodes.iter().enumerate().filter(|&(j, _)| j != k).fold(q(1, 1), |acc, (_, xj)| acc * (xk - xj));
        assert_eq!(*c, q(1, 1) / denom, "label {label}");
    }
}

/// Identical bosons only occupy the exchange-symmetric pair states (even
/// F2b); a degree-f polynomial in f₁·f₂ cannot also vanish on the odd F2b
/// channels, so both operators are compared on the symmetric subspace.
fn symmetric_pair_projector(f: Spin) -> Matrix {
    let n = f.multiplicity();
    let swap = Matrix::from_fn(n * n, n * n, |r, c| if c == (r % n) * n + r / n { 1.0 } else { 0.0 });
    Matrix::identity(n * n).add(&swap).scaled(0.5)
}

#[test]
fn expansion_reproduces_pair_operator() {
    let cases: [&[f64]; 4] = [&[1.3, -0.4], &[-8.97, -6.91, -4.73], &[2.0, 5.0, -1.0, 0.25], &[1.0, 1.0, 1.0, 1.0]];
    for a in cases {
        let f = spin(a.len() as u32 - 1);
        let l = ScatteringLengths::new(f, a).unwrap();
        let p = symmetric_pair_projector(f);
        let lhs = p.matmul(&pair_expansion_operator(f, &alpha_2b_values(&l))).matmul(&p);
        let rhs = p.matmul(&pair_operator_product_basis(&l)).matmul(&p);
        assert!(lhs.max_abs_diff(&rhs) < 1e-12, "f={}", f.value());
    }
}

/// On the fully symmetric three-atom states, Σ α₃ᵦ⁽ⁿ⁾(Σ f_i·f_j)ⁿ acts as
/// a3b^(F3b) on each F3b sector.
#[test]
fn expansion_reproduces_three_body_operator() {
    for f in 1..=2 {
        let f = spin(f);
        let e = alpha_3b(f);
        let a3: Vec<f64> = (0..e.channels.len()).map(|k| 1.5 - 0.7 * k as f64 + 0.1 * (k * k) as f64).collect();
        let alpha = e.evaluate(&a3).unwrap();
        let ops = total_spin_operators(f);
        let n = ops.fz.nrows();
        let j = f.value() as f64;
        let pair_sum = ops.squared().sub(&Matrix::identity(n).scaled(3.0 * j * (j + 1.0))).scaled(0.5);
        let mut op = Matrix::zeros(n, n);
        let mut power = Matrix::identity(n);
        for x in &alpha {
            op = op.add(&power.scaled(*x));
            power = power.matmul(&pair_sum);
        }
        let sym = Permutation::ALL
            .iter()
            .fold(Matrix::zeros(n, n), |acc, &p| acc.add(&permutation_matrix(f, p)))
            .scaled(1.0 / 6.0);
        for (k, &f3b) in e.channels.iter().enumerate() {
            let (_, v) = block_basis(f, f3b, f3b as i32);
            // Symmetric vectors of this sector: S P_sym Sᵀ has eigenvalue 1.
            let proj = v.matmul(&sym).matmul(&v.transpose());
            let (vals, vecs) = proj.symmetric_eigen();
            for (i, &lam) in vals.iter().enumerate() {
                if lam < 0.5 {
                    continue;
                }
                let coeffs: Vec<f64> = (0..vecs.nrows()).map(|r| vecs[(r, i)]).collect();
                let state: Vec<f64> = (0..n).map(|c| (0..v.nrows()).map(|r| coeffs[r] * v[(r, c)]).sum()).collect();
                let image = op.matvec(&state);
                for (x, y) in image.iter().zip(&state) {
                    assert!((x - a3[k] * y).abs() < 1e-10, "f={} F3b={f3b}", f.value());
                }
            }
        }
    }
}

#[test]
fn rubidium_87_exchange_term() {
    let l = ScatteringLengths::new(spin(1), &[1.23, 1.21]).unwrap();
    let alpha = alpha_2b_values(&l);
    assert!((alpha[1] - (1.21 - 1.23) / 3.0).abs() < 1e-15);
    assert!((alpha[1] + 6.67e-3).abs() < 1e-5);
    let c = couplings(&alpha, &[Complex64::new(0.0, 0.0); 2], 1.0).unwrap();
    assert_eq!(dominance_report(1e-6, &c).unwrap().phase, MagneticPhase::Antiferromagnetic);
    let c = couplings(&[1.0, 0.2], &[Complex64::new(0.0, 0.0); 2], 1.0).unwrap();
    assert_eq!(dominance_report(1e-6, &c).unwrap().phase, MagneticPhase::Ferromagnetic);
}

#[test]
fn zero_three_body_exchange_never_dominates() {
    let c = couplings(&[1.0, 1e-9], &[Complex64::new(4.0, 0.0), Complex64::new(0.0, 0.0)], 1.0).unwrap();
    for n in [1e-12, 1.0, 1e12] {
        assert!(!dominance_report(n, &c).unwrap().three_body_dominates);
    }
}

#[test]
fn three_body_lengths_need_every_symmetric_sector() {
    assert!(ThreeBodyLengths::new(spin(2), &[1.0, 2.0]).is_err());
    let t = ThreeBodyLengths::new(spin(2), &[1.0; 5]).unwrap();
    let alpha = t.alpha();
    assert!((alpha[0].re - 1.0).abs() < 1e-14 && alpha[1..].iter().all(|a| a.norm() < 1e-14));
}
