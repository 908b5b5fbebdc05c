use efimov_core::hyperangular_solver::{
    find_block_roots, q_matrix, BlockGeometry, QContext, ReducedBlock, RootOptions,
};
use efimov_core::linalg::Matrix;
use efimov_core::meanfield::{alpha_2b, alpha_3b};
use efimov_core::spin_algebra::{
    permutation_map, permutation_matrix, s_transformation, total_spin_operators, Permutation,
};
use efimov_core::{SValue, ScatteringLengths, Spin};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn spin(f: u32) -> Spin {
    Spin::new(f).unwrap()
}

fn compose(f: Spin, a: Permutation, b: Permutation) -> Vec<usize> {
    // (P_a P_b v)[i] = (P_b v)[map_a[i]] = v[map_b[map_a[i]]]
    let (ma, mb) = (permutation_map(f, a), permutation_map(f, b));
    ma.iter().map(|&i| mb[i]).collect()
}

#[test]
fn s_matrix_is_orthogonal() {
    for f in 1..=3 {
        let s = s_transformation(spin(f)).matrix;
        let n = s.nrows();
        assert_eq!(n, spin(f).product_dim());
        assert!(s.matmul(&s.transpose()).max_abs_diff(&Matrix::identity(n)) < 1e-12, "f={f}");
        assert!(s.transpose().matmul(&s).max_abs_diff(&Matrix::identity(n)) < 1e-12, "f={f}");
    }
}

#[test]
fn permutations_form_s3() {
    for f in 1..=3 {
        let f = spin(f);
        let maps: Vec<Vec<usize>> = Permutation::ALL.iter().map(|&p| permutation_map(f, p)).collect();
        for &a in &Permutation::ALL {
            for &b in &Permutation::ALL {
                let c = compose(f, a, b);
                let k = maps.iter().position(|m| *m == c).expect("closed under composition");
                assert_eq!(Permutation::ALL[k].is_odd(), a.is_odd() ^ b.is_odd());
            }
        }
        let cyc = compose(f, Permutation::Cyclic, Permutation::Anticyclic);
        assert!(cyc.iter().enumerate().all(|(i, &j)| i == j), "P₊P₋ = 1");
        let p = permutation_matrix(f, Permutation::Cyclic);
        let n = p.nrows();
        assert_eq!(p.matmul(&p).matmul(&p), Matrix::identity(n));
        assert_eq!(p.transpose(), permutation_matrix(f, Permutation::Anticyclic));
        for sw in [Permutation::Swap12, Permutation::Swap23, Permutation::Swap13] {
            let m = permutation_matrix(f, sw);
            assert_eq!(m.matmul(&m), Matrix::identity(n));
        }
    }
}

fn length() -> impl Strategy<Value = f64> {
    prop_oneof![-1e3..-0.5f64, 0.5..1e3f64, Just(0.0)]
}

fn s_value() -> impl Strategy<Value = SValue> {
    prop_oneof![
        (0.05..4.9f64).prop_filter("away from even poles", |x| (x / 2.0 - (x / 2.0).round()).abs() > 0.02)
            .prop_map(SValue::real),
        (0.05..6.0f64).prop_map(SValue::imaginary),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn q_is_scale_invariant(a in prop::collection::vec(length(), 2), r in 0.5..50.0f64, lambda in 0.01..100.0f64, s in s_value()) {
        let l = ScatteringLengths::new(spin(1), &a).unwrap();
        let q1 = q_matrix(&QContext::new(l.clone(), r).unwrap(), s).unwrap();
        let q2 = q_matrix(&QContext::new(l.scaled(lambda), r * lambda).unwrap(), s).unwrap();
        let scale = q1.max_abs().max(1.0);
        prop_assert!(q1.max_abs_diff(&q2) <= 1e-12 * scale);
    }

    #[test]
    fn q_commutes_with_total_spin(f in 1u32..=2, a in prop::collection::vec(length(), 3), r in 0.5..50.0f64, s in s_value()) {
        let f = spin(f);
        let l = ScatteringLengths::new(f, &a[..f.value() as usize + 1]).unwrap();
        let q = q_matrix(&QContext::new(l, r).unwrap(), s).unwrap();
        let ops = total_spin_operators(f);
        let f2 = ops.squared();
        let scale = q.max_abs().max(1.0) * f2.max_abs();
        prop_assert!(q.matmul(&f2).max_abs_diff(&f2.matmul(&q)) <= 1e-11 * scale);
        prop_assert!(q.matmul(&ops.fz).max_abs_diff(&ops.fz.matmul(&q)) <= 1e-11 * scale);
    }

    #[test]
    fn roots_do_not_depend_on_projection(a0 in length(), a2 in length(), r in 0.5..50.0f64) {
        let l = ScatteringLengths::new(spin(1), &[a0, a2]).unwrap();
        let opts = RootOptions { step: 5e-3, ..RootOptions::default() };
        let reference = {
            let g = BlockGeometry::new(spin(1), 2).unwrap();
            find_block_roots(&ReducedBlock::new(&g, &l, r), 2, &opts).unwrap()
        };
        for m in -2..2 {
            let g = BlockGeometry::with_projection(spin(1), 2, m).unwrap();
            let roots = find_block_roots(&ReducedBlock::new(&g, &l, r), 2, &opts).unwrap();
            prop_assert_eq!(roots.roots.len(), reference.roots.len());
            for (x, y) in roots.roots.iter().zip(&reference.roots) {
                prop_assert_eq!(x.value.axis, y.value.axis);
                prop_assert_eq!(x.multiplicity, y.multiplicity);
                prop_assert!((x.value.magnitude - y.value.magnitude).abs() <= 1e-9 * y.value.magnitude.max(1.0));
            }
        }
    }

    #[test]
    fn vandermonde_round_trip(f in 1u32..=3, nums in prop::collection::vec(-10_000i64..10_000, 7), den in prop::collection::vec(1i64..500, 7)) {
        let f = spin(f);
        for expansion in [alpha_2b(f), alpha_3b(f)] {
            let lengths: Vec<BigRational> = (0..expansion.channels.len())
                .map(|k| BigRational::new(BigInt::from(nums[k]), BigInt::from(den[k])))
                .collect();
            let alpha = expansion.evaluate_exact(&lengths).unwrap();
            prop_assert_eq!(alpha.len(), lengths.len());
            prop_assert_eq!(expansion.reconstruct_exact(&alpha), lengths);
        }
    }

    #[test]
    fn equal_lengths_are_purely_direct(f in 1u32..=3, n in -10_000i64..10_000, d in 1i64..100) {
        let f = spin(f);
        let a = BigRational::new(BigInt::from(n), BigInt::from(d));
        for expansion in [alpha_2b(f), alpha_3b(f)] {
            let alpha = expansion.evaluate_exact(&vec![a.clone(); expansion.channels.len()]).unwrap();
            prop_assert_eq!(&alpha[0], &a);
            prop_assert!(alpha[1..].iter().all(|x| *x == BigRational::from_integer(0.into())));
        }
    }
}
