//! Clebsch–Gordan coefficients against an independent construction: the
//! stretched state |J J⟩ is the vector of the M = J subspace orthogonal to
//! every larger J (phase fixed by ⟨j1 j1; j2 J−j1|J J⟩ > 0), and the other
//! |J M⟩ follow by applying J₋.

use efimov_core::spin_algebra::clebsch_gordan;
use proptest::prelude::*;

type Vector = Vec<f64>;

struct PairSpace {
    j1: i32,
    j2: i32,
}

impl PairSpace {
    fn dim(&self) -> usize {
        ((2 * self.j1 + 1) * (2 * self.j2 + 1)) as usize
    }

    fn index(&self, m1: i32, m2: i32) -> usize {
        ((self.j1 - m1) * (2 * self.j2 + 1) + (self.j2 - m2)) as usize
    }

    fn states(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        (-self.j1..=self.j1).rev().flat_map(move |m1| (-self.j2..=self.j2).rev().map(move |m2| (m1, m2)))
    }

    fn lower(&self, v: &Vector) -> Vector {
        let mut out = vec![0.0; self.dim()];
        for (m1, m2) in self.states() {
            let x = v[self.index(m1, m2)];
            if x == 0.0 {
                continue;
            }
            if m1 > -self.j1 {
                out[self.index(m1 - 1, m2)] += x * (((self.j1 + m1) * (self.j1 - m1 + 1)) as f64).sqrt();
            }
            if m2 > -self.j2 {
                out[self.index(m1, m2 - 1)] += x * (((self.j2 + m2) * (self.j2 - m2 + 1)) as f64).sqrt();
            }
        }
        out
    }

    /// `coupled[J][j_max − M]` is |J M⟩ for every J in the triangle.
    fn coupled_states(&self) -> Vec<(i32, Vec<Vector>)> {
        let (jmin, jmax) = ((self.j1 - self.j2).abs(), self.j1 + self.j2);
        let mut done: Vec<(i32, Vec<Vector>)> = Vec::new();
        for j in (jmin..=jmax).rev() {
            // Start from the M = J product state with the largest m1 and
            // project out the larger-J states with the same M.
            let mut top = vec![0.0; self.dim()];
            let seeds: Vec<(i32, i32)> = self.states().filter(|&(m1, m2)| m1 + m2 == j).collect();
            for &(m1, m2) in &seeds {
                top[self.index(m1, m2)] = 1.0 + m1 as f64 * 0.1;
            }
            // Two passes keep the projection orthogonal to rounding.
            for _ in 0..2 {
                for (jj, states) in &done {
                    let other = &states[(jj - j) as usize];
                    let overlap: f64 = top.iter().zip(other).map(|(a, b)| a * b).sum();
                    for (t, o) in top.iter_mut().zip(other) {
                        *t -= overlap * o;
                    }
                }
            }
            let norm: f64 = top.iter().map(|x| x * x).sum::<f64>().sqrt();
            let sign = if top[self.index(self.j1, j - self.j1)] < 0.0 { -1.0 } else { 1.0 };
            top.iter_mut().for_each(|x| *x *= sign / norm);
            let mut states = vec![top];
            for m in (-j + 1..=j).rev() {
                let mut next = self.lower(states.last().unwrap());
                let scale = 1.0 / (((j + m) * (j - m + 1)) as f64).sqrt();
                next.iter_mut().for_each(|x| *x *= scale);
                states.push(next);
            }
            done.push((j, states));
        }
        done
    }
}

#[test]
fn agrees_with_lowering_construction() {
    let mut worst = 0.0f64;
    for j1 in 0..=6 {
        for j2 in 0..=3 {
            let space = PairSpace { j1, j2 };
            for (j, states) in space.coupled_states() {
                for (k, v) in states.iter().enumerate() {
                    let m = j - k as i32;
                    for (m1, m2) in space.states() {
                        let expected = v[space.index(m1, m2)];
                        let got = clebsch_gordan(j1, m1, j2, m2, j, m).unwrap();
                        worst = worst.max((got - expected).abs());
                    }
                }
            }
        }
    }
    assert!(worst < 1e-12, "largest deviation {worst:e}");
}

#[test]
fn tabulated_values() {
    let third = (1.0f64 / 3.0).sqrt();
    assert!((clebsch_gordan(1, 1, 1, -1, 0, 0).unwrap() - third).abs() < 1e-15);
    assert!((clebsch_gordan(1, 0, 1, 0, 0, 0).unwrap() + third).abs() < 1e-15);
    assert!((clebsch_gordan(1, 1, 1, 0, 2, 1).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    assert!((clebsch_gordan(1, 0, 1, 0, 2, 0).unwrap() - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
    assert_eq!(clebsch_gordan(1, 0, 1, 0, 1, 0).unwrap(), 0.0);
    assert_eq!(clebsch_gordan(2, 1, 2, 1, 1, 1).unwrap(), 0.0);
    assert!(clebsch_gordan(1, 2, 1, 0, 2, 2).is_err());
}

fn spin_pair() -> impl Strategy<Value = (i32, i32)> {
    (0i32..=6, 0i32..=6)
}

proptest! {
    #[test]
    fn orthonormal_in_coupled_labels((j1, j2) in spin_pair(), a in 0u32..13, b in 0u32..13, mi in 0u32..100) {
        let (jmin, jmax) = ((j1 - j2).abs(), j1 + j2);
        let span = (jmax - jmin + 1) as u32;
        let (ja, jb) = (jmin + (a % span) as i32, jmin + (b % span) as i32);
        let jlow = ja.min(jb);
        let m = -jlow + (mi % (2 * jlow as u32 + 1)) as i32;
        let mut sum = 0.0;
        for m1 in -j1..=j1 {
            let m2 = m - m1;
            if m2.abs() <= j2 {
                sum += clebsch_gordan(j1, m1, j2, m2, ja, m).unwrap() * clebsch_gordan(j1, m1, j2, m2, jb, m).unwrap();
            }
        }
        let expected = if ja == jb { 1.0 } else { 0.0 };
        prop_assert!((sum - expected).abs() < 1e-12, "sum {}", sum);
    }

    #[test]
    fn orthonormal_in_product_labels((j1, j2) in spin_pair(), a in 0u32..49, b in 0u32..49) {
        let (n1, n2) = ((2 * j1 + 1) as u32, (2 * j2 + 1) as u32);
        let (ma1, ma2) = (j1 - (a % n1) as i32, j2 - (a / n1 % n2) as i32);
        let (mb1, mb2) = (j1 - (b % n1) as i32, j2 - (b / n1 % n2) as i32);
        let mut sum = 0.0;
        for j in (j1 - j2).abs()..=j1 + j2 {
            for m in -j..=j {
                sum += clebsch_gordan(j1, ma1, j2, ma2, j, m).unwrap() * clebsch_gordan(j1, mb1, j2, mb2, j, m).unwrap();
            }
        }
        let expected = if (ma1, ma2) == (mb1, mb2) { 1.0 } else { 0.0 };
        prop_assert!((sum - expected).abs() < 1e-12);
    }

    #[test]
    fn exchange_symmetry((j1, j2) in spin_pair(), a in 0u32..200) {
        // ⟨j2 m2 j1 m1|J M⟩ = (−1)^{j1+j2−J} ⟨j1 m1 j2 m2|J M⟩
        let m1 = -j1 + (a % (2 * j1 as u32 + 1)) as i32;
        let m2 = -j2 + (a / 13 % (2 * j2 as u32 + 1)) as i32;
        for j in (j1 - j2).abs()..=j1 + j2 {
            if (m1 + m2).abs() > j { continue; }
            let x = clebsch_gordan(j1, m1, j2, m2, j, m1 + m2).unwrap();
            let y = clebsch_gordan(j2, m2, j1, m1, j, m1 + m2).unwrap();
            let sign = if (j1 + j2 - j) % 2 == 0 { 1.0 } else { -1.0 };
            prop_assert!((y - sign * x).abs() < 1e-13);
        }
    }
}
