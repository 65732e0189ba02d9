//! Randomized invariants across modules.

use std::f64::consts::PI;

use monopole::curve::MonopoleIndex;
use monopole::report::{self, ProfileRow};
use monopole::symplectic::{
    bolza_transform, cyclic_basis, gamma2_s, gamma2_swap, gamma2_t, humbert_reduction, IntegerSymplectic,
};
use monopole::theta::{jacobi_theta, UpperHalfPlanePoint, C64};
use monopole::vanishing::reduce_k;
use proptest::prelude::*;

fn generators() -> Vec<IntegerSymplectic> {
    vec![gamma2_s(), gamma2_t(), gamma2_swap(), humbert_reduction(), bolza_transform()]
}

fn word(picks: &[(usize, bool)]) -> IntegerSymplectic {
    let gens = generators();
    picks.iter().fold(IntegerSymplectic::identity(2), |acc, &(i, inv)| {
        let g = &gens[i % gens.len()];
        let g = if inv { g.inverse() } else { g.clone() };
        acc.compose(&g).unwrap()
    })
}

#[test]
fn cyclic_basis_inverse() {
    let c = cyclic_basis();
    assert_eq!(c.compose(&c.inverse()).unwrap(), IntegerSymplectic::identity(c.genus()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn theta3_quasi_periodic(x in -1.0f64..1.0, y in -0.4f64..0.4, re in -1.0f64..1.0, im in 0.6f64..3.0) {
        let t = C64::new(re, im);
        let tau = UpperHalfPlanePoint::new(t).unwrap();
        let z = C64::new(x, y);
        let base = jacobi_theta(3, z, &tau, 1e-15).unwrap();
        let shifted_one = jacobi_theta(3, z + 1.0, &tau, 1e-15).unwrap();
        let shifted_tau = jacobi_theta(3, z + t, &tau, 1e-15).unwrap();
        let factor = (C64::new(0.0, -PI) * (t + 2.0 * z)).exp();
        let scale = base.norm().max(1.0);
        prop_assert!((shifted_one - base).norm() < 1e-12 * scale);
        prop_assert!((shifted_tau - factor * base).norm() < 1e-11 * scale * factor.norm().max(1.0));
    }

    #[test]
    fn symplectic_words_invert(picks in proptest::collection::vec((0usize..5, any::<bool>()), 0..6)) {
        let g = word(&picks);
        prop_assert!(monopole::symplectic::is_symplectic(g.rows()).unwrap());
        prop_assert_eq!(g.compose(&g.inverse()).unwrap(), IntegerSymplectic::identity(2));
        prop_assert_eq!(g.inverse().compose(&g).unwrap(), IntegerSymplectic::identity(2));
    }

    #[test]
    fn index_sign_symmetry(m in -40i64..40, n in -40i64..40) {
        match (MonopoleIndex::new(m, n), MonopoleIndex::new(-m, -n)) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a, b);
                prop_assert!(a.m() + a.n() >= 1);
                prop_assert!(a.ratio() < 0.0);
                prop_assert!(a.modulus().im > 0.0);
                prop_assert_eq!(a.partner().partner(), a);
            }
            (Err(_), Err(_)) => {}
            _ => prop_assert!(false, "({m}, {n}) and its negative disagree"),
        }
    }

    #[test]
    fn reduce_k_is_a_residue(k in -1000i64..1000) {
        let r = reduce_k(k);
        prop_assert!((-1..=1).contains(&r));
        prop_assert_eq!((k - r).rem_euclid(3), 0);
    }

    #[test]
    fn profile_csv_round_trips(rows in proptest::collection::vec(
        (0.0f64..2.0, any::<f64>(), any::<f64>(), any::<f64>(), prop_oneof![Just(f64::INFINITY), 0.0f64..1e300]),
        0..20,
    )) {
        let rows: Vec<ProfileRow> = rows
            .into_iter()
            .map(|(lambda, a, b, c, h)| ProfileRow {
                lambda,
                h_minus: a.abs(),
                h_zero: b.abs(),
                h_plus: c.abs(),
                big_h: h,
            })
            .filter(|r| !(r.h_minus.is_nan() || r.h_zero.is_nan() || r.h_plus.is_nan()))
            .collect();
        let back = report::profile_from_csv(&report::profile_to_csv(&rows).unwrap()).unwrap();
        prop_assert_eq!(back, rows);
    }
}
