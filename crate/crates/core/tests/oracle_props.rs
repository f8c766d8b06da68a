mod common;

use nalgebra::DMatrix;
use netzero_core::corpus;
use netzero_core::oracle::{
    exact_det, exact_normal_rank, exact_rank_at, pencil_det_poly, q_frac, q_int, ExactPoly, ExactQuadruple, QC,
};
use netzero_core::{invariant_zeros, match_multisets, rank_at, Cx, StateSpace, ZeroOptions};
use proptest::prelude::*;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use common::exact_root_multiset;

/// Sparse-ish quadruple with entries `k/4`, exactly representable in binary.
fn dyadic_quadruple(rng: &mut ChaCha8Rng, n: usize, m: usize, p: usize) -> StateSpace<f64> {
    let entry = |rng: &mut ChaCha8Rng| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(-6i32..=6) as f64 / 4.0 };
    let mut mat = |rows: usize, cols: usize| DMatrix::from_fn(rows, cols, |_, _| entry(rng));
    let a = mat(n, n);
    let b = mat(n, m);
    let c = mat(p, n);
    let d = mat(p, m);
    StateSpace::new(a, b, c, d)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn exact_and_float_ranks_agree(seed in any::<u64>()) {
        let mut rng = corpus::rng(seed);
        let (n, m, p) = (rng.gen_range(1..=5), rng.gen_range(1..=3), rng.gen_range(1..=3));
        let sys = dyadic_quadruple(&mut rng, n, m, p);
        let quad = ExactQuadruple::from_state_space(&sys).unwrap();
        let opts = ZeroOptions::default();
        prop_assert_eq!(rank_at(&sys, Cx::new(0.0, 0.0), &opts).unwrap().normal_rank, exact_normal_rank(&quad));
        for _ in 0..5 {
            let (re, im) = (rng.gen_range(-8i64..=8), if rng.gen_bool(0.5) { 0 } else { rng.gen_range(-8i64..=8) });
            let z = QC::new(q_frac(re, 4), q_frac(im, 4));
            let float = rank_at(&sys, Cx::new(re as f64 / 4.0, im as f64 / 4.0), &opts).unwrap().rank;
            prop_assert_eq!(float, exact_rank_at(&quad, &z), "z = {}/4 + {}i/4", re, im);
        }
    }

    #[test]
    fn float_zeros_match_exact_determinant(seed in any::<u64>()) {
        let mut rng = corpus::rng(seed);
        let (n, m) = (rng.gen_range(1..=6), rng.gen_range(1..=2));
        let sys = dyadic_quadruple(&mut rng, n, m, m);
        let quad = ExactQuadruple::from_state_space(&sys).unwrap();
        let det = pencil_det_poly(&quad).unwrap();
        // a singular pencil has no determinant characterization of its zeros
        prop_assume!(!det.is_zero());
        let expected = exact_root_multiset(&det);
        let report = invariant_zeros(&sys, &ZeroOptions::default()).unwrap();
        let got = report.zeros();
        let outcome = match_multisets(&got, &expected, 1e-6);
        prop_assert!(outcome.matched, "engine {:?} vs exact {:?}", got, expected);
    }

    #[test]
    fn determinant_degree_and_held_out_point(seed in any::<u64>()) {
        let mut rng = corpus::rng(seed);
        let (n, m) = (rng.gen_range(1..=5), rng.gen_range(1..=3));
        let sys = dyadic_quadruple(&mut rng, n, m, m);
        let quad = ExactQuadruple::from_state_space(&sys).unwrap();
        let det = pencil_det_poly(&quad).unwrap();
        // z appears only in the n state rows
        prop_assert!(det.degree().is_none_or(|d| d <= n));
        let d_invertible = exact_det(&quad.d).is_some_and(|v| v != q_int(0));
        prop_assert_eq!(det.degree() == Some(n), d_invertible);
        let far = q_int(n as i64 + 7);
        prop_assert_eq!(det.eval(&far), exact_det(&quad.pencil_at(&far)).unwrap());
        let complex = QC::new(q_frac(1, 3), q_frac(-2, 5));
        prop_assert_eq!(det.eval(&complex), exact_det(&quad.pencil_at(&complex)).unwrap());
    }
}

#[test]
fn root_multiset_of_repeated_factor() {
    // (z − 1)² (z + 2)
    let det = ExactPoly::new(vec![q_int(2), q_int(-3), q_int(0), q_int(1)]);
    let mut roots: Vec<f64> = exact_root_multiset(&det).iter().map(|z| z.re).collect();
    roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert_eq!(roots.len(), 3);
    for (r, e) in roots.iter().zip([-2.0, 1.0, 1.0]) {
        assert!((r - e).abs() < 1e-12);
    }
}
