mod common;

use netzero_core::corpus::{self, Feedthrough};
use netzero_core::oracle::{pencil_det_poly, ExactQuadruple};
use netzero_core::{
    block_system, blocked_homogeneous_zeros, blocked_transfer_assembly, blocked_transfer_eval, close_loop,
    correspondence_report, invariant_zeros, match_multisets, match_sets, Cx, HomogeneousNetwork, Interconnection,
    RationalSiso, StateSpace, ZeroOptions,
};
use proptest::prelude::*;
use rand::Rng;

use common::*;

fn random_network(rng: &mut rand_chacha::ChaCha8Rng) -> StateSpace<f64> {
    let (agents, coupling) = corpus::heterogeneous_network(rng, 8);
    close_loop(&agents, &coupling).unwrap().system
}

/// Zeros of the blocked pencil from its exact determinant.
fn exact_blocked_zeros(sys: &StateSpace<f64>, t: usize) -> Vec<Cx<f64>> {
    let blk = block_system(sys, t).unwrap();
    let quad = ExactQuadruple::from_state_space(&blk.system).unwrap();
    exact_root_multiset(&pencil_det_poly(&quad).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn assembly_equals_state_space(seed in any::<u64>(), t in 1usize..=4) {
        let mut rng = corpus::rng(seed);
        let sys = random_network(&mut rng);
        let blk = block_system(&sys, t).unwrap();
        for _ in 0..5 {
            let zeta = Cx::from_polar(rng.gen_range(0.5..3.0), rng.gen_range(0.0..std::f64::consts::TAU));
            let (Ok(a), Ok(b)) = (blocked_transfer_eval(&blk, zeta), blocked_transfer_assembly(&sys, t, zeta)) else {
                continue;
            };
            prop_assert!((a - &b).norm() <= 1e-8 * b.norm().max(1e-300), "zeta = {zeta}");
        }
    }

    #[test]
    fn blocked_feedthrough_is_lower_triangular(seed in any::<u64>(), t in 1usize..=4) {
        let mut rng = corpus::rng(seed);
        let sys = random_network(&mut rng);
        let blk = block_system(&sys, t).unwrap();
        let (p, m) = (sys.outputs(), sys.inputs());
        prop_assert_eq!(blk.system.states(), sys.states());
        for i in 0..t {
            for j in 0..t {
                let block = blk.system.d.view((i * p, j * m), (p, m)).clone_owned();
                if i == j {
                    prop_assert_eq!(&block, &sys.d);
                } else if j > i {
                    prop_assert!(block.iter().all(|&v| v == 0.0));
                }
            }
        }
    }

    #[test]
    fn minimal_networks_keep_the_correspondence(seed in any::<u64>(), t in 2usize..=4) {
        let mut rng = corpus::rng(seed);
        let sys = random_network(&mut rng);
        let rep = correspondence_report(&sys, t, &ZeroOptions::default()).unwrap();
        prop_assert!(rep.all_match(), "{:?}", rep.details);
    }

    #[test]
    fn blocked_homogeneous_path_matches_direct_engine(seed in any::<u64>(), t in 2usize..=3) {
        let mut rng = corpus::rng(seed);
        let hn = loop {
            let (hn, kind) = corpus::homogeneous_instance(&mut rng);
            if kind == Feedthrough::Invertible {
                break hn;
            }
        };
        let opts = ZeroOptions::default();
        let fast = blocked_homogeneous_zeros(&hn, t, &opts).unwrap();
        let blk = block_system(&hn.realize().unwrap().system, t).unwrap();
        let direct = invariant_zeros(&blk.system, &opts).unwrap();
        let m = match_multisets(&direct.zeros(), &fast.zeros(), 1e-6);
        prop_assert!(m.matched, "{:?} vs {:?}", direct.zeros(), fast.zeros());
        prop_assert!(!direct.has_infinite_zero && !fast.has_infinite_zero);
    }
}

#[test]
fn pass_through_zero_is_squared() {
    let g = RationalSiso::from_coeffs(&[-2.0, 1.0], &[0.0, 0.0, 1.0]).unwrap().realize();
    let sys = StateSpace::new(g.a, g.b, g.c, mat(1, 1, &[0.0]));
    let expected = exact_blocked_zeros(&sys, 2);
    let rep = correspondence_report(&sys, 2, &ZeroOptions::default()).unwrap();
    assert!(rep.all_match(), "{:?}", rep.details);
    assert!(match_sets(&rep.blocked.nonzero_locations(), &expected, 1e-8).matched, "{expected:?}");
}

#[test]
fn three_agent_network_blocked_twice() {
    let sys = close_loop(&three_agents(), &three_agent_coupling()).unwrap().system;
    let expected = exact_blocked_zeros(&sys, 2);
    let report = invariant_zeros(&block_system(&sys, 2).unwrap().system, &ZeroOptions::default()).unwrap();
    assert!(match_multisets(&report.zeros(), &expected, 1e-8).matched, "{:?} vs {expected:?}", report.zeros());
    // ±1 both square to 1
    assert!(match_sets(&report.nonzero_locations(), &[Cx::new(1.0, 0.0)], 1e-8).matched);
}

#[test]
fn swap_network_blocked_zeros_are_squares() {
    let delay = RationalSiso::from_coeffs(&[1.0], &[0.0, 1.0]).unwrap();
    let coupling = Interconnection::new(
        mat(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        mat(2, 1, &[1.0, 0.0]),
        mat(1, 2, &[1.0, 0.0]),
        mat(1, 1, &[1.0]),
    );
    let hn = HomogeneousNetwork::new(delay, 2, coupling).unwrap();
    let sys = hn.realize().unwrap().system;
    let opts = ZeroOptions::default();
    let unblocked = exact_blocked_zeros(&sys, 1);
    let squares: Vec<Cx<f64>> = unblocked.iter().map(|z| z * z).collect();
    assert!(match_multisets(&exact_blocked_zeros(&sys, 2), &squares, 1e-10).matched);
    let fast = blocked_homogeneous_zeros(&hn, 2, &opts).unwrap();
    assert!(match_multisets(&fast.zeros(), &squares, 1e-8).matched, "{:?} vs {squares:?}", fast.zeros());
    assert!(!fast.has_infinite_zero);
}

#[test]
fn blocked_homogeneous_rejects_singular_feedthrough() {
    let mut rng = corpus::rng(7);
    let hn = loop {
        let (hn, kind) = corpus::homogeneous_instance(&mut rng);
        if kind == Feedthrough::Zero {
            break hn;
        }
    };
    assert!(blocked_homogeneous_zeros(&hn, 2, &ZeroOptions::default()).is_err());
}
