#![allow(dead_code)]

use nalgebra::DMatrix;
use netzero_core::oracle::ExactPoly;
use netzero_core::{AgentSystem, Cx, Interconnection, RationalSiso};

pub fn mat(rows: usize, cols: usize, v: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(rows, cols, v)
}

pub fn double_delay_agent() -> AgentSystem<f64> {
    AgentSystem::new(mat(2, 2, &[0.0, 1.0, 0.0, 0.0]), mat(2, 1, &[0.0, 1.0]), mat(1, 2, &[1.0, 0.0]))
}

pub fn double_delay() -> RationalSiso<f64> {
    RationalSiso::from_coeffs(&[1.0], &[0.0, 0.0, 1.0]).unwrap()
}

/// Three identical double-delay agents; input enters agent 1, output reads agent 2.
pub fn three_agent_coupling() -> Interconnection<f64> {
    Interconnection::new(
        mat(3, 3, &[1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0]),
        mat(3, 1, &[1.0, 0.0, 0.0]),
        mat(1, 3, &[0.0, 1.0, 0.0]),
        mat(1, 1, &[0.0]),
    )
}

pub fn three_agents() -> Vec<AgentSystem<f64>> {
    vec![double_delay_agent(); 3]
}

/// Roots of `det` repeated by multiplicity, each taken from a square-free
/// factor so that the float root finder only sees simple roots.
pub fn exact_root_multiset(det: &ExactPoly) -> Vec<Cx<f64>> {
    let mut out = Vec::new();
    let mut rest = det.clone();
    while rest.degree().unwrap_or(0) > 0 {
        let simple = rest.square_free_part();
        out.extend(simple.to_f64().roots().unwrap());
        rest = rest.div_rem(&simple).unwrap().0;
    }
    out
}
