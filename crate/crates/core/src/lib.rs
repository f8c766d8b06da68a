//! Invariant zeros of networked discrete-time LTI systems.
//!
//! Agents `(A_i, B_i, C_i)` are coupled by a static quadruple `(L, R, S, D)`;
//! [`model::close_loop`] builds the network realization and
//! [`zeros::invariant_zeros`] extracts finite and infinite zeros from its
//! system pencil. [`homogeneous`] covers networks of identical SISO agents,
//! [`blocking`] the lifted system over `T` steps, and [`oracle`] provides
//! exact rational ground truth for small instances.
//!
//! The numerical engine is generic over [`Real`] (`f32`, `f64`); the aliases
//! below fix it to `f64`.

pub mod blocking;
pub mod corpus;
pub mod error;
pub mod homogeneous;
pub mod linalg;
pub mod matching;
pub mod model;
pub mod oracle;
pub mod poly;
pub mod rational;
pub mod scalar;
pub mod zeros;

pub use blocking::{
    block_system, blocked_homogeneous_zeros, blocked_transfer_assembly, blocked_transfer_eval, correspondence_report,
    BlockedRealization, CorrespondenceReport,
};
pub use error::{Error, Result};
pub use homogeneous::{
    circulant_eigenvalues, circulant_zero_report, design_check, diagonalization_residual, fourier_matrix,
    homogeneous_zero_report, minimum_phase_verdict, CirculantSpec, CirculantZeros, DesignReport, HomogeneousNetwork,
    MinimumPhaseReport, Verdict, VerdictReason,
};
pub use matching::{match_multisets, match_sets, MatchOutcome};
pub use model::{
    assemble_nodes, close_loop, interconnection_transfer_eval, network_transfer_eval, validate_network, AgentSystem,
    Interconnection, NetworkRealization, NodeMatrices, StateSpace, Violation,
};
pub use poly::{Polynomial, ZeroCluster};
pub use rational::{
    classify_agent, relative_degree, siso_from_statespace, AgentClass, Classification, RationalSiso, RelativeDegree,
    Witness,
};
pub use scalar::{Cx, CxExt, Real, Tolerances};
pub use zeros::{
    has_infinite_zero, invariant_zeros, normal_rank, pencil_at, rank_at, RankAt, ZeroMethod, ZeroOptions, ZeroReport,
};

pub type AgentSystemF64 = AgentSystem<f64>;
pub type InterconnectionF64 = Interconnection<f64>;
pub type StateSpaceF64 = StateSpace<f64>;
pub type NetworkRealizationF64 = NetworkRealization<f64>;
pub type RationalSisoF64 = RationalSiso<f64>;
pub type HomogeneousNetworkF64 = HomogeneousNetwork<f64>;
pub type ZeroReportF64 = ZeroReport<f64>;
pub type ZeroOptionsF64 = ZeroOptions<f64>;
pub type PolynomialF64 = Polynomial<f64>;
pub type C64 = Cx<f64>;
