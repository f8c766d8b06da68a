//! Agent and coupling data, block-diagonal node assembly, closed-loop network
//! realization and pointwise transfer-function evaluation.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, to_complex};
use crate::scalar::{Cx, Real, Tolerances};

/// One node `x(t+1) = A x(t) + B v(t)`, `w(t) = C x(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AgentSystem<T: Real> {
    pub a: DMatrix<T>,
    pub b: DMatrix<T>,
    pub c: DMatrix<T>,
}

impl<T: Real> AgentSystem<T> {
    pub fn new(a: DMatrix<T>, b: DMatrix<T>, c: DMatrix<T>) -> Self {
        Self { a, b, c }
    }

    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    pub fn is_siso(&self) -> bool {
        self.inputs() == 1 && self.outputs() == 1
    }
}

/// Static coupling `v = L w + R u`, `y = S w + D u`.
#[derive(Clone, Debug, PartialEq)]
pub struct Interconnection<T: Real> {
    pub l: DMatrix<T>,
    pub r: DMatrix<T>,
    pub s: DMatrix<T>,
    pub d: DMatrix<T>,
}

impl<T: Real> Interconnection<T> {
    pub fn new(l: DMatrix<T>, r: DMatrix<T>, s: DMatrix<T>, d: DMatrix<T>) -> Self {
        Self { l, r, s, d }
    }

    /// External input count `m`.
    pub fn inputs(&self) -> usize {
        self.r.ncols()
    }

    /// External output count `p`.
    pub fn outputs(&self) -> usize {
        self.s.nrows()
    }

    /// The quadruple `(L, R, S, D)` read as a state-space system; its
    /// transfer function is the interconnection transfer function.
    pub fn as_state_space(&self) -> StateSpace<T> {
        StateSpace::new(self.l.clone(), self.r.clone(), self.s.clone(), self.d.clone())
    }
}

/// A real quadruple `(A, B, C, D)`.
#[derive(Clone, Debug, PartialEq)]
pub struct StateSpace<T: Real> {
    pub a: DMatrix<T>,
    pub b: DMatrix<T>,
    pub c: DMatrix<T>,
    pub d: DMatrix<T>,
}

impl<T: Real> StateSpace<T> {
    pub fn new(a: DMatrix<T>, b: DMatrix<T>, c: DMatrix<T>, d: DMatrix<T>) -> Self {
        Self { a, b, c, d }
    }

    pub fn states(&self) -> usize {
        self.a.nrows()
    }

    pub fn inputs(&self) -> usize {
        self.b.ncols()
    }

    pub fn outputs(&self) -> usize {
        self.c.nrows()
    }

    pub fn check_dimensions(&self) -> Result<()> {
        let (n, m, p) = (self.states(), self.inputs(), self.outputs());
        let ok = self.a.ncols() == n
            && self.b.nrows() == n
            && self.c.ncols() == n
            && self.d.nrows() == p
            && self.d.ncols() == m;
        if ok {
            Ok(())
        } else {
            Err(Error::Dimension(format!(
                "A {}×{}, B {}×{}, C {}×{}, D {}×{}",
                self.a.nrows(),
                self.a.ncols(),
                self.b.nrows(),
                self.b.ncols(),
                self.c.nrows(),
                self.c.ncols(),
                self.d.nrows(),
                self.d.ncols()
            )))
        }
    }

    /// `D + C (zI − A)^{-1} B`.
    pub fn transfer_at(&self, z: Cx<T>) -> Result<DMatrix<Cx<T>>> {
        self.transfer_at_with(z, Tolerances::default().pole_residual)
    }

    pub fn transfer_at_with(&self, z: Cx<T>, pole_tol: T) -> Result<DMatrix<Cx<T>>> {
        let x = linalg::resolvent_solve(&self.a, z, &to_complex(&self.b), pole_tol)?;
        Ok(to_complex(&self.d) + to_complex(&self.c) * x)
    }

    pub fn is_minimal(&self) -> Result<bool> {
        linalg::pbh_minimal(&self.a, &self.b, &self.c, T::lit(1e-8).max(T::eps().sqrt()))
    }
}

/// Block-diagonal node matrices `diag(A_i)`, `diag(B_i)`, `diag(C_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeMatrices<T: Real> {
    pub a: DMatrix<T>,
    pub b: DMatrix<T>,
    pub c: DMatrix<T>,
}

/// Closed-loop quadruple `(A + BLC, BR, SC, D)` with its state partition.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkRealization<T: Real> {
    pub system: StateSpace<T>,
    pub state_partition: Vec<usize>,
}

impl<T: Real> NetworkRealization<T> {
    pub fn agent_count(&self) -> usize {
        self.state_partition.len()
    }
}

/// One violated invariant of the agent/coupling data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// Offending block, e.g. `"coupling.L"` or `"agent 2"`.
    pub block: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.block, self.message)
    }
}

fn finite<T: Real>(m: &DMatrix<T>) -> bool {
    m.iter().all(|v| v.is_finite())
}

/// Checks dimensions, finiteness, and per-agent reachability/observability.
/// Returns every violation found; an empty list means the data is valid.
pub fn validate_network<T: Real>(agents: &[AgentSystem<T>], coupling: &Interconnection<T>) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |block: String, message: String| out.push(Violation { block, message });
    if agents.is_empty() {
        push("agents".into(), "at least one agent is required".into());
    }
    for (idx, ag) in agents.iter().enumerate() {
        let name = format!("agent {}", idx + 1);
        let n = ag.a.nrows();
        let mut dims_ok = true;
        if ag.a.ncols() != n {
            push(name.clone(), format!("A must be square, got {}×{}", n, ag.a.ncols()));
            dims_ok = false;
        }
        if ag.b.nrows() != n {
            push(name.clone(), format!("B must have {} rows, got {}", n, ag.b.nrows()));
            dims_ok = false;
        }
        if ag.c.ncols() != n {
            push(name.clone(), format!("C must have {} columns, got {}", n, ag.c.ncols()));
            dims_ok = false;
        }
        if !(finite(&ag.a) && finite(&ag.b) && finite(&ag.c)) {
            push(name.clone(), "entries must be finite".into());
            dims_ok = false;
        }
        if dims_ok {
            if !linalg::is_reachable(&ag.a, &ag.b) {
                push(name.clone(), format!("agent {} not reachable", idx + 1));
            }
            if !linalg::is_observable(&ag.a, &ag.c) {
                push(name.clone(), format!("agent {} not observable", idx + 1));
            }
        }
    }
    let m_bar: usize = agents.iter().map(|a| a.inputs()).sum();
    let p_bar: usize = agents.iter().map(|a| a.outputs()).sum();
    let m = coupling.r.ncols();
    let p = coupling.s.nrows();
    let expect = |name: &str, mat: &DMatrix<T>, rows: usize, cols: usize| {
        (mat.nrows() != rows || mat.ncols() != cols).then(|| {
            (
                format!("coupling.{name}"),
                format!("{name} must be {rows}×{cols}, got {}×{}", mat.nrows(), mat.ncols()),
            )
        })
    };
    let checks = [
        expect("L", &coupling.l, m_bar, p_bar),
        expect("R", &coupling.r, m_bar, m),
        expect("S", &coupling.s, p, p_bar),
        expect("D", &coupling.d, p, m),
    ];
    for (block, message) in checks.into_iter().flatten() {
        push(block, message);
    }
    for (name, mat) in [("L", &coupling.l), ("R", &coupling.r), ("S", &coupling.s), ("D", &coupling.d)] {
        if !finite(mat) {
            push(format!("coupling.{name}"), "entries must be finite".into());
        }
    }
    out
}

pub fn assemble_nodes<T: Real>(agents: &[AgentSystem<T>]) -> Result<NodeMatrices<T>> {
    if agents.is_empty() {
        return Err(Error::EmptyNetwork);
    }
    let a: Vec<_> = agents.iter().map(|ag| &ag.a).collect();
    let b: Vec<_> = agents.iter().map(|ag| &ag.b).collect();
    let c: Vec<_> = agents.iter().map(|ag| &ag.c).collect();
    Ok(NodeMatrices { a: linalg::block_diag(&a), b: linalg::block_diag(&b), c: linalg::block_diag(&c) })
}

/// Closed-loop realization `(A + B L C, B R, S C, D)`.
pub fn close_loop<T: Real>(agents: &[AgentSystem<T>], coupling: &Interconnection<T>) -> Result<NetworkRealization<T>> {
    let violations = validate_network(agents, coupling);
    if !violations.is_empty() {
        if agents.is_empty() {
            return Err(Error::EmptyNetwork);
        }
        return Err(Error::InvalidNetwork(violations.iter().map(|v| v.to_string()).collect()));
    }
    let nodes = assemble_nodes(agents)?;
    let a = &nodes.a + &nodes.b * &coupling.l * &nodes.c;
    let b = &nodes.b * &coupling.r;
    let c = &coupling.s * &nodes.c;
    Ok(NetworkRealization {
        system: StateSpace::new(a, b, c, coupling.d.clone()),
        state_partition: agents.iter().map(|ag| ag.states()).collect(),
    })
}

/// Network transfer function `Γ(z) = D + 𝐂 (zI − 𝐀)^{-1} 𝐁`.
pub fn network_transfer_eval<T: Real>(net: &NetworkRealization<T>, z: Cx<T>) -> Result<DMatrix<Cx<T>>> {
    net.system.transfer_at(z)
}

/// Interconnection transfer function `φ(η) = D + S (ηI − L)^{-1} R`.
pub fn interconnection_transfer_eval<T: Real>(coupling: &Interconnection<T>, eta: Cx<T>) -> Result<DMatrix<Cx<T>>> {
    coupling.as_state_space().transfer_at(eta)
}
