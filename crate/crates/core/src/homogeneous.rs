//! Homogeneous SISO networks: every node carries the same strictly proper
//! `g = p/q`, so network zeros follow from the zeros of the coupling
//! quadruple `(L, R, S, D)` through `h = q/p`.

use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, to_complex};
use crate::model::{close_loop, AgentSystem, Interconnection, NetworkRealization};
use crate::poly::ZeroCluster;
use crate::rational::{
    classify_agent, markov_tolerance, relative_degree, siso_from_statespace, AgentClass, Classification,
    RationalSiso, RelativeDegree,
};
use crate::scalar::{cx, cx_re, Cx, CxExt, Real};
use crate::zeros::{
    confirm_candidates, invariant_zeros, normal_rank, sampling_radius, sigma_ratio, snap_origin, Diagnostics,
    ZeroMethod, ZeroOptions, ZeroReport,
};

/// `N` copies of one SISO agent coupled by `(L, R, S, D)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousNetwork<T: Real> {
    pub agent: RationalSiso<T>,
    pub count: usize,
    pub coupling: Interconnection<T>,
}

impl<T: Real> HomogeneousNetwork<T> {
    pub fn new(agent: RationalSiso<T>, count: usize, coupling: Interconnection<T>) -> Result<Self> {
        if count == 0 {
            return Err(Error::EmptyNetwork);
        }
        let (m, p) = (coupling.inputs(), coupling.outputs());
        let mut bad = Vec::new();
        if coupling.l.shape() != (count, count) {
            bad.push(format!("coupling.L must be {count}×{count}, got {}×{}", coupling.l.nrows(), coupling.l.ncols()));
        }
        if coupling.r.nrows() != count {
            bad.push(format!("coupling.R must have {count} rows, got {}", coupling.r.nrows()));
        }
        if coupling.s.ncols() != count {
            bad.push(format!("coupling.S must have {count} columns, got {}", coupling.s.ncols()));
        }
        if coupling.d.shape() != (p, m) {
            bad.push(format!("coupling.D must be {p}×{m}, got {}×{}", coupling.d.nrows(), coupling.d.ncols()));
        }
        if !bad.is_empty() {
            return Err(Error::InvalidNetwork(bad));
        }
        Ok(Self { agent, count, coupling })
    }

    /// Recognizes a homogeneous network from explicit agents: every agent must
    /// be SISO with the same transfer function (coefficients equal to within
    /// `1e-8` relative).
    pub fn from_agents(agents: &[AgentSystem<T>], coupling: Interconnection<T>) -> Result<Self> {
        if agents.is_empty() {
            return Err(Error::EmptyNetwork);
        }
        let mut fractions = Vec::with_capacity(agents.len());
        for (i, ag) in agents.iter().enumerate() {
            if !ag.is_siso() {
                return Err(Error::NotApplicable(format!(
                    "agent {} is {}×{}; homogeneous analysis needs SISO agents",
                    i + 1,
                    ag.outputs(),
                    ag.inputs()
                )));
            }
            fractions.push(siso_from_statespace(&ag.a, &ag.b, &ag.c)?);
        }
        let reference = &fractions[0];
        let rel = T::lit(1e-8);
        for (i, g) in fractions.iter().enumerate().skip(1) {
            if !same_coefficients(reference, g, rel) {
                return Err(Error::NotApplicable(format!(
                    "agent {} has a different transfer function than agent 1; homogeneous analysis needs identical agents",
                    i + 1
                )));
            }
        }
        Self::new(fractions.swap_remove(0), agents.len(), coupling)
    }

    pub fn agent_degree(&self) -> usize {
        self.agent.degree()
    }

    /// Closed loop of `N` controllable-canonical copies of the agent.
    pub fn realize(&self) -> Result<NetworkRealization<T>> {
        let agent = self.agent.realize();
        let agents = vec![agent; self.count];
        close_loop(&agents, &self.coupling)
    }

    /// `[[q(z)I − p(z)L, −p(z)R], [S, D]]`, whose rank equals
    /// `rank Π_net(z) − N(n − 1)`.
    pub fn reduced_matrix(&self, z: Cx<T>) -> DMatrix<Cx<T>> {
        let n = self.count;
        let (m, p) = (self.coupling.inputs(), self.coupling.outputs());
        let (pz, qz) = (self.agent.num().eval(z), self.agent.den().eval(z));
        let mut out = DMatrix::zeros(n + p, n + m);
        let l = to_complex(&self.coupling.l);
        let r = to_complex(&self.coupling.r);
        out.view_mut((0, 0), (n, n)).copy_from(&(l * (-pz)));
        for i in 0..n {
            out[(i, i)] += qz;
        }
        out.view_mut((0, n), (n, m)).copy_from(&(r * (-pz)));
        out.view_mut((n, 0), (p, n)).copy_from(&to_complex(&self.coupling.s));
        out.view_mut((n, n), (p, m)).copy_from(&to_complex(&self.coupling.d));
        out
    }

    /// Sampling radius covering the agent poles, the coupling spectrum and
    /// the roots of `q − ηp` for moderate `η`.
    fn radius(&self) -> T {
        let coeffs = self.agent.den().max_coeff().max(self.agent.num().max_coeff());
        T::one() + coeffs + sampling_radius(&self.coupling.l)
    }
}

fn same_coefficients<T: Real>(a: &RationalSiso<T>, b: &RationalSiso<T>, rel: T) -> bool {
    let close = |x: &[Cx<T>], y: &[Cx<T>]| {
        let scale = T::one()
            + x.iter().chain(y.iter()).map(|c| c.norm()).fold(T::zero(), |acc, v| acc.max(v));
        let len = x.len().max(y.len());
        (0..len).all(|i| {
            let xi = x.get(i).copied().unwrap_or(cx_re(T::zero()));
            let yi = y.get(i).copied().unwrap_or(cx_re(T::zero()));
            (xi - yi).norm() <= rel * scale
        })
    };
    close(a.num().coeffs(), b.num().coeffs()) && close(a.den().coeffs(), b.den().coeffs())
}

/// Network zeros as h-preimages of interconnection zeros, plus the roots of
/// `p` when the coupling quadruple has a zero at infinity.
///
/// When the coupling pencil is square and regular, `det Π_net ∝ p^{N−d}·Π(q − η_k p)`
/// with `d` the number of finite coupling zeros, so each root of `p` is
/// reported `N − d` times; otherwise once.
pub fn homogeneous_zero_report<T: Real>(hn: &HomogeneousNetwork<T>, opts: &ZeroOptions<T>) -> Result<ZeroReport<T>> {
    let inter = invariant_zeros(&hn.coupling.as_state_space(), opts)?;
    let (m, p) = (hn.coupling.inputs(), hn.coupling.outputs());
    let mut notes = Vec::new();
    let p_multiplicity = if !inter.has_infinite_zero {
        0
    } else if m == p && inter.normal_rank_pencil == hn.count + m {
        hn.count.saturating_sub(inter.zero_count())
    } else {
        notes.push("coupling pencil is not square and regular; agent zeros reported once".to_string());
        1
    };
    let mut report = lift_zeros(
        hn,
        &inter.finite_zeros,
        p_multiplicity,
        inter.has_infinite_zero,
        inter.normal_rank_tf,
        ZeroMethod::HPreimage,
        opts,
    )?;
    if inter.has_infinite_zero && hn.agent.num().degree() == Some(0) {
        notes.push("coupling has a zero at infinity but p is constant, so it adds no finite zeros".to_string());
    }
    report.diagnostics.notes.extend(notes);
    Ok(report)
}

/// Builds the network report from coupling zeros `etas`, confirming each
/// candidate on the reduced matrix.
fn lift_zeros<T: Real>(
    hn: &HomogeneousNetwork<T>,
    etas: &[ZeroCluster<T>],
    p_multiplicity: usize,
    has_infinite_zero: bool,
    normal_rank_tf: usize,
    method: ZeroMethod,
    opts: &ZeroOptions<T>,
) -> Result<ZeroReport<T>> {
    let mut candidates = Vec::new();
    for eta in etas {
        let pre = hn.agent.h_preimage(eta.location)?;
        for _ in 0..eta.multiplicity {
            candidates.extend_from_slice(&pre);
        }
    }
    if p_multiplicity > 0 && hn.agent.num().degree().unwrap_or(0) > 0 {
        let roots = hn.agent.zeros()?;
        for _ in 0..p_multiplicity {
            candidates.extend_from_slice(&roots);
        }
    }
    let reduced_rank = normal_rank(|z| Ok(hn.reduced_matrix(z)), hn.radius(), opts.samples, opts.seed)?;
    let mut diagnostics = Diagnostics::new(method);
    let mut finite_zeros =
        confirm_candidates(&candidates, &opts.tol, &mut diagnostics, |z| sigma_ratio(&hn.reduced_matrix(z), reduced_rank));
    let has_origin_zero = snap_origin(&mut finite_zeros, opts.tol.cluster, &hn.reduced_matrix(cx_re(T::zero())), reduced_rank);
    Ok(ZeroReport {
        finite_zeros,
        normal_rank_pencil: hn.count * hn.agent_degree() + normal_rank_tf,
        normal_rank_tf,
        rank_feedthrough: linalg::numerical_rank(&hn.coupling.d),
        has_infinite_zero,
        has_origin_zero,
        diagnostics,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    MinimumPhase,
    NotMinimumPhase,
    /// Some zero lies within the boundary tolerance of the unit circle.
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::MinimumPhase => "minimum_phase",
            Verdict::NotMinimumPhase => "not_minimum_phase",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// Which argument produced the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VerdictReason {
    /// Lossless agent: network minimum phase iff coupling minimum phase.
    LosslessIff,
    /// Passive agent with minimum-phase coupling.
    PassiveCorollary,
    /// Read off the network zeros.
    Direct,
}

impl fmt::Display for VerdictReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictReason::LosslessIff => "lossless-iff",
            VerdictReason::PassiveCorollary => "passive-corollary",
            VerdictReason::Direct => "direct",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinimumPhaseReport<T: Real> {
    pub verdict: Verdict,
    pub reason: VerdictReason,
    pub classification: Classification<T>,
    pub interconnection: ZeroReport<T>,
    pub network: ZeroReport<T>,
    /// The verdict obtained from the network zeros alone.
    pub direct: Verdict,
}

/// Unit-circle test of a zero set; zeros with `||z| − 1| ≤ band` are inconclusive.
pub fn phase_of<T: Real>(zeros: &[ZeroCluster<T>], band: T) -> Verdict {
    if zeros.iter().any(|c| (c.location.norm() - T::one()).abs() <= band) {
        Verdict::Inconclusive
    } else if zeros.iter().all(|c| c.location.norm() < T::one()) {
        Verdict::MinimumPhase
    } else {
        Verdict::NotMinimumPhase
    }
}

/// Minimum-phase verdict for a homogeneous network with `D` of full row or
/// column rank. Lossless agents decide it from the coupling zeros in both
/// directions; passive agents only when the coupling is minimum phase.
pub fn minimum_phase_verdict<T: Real>(hn: &HomogeneousNetwork<T>, opts: &ZeroOptions<T>) -> Result<MinimumPhaseReport<T>> {
    let d = &hn.coupling.d;
    if linalg::numerical_rank(d) < d.nrows().min(d.ncols()) {
        return Err(Error::Hypothesis(
            "minimum-phase verdict needs D of full row or column rank (lossless/passive theorem)".into(),
        ));
    }
    let classification = classify_agent(&hn.agent, 256, T::lit(1e-6))?;
    let interconnection = invariant_zeros(&hn.coupling.as_state_space(), opts)?;
    let network = homogeneous_zero_report(hn, opts)?;
    let band = opts.tol.cluster;
    let coupling_phase = phase_of(&interconnection.finite_zeros, band);
    let direct = phase_of(&network.finite_zeros, band);
    let (verdict, reason) = match (classification.class, coupling_phase) {
        (AgentClass::Lossless, v) => (v, VerdictReason::LosslessIff),
        (AgentClass::Passive, Verdict::MinimumPhase) => (Verdict::MinimumPhase, VerdictReason::PassiveCorollary),
        _ => (direct, VerdictReason::Direct),
    };
    Ok(MinimumPhaseReport { verdict, reason, classification, interconnection, network, direct })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DesignReport {
    pub reachable: bool,
    pub observable: bool,
    pub relative_degree: RelativeDegree,
    pub zero_free: bool,
}

/// Zero-free design condition for a SISO coupling `(L, R, S, 0)`: `(L, R)`
/// reachable, `(L, S)` observable and `S(zI − L)^{-1}R` of relative degree `N`.
pub fn design_check<T: Real>(l: &DMatrix<T>, r: &DMatrix<T>, s: &DMatrix<T>) -> Result<DesignReport> {
    let relative_degree = relative_degree(l, r, s, markov_tolerance())?;
    let reachable = linalg::is_reachable(l, r);
    let observable = linalg::is_observable(l, s);
    let zero_free = reachable && observable && relative_degree == RelativeDegree::Finite(l.nrows());
    Ok(DesignReport { reachable, observable, relative_degree, zero_free })
}

/// First row `c` of `L = Circ(c)`, where row `i` is `c` rotated right by `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct CirculantSpec<T: Real> {
    pub c: Vec<T>,
}

impl<T: Real> CirculantSpec<T> {
    pub fn new(c: Vec<T>) -> Result<Self> {
        if c.is_empty() {
            return Err(Error::EmptyNetwork);
        }
        Ok(Self { c })
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        self.c.is_empty()
    }

    /// `L[i][j] = c[(j − i) mod N]`.
    pub fn matrix(&self) -> DMatrix<T> {
        let n = self.c.len();
        DMatrix::from_fn(n, n, |i, j| self.c[(j + n - i) % n])
    }

    /// Reads `c` off a circulant matrix; `None` if `l` is not circulant to
    /// within `rel·max|L|`.
    pub fn from_matrix(l: &DMatrix<T>, rel: T) -> Option<Self> {
        let n = l.nrows();
        if n == 0 || l.ncols() != n {
            return None;
        }
        let c: Vec<T> = (0..n).map(|j| l[(0, j)]).collect();
        let spec = Self { c };
        let scale = l.amax().max(T::one());
        ((spec.matrix() - l).amax() <= rel * scale).then_some(spec)
    }
}

/// Unitary, symmetric `Φ[j][k] = ω^{jk}/√N` with `ω = e^{2πi/N}`.
pub fn fourier_matrix<T: Real>(n: usize) -> DMatrix<Cx<T>> {
    let scale = T::one() / T::from_usize(n).unwrap().sqrt();
    DMatrix::from_fn(n, n, |j, k| {
        let theta = 2.0 * std::f64::consts::PI * ((j * k) % n) as f64 / n as f64;
        cx(T::lit(theta.cos()), T::lit(theta.sin())) * scale
    })
}

/// `λ_k = Σ_j c_j ω^{kj}`, so that `Circ(c) = Φ diag(λ) Φ*`.
pub fn circulant_eigenvalues<T: Real>(spec: &CirculantSpec<T>) -> Vec<Cx<T>> {
    let n = spec.len();
    (0..n)
        .map(|k| {
            spec.c.iter().enumerate().fold(cx_re(T::zero()), |acc, (j, &cj)| {
                let theta = 2.0 * std::f64::consts::PI * ((k * j) % n) as f64 / n as f64;
                acc + cx(T::lit(theta.cos()), T::lit(theta.sin())) * cj
            })
        })
        .collect()
}

/// `‖Φ* Circ(c) Φ − diag(λ)‖_F`.
pub fn diagonalization_residual<T: Real>(spec: &CirculantSpec<T>) -> T {
    let phi = fourier_matrix::<T>(spec.len());
    let mut d = phi.adjoint() * to_complex(&spec.matrix()) * &phi;
    for (k, lambda) in circulant_eigenvalues(spec).into_iter().enumerate() {
        d[(k, k)] -= lambda;
    }
    d.iter().fold(T::zero(), |acc, v| acc + v.norm_sqr()).sqrt()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CirculantZeros<T: Real> {
    /// `λ_k`, the diagonal of `Φ* L Φ`.
    pub eigenvalues: Vec<Cx<T>>,
    /// Coupling zeros `w_k`, eigenvalues of `diag(λ) − Φ* R D^{-1} S Φ`.
    pub w: Vec<Cx<T>>,
    pub report: ZeroReport<T>,
}

/// Zeros of a circulant homogeneous network with `D` square and invertible:
/// the roots of `q − w_k p` over all `w_k`.
pub fn circulant_zero_report<T: Real>(
    g: &RationalSiso<T>,
    spec: &CirculantSpec<T>,
    r: &DMatrix<T>,
    s: &DMatrix<T>,
    d: &DMatrix<T>,
    opts: &ZeroOptions<T>,
) -> Result<CirculantZeros<T>> {
    let n = spec.len();
    if d.nrows() != d.ncols() || linalg::numerical_rank(d) < d.nrows() {
        return Err(Error::Hypothesis(format!(
            "circulant theorem needs D square and of full rank, got {}×{} of rank {}",
            d.nrows(),
            d.ncols(),
            linalg::numerical_rank(d)
        )));
    }
    let hn = HomogeneousNetwork::new(g.clone(), n, Interconnection::new(spec.matrix(), r.clone(), s.clone(), d.clone()))?;
    let d_inv = d.clone().try_inverse().ok_or_else(|| Error::Hypothesis("D is singular".into()))?;
    let phi = fourier_matrix::<T>(n);
    let eigenvalues = circulant_eigenvalues(spec);
    let mut reduced = -(phi.adjoint() * to_complex(&(r * d_inv * s)) * &phi);
    for (k, lambda) in eigenvalues.iter().enumerate() {
        reduced[(k, k)] += *lambda;
    }
    let w = linalg::eigenvalues_c(reduced)?;
    let etas: Vec<ZeroCluster<T>> = w.iter().map(|&location| ZeroCluster { location, multiplicity: 1 }).collect();
    let m = d.ncols();
    let report = lift_zeros(&hn, &etas, 0, false, m, ZeroMethod::Circulant, opts)?;
    Ok(CirculantZeros { eigenvalues, w, report })
}
