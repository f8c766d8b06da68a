//! Seeded random instance generators for sweeps and property checks.
//!
//! Every generator draws from a caller-supplied [`ChaCha8Rng`], so a corpus is
//! reproducible from its seed alone.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::homogeneous::{design_check, CirculantSpec, HomogeneousNetwork};
use crate::linalg;
use crate::model::{close_loop, AgentSystem, Interconnection};
use crate::poly::Polynomial;
use crate::rational::{RationalSiso, RelativeDegree};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries uniform in `[-1, 1]`.
pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.gen_range(-1.0..1.0))
}

fn signed(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let v = rng.gen_range(lo..hi);
    if rng.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

/// `degree` roots closed under conjugation, each with modulus in `[lo, hi]`
/// and pairwise at least `gap` apart from each other and from `avoid`.
pub fn random_roots(rng: &mut ChaCha8Rng, degree: usize, lo: f64, hi: f64, gap: f64, avoid: &[Complex<f64>]) -> Vec<Complex<f64>> {
    'retry: loop {
        let mut roots: Vec<Complex<f64>> = Vec::with_capacity(degree);
        while roots.len() < degree {
            let r = rng.gen_range(lo..hi);
            if degree - roots.len() >= 2 && rng.gen_bool(0.5) {
                let theta = rng.gen_range(0.2..(std::f64::consts::PI - 0.2));
                let z = Complex::from_polar(r, theta);
                roots.push(z);
                roots.push(z.conj());
            } else {
                roots.push(Complex::new(if rng.gen_bool(0.5) { r } else { -r }, 0.0));
            }
        }
        for (i, a) in roots.iter().enumerate() {
            let others = roots[..i].iter().chain(avoid.iter());
            if others.into_iter().any(|b| (a - b).norm() < gap) {
                continue 'retry;
            }
        }
        return roots;
    }
}

fn real_poly(roots: &[Complex<f64>], lead: f64) -> Polynomial<f64> {
    Polynomial::from_roots(roots).scale(Complex::new(lead, 0.0)).real_part()
}

/// Strictly proper agent of the given McMillan degree with poles of modulus
/// at most `1.2` and a numerator of random degree below it.
pub fn random_agent(rng: &mut ChaCha8Rng, degree: usize) -> RationalSiso<f64> {
    let degree = degree.max(1);
    loop {
        let poles = random_roots(rng, degree, 0.1, 1.2, 0.1, &[]);
        let num_degree = rng.gen_range(0..degree);
        let zeros = random_roots(rng, num_degree, 0.1, 1.5, 0.1, &poles);
        let lead = signed(rng, 0.5, 2.0);
        if let Ok(g) = RationalSiso::new(real_poly(&zeros, lead), real_poly(&poles, 1.0)) {
            return g;
        }
    }
}

/// Agent `c/q(z)` without finite zeros.
pub fn pole_only_agent(rng: &mut ChaCha8Rng, degree: usize) -> RationalSiso<f64> {
    let poles = random_roots(rng, degree.max(1), 0.0, 1.2, 0.1, &[]);
    let lead = signed(rng, 0.5, 2.0);
    RationalSiso::new(Polynomial::constant(Complex::new(lead, 0.0)), real_poly(&poles, 1.0)).expect("no common roots")
}

/// Lossless agent `(1/z)·Π (1 − ā z)/(z − a)` over one or two real poles or
/// conjugate pairs `a` with `0.2 ≤ |a| ≤ 0.9`.
pub fn lossless_agent(rng: &mut ChaCha8Rng) -> RationalSiso<f64> {
    let count = rng.gen_range(1..=2);
    let poles = random_roots(rng, count, 0.2, 0.9, 0.05, &[]);
    let mirrored: Vec<Complex<f64>> = poles.iter().map(|a| Complex::new(1.0, 0.0) / a.conj()).collect();
    // Π(1 − ā z) = Π(−ā)·Π(z − 1/ā)
    let scale = poles.iter().fold(Complex::new(1.0, 0.0), |acc, a| acc * (-a.conj())).re;
    let mut den_roots = poles.clone();
    den_roots.push(Complex::new(0.0, 0.0));
    RationalSiso::new(real_poly(&mirrored, scale), real_poly(&den_roots, 1.0)).expect("lossless factors are coprime")
}

/// Stable agent scaled so that `max |g|` on the unit circle is `0.9`.
pub fn passive_agent(rng: &mut ChaCha8Rng, degree: usize) -> RationalSiso<f64> {
    let degree = degree.max(1);
    loop {
        let poles = random_roots(rng, degree, 0.1, 0.8, 0.1, &[]);
        let num_degree = rng.gen_range(0..degree);
        let zeros = random_roots(rng, num_degree, 0.1, 1.5, 0.1, &poles);
        let p = real_poly(&zeros, 1.0);
        let q = real_poly(&poles, 1.0);
        let peak = (0..4096)
            .map(|k| {
                let z = Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / 4096.0);
                (p.eval(z) / q.eval(z)).norm()
            })
            .fold(0.0, f64::max);
        if peak < 1e-6 {
            continue;
        }
        if let Ok(g) = RationalSiso::new(p.scale(Complex::new(0.9 / peak, 0.0)).real_part(), q) {
            return g;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Feedthrough {
    Zero,
    /// `I + 0.3·U`, well conditioned.
    Invertible,
    /// Outer product of two vectors with dyadic entries, exactly rank one.
    RankOne,
}

pub fn random_feedthrough(rng: &mut ChaCha8Rng, p: usize, m: usize, kind: Feedthrough) -> DMatrix<f64> {
    match kind {
        Feedthrough::Zero => DMatrix::zeros(p, m),
        Feedthrough::Invertible => {
            let mut d = random_matrix(rng, p, m) * 0.3;
            for i in 0..p.min(m) {
                d[(i, i)] += 1.0;
            }
            d
        }
        Feedthrough::RankOne => {
            let mut dyadic = |len: usize| {
                DMatrix::from_fn(len, 1, |_, _| {
                    let k: i32 = rng.gen_range(1..=8);
                    let s = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
                    s * k as f64 / 4.0
                })
            };
            let u = dyadic(p);
            let v = dyadic(m);
            u * v.transpose()
        }
    }
}

/// Homogeneous network with `N ≤ 4`, agent degree `≤ 3` and square `m = p ≤ min(2, N)`.
pub fn homogeneous_instance(rng: &mut ChaCha8Rng) -> (HomogeneousNetwork<f64>, Feedthrough) {
    let n = rng.gen_range(1..=4);
    let degree = rng.gen_range(1..=3);
    let agent = random_agent(rng, degree);
    let io = if n >= 2 && rng.gen_bool(0.3) { 2 } else { 1 };
    let kinds: &[Feedthrough] = if io == 2 {
        &[Feedthrough::Zero, Feedthrough::Invertible, Feedthrough::RankOne]
    } else {
        &[Feedthrough::Zero, Feedthrough::Invertible]
    };
    let kind = kinds[rng.gen_range(0..kinds.len())];
    let coupling = Interconnection::new(
        random_matrix(rng, n, n),
        random_matrix(rng, n, io),
        random_matrix(rng, io, n),
        random_feedthrough(rng, io, io, kind),
    );
    (HomogeneousNetwork::new(agent, n, coupling).expect("consistent dimensions"), kind)
}

/// Circulant homogeneous instance with invertible square `D`.
#[derive(Clone, Debug)]
pub struct CirculantCase {
    pub agent: RationalSiso<f64>,
    pub spec: CirculantSpec<f64>,
    pub r: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub d: DMatrix<f64>,
}

impl CirculantCase {
    pub fn network(&self) -> HomogeneousNetwork<f64> {
        let coupling = Interconnection::new(self.spec.matrix(), self.r.clone(), self.s.clone(), self.d.clone());
        HomogeneousNetwork::new(self.agent.clone(), self.spec.len(), coupling).expect("consistent dimensions")
    }
}

pub fn circulant_instance(rng: &mut ChaCha8Rng) -> CirculantCase {
    let n = rng.gen_range(2..=5);
    let degree = rng.gen_range(1..=3);
    let agent = random_agent(rng, degree);
    let io = if rng.gen_bool(0.3) { 2 } else { 1 };
    let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    CirculantCase {
        agent,
        spec: CirculantSpec::new(c).expect("nonempty"),
        r: random_matrix(rng, n, io),
        s: random_matrix(rng, io, n),
        d: random_feedthrough(rng, io, io, Feedthrough::Invertible),
    }
}

/// Random minimal MIMO agent.
pub fn random_mimo_agent(rng: &mut ChaCha8Rng, states: usize, inputs: usize, outputs: usize) -> AgentSystem<f64> {
    loop {
        let a = random_matrix(rng, states, states) * (1.0 / (states as f64).sqrt());
        let b = random_matrix(rng, states, inputs);
        let c = random_matrix(rng, outputs, states);
        if linalg::is_reachable(&a, &b) && linalg::is_observable(&a, &c) {
            return AgentSystem::new(a, b, c);
        }
    }
}

/// Heterogeneous network with at most `max_states` states, square external
/// dimensions `m = p ≤ min(m̄, p̄, 2)` and a minimal closed loop.
pub fn heterogeneous_network(rng: &mut ChaCha8Rng, max_states: usize) -> (Vec<AgentSystem<f64>>, Interconnection<f64>) {
    loop {
        let count = rng.gen_range(1..=3);
        let mut agents = Vec::with_capacity(count);
        let mut budget = max_states;
        for i in 0..count {
            let remaining = count - i - 1;
            let cap = (budget - remaining).clamp(1, 3);
            let n = rng.gen_range(1..=cap);
            budget -= n;
            let io = if rng.gen_bool(0.3) { 2 } else { 1 };
            agents.push(random_mimo_agent(rng, n, io, io));
        }
        let m_bar: usize = agents.iter().map(|a| a.inputs()).sum();
        let io = if m_bar >= 2 && rng.gen_bool(0.4) { 2 } else { 1 };
        let kinds: &[Feedthrough] = if io == 2 {
            &[Feedthrough::Zero, Feedthrough::Invertible, Feedthrough::RankOne]
        } else {
            &[Feedthrough::Zero, Feedthrough::Invertible]
        };
        let kind = kinds[rng.gen_range(0..kinds.len())];
        let coupling = Interconnection::new(
            random_matrix(rng, m_bar, m_bar) * 0.5,
            random_matrix(rng, m_bar, io),
            random_matrix(rng, io, m_bar),
            random_feedthrough(rng, io, io, kind),
        );
        let Ok(net) = close_loop(&agents, &coupling) else { continue };
        if net.system.is_minimal().unwrap_or(false) {
            return (agents, coupling);
        }
    }
}

/// SISO coupling `(L, R, S, D)` with scalar `D ≠ 0` whose zeros are the
/// eigenvalues of a random matrix with spectral radius `radius`:
/// `L = M + R D^{-1} S`.
pub fn coupling_with_zero_radius(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Interconnection<f64> {
    let mut m = random_matrix(rng, n, n);
    let rho = linalg::spectral_radius(&m);
    if rho > 1e-9 {
        m *= radius / rho;
    } else {
        m = DMatrix::identity(n, n) * radius;
    }
    let r = random_matrix(rng, n, 1);
    let s = random_matrix(rng, 1, n);
    let d = signed(rng, 0.5, 2.0);
    let l = m + &r * &s * (1.0 / d);
    Interconnection::new(l, r, s, DMatrix::from_element(1, 1, d))
}

/// Chain coupling: `L` the upper shift, `R = e_N`, `S = e_1ᵀ`, so that
/// `S(zI − L)^{-1}R = z^{-N}`.
pub fn chain_coupling(n: usize) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let mut l = DMatrix::zeros(n, n);
    for i in 0..n.saturating_sub(1) {
        l[(i, i + 1)] = 1.0;
    }
    let mut r = DMatrix::zeros(n, 1);
    r[(n - 1, 0)] = 1.0;
    let mut s = DMatrix::zeros(1, n);
    s[(0, 0)] = 1.0;
    (l, r, s)
}

/// Reachable and observable SISO `(L, R, S)` of size `n` whose transfer
/// function has relative degree exactly `target` (`1 ≤ target ≤ n`).
pub fn coupling_with_relative_degree(rng: &mut ChaCha8Rng, n: usize, target: usize) -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    loop {
        let l = random_matrix(rng, n, n);
        let r = random_matrix(rng, n, 1);
        let mut s = random_matrix(rng, 1, n);
        if target > 1 {
            let mut krylov = DMatrix::zeros(n, target - 1);
            let mut v = r.clone();
            for j in 0..target - 1 {
                krylov.set_column(j, &v.column(0));
                v = &l * v;
            }
            let q = krylov.qr().q();
            s = &s - (&s * &q) * q.transpose();
        }
        let Ok(report) = design_check(&l, &r, &s) else { continue };
        if report.reachable && report.observable && report.relative_degree == RelativeDegree::Finite(target) {
            return (l, r, s);
        }
    }
}
