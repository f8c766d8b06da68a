//! SISO rational-function machinery: coprime fractions from state space, the
//! h-preimage map, lossless/passive classification and relative degree.

use std::f64::consts::PI;
use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, to_complex};
use crate::model::AgentSystem;
use crate::poly::{circle_points, interpolate_on_circle, Polynomial};
use crate::scalar::{cx, cx_re, Cx, CxExt, Real, Tolerances};

/// Strictly proper `g = p/q` with `q` monic and `p`, `q` coprime.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalSiso<T: Real> {
    num: Polynomial<T>,
    den: Polynomial<T>,
}

impl<T: Real> RationalSiso<T> {
    /// Builds `p/q` from real ascending coefficients, normalizing `q` to be monic.
    pub fn from_coeffs(num: &[T], den: &[T]) -> Result<Self> {
        Self::new(Polynomial::from_real(num), Polynomial::from_real(den))
    }

    pub fn new(num: Polynomial<T>, den: Polynomial<T>) -> Result<Self> {
        Self::with_tolerance(num, den, Tolerances::default().coprime)
    }

    pub fn with_tolerance(num: Polynomial<T>, den: Polynomial<T>, coprime_tol: T) -> Result<Self> {
        if !num.is_real() || !den.is_real() {
            return Err(Error::Dimension("transfer function coefficients must be real".into()));
        }
        let Some(dq) = den.degree() else {
            return Err(Error::ZeroPolynomial);
        };
        let Some(dp) = num.degree() else {
            return Err(Error::NotMinimal("numerator is identically zero".into()));
        };
        if dp >= dq {
            return Err(Error::Dimension(format!(
                "g must be strictly proper, got deg p = {dp} ≥ deg q = {dq}"
            )));
        }
        let lead = den.leading();
        let num = num.scale(cx_re(T::one()) / lead).real_part();
        let den = den.monic().real_part();
        let zp = num.roots()?;
        let zq = den.roots()?;
        for a in &zp {
            for b in &zq {
                if (a - b).norm() <= coprime_tol {
                    return Err(Error::NotMinimal(format!(
                        "numerator and denominator share the root {:.6}{:+.6}i",
                        b.re, b.im
                    )));
                }
            }
        }
        Ok(Self { num, den })
    }

    /// Numerator `p`.
    pub fn num(&self) -> &Polynomial<T> {
        &self.num
    }

    /// Monic denominator `q`.
    pub fn den(&self) -> &Polynomial<T> {
        &self.den
    }

    /// McMillan degree `n = deg q`.
    pub fn degree(&self) -> usize {
        self.den.degree().unwrap_or(0)
    }

    pub fn eval(&self, z: Cx<T>) -> Cx<T> {
        self.num.eval(z) / self.den.eval(z)
    }

    /// `h(z) = q(z)/p(z)`.
    pub fn eval_inverse(&self, z: Cx<T>) -> Cx<T> {
        self.den.eval(z) / self.num.eval(z)
    }

    pub fn poles(&self) -> Result<Vec<Cx<T>>> {
        self.den.roots()
    }

    /// Finite zeros of the agent (roots of `p`).
    pub fn zeros(&self) -> Result<Vec<Cx<T>>> {
        self.num.roots()
    }

    /// Controllable canonical realization, minimal because `p`, `q` are coprime.
    pub fn realize(&self) -> AgentSystem<T> {
        let n = self.degree();
        let q = self.den.real_coeffs();
        let p = self.num.real_coeffs();
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n.saturating_sub(1) {
            a[(i, i + 1)] = T::one();
        }
        for j in 0..n {
            a[(n - 1, j)] = -q[j];
        }
        let mut b = DMatrix::zeros(n, 1);
        b[(n - 1, 0)] = T::one();
        let mut c = DMatrix::zeros(1, n);
        for (j, &pj) in p.iter().enumerate() {
            c[(0, j)] = pj;
        }
        AgentSystem::new(a, b, c)
    }

    /// All `z` with `h(z) = η`, i.e. the roots of `q − η p`; exactly `deg q` of them.
    pub fn h_preimage(&self, eta: Cx<T>) -> Result<Vec<Cx<T>>> {
        (&self.den - &self.num.scale(eta)).roots()
    }

    pub fn classify(&self, grid_size: usize, tol: T) -> Result<Classification<T>> {
        classify_agent(self, grid_size, tol)
    }
}

/// Coprime fraction of a minimal SISO realization.
///
/// `q` is `det(zI − A)` and `p = q·c(zI − A)^{-1}b`, both interpolated from
/// `n + 1` samples on the circle of radius `1 + ‖A‖_F`.
pub fn siso_from_statespace<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>, c: &DMatrix<T>) -> Result<RationalSiso<T>> {
    let n = a.nrows();
    if a.ncols() != n || b.shape() != (n, 1) || c.shape() != (1, n) {
        return Err(Error::Dimension(format!(
            "expected SISO (A n×n, b n×1, c 1×n), got A {:?}, b {:?}, c {:?}",
            a.shape(),
            b.shape(),
            c.shape()
        )));
    }
    if n == 0 {
        return Err(Error::NotMinimal("agent has no states".into()));
    }
    let tol = Tolerances::<T>::default();
    let radius = T::one() + a.norm();
    let pts = circle_points(n + 1, radius);
    let bc = to_complex(b);
    let cc = to_complex(c);
    let mut qv = Vec::with_capacity(n + 1);
    let mut pv = Vec::with_capacity(n + 1);
    for &z in &pts {
        let mut m = -to_complex(a);
        for i in 0..n {
            m[(i, i)] += z;
        }
        let det = m.clone().lu().determinant();
        let x = linalg::resolvent_solve(a, z, &bc, tol.pole_residual)?;
        let g = (&cc * x)[(0, 0)];
        qv.push(det);
        pv.push(det * g);
    }
    let inv = cx_re(T::one() / radius);
    let q = Polynomial::new(interpolate_on_circle(&qv)).compose_scale(inv).real_part();
    let mut p_scaled = interpolate_on_circle(&pv);
    p_scaled.truncate(n);
    let p = Polynomial::new(p_scaled).trimmed(tol.degree).compose_scale(inv).real_part();
    RationalSiso::new(p, q)
}

/// Outcome of [`classify_agent`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AgentClass {
    Lossless,
    Passive,
    Neither,
}

impl fmt::Display for AgentClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AgentClass::Lossless => "lossless",
            AgentClass::Passive => "passive",
            AgentClass::Neither => "neither",
        })
    }
}

/// Point certifying that a classification condition failed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Witness<T: Real> {
    Pole(Cx<T>),
    GridPoint { z: Cx<T>, modulus: T },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Classification<T: Real> {
    pub class: AgentClass,
    /// For `Passive`, why losslessness failed; for `Neither`, why passivity failed.
    pub witness: Option<Witness<T>>,
}

/// Lossless: every pole in `|z| < 1 − tol` and `||g| − 1| ≤ tol` on the grid.
/// Passive: every pole in `|z| ≤ 1 + tol` and `|g| ≤ 1 + tol` on the grid.
/// The unit circle is sampled at `grid_size ≥ 16` equispaced points.
pub fn classify_agent<T: Real>(g: &RationalSiso<T>, grid_size: usize, tol: T) -> Result<Classification<T>> {
    let grid_size = grid_size.max(16);
    let poles = g.poles()?;
    let samples: Vec<(Cx<T>, T)> = (0..grid_size)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / grid_size as f64;
            let z = cx(T::lit(theta.cos()), T::lit(theta.sin()));
            let q = g.den.eval(z);
            let modulus = if q.norm() == T::zero() {
                T::max_value().unwrap_or(T::lit(f64::MAX))
            } else {
                (g.num.eval(z) / q).norm()
            };
            (z, modulus)
        })
        .collect();

    let lossless_fail = poles
        .iter()
        .find(|r| r.norm() >= T::one() - tol)
        .map(|&r| Witness::Pole(r))
        .or_else(|| {
            samples
                .iter()
                .find(|(_, m)| (*m - T::one()).abs() > tol)
                .map(|&(z, modulus)| Witness::GridPoint { z, modulus })
        });
    let passive_fail = poles
        .iter()
        .find(|r| r.norm() > T::one() + tol)
        .map(|&r| Witness::Pole(r))
        .or_else(|| {
            samples
                .iter()
                .find(|(_, m)| *m > T::one() + tol)
                .map(|&(z, modulus)| Witness::GridPoint { z, modulus })
        });
    Ok(match (lossless_fail, passive_fail) {
        (None, _) => Classification { class: AgentClass::Lossless, witness: None },
        (Some(w), None) => Classification { class: AgentClass::Passive, witness: Some(w) },
        (Some(_), Some(w)) => Classification { class: AgentClass::Neither, witness: Some(w) },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelativeDegree {
    Finite(usize),
    Infinite,
}

impl fmt::Display for RelativeDegree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RelativeDegree::Finite(k) => write!(f, "{k}"),
            RelativeDegree::Infinite => f.write_str("infinite"),
        }
    }
}

/// Default relative threshold for Markov-parameter tests.
pub fn markov_tolerance<T: Real>() -> T {
    T::lit(1e-10).max(T::eps() * T::lit(100.0))
}

/// Index of the first Markov parameter `S L^{k-1} R` that is nonzero
/// relative to `tol·‖S‖‖L‖^{k-1}‖R‖`, searched over `k = 1..=N`.
pub fn relative_degree<T: Real>(l: &DMatrix<T>, r: &DMatrix<T>, s: &DMatrix<T>, tol: T) -> Result<RelativeDegree> {
    let n = l.nrows();
    if l.ncols() != n || r.shape() != (n, 1) || s.shape() != (1, n) {
        return Err(Error::Dimension(format!(
            "relative degree needs SISO (L N×N, R N×1, S 1×N), got L {:?}, R {:?}, S {:?}",
            l.shape(),
            r.shape(),
            s.shape()
        )));
    }
    let (ns, nl, nr) = (s.norm(), l.norm(), r.norm());
    let mut v = r.clone();
    let mut lpow = T::one();
    for k in 1..=n {
        let markov = (s * &v)[(0, 0)];
        if markov.abs() > tol * ns * lpow * nr {
            return Ok(RelativeDegree::Finite(k));
        }
        v = l * v;
        lpow *= nl;
    }
    Ok(RelativeDegree::Infinite)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, cols, v)
    }

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn double_delay_fraction() {
        let g = siso_from_statespace(&m(2, 2, &[0.0, 1.0, 0.0, 0.0]), &m(2, 1, &[0.0, 1.0]), &m(1, 2, &[1.0, 0.0]))
            .unwrap();
        assert!(close(&g.num().real_coeffs(), &[1.0], 1e-14));
        assert!(close(&g.den().real_coeffs(), &[0.0, 0.0, 1.0], 1e-14));
    }

    #[test]
    fn first_order_lag() {
        let g = siso_from_statespace(&m(1, 1, &[0.5]), &m(1, 1, &[1.0]), &m(1, 1, &[1.0])).unwrap();
        assert!(close(&g.num().real_coeffs(), &[1.0], 1e-14));
        assert!(close(&g.den().real_coeffs(), &[-0.5, 1.0], 1e-14));
    }

    #[test]
    fn non_minimal_realization_is_rejected() {
        // mode at 2 is unobservable
        let err = siso_from_statespace(&m(2, 2, &[1.0, 0.0, 0.0, 2.0]), &m(2, 1, &[1.0, 1.0]), &m(1, 2, &[1.0, 0.0]))
            .unwrap_err();
        assert!(matches!(err, Error::NotMinimal(_)), "{err:?}");
    }

    #[test]
    fn improper_fraction_is_rejected() {
        assert!(RationalSiso::<f64>::from_coeffs(&[1.0, 1.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn realize_round_trips() {
        let g = RationalSiso::from_coeffs(&[-2.0, 1.0], &[0.1, 0.3, 1.0]).unwrap();
        let ag = g.realize();
        let back = siso_from_statespace(&ag.a, &ag.b, &ag.c).unwrap();
        assert!(close(&back.num().real_coeffs(), &g.num().real_coeffs(), 1e-12));
        assert!(close(&back.den().real_coeffs(), &g.den().real_coeffs(), 1e-12));
    }

    #[test]
    fn h_preimage_double_delay() {
        let g = RationalSiso::from_coeffs(&[1.0], &[0.0, 0.0, 1.0]).unwrap();
        let mut one: Vec<f64> = g.h_preimage(cx_re(1.0)).unwrap().iter().map(|z| z.re).collect();
        one.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!(close(&one, &[-1.0, 1.0], 1e-14));
        assert_eq!(g.h_preimage(cx_re(0.0)).unwrap(), vec![cx_re(0.0), cx_re(0.0)]);
        let mut neg = g.h_preimage(cx_re(-1.0)).unwrap();
        neg.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((neg[0] - cx(0.0, -1.0)).norm() < 1e-14 && (neg[1] - cx(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn classification_examples() {
        let delay = RationalSiso::from_coeffs(&[1.0], &[0.0, 1.0]).unwrap();
        assert_eq!(delay.classify(256, 1e-6).unwrap().class, AgentClass::Lossless);

        let lag = RationalSiso::from_coeffs(&[1.0], &[-0.5, 1.0]).unwrap();
        let c = lag.classify(256, 1e-6).unwrap();
        assert_eq!(c.class, AgentClass::Neither);
        match c.witness {
            Some(Witness::GridPoint { z, modulus }) => {
                assert!((z - cx_re(1.0)).norm() < 1e-12);
                assert!((modulus - 2.0f64).abs() < 1e-12);
            }
            other => panic!("unexpected witness {other:?}"),
        }

        let half = RationalSiso::from_coeffs(&[0.5], &[0.0, 1.0]).unwrap();
        assert_eq!(half.classify(256, 1e-6).unwrap().class, AgentClass::Passive);
    }

    #[test]
    fn relative_degree_examples() {
        let rd = relative_degree(&m(2, 2, &[0.0, 1.0, 0.0, 0.0]), &m(2, 1, &[0.0, 1.0]), &m(1, 2, &[1.0, 0.0]), 1e-10);
        assert_eq!(rd.unwrap(), RelativeDegree::Finite(2));
        let rd = relative_degree(&m(1, 1, &[0.0]), &m(1, 1, &[1.0]), &m(1, 1, &[1.0]), 1e-10);
        assert_eq!(rd.unwrap(), RelativeDegree::Finite(1));
        let rd = relative_degree(&m(2, 2, &[1.0, 0.0, 0.0, 1.0]), &m(2, 1, &[1.0, 0.0]), &m(1, 2, &[0.0, 1.0]), 1e-10);
        assert_eq!(rd.unwrap(), RelativeDegree::Infinite);
    }
}
