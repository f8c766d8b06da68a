//! Univariate polynomials with complex coefficients, root finding via
//! balanced companion matrices, and interpolation on scaled roots of unity.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{cx, cx_re, Cx, CxExt, Real};

/// Polynomial `Σ c_k z^k` with ascending coefficients. Highest coefficients
/// that are exactly zero are stripped, so `degree()` is exact.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<T: Real> {
    coeffs: Vec<Cx<T>>,
}

impl<T: Real> Polynomial<T> {
    pub fn new(mut coeffs: Vec<Cx<T>>) -> Self {
        while coeffs.last().is_some_and(|c| c.re == T::zero() && c.im == T::zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[T]) -> Self {
        Self::new(coeffs.iter().map(|&c| cx_re(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Cx<T>) -> Self {
        Self::new(vec![c])
    }

    pub fn one() -> Self {
        Self::constant(cx_re(T::one()))
    }

    /// `z − a`.
    pub fn linear(a: Cx<T>) -> Self {
        Self::new(vec![-a, cx_re(T::one())])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Cx<T>]) -> Self {
        roots.iter().fold(Self::one(), |acc, &r| &acc * &Self::linear(r))
    }

    pub fn coeffs(&self) -> &[Cx<T>] {
        &self.coeffs
    }

    /// Real parts of the coefficients.
    pub fn real_coeffs(&self) -> Vec<T> {
        self.coeffs.iter().map(|c| c.re).collect()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_real(&self) -> bool {
        self.coeffs.iter().all(|c| c.im == T::zero())
    }

    pub fn leading(&self) -> Cx<T> {
        self.coeffs.last().copied().unwrap_or_else(|| cx_re(T::zero()))
    }

    /// Largest coefficient modulus.
    pub fn max_coeff(&self) -> T {
        self.coeffs.iter().map(|c| c.norm()).fold(T::zero(), |a, b| a.max(b))
    }

    pub fn eval(&self, z: Cx<T>) -> Cx<T> {
        self.coeffs.iter().rev().fold(cx_re(T::zero()), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * T::from_usize(k).unwrap())
                .collect(),
        )
    }

    pub fn scale(&self, s: Cx<T>) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Divides through by the leading coefficient. The zero polynomial is returned unchanged.
    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let lead = self.leading();
        let mut out: Vec<Cx<T>> = self.coeffs.iter().map(|&c| c / lead).collect();
        *out.last_mut().unwrap() = cx_re(T::one());
        Self { coeffs: out }
    }

    /// Drops highest-order coefficients whose modulus is at most `rel_tol·max|c|`.
    pub fn trimmed(&self, rel_tol: T) -> Self {
        let cut = rel_tol * self.max_coeff();
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.norm() <= cut) {
            coeffs.pop();
        }
        Self::new(coeffs)
    }

    /// Zeroes the imaginary parts of all coefficients.
    pub fn real_part(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| cx_re(c.re)).collect())
    }

    /// Substitutes `z → s·z`.
    pub fn compose_scale(&self, s: Cx<T>) -> Self {
        let mut pow = cx_re(T::one());
        let mut out = Vec::with_capacity(self.coeffs.len());
        for &c in &self.coeffs {
            out.push(c * pow);
            pow *= s;
        }
        Self::new(out)
    }

    /// All roots with multiplicity, from the eigenvalues of the balanced
    /// companion matrix. Exact zero roots are split off first.
    pub fn roots(&self) -> Result<Vec<Cx<T>>> {
        let Some(deg) = self.degree() else {
            return Err(Error::ZeroPolynomial);
        };
        let zeros_at_origin = self
            .coeffs
            .iter()
            .take_while(|c| c.re == T::zero() && c.im == T::zero())
            .count();
        let mut roots = vec![cx_re(T::zero()); zeros_at_origin];
        let rest = &self.coeffs[zeros_at_origin..];
        let n = deg - zeros_at_origin;
        if n == 0 {
            return Ok(roots);
        }
        let lead = rest[n];
        if self.is_real() {
            let mut comp = DMatrix::<T>::zeros(n, n);
            for i in 1..n {
                comp[(i, i - 1)] = T::one();
            }
            for i in 0..n {
                comp[(i, n - 1)] = -(rest[i].re / lead.re);
            }
            nalgebra::linalg::balancing::balance_parlett_reinsch(&mut comp);
            roots.extend(linalg::eigenvalues(&comp)?);
        } else {
            let mut comp = DMatrix::<Cx<T>>::zeros(n, n);
            for i in 1..n {
                comp[(i, i - 1)] = cx_re(T::one());
            }
            for i in 0..n {
                comp[(i, n - 1)] = -(rest[i] / lead);
            }
            balance_complex(&mut comp);
            roots.extend(linalg::eigenvalues_c(comp)?);
        }
        Ok(roots)
    }
}

impl<T: Real> Add for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, rhs: Self) -> Polynomial<T> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        let zero = cx_re(T::zero());
        Polynomial::new(
            (0..len)
                .map(|k| *self.coeffs.get(k).unwrap_or(&zero) + *rhs.coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl<T: Real> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        Polynomial::new(self.coeffs.iter().map(|&c| -c).collect())
    }
}

impl<T: Real> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, rhs: Self) -> Polynomial<T> {
        self + &(-rhs)
    }
}

impl<T: Real> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, rhs: Self) -> Polynomial<T> {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![cx_re(T::zero()); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

// Parlett–Reinsch balancing with radix 2 for complex matrices.
fn balance_complex<T: Real>(m: &mut DMatrix<Cx<T>>) {
    let n = m.nrows();
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let abs1 = |z: Cx<T>| z.re.abs() + z.im.abs();
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 100 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut c = T::zero();
            let mut r = T::zero();
            for j in 0..n {
                if j != i {
                    c += abs1(m[(j, i)]);
                    r += abs1(m[(i, j)]);
                }
            }
            if c == T::zero() || r == T::zero() {
                continue;
            }
            let s = c + r;
            let mut f = T::one();
            let mut g = r / two;
            while c < g {
                f *= two;
                c *= four;
            }
            g = r * two;
            while c > g {
                f /= two;
                c /= four;
            }
            if (c + r) / f < T::lit(0.95) * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= cx_re(f);
                    m[(j, i)] *= cx_re(f);
                }
            }
        }
    }
}

/// `k` points `radius·e^{2πij/k}`.
pub fn circle_points<T: Real>(k: usize, radius: T) -> Vec<Cx<T>> {
    (0..k)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / k as f64;
            cx(T::lit(theta.cos()), T::lit(theta.sin())) * radius
        })
        .collect()
}

/// Coefficients (ascending) of the unique polynomial of degree `< k` in the
/// scaled variable `w = z/radius` that takes `values[j]` at `w = e^{2πij/k}`,
/// by inverse discrete Fourier transform.
pub fn interpolate_on_circle<T: Real>(values: &[Cx<T>]) -> Vec<Cx<T>> {
    let k = values.len();
    let kt = T::from_usize(k).unwrap();
    (0..k)
        .map(|deg| {
            let mut acc = cx_re(T::zero());
            for (j, &v) in values.iter().enumerate() {
                let theta = -2.0 * PI * ((j * deg) % k) as f64 / k as f64;
                acc += v * cx(T::lit(theta.cos()), T::lit(theta.sin()));
            }
            acc / kt
        })
        .collect()
}

/// A zero location with its clustered multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroCluster<T: Real> {
    pub location: Cx<T>,
    pub multiplicity: usize,
}

/// Single-linkage clustering of roots within `rel·(1+|z|)`; each cluster is
/// replaced by its centroid. Output is sorted by real then imaginary part.
pub fn cluster_roots<T: Real>(roots: &[Cx<T>], rel: T) -> Vec<ZeroCluster<T>> {
    let n = roots.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut j = i;
        while parent[j] != r {
            let next = parent[j];
            parent[j] = r;
            j = next;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let scale = T::one() + roots[i].norm().max(roots[j].norm());
            if (roots[i] - roots[j]).norm() <= rel * scale {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[rj] = ri;
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<Cx<T>>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|(root, _)| *root == r) {
            Some((_, members)) => members.push(roots[i]),
            None => groups.push((r, vec![roots[i]])),
        }
    }
    let mut out: Vec<ZeroCluster<T>> = groups
        .into_iter()
        .map(|(_, members)| {
            let k = members.len();
            let sum = members.iter().fold(cx_re(T::zero()), |a, &b| a + b);
            ZeroCluster { location: sum / T::from_usize(k).unwrap(), multiplicity: k }
        })
        .collect();
    sort_clusters(&mut out);
    out
}

pub(crate) fn sort_clusters<T: Real>(c: &mut [ZeroCluster<T>]) {
    c.sort_by(|a, b| {
        a.location
            .re
            .partial_cmp(&b.location.re)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.location.im.partial_cmp(&b.location.im).unwrap_or(std::cmp::Ordering::Equal))
    });
}

/// Expands clusters into a multiset.
pub fn expand<T: Real>(clusters: &[ZeroCluster<T>]) -> Vec<Cx<T>> {
    clusters
        .iter()
        .flat_map(|c| std::iter::repeat(c.location).take(c.multiplicity))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<Cx<f64>>) -> Vec<Cx<f64>> {
        v.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap().then(a.im.partial_cmp(&b.im).unwrap()));
        v
    }

    #[test]
    fn roots_of_z2_minus_1() {
        let r = sorted(Polynomial::from_real(&[-1.0, 0.0, 1.0]).roots().unwrap());
        assert!((r[0] - cx_re(-1.0)).norm() < 1e-14);
        assert!((r[1] - cx_re(1.0)).norm() < 1e-14);
    }

    #[test]
    fn double_root_at_origin() {
        let r = Polynomial::from_real(&[0.0, 0.0, 1.0]).roots().unwrap();
        assert_eq!(r, vec![cx_re(0.0), cx_re(0.0)]);
    }

    #[test]
    fn roots_of_z2_plus_1_are_conjugate() {
        let r = sorted(Polynomial::from_real(&[1.0, 0.0, 1.0]).roots().unwrap());
        assert!((r[0] - cx(0.0, -1.0)).norm() < 1e-14);
        assert!((r[1] - cx(0.0, 1.0)).norm() < 1e-14);
        assert_eq!(r[0], r[1].conj());
    }

    #[test]
    fn zero_polynomial_has_no_roots() {
        assert_eq!(Polynomial::<f64>::zero().roots(), Err(Error::ZeroPolynomial));
        assert!(Polynomial::<f64>::from_real(&[3.0]).roots().unwrap().is_empty());
    }

    #[test]
    fn complex_coefficients() {
        let roots = [cx(1.0, 2.0), cx(-0.5, 0.25), cx(3.0, -1.0)];
        let p = Polynomial::from_roots(&roots);
        assert!(!p.is_real());
        for r in p.roots().unwrap() {
            assert!(roots.iter().any(|&e| (e - r).norm() < 1e-10));
        }
    }

    #[test]
    fn circle_interpolation_recovers_coefficients() {
        let p = Polynomial::from_real(&[2.0, -1.0, 0.5, 3.0]);
        let radius = 2.5;
        let values: Vec<_> = circle_points(6, radius).into_iter().map(|z| p.eval(z)).collect();
        let scaled = Polynomial::new(interpolate_on_circle(&values)).trimmed(1e-12);
        let back = scaled.compose_scale(cx_re(1.0 / radius));
        assert_eq!(back.degree(), Some(3));
        for (a, b) in back.coeffs().iter().zip(p.coeffs()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn clustering_merges_double_root() {
        let pts = [cx_re(1.0), cx_re(1.0 + 1e-9), cx_re(-2.0)];
        let c = cluster_roots(&pts, 1e-6);
        assert_eq!(c.len(), 2);
        assert_eq!(c[0].multiplicity, 1);
        assert_eq!(c[1].multiplicity, 2);
        assert!((c[1].location - cx_re(1.0 + 5e-10)).norm() < 1e-15);
    }
}
