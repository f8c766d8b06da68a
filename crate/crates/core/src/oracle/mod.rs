//! Exact rational ground truth for small instances: ranks of the system
//! pencil at rational points, the determinant polynomial of a square pencil,
//! exact transfer-function values and characteristic polynomials.

mod exact;

use num_complex::Complex;
use num_traits::{One, Zero};

pub use exact::{exact_det, exact_rank, exact_solve, q_frac, q_from_f64, q_int, ExactMatrix, ExactScalar, Q, QC};

use crate::error::{Error, Result};
use crate::model::StateSpace;
use crate::poly::Polynomial;

/// A quadruple `(A, B, C, D)` with rational entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactQuadruple {
    pub a: ExactMatrix<Q>,
    pub b: ExactMatrix<Q>,
    pub c: ExactMatrix<Q>,
    pub d: ExactMatrix<Q>,
}

fn from_dmatrix(m: &nalgebra::DMatrix<f64>, name: &str) -> Result<ExactMatrix<Q>> {
    let mut out = ExactMatrix::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            let v = q_from_f64(m[(i, j)]).ok_or_else(|| Error::Dimension(format!("{name} has a non-finite entry")))?;
            out.set(i, j, v);
        }
    }
    Ok(out)
}

impl ExactQuadruple {
    pub fn new(a: ExactMatrix<Q>, b: ExactMatrix<Q>, c: ExactMatrix<Q>, d: ExactMatrix<Q>) -> Result<Self> {
        let n = a.rows();
        let ok = a.cols() == n && b.rows() == n && c.cols() == n && d.rows() == c.rows() && d.cols() == b.cols();
        if !ok {
            return Err(Error::Dimension("inconsistent exact quadruple".into()));
        }
        Ok(Self { a, b, c, d })
    }

    /// Exact binary values of a double-precision quadruple.
    pub fn from_state_space(sys: &StateSpace<f64>) -> Result<Self> {
        sys.check_dimensions()?;
        Self::new(
            from_dmatrix(&sys.a, "A")?,
            from_dmatrix(&sys.b, "B")?,
            from_dmatrix(&sys.c, "C")?,
            from_dmatrix(&sys.d, "D")?,
        )
    }

    pub fn states(&self) -> usize {
        self.a.rows()
    }

    pub fn inputs(&self) -> usize {
        self.b.cols()
    }

    pub fn outputs(&self) -> usize {
        self.c.rows()
    }

    /// `Π(z) = [[zI − A, −B], [C, D]]` over the scalar type of `z`.
    pub fn pencil_at<S: ExactScalar>(&self, z: &S) -> ExactMatrix<S> {
        let (n, m, p) = (self.states(), self.inputs(), self.outputs());
        let lift = |v: &Q| S::from(v.clone());
        let neg = |v: &Q| S::zero() - S::from(v.clone());
        let mut out = ExactMatrix::zeros(n + p, n + m);
        let mut top_left = self.a.map(neg);
        for i in 0..n {
            let v = top_left.get(i, i).clone() + z.clone();
            top_left.set(i, i, v);
        }
        out.put(0, 0, &top_left);
        out.put(0, n, &self.b.map(neg));
        out.put(n, 0, &self.c.map(lift));
        out.put(n, n, &self.d.map(lift));
        out
    }
}

/// Exact rank of `Π(z)`.
pub fn exact_rank_at<S: ExactScalar>(quad: &ExactQuadruple, z: &S) -> usize {
    exact_rank(&quad.pencil_at(z))
}

/// Exact normal rank of `Π`: every minor is a polynomial of degree at most
/// `n`, so the maximum rank over the `n + 1` points `0, …, n` is attained.
pub fn exact_normal_rank(quad: &ExactQuadruple) -> usize {
    (0..=quad.states() as i64).map(|k| exact_rank_at(quad, &q_int(k))).max().unwrap_or(0)
}

/// Polynomial with rational coefficients, ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactPoly {
    pub coeffs: Vec<Q>,
}

impl ExactPoly {
    pub fn new(mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval<S: ExactScalar>(&self, z: &S) -> S {
        self.coeffs.iter().rev().fold(S::zero(), |acc, c| acc * z.clone() + S::from(c.clone()))
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }

    pub fn to_f64(&self) -> Polynomial<f64> {
        Polynomial::from_real(&self.coeffs.iter().map(|c| c.to_c64().re).collect::<Vec<_>>())
    }

    pub fn derivative(&self) -> Self {
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.clone() * q_int(k as i64)).collect())
    }

    /// Quotient and remainder; `None` when dividing by the zero polynomial.
    pub fn div_rem(&self, divisor: &Self) -> Option<(Self, Self)> {
        let dd = divisor.degree()?;
        let lead = divisor.coeffs[dd].clone();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![Q::zero(); self.coeffs.len().saturating_sub(dd).max(1)];
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let factor = rem[rem.len() - 1].clone() / lead.clone();
            for (j, c) in divisor.coeffs.iter().enumerate() {
                rem[shift + j] -= factor.clone() * c.clone();
            }
            quot[shift] = factor;
            rem.pop();
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        Some((Self::new(quot), Self::new(rem)))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        match a.coeffs.last().cloned() {
            Some(lead) => Self::new(a.coeffs.iter().map(|c| c.clone() / lead.clone()).collect()),
            None => a,
        }
    }

    /// The product of the distinct irreducible factors: same roots, all simple.
    pub fn square_free_part(&self) -> Self {
        let g = self.gcd(&self.derivative());
        self.div_rem(&g).map_or_else(|| self.clone(), |(q, _)| q)
    }
}

/// Newton interpolation through `(x_k, y_k)`, expanded to monomial form.
fn interpolate(xs: &[Q], ys: &[Q]) -> ExactPoly {
    let n = xs.len();
    let mut dd = ys.to_vec();
    for level in 1..n {
        for i in (level..n).rev() {
            dd[i] = (dd[i].clone() - dd[i - 1].clone()) / (xs[i].clone() - xs[i - level].clone());
        }
    }
    // Horner on the Newton basis
    let mut coeffs = vec![Q::zero(); n];
    for k in (0..n).rev() {
        // coeffs ← coeffs·(z − x_k) + dd_k
        let mut next = vec![Q::zero(); n];
        for (j, c) in coeffs.iter().enumerate() {
            if j + 1 < n {
                next[j + 1] += c.clone();
            }
            next[j] -= c.clone() * xs[k].clone();
        }
        next[0] += dd[k].clone();
        coeffs = next;
    }
    ExactPoly::new(coeffs)
}

/// Exact coefficients of `det Π(z)` for a square pencil, interpolated at the
/// integer points `0, …, n` and checked at the held-out point `n + 1`.
pub fn pencil_det_poly(quad: &ExactQuadruple) -> Result<ExactPoly> {
    if quad.inputs() != quad.outputs() {
        return Err(Error::Dimension(format!(
            "determinant needs a square pencil, got {} outputs and {} inputs",
            quad.outputs(),
            quad.inputs()
        )));
    }
    let n = quad.states();
    let det_at = |k: i64| exact_det(&quad.pencil_at(&q_int(k))).expect("square pencil");
    let xs: Vec<Q> = (0..=n as i64).map(q_int).collect();
    let ys: Vec<Q> = (0..=n as i64).map(det_at).collect();
    let poly = interpolate(&xs, &ys);
    let held_out = n as i64 + 1;
    if poly.eval(&q_int(held_out)) != det_at(held_out) {
        return Err(Error::Degenerate("exact interpolation failed its held-out check".into()));
    }
    Ok(poly)
}

/// Roots of the exact determinant polynomial of a small square pencil,
/// found in double precision from the exact coefficients.
pub fn oracle_zeros_small(quad: &ExactQuadruple) -> Result<Vec<Complex<f64>>> {
    let det = pencil_det_poly(quad)?;
    match det.degree() {
        None => Err(Error::Degenerate(
            "determinant vanishes identically; zeros are not characterized by it, scan exact ranks instead".into(),
        )),
        Some(0) => Ok(Vec::new()),
        Some(_) => det.to_f64().roots(),
    }
}

/// `D + C (zI − A)^{-1} B` in exact arithmetic.
pub fn exact_transfer_eval<S: ExactScalar>(quad: &ExactQuadruple, z: &S) -> Result<ExactMatrix<S>> {
    let n = quad.states();
    let resolvent = ExactMatrix::from_fn(n, n, |i, j| {
        let a = S::from(quad.a.get(i, j).clone());
        if i == j {
            z.clone() - a
        } else {
            S::zero() - a
        }
    });
    let lift = |v: &Q| S::from(v.clone());
    let x = exact_solve(&resolvent, &quad.b.map(lift)).ok_or_else(|| Error::AtPole {
        point: z.to_c64(),
        nearest: z.to_c64(),
    })?;
    Ok(quad.d.map(lift).add(&quad.c.map(lift).mul(&x)))
}

/// Faddeev–LeVerrier: the characteristic polynomial `det(zI − A)` and the
/// matrices `M_1, …, M_n` with `adj(zI − A) = Σ_k M_k z^{n−k}`.
pub fn faddeev_leverrier(a: &ExactMatrix<Q>) -> (ExactPoly, Vec<ExactMatrix<Q>>) {
    let n = a.rows();
    let mut coeffs = vec![Q::zero(); n + 1];
    coeffs[n] = Q::one();
    let mut adj = Vec::with_capacity(n);
    let mut m = ExactMatrix::<Q>::zeros(n, n);
    for k in 1..=n {
        m = a.mul(&m).add(&ExactMatrix::identity(n).scale(&coeffs[n + 1 - k]));
        adj.push(m.clone());
        coeffs[n - k] = -a.mul(&m).trace() / q_int(k as i64);
    }
    (ExactPoly::new(coeffs), adj)
}

/// Exact `(p, q)` of `c (zI − A)^{-1} b` with `q = det(zI − A)` and
/// `p = c adj(zI − A) b`.
pub fn exact_siso(a: &ExactMatrix<Q>, b: &ExactMatrix<Q>, c: &ExactMatrix<Q>) -> Result<(ExactPoly, ExactPoly)> {
    let n = a.rows();
    if a.cols() != n || b.rows() != n || b.cols() != 1 || c.rows() != 1 || c.cols() != n {
        return Err(Error::Dimension("exact SISO fraction needs A n×n, b n×1, c 1×n".into()));
    }
    let (q, adj) = faddeev_leverrier(a);
    let mut p = vec![Q::zero(); n];
    for (k, mk) in adj.iter().enumerate() {
        // M_{k+1} multiplies z^{n−k−1}
        p[n - 1 - k] = c.mul(mk).mul(b).get(0, 0).clone();
    }
    Ok((ExactPoly::new(p), q))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qm(rows: &[&[i64]]) -> ExactMatrix<Q> {
        ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| q_int(v)).collect()).collect())
    }

    fn scalar(a: i64, b: i64, c: i64, d: i64) -> ExactQuadruple {
        ExactQuadruple::new(qm(&[&[a]]), qm(&[&[b]]), qm(&[&[c]]), qm(&[&[d]])).unwrap()
    }

    #[test]
    fn scalar_det_poly() {
        // det [[z − a, −b], [c, d]] = d z + (b c − a d)
        let (a, b, c, d) = (3, 2, -5, 7);
        let det = pencil_det_poly(&scalar(a, b, c, d)).unwrap();
        assert_eq!(det.coeffs, vec![q_int(b * c - a * d), q_int(d)]);
    }

    #[test]
    fn small_zero_examples() {
        let z = oracle_zeros_small(&scalar(0, 1, 1, 1)).unwrap();
        assert_eq!(z.len(), 1);
        assert!((z[0] - Complex::new(-1.0, 0.0)).norm() < 1e-14);
        assert!(oracle_zeros_small(&scalar(0, 1, 1, 0)).unwrap().is_empty());
        assert!(matches!(oracle_zeros_small(&scalar(0, 0, 0, 0)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn rank_at_complex_point() {
        // Π(z) = [[z, −1], [1, 0]] never drops rank
        let quad = scalar(0, 1, 1, 0);
        assert_eq!(exact_rank_at(&quad, &QC::new(q_int(0), q_int(1))), 2);
        assert_eq!(exact_normal_rank(&quad), 2);
        // uncontrollable and unobservable mode at 2
        let quad = scalar(2, 0, 0, 0);
        assert_eq!(exact_rank_at(&quad, &q_int(2)), 0);
        assert_eq!(exact_normal_rank(&quad), 1);
    }

    #[test]
    fn transfer_and_pole() {
        let quad = scalar(0, 1, 1, 0);
        let g = exact_transfer_eval(&quad, &q_int(2)).unwrap();
        assert_eq!(g.get(0, 0), &q_frac(1, 2));
        assert!(matches!(exact_transfer_eval(&quad, &q_int(0)), Err(Error::AtPole { .. })));
    }

    #[test]
    fn square_free_part_drops_repeated_factors() {
        // (z − 1)² (z + 2) = z³ − 3z + 2
        let p = ExactPoly::new(vec![q_int(2), q_int(-3), q_int(0), q_int(1)]);
        let sf = p.square_free_part();
        // (z − 1)(z + 2) = z² + z − 2, up to a constant
        let lead = sf.coeffs[2].clone();
        let monic: Vec<Q> = sf.coeffs.iter().map(|c| c.clone() / lead.clone()).collect();
        assert_eq!(monic, vec![q_int(-2), q_int(1), q_int(1)]);
        let (q, r) = p.div_rem(&ExactPoly::new(vec![q_int(-1), q_int(1)])).unwrap();
        assert!(r.is_zero());
        assert_eq!(q.degree(), Some(2));
    }

    #[test]
    fn faddeev_leverrier_double_delay() {
        let a = qm(&[&[0, 1], &[0, 0]]);
        let (p, q) = exact_siso(&a, &qm(&[&[0], &[1]]), &qm(&[&[1, 0]])).unwrap();
        assert_eq!(p.coeffs, vec![q_int(1)]);
        assert_eq!(q.coeffs, vec![q_int(0), q_int(0), q_int(1)]);
        let (q3, _) = faddeev_leverrier(&qm(&[&[1, 2, 0], &[0, 3, 1], &[4, 0, 2]]));
        // det(zI − A) at z = 5 equals det(5I − A) computed directly
        let direct = exact_det(&qm(&[&[4, -2, 0], &[0, 2, -1], &[-4, 0, 3]])).unwrap();
        assert_eq!(q3.eval(&q_int(5)), direct);
    }
}
