//! Dense matrices over exact scalars and fraction-free elimination.

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{Num, ToPrimitive};

/// Exact rational.
pub type Q = BigRational;
/// Exact complex rational.
pub type QC = Complex<BigRational>;

/// Scalar usable by the exact routines.
pub trait ExactScalar: Clone + Num + From<Q> + std::fmt::Debug {
    /// Nearest double-precision complex value.
    fn to_c64(&self) -> Complex<f64>;
}

fn q_to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

impl ExactScalar for Q {
    fn to_c64(&self) -> Complex<f64> {
        Complex::new(q_to_f64(self), 0.0)
    }
}

impl ExactScalar for QC {
    fn to_c64(&self) -> Complex<f64> {
        Complex::new(q_to_f64(&self.re), q_to_f64(&self.im))
    }
}

pub fn q_int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn q_frac(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Exact value of a finite double; `None` for NaN or infinities.
pub fn q_from_f64(v: f64) -> Option<Q> {
    Q::from_float(v)
}

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactMatrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

impl<S: Clone + Num> ExactMatrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![S::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { S::one() } else { S::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Self { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &S {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.data[i * self.cols + j] = v;
    }

    pub fn map<U: Clone + Num>(&self, f: impl Fn(&S) -> U) -> ExactMatrix<U> {
        ExactMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        Self::from_fn(self.rows, other.cols, |i, j| {
            (0..self.cols).fold(S::zero(), |acc, k| acc + self.get(i, k).clone() * other.get(k, j).clone())
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self::from_fn(self.rows, self.cols, |i, j| self.get(i, j).clone() + other.get(i, j).clone())
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|v| v.clone() * s.clone())
    }

    pub fn trace(&self) -> S {
        (0..self.rows.min(self.cols)).fold(S::zero(), |acc, i| acc + self.get(i, i).clone())
    }

    /// Copies `block` with its top-left corner at `(r, c)`.
    pub fn put(&mut self, r: usize, c: usize, block: &Self) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r + i, c + j, block.get(i, j).clone());
            }
        }
    }
}

/// Bareiss elimination with full pivoting. Returns the rank and, for square
/// input, the determinant.
fn bareiss<S: Clone + Num>(m: &ExactMatrix<S>) -> (usize, Option<S>) {
    let (rows, cols) = (m.rows, m.cols);
    let mut a: Vec<Vec<S>> = (0..rows).map(|i| (0..cols).map(|j| m.get(i, j).clone()).collect()).collect();
    let mut prev = S::one();
    let mut negate = false;
    let mut rank = 0;
    let steps = rows.min(cols);
    for k in 0..steps {
        let pivot = (k..rows).flat_map(|i| (k..cols).map(move |j| (i, j))).find(|&(i, j)| !a[i][j].is_zero());
        let Some((pi, pj)) = pivot else { break };
        if pi != k {
            a.swap(pi, k);
            negate = !negate;
        }
        if pj != k {
            for row in a.iter_mut() {
                row.swap(pj, k);
            }
            negate = !negate;
        }
        rank += 1;
        for i in (k + 1)..rows {
            for j in (k + 1)..cols {
                let v = (a[k][k].clone() * a[i][j].clone() - a[i][k].clone() * a[k][j].clone()) / prev.clone();
                a[i][j] = v;
            }
            a[i][k] = S::zero();
        }
        prev = a[k][k].clone();
    }
    let det = (rows == cols).then(|| {
        if rank < rows {
            S::zero()
        } else if negate {
            S::zero() - prev
        } else {
            prev
        }
    });
    let det = if rows == 0 && cols == 0 { Some(S::one()) } else { det };
    (rank, det)
}

pub fn exact_rank<S: Clone + Num>(m: &ExactMatrix<S>) -> usize {
    bareiss(m).0
}

/// Determinant of a square matrix; `None` otherwise.
pub fn exact_det<S: Clone + Num>(m: &ExactMatrix<S>) -> Option<S> {
    bareiss(m).1
}

/// Solves `A X = B` by Gauss–Jordan elimination; `None` if `A` is singular.
pub fn exact_solve<S: Clone + Num>(a: &ExactMatrix<S>, b: &ExactMatrix<S>) -> Option<ExactMatrix<S>> {
    let n = a.rows;
    if a.cols != n || b.rows != n {
        return None;
    }
    let w = n + b.cols;
    let mut aug: Vec<Vec<S>> = (0..n)
        .map(|i| (0..n).map(|j| a.get(i, j).clone()).chain((0..b.cols).map(|j| b.get(i, j).clone())).collect())
        .collect();
    for k in 0..n {
        let p = (k..n).find(|&i| !aug[i][k].is_zero())?;
        aug.swap(p, k);
        let piv = aug[k][k].clone();
        for j in k..w {
            aug[k][j] = aug[k][j].clone() / piv.clone();
        }
        for i in 0..n {
            if i != k && !aug[i][k].is_zero() {
                let f = aug[i][k].clone();
                for j in k..w {
                    aug[i][j] = aug[i][j].clone() - f.clone() * aug[k][j].clone();
                }
            }
        }
    }
    Some(ExactMatrix::from_fn(n, b.cols, |i, j| aug[i][n + j].clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qm(rows: &[&[i64]]) -> ExactMatrix<Q> {
        ExactMatrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| q_int(v)).collect()).collect())
    }

    #[test]
    fn rank_and_det() {
        assert_eq!(exact_rank(&qm(&[&[0, 0], &[0, 0]])), 0);
        assert_eq!(exact_rank(&qm(&[&[1, 2], &[2, 4]])), 1);
        assert_eq!(exact_det(&qm(&[&[0, 1], &[1, 0]])), Some(q_int(-1)));
        assert_eq!(exact_det(&qm(&[&[2, 0, 1], &[1, 3, 2], &[1, 1, 2]])), Some(q_int(6)));
        assert_eq!(exact_det(&qm(&[&[1, 2, 3]])), None);
        assert_eq!(exact_det(&ExactMatrix::<Q>::zeros(0, 0)), Some(q_int(1)));
    }

    #[test]
    fn complex_rank() {
        let i = QC::new(q_int(0), q_int(1));
        let one = QC::from(q_int(1));
        // [[1, i], [i, −1]] has rank 1
        let m = ExactMatrix::from_rows(vec![vec![one.clone(), i.clone()], vec![i.clone(), -one]]);
        assert_eq!(exact_rank(&m), 1);
    }

    #[test]
    fn solve_recovers_solution() {
        let a = qm(&[&[2, 1], &[1, 3]]);
        let x = qm(&[&[1], &[-2]]);
        assert_eq!(exact_solve(&a, &a.mul(&x)), Some(x));
        assert_eq!(exact_solve(&qm(&[&[1, 2], &[2, 4]]), &qm(&[&[1], &[1]])), None);
    }

    #[test]
    fn fractions_convert() {
        assert_eq!(q_from_f64(0.5), Some(q_frac(1, 2)));
        assert_eq!(q_from_f64(f64::NAN), None);
        assert_eq!(q_frac(3, 4).to_c64(), Complex::new(0.75, 0.0));
    }
}
