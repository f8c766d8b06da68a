//! Dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, Schur};

use crate::error::{Error, Result};
use crate::scalar::{cx_re, cx_to_f64, Cx, CxExt, Real};

const SCHUR_MAX_ITER: usize = 10_000;

pub fn to_complex<T: Real>(m: &DMatrix<T>) -> DMatrix<Cx<T>> {
    m.map(cx_re)
}

/// Singular values in descending order.
pub fn singular_values<T: Real>(m: &DMatrix<Cx<T>>) -> Vec<T> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<T> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

pub fn singular_values_real<T: Real>(m: &DMatrix<T>) -> Vec<T> {
    if m.is_empty() {
        return Vec::new();
    }
    let mut sv: Vec<T> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Standard numerical-rank cutoff `max(rows, cols)·ε·σ_max`.
pub fn rank_threshold<T: Real>(rows: usize, cols: usize, sigma_max: T) -> T {
    T::from_usize(rows.max(cols)).unwrap() * T::eps() * sigma_max
}

fn rank_from_sv<T: Real>(sv: &[T], rows: usize, cols: usize) -> usize {
    match sv.first() {
        None => 0,
        Some(&smax) if smax == T::zero() => 0,
        Some(&smax) => {
            let cut = rank_threshold(rows, cols, smax);
            sv.iter().filter(|&&s| s > cut).count()
        }
    }
}

pub fn numerical_rank_c<T: Real>(m: &DMatrix<Cx<T>>) -> usize {
    rank_from_sv(&singular_values(m), m.nrows(), m.ncols())
}

pub fn numerical_rank<T: Real>(m: &DMatrix<T>) -> usize {
    rank_from_sv(&singular_values_real(m), m.nrows(), m.ncols())
}

pub fn block_diag<T: Real>(blocks: &[&DMatrix<T>]) -> DMatrix<T> {
    let rows = blocks.iter().map(|b| b.nrows()).sum();
    let cols = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = DMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.view_mut((r, c), (b.nrows(), b.ncols())).copy_from(*b);
        r += b.nrows();
        c += b.ncols();
    }
    out
}

pub fn mat_pow<T: Real>(a: &DMatrix<T>, k: usize) -> DMatrix<T> {
    let mut out = DMatrix::identity(a.nrows(), a.ncols());
    for _ in 0..k {
        out = &out * a;
    }
    out
}

/// `[B, AB, …, A^{n-1}B]`.
pub fn reachability_matrix<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let n = a.nrows();
    let m = b.ncols();
    let mut out = DMatrix::zeros(n, n * m);
    let mut blk = b.clone();
    for k in 0..n {
        out.view_mut((0, k * m), (n, m)).copy_from(&blk);
        blk = a * blk;
    }
    out
}

pub fn is_reachable<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>) -> bool {
    a.nrows() == 0 || numerical_rank(&reachability_matrix(a, b)) == a.nrows()
}

pub fn is_observable<T: Real>(a: &DMatrix<T>, c: &DMatrix<T>) -> bool {
    is_reachable(&a.transpose(), &c.transpose())
}

pub fn eigenvalues<T: Real>(a: &DMatrix<T>) -> Result<Vec<Cx<T>>> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    // the QR iteration can stall on a matrix yet converge on its transpose,
    // which has the same spectrum
    let schur = Schur::try_new(a.clone(), T::eps(), SCHUR_MAX_ITER)
        .or_else(|| Schur::try_new(a.transpose(), T::eps(), SCHUR_MAX_ITER))
        .ok_or(Error::NoConvergence)?;
    Ok(schur.complex_eigenvalues().iter().copied().collect())
}

pub fn eigenvalues_c<T: Real>(a: DMatrix<Cx<T>>) -> Result<Vec<Cx<T>>> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    let schur = Schur::try_new(a.clone(), T::eps(), SCHUR_MAX_ITER)
        .or_else(|| Schur::try_new(a.transpose(), T::eps(), SCHUR_MAX_ITER))
        .ok_or(Error::NoConvergence)?;
    schur
        .eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or(Error::NoConvergence)
}

pub fn spectral_radius<T: Real>(a: &DMatrix<T>) -> T {
    match eigenvalues(a) {
        Ok(ev) => ev.iter().map(|z| z.norm()).fold(T::zero(), |acc, r| acc.max(r)),
        Err(_) => a.norm(),
    }
}

fn pole_error<T: Real>(a: &DMatrix<T>, z: Cx<T>) -> Error {
    let nearest = eigenvalues(a)
        .ok()
        .and_then(|ev| {
            ev.into_iter().min_by(|x, y| {
                (x - z).norm().partial_cmp(&(y - z).norm()).unwrap_or(std::cmp::Ordering::Equal)
            })
        })
        .map(cx_to_f64)
        .unwrap_or(num_complex::Complex::new(f64::NAN, f64::NAN));
    Error::AtPole { point: cx_to_f64(z), nearest }
}

/// Solves `(zI − A) X = rhs`, reporting a pole when the solve fails or its
/// residual exceeds `tol·‖rhs‖`.
pub fn resolvent_solve<T: Real>(
    a: &DMatrix<T>,
    z: Cx<T>,
    rhs: &DMatrix<Cx<T>>,
    tol: T,
) -> Result<DMatrix<Cx<T>>> {
    let n = a.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, rhs.ncols()));
    }
    let mut m = -to_complex(a);
    for i in 0..n {
        m[(i, i)] += z;
    }
    let x = m.clone().lu().solve(rhs).ok_or_else(|| pole_error(a, z))?;
    let residual = (&m * &x - rhs).norm();
    let scale = rhs.norm();
    if !residual.is_finite() || residual > tol * scale || x.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(pole_error(a, z));
    }
    Ok(x)
}

/// PBH minimality test of `(A, B, C)` at the computed eigenvalues of `A`.
///
/// `rel_tol` is the relative singular-value cutoff; eigenvalues are only
/// known approximately so the cutoff has to be looser than the rank threshold.
pub fn pbh_minimal<T: Real>(a: &DMatrix<T>, b: &DMatrix<T>, c: &DMatrix<T>, rel_tol: T) -> Result<bool> {
    let n = a.nrows();
    if n == 0 {
        return Ok(true);
    }
    let scale = T::one() + a.norm() + b.norm() + c.norm();
    for lam in eigenvalues(a)? {
        let mut shifted = -to_complex(a);
        for i in 0..n {
            shifted[(i, i)] += lam;
        }
        let mut ctrl = DMatrix::zeros(n, n + b.ncols());
        ctrl.view_mut((0, 0), (n, n)).copy_from(&shifted);
        ctrl.view_mut((0, n), (n, b.ncols())).copy_from(&to_complex(b));
        let mut obs = DMatrix::zeros(n + c.nrows(), n);
        obs.view_mut((0, 0), (n, n)).copy_from(&shifted);
        obs.view_mut((n, 0), (c.nrows(), n)).copy_from(&to_complex(c));
        for m in [ctrl, obs] {
            let sv = singular_values(&m);
            if sv.len() < n || sv[n - 1] <= rel_tol * scale {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
