//! Blocking (lifting) of a discrete-time quadruple over `T` steps and the
//! correspondence between blocked and unblocked zeros.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::homogeneous::{homogeneous_zero_report, HomogeneousNetwork};
use crate::linalg::{self, mat_pow, resolvent_solve};
use crate::matching::match_sets;
use crate::model::StateSpace;
use crate::poly::{cluster_roots, Polynomial, ZeroCluster};
use crate::scalar::{cx_re, Cx, CxExt, Real};
use crate::zeros::{
    confirm_candidates, invariant_zeros, pencil_at, pencil_normal_rank, sampling_radius, sigma_ratio, snap_origin,
    transfer_normal_rank, Diagnostics, ZeroMethod, ZeroOptions, ZeroReport,
};

/// `(A^T, [A^{T-1}B … B], [C; CA; …; CA^{T-1}], D_b)` with `D_b` block lower
/// triangular: `D` on the diagonal and `C A^{i-j-1} B` in block `(i, j)`, `i > j`.
#[derive(Clone, Debug, PartialEq)]
pub struct BlockedRealization<T: Real> {
    pub block: usize,
    pub system: StateSpace<T>,
    pub source: StateSpace<T>,
}

pub fn block_system<T: Real>(sys: &StateSpace<T>, t: usize) -> Result<BlockedRealization<T>> {
    if t == 0 {
        return Err(Error::InvalidBlockSize);
    }
    sys.check_dimensions()?;
    let (n, m, p) = (sys.states(), sys.inputs(), sys.outputs());
    let powers: Vec<DMatrix<T>> = (0..=t).map(|k| mat_pow(&sys.a, k)).collect();
    let mut b = DMatrix::zeros(n, t * m);
    for j in 0..t {
        b.view_mut((0, j * m), (n, m)).copy_from(&(&powers[t - 1 - j] * &sys.b));
    }
    let mut c = DMatrix::zeros(t * p, n);
    for i in 0..t {
        c.view_mut((i * p, 0), (p, n)).copy_from(&(&sys.c * &powers[i]));
    }
    let mut d = DMatrix::zeros(t * p, t * m);
    for i in 0..t {
        d.view_mut((i * p, i * m), (p, m)).copy_from(&sys.d);
        for j in 0..i {
            d.view_mut((i * p, j * m), (p, m)).copy_from(&(&sys.c * &powers[i - j - 1] * &sys.b));
        }
    }
    Ok(BlockedRealization { block: t, system: StateSpace::new(powers[t].clone(), b, c, d), source: sys.clone() })
}

/// `Γ_b(ζ) = D_b + C_b (ζI − A_b)^{-1} B_b`.
pub fn blocked_transfer_eval<T: Real>(blk: &BlockedRealization<T>, zeta: Cx<T>) -> Result<DMatrix<Cx<T>>> {
    blk.system.transfer_at(zeta)
}

/// `Γ_b(ζ)` assembled from `H_0 = D + C(ζI − A^T)^{-1}A^{T-1}B` and
/// `H_k = C(ζI − A^T)^{-1}A^{k-1}B`: block `(i, j)` is `H_{(i-j) mod T}`,
/// multiplied by `ζ` below the diagonal.
pub fn blocked_transfer_assembly<T: Real>(sys: &StateSpace<T>, t: usize, zeta: Cx<T>) -> Result<DMatrix<Cx<T>>> {
    if t == 0 {
        return Err(Error::InvalidBlockSize);
    }
    let (m, p) = (sys.inputs(), sys.outputs());
    let at = mat_pow(&sys.a, t);
    let c = linalg::to_complex(&sys.c);
    let tol = crate::scalar::Tolerances::<T>::default().pole_residual;
    let mut h = Vec::with_capacity(t);
    for k in 0..t {
        let power = if k == 0 { t - 1 } else { k - 1 };
        let rhs = linalg::to_complex(&(mat_pow(&sys.a, power) * &sys.b));
        let x = resolvent_solve(&at, zeta, &rhs, tol)?;
        let mut hk = &c * x;
        if k == 0 {
            hk += linalg::to_complex(&sys.d);
        }
        h.push(hk);
    }
    let mut out = DMatrix::zeros(t * p, t * m);
    for i in 0..t {
        for j in 0..t {
            let mut blk = h[(i + t - j) % t].clone();
            if i > j {
                blk *= zeta;
            }
            out.view_mut((i * p, j * m), (p, m)).copy_from(&blk);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CorrespondenceReport<T: Real> {
    pub block: usize,
    pub unblocked: ZeroReport<T>,
    pub blocked: ZeroReport<T>,
    /// Whether the unblocked quadruple is minimal (needed for the origin and
    /// infinity clauses).
    pub minimal: bool,
    /// Nonzero blocked zeros equal `{z^T}` over nonzero unblocked zeros, as sets.
    pub nonzero_match: bool,
    /// `None` when the quadruple is not minimal.
    pub origin_match: Option<bool>,
    pub infinity_match: Option<bool>,
    pub details: Vec<String>,
}

impl<T: Real> CorrespondenceReport<T> {
    /// True when every applicable clause holds.
    pub fn all_match(&self) -> bool {
        self.nonzero_match && self.origin_match.unwrap_or(true) && self.infinity_match.unwrap_or(true)
    }
}

fn distinct<T: Real>(points: &[Cx<T>], tol: T) -> Vec<Cx<T>> {
    cluster_roots(points, tol).into_iter().map(|c| c.location).collect()
}

fn fmt_points<T: Real>(points: &[Cx<T>]) -> String {
    let parts: Vec<String> = points.iter().map(|z| format!("{:.6e}{:+.6e}i", z.re.to_f64().unwrap_or(f64::NAN), z.im.to_f64().unwrap_or(f64::NAN))).collect();
    format!("[{}]", parts.join(", "))
}

/// Compares the zeros of `sys` with those of its `T`-step blocked system.
pub fn correspondence_report<T: Real>(sys: &StateSpace<T>, t: usize, opts: &ZeroOptions<T>) -> Result<CorrespondenceReport<T>> {
    let blk = block_system(sys, t)?;
    let unblocked = invariant_zeros(sys, opts)?;
    let blocked = invariant_zeros(&blk.system, opts)?;
    let tol = opts.tol.matching;
    let powers: Vec<Cx<T>> = unblocked.nonzero_locations().into_iter().map(|z| z.powu(t as u32)).collect();
    let mut details = Vec::new();
    // a power within the matching tolerance of 0 cannot be told apart from a
    // blocked zero at the origin
    let (tiny, powers): (Vec<Cx<T>>, Vec<Cx<T>>) =
        powers.into_iter().partition(|w| blocked.has_origin_zero && w.norm() <= tol);
    if !tiny.is_empty() {
        details.push(format!("powers of unblocked zeros unresolved from the origin: {}", fmt_points(&tiny)));
    }
    // the blocked determinant is interpolated on a circle of this radius and
    // trimmed where its leading coefficients fall below the degree
    // tolerance; powers lost to that trim are indistinguishable from zeros
    // at infinity
    let radius = sampling_radius(&blk.system.a);
    let mut powers = powers;
    powers.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap_or(std::cmp::Ordering::Equal));
    let mut huge = Vec::new();
    let mut all: Vec<Cx<T>> = unblocked.zeros().into_iter().map(|z| z.powu(t as u32) / radius).collect();
    all.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap_or(std::cmp::Ordering::Equal));
    while !all.is_empty() && !powers.is_empty() {
        let det = Polynomial::from_roots(&all);
        if det.leading().norm() >= opts.tol.degree * det.max_coeff() {
            break;
        }
        let lost = all.remove(0) * radius;
        if let Some(i) = powers.iter().position(|w| (*w - lost).norm() <= tol * (T::one() + w.norm())) {
            huge.push(powers.remove(i));
        }
    }
    if !huge.is_empty() {
        details.push(format!("powers of unblocked zeros beyond the resolvable radius: {}", fmt_points(&huge)));
    }
    let expected = distinct(&powers, tol);
    let got = distinct(&blocked.nonzero_locations(), tol);
    let outcome = match_sets(&expected, &got, tol);
    if !outcome.unmatched_left.is_empty() {
        details.push(format!(
            "powers of unblocked zeros missing from the blocked system: {}",
            fmt_points(&outcome.unmatched_left)
        ));
    }
    if !outcome.unmatched_right.is_empty() {
        details.push(format!("blocked zeros with no unblocked T-th root: {}", fmt_points(&outcome.unmatched_right)));
    }
    let nonzero_count = |r: &ZeroReport<T>| r.finite_zeros.iter().filter(|c| c.location.norm() > T::zero()).map(|c| c.multiplicity).sum::<usize>();
    details.push(format!(
        "nonzero zeros with multiplicity: unblocked {}, blocked {} (informational)",
        nonzero_count(&unblocked),
        nonzero_count(&blocked)
    ));
    let minimal = sys.is_minimal()?;
    let (origin_match, infinity_match) = if minimal {
        (
            Some((unblocked.has_origin_zero || !tiny.is_empty()) == blocked.has_origin_zero),
            Some(unblocked.has_infinite_zero == blocked.has_infinite_zero),
        )
    } else {
        details.push("quadruple is not minimal; origin and infinity clauses not applicable".into());
        (None, None)
    };
    Ok(CorrespondenceReport {
        block: t,
        unblocked,
        blocked,
        minimal,
        nonzero_match: outcome.matched,
        origin_match,
        infinity_match,
        details,
    })
}

/// Zeros of the `T`-step blocked homogeneous network with `D` of full rank:
/// all `ζ = z^T` with `h(ω^k z)` a coupling zero, i.e. the `T`-th powers of
/// the unblocked network zeros. No zero at infinity.
pub fn blocked_homogeneous_zeros<T: Real>(hn: &HomogeneousNetwork<T>, t: usize, opts: &ZeroOptions<T>) -> Result<ZeroReport<T>> {
    if t == 0 {
        return Err(Error::InvalidBlockSize);
    }
    let d = &hn.coupling.d;
    if linalg::numerical_rank(d) < d.nrows().min(d.ncols()) {
        return Err(Error::Hypothesis("blocked homogeneous zeros need D of full rank".into()));
    }
    let unblocked = homogeneous_zero_report(hn, opts)?;
    let candidates: Vec<Cx<T>> = unblocked.zeros().into_iter().map(|z| z.powu(t as u32)).collect();
    let blk = block_system(&hn.realize()?.system, t)?;
    let rank = pencil_normal_rank(&blk.system, opts)?;
    let mut diagnostics = Diagnostics::new(ZeroMethod::BlockedHomogeneous);
    let mut finite_zeros: Vec<ZeroCluster<T>> =
        confirm_candidates(&candidates, &opts.tol, &mut diagnostics, |z| sigma_ratio(&pencil_at(&blk.system, z), rank));
    let has_origin_zero = snap_origin(&mut finite_zeros, opts.tol.cluster, &pencil_at(&blk.system, cx_re(T::zero())), rank);
    Ok(ZeroReport {
        finite_zeros,
        normal_rank_pencil: rank,
        normal_rank_tf: transfer_normal_rank(&blk.system, opts)?,
        rank_feedthrough: linalg::numerical_rank(&blk.system.d),
        has_infinite_zero: false,
        has_origin_zero,
        diagnostics,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matching::{match_multisets, match_sets};
    use crate::model::Interconnection;
    use crate::rational::RationalSiso;
    use crate::scalar::cx;

    fn m(rows: usize, cols: usize, v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, cols, v)
    }

    fn scalar(a: f64, b: f64, c: f64, d: f64) -> StateSpace<f64> {
        StateSpace::new(m(1, 1, &[a]), m(1, 1, &[b]), m(1, 1, &[c]), m(1, 1, &[d]))
    }

    #[test]
    fn identity_blocking() {
        let sys = scalar(0.3, 2.0, -1.0, 0.5);
        let blk = block_system(&sys, 1).unwrap();
        assert_eq!(blk.system, sys);
        assert_eq!(block_system(&sys, 0), Err(Error::InvalidBlockSize));
    }

    #[test]
    fn scalar_two_step_blocking() {
        let (a, b, c, d) = (0.3, 2.0, -1.0, 0.5);
        let blk = block_system(&scalar(a, b, c, d), 2).unwrap().system;
        assert_eq!(blk.a, m(1, 1, &[a * a]));
        assert_eq!(blk.b, m(1, 2, &[a * b, b]));
        assert_eq!(blk.c, m(2, 1, &[c, c * a]));
        assert_eq!(blk.d, m(2, 2, &[d, 0.0, c * b, d]));
    }

    #[test]
    fn assembly_matches_state_space() {
        let sys = StateSpace::new(
            m(2, 2, &[0.2, -0.7, 0.5, 0.1]),
            m(2, 1, &[1.0, 0.3]),
            m(1, 2, &[0.4, -1.1]),
            m(1, 1, &[0.25]),
        );
        for t in 1..=4 {
            let blk = block_system(&sys, t).unwrap();
            let zeta = cx(1.3, -0.4);
            let direct = blocked_transfer_eval(&blk, zeta).unwrap();
            let assembled = blocked_transfer_assembly(&sys, t, zeta).unwrap();
            assert!((direct - &assembled).norm() <= 1e-12 * (1.0 + assembled.norm()), "T = {t}");
        }
    }

    #[test]
    fn pass_through_agent_zero_maps_to_square() {
        // g = (z − 2)/z² realized in controllable form, pass-through coupling
        let g = RationalSiso::from_coeffs(&[-2.0, 1.0], &[0.0, 0.0, 1.0]).unwrap().realize();
        let sys = StateSpace::new(g.a, g.b, g.c, m(1, 1, &[0.0]));
        let rep = correspondence_report(&sys, 2, &ZeroOptions::default()).unwrap();
        assert!(rep.nonzero_match, "{:?}", rep.details);
        assert!(match_sets(&rep.blocked.nonzero_locations(), &[cx_re(4.0)], 1e-8).matched);
        assert!(rep.all_match());
    }

    #[test]
    fn blocked_homogeneous_scalar_example() {
        let g = RationalSiso::from_coeffs(&[1.0], &[0.0, 1.0]).unwrap();
        let coupling = Interconnection::new(m(1, 1, &[0.0]), m(1, 1, &[1.0]), m(1, 1, &[0.5]), m(1, 1, &[1.0]));
        let hn = HomogeneousNetwork::new(g, 1, coupling).unwrap();
        let r = blocked_homogeneous_zeros(&hn, 2, &ZeroOptions::default()).unwrap();
        assert!(match_multisets(&r.zeros(), &[cx_re(0.25)], 1e-10).matched, "{:?}", r.zeros());
        assert!(!r.has_infinite_zero);
        let t1 = blocked_homogeneous_zeros(&hn, 1, &ZeroOptions::default()).unwrap();
        assert!(match_multisets(&t1.zeros(), &[cx_re(-0.5)], 1e-10).matched);
    }
}
