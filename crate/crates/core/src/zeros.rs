//! Invariant zeros of a real quadruple `(A, B, C, D)` from its system pencil
//! `Π(z) = [[zI − A, −B], [C, D]]`.
//!
//! Finite zeros are the points where `rank Π(z₀)` drops below the normal rank
//! of `Π`. They are extracted from the pencil itself (never from a reduced
//! transfer function, which would lose decoupling zeros): the determinant of a
//! square, regular version of the pencil is sampled on a circle, interpolated
//! by inverse DFT and rooted. Pencils that are not square with full normal rank
//! are squared down twice with independent random compressions and only
//! candidates present in both draws are kept. Every surviving candidate is
//! re-checked by a singular-value rank drop on the original pencil.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{self, to_complex};
use crate::matching;
use crate::model::StateSpace;
use crate::poly::{circle_points, cluster_roots, expand, interpolate_on_circle, Polynomial, ZeroCluster};
use crate::scalar::{cx, cx_re, Cx, CxExt, Real, Tolerances};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeroOptions<T: Real> {
    /// Sample points used for each normal-rank estimate.
    pub samples: usize,
    pub seed: u64,
    pub tol: Tolerances<T>,
}

impl<T: Real> Default for ZeroOptions<T> {
    fn default() -> Self {
        Self { samples: 7, seed: 0, tol: Tolerances::default() }
    }
}

/// How the finite zeros in a report were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroMethod {
    /// Square pencil with full normal rank: determinant interpolation.
    Determinant,
    /// Two random square-downs intersected.
    SquareDown,
    /// Static system (no states): no finite zeros.
    Static,
    /// Homogeneous network: h-preimages of interconnection zeros.
    HPreimage,
    /// Circulant homogeneous network: preimages of the Fourier-domain zeros.
    Circulant,
    /// Blocked homogeneous network: T-th powers of rotated preimages.
    BlockedHomogeneous,
}

impl ZeroMethod {
    pub fn name(self) -> &'static str {
        match self {
            ZeroMethod::Determinant => "determinant",
            ZeroMethod::SquareDown => "square-down",
            ZeroMethod::Static => "static",
            ZeroMethod::HPreimage => "h-preimage",
            ZeroMethod::Circulant => "circulant",
            ZeroMethod::BlockedHomogeneous => "blocked-homogeneous",
        }
    }
}

/// Rank-drop check of one reported zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Confirmation<T: Real> {
    pub location: Cx<T>,
    /// `σ_r / σ_1` at the zero, where `r` is the normal rank being tested against.
    pub sigma_ratio: T,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostics<T: Real> {
    pub method: ZeroMethod,
    pub confirmations: Vec<Confirmation<T>>,
    /// Candidates discarded because their rank drop could not be confirmed.
    pub rejected: Vec<Cx<T>>,
    /// Multiplicities are cluster sizes, not a structural invariant.
    pub multiplicity_heuristic: bool,
    pub notes: Vec<String>,
}

impl<T: Real> Diagnostics<T> {
    pub(crate) fn new(method: ZeroMethod) -> Self {
        Self { method, confirmations: Vec::new(), rejected: Vec::new(), multiplicity_heuristic: true, notes: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ZeroReport<T: Real> {
    pub finite_zeros: Vec<ZeroCluster<T>>,
    pub normal_rank_pencil: usize,
    pub normal_rank_tf: usize,
    pub rank_feedthrough: usize,
    pub has_infinite_zero: bool,
    pub has_origin_zero: bool,
    pub diagnostics: Diagnostics<T>,
}

impl<T: Real> ZeroReport<T> {
    /// Finite zeros as a multiset.
    pub fn zeros(&self) -> Vec<Cx<T>> {
        expand(&self.finite_zeros)
    }

    /// Distinct zero locations.
    pub fn locations(&self) -> Vec<Cx<T>> {
        self.finite_zeros.iter().map(|c| c.location).collect()
    }

    /// Distinct zero locations excluding the origin.
    pub fn nonzero_locations(&self) -> Vec<Cx<T>> {
        self.finite_zeros
            .iter()
            .filter(|c| c.location.norm() > T::zero())
            .map(|c| c.location)
            .collect()
    }

    pub fn zero_count(&self) -> usize {
        self.finite_zeros.iter().map(|c| c.multiplicity).sum()
    }

    /// True when every finite zero lies strictly inside the unit disc.
    pub fn is_minimum_phase(&self) -> bool {
        self.finite_zeros.iter().all(|c| c.location.norm() < T::one())
    }
}

/// `Π(z) = [[zI − A, −B], [C, D]]`.
pub fn pencil_at<T: Real>(sys: &StateSpace<T>, z: Cx<T>) -> DMatrix<Cx<T>> {
    let (n, m, p) = (sys.states(), sys.inputs(), sys.outputs());
    let mut out = DMatrix::zeros(n + p, n + m);
    out.view_mut((0, 0), (n, n)).copy_from(&(-to_complex(&sys.a)));
    for i in 0..n {
        out[(i, i)] += z;
    }
    out.view_mut((0, n), (n, m)).copy_from(&(-to_complex(&sys.b)));
    out.view_mut((n, 0), (p, n)).copy_from(&to_complex(&sys.c));
    out.view_mut((n, n), (p, m)).copy_from(&to_complex(&sys.d));
    out
}

/// Sampling radius `1 + ‖A‖_F`, which bounds the spectral radius of `A`.
pub fn sampling_radius<T: Real>(a: &DMatrix<T>) -> T {
    T::one() + a.norm()
}

/// Normal rank of a matrix-valued function: the maximum numerical rank over
/// `samples` seeded pseudo-random points on the circle of the given radius.
/// Points where `eval` fails (poles) are skipped; if every point fails the
/// radius is doubled, up to three times.
pub fn normal_rank<T, F>(eval: F, radius: T, samples: usize, seed: u64) -> Result<usize>
where
    T: Real,
    F: Fn(Cx<T>) -> Result<DMatrix<Cx<T>>>,
{
    let samples = samples.max(3);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut radius = radius;
    for _ in 0..4 {
        let mut best: Option<usize> = None;
        for _ in 0..samples {
            let theta: f64 = rng.gen_range(0.0..2.0 * PI);
            let z = cx(T::lit(theta.cos()), T::lit(theta.sin())) * radius;
            if let Ok(m) = eval(z) {
                let r = linalg::numerical_rank_c(&m);
                best = Some(best.map_or(r, |b| b.max(r)));
            }
        }
        if let Some(r) = best {
            return Ok(r);
        }
        radius *= T::lit(2.0);
    }
    Err(Error::SamplingFailure)
}

pub fn pencil_normal_rank<T: Real>(sys: &StateSpace<T>, opts: &ZeroOptions<T>) -> Result<usize> {
    normal_rank(|z| Ok(pencil_at(sys, z)), sampling_radius(&sys.a), opts.samples, opts.seed)
}

pub fn transfer_normal_rank<T: Real>(sys: &StateSpace<T>, opts: &ZeroOptions<T>) -> Result<usize> {
    let tol = opts.tol.pole_residual;
    normal_rank(
        |z| sys.transfer_at_with(z, tol),
        sampling_radius(&sys.a),
        opts.samples,
        opts.seed.wrapping_add(0x5eed),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankAt {
    pub rank: usize,
    pub normal_rank: usize,
}

/// Numerical rank of `Π(z)` alongside the pencil's normal rank.
pub fn rank_at<T: Real>(sys: &StateSpace<T>, z: Cx<T>, opts: &ZeroOptions<T>) -> Result<RankAt> {
    sys.check_dimensions()?;
    Ok(RankAt { rank: linalg::numerical_rank_c(&pencil_at(sys, z)), normal_rank: pencil_normal_rank(sys, opts)? })
}

/// Zero at infinity: `rank D < grk Γ`.
pub fn has_infinite_zero<T: Real>(report: &ZeroReport<T>) -> bool {
    report.rank_feedthrough < report.normal_rank_tf
}

/// `σ_r / max(σ_1, 1)` of `m` (1-based `r`); zero when `m` has fewer than `r`
/// singular values. The floor keeps a pencil that is almost entirely zero at
/// the point from reading as full rank.
pub(crate) fn sigma_ratio<T: Real>(m: &DMatrix<Cx<T>>, r: usize) -> T {
    let sv = linalg::singular_values(m);
    if r == 0 {
        return T::one();
    }
    match (sv.first(), sv.get(r - 1)) {
        (Some(&s1), Some(&sr)) => sr / s1.max(T::one()),
        _ => T::zero(),
    }
}

/// Square pencil `M(z) = M0 + z·M1`.
struct SquarePencil<T: Real> {
    m0: DMatrix<Cx<T>>,
    m1: DMatrix<Cx<T>>,
}

impl<T: Real> SquarePencil<T> {
    /// System pencil of `(A, B·V, W·C, W·D·V)`.
    fn squared(sys: &StateSpace<T>, w: Option<&DMatrix<T>>, v: Option<&DMatrix<T>>) -> Self {
        let b = v.map_or_else(|| sys.b.clone(), |v| &sys.b * v);
        let c = w.map_or_else(|| sys.c.clone(), |w| w * &sys.c);
        let d = match (w, v) {
            (Some(w), Some(v)) => w * &sys.d * v,
            (Some(w), None) => w * &sys.d,
            (None, Some(v)) => &sys.d * v,
            (None, None) => sys.d.clone(),
        };
        let sq = StateSpace::new(sys.a.clone(), b, c, d);
        let n = sq.states();
        let size = n + sq.inputs();
        let m0 = pencil_at(&sq, cx_re(T::zero()));
        let mut m1 = DMatrix::zeros(size, size);
        for i in 0..n {
            m1[(i, i)] = cx_re(T::one());
        }
        Self { m0, m1 }
    }

    fn at(&self, z: Cx<T>) -> DMatrix<Cx<T>> {
        &self.m0 + &self.m1 * z
    }

    /// Roots of `det M(z)`, interpolated from `k` samples on the circle of
    /// radius `radius`. Roots much smaller than the radius lose their low-order
    /// digits in the scaled coefficients, so the interpolation is repeated on a
    /// circle just enclosing the roots found, then refined on the pencil.
    fn det_roots(&self, radius: T, k: usize, tol: &Tolerances<T>) -> Result<Vec<Cx<T>>> {
        let (scaled, noise) = self.interpolate(radius, k);
        // the imaginary residue of a real determinant measures the sampling
        // noise; coefficients below it are not resolved
        let floor = T::lit(10.0) * noise / scaled.max_coeff().max(T::lit(1e-30));
        let scaled = scaled.trimmed(tol.degree.max(floor));
        if scaled.is_zero() {
            return Err(Error::Degenerate("determinant of the squared pencil vanishes identically".into()));
        }
        let degree = scaled.degree().unwrap_or(0);
        let mut roots: Vec<Cx<T>> = scaled.roots()?.into_iter().map(|w| w * radius).collect();
        let mut current = radius;
        for _ in 0..6 {
            let reach = roots.iter().map(|z| z.norm()).fold(T::zero(), |a, b| a.max(b));
            let next = (T::lit(1.25) * reach).max(T::lit(1e-2));
            if roots.is_empty() || next >= T::lit(0.9) * current {
                break;
            }
            let coeffs = self.interpolate(next, k).0.coeffs().iter().take(degree + 1).copied().collect();
            let poly = Polynomial::new(coeffs);
            if poly.degree() != Some(degree) {
                break;
            }
            roots = poly.roots()?.into_iter().map(|w| w * next).collect();
            current = next;
        }
        Ok(self.refine(&self.polish(&roots)))
    }

    /// Real part of the interpolant of `det M` in the scaled variable `z/radius`
    /// (the pencil is real, so the determinant has real coefficients), with
    /// the largest imaginary part discarded.
    fn interpolate(&self, radius: T, k: usize) -> (Polynomial<T>, T) {
        let values: Vec<Cx<T>> =
            circle_points(k, radius).into_iter().map(|z| self.at(z).lu().determinant()).collect();
        let coeffs = interpolate_on_circle(&values);
        let noise = coeffs.iter().map(|c| c.im.abs()).fold(T::zero(), |a, b| a.max(b));
        (Polynomial::new(coeffs).real_part(), noise)
    }

    /// Replaces each group of nearby roots by the roots recovered from contour
    /// moments `∮ z^p f'/f dz` of `f = det M` around the group. Multiple roots
    /// that interpolation split apart come back together, and poorly resolved
    /// isolated roots move onto the pencil's rank drop.
    fn refine(&self, roots: &[Cx<T>]) -> Vec<Cx<T>> {
        let points: Vec<ZeroCluster<T>> =
            roots.iter().map(|&z| ZeroCluster { location: z, multiplicity: 1 }).collect();
        let mut out: Vec<Cx<T>> = Vec::with_capacity(roots.len());
        for group in link_clusters(&points, T::lit(1e-2)) {
            let members: Vec<Cx<T>> = group.iter().map(|&i| roots[i]).collect();
            match self.contour_roots(roots, &group) {
                Some(found) => {
                    // a disc may reach a root already recovered by a neighbour
                    let earlier = out.len();
                    for z in found {
                        if !out[..earlier].iter().any(|w| (*w - z).norm() <= T::lit(1e-8) * (T::one() + z.norm())) {
                            out.push(z);
                        }
                    }
                }
                None => out.extend(members),
            }
        }
        out
    }

    fn contour_roots(&self, roots: &[Cx<T>], group: &[usize]) -> Option<Vec<Cx<T>>> {
        let members = T::from_usize(group.len()).unwrap();
        let center = group.iter().fold(cx_re(T::zero()), |acc, &i| acc + roots[i]) / members;
        let spread = group.iter().map(|&i| (roots[i] - center).norm()).fold(T::zero(), |a, b| a.max(b));
        let gap = (0..roots.len())
            .filter(|i| !group.contains(i))
            .map(|i| (roots[i] - center).norm())
            .fold(T::lit(f64::INFINITY), |a, b| a.min(b));
        // a tight disc first; if it misses, the widest disc that keeps the
        // other candidates out, for roots that interpolation moved far
        let tight = (T::lit(3.0) * spread).max(T::lit(1e-3) * (T::one() + center.norm())).min(gap / T::lit(2.0));
        [tight, gap / T::lit(2.0)]
            .into_iter()
            .filter(|&r| r.is_finite() && r > T::lit(1.5) * spread && r > T::zero())
            .find_map(|r| self.disc_roots(center, r, group.len() + 4))
    }

    /// Roots of `det M` inside the disc, from the contour moments.
    fn disc_roots(&self, center: Cx<T>, radius: T, cap: usize) -> Option<Vec<Cx<T>>> {
        const K: usize = 64;
        // sums[p] = (1/2πi) ∮ w^p f'/f dz with z = center + radius·w; the
        // disc may hold more or fewer roots than candidates
        let mut sums = vec![cx_re(T::zero()); cap + 1];
        for u in circle_points(K, T::one()) {
            let x = self.at(center + u * radius).lu().solve(&self.m1)?;
            let t = x.trace();
            if !t.re.is_finite() || !t.im.is_finite() {
                return None;
            }
            let mut wp = u * radius / T::from_usize(K).unwrap();
            for s in sums.iter_mut() {
                *s += t * wp;
                wp *= u;
            }
        }
        let found = sums[0].re.round();
        let count = found.to_usize()?;
        if (sums[0].re - found).abs() > T::lit(0.1) || sums[0].im.abs() > T::lit(0.1) || count == 0 || count > cap {
            return None;
        }
        // Newton's identities: power sums to elementary symmetric functions
        let mut e = vec![cx_re(T::one()); count + 1];
        for k in 1..=count {
            let mut acc = cx_re(T::zero());
            for i in 1..=k {
                let term = e[k - i] * sums[i];
                acc = if i % 2 == 1 { acc + term } else { acc - term };
            }
            e[k] = acc / T::from_usize(k).unwrap();
        }
        // monic w^count − e1 w^{count−1} + e2 … in ascending order
        let coeffs: Vec<Cx<T>> = (0..=count)
            .map(|j| {
                let k = count - j;
                if k % 2 == 0 { e[k] } else { -e[k] }
            })
            .collect();
        let ws = Polynomial::new(coeffs).roots().ok()?;
        Some(ws.into_iter().map(|w| center + w * radius).collect())
    }

    /// Simultaneous Aberth–Ehrlich correction of all roots, with `f'/f = tr(M(z)^{-1} M1)`
    /// taken from the pencil rather than from interpolated coefficients.
    fn polish(&self, roots: &[Cx<T>]) -> Vec<Cx<T>> {
        let mut z = roots.to_vec();
        let mut done = vec![false; z.len()];
        for _ in 0..200 {
            let mut moved = false;
            for i in 0..z.len() {
                if done[i] {
                    continue;
                }
                let Some(x) = self.at(z[i]).lu().solve(&self.m1) else {
                    done[i] = true;
                    continue;
                };
                let mut denom = x.trace();
                for j in 0..z.len() {
                    if j != i && z[j] != z[i] {
                        denom -= cx_re(T::one()) / (z[i] - z[j]);
                    }
                }
                let step = cx_re(T::one()) / denom;
                if !step.re.is_finite() || !step.im.is_finite() {
                    done[i] = true;
                    continue;
                }
                z[i] -= step;
                if step.norm() <= T::lit(4.0) * T::eps() * (T::one() + z[i].norm()) {
                    done[i] = true;
                } else {
                    moved = true;
                }
            }
            if !moved {
                break;
            }
        }
        z
    }
}

fn random_matrix<T: Real>(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<T> {
    DMatrix::from_fn(rows, cols, |_, _| T::lit(rng.gen_range(-1.0..1.0)))
}

/// Finite zeros, normal ranks and infinite/origin-zero flags of `(A, B, C, D)`.
pub fn invariant_zeros<T: Real>(sys: &StateSpace<T>, opts: &ZeroOptions<T>) -> Result<ZeroReport<T>> {
    sys.check_dimensions()?;
    let (n, m, p) = (sys.states(), sys.inputs(), sys.outputs());
    let tol = opts.tol;
    let normal_rank_pencil = pencil_normal_rank(sys, opts)?;
    if normal_rank_pencil == 0 {
        return Err(Error::Degenerate("system pencil has normal rank 0".into()));
    }
    let normal_rank_tf = transfer_normal_rank(sys, opts)?;
    let rank_feedthrough = linalg::numerical_rank(&sys.d);
    let has_infinite_zero = rank_feedthrough < normal_rank_tf;

    let mut diagnostics;
    let candidates: Vec<Cx<T>>;
    if n == 0 {
        diagnostics = Diagnostics::new(ZeroMethod::Static);
        candidates = Vec::new();
    } else {
        // Π has full row rank on the state rows, so its normal rank is n + k
        // with k = grk Γ.
        let k = normal_rank_pencil.saturating_sub(n);
        let radius = sampling_radius(&sys.a);
        let points = n + m.min(p) + 1;
        if m == p && k == m {
            diagnostics = Diagnostics::new(ZeroMethod::Determinant);
            diagnostics.multiplicity_heuristic = false;
            candidates = SquarePencil::squared(sys, None, None).det_roots(radius, points, &tol)?;
        } else {
            diagnostics = Diagnostics::new(ZeroMethod::SquareDown);
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0x9e37_79b9_7f4a_7c15);
            let mut draws = Vec::with_capacity(2);
            for _ in 0..2 {
                let w = (p != k).then(|| random_matrix::<T>(&mut rng, k, p));
                let v = (m != k).then(|| random_matrix::<T>(&mut rng, m, k));
                draws.push(SquarePencil::squared(sys, w.as_ref(), v.as_ref()).det_roots(radius, points, &tol)?);
            }
            candidates = intersect(&draws[0], &draws[1], tol.matching);
            diagnostics.notes.push(format!(
                "squared down from {}×{} to {}×{}; {} and {} candidates, {} common",
                p,
                m,
                k,
                k,
                draws[0].len(),
                draws[1].len(),
                candidates.len()
            ));
        }
        if n + normal_rank_tf != normal_rank_pencil {
            diagnostics.notes.push(format!(
                "normal rank of the pencil ({normal_rank_pencil}) differs from n + grk Γ ({})",
                n + normal_rank_tf
            ));
        }
    }

    let finite_zeros = confirm_candidates(&candidates, &tol, &mut diagnostics, |z| {
        sigma_ratio(&pencil_at(sys, z), normal_rank_pencil)
    });
    let mut finite_zeros = finite_zeros;
    let has_origin_zero =
        snap_origin(&mut finite_zeros, tol.cluster, &pencil_at(sys, cx_re(T::zero())), normal_rank_pencil);

    Ok(ZeroReport {
        finite_zeros,
        normal_rank_pencil,
        normal_rank_tf,
        rank_feedthrough,
        has_infinite_zero,
        has_origin_zero,
        diagnostics,
    })
}

/// Clusters candidates, keeps the clusters whose rank drop `ratio(z) ≤ confirm`
/// holds, then retries rejected neighbours merged at a looser radius: a root of
/// multiplicity `k` is perturbed by roughly `ε^{1/k}`, while the centroid of
/// the perturbed copies stays accurate.
pub(crate) fn confirm_candidates<T: Real>(
    candidates: &[Cx<T>],
    tol: &Tolerances<T>,
    diagnostics: &mut Diagnostics<T>,
    ratio: impl Fn(Cx<T>) -> T,
) -> Vec<ZeroCluster<T>> {
    let mut accepted = Vec::new();
    let mut pending = Vec::new();
    for cl in cluster_roots(candidates, tol.cluster) {
        let r = ratio(cl.location);
        if r <= tol.confirm {
            diagnostics.confirmations.push(Confirmation { location: cl.location, sigma_ratio: r, passed: true });
            accepted.push(cl);
        } else {
            pending.push(cl);
        }
    }
    if pending.len() > 1 {
        let loose = T::lit(1e-2).max(tol.cluster);
        let mut retry = Vec::new();
        for group in link_clusters(&pending, loose) {
            if group.len() == 1 {
                retry.push(pending[group[0]]);
                continue;
            }
            let multiplicity: usize = group.iter().map(|&i| pending[i].multiplicity).sum();
            let location = group
                .iter()
                .fold(cx_re(T::zero()), |acc, &i| acc + pending[i].location * T::from_usize(pending[i].multiplicity).unwrap())
                / T::from_usize(multiplicity).unwrap();
            let r = ratio(location);
            if r <= tol.confirm {
                diagnostics.notes.push(format!("merged {} nearby candidates into one zero", multiplicity));
                diagnostics.confirmations.push(Confirmation { location, sigma_ratio: r, passed: true });
                accepted.push(ZeroCluster { location, multiplicity });
            } else {
                retry.extend(group.iter().map(|&i| pending[i]));
            }
        }
        pending = retry;
    }
    for cl in pending {
        let r = ratio(cl.location);
        diagnostics.confirmations.push(Confirmation { location: cl.location, sigma_ratio: r, passed: false });
        diagnostics.rejected.push(cl.location);
    }
    crate::poly::sort_clusters(&mut accepted);
    accepted
}

/// Single-linkage groups (as index lists) of cluster locations within `rel·(1+|z|)`.
fn link_clusters<T: Real>(clusters: &[ZeroCluster<T>], rel: T) -> Vec<Vec<usize>> {
    let locations: Vec<Cx<T>> = clusters.iter().map(|c| c.location).collect();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut assigned = vec![false; locations.len()];
    for start in 0..locations.len() {
        if assigned[start] {
            continue;
        }
        assigned[start] = true;
        let mut group = vec![start];
        let mut k = 0;
        while k < group.len() {
            let z = locations[group[k]];
            for j in 0..locations.len() {
                let scale = T::one() + z.norm().max(locations[j].norm());
                if !assigned[j] && (locations[j] - z).norm() <= rel * scale {
                    assigned[j] = true;
                    group.push(j);
                }
            }
            k += 1;
        }
        groups.push(group);
    }
    groups
}

/// Moves a zero within `radius` of the origin exactly onto it when the matrix
/// at the origin loses rank at working precision; returns whether the origin
/// is a zero. The loose confirm tolerance is not enough here: a genuine zero
/// at `1e-7` would pass it.
pub(crate) fn snap_origin<T: Real>(
    zeros: &mut Vec<ZeroCluster<T>>,
    radius: T,
    at_origin: &DMatrix<Cx<T>>,
    normal_rank: usize,
) -> bool {
    let near: Vec<usize> = (0..zeros.len()).filter(|&i| zeros[i].location.norm() <= radius).collect();
    if near.is_empty() {
        return false;
    }
    let dim = T::from_usize(at_origin.nrows().max(at_origin.ncols())).unwrap();
    if sigma_ratio(at_origin, normal_rank) > T::lit(1e3) * dim * T::eps() {
        return false;
    }
    let multiplicity = near.iter().map(|&i| zeros[i].multiplicity).sum();
    for &i in near.iter().rev() {
        zeros.remove(i);
    }
    zeros.push(ZeroCluster { location: cx_re(T::zero()), multiplicity });
    crate::poly::sort_clusters(zeros);
    true
}

/// Multiset intersection of two candidate lists under optimal pairing;
/// matched pairs are replaced by their midpoint.
fn intersect<T: Real>(a: &[Cx<T>], b: &[Cx<T>], tol: T) -> Vec<Cx<T>> {
    matching::optimal_pairs(a, b)
        .into_iter()
        .filter(|&(_, _, d)| d <= tol)
        .map(|(i, j, _)| (a[i] + b[j]) * T::lit(0.5))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, cols: usize, v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(rows, cols, v)
    }

    fn scalar(a: f64, b: f64, c: f64, d: f64) -> StateSpace<f64> {
        StateSpace::new(m(1, 1, &[a]), m(1, 1, &[b]), m(1, 1, &[c]), m(1, 1, &[d]))
    }

    #[test]
    fn biproper_scalar_zero() {
        let r = invariant_zeros(&scalar(0.0, 1.0, 1.0, 1.0), &ZeroOptions::default()).unwrap();
        assert_eq!(r.finite_zeros.len(), 1);
        assert!((r.finite_zeros[0].location - cx_re(-1.0)).norm() < 1e-12);
        assert!(!r.has_infinite_zero);
        assert_eq!(r.diagnostics.method, ZeroMethod::Determinant);
    }

    #[test]
    fn pure_delay_has_only_infinite_zero() {
        let r = invariant_zeros(&scalar(0.0, 1.0, 1.0, 0.0), &ZeroOptions::default()).unwrap();
        assert!(r.finite_zeros.is_empty());
        assert!(r.has_infinite_zero);
        assert!(has_infinite_zero(&r));
        assert_eq!((r.normal_rank_pencil, r.normal_rank_tf), (2, 1));
    }

    #[test]
    fn zero_transfer_function_has_no_infinite_zero() {
        let r = invariant_zeros(&scalar(0.5, 0.0, 0.0, 0.0), &ZeroOptions::default()).unwrap();
        assert_eq!(r.normal_rank_tf, 0);
        assert!(!r.has_infinite_zero);
        // the uncontrollable and unobservable mode at 0.5 drops the rank of the pencil
        assert_eq!(r.zeros().len(), 1);
        assert!((r.zeros()[0] - cx_re(0.5)).norm() < 1e-12);
    }

    #[test]
    fn full_rank_d_excludes_infinite_zero() {
        let r = invariant_zeros(&scalar(0.3, 2.0, -1.0, 4.0), &ZeroOptions::default()).unwrap();
        assert!(!r.has_infinite_zero);
        // zero = a − b c / d
        assert!((r.zeros()[0] - cx_re(0.3 + 0.5)).norm() < 1e-12);
    }

    #[test]
    fn normal_rank_examples() {
        let one_entry = |z: Cx<f64>| {
            let mut g = DMatrix::zeros(2, 2);
            g[(0, 0)] = cx_re(1.0) / z;
            Ok(g)
        };
        assert_eq!(normal_rank(one_entry, 2.0, 7, 0).unwrap(), 1);
        assert_eq!(normal_rank(|_z: Cx<f64>| Ok(DMatrix::zeros(2, 2)), 2.0, 7, 0).unwrap(), 0);
        let always_pole = |_z: Cx<f64>| -> Result<DMatrix<Cx<f64>>> { Err(Error::SamplingFailure) };
        assert_eq!(normal_rank(always_pole, 2.0, 7, 0), Err(Error::SamplingFailure));
    }

    #[test]
    fn non_square_system_uses_square_down() {
        // two outputs measuring a single first-order mode; zero only where both vanish
        let sys = StateSpace::new(m(1, 1, &[0.5]), m(1, 1, &[1.0]), m(2, 1, &[1.0, 2.0]), m(2, 1, &[1.0, 2.0]));
        let r = invariant_zeros(&sys, &ZeroOptions::default()).unwrap();
        assert_eq!(r.diagnostics.method, ZeroMethod::SquareDown);
        // both rows are (z + 0.5)/(z − 0.5) up to scaling → common zero at −0.5
        assert_eq!(r.zeros().len(), 1);
        assert!((r.zeros()[0] - cx_re(-0.5)).norm() < 1e-10);
        let sys = StateSpace::new(m(1, 1, &[0.5]), m(1, 1, &[1.0]), m(2, 1, &[1.0, 0.0]), m(2, 1, &[1.0, 1.0]));
        let r = invariant_zeros(&sys, &ZeroOptions::default()).unwrap();
        assert!(r.finite_zeros.is_empty(), "{:?}", r.finite_zeros);
    }

    #[test]
    fn origin_zero_is_snapped() {
        // g = z/(z − 0.5) has a zero at the origin: a = 0.5, b = 1, c = 0.5, d = 1
        let r = invariant_zeros(&scalar(0.5, 1.0, 0.5, 1.0), &ZeroOptions::default()).unwrap();
        assert!(r.has_origin_zero);
        assert_eq!(r.zeros(), vec![cx_re(0.0)]);
    }

    #[test]
    fn degenerate_static_zero_system() {
        let sys = StateSpace::<f64>::new(DMatrix::zeros(0, 0), DMatrix::zeros(0, 1), DMatrix::zeros(1, 0), m(1, 1, &[0.0]));
        assert!(matches!(invariant_zeros(&sys, &ZeroOptions::default()), Err(Error::Degenerate(_))));
        let sys = StateSpace::<f64>::new(DMatrix::zeros(0, 0), DMatrix::zeros(0, 1), DMatrix::zeros(1, 0), m(1, 1, &[2.0]));
        let r = invariant_zeros(&sys, &ZeroOptions::default()).unwrap();
        assert!(r.finite_zeros.is_empty() && !r.has_infinite_zero);
    }

    #[test]
    fn rank_at_far_point_is_full() {
        let sys = scalar(0.2, 1.0, 1.0, 3.0);
        let r = rank_at(&sys, cx_re(1e3), &ZeroOptions::default()).unwrap();
        assert_eq!(r, RankAt { rank: 2, normal_rank: 2 });
    }
}
