//! Dense linear-algebra primitives at desk scale.
//!
//! Everything here is self-contained f64 code on `ndarray` matrices: a
//! Householder QR with and without column pivoting, the interpolative
//! decomposition with `‖G‖_max ≤ s` enforced by a swap loop, a truncated
//! pseudoinverse, a one-sided Jacobi SVD used as the dense oracle, a cyclic
//! Jacobi symmetric eigensolver, and a matrix-free power-iteration
//! spectral-norm estimator.

use ndarray::{s, Array1, Array2, ArrayView2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Entry guard for dense SVD ("desk scale"); larger requests should use the
/// matrix-free estimator instead.
pub const SVD_GUARD_ENTRIES: usize = 100_000_000;

/// Result of `M·Π = Q·R` with orthonormal `Q` and upper-triangular `R` whose
/// diagonal magnitudes are nonincreasing.
#[derive(Debug, Clone)]
pub struct ColPivQr {
    pub q: Array2<f64>,
    pub r: Array2<f64>,
    /// `perm[j]` is the original column index placed at position `j`.
    pub perm: Vec<usize>,
}

fn householder_vector(x: &mut [f64]) -> (f64, f64) {
    // Returns (beta, tau) and rewrites x[1..] into the reflector tail
    // (v with v[0] = 1 implicit), so that (I - tau v v^T) x = beta e1.
    let norm_tail: f64 = x[1..].iter().map(|v| v * v).sum::<f64>();
    let normx = (x[0] * x[0] + norm_tail).sqrt();
    if normx == 0.0 {
        return (0.0, 0.0);
    }
    let beta = if x[0] >= 0.0 { -normx } else { normx };
    let denom = x[0] - beta;
    for v in x[1..].iter_mut() {
        *v /= denom;
    }
    let tau = (beta - x[0]) / beta;
    (beta, tau)
}

fn qr_factor(a: &Array2<f64>, pivot: bool) -> ColPivQr {
    let (m, n) = a.dim();
    let k = m.min(n);
    let mut work = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut taus = vec![0.0f64; k];

    let mut colsq: Vec<f64> = (0..n)
        .map(|j| work.column(j).iter().map(|v| v * v).sum())
        .collect();
    let mut colsq_ref = colsq.clone();

    for j in 0..k {
        if pivot {
            let mut best = (f64::NEG_INFINITY, j);
            for c in j..n {
                if colsq[c] > best.0 {
                    best = (colsq[c], c);
                }
            }
            let p = best.1;
            if p != j {
                for row in 0..m {
                    work.swap([row, j], [row, p]);
                }
                perm.swap(j, p);
                colsq.swap(j, p);
                colsq_ref.swap(j, p);
            }
        }

        let (beta, tau) = {
            let mut col: Vec<f64> = (j..m).map(|row| work[[row, j]]).collect();
            let (beta, tau) = householder_vector(&mut col);
            for (off, &v) in col.iter().enumerate().skip(1) {
                work[[j + off, j]] = v;
            }
            (beta, tau)
        };
        taus[j] = tau;

        // Apply the reflector to the trailing columns.
        if tau != 0.0 {
            for c in j + 1..n {
                let mut w = work[[j, c]];
                for row in j + 1..m {
                    w += work[[row, j]] * work[[row, c]];
                }
                w *= tau;
                work[[j, c]] -= w;
                for row in j + 1..m {
                    let vj = work[[row, j]];
                    work[[row, c]] -= w * vj;
                }
            }
        }
        work[[j, j]] = beta;

        if pivot {
            // Downdate the remaining column norms; recompute on cancellation.
            for c in j + 1..n {
                let t = work[[j, c]];
                let down = colsq[c] - t * t;
                if down < 1e-8 * colsq_ref[c] {
                    let fresh: f64 = (j + 1..m).map(|row| work[[row, c]] * work[[row, c]]).sum();
                    colsq[c] = fresh;
                    colsq_ref[c] = fresh;
                } else {
                    colsq[c] = down;
                }
            }
        }
    }

    // Extract R (k x n upper triangle).
    let mut r = Array2::zeros((k, n));
    for i in 0..k {
        for c in i..n {
            r[[i, c]] = work[[i, c]];
        }
    }

    // Accumulate Q = H_0 ... H_{k-1} applied to the first k columns of I.
    let mut q = Array2::zeros((m, k));
    for i in 0..k {
        q[[i, i]] = 1.0;
    }
    for j in (0..k).rev() {
        let tau = taus[j];
        if tau == 0.0 {
            continue;
        }
        for c in 0..k {
            let mut w = q[[j, c]];
            for row in j + 1..m {
                w += work[[row, j]] * q[[row, c]];
            }
            w *= tau;
            q[[j, c]] -= w;
            for row in j + 1..m {
                let vj = work[[row, j]];
                q[[row, c]] -= w * vj;
            }
        }
    }

    ColPivQr { q, r, perm }
}

/// Column-pivoted Householder QR: `M·Π = Q·R`.
pub fn qr_column_pivoted(a: &Array2<f64>) -> ColPivQr {
    qr_factor(a, true)
}

/// Plain Householder QR: `M = Q·R`.
pub fn qr_plain(a: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
    let f = qr_factor(a, false);
    (f.q, f.r)
}

/// Solves `R11 · T = Rhs` for upper-triangular `R11`, zeroing solution rows
/// whose pivot is negligible relative to the largest diagonal.
fn solve_upper_guarded(r11: ArrayView2<f64>, rhs: ArrayView2<f64>) -> Array2<f64> {
    let k = r11.nrows();
    let p = rhs.ncols();
    let max_diag = (0..k).map(|i| r11[[i, i]].abs()).fold(0.0f64, f64::max);
    let tiny = 1e-14 * max_diag;
    let mut t = Array2::zeros((k, p));
    for i in (0..k).rev() {
        let pivot = r11[[i, i]];
        if pivot.abs() <= tiny {
            continue; // row stays zero: beyond the numerical rank
        }
        for c in 0..p {
            let mut v = rhs[[i, c]];
            for j in i + 1..k {
                v -= r11[[i, j]] * t[[j, c]];
            }
            t[[i, c]] = v / pivot;
        }
    }
    t
}

/// Row interpolative decomposition `M ≈ P [I; G] M_I` with `‖G‖_max ≤ s`.
#[derive(Debug, Clone)]
pub struct InterpolativeDecomposition {
    /// Skeleton rows of the input, in pivot order.
    pub row_indices: Vec<usize>,
    /// Coefficients of the non-skeleton rows, `(m − k) × k`.
    pub g: Array2<f64>,
    /// Full row permutation; `perm[..k]` equals `row_indices`.
    pub perm: Vec<usize>,
    /// The enforced bound `s`.
    pub bound: f64,
    pub rank: usize,
}

impl InterpolativeDecomposition {
    pub fn g_max(&self) -> f64 {
        self.g.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
    }

    /// The m×k matrix `U = P [I; G]`.
    pub fn u_matrix(&self) -> Array2<f64> {
        let k = self.rank;
        let m = self.perm.len();
        let mut u = Array2::zeros((m, k));
        for (i, &row) in self.perm.iter().enumerate() {
            if i < k {
                u[[row, i]] = 1.0;
            } else {
                for j in 0..k {
                    u[[row, j]] = self.g[[i - k, j]];
                }
            }
        }
        u
    }

    /// Reconstructs the full matrix from its skeleton rows.
    pub fn reconstruct(&self, skeleton_rows: &Array2<f64>) -> Array2<f64> {
        self.u_matrix().dot(skeleton_rows)
    }
}

/// Computes a rank-`k` row ID of `M` (m×r) with `‖G‖_max ≤ s` via
/// column-pivoted QR on `Mᵀ` followed by the strong-RRQR swap loop: while any
/// coefficient exceeds `s`, swap the offending row into the skeleton and
/// re-factor (each swap grows the skeleton volume by more than s > 1, so the
/// loop terminates).
pub fn interpolative_decomposition(
    m: &Array2<f64>,
    k: usize,
    s_bound: f64,
) -> Result<InterpolativeDecomposition> {
    let (rows, cols) = m.dim();
    if k == 0 || k > rows.min(cols) {
        return Err(Error::RankOutOfRange { rank: k, rows, cols });
    }
    if s_bound <= 1.0 {
        return Err(Error::InvalidConfig(format!("ID bound s must be > 1, got {s_bound}")));
    }

    let at = m.t().to_owned(); // r × m; columns are rows of M
    let piv = qr_column_pivoted(&at);
    let mut perm = piv.perm;
    let mut rfac = piv.r;

    let max_swaps = 60 * rows.max(8);
    for _ in 0..=max_swaps {
        let r11 = rfac.slice(s![..k, ..k]);
        let r12 = rfac.slice(s![..k, k..]);
        let t = solve_upper_guarded(r11, r12);

        // First violation in row-major scan order keeps the loop deterministic.
        let mut violation: Option<(usize, usize)> = None;
        'scan: for a in 0..k {
            for b in 0..t.ncols() {
                if t[[a, b]].abs() > s_bound {
                    violation = Some((a, b));
                    break 'scan;
                }
            }
        }

        match violation {
            None => {
                let g = t.t().to_owned();
                let row_indices = perm[..k].to_vec();
                return Ok(InterpolativeDecomposition {
                    row_indices,
                    g,
                    perm,
                    bound: s_bound,
                    rank: k,
                });
            }
            Some((a, b)) => {
                perm.swap(a, k + b);
                let permuted = gather_columns(&at, &perm);
                rfac = qr_plain(&permuted).1;
            }
        }
    }
    Err(Error::InvalidConfig(
        "interpolative decomposition swap loop failed to converge".into(),
    ))
}

fn gather_columns(a: &Array2<f64>, order: &[usize]) -> Array2<f64> {
    let m = a.nrows();
    let mut out = Array2::zeros((m, order.len()));
    for (c, &j) in order.iter().enumerate() {
        out.column_mut(c).assign(&a.column(j));
    }
    out
}

/// Stabilized pseudoinverse of `M = Q·R`: singular values of `R` below
/// `epsilon` (relative to the largest) are dropped before inversion.
#[derive(Debug, Clone)]
pub struct TruncatedPinv {
    pub q: Array2<f64>,
    /// `R_ε⁺`, shape n × k for an m×n input with k = min(m, n).
    pub r_pinv: Array2<f64>,
    pub epsilon: f64,
    pub effective_rank: usize,
}

impl TruncatedPinv {
    /// The full n×m operator `R_ε⁺ · Qᵀ`.
    pub fn operator(&self) -> Array2<f64> {
        self.r_pinv.dot(&self.q.t())
    }
}

pub fn truncated_pinv(m: &Array2<f64>, epsilon: f64) -> Result<TruncatedPinv> {
    if epsilon < 0.0 {
        return Err(Error::InvalidConfig(format!("epsilon must be >= 0, got {epsilon}")));
    }
    let (q, r) = qr_plain(m);
    let svd = svd_dense(&r)?;
    let cutoff = epsilon * svd.s.first().copied().unwrap_or(0.0);
    let kept: Vec<usize> = svd
        .s
        .iter()
        .enumerate()
        .filter(|(_, &sv)| sv > cutoff && sv > 0.0)
        .map(|(i, _)| i)
        .collect();

    // R_ε⁺ = V Σ_ε⁺ Uᵀ restricted to the kept singular triplets.
    let n = r.ncols();
    let k = r.nrows();
    let mut r_pinv = Array2::zeros((n, k));
    for &i in &kept {
        let inv = 1.0 / svd.s[i];
        for a in 0..n {
            let v_ai = svd.vt[[i, a]];
            if v_ai == 0.0 {
                continue;
            }
            for b in 0..k {
                r_pinv[[a, b]] += v_ai * inv * svd.u[[b, i]];
            }
        }
    }
    Ok(TruncatedPinv { q, r_pinv, epsilon, effective_rank: kept.len() })
}

/// Thin singular value decomposition `M = U · diag(s) · Vᵀ`.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: Array2<f64>,
    /// Nonincreasing, length min(m, n).
    pub s: Vec<f64>,
    pub vt: Array2<f64>,
}

/// One-sided Jacobi SVD. Deterministic, high relative accuracy; intended for
/// desk-scale oracles rather than performance.
pub fn svd_dense(m: &Array2<f64>) -> Result<Svd> {
    let (rows, cols) = m.dim();
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyInput("svd input"));
    }
    if rows * cols > SVD_GUARD_ENTRIES {
        return Err(Error::SizeGuardExceeded {
            rows,
            cols,
            guard: SVD_GUARD_ENTRIES,
        });
    }
    if rows < cols {
        let svd = svd_dense(&m.t().to_owned())?;
        return Ok(Svd { u: svd.vt.t().to_owned(), s: svd.s, vt: svd.u.t().to_owned() });
    }

    let n = cols;
    // Work on rows of Mᵀ so the rotated pairs are contiguous.
    let mut at = m.t().to_owned().as_standard_layout().to_owned();
    let mut vt = Array2::eye(n);

    const MAX_SWEEPS: usize = 60;
    const TOL: f64 = 1e-15;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let (app, aqq, apq) = {
                    let rp = at.row(p);
                    let rq = at.row(q);
                    let app = rp.dot(&rp);
                    let aqq = rq.dot(&rq);
                    let apq = rp.dot(&rq);
                    (app, aqq, apq)
                };
                if app == 0.0 || aqq == 0.0 {
                    continue;
                }
                if apq.abs() <= TOL * (app * aqq).sqrt() {
                    continue;
                }
                rotated = true;
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                rotate_rows(&mut at, p, q, c, sn);
                rotate_rows(&mut vt, p, q, c, sn);
            }
        }
        if !rotated {
            break;
        }
    }

    // Singular values are the row norms; sort descending (stable).
    let mut order: Vec<usize> = (0..n).collect();
    let norms: Vec<f64> = (0..n).map(|i| at.row(i).dot(&at.row(i)).sqrt()).collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());

    let mut u = Array2::zeros((rows, n));
    let mut s = Vec::with_capacity(n);
    let mut vt_out = Array2::zeros((n, n));
    for (slot, &i) in order.iter().enumerate() {
        let sv = norms[i];
        s.push(sv);
        if sv > 0.0 {
            for r in 0..rows {
                u[[r, slot]] = at[[i, r]] / sv;
            }
        }
        vt_out.row_mut(slot).assign(&vt.row(i));
    }
    Ok(Svd { u, s, vt: vt_out })
}

fn rotate_rows(a: &mut Array2<f64>, p: usize, q: usize, c: f64, sn: f64) {
    let ncols = a.ncols();
    for j in 0..ncols {
        let ap = a[[p, j]];
        let aq = a[[q, j]];
        a[[p, j]] = c * ap - sn * aq;
        a[[q, j]] = c * aq + sn * ap;
    }
}

/// Spectral norm via the dense SVD oracle.
pub fn spectral_norm(m: &Array2<f64>) -> Result<f64> {
    Ok(svd_dense(m)?.s.first().copied().unwrap_or(0.0))
}

/// The relative Eckart-Young floor `σ_{r+1} / σ₁`.
pub fn best_rank_r_error(m: &Array2<f64>, r: usize) -> Result<f64> {
    let svd = svd_dense(m)?;
    let s1 = svd.s.first().copied().unwrap_or(0.0);
    if s1 == 0.0 || r >= svd.s.len() {
        return Ok(0.0);
    }
    Ok(svd.s[r] / s1)
}

/// Standard zero cutoff for pseudoinverse ranks: σ ≤ max(m,n)·ε·σ₁.
pub fn pinv_cutoff(dim_max: usize, s1: f64) -> f64 {
    dim_max as f64 * f64::EPSILON * s1
}

/// Moore-Penrose pseudoinverse via SVD with the standard zero cutoff.
pub fn pinv_dense(m: &Array2<f64>) -> Result<Array2<f64>> {
    let (rows, cols) = m.dim();
    let svd = svd_dense(m)?;
    let cutoff = pinv_cutoff(rows.max(cols), svd.s.first().copied().unwrap_or(0.0));
    let mut out = Array2::zeros((cols, rows));
    for (i, &sv) in svd.s.iter().enumerate() {
        if sv <= cutoff {
            continue;
        }
        let inv = 1.0 / sv;
        for a in 0..cols {
            let v_ai = svd.vt[[i, a]];
            if v_ai == 0.0 {
                continue;
            }
            for b in 0..rows {
                out[[a, b]] += v_ai * inv * svd.u[[b, i]];
            }
        }
    }
    Ok(out)
}

/// `‖M⁺‖₂ = 1/σ_min` over the nonzero singular values (0 for a zero matrix).
pub fn pinv_norm(m: &Array2<f64>) -> Result<f64> {
    let (rows, cols) = m.dim();
    let svd = svd_dense(m)?;
    let cutoff = pinv_cutoff(rows.max(cols), svd.s.first().copied().unwrap_or(0.0));
    let smallest_kept = svd.s.iter().rev().find(|&&sv| sv > cutoff);
    Ok(smallest_kept.map_or(0.0, |&sv| 1.0 / sv))
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi, ascending order.
pub fn symmetric_eigenvalues(a: &Array2<f64>) -> Result<Vec<f64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch(n, a.ncols()));
    }
    let mut b = a.clone();
    const MAX_SWEEPS: usize = 100;
    let frob: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let tol = 1e-15 * frob.max(f64::MIN_POSITIVE);
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(b[[p, q]].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let apq = b[[p, q]];
                if apq.abs() <= tol {
                    continue;
                }
                let app = b[[p, p]];
                let aqq = b[[q, q]];
                let tau = (aqq - app) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                // B <- Jᵀ B J on rows and columns p, q.
                for j in 0..n {
                    let bpj = b[[p, j]];
                    let bqj = b[[q, j]];
                    b[[p, j]] = c * bpj - sn * bqj;
                    b[[q, j]] = c * bqj + sn * bpj;
                }
                for i in 0..n {
                    let bip = b[[i, p]];
                    let biq = b[[i, q]];
                    b[[i, p]] = c * bip - sn * biq;
                    b[[i, q]] = c * biq + sn * bip;
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| b[[i, i]]).collect();
    eigs.sort_by(f64::total_cmp);
    Ok(eigs)
}

/// Matrix-free spectral-norm estimate by alternating power iteration on
/// `AᵀA`, with a seeded start vector. Converges from below.
pub fn spectral_norm_matfree(
    apply: &dyn Fn(&Array1<f64>) -> Array1<f64>,
    apply_t: &dyn Fn(&Array1<f64>) -> Array1<f64>,
    ncols: usize,
    seed: u64,
    max_iters: usize,
    rel_tol: f64,
) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = Array1::from_iter((0..ncols).map(|_| rng.gen::<f64>() - 0.5));
    let nrm = v.dot(&v).sqrt();
    if nrm == 0.0 {
        return 0.0;
    }
    v /= nrm;
    let mut sigma = 0.0f64;
    for _ in 0..max_iters {
        let w = apply(&v);
        let wn = w.dot(&w).sqrt();
        if wn == 0.0 {
            return 0.0;
        }
        let z = apply_t(&(w / wn));
        let zn = z.dot(&z).sqrt();
        if zn == 0.0 {
            return 0.0;
        }
        let prev = sigma;
        sigma = zn;
        v = z / zn;
        if (sigma - prev).abs() <= rel_tol * sigma {
            break;
        }
    }
    sigma
}

/// Dense convenience wrapper around [`spectral_norm_matfree`].
pub fn spectral_norm_power(m: &Array2<f64>, seed: u64, max_iters: usize, rel_tol: f64) -> f64 {
    let apply = |v: &Array1<f64>| m.dot(v);
    let apply_t = |v: &Array1<f64>| m.t().dot(v);
    spectral_norm_matfree(&apply, &apply_t, m.ncols(), seed, max_iters, rel_tol)
}

/// Entrywise maximum absolute value.
pub fn max_norm(m: &Array2<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, &v| a.max(v.abs()))
}

/// Frobenius norm.
pub fn fro_norm(m: &Array2<f64>) -> f64 {
    m.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Row gather helper shared by the factorization code.
pub(crate) fn gather_rows(a: &Array2<f64>, order: &[usize]) -> Array2<f64> {
    let mut out = Array2::zeros((order.len(), a.ncols()));
    for (r, &i) in order.iter().enumerate() {
        out.row_mut(r).assign(&a.row(i));
    }
    out
}
