//! The data-driven factorization algorithms and the ACA baseline.
//!
//! All four methods produce a common [`LowRankFactorization`] supporting
//! matvec and dense reconstruction at desk scale:
//!
//! - two-sided: `K ≈ K_XS₂ · K_S₁S₂⁺ · K_S₁Y`, optionally through the
//!   truncated-QR stabilization `(K_XS₂ R_ε⁺)(Qᵀ K_S₁Y)`;
//! - one-sided: geometric sampling of one set followed by an interpolative
//!   decomposition of the sampled block, `K ≈ U · K_IY`;
//! - symmetric: `K_XX ≈ U · K_II · Uᵀ`, preserving symmetry and positive
//!   semi-definiteness;
//! - ACA with partial pivoting, evaluating only the crosses it uses.

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use crate::kernels::KernelMatrixHandle;
use crate::linalg::{
    self, interpolative_decomposition, max_norm, svd_dense, truncated_pinv,
};
use crate::pointset::sq_dist_unchecked;
use crate::selectors::{select, SelectorConfig, SubsetSelection};
use crate::{Error, Result};

/// Default entry guard for dense error evaluation.
pub const DEFAULT_DENSE_GUARD: usize = 2_000_000;

/// Norms accepted by [`evaluate_error`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ErrorNorm {
    /// `‖K − K̃‖₂ / ‖K‖₂` via the dense SVD oracle.
    Rel2,
    /// Entrywise max of `K − K̃`.
    MaxNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorMethod {
    TwoSided,
    OneSided,
    Symmetric,
    Aca,
}

/// Which set the one-sided method samples geometrically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Side {
    SampleY,
    SampleX,
}

/// Start-row policy for ACA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AcaStart {
    /// Row whose point is farthest from the centroid of Y (deterministic).
    FarthestFromYCentroid,
    Row(usize),
}

/// Subset indices that produced a factorization.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub s1: Option<Vec<usize>>,
    pub s2: Option<Vec<usize>>,
    pub skeleton: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stabilization {
    pub epsilon: f64,
    pub effective_rank: usize,
}

/// A factor pair (plus an optional middle block for the symmetric method)
/// with rank, method tag and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankFactorization {
    left: Array2<f64>,
    middle: Option<Array2<f64>>,
    right: Array2<f64>,
    rank: usize,
    pub method: FactorMethod,
    pub provenance: Provenance,
    pub stabilization: Option<Stabilization>,
    /// Set when ACA hit a zero pivot before reaching the requested rank.
    pub rank_shortfall: bool,
}

impl LowRankFactorization {
    fn new(
        left: Array2<f64>,
        middle: Option<Array2<f64>>,
        right: Array2<f64>,
        rank: usize,
        method: FactorMethod,
    ) -> Self {
        debug_assert_eq!(left.ncols(), middle.as_ref().map_or(right.nrows(), |m| m.nrows()));
        Self {
            left,
            middle,
            right,
            rank,
            method,
            provenance: Provenance::default(),
            stabilization: None,
            rank_shortfall: false,
        }
    }

    /// The rank-0 factorization of an m×n matrix (reconstructs to zero).
    pub fn empty(m: usize, n: usize, method: FactorMethod) -> Self {
        Self::new(Array2::zeros((m, 0)), None, Array2::zeros((0, n)), 0, method)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.left.nrows(), self.right.ncols())
    }

    /// Reported numerical rank (for the stabilized two-sided method this is
    /// the effective rank after truncation, which may be below the factor
    /// width).
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn left(&self) -> &Array2<f64> {
        &self.left
    }

    pub fn right(&self) -> &Array2<f64> {
        &self.right
    }

    pub fn middle(&self) -> Option<&Array2<f64>> {
        self.middle.as_ref()
    }

    /// `K̃ · v` without forming the dense reconstruction.
    pub fn matvec(&self, v: &Array1<f64>) -> Array1<f64> {
        let mut w = self.right.dot(v);
        if let Some(mid) = &self.middle {
            w = mid.dot(&w);
        }
        self.left.dot(&w)
    }

    /// `K̃ᵀ · v`.
    pub fn matvec_t(&self, v: &Array1<f64>) -> Array1<f64> {
        let mut w = self.left.t().dot(v);
        if let Some(mid) = &self.middle {
            w = mid.t().dot(&w);
        }
        self.right.t().dot(&w)
    }

    /// Dense reconstruction. For the symmetric method the result is exactly
    /// symmetric: the upper triangle is computed once and mirrored.
    pub fn reconstruct(&self) -> Array2<f64> {
        match &self.middle {
            None => self.left.dot(&self.right),
            Some(mid) => {
                let n = self.left.nrows();
                let w = self.left.dot(mid); // n × r
                let mut out = Array2::zeros((n, n));
                for i in 0..n {
                    for j in i..n {
                        let v = w.row(i).dot(&self.left.row(j));
                        out[[i, j]] = v;
                        out[[j, i]] = v;
                    }
                }
                out
            }
        }
    }
}

fn validate_selection(sel: &SubsetSelection, len: usize, what: &'static str) -> Result<()> {
    if sel.is_empty() {
        return Err(Error::EmptyInput(what));
    }
    if sel.source_len() != len {
        return Err(Error::InvalidConfig(format!(
            "{what}: selection made over {} points, handle set has {}",
            sel.source_len(),
            len
        )));
    }
    Ok(())
}

/// Two-sided compression `K ≈ K_XS₂ · K_S₁S₂⁺ · K_S₁Y`.
///
/// Only the three blocks named in the formula are ever evaluated. With
/// `stabilize` the pseudoinverse is replaced by the truncated-QR form
/// `(K_XS₂ R_ε⁺)(Qᵀ K_S₁Y)`, which caps the blow-up for poorly chosen
/// subsets.
pub fn two_sided(
    h: &KernelMatrixHandle,
    s1: &SubsetSelection,
    s2: &SubsetSelection,
    stabilize: bool,
    epsilon: f64,
) -> Result<LowRankFactorization> {
    let (m, n) = h.shape();
    validate_selection(s1, m, "two-sided S1")?;
    validate_selection(s2, n, "two-sided S2")?;
    let all_rows: Vec<usize> = (0..m).collect();
    let all_cols: Vec<usize> = (0..n).collect();

    let k_xs2 = h.eval_block(&all_rows, s2.indices())?;
    let k_s1s2 = h.eval_block(s1.indices(), s2.indices())?;
    let k_s1y = h.eval_block(s1.indices(), &all_cols)?;

    let r1 = s1.len();
    let r2 = s2.len();
    let mut f = if stabilize {
        let tp = truncated_pinv(&k_s1s2, epsilon)?;
        let rank = tp.effective_rank.min(r1).min(r2);
        let left = k_xs2.dot(&tp.r_pinv);
        let right = tp.q.t().dot(&k_s1y);
        let mut f = LowRankFactorization::new(left, None, right, rank, FactorMethod::TwoSided);
        f.stabilization = Some(Stabilization { epsilon, effective_rank: tp.effective_rank });
        f
    } else {
        // Exact pseudoinverse with the standard zero cutoff.
        let svd = svd_dense(&k_s1s2)?;
        let cutoff = linalg::pinv_cutoff(r1.max(r2), svd.s.first().copied().unwrap_or(0.0));
        let mut pinv = Array2::zeros((r2, r1));
        let mut effective = 0usize;
        for (i, &sv) in svd.s.iter().enumerate() {
            if sv <= cutoff {
                continue;
            }
            effective += 1;
            let inv = 1.0 / sv;
            for a in 0..r2 {
                let v_ai = svd.vt[[i, a]];
                if v_ai == 0.0 {
                    continue;
                }
                for b in 0..r1 {
                    pinv[[a, b]] += v_ai * inv * svd.u[[b, i]];
                }
            }
        }
        let left = k_xs2.dot(&pinv);
        let rank = effective.min(r1).min(r2);
        LowRankFactorization::new(left, None, k_s1y, rank, FactorMethod::TwoSided)
    };
    f.provenance = Provenance {
        s1: Some(s1.indices().to_vec()),
        s2: Some(s2.indices().to_vec()),
        skeleton: None,
    };
    Ok(f)
}

fn oversampled_count(r: usize, rho: f64, available: usize) -> Result<usize> {
    if rho < 1.0 {
        return Err(Error::InvalidConfig(format!("oversampling factor must be >= 1, got {rho}")));
    }
    Ok(((rho * r as f64).ceil() as usize).min(available))
}

/// One-sided compression: geometric selection of `min(ceil(ρ·r), n)` sample
/// points from one set, then a rank-`r` interpolative decomposition of the
/// sampled block with `‖G‖_max ≤ 2`.
pub fn one_sided(
    h: &KernelMatrixHandle,
    side: Side,
    r: usize,
    rho: f64,
    selector: &SelectorConfig,
) -> Result<LowRankFactorization> {
    let (m, n) = h.shape();
    if r == 0 {
        return Err(Error::RankOutOfRange { rank: r, rows: m, cols: n });
    }
    match side {
        Side::SampleY => {
            let sample = oversampled_count(r, rho, n)?;
            if r > sample || r > m {
                return Err(Error::RankOutOfRange { rank: r, rows: m, cols: sample });
            }
            let s2 = select(h.y(), sample, selector)?;
            let all_rows: Vec<usize> = (0..m).collect();
            let k_xs2 = h.eval_block(&all_rows, s2.indices())?;
            let id = interpolative_decomposition(&k_xs2, r, 2.0)?;
            let all_cols: Vec<usize> = (0..n).collect();
            let right = h.eval_block(&id.row_indices, &all_cols)?;
            let left = id.u_matrix();
            let mut f = LowRankFactorization::new(left, None, right, r, FactorMethod::OneSided);
            f.provenance = Provenance {
                s1: None,
                s2: Some(s2.indices().to_vec()),
                skeleton: Some(id.row_indices),
            };
            Ok(f)
        }
        Side::SampleX => {
            // Algorithm applied to Kᵀ: select S1 from X, ID picks a skeleton
            // in Y, and K ≈ K_XI₂ · Uᵀ.
            let sample = oversampled_count(r, rho, m)?;
            if r > sample || r > n {
                return Err(Error::RankOutOfRange { rank: r, rows: n, cols: sample });
            }
            let s1 = select(h.x(), sample, selector)?;
            let all_cols: Vec<usize> = (0..n).collect();
            let k_s1y = h.eval_block(s1.indices(), &all_cols)?;
            let id = interpolative_decomposition(&k_s1y.t().to_owned(), r, 2.0)?;
            let all_rows: Vec<usize> = (0..m).collect();
            let left = h.eval_block(&all_rows, &id.row_indices)?;
            let right = id.u_matrix().t().to_owned();
            let mut f = LowRankFactorization::new(left, None, right, r, FactorMethod::OneSided);
            f.provenance = Provenance {
                s1: Some(s1.indices().to_vec()),
                s2: None,
                skeleton: Some(id.row_indices),
            };
            Ok(f)
        }
    }
}

/// Symmetric compression `K_XX ≈ U · K_II · Uᵀ` for one set of points and a
/// symmetric kernel. Symmetry of the reconstruction is structural; positive
/// semi-definiteness of `K` is inherited because `K_II` is a principal
/// submatrix.
pub fn symmetric(
    h: &KernelMatrixHandle,
    r: usize,
    rho: f64,
    selector: &SelectorConfig,
) -> Result<LowRankFactorization> {
    if !h.kernel().is_symmetric() {
        return Err(Error::NotSymmetric(format!(
            "kernel '{}' is not symmetric",
            h.kernel().name()
        )));
    }
    if h.x() != h.y() {
        return Err(Error::NotSymmetric("point sets X and Y differ".into()));
    }
    let n = h.x().len();
    if r == 0 || r > n {
        return Err(Error::RankOutOfRange { rank: r, rows: n, cols: n });
    }
    let sample = oversampled_count(r, rho, n)?;
    if r > sample {
        return Err(Error::RankOutOfRange { rank: r, rows: n, cols: sample });
    }
    let s = select(h.x(), sample, selector)?;
    let all_rows: Vec<usize> = (0..n).collect();
    let k_xs = h.eval_block(&all_rows, s.indices())?;
    let id = interpolative_decomposition(&k_xs, r, 2.0)?;
    let k_ii = h.eval_block(&id.row_indices, &id.row_indices)?;
    let u = id.u_matrix();
    let right = u.t().to_owned();
    let mut f =
        LowRankFactorization::new(u, Some(k_ii), right, r, FactorMethod::Symmetric);
    f.provenance = Provenance {
        s1: None,
        s2: Some(s.indices().to_vec()),
        skeleton: Some(id.row_indices),
    };
    Ok(f)
}

/// ACA with partial pivoting: at each step the pivot column maximizes the
/// residual in the current row and the next pivot row maximizes the residual
/// in that column. Only the crossed rows and columns are ever evaluated; the
/// residual is carried implicitly through the accumulated rank-1 terms.
///
/// On a (near-)zero pivot the scan falls back to the next unused row; if all
/// rows are exhausted the factorization is returned at its achieved rank with
/// `rank_shortfall` set.
pub fn aca(h: &KernelMatrixHandle, r: usize, start: AcaStart) -> Result<LowRankFactorization> {
    let (m, n) = h.shape();
    if r == 0 || r > m.min(n) {
        return Err(Error::RankOutOfRange { rank: r, rows: m, cols: n });
    }

    let start_row = match start {
        AcaStart::Row(i) => {
            if i >= m {
                return Err(Error::IndexOutOfBounds { index: i, len: m });
            }
            i
        }
        AcaStart::FarthestFromYCentroid => {
            let c = h.y().centroid();
            let mut best = (f64::NEG_INFINITY, 0usize);
            for (i, p) in h.x().iter().enumerate() {
                let d = sq_dist_unchecked(p, &c);
                if d > best.0 {
                    best = (d, i);
                }
            }
            best.1
        }
    };

    let mut cols_u: Vec<Vec<f64>> = Vec::with_capacity(r); // residual columns, length m
    let mut rows_v: Vec<Vec<f64>> = Vec::with_capacity(r); // scaled residual rows, length n
    let mut used_row = vec![false; m];
    let mut used_col = vec![false; n];
    let mut pivot_scale = 0.0f64;
    let mut shortfall = false;

    let residual_row = |i: usize, cols_u: &[Vec<f64>], rows_v: &[Vec<f64>]| -> Result<Vec<f64>> {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let mut v = h.eval_entry(i, j)?;
            for (u, w) in cols_u.iter().zip(rows_v) {
                v -= u[i] * w[j];
            }
            row.push(v);
        }
        Ok(row)
    };

    let mut next_row = Some(start_row);
    while cols_u.len() < r {
        // Find a usable pivot row, falling back over unused rows on
        // numerically dead residual rows.
        let mut pivot: Option<(usize, usize, f64, Vec<f64>)> = None;
        let mut candidate = next_row.take();
        loop {
            let i = match candidate.take() {
                Some(i) if !used_row[i] => i,
                _ => match (0..m).find(|&i| !used_row[i]) {
                    Some(i) => i,
                    None => break,
                },
            };
            let row = residual_row(i, &cols_u, &rows_v)?;
            let mut best = (f64::NEG_INFINITY, usize::MAX);
            for (j, &v) in row.iter().enumerate() {
                if !used_col[j] && v.abs() > best.0 {
                    best = (v.abs(), j);
                }
            }
            let (mag, j) = best;
            let dead = mag <= 1e-14 * pivot_scale || mag == 0.0;
            if !dead {
                pivot = Some((i, j, row[j], row));
                break;
            }
            // Dead row: mark used and try the next unused one.
            used_row[i] = true;
            if (0..m).all(|i| used_row[i]) {
                break;
            }
        }

        let Some((i, j, piv, row)) = pivot else {
            shortfall = true;
            break;
        };
        if pivot_scale == 0.0 {
            pivot_scale = piv.abs();
        }

        let mut col = Vec::with_capacity(m);
        for a in 0..m {
            let mut v = h.eval_entry(a, j)?;
            for (u, w) in cols_u.iter().zip(&rows_v) {
                v -= u[a] * w[j];
            }
            col.push(v);
        }
        let scaled_row: Vec<f64> = row.iter().map(|v| v / piv).collect();

        used_row[i] = true;
        used_col[j] = true;

        // Next pivot row: largest residual in the pivot column.
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for (a, &v) in col.iter().enumerate() {
            if !used_row[a] && v.abs() > best.0 {
                best = (v.abs(), a);
            }
        }
        next_row = (best.1 != usize::MAX).then_some(best.1);

        cols_u.push(col);
        rows_v.push(scaled_row);

        if next_row.is_none() && cols_u.len() < r {
            shortfall = true;
            break;
        }
    }

    let achieved = cols_u.len();
    let mut left = Array2::zeros((m, achieved));
    let mut right = Array2::zeros((achieved, n));
    for (t, col) in cols_u.iter().enumerate() {
        for (a, &v) in col.iter().enumerate() {
            left[[a, t]] = v;
        }
    }
    for (t, row) in rows_v.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            right[[t, j]] = v;
        }
    }
    let mut f = LowRankFactorization::new(left, None, right, achieved, FactorMethod::Aca);
    f.rank_shortfall = shortfall;
    Ok(f)
}

/// Exact error of a factorization against the dense kernel matrix, guarded
/// to desk scale ([`DEFAULT_DENSE_GUARD`] entries).
pub fn evaluate_error(
    f: &LowRankFactorization,
    h: &KernelMatrixHandle,
    norm: ErrorNorm,
) -> Result<f64> {
    evaluate_error_with_guard(f, h, norm, DEFAULT_DENSE_GUARD)
}

pub fn evaluate_error_with_guard(
    f: &LowRankFactorization,
    h: &KernelMatrixHandle,
    norm: ErrorNorm,
    guard: usize,
) -> Result<f64> {
    let (m, n) = h.shape();
    if f.shape() != (m, n) {
        return Err(Error::InvalidConfig(format!(
            "factorization shape {:?} does not match handle shape {:?}",
            f.shape(),
            h.shape()
        )));
    }
    if m.saturating_mul(n) > guard {
        return Err(Error::SizeGuardExceeded { rows: m, cols: n, guard });
    }
    let k = h.eval_full()?;
    let diff = &k - &f.reconstruct();
    match norm {
        ErrorNorm::MaxNorm => Ok(max_norm(&diff)),
        ErrorNorm::Rel2 => {
            let denom = linalg::spectral_norm(&k)?;
            if denom == 0.0 {
                return Ok(0.0);
            }
            Ok(linalg::spectral_norm(&diff)? / denom)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{CountingKernel, EvalError, Kernel, KernelSpec};
    use crate::pointset::{generate_synthetic, PointSet, SyntheticSpec};
    use crate::selectors::SubsetSelection;

    /// κ(x, y) = x·y — exactly rank 1 in any dimension.
    struct DotKernel;

    impl Kernel for DotKernel {
        fn eval(&self, x: &[f64], y: &[f64]) -> std::result::Result<f64, EvalError> {
            Ok(x.iter().zip(y).map(|(a, b)| a * b).sum())
        }
        fn is_symmetric(&self) -> bool {
            true
        }
        fn name(&self) -> String {
            "dot".into()
        }
    }

    fn cluster_points(n: usize, seed: u64) -> PointSet {
        let spec = SyntheticSpec::TwoClusters2d { n_x: n, n_y: 8 };
        generate_synthetic(&spec, seed).unwrap().0
    }

    #[test]
    fn two_sided_rank_one_kernel_is_exact_with_singletons() {
        let x = PointSet::from_1d(&[1.0, 2.0, 3.0, -0.5]).unwrap();
        let y = PointSet::from_1d(&[0.5, -1.5, 4.0]).unwrap();
        let k = DotKernel;
        let h = KernelMatrixHandle::new(&k, &x, &y).unwrap();
        let s1 = SubsetSelection::explicit(vec![2], &x).unwrap();
        let s2 = SubsetSelection::explicit(vec![1], &y).unwrap();
        let f = two_sided(&h, &s1, &s2, false, 0.0).unwrap();
        let err = evaluate_error(&f, &h, ErrorNorm::MaxNorm).unwrap();
        assert!(err < 1e-12, "err = {err}");
        assert_eq!(f.rank(), 1);
    }

    #[test]
    fn two_sided_full_subsets_reproduce_k() {
        let x = cluster_points(25, 3);
        let y = cluster_points(30, 4);
        let kern = KernelSpec::gaussian(0.8).unwrap();
        let h = KernelMatrixHandle::new(&kern, &x, &y).unwrap();
        let s1 = SubsetSelection::explicit((0..25).collect(), &x).unwrap();
        let s2 = SubsetSelection::explicit((0..30).collect(), &y).unwrap();
        let f = two_sided(&h, &s1, &s2, false, 0.0).unwrap();
        let err = evaluate_error(&f, &h, ErrorNorm::Rel2).unwrap();
        assert!(err < 1e-10, "err = {err}");
    }

    #[test]
    fn two_sided_touches_only_its_blocks() {
        let x = cluster_points(40, 5);
        let y = cluster_points(35, 6);
        let base = KernelSpec::gaussian(1.0).unwrap();
        let counting = CountingKernel::new(&base);
        let h = KernelMatrixHandle::new(&counting, &x, &y).unwrap();
        let s1 = SubsetSelection::explicit(vec![0, 7, 13, 21], &x).unwrap();
        let s2 = SubsetSelection::explicit(vec![1, 9, 30], &y).unwrap();
        let (m, n) = (40, 35);
        let (r1, r2) = (4, 3);
        two_sided(&h, &s1, &s2, false, 0.0).unwrap();
        assert_eq!(counting.count() as usize, m * r2 + r1 * r2 + r1 * n);
    }

    #[test]
    fn one_sided_exact_rank_three_kernel() {
        // Poly123 over 1-D points spans {t, t², t³}: rank ≤ 3.
        let xs: Vec<f64> = (0..40).map(|i| 0.1 + i as f64 * 0.05).collect();
        let ys: Vec<f64> = (0..50).map(|i| 0.2 + i as f64 * 0.04).collect();
        let x = PointSet::from_1d(&xs).unwrap();
        let y = PointSet::from_1d(&ys).unwrap();
        let k = KernelSpec::Poly123;
        let h = KernelMatrixHandle::new(&k, &x, &y).unwrap();
        let f = one_sided(&h, Side::SampleY, 3, 2.0, &SelectorConfig::fps()).unwrap();
        let err = evaluate_error(&f, &h, ErrorNorm::Rel2).unwrap();
        assert!(err < 1e-9, "err = {err}");
    }

    #[test]
    fn one_sided_full_sample_is_exact() {
        let x = cluster_points(20, 9);
        let y = cluster_points(15, 10);
        let kern = KernelSpec::gaussian(0.9).unwrap();
        let h = KernelMatrixHandle::new(&kern, &x, &y).unwrap();
        // r = n forces S2 = Y regardless of the selector.
        let f = one_sided(&h, Side::SampleY, 15, 2.0, &SelectorConfig::uniform(1)).unwrap();
        let err = evaluate_error(&f, &h, ErrorNorm::Rel2).unwrap();
        assert!(err < 1e-10, "err = {err}");
    }

    #[test]
    fn one_sided_u_has_identity_block_and_bounded_g() {
        let x = cluster_points(60, 11);
        let y = cluster_points(45, 12);
        let kern = KernelSpec::gaussian(0.7).unwrap();
        let h = KernelMatrixHandle::new(&kern, &x, &y).unwrap();
        let r = 8;
        let f = one_sided(&h, Side::SampleY, r, 2.0, &SelectorConfig::fps()).unwrap();
        let skeleton = f.provenance.skeleton.clone().unwrap();
        assert_eq!(skeleton.len(), r);
        for (col, &row) in skeleton.iter().enumerate() {
            for c in 0..r {
                let expect = if c == col { 1.0 } else { 0.0 };
                assert_eq!(f.left()[[row, c]], expect, "identity block at skeleton rows");
            }
        }
        let gmax = f.left().iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        assert!(gmax <= 2.0, "|U| entries bounded by the ID bound, got {gmax}");
    }

    #[test]
    fn one_sided_sample_x_variant() {
        let x = cluster_points(50, 13);
        let y = cluster_points(40, 14);
        let kern = KernelSpec::gaussian(0.8).unwrap();
        let h = KernelMatrixHandle::new(&kern, &x, &y).unwrap();
        let f = one_sided(&h, Side::SampleX, 12, 2.0, &SelectorConfig::fps()).unwrap();
        assert_eq!(f.shape(), (50, 40));
        let skeleton = f.provenance.skeleton.clone().unwrap();
        assert!(skeleton.iter().all(|&j| j < 40), "skeleton indexes Y");
        let err = evaluate_error(&f, &h, ErrorNorm::Rel2).unwrap();
        let err_y = {
            let fy = one_sided(&h, Side::SampleY, 12, 2.0, &SelectorConfig::fps()).unwrap();
            evaluate_error(&fy, &h, ErrorNorm::Rel2).unwrap()
        };
        assert!(err < 1e-2 && err_y < 1e-2, "both sides compress: {err} vs {err_y}");
    }

    #[test]
    fn symmetric_requires_symmetry() {
        let x = cluster_points(20, 15);
        let kern = KernelSpec::AnisotropicInverse;
        let h = KernelMatrixHandle::new(&kern, &x, &x).unwrap();
        assert!(matches!(
            symmetric(&h, 5, 2.0, &SelectorConfig::fps()),
            Err(Error::NotSymmetric(_))
        ));

        let g = KernelSpec::gaussian(0.6).unwrap();
        let y = cluster_points(20, 16);
        let h2 = KernelMatrixHandle::new(&g, &x, &y).unwrap();
        assert!(matches!(
            symmetric(&h2, 5, 2.0, &SelectorConfig::fps()),
            Err(Error::NotSymmetric(_))
        ));
    }

    #[test]
    fn symmetric_reconstruction_is_exactly_symmetric_and_full_rank_exact() {
        let x = cluster_points(30, 17);
        let g = KernelSpec::gaussian(0.5).unwrap();
        let h = KernelMatrixHandle::new(&g, &x, &x).unwrap();

        let f = symmetric(&h, 10, 2.0, &SelectorConfig::fps()).unwrap();
        let rec = f.reconstruct();
        for i in 0..30 {
            for j in 0..30 {
                assert_eq!(rec[[i, j]], rec[[j, i]], "structural symmetry");
            }
        }

        let full = symmetric(&h, 30, 1.0, &SelectorConfig::fps()).unwrap();
        let err = evaluate_error(&full, &h, ErrorNorm::Rel2).unwrap();
        assert!(err < 1e-10, "full rank must recover exactly, err = {err}");
    }

    #[test]
    fn symmetric_preserves_psd() {
        let x = cluster_points(60, 19);
        let g = KernelSpec::gaussian(0.4).unwrap();
        let h = KernelMatrixHandle::new(&g, &x, &x).unwrap();
        let f = symmetric(&h, 12, 2.0, &SelectorConfig::fps()).unwrap();
        let rec = f.reconstruct();
        let eigs = linalg::symmetric_eigenvalues(&rec).unwrap();
        let knorm = linalg::spectral_norm(&h.eval_full().unwrap()).unwrap();
        assert!(
            eigs[0] >= -1e-10 * knorm,
            "min eigenvalue {} vs -1e-10*‖K‖ = {}",
            eigs[0],
            -1e-10 * knorm
        );
    }

    #[test]
    fn aca_rank_one_is_exact_after_one_step() {
        let x = PointSet::from_1d(&[1.0, 2.0, 3.0]).unwrap();
        let y = PointSet::from_1d(&[0.5, -2.0, 1.5, 4.0]).unwrap();
        let k = DotKernel;
        let h = KernelMatrixHandle::new(&k, &x, &y).unwrap();
        let f = aca(&h, 1, AcaStart::FarthestFromYCentroid).unwrap();
        let err = evaluate_error(&f, &h, ErrorNorm::MaxNorm).unwrap();
        assert!(err <= 1e-12, "err = {err}");
    }

    #[test]
    fn aca_exact_rank_k_matrix() {
        let xs: Vec<f64> = (0..30).map(|i| 0.1 + i as f64 * 0.07).collect();
        let ys: Vec<f64> = (0..35).map(|i| 0.15 + i as f64 * 0.06).collect();
        let x = PointSet::from_1d(&xs).unwrap();
        let y = PointSet::from_1d(&ys).unwrap();
        let k = KernelSpec::Poly123;
        let h = KernelMatrixHandle::new(&k, &x, &y).unwrap();
        let f = aca(&h, 3, AcaStart::FarthestFromYCentroid).unwrap();
        let err = evaluate_error(&f, &h, ErrorNorm::Rel2).unwrap();
        assert!(err < 1e-9, "err = {err}");
    }

    #[test]
    fn aca_flags_shortfall_on_exhausted_matrix() {
        // Rank-1 matrix, requested rank 3: pivots die after the first step.
        let x = PointSet::from_1d(&[1.0, 2.0, 3.0, 4.0]).unwrap();
        let y = PointSet::from_1d(&[2.0, 5.0, -1.0]).unwrap();
        let k = DotKernel;
        let h = KernelMatrixHandle::new(&k, &x, &y).unwrap();
        let f = aca(&h, 3, AcaStart::Row(0)).unwrap();
        assert!(f.rank_shortfall);
        assert!(f.rank() < 3);
        let err = evaluate_error(&f, &h, ErrorNorm::MaxNorm).unwrap();
        assert!(err <= 1e-10, "residual should still be tiny, err = {err}");
    }

    #[test]
    fn evaluate_error_exact_zero_and_rank_zero_one() {
        let x = cluster_points(18, 21);
        let g = KernelSpec::gaussian(0.8).unwrap();
        let h = KernelMatrixHandle::new(&g, &x, &x).unwrap();

        let zero = LowRankFactorization::empty(18, 18, FactorMethod::Aca);
        assert_eq!(evaluate_error(&zero, &h, ErrorNorm::Rel2).unwrap(), 1.0);

        let full = symmetric(&h, 18, 1.0, &SelectorConfig::fps()).unwrap();
        let err = evaluate_error(&full, &h, ErrorNorm::Rel2).unwrap();
        assert!(err <= 1e-12);
    }

    #[test]
    fn rel2_respects_eckart_young_floor() {
        let x = cluster_points(40, 23);
        let y = cluster_points(32, 24);
        let g = KernelSpec::gaussian(1.1).unwrap();
        let h = KernelMatrixHandle::new(&g, &x, &y).unwrap();
        let k = h.eval_full().unwrap();
        for r in [2usize, 5, 9] {
            let f = one_sided(&h, Side::SampleY, r, 2.0, &SelectorConfig::fps()).unwrap();
            let err = evaluate_error(&f, &h, ErrorNorm::Rel2).unwrap();
            let floor = linalg::best_rank_r_error(&k, r).unwrap();
            assert!(err >= floor - 1e-12, "rank {r}: err {err} < floor {floor}");
        }
    }

    #[test]
    fn matvec_agrees_with_reconstruction() {
        let x = cluster_points(25, 25);
        let y = cluster_points(20, 26);
        let g = KernelSpec::gaussian(0.9).unwrap();
        let h = KernelMatrixHandle::new(&g, &x, &y).unwrap();
        let f = one_sided(&h, Side::SampleY, 6, 2.0, &SelectorConfig::fps()).unwrap();
        let rec = f.reconstruct();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(5);
        let v = Array1::from_iter((0..20).map(|_| rand::Rng::gen::<f64>(&mut rng) - 0.5));
        let direct = rec.dot(&v);
        let fast = f.matvec(&v);
        let scale = direct.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1e-300);
        for (a, b) in direct.iter().zip(fast.iter()) {
            assert!((a - b).abs() <= 1e-12 * scale);
        }
    }

    #[test]
    fn determinism_bit_identical_factors() {
        let x = cluster_points(40, 27);
        let y = cluster_points(30, 28);
        let g = KernelSpec::gaussian(0.8).unwrap();
        let h = KernelMatrixHandle::new(&g, &x, &y).unwrap();
        let cfg = SelectorConfig::mixed(0.4, 123);
        let a = one_sided(&h, Side::SampleY, 7, 2.0, &cfg).unwrap();
        let b = one_sided(&h, Side::SampleY, 7, 2.0, &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn evaluate_error_guard() {
        let x = cluster_points(30, 29);
        let g = KernelSpec::gaussian(0.8).unwrap();
        let h = KernelMatrixHandle::new(&g, &x, &x).unwrap();
        let f = LowRankFactorization::empty(30, 30, FactorMethod::Aca);
        assert!(matches!(
            evaluate_error_with_guard(&f, &h, ErrorNorm::Rel2, 100),
            Err(Error::SizeGuardExceeded { .. })
        ));
    }
}
