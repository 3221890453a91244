//! Brute-force computation of every quantity appearing in the max-norm error
//! estimates, enabling direct numerical verification on small instances.
//!
//! Each check returns a [`BoundReport`] with the true error on the left-hand
//! side, the bound on the right-hand side, and the named constituent terms.
//! The exhaustive max-min loops are quadratic and more, so checks run only
//! below a configurable size guard.

use std::collections::BTreeMap;

use ndarray::{Array2, ArrayView1};
use serde::Serialize;

use crate::factor::{self, FactorMethod, LowRankFactorization};
use crate::kernels::{Kernel, KernelMatrixHandle};
use crate::linalg::{max_norm, pinv_dense, pinv_norm, spectral_norm};
use crate::pointset::{delta, dist_unchecked, PointSet};
use crate::selectors::SubsetSelection;
use crate::{Error, Result};

/// Which estimate a report verifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    Lemma21,
    Thm22Entrywise,
    Thm23MaxNorm,
    Cor24OneSidedProjections,
    Thm25Geometric,
    Thm33OneSided,
    Thm34OneSidedGeometric,
}

/// The verified pair (true error, bound) plus named scalar terms.
#[derive(Debug, Clone, Serialize)]
pub struct BoundReport {
    pub bound: BoundKind,
    pub lhs: f64,
    pub rhs: f64,
    pub terms: BTreeMap<String, f64>,
}

impl BoundReport {
    /// `lhs ≤ rhs` up to relative numerical slack.
    pub fn holds(&self, slack: f64) -> bool {
        self.lhs <= self.rhs + slack * (1.0 + self.rhs.abs())
    }
}

fn vec_norm(v: ArrayView1<f64>) -> f64 {
    v.dot(&v).sqrt()
}

/// `|α̂ᵀAβ̂ − αᵀAβ| ≤ ‖αᵀA‖ε₂ + ‖Aβ‖ε₁ + ‖A‖ε₁ε₂` with ε₁ = ‖α̂−α‖,
/// ε₂ = ‖β̂−β‖. Returns (lhs, rhs).
pub fn lemma21_check(
    a: &Array2<f64>,
    alpha: ArrayView1<f64>,
    alpha_hat: ArrayView1<f64>,
    beta: ArrayView1<f64>,
    beta_hat: ArrayView1<f64>,
) -> Result<(f64, f64)> {
    let (m, n) = a.dim();
    if alpha.len() != m || alpha_hat.len() != m {
        return Err(Error::DimensionMismatch(alpha.len(), m));
    }
    if beta.len() != n || beta_hat.len() != n {
        return Err(Error::DimensionMismatch(beta.len(), n));
    }
    let lhs = (alpha_hat.dot(&a.dot(&beta_hat)) - alpha.dot(&a.dot(&beta))).abs();
    let eps1 = vec_norm((&alpha_hat.to_owned() - &alpha).view());
    let eps2 = vec_norm((&beta_hat.to_owned() - &beta).view());
    let alpha_t_a = a.t().dot(&alpha);
    let a_beta = a.dot(&beta);
    let rhs = vec_norm(alpha_t_a.view()) * eps2
        + vec_norm(a_beta.view()) * eps1
        + spectral_norm(a)? * eps1 * eps2;
    Ok((lhs, rhs))
}

fn kernel_matrix(kernel: &dyn Kernel, a: &PointSet, b: &PointSet) -> Result<Array2<f64>> {
    let h = KernelMatrixHandle::new(kernel, a, b)?;
    h.eval_full()
}

/// Discrete Lipschitz constant `L(Z₁×Z₂, S₁×S₂)`: the exact maximum of
/// `|κ(x,y) − κ(u,v)| / sqrt(|x−u|² + |y−v|²)` with 0/0 pairs skipped.
pub fn lipschitz_full(
    kernel: &dyn Kernel,
    z1: &PointSet,
    z2: &PointSet,
    s1: &PointSet,
    s2: &PointSet,
) -> Result<f64> {
    let kz = kernel_matrix(kernel, z1, z2)?;
    let ks = kernel_matrix(kernel, s1, s2)?;
    let dx = distance_matrix(z1, s1);
    let dy = distance_matrix(z2, s2);
    let mut max_sq = 0.0f64;
    for iz in 0..z1.len() {
        for jz in 0..z2.len() {
            let kzv = kz[[iz, jz]];
            for is in 0..s1.len() {
                let dxu = dx[[iz, is]];
                for js in 0..s2.len() {
                    let num = (kzv - ks[[is, js]]).abs();
                    let den_sq = dxu * dxu + dy[[jz, js]] * dy[[jz, js]];
                    if den_sq == 0.0 {
                        if num != 0.0 {
                            return Err(Error::InfiniteLipschitz);
                        }
                        continue;
                    }
                    max_sq = max_sq.max(num * num / den_sq);
                }
            }
        }
    }
    Ok(max_sq.sqrt())
}

/// `L(Z₂, S₂)_{W₁}`: max of `|κ(x,y) − κ(x,v)| / |y−v|` over x ∈ W₁,
/// y ∈ Z₂, v ∈ S₂.
pub fn lipschitz_y(
    kernel: &dyn Kernel,
    w1: &PointSet,
    z2: &PointSet,
    s2: &PointSet,
) -> Result<f64> {
    let kz = kernel_matrix(kernel, w1, z2)?;
    let ks = kernel_matrix(kernel, w1, s2)?;
    let dy = distance_matrix(z2, s2);
    let mut max_q = 0.0f64;
    for ix in 0..w1.len() {
        for jy in 0..z2.len() {
            for jv in 0..s2.len() {
                let num = (kz[[ix, jy]] - ks[[ix, jv]]).abs();
                let den = dy[[jy, jv]];
                if den == 0.0 {
                    if num != 0.0 {
                        return Err(Error::InfiniteLipschitz);
                    }
                    continue;
                }
                max_q = max_q.max(num / den);
            }
        }
    }
    Ok(max_q)
}

/// `L(Z₁, S₁)_{W₂}`: max of `|κ(x,y) − κ(u,y)| / |x−u|` over y ∈ W₂,
/// x ∈ Z₁, u ∈ S₁.
pub fn lipschitz_x(
    kernel: &dyn Kernel,
    z1: &PointSet,
    s1: &PointSet,
    w2: &PointSet,
) -> Result<f64> {
    let kz = kernel_matrix(kernel, z1, w2)?;
    let ks = kernel_matrix(kernel, s1, w2)?;
    let dx = distance_matrix(z1, s1);
    let mut max_q = 0.0f64;
    for jy in 0..w2.len() {
        for ix in 0..z1.len() {
            for iu in 0..s1.len() {
                let num = (kz[[ix, jy]] - ks[[iu, jy]]).abs();
                let den = dx[[ix, iu]];
                if den == 0.0 {
                    if num != 0.0 {
                        return Err(Error::InfiniteLipschitz);
                    }
                    continue;
                }
                max_q = max_q.max(num / den);
            }
        }
    }
    Ok(max_q)
}

fn distance_matrix(a: &PointSet, b: &PointSet) -> Array2<f64> {
    let mut d = Array2::zeros((a.len(), b.len()));
    for (i, p) in a.iter().enumerate() {
        for (j, q) in b.iter().enumerate() {
            d[[i, j]] = dist_unchecked(p, q);
        }
    }
    d
}

/// Verifier with a configurable desk-scale guard (max side length).
#[derive(Debug, Clone, Copy)]
pub struct BoundChecker {
    pub size_guard: usize,
}

impl Default for BoundChecker {
    fn default() -> Self {
        Self { size_guard: 500 }
    }
}

struct TwoSidedContext {
    k: Array2<f64>,
    err: Array2<f64>,
    kappa_s: Array2<f64>,
    /// ε₁(i, a) = ‖K_{x_i S₂} − K_{s1_a S₂}‖ (m × r₁).
    eps1: Array2<f64>,
    /// ε₂(j, b) = ‖K_{S₁ y_j} − K_{S₁ s2_b}‖ (n × r₂).
    eps2: Array2<f64>,
    pinv_norm: f64,
}

impl BoundChecker {
    pub fn with_guard(size_guard: usize) -> Self {
        Self { size_guard }
    }

    fn check_sizes(&self, h: &KernelMatrixHandle) -> Result<()> {
        let (m, n) = h.shape();
        if m > self.size_guard || n > self.size_guard {
            return Err(Error::SizeGuardExceeded { rows: m, cols: n, guard: self.size_guard });
        }
        Ok(())
    }

    fn two_sided_context(
        &self,
        h: &KernelMatrixHandle,
        s1: &SubsetSelection,
        s2: &SubsetSelection,
    ) -> Result<TwoSidedContext> {
        self.check_sizes(h)?;
        let (m, n) = h.shape();
        let k = h.eval_full()?;
        let f = factor::two_sided(h, s1, s2, false, 0.0)?;
        let err = &k - &f.reconstruct();

        let r1 = s1.len();
        let r2 = s2.len();
        let kappa_s = h.eval_block(s1.indices(), s2.indices())?;

        let mut eps1 = Array2::zeros((m, r1));
        for i in 0..m {
            for (a, &ia) in s1.indices().iter().enumerate() {
                let mut acc = 0.0;
                for &jb in s2.indices() {
                    let d = k[[i, jb]] - k[[ia, jb]];
                    acc += d * d;
                }
                eps1[[i, a]] = acc.sqrt();
            }
        }
        let mut eps2 = Array2::zeros((n, r2));
        for j in 0..n {
            for (b, &jb) in s2.indices().iter().enumerate() {
                let mut acc = 0.0;
                for &ia in s1.indices() {
                    let d = k[[ia, j]] - k[[ia, jb]];
                    acc += d * d;
                }
                eps2[[j, b]] = acc.sqrt();
            }
        }
        let pn = pinv_norm(&kappa_s)?;
        Ok(TwoSidedContext { k, err, kappa_s, eps1, eps2, pinv_norm: pn })
    }

    /// Entrywise estimate: per entry, the joint min over (u, v) of the full
    /// bracket. The reported pair is the entry with the worst margin, so
    /// `lhs ≤ rhs` iff the bound holds at every entry.
    pub fn thm22_entrywise(
        &self,
        h: &KernelMatrixHandle,
        s1: &SubsetSelection,
        s2: &SubsetSelection,
    ) -> Result<BoundReport> {
        let ctx = self.two_sided_context(h, s1, s2)?;
        let (m, n) = h.shape();
        let (r1, r2) = (s1.len(), s2.len());
        let mut worst = (f64::NEG_INFINITY, 0.0, 0.0);
        for i in 0..m {
            for j in 0..n {
                let lhs_ij = ctx.err[[i, j]].abs();
                let mut rhs_ij = f64::INFINITY;
                for a in 0..r1 {
                    let e1 = ctx.eps1[[i, a]];
                    for b in 0..r2 {
                        let e2 = ctx.eps2[[j, b]];
                        let bracket = (ctx.k[[i, j]] - ctx.kappa_s[[a, b]]).abs()
                            + e1
                            + e2
                            + ctx.pinv_norm * e1 * e2;
                        rhs_ij = rhs_ij.min(bracket);
                    }
                }
                let margin = lhs_ij - rhs_ij;
                if margin > worst.0 {
                    worst = (margin, lhs_ij, rhs_ij);
                }
            }
        }
        let mut terms = BTreeMap::new();
        terms.insert("pinv_norm".into(), ctx.pinv_norm);
        terms.insert("r1".into(), r1 as f64);
        terms.insert("r2".into(), r2 as f64);
        Ok(BoundReport { bound: BoundKind::Thm22Entrywise, lhs: worst.1, rhs: worst.2, terms })
    }

    /// Max-norm estimate: `‖K − K̃‖_max ≤ max_{x,y} min_{u,v} (bracket)`.
    pub fn thm23_maxnorm(
        &self,
        h: &KernelMatrixHandle,
        s1: &SubsetSelection,
        s2: &SubsetSelection,
    ) -> Result<BoundReport> {
        let ctx = self.two_sided_context(h, s1, s2)?;
        let (m, n) = h.shape();
        let (r1, r2) = (s1.len(), s2.len());
        let lhs = max_norm(&ctx.err);
        let mut rhs = 0.0f64;
        for i in 0..m {
            for j in 0..n {
                let mut best = f64::INFINITY;
                for a in 0..r1 {
                    let e1 = ctx.eps1[[i, a]];
                    for b in 0..r2 {
                        let e2 = ctx.eps2[[j, b]];
                        let bracket = (ctx.k[[i, j]] - ctx.kappa_s[[a, b]]).abs()
                            + e1
                            + e2
                            + ctx.pinv_norm * e1 * e2;
                        best = best.min(bracket);
                    }
                }
                rhs = rhs.max(best);
            }
        }
        let mut terms = BTreeMap::new();
        terms.insert("pinv_norm".into(), ctx.pinv_norm);
        terms.insert("r1".into(), r1 as f64);
        terms.insert("r2".into(), r2 as f64);
        Ok(BoundReport { bound: BoundKind::Thm23MaxNorm, lhs, rhs, terms })
    }

    /// Projection estimates: the column form `‖K − Q^| K‖_max` is reported as
    /// (lhs, rhs); the row form `‖K − K Q^-‖_max` lands in the terms as
    /// `row_lhs` / `row_rhs`. Both must hold.
    pub fn cor24_projections(
        &self,
        h: &KernelMatrixHandle,
        s1: &SubsetSelection,
        s2: &SubsetSelection,
    ) -> Result<BoundReport> {
        self.check_sizes(h)?;
        let (m, n) = h.shape();
        let k = h.eval_full()?;
        let all_rows: Vec<usize> = (0..m).collect();
        let all_cols: Vec<usize> = (0..n).collect();

        // Column projection Q^| = K_XS₂ K_XS₂⁺.
        let k_xs2 = h.eval_block(&all_rows, s2.indices())?;
        let p2 = pinv_dense(&k_xs2)?;
        let col_err = &k - &k_xs2.dot(&p2.dot(&k));
        let col_lhs = max_norm(&col_err);

        // coldiff(j, b) = ‖K_{Xy_j} − K_{Xv_b}‖ over the full X column.
        let r2 = s2.len();
        let mut coldiff = Array2::zeros((n, r2));
        for j in 0..n {
            for (b, &jb) in s2.indices().iter().enumerate() {
                let mut acc = 0.0;
                for i in 0..m {
                    let d = k[[i, j]] - k[[i, jb]];
                    acc += d * d;
                }
                coldiff[[j, b]] = acc.sqrt();
            }
        }
        let mut col_rhs = 0.0f64;
        for i in 0..m {
            for j in 0..n {
                let mut best = f64::INFINITY;
                for (b, &jb) in s2.indices().iter().enumerate() {
                    let bracket = (k[[i, j]] - k[[i, jb]]).abs() + coldiff[[j, b]];
                    best = best.min(bracket);
                }
                col_rhs = col_rhs.max(best);
            }
        }

        // Row projection Q^- = K_S₁Y⁺ K_S₁Y.
        let k_s1y = h.eval_block(s1.indices(), &all_cols)?;
        let p1 = pinv_dense(&k_s1y)?;
        let row_err = &k - &k.dot(&p1).dot(&k_s1y);
        let row_lhs = max_norm(&row_err);

        let r1 = s1.len();
        let mut rowdiff = Array2::zeros((m, r1));
        for i in 0..m {
            for (a, &ia) in s1.indices().iter().enumerate() {
                let mut acc = 0.0;
                for j in 0..n {
                    let d = k[[i, j]] - k[[ia, j]];
                    acc += d * d;
                }
                rowdiff[[i, a]] = acc.sqrt();
            }
        }
        let mut row_rhs = 0.0f64;
        for i in 0..m {
            for j in 0..n {
                let mut best = f64::INFINITY;
                for (a, &ia) in s1.indices().iter().enumerate() {
                    let bracket = (k[[i, j]] - k[[ia, j]]).abs() + rowdiff[[i, a]];
                    best = best.min(bracket);
                }
                row_rhs = row_rhs.max(best);
            }
        }

        let mut terms = BTreeMap::new();
        terms.insert("row_lhs".into(), row_lhs);
        terms.insert("row_rhs".into(), row_rhs);
        Ok(BoundReport {
            bound: BoundKind::Cor24OneSidedProjections,
            lhs: col_lhs,
            rhs: col_rhs,
            terms,
        })
    }

    /// Geometric estimate `‖K − K̃‖_max ≤ C₁δ₁ + C₂δ₂ + C₃δ₁δ₂` with every
    /// constant computed exactly as defined.
    pub fn thm25_geometric(
        &self,
        h: &KernelMatrixHandle,
        s1: &SubsetSelection,
        s2: &SubsetSelection,
    ) -> Result<BoundReport> {
        self.check_sizes(h)?;
        let k = h.eval_full()?;
        let f = factor::two_sided(h, s1, s2, false, 0.0)?;
        let lhs = max_norm(&(&k - &f.reconstruct()));

        let s1_pts = s1.gather(h.x())?;
        let s2_pts = s2.gather(h.y())?;
        let delta1 = delta(h.x(), &s1_pts)?;
        let delta2 = delta(h.y(), &s2_pts)?;
        let (r1, r2) = (s1.len() as f64, s2.len() as f64);

        let lip_full = lipschitz_full(h.kernel(), h.x(), h.y(), &s1_pts, &s2_pts)?;
        let lip_x = lipschitz_x(h.kernel(), h.x(), &s1_pts, &s2_pts)?;
        let lip_y = lipschitz_y(h.kernel(), &s1_pts, h.y(), &s2_pts)?;
        let kappa_s = h.eval_block(s1.indices(), s2.indices())?;
        let pn = pinv_norm(&kappa_s)?;

        let c1 = lip_full + r2.sqrt() * lip_x;
        let c2 = lip_full + r1.sqrt() * lip_y;
        let c3 = pn * (r1 * r2).sqrt() * lip_x * lip_y;
        let rhs = c1 * delta1 + c2 * delta2 + c3 * delta1 * delta2;

        let mut terms = BTreeMap::new();
        terms.insert("c1".into(), c1);
        terms.insert("c2".into(), c2);
        terms.insert("c3".into(), c3);
        terms.insert("delta_x_s1".into(), delta1);
        terms.insert("delta_y_s2".into(), delta2);
        terms.insert("lip_full".into(), lip_full);
        terms.insert("lip_x".into(), lip_x);
        terms.insert("lip_y".into(), lip_y);
        terms.insert("pinv_norm".into(), pn);
        terms.insert("r1".into(), r1);
        terms.insert("r2".into(), r2);
        Ok(BoundReport { bound: BoundKind::Thm25Geometric, lhs, rhs, terms })
    }

    fn one_sided_parts<'f>(
        &self,
        h: &KernelMatrixHandle,
        f: &'f LowRankFactorization,
    ) -> Result<(&'f [usize], &'f [usize])> {
        if f.method != FactorMethod::OneSided {
            return Err(Error::InvalidConfig(
                "one-sided bound checks need a one-sided factorization".into(),
            ));
        }
        let (Some(s2), Some(skel)) = (&f.provenance.s2, &f.provenance.skeleton) else {
            return Err(Error::InvalidConfig(
                "factorization lacks sample/skeleton provenance (sample-Y side required)".into(),
            ));
        };
        if f.shape() != h.shape() {
            return Err(Error::InvalidConfig("factorization/handle shape mismatch".into()));
        }
        Ok((s2, skel))
    }

    /// One-sided estimate with the ID bound: `‖K − U K_IY‖_max ≤ T₁ + 2r·T₂`.
    pub fn thm33_one_sided(
        &self,
        h: &KernelMatrixHandle,
        f: &LowRankFactorization,
    ) -> Result<BoundReport> {
        self.check_sizes(h)?;
        let (s2, skeleton) = self.one_sided_parts(h, f)?;
        let (m, n) = h.shape();
        let k = h.eval_full()?;
        let lhs = max_norm(&(&k - &f.reconstruct()));

        // coldiff(j, b) = ‖K_{Xy_j} − K_{Xv_b}‖ over the full X column.
        let mut coldiff = Array2::zeros((n, s2.len()));
        for j in 0..n {
            for (b, &jb) in s2.iter().enumerate() {
                let mut acc = 0.0;
                for i in 0..m {
                    let d = k[[i, j]] - k[[i, jb]];
                    acc += d * d;
                }
                coldiff[[j, b]] = acc.sqrt();
            }
        }
        let bracket_min = |i: usize, j: usize| -> f64 {
            let mut best = f64::INFINITY;
            for (b, &jb) in s2.iter().enumerate() {
                let v = (k[[i, j]] - k[[i, jb]]).abs() + coldiff[[j, b]];
                best = best.min(v);
            }
            best
        };

        let mut t1 = 0.0f64;
        for i in 0..m {
            for j in 0..n {
                t1 = t1.max(bracket_min(i, j));
            }
        }
        let mut t2 = 0.0f64;
        for &i in skeleton {
            for j in 0..n {
                t2 = t2.max(bracket_min(i, j));
            }
        }
        let r = skeleton.len() as f64;
        let rhs = t1 + 2.0 * r * t2;

        let mut terms = BTreeMap::new();
        terms.insert("t1".into(), t1);
        terms.insert("t2".into(), t2);
        terms.insert("r".into(), r);
        Ok(BoundReport { bound: BoundKind::Thm33OneSided, lhs, rhs, terms })
    }

    /// Geometric one-sided estimate in terms of `δ_{Y,S}` and the discrete
    /// Lipschitz constants.
    pub fn thm34_one_sided_geometric(
        &self,
        h: &KernelMatrixHandle,
        f: &LowRankFactorization,
    ) -> Result<BoundReport> {
        self.check_sizes(h)?;
        let (s2, skeleton) = self.one_sided_parts(h, f)?;
        let k = h.eval_full()?;
        let lhs = max_norm(&(&k - &f.reconstruct()));

        let s_pts = h.y().gather(s2)?;
        let skel_pts = h.x().gather(skeleton)?;
        let delta_ys = delta(h.y(), &s_pts)?;
        let m = h.x().len() as f64;
        let r = skeleton.len() as f64;

        let l1 = lipschitz_full(h.kernel(), h.x(), h.y(), h.x(), &s_pts)?;
        let l2 = lipschitz_y(h.kernel(), h.x(), h.y(), &s_pts)?;
        let l3 = lipschitz_full(h.kernel(), &skel_pts, h.y(), &skel_pts, &s_pts)?;

        let rhs = l1 * delta_ys
            + (1.0 + 2.0 * r) * m.sqrt() * l2 * delta_ys
            + 2.0 * r * l3 * delta_ys;

        let mut terms = BTreeMap::new();
        terms.insert("delta_y_s".into(), delta_ys);
        terms.insert("lip_xy_xs".into(), l1);
        terms.insert("lip_y_s_x".into(), l2);
        terms.insert("lip_iy_is".into(), l3);
        terms.insert("m".into(), m);
        terms.insert("r".into(), r);
        Ok(BoundReport { bound: BoundKind::Thm34OneSidedGeometric, lhs, rhs, terms })
    }
}

/// Enum-dispatched entry point; the two-sided kinds need `s1`/`s2`, the
/// one-sided kinds need a sample-Y one-sided factorization.
pub fn geometric_bound_rhs(
    kind: BoundKind,
    checker: &BoundChecker,
    h: &KernelMatrixHandle,
    s1: Option<&SubsetSelection>,
    s2: Option<&SubsetSelection>,
    f: Option<&LowRankFactorization>,
) -> Result<BoundReport> {
    let need_sel = || {
        Error::InvalidConfig(format!("bound {kind:?} needs both subset selections"))
    };
    match kind {
        BoundKind::Lemma21 => Err(Error::InvalidConfig(
            "lemma21_check takes explicit vectors, not subsets".into(),
        )),
        BoundKind::Thm22Entrywise => {
            checker.thm22_entrywise(h, s1.ok_or_else(need_sel)?, s2.ok_or_else(need_sel)?)
        }
        BoundKind::Thm23MaxNorm => {
            checker.thm23_maxnorm(h, s1.ok_or_else(need_sel)?, s2.ok_or_else(need_sel)?)
        }
        BoundKind::Cor24OneSidedProjections => {
            checker.cor24_projections(h, s1.ok_or_else(need_sel)?, s2.ok_or_else(need_sel)?)
        }
        BoundKind::Thm25Geometric => {
            checker.thm25_geometric(h, s1.ok_or_else(need_sel)?, s2.ok_or_else(need_sel)?)
        }
        BoundKind::Thm33OneSided => {
            let f = f.ok_or_else(|| {
                Error::InvalidConfig("thm33 needs a one-sided factorization".into())
            })?;
            checker.thm33_one_sided(h, f)
        }
        BoundKind::Thm34OneSidedGeometric => {
            let f = f.ok_or_else(|| {
                Error::InvalidConfig("thm34 needs a one-sided factorization".into())
            })?;
            checker.thm34_one_sided_geometric(h, f)
        }
    }
}
