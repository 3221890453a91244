//! Kernel function registry and lazy kernel-matrix evaluation.
//!
//! A [`KernelMatrixHandle`] never materializes `K[i][j] = κ(x_i, y_j)` unless
//! a block is explicitly requested; factorizations only ever pull the
//! sub-blocks they need.

use std::cell::Cell;
use std::fmt;

use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::pointset::{dist_unchecked, sq_dist_unchecked, PointSet};
use crate::{Error, Result};

/// Failure modes of a pointwise kernel evaluation, before index context is
/// attached by the matrix handle.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalError {
    /// The kernel is singular at coincident points.
    Singular,
    /// The arguments fall outside the kernel's domain.
    Domain(String),
}

/// A kernel function κ(x, y) on points of equal dimension.
///
/// New kernels register by implementing this one trait; everything downstream
/// (handles, factorizations, bounds, indicators) is generic over it.
pub trait Kernel {
    fn eval(&self, x: &[f64], y: &[f64]) -> std::result::Result<f64, EvalError>;

    /// Whether κ(x, y) = κ(y, x) for all arguments.
    fn is_symmetric(&self) -> bool;

    fn name(&self) -> String;
}

/// The built-in kernel registry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum KernelSpec {
    /// κ(x, y) = 1 / |x − y|, singular at coincidence.
    InverseDistance,
    /// κ₁(x, y) = |x − y|.
    Distance,
    /// κ₂(x, y) = log |x − y|, singular at coincidence.
    LogDistance,
    /// κ(x, y) = exp(−|x − y|² / σ²), σ > 0.
    Gaussian { sigma: f64 },
    /// κ₃(x, y) = (1 + |x − y|² / R²)⁻¹, R > 0.
    RationalQuadratic { r_scale: f64 },
    /// κ₄(x, y) = exp(−1 / (1 − c·|x − y|²)), requires c·|x − y|² < 1.
    BumpExp { c: f64 },
    /// κ₅(x, y) = x₁ / |x − y|, singular at coincidence; not symmetric.
    AnisotropicInverse,
    /// κ₆(x, y) = x·y + (x·y)² + (x·y)³.
    Poly123,
}

impl KernelSpec {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if sigma > 0.0 {
            Ok(Self::Gaussian { sigma })
        } else {
            Err(Error::InvalidKernelParam(format!("gaussian sigma must be > 0, got {sigma}")))
        }
    }

    pub fn rational_quadratic(r_scale: f64) -> Result<Self> {
        if r_scale > 0.0 {
            Ok(Self::RationalQuadratic { r_scale })
        } else {
            Err(Error::InvalidKernelParam(format!("r_scale must be > 0, got {r_scale}")))
        }
    }

    pub fn bump_exp(c: f64) -> Result<Self> {
        if c > 0.0 {
            Ok(Self::BumpExp { c })
        } else {
            Err(Error::InvalidKernelParam(format!("bump-exp c must be > 0, got {c}")))
        }
    }

    /// Parses a CLI/config kernel name. Table-1 aliases `table1:k1`..`table1:k6`
    /// map onto the registry; parameterized aliases take their value from
    /// `param` (σ for gaussian, R for rational-quadratic, c for bump-exp).
    pub fn parse(name: &str, param: Option<f64>) -> Result<Self> {
        let need = |what: &str| {
            Error::InvalidKernelParam(format!("kernel '{name}' needs a parameter ({what})"))
        };
        match name {
            "inverse-distance" => Ok(Self::InverseDistance),
            "distance" | "table1:k1" => Ok(Self::Distance),
            "log-distance" | "table1:k2" => Ok(Self::LogDistance),
            "gaussian" => Self::gaussian(param.ok_or_else(|| need("sigma"))?),
            "rational-quadratic" | "table1:k3" => {
                Self::rational_quadratic(param.ok_or_else(|| need("R"))?)
            }
            "bump-exp" | "table1:k4" => Self::bump_exp(param.ok_or_else(|| need("c"))?),
            "anisotropic-inverse" | "table1:k5" => Ok(Self::AnisotropicInverse),
            "poly123" | "table1:k6" => Ok(Self::Poly123),
            other => Err(Error::InvalidKernelParam(format!("unknown kernel '{other}'"))),
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::InverseDistance => write!(f, "inverse-distance"),
            Self::Distance => write!(f, "distance"),
            Self::LogDistance => write!(f, "log-distance"),
            Self::Gaussian { sigma } => write!(f, "gaussian(sigma={sigma})"),
            Self::RationalQuadratic { r_scale } => write!(f, "rational-quadratic(R={r_scale})"),
            Self::BumpExp { c } => write!(f, "bump-exp(c={c})"),
            Self::AnisotropicInverse => write!(f, "anisotropic-inverse"),
            Self::Poly123 => write!(f, "poly123"),
        }
    }
}

impl Kernel for KernelSpec {
    fn eval(&self, x: &[f64], y: &[f64]) -> std::result::Result<f64, EvalError> {
        match self {
            Self::InverseDistance => {
                let r = dist_unchecked(x, y);
                if r == 0.0 {
                    Err(EvalError::Singular)
                } else {
                    Ok(1.0 / r)
                }
            }
            Self::Distance => Ok(dist_unchecked(x, y)),
            Self::LogDistance => {
                let r = dist_unchecked(x, y);
                if r == 0.0 {
                    Err(EvalError::Singular)
                } else {
                    Ok(r.ln())
                }
            }
            Self::Gaussian { sigma } => {
                Ok((-sq_dist_unchecked(x, y) / (sigma * sigma)).exp())
            }
            Self::RationalQuadratic { r_scale } => {
                Ok(1.0 / (1.0 + sq_dist_unchecked(x, y) / (r_scale * r_scale)))
            }
            Self::BumpExp { c } => {
                let q = 1.0 - c * sq_dist_unchecked(x, y);
                if q <= 0.0 {
                    Err(EvalError::Domain(format!("c*|x-y|^2 = {} >= 1", 1.0 - q)))
                } else {
                    Ok((-1.0 / q).exp())
                }
            }
            Self::AnisotropicInverse => {
                let r = dist_unchecked(x, y);
                if r == 0.0 {
                    Err(EvalError::Singular)
                } else {
                    Ok(x[0] / r)
                }
            }
            Self::Poly123 => {
                let t: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
                Ok(t + t * t + t * t * t)
            }
        }
    }

    fn is_symmetric(&self) -> bool {
        !matches!(self, Self::AnisotropicInverse)
    }

    fn name(&self) -> String {
        self.to_string()
    }
}

/// A lazy view of the kernel matrix induced by κ and the point sets X, Y.
pub struct KernelMatrixHandle<'a> {
    kernel: &'a dyn Kernel,
    x: &'a PointSet,
    y: &'a PointSet,
}

impl<'a> KernelMatrixHandle<'a> {
    pub fn new(kernel: &'a dyn Kernel, x: &'a PointSet, y: &'a PointSet) -> Result<Self> {
        if x.dim() != y.dim() {
            return Err(Error::DimensionMismatch(x.dim(), y.dim()));
        }
        Ok(Self { kernel, x, y })
    }

    pub fn kernel(&self) -> &dyn Kernel {
        self.kernel
    }

    pub fn x(&self) -> &PointSet {
        self.x
    }

    pub fn y(&self) -> &PointSet {
        self.y
    }

    /// (rows, cols) = (|X|, |Y|).
    pub fn shape(&self) -> (usize, usize) {
        (self.x.len(), self.y.len())
    }

    fn attach_context(&self, e: EvalError, i: usize, j: usize) -> Error {
        match e {
            EvalError::Singular => Error::SingularKernelEntry {
                kernel: self.kernel.name(),
                i,
                j,
            },
            EvalError::Domain(detail) => Error::KernelDomain {
                kernel: self.kernel.name(),
                i,
                j,
                detail,
            },
        }
    }

    pub fn eval_entry(&self, i: usize, j: usize) -> Result<f64> {
        if i >= self.x.len() {
            return Err(Error::IndexOutOfBounds { index: i, len: self.x.len() });
        }
        if j >= self.y.len() {
            return Err(Error::IndexOutOfBounds { index: j, len: self.y.len() });
        }
        self.kernel
            .eval(self.x.point(i), self.y.point(j))
            .map_err(|e| self.attach_context(e, i, j))
    }

    /// Dense block K[rows, cols]; cost O(d · |rows| · |cols|).
    pub fn eval_block(&self, rows: &[usize], cols: &[usize]) -> Result<Array2<f64>> {
        let mut out = Array2::zeros((rows.len(), cols.len()));
        for (a, &i) in rows.iter().enumerate() {
            if i >= self.x.len() {
                return Err(Error::IndexOutOfBounds { index: i, len: self.x.len() });
            }
            let xp = self.x.point(i);
            for (b, &j) in cols.iter().enumerate() {
                if j >= self.y.len() {
                    return Err(Error::IndexOutOfBounds { index: j, len: self.y.len() });
                }
                out[[a, b]] = self
                    .kernel
                    .eval(xp, self.y.point(j))
                    .map_err(|e| self.attach_context(e, i, j))?;
            }
        }
        Ok(out)
    }

    /// The full dense matrix. Caller is responsible for desk-scale sizes.
    pub fn eval_full(&self) -> Result<Array2<f64>> {
        let rows: Vec<usize> = (0..self.x.len()).collect();
        let cols: Vec<usize> = (0..self.y.len()).collect();
        self.eval_block(&rows, &cols)
    }
}

/// Wrapper that counts pointwise evaluations; used to verify that algorithms
/// touch only the blocks they claim to.
pub struct CountingKernel<'a> {
    inner: &'a dyn Kernel,
    count: Cell<u64>,
}

impl<'a> CountingKernel<'a> {
    pub fn new(inner: &'a dyn Kernel) -> Self {
        Self { inner, count: Cell::new(0) }
    }

    pub fn count(&self) -> u64 {
        self.count.get()
    }
}

impl Kernel for CountingKernel<'_> {
    fn eval(&self, x: &[f64], y: &[f64]) -> std::result::Result<f64, EvalError> {
        self.count.set(self.count.get() + 1);
        self.inner.eval(x, y)
    }

    fn is_symmetric(&self) -> bool {
        self.inner.is_symmetric()
    }

    fn name(&self) -> String {
        self.inner.name()
    }
}

/// Derivation rules for data-dependent kernel parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum KernelDerivation {
    /// σ = `sigma_frac` · radius(X), radius measured from the origin (the
    /// data is expected to be standardized, so the origin is the mean).
    GaussianRadiusFraction { sigma_frac: f64 },
    /// R = max_{x ∈ X} dist(x, 0).
    RationalQuadraticRadius,
    /// c = 0.8 / max_{x ∈ X, y ∈ Y} |x − y|².
    BumpExpPairMax,
    Fixed { spec: KernelSpec },
}

/// Exact pairwise sweep limit for [`max_sq_pair_distance`]; above it a seeded
/// sample of 10^6 pairs is used with a 1.02 inflation factor.
const EXACT_PAIR_SWEEP_LIMIT: usize = 100_000_000;
const PAIR_SAMPLE_COUNT: usize = 1_000_000;
const PAIR_SAMPLE_SEED: u64 = 0xC0FFEE;
const PAIR_SAMPLE_INFLATION: f64 = 1.02;

/// max |x − y|² over X × Y, exact when |X|·|Y| fits the sweep limit.
pub fn max_sq_pair_distance(x: &PointSet, y: &PointSet) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::EmptyInput("pair distance sets"));
    }
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(x.dim(), y.dim()));
    }
    let exact = x.len().saturating_mul(y.len()) <= EXACT_PAIR_SWEEP_LIMIT;
    if exact {
        let mut best = 0.0f64;
        for p in x.iter() {
            for q in y.iter() {
                best = best.max(sq_dist_unchecked(p, q));
            }
        }
        Ok(best)
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(PAIR_SAMPLE_SEED);
        let mut best = 0.0f64;
        for _ in 0..PAIR_SAMPLE_COUNT {
            let i = rng.gen_range(0..x.len());
            let j = rng.gen_range(0..y.len());
            best = best.max(sq_dist_unchecked(x.point(i), y.point(j)));
        }
        Ok(best * PAIR_SAMPLE_INFLATION)
    }
}

/// Resolves a derivation rule against the data.
pub fn derive_params(rule: &KernelDerivation, x: &PointSet, y: &PointSet) -> Result<KernelSpec> {
    if x.is_empty() {
        return Err(Error::EmptyInput("derive_params X"));
    }
    match rule {
        KernelDerivation::GaussianRadiusFraction { sigma_frac } => {
            let sigma = sigma_frac * x.radius_from_origin();
            KernelSpec::gaussian(sigma)
        }
        KernelDerivation::RationalQuadraticRadius => {
            KernelSpec::rational_quadratic(x.radius_from_origin())
        }
        KernelDerivation::BumpExpPairMax => {
            let m = max_sq_pair_distance(x, y)?;
            if m == 0.0 {
                return Err(Error::InvalidKernelParam(
                    "bump-exp derivation: all pair distances are zero".into(),
                ));
            }
            KernelSpec::bump_exp(0.8 / m)
        }
        KernelDerivation::Fixed { spec } => Ok(spec.clone()),
    }
}
