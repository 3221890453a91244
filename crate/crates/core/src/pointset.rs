//! Finite point sets in `R^d`, metric utilities and the closeness statistic
//! `δ(Z, S) = max_{z ∈ Z} min_{s ∈ S} |z − s|`, plus dataset ingestion,
//! standardization and the synthetic benchmark geometries.

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// An ordered, immutable collection of d-dimensional points stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    data: Vec<f64>,
    dim: usize,
    label: Option<String>,
}

impl PointSet {
    /// Builds a point set from a flat row-major buffer.
    pub fn from_flat(data: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfig("point dimension must be >= 1".into()));
        }
        if data.is_empty() || data.len() % dim != 0 {
            return Err(Error::InvalidConfig(format!(
                "flat buffer of length {} is not a nonempty multiple of dim {}",
                data.len(),
                dim
            )));
        }
        Ok(Self { data, dim, label: None })
    }

    /// Builds a point set from one row per point.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows.first().ok_or(Error::EmptyInput("point set"))?;
        let dim = first.len();
        let mut data = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(dim, row.len()));
            }
            data.extend_from_slice(row);
        }
        Self::from_flat(data, dim)
    }

    /// Convenience constructor for 1-D points.
    pub fn from_1d(values: &[f64]) -> Result<Self> {
        Self::from_flat(values.to_vec(), 1)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.data.chunks_exact(self.dim)
    }

    /// Gathers the points at `indices` into a new set, preserving order.
    pub fn gather(&self, indices: &[usize]) -> Result<PointSet> {
        if indices.is_empty() {
            return Err(Error::EmptyInput("gather indices"));
        }
        let mut data = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.len() {
                return Err(Error::IndexOutOfBounds { index: i, len: self.len() });
            }
            data.extend_from_slice(self.point(i));
        }
        PointSet::from_flat(data, self.dim)
    }

    /// Per-dimension bounding box as (mins, maxs).
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.iter() {
            for (k, &v) in p.iter().enumerate() {
                lo[k] = lo[k].min(v);
                hi[k] = hi[k].max(v);
            }
        }
        (lo, hi)
    }

    /// Max distance from the origin over all points.
    pub fn radius_from_origin(&self) -> f64 {
        self.iter()
            .map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.dim];
        for p in self.iter() {
            for (k, &v) in p.iter().enumerate() {
                c[k] += v;
            }
        }
        let n = self.len() as f64;
        c.iter_mut().for_each(|v| *v /= n);
        c
    }
}

/// Euclidean distance between two points of equal dimension.
pub fn distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(a.len(), b.len()));
    }
    Ok(dist_unchecked(a, b))
}

#[inline]
pub(crate) fn dist_unchecked(a: &[f64], b: &[f64]) -> f64 {
    sq_dist_unchecked(a, b).sqrt()
}

#[inline]
pub(crate) fn sq_dist_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Distance from a point to the nearest point of a set.
pub fn dist_to_set(p: &[f64], s: &PointSet) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::EmptyInput("distance target set"));
    }
    if p.len() != s.dim() {
        return Err(Error::DimensionMismatch(p.len(), s.dim()));
    }
    Ok(s.iter()
        .map(|q| sq_dist_unchecked(p, q))
        .fold(f64::INFINITY, f64::min)
        .sqrt())
}

/// The closeness statistic `δ(Z, S) = max_{z ∈ Z} dist(z, S)`.
///
/// Cost is O(|Z| · |S| · d).
pub fn delta(z: &PointSet, s: &PointSet) -> Result<f64> {
    if s.is_empty() {
        return Err(Error::EmptyInput("delta subset"));
    }
    if z.dim() != s.dim() {
        return Err(Error::DimensionMismatch(z.dim(), s.dim()));
    }
    let mut worst = 0.0f64;
    for p in z.iter() {
        let nearest = s
            .iter()
            .map(|q| sq_dist_unchecked(p, q))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(nearest);
    }
    Ok(worst.sqrt())
}

/// `δ(Z, Z[indices])` without materializing the subset.
pub fn delta_indices(z: &PointSet, indices: &[usize]) -> Result<f64> {
    let sub = z.gather(indices)?;
    delta(z, &sub)
}

/// Per-dimension affine transform that standardizes a raw dataset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizationRecord {
    pub mean: Vec<f64>,
    /// Per-dimension standard deviation (population convention); 1.0 for
    /// dimensions flagged constant.
    pub scale: Vec<f64>,
    /// Dimensions whose variance was below 1e-30; their scale is left at 1.
    pub constant_dims: Vec<usize>,
}

impl StandardizationRecord {
    pub fn apply(&self, raw: &PointSet) -> Result<PointSet> {
        self.transform(raw, false)
    }

    pub fn invert(&self, standardized: &PointSet) -> Result<PointSet> {
        self.transform(standardized, true)
    }

    fn transform(&self, ps: &PointSet, inverse: bool) -> Result<PointSet> {
        if ps.dim() != self.mean.len() {
            return Err(Error::DimensionMismatch(ps.dim(), self.mean.len()));
        }
        let d = ps.dim();
        let mut data = Vec::with_capacity(ps.len() * d);
        for p in ps.iter() {
            for k in 0..d {
                let v = if inverse {
                    p[k] * self.scale[k] + self.mean[k]
                } else {
                    (p[k] - self.mean[k]) / self.scale[k]
                };
                data.push(v);
            }
        }
        PointSet::from_flat(data, d)
    }
}

/// Standardizes to per-dimension mean 0 and (population) variance 1.
///
/// A dimension with zero variance keeps scale 1 and is reported in
/// `constant_dims` rather than producing NaNs.
pub fn standardize(raw: &PointSet) -> Result<(PointSet, StandardizationRecord)> {
    if raw.len() < 2 {
        return Err(Error::EmptyInput("standardize needs >= 2 points"));
    }
    let d = raw.dim();
    let n = raw.len() as f64;
    let mut mean = vec![0.0; d];
    for p in raw.iter() {
        for k in 0..d {
            mean[k] += p[k];
        }
    }
    mean.iter_mut().for_each(|v| *v /= n);

    let mut var = vec![0.0; d];
    for p in raw.iter() {
        for k in 0..d {
            let c = p[k] - mean[k];
            var[k] += c * c;
        }
    }
    var.iter_mut().for_each(|v| *v /= n);

    let mut constant_dims = Vec::new();
    let scale: Vec<f64> = var
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            if v < 1e-30 {
                constant_dims.push(k);
                1.0
            } else {
                v.sqrt()
            }
        })
        .collect();

    let record = StandardizationRecord { mean, scale, constant_dims };
    let out = record.apply(raw)?;
    Ok((out, record))
}

/// Draws `k` distinct points uniformly without replacement (partial
/// Fisher-Yates over indices, ChaCha8 stream seeded by `seed`).
pub fn subsample_without_replacement(ps: &PointSet, k: usize, seed: u64) -> Result<PointSet> {
    let idx = subsample_indices(ps.len(), k, seed)?;
    ps.gather(&idx)
}

/// Index form of [`subsample_without_replacement`].
pub fn subsample_indices(n: usize, k: usize, seed: u64) -> Result<Vec<usize>> {
    if k == 0 {
        return Err(Error::EmptyInput("subsample size"));
    }
    if k > n {
        return Err(Error::SampleTooLarge { requested: k, available: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<usize> = (0..n).collect();
    let (chosen, _) = pool.partial_shuffle(&mut rng, k);
    Ok(chosen.to_vec())
}

/// Reads a numeric CSV (one point per row, comma delimiter). A first row that
/// fails to parse as numbers is treated as a header and skipped.
pub fn read_csv(path: impl AsRef<Path>) -> Result<PointSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path.as_ref())?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record?;
        let parsed: std::result::Result<Vec<f64>, _> =
            record.iter().map(|f| f.parse::<f64>()).collect();
        match parsed {
            Ok(row) => {
                if !row.is_empty() {
                    rows.push(row);
                }
            }
            Err(_) if line == 0 => continue, // header
            Err(e) => {
                return Err(Error::InvalidConfig(format!(
                    "non-numeric CSV field at data row {}: {}",
                    line + 1,
                    e
                )))
            }
        }
    }
    PointSet::from_rows(&rows)
}

/// Synthetic dataset generators reproducing the benchmark geometries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "spec", rename_all = "kebab-case")]
pub enum SyntheticSpec {
    /// 3-D half-shell-plus-cubes manifold; `Y = X + (0, 0, shift)`.
    ///
    /// Layout constants: a unit upper hemisphere centered at the origin
    /// (`n - 4*(n/14)` points uniform on the surface) and four axis-aligned
    /// cubes of side 0.2 (`n/14` points each, uniform in volume) centered
    /// at (0, 0, -0.6), (0.9, 0.9, -0.6), (-0.9, 0.9, -0.6) and
    /// (0.9, -0.9, -0.6). The cube under the dome apex fixes the vertical
    /// extent so that shift 2.7 leaves a minimum inter-set gap of about 1.
    ShiftedManifold { shift: f64, n_per_set: usize },
    /// `X ~ U[0,1]^d`, `Y ~ U[2,3]^d`, `n_per_set` points each.
    UniformBoxes { dim: usize, n_per_set: usize },
    /// Irregular planar data: 70% of the points in `[0,1]^2`, 30% in
    /// `[2.5,3.5] x [1,2]`. X and Y are independent draws.
    TwoClusters2d { n_x: usize, n_y: usize },
}

/// Generates the pair (X, Y) for a synthetic spec, deterministically in `seed`.
pub fn generate_synthetic(spec: &SyntheticSpec, seed: u64) -> Result<(PointSet, PointSet)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match *spec {
        SyntheticSpec::ShiftedManifold { shift, n_per_set } => {
            if n_per_set < 14 {
                return Err(Error::InvalidConfig(
                    "shifted-manifold needs at least 14 points per set".into(),
                ));
            }
            let cube_n = n_per_set / 14;
            let shell_n = n_per_set - 4 * cube_n;
            let mut rows = Vec::with_capacity(n_per_set);
            for _ in 0..shell_n {
                // Uniform on the upper unit hemisphere (Archimedes: z uniform).
                let z: f64 = rng.gen::<f64>();
                let phi = rng.gen::<f64>() * std::f64::consts::TAU;
                let r = (1.0 - z * z).max(0.0).sqrt();
                rows.push(vec![r * phi.cos(), r * phi.sin(), z]);
            }
            const CUBE_CENTERS: [[f64; 3]; 4] = [
                [0.0, 0.0, -0.6],
                [0.9, 0.9, -0.6],
                [-0.9, 0.9, -0.6],
                [0.9, -0.9, -0.6],
            ];
            const CUBE_SIDE: f64 = 0.2;
            for center in CUBE_CENTERS {
                for _ in 0..cube_n {
                    let p: Vec<f64> = center
                        .iter()
                        .map(|c| c + (rng.gen::<f64>() - 0.5) * CUBE_SIDE)
                        .collect();
                    rows.push(p);
                }
            }
            let x = PointSet::from_rows(&rows)?;
            let y_rows: Vec<Vec<f64>> = rows
                .iter()
                .map(|p| vec![p[0], p[1], p[2] + shift])
                .collect();
            let y = PointSet::from_rows(&y_rows)?;
            Ok((x, y))
        }
        SyntheticSpec::UniformBoxes { dim, n_per_set } => {
            if dim == 0 || n_per_set == 0 {
                return Err(Error::InvalidConfig("uniform-boxes needs dim, n >= 1".into()));
            }
            let sample_box = |rng: &mut ChaCha8Rng, lo: f64| -> Vec<Vec<f64>> {
                (0..n_per_set)
                    .map(|_| (0..dim).map(|_| lo + rng.gen::<f64>()).collect())
                    .collect()
            };
            let x = PointSet::from_rows(&sample_box(&mut rng, 0.0))?;
            let y = PointSet::from_rows(&sample_box(&mut rng, 2.0))?;
            Ok((x, y))
        }
        SyntheticSpec::TwoClusters2d { n_x, n_y } => {
            if n_x == 0 || n_y == 0 {
                return Err(Error::InvalidConfig("two-clusters-2d needs n >= 1".into()));
            }
            let draw = |n: usize, rng: &mut ChaCha8Rng| -> Vec<Vec<f64>> {
                let n_a = (7 * n) / 10;
                let mut rows = Vec::with_capacity(n);
                for _ in 0..n_a {
                    rows.push(vec![rng.gen::<f64>(), rng.gen::<f64>()]);
                }
                for _ in n_a..n {
                    rows.push(vec![2.5 + rng.gen::<f64>(), 1.0 + rng.gen::<f64>()]);
                }
                rows
            };
            let x = PointSet::from_rows(&draw(n_x, &mut rng))?;
            let y = PointSet::from_rows(&draw(n_y, &mut rng))?;
            Ok((x, y))
        }
    }
}

/// Minimum distance between any pair (x, y), x in X, y in Y. O(|X||Y|d).
pub fn min_interset_distance(x: &PointSet, y: &PointSet) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch(x.dim(), y.dim()));
    }
    let mut best = f64::INFINITY;
    for p in x.iter() {
        for q in y.iter() {
            best = best.min(sq_dist_unchecked(p, q));
        }
    }
    Ok(best.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        assert_eq!(distance(&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(distance(&[3.0, 4.0], &[3.0, 4.0]).unwrap(), 0.0);
        assert_eq!(distance(&[0.0, 0.0], &[3.0, 4.0]).unwrap(), 5.0);
        assert!(distance(&[0.0], &[0.0, 1.0]).is_err());
    }

    #[test]
    fn delta_trivial_cases() {
        let z = PointSet::from_1d(&[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(delta(&z, &z).unwrap(), 0.0);
        let s = PointSet::from_1d(&[0.0]).unwrap();
        assert_eq!(delta(&z, &s).unwrap(), 2.0);
    }

    #[test]
    fn delta_rejects_empty_and_mismatched() {
        let z = PointSet::from_1d(&[0.0]).unwrap();
        let s2 = PointSet::from_rows(&[vec![0.0, 0.0]]).unwrap();
        assert!(delta(&z, &s2).is_err());
        assert!(z.gather(&[]).is_err());
    }

    #[test]
    fn delta_matches_bruteforce_recompute() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let rows: Vec<Vec<f64>> = (0..100)
            .map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>()])
            .collect();
        let z = PointSet::from_rows(&rows).unwrap();
        let idx = subsample_indices(100, 10, 3).unwrap();
        let s = z.gather(&idx).unwrap();

        let mut expect = 0.0f64;
        for p in z.iter() {
            let mut nearest = f64::INFINITY;
            for q in s.iter() {
                let d = distance(p, q).unwrap();
                nearest = nearest.min(d);
            }
            expect = expect.max(nearest);
        }
        let got = delta(&z, &s).unwrap();
        assert!((got - expect).abs() < 1e-14);
    }

    #[test]
    fn delta_monotone_under_enlargement() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rows: Vec<Vec<f64>> = (0..60)
            .map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()])
            .collect();
        let z = PointSet::from_rows(&rows).unwrap();
        let small: Vec<usize> = (0..5).collect();
        let large: Vec<usize> = (0..20).collect();
        assert!(delta_indices(&z, &large).unwrap() <= delta_indices(&z, &small).unwrap());
    }

    #[test]
    fn standardize_two_points() {
        let raw = PointSet::from_1d(&[0.0, 2.0]).unwrap();
        let (out, rec) = standardize(&raw).unwrap();
        assert_eq!(out.point(0), &[-1.0]);
        assert_eq!(out.point(1), &[1.0]);
        assert_eq!(rec.mean, vec![1.0]);
        assert_eq!(rec.scale, vec![1.0]);
        assert!(rec.constant_dims.is_empty());
    }

    #[test]
    fn standardize_moments_and_idempotence() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rows: Vec<Vec<f64>> = (0..5)
            .map(|_| (0..3).map(|_| rng.gen::<f64>() * 10.0 - 3.0).collect())
            .collect();
        let raw = PointSet::from_rows(&rows).unwrap();
        let (out, rec) = standardize(&raw).unwrap();

        let n = out.len() as f64;
        for k in 0..3 {
            let mean: f64 = out.iter().map(|p| p[k]).sum::<f64>() / n;
            let var: f64 = out.iter().map(|p| p[k] * p[k]).sum::<f64>() / n;
            assert!(mean.abs() < 1e-12, "mean {mean}");
            assert!((var - 1.0).abs() < 1e-12, "var {var}");
        }

        // Idempotence: standardizing standardized data changes nothing.
        let (again, _) = standardize(&out).unwrap();
        for (p, q) in out.iter().zip(again.iter()) {
            for (a, b) in p.iter().zip(q) {
                assert!((a - b).abs() < 1e-10);
            }
        }

        // Inversion reproduces the raw data.
        let back = rec.invert(&out).unwrap();
        for (p, q) in raw.iter().zip(back.iter()) {
            for (a, b) in p.iter().zip(q) {
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn standardize_flags_constant_dimension() {
        let raw = PointSet::from_rows(&[vec![1.0, 5.0], vec![2.0, 5.0], vec![3.0, 5.0]]).unwrap();
        let (out, rec) = standardize(&raw).unwrap();
        assert_eq!(rec.constant_dims, vec![1]);
        assert_eq!(rec.scale[1], 1.0);
        for p in out.iter() {
            assert_eq!(p[1], 0.0);
        }
    }

    #[test]
    fn subsample_determinism_and_full_draw() {
        let ps = PointSet::from_1d(&[0.0, 1.0, 2.0, 3.0]).unwrap();
        let a = subsample_without_replacement(&ps, 2, 99).unwrap();
        let b = subsample_without_replacement(&ps, 2, 99).unwrap();
        assert_eq!(a, b);

        let full = subsample_without_replacement(&ps, 4, 5).unwrap();
        let mut vals: Vec<f64> = full.iter().map(|p| p[0]).collect();
        vals.sort_by(f64::total_cmp);
        assert_eq!(vals, vec![0.0, 1.0, 2.0, 3.0]);

        assert!(matches!(
            subsample_without_replacement(&ps, 5, 0),
            Err(Error::SampleTooLarge { .. })
        ));
    }

    #[test]
    fn subsample_covers_all_pairs_over_seeds() {
        use std::collections::BTreeSet;
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        for seed in 0..200u64 {
            let idx = subsample_indices(4, 2, seed).unwrap();
            let (a, b) = (idx[0].min(idx[1]), idx[0].max(idx[1]));
            seen.insert((a, b));
        }
        assert_eq!(seen.len(), 6, "all 6 unordered pairs should occur: {seen:?}");
    }

    #[test]
    fn uniform_boxes_membership() {
        let spec = SyntheticSpec::UniformBoxes { dim: 3, n_per_set: 200 };
        let (x, y) = generate_synthetic(&spec, 42).unwrap();
        assert_eq!(x.len(), 200);
        assert_eq!(y.len(), 200);
        for p in x.iter() {
            assert!(p.iter().all(|&v| (0.0..=1.0).contains(&v)));
        }
        for p in y.iter() {
            assert!(p.iter().all(|&v| (2.0..=3.0).contains(&v)));
        }
    }

    #[test]
    fn shifted_manifold_min_distance_and_overlap() {
        let spec = SyntheticSpec::ShiftedManifold { shift: 2.7, n_per_set: 1400 };
        let (x, y) = generate_synthetic(&spec, 7).unwrap();
        assert_eq!(x.len(), 1400);
        let d = min_interset_distance(&x, &y).unwrap();
        assert!((0.8..=1.2).contains(&d), "min inter-set distance {d}");

        let spec = SyntheticSpec::ShiftedManifold { shift: 0.5, n_per_set: 1400 };
        let (x, y) = generate_synthetic(&spec, 7).unwrap();
        let (xlo, xhi) = x.bounding_box();
        let (ylo, yhi) = y.bounding_box();
        let overlaps = (0..3).all(|k| xlo[k] <= yhi[k] && ylo[k] <= xhi[k]);
        assert!(overlaps, "bounding boxes must overlap for shift 0.5");
    }

    #[test]
    fn seeded_generation_is_reproducible() {
        let spec = SyntheticSpec::TwoClusters2d { n_x: 50, n_y: 100 };
        let (x1, y1) = generate_synthetic(&spec, 3).unwrap();
        let (x2, y2) = generate_synthetic(&spec, 3).unwrap();
        assert_eq!(x1, x2);
        assert_eq!(y1, y2);
        assert_eq!(x1.len(), 50);
        assert_eq!(y1.len(), 100);
    }

    #[test]
    fn csv_roundtrip_with_header() {
        let dir = std::env::temp_dir().join("ddkern-pointset-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("pts.csv");
        std::fs::write(&path, "a,b\n1.0,2.0\n3.5,-4.0\n").unwrap();
        let ps = read_csv(&path).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps.dim(), 2);
        assert_eq!(ps.point(1), &[3.5, -4.0]);
        std::fs::remove_file(&path).ok();
    }
}
