//! Linear-complexity geometric subset selection.
//!
//! All selectors return exactly `r` distinct indices into the source set and
//! carry the closeness statistic `δ(ps, selection)` of the result. Farthest
//! point sampling maintains a per-point nearest-selected-distance cache, so
//! selecting `r` of `n` points costs O(d·r·n) arithmetic; the naive
//! re-scanning variant is kept in the test suite as the oracle.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::pointset::{delta_indices, sq_dist_unchecked, PointSet};
use crate::{Error, Result};

/// How a subset was produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "kebab-case")]
pub enum SelectionMethod {
    Fps,
    Uniform,
    Mixed { fps_fraction: f64 },
    AnchorGrid,
    Explicit,
}

/// Initial point policy for farthest point sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FpsStart {
    /// Deterministic, geometry-aware default.
    #[default]
    FarthestFromCentroid,
    Index0,
    SeededRandom,
}

/// Full selector configuration as it appears in CLI flags and config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectorConfig {
    #[serde(flatten)]
    pub method: SelectionMethod,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub fps_start: FpsStart,
}

impl SelectorConfig {
    pub fn fps() -> Self {
        Self { method: SelectionMethod::Fps, seed: 0, fps_start: FpsStart::default() }
    }

    pub fn uniform(seed: u64) -> Self {
        Self { method: SelectionMethod::Uniform, seed, fps_start: FpsStart::default() }
    }

    pub fn mixed(fps_fraction: f64, seed: u64) -> Self {
        Self {
            method: SelectionMethod::Mixed { fps_fraction },
            seed,
            fps_start: FpsStart::default(),
        }
    }

    pub fn anchor_grid(seed: u64) -> Self {
        Self { method: SelectionMethod::AnchorGrid, seed, fps_start: FpsStart::default() }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_fps_start(mut self, start: FpsStart) -> Self {
        self.fps_start = start;
        self
    }

    /// Short tag used in result rows, e.g. `fps`, `mixed10`.
    pub fn tag(&self) -> String {
        match &self.method {
            SelectionMethod::Fps => "fps".into(),
            SelectionMethod::Uniform => "unif".into(),
            SelectionMethod::Mixed { fps_fraction } => {
                format!("mixed{}", (fps_fraction * 100.0).round() as u32)
            }
            SelectionMethod::AnchorGrid => "anc".into(),
            SelectionMethod::Explicit => "explicit".into(),
        }
    }
}

/// A selected subset: distinct indices into a source set, plus provenance
/// and the realized closeness statistic `δ(source, subset)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetSelection {
    indices: Vec<usize>,
    pub method: SelectionMethod,
    pub seed: u64,
    source_len: usize,
    pub delta: f64,
}

impl SubsetSelection {
    fn new(
        indices: Vec<usize>,
        method: SelectionMethod,
        seed: u64,
        source: &PointSet,
        delta: f64,
    ) -> Self {
        debug_assert!(indices.iter().all(|&i| i < source.len()));
        Self { indices, method, seed, source_len: source.len(), delta }
    }

    /// Wraps explicit indices, validating distinctness and bounds.
    pub fn explicit(indices: Vec<usize>, source: &PointSet) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::EmptyInput("subset indices"));
        }
        let mut seen = vec![false; source.len()];
        for &i in &indices {
            if i >= source.len() {
                return Err(Error::IndexOutOfBounds { index: i, len: source.len() });
            }
            if seen[i] {
                return Err(Error::InvalidConfig(format!("duplicate subset index {i}")));
            }
            seen[i] = true;
        }
        let delta = delta_indices(source, &indices)?;
        Ok(Self::new(indices, SelectionMethod::Explicit, 0, source, delta))
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn source_len(&self) -> usize {
        self.source_len
    }

    /// Materializes the selected points.
    pub fn gather(&self, source: &PointSet) -> Result<PointSet> {
        if source.len() != self.source_len {
            return Err(Error::InvalidConfig(format!(
                "selection was made over {} points, got a set of {}",
                self.source_len,
                source.len()
            )));
        }
        source.gather(&self.indices)
    }
}

fn check_sample_size(n: usize, r: usize) -> Result<()> {
    if r == 0 {
        return Err(Error::EmptyInput("sample count"));
    }
    if r > n {
        return Err(Error::SampleTooLarge { requested: r, available: n });
    }
    Ok(())
}

fn fps_start_index(ps: &PointSet, start: FpsStart, seed: u64) -> usize {
    match start {
        FpsStart::Index0 => 0,
        FpsStart::SeededRandom => ChaCha8Rng::seed_from_u64(seed).gen_range(0..ps.len()),
        FpsStart::FarthestFromCentroid => {
            let c = ps.centroid();
            let mut best = (f64::NEG_INFINITY, 0usize);
            for (i, p) in ps.iter().enumerate() {
                let d = sq_dist_unchecked(p, &c);
                if d > best.0 {
                    best = (d, i);
                }
            }
            best.1
        }
    }
}

/// Greedy max-min growth of `selected` until it holds `r` indices; `min_sq`
/// caches each point's squared distance to the selected set. Ties break to
/// the lowest index. Returns δ of the final selection.
fn fps_grow(
    ps: &PointSet,
    selected: &mut Vec<usize>,
    min_sq: &mut [f64],
    r: usize,
) -> f64 {
    let n = ps.len();
    while selected.len() < r {
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for (i, &d) in min_sq.iter().enumerate() {
            if d > best.0 {
                best = (d, i);
            }
        }
        let next = best.1;
        selected.push(next);
        let np = ps.point(next);
        for i in 0..n {
            let d = sq_dist_unchecked(ps.point(i), np);
            if d < min_sq[i] {
                min_sq[i] = d;
            }
        }
    }
    min_sq.iter().fold(0.0f64, |a, &b| a.max(b)).sqrt()
}

/// Farthest point sampling: seed with a start point, then repeatedly add the
/// point farthest from the current selection.
pub fn fps_select(ps: &PointSet, r: usize, start: FpsStart, seed: u64) -> Result<SubsetSelection> {
    check_sample_size(ps.len(), r)?;
    let first = fps_start_index(ps, start, seed);
    let mut selected = vec![first];
    let fp = ps.point(first);
    let mut min_sq: Vec<f64> = ps.iter().map(|p| sq_dist_unchecked(p, fp)).collect();
    let delta = fps_grow(ps, &mut selected, &mut min_sq, r);
    Ok(SubsetSelection::new(selected, SelectionMethod::Fps, seed, ps, delta))
}

fn uniform_from_pool(pool: &[usize], r: usize, seed: u64) -> Vec<usize> {
    let mut pool = pool.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (chosen, _) = pool.partial_shuffle(&mut rng, r);
    chosen.to_vec()
}

/// Uniform sampling without replacement.
pub fn uniform_select(ps: &PointSet, r: usize, seed: u64) -> Result<SubsetSelection> {
    check_sample_size(ps.len(), r)?;
    let pool: Vec<usize> = (0..ps.len()).collect();
    let indices = uniform_from_pool(&pool, r, seed);
    let delta = delta_indices(ps, &indices)?;
    Ok(SubsetSelection::new(indices, SelectionMethod::Uniform, seed, ps, delta))
}

/// `ceil(fps_fraction · r)` points by FPS, the remainder drawn uniformly from
/// the unchosen points.
pub fn mixed_select(
    ps: &PointSet,
    r: usize,
    fps_fraction: f64,
    start: FpsStart,
    seed: u64,
) -> Result<SubsetSelection> {
    check_sample_size(ps.len(), r)?;
    if !(0.0..=1.0).contains(&fps_fraction) {
        return Err(Error::InvalidConfig(format!(
            "fps_fraction must be in [0, 1], got {fps_fraction}"
        )));
    }
    let n_fps = ((fps_fraction * r as f64).ceil() as usize).min(r);
    let mut indices = if n_fps > 0 {
        fps_select(ps, n_fps, start, seed)?.indices().to_vec()
    } else {
        Vec::new()
    };
    let mut taken = vec![false; ps.len()];
    for &i in &indices {
        taken[i] = true;
    }
    let pool: Vec<usize> = (0..ps.len()).filter(|&i| !taken[i]).collect();
    indices.extend(uniform_from_pool(&pool, r - n_fps, seed));
    let delta = delta_indices(ps, &indices)?;
    Ok(SubsetSelection::new(
        indices,
        SelectionMethod::Mixed { fps_fraction },
        seed,
        ps,
        delta,
    ))
}

/// Root of x^(d+1) = x + 1; basis of the R_d quasi-random sequence used for
/// anchor placement.
fn rd_root(d: usize) -> f64 {
    let mut x = 1.5f64;
    for _ in 0..64 {
        x = (1.0 + x).powf(1.0 / (d as f64 + 1.0));
    }
    x
}

/// Anchor-grid selection: lays `r` low-discrepancy anchors over the data's
/// bounding box (R_d additive recurrence with a seeded offset), snaps each
/// anchor to its nearest data point, and fills duplicate-induced shortfall by
/// continuing greedy max-min growth. Total cost O(d·r·n).
///
/// This is a stand-in with the same interface and complexity as anchor-net
/// selection; the construction itself is internal and versioned.
pub fn anchor_grid_select(ps: &PointSet, r: usize, seed: u64) -> Result<SubsetSelection> {
    check_sample_size(ps.len(), r)?;
    let d = ps.dim();
    let (lo, hi) = ps.bounding_box();
    let width: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| b - a).collect();

    let phi = rd_root(d);
    let alphas: Vec<f64> = (0..d).map(|k| (1.0 / phi).powi(k as i32 + 1)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset: Vec<f64> = (0..d).map(|_| rng.gen::<f64>()).collect();

    let mut chosen: Vec<usize> = Vec::with_capacity(r);
    let mut taken = vec![false; ps.len()];
    for t in 0..r {
        // Anchor in the unit box, then mapped into the data box.
        let anchor: Vec<f64> = (0..d)
            .map(|k| {
                let u = (offset[k] + (t as f64 + 1.0) * alphas[k]).fract();
                lo[k] + u * width[k]
            })
            .collect();
        let mut best = (f64::INFINITY, usize::MAX);
        for (i, p) in ps.iter().enumerate() {
            let dist = sq_dist_unchecked(p, &anchor);
            if dist < best.0 {
                best = (dist, i);
            }
        }
        if !taken[best.1] {
            taken[best.1] = true;
            chosen.push(best.1);
        }
    }

    // Shortfall from duplicate snaps: continue with greedy max-min growth.
    let delta = if chosen.len() < r {
        let mut min_sq = vec![f64::INFINITY; ps.len()];
        for &s in &chosen {
            let sp = ps.point(s);
            for i in 0..ps.len() {
                let dsq = sq_dist_unchecked(ps.point(i), sp);
                if dsq < min_sq[i] {
                    min_sq[i] = dsq;
                }
            }
        }
        fps_grow(ps, &mut chosen, &mut min_sq, r)
    } else {
        delta_indices(ps, &chosen)?
    };
    Ok(SubsetSelection::new(chosen, SelectionMethod::AnchorGrid, seed, ps, delta))
}

/// Dispatches on the configured method.
pub fn select(ps: &PointSet, r: usize, cfg: &SelectorConfig) -> Result<SubsetSelection> {
    match cfg.method {
        SelectionMethod::Fps => fps_select(ps, r, cfg.fps_start, cfg.seed),
        SelectionMethod::Uniform => uniform_select(ps, r, cfg.seed),
        SelectionMethod::Mixed { fps_fraction } => {
            mixed_select(ps, r, fps_fraction, cfg.fps_start, cfg.seed)
        }
        SelectionMethod::AnchorGrid => anchor_grid_select(ps, r, cfg.seed),
        SelectionMethod::Explicit => Err(Error::InvalidConfig(
            "explicit selections are constructed from indices, not selected".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointset::{delta, generate_synthetic, SyntheticSpec};

    fn line11() -> PointSet {
        PointSet::from_1d(&[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0]).unwrap()
    }

    /// Naive O(d·r²·n) FPS oracle: rescans all selected points per candidate.
    fn fps_naive(ps: &PointSet, r: usize, first: usize) -> Vec<usize> {
        let mut selected = vec![first];
        while selected.len() < r {
            let mut best = (f64::NEG_INFINITY, usize::MAX);
            for i in 0..ps.len() {
                let near = selected
                    .iter()
                    .map(|&s| sq_dist_unchecked(ps.point(i), ps.point(s)))
                    .fold(f64::INFINITY, f64::min);
                if near > best.0 {
                    best = (near, i);
                }
            }
            selected.push(best.1);
        }
        selected
    }

    #[test]
    fn fps_line_example() {
        let ps = line11();
        let sel = fps_select(&ps, 4, FpsStart::Index0, 0).unwrap();
        assert_eq!(sel.indices(), &[0, 10, 5, 2]);
        assert_eq!(sel.indices(), fps_naive(&ps, 4, 0).as_slice());
    }

    #[test]
    fn fps_full_and_singleton() {
        let ps = line11();
        let sel = fps_select(&ps, 11, FpsStart::Index0, 0).unwrap();
        let mut sorted = sel.indices().to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..11).collect::<Vec<_>>());
        assert_eq!(sel.delta, 0.0);

        let single = PointSet::from_1d(&[3.0]).unwrap();
        let sel = fps_select(&single, 1, FpsStart::FarthestFromCentroid, 0).unwrap();
        assert_eq!(sel.indices(), &[0]);

        assert!(fps_select(&single, 2, FpsStart::Index0, 0).is_err());
        assert!(fps_select(&single, 0, FpsStart::Index0, 0).is_err());
    }

    #[test]
    fn fps_matches_naive_oracle_on_random_data() {
        let spec = SyntheticSpec::TwoClusters2d { n_x: 120, n_y: 10 };
        let (ps, _) = generate_synthetic(&spec, 17).unwrap();
        for start in [FpsStart::Index0, FpsStart::FarthestFromCentroid] {
            let sel = fps_select(&ps, 15, start, 0).unwrap();
            let first = sel.indices()[0];
            assert_eq!(sel.indices(), fps_naive(&ps, 15, first).as_slice());
        }
    }

    #[test]
    fn fps_delta_is_nonincreasing_along_prefix() {
        let spec = SyntheticSpec::TwoClusters2d { n_x: 80, n_y: 10 };
        let (ps, _) = generate_synthetic(&spec, 23).unwrap();
        let sel = fps_select(&ps, 20, FpsStart::FarthestFromCentroid, 0).unwrap();
        let mut prev = f64::INFINITY;
        for k in 1..=sel.len() {
            let sub = ps.gather(&sel.indices()[..k]).unwrap();
            let d = delta(&ps, &sub).unwrap();
            assert!(d <= prev + 1e-12, "delta increased at k={k}: {d} > {prev}");
            prev = d;
        }
        // The cached statistic matches a fresh recomputation.
        assert!((sel.delta - prev).abs() < 1e-12);
    }

    #[test]
    fn uniform_basics() {
        let ps = line11();
        let all = uniform_select(&ps, 11, 4).unwrap();
        let mut sorted = all.indices().to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..11).collect::<Vec<_>>());

        let a = uniform_select(&ps, 4, 9).unwrap();
        let b = uniform_select(&ps, 4, 9).unwrap();
        assert_eq!(a.indices(), b.indices());

        assert!(uniform_select(&ps, 12, 0).is_err());
    }

    #[test]
    fn uniform_covers_every_index_over_seeds() {
        let ps = PointSet::from_1d(&[0.0, 1.0, 2.0]).unwrap();
        let mut seen = [false; 3];
        for seed in 0..60 {
            let sel = uniform_select(&ps, 1, seed).unwrap();
            seen[sel.indices()[0]] = true;
        }
        assert!(seen.iter().all(|&s| s), "seed sweep should reach every index");
    }

    #[test]
    fn mixed_degenerate_fractions() {
        let spec = SyntheticSpec::TwoClusters2d { n_x: 50, n_y: 10 };
        let (ps, _) = generate_synthetic(&spec, 31).unwrap();

        let m1 = mixed_select(&ps, 12, 1.0, FpsStart::FarthestFromCentroid, 7).unwrap();
        let f = fps_select(&ps, 12, FpsStart::FarthestFromCentroid, 7).unwrap();
        assert_eq!(m1.indices(), f.indices());

        let m0 = mixed_select(&ps, 12, 0.0, FpsStart::FarthestFromCentroid, 7).unwrap();
        let u = uniform_select(&ps, 12, 7).unwrap();
        assert_eq!(m0.indices(), u.indices());
    }

    #[test]
    fn mixed_half_has_fps_prefix() {
        let spec = SyntheticSpec::TwoClusters2d { n_x: 60, n_y: 10 };
        let (ps, _) = generate_synthetic(&spec, 37).unwrap();
        let m = mixed_select(&ps, 10, 0.5, FpsStart::FarthestFromCentroid, 3).unwrap();
        let f = fps_select(&ps, 5, FpsStart::FarthestFromCentroid, 3).unwrap();
        assert_eq!(&m.indices()[..5], f.indices());
        let mut uniq = m.indices().to_vec();
        uniq.sort_unstable();
        uniq.dedup();
        assert_eq!(uniq.len(), 10);
    }

    #[test]
    fn anchor_grid_counts_and_full_draw() {
        let spec = SyntheticSpec::TwoClusters2d { n_x: 45, n_y: 10 };
        let (ps, _) = generate_synthetic(&spec, 41).unwrap();
        for r in [1, 7, 20, 45] {
            let sel = anchor_grid_select(&ps, r, 2).unwrap();
            let mut uniq = sel.indices().to_vec();
            uniq.sort_unstable();
            uniq.dedup();
            assert_eq!(uniq.len(), r, "r = {r}");
        }
        let all = anchor_grid_select(&ps, 45, 2).unwrap();
        let mut sorted = all.indices().to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..45).collect::<Vec<_>>());
    }

    #[test]
    fn anchor_grid_on_regular_grid_selects_the_grid() {
        let mut rows = Vec::new();
        for i in 0..5 {
            for j in 0..5 {
                rows.push(vec![i as f64, j as f64]);
            }
        }
        let ps = PointSet::from_rows(&rows).unwrap();
        let sel = anchor_grid_select(&ps, 25, 11).unwrap();
        let mut sorted = sel.indices().to_vec();
        sorted.sort_unstable();
        assert_eq!(sorted, (0..25).collect::<Vec<_>>());
    }

    #[test]
    fn selectors_are_seed_reproducible() {
        let spec = SyntheticSpec::TwoClusters2d { n_x: 70, n_y: 10 };
        let (ps, _) = generate_synthetic(&spec, 43).unwrap();
        for cfg in [
            SelectorConfig::fps(),
            SelectorConfig::uniform(5),
            SelectorConfig::mixed(0.3, 5),
            SelectorConfig::anchor_grid(5),
        ] {
            let a = select(&ps, 9, &cfg).unwrap();
            let b = select(&ps, 9, &cfg).unwrap();
            assert_eq!(a, b, "selector {:?}", cfg.tag());
        }
    }

    #[test]
    fn fps_beats_uniform_on_clustered_data_statistically() {
        let spec = SyntheticSpec::TwoClusters2d { n_x: 200, n_y: 10 };
        let (ps, _) = generate_synthetic(&spec, 51).unwrap();
        let fps_delta = fps_select(&ps, 10, FpsStart::FarthestFromCentroid, 0).unwrap().delta;
        let mut wins = 0;
        for seed in 0..100 {
            let u = uniform_select(&ps, 10, seed).unwrap();
            if fps_delta <= u.delta {
                wins += 1;
            }
        }
        assert!(wins >= 90, "FPS should win in >= 90 of 100 seeds, won {wins}");
    }

    #[test]
    fn explicit_selection_validates() {
        let ps = line11();
        let sel = SubsetSelection::explicit(vec![2, 5, 9], &ps).unwrap();
        assert_eq!(sel.len(), 3);
        assert!(SubsetSelection::explicit(vec![2, 2], &ps).is_err());
        assert!(SubsetSelection::explicit(vec![11], &ps).is_err());
        assert!(SubsetSelection::explicit(vec![], &ps).is_err());
    }
}
