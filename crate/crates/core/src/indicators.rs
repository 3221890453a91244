//! The five subset-quality indicators and the ratio-based protocol for
//! predicting which of two subset choices yields the better approximation.
//!
//! For subsets S₁ × S₂ of X × Y:
//!
//! 1. `max_{x,y} min_{u,v} |κ(x,y) − κ(u,v)|` — O(mn), computed on request;
//! 2. `max_x min_u ‖K_{xS₂} − K_{uS₂}‖` — O(m);
//! 3. `δ_{X,S₁}` — O(m);
//! 4. `δ_{Y,S₂}` — O(n);
//! 5. `‖K_{S₁S₂}⁺‖` — O(1) in m, n.

use serde::Serialize;

use crate::factor;
use crate::kernels::KernelMatrixHandle;
use crate::linalg::{max_norm, pinv_norm};
use crate::pointset::delta_indices;
use crate::selectors::{select, SelectorConfig, SubsetSelection};
use crate::{Error, Result};

/// Indicator values (None when not requested) and per-indicator operation
/// counts (kernel evaluations for 1, 2, 5; distance evaluations for 3, 4).
#[derive(Debug, Clone, Serialize)]
pub struct IndicatorReport {
    pub values: [Option<f64>; 5],
    pub costs: [u64; 5],
    pub s1: Vec<usize>,
    pub s2: Vec<usize>,
}

impl IndicatorReport {
    pub fn get(&self, k: usize) -> Option<f64> {
        self.values.get(k.checked_sub(1)?).copied().flatten()
    }
}

/// Computes the requested indicators (`which` holds 1-based indices).
pub fn compute_indicators(
    h: &KernelMatrixHandle,
    s1: &SubsetSelection,
    s2: &SubsetSelection,
    which: &[usize],
) -> Result<IndicatorReport> {
    let (m, n) = h.shape();
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::EmptyInput("indicator subsets"));
    }
    for &k in which {
        if !(1..=5).contains(&k) {
            return Err(Error::InvalidConfig(format!("indicator index {k} out of 1..=5")));
        }
    }
    let want = |k: usize| which.contains(&k);
    let mut values = [None; 5];
    let mut costs = [0u64; 5];

    if want(1) {
        // Sort the subset kernel values once, then take the nearest-value
        // distance for each entry of K by binary search.
        let mut subset_vals: Vec<f64> = Vec::with_capacity(s1.len() * s2.len());
        let kss = h.eval_block(s1.indices(), s2.indices())?;
        subset_vals.extend(kss.iter().copied());
        subset_vals.sort_by(f64::total_cmp);
        let nearest = |v: f64| -> f64 {
            let i = subset_vals.partition_point(|&s| s < v);
            let mut best = f64::INFINITY;
            if i < subset_vals.len() {
                best = best.min((subset_vals[i] - v).abs());
            }
            if i > 0 {
                best = best.min((subset_vals[i - 1] - v).abs());
            }
            best
        };
        let mut worst = 0.0f64;
        for i in 0..m {
            for j in 0..n {
                worst = worst.max(nearest(h.eval_entry(i, j)?));
            }
        }
        values[0] = Some(worst);
        costs[0] = (m * n + s1.len() * s2.len()) as u64;
    }

    if want(2) {
        let all_rows: Vec<usize> = (0..m).collect();
        let k_xs2 = h.eval_block(&all_rows, s2.indices())?;
        let mut worst = 0.0f64;
        for i in 0..m {
            let mut best = f64::INFINITY;
            for &u in s1.indices() {
                let mut acc = 0.0;
                for b in 0..s2.len() {
                    let d = k_xs2[[i, b]] - k_xs2[[u, b]];
                    acc += d * d;
                }
                best = best.min(acc);
            }
            worst = worst.max(best);
        }
        values[1] = Some(worst.sqrt());
        costs[1] = (m * s2.len()) as u64;
    }

    if want(3) {
        values[2] = Some(delta_indices(h.x(), s1.indices())?);
        costs[2] = (m * s1.len()) as u64;
    }

    if want(4) {
        values[3] = Some(delta_indices(h.y(), s2.indices())?);
        costs[3] = (n * s2.len()) as u64;
    }

    if want(5) {
        let kss = h.eval_block(s1.indices(), s2.indices())?;
        values[4] = Some(pinv_norm(&kss)?);
        costs[4] = (s1.len() * s2.len()) as u64;
    }

    Ok(IndicatorReport {
        values,
        costs,
        s1: s1.indices().to_vec(),
        s2: s2.indices().to_vec(),
    })
}

/// One side of a ratio comparison.
#[derive(Debug, Clone)]
pub enum SubsetChoice {
    /// Fixed selections whose prefixes are sliced per rank.
    Fixed { s1: SubsetSelection, s2: SubsetSelection },
    /// Fresh selections re-drawn at each rank with a rank-derived seed
    /// (see [`derived_seed`]).
    PerRank { selector_x: SelectorConfig, selector_y: SelectorConfig },
    /// Symmetric case: one per-rank selection from X used as both S₁ and S₂.
    PerRankShared { selector: SelectorConfig },
}

/// Per-rank seed derivation for `PerRank*` choices: the base seed is mixed
/// with the rank so re-draws are independent but fully replayable.
pub fn derived_seed(base: u64, rank: usize) -> u64 {
    base.wrapping_add((rank as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

impl SubsetChoice {
    fn realize(
        &self,
        h: &KernelMatrixHandle,
        rank: usize,
    ) -> Result<(SubsetSelection, SubsetSelection)> {
        match self {
            SubsetChoice::Fixed { s1, s2 } => {
                if rank > s1.len() || rank > s2.len() {
                    return Err(Error::SampleTooLarge {
                        requested: rank,
                        available: s1.len().min(s2.len()),
                    });
                }
                let a = SubsetSelection::explicit(s1.indices()[..rank].to_vec(), h.x())?;
                let b = SubsetSelection::explicit(s2.indices()[..rank].to_vec(), h.y())?;
                Ok((a, b))
            }
            SubsetChoice::PerRank { selector_x, selector_y } => {
                let cfg_x = selector_x.clone().with_seed(derived_seed(selector_x.seed, rank));
                let cfg_y = selector_y.clone().with_seed(derived_seed(selector_y.seed, rank));
                Ok((select(h.x(), rank, &cfg_x)?, select(h.y(), rank, &cfg_y)?))
            }
            SubsetChoice::PerRankShared { selector } => {
                let cfg = selector.clone().with_seed(derived_seed(selector.seed, rank));
                let s = select(h.x(), rank, &cfg)?;
                Ok((s.clone(), s))
            }
        }
    }
}

/// Prediction derived from a single ratio: larger than 1 predicts choice A
/// is better, otherwise choice B (ties go to B, matching the threshold-at-1
/// protocol).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Prediction {
    ChoiceA,
    ChoiceB,
    Undefined,
}

impl Prediction {
    fn from_ratio(r: Option<f64>) -> Self {
        match r {
            None => Prediction::Undefined,
            Some(v) if v > 1.0 => Prediction::ChoiceA,
            Some(_) => Prediction::ChoiceB,
        }
    }

    fn token(self) -> &'static str {
        match self {
            Prediction::ChoiceA => "A",
            Prediction::ChoiceB => "B",
            Prediction::Undefined => "undefined",
        }
    }
}

/// One rank's worth of indicator ratios (choice B over choice A), the exact
/// max-norm error ratio, and the per-indicator predictions.
#[derive(Debug, Clone, Serialize)]
pub struct RatioRow {
    pub rank: usize,
    /// `indicator_k(B) / indicator_k(A)`; None when the denominator is 0.
    pub ratio_indicators: [Option<f64>; 5],
    pub ratio_error: Option<f64>,
    pub predictions: [Prediction; 5],
}

fn ratio(num: f64, den: f64) -> Option<f64> {
    (den != 0.0).then(|| num / den)
}

/// Runs the §-style comparison protocol: at each rank, realize both choices,
/// compute the requested indicators and the exact max-norm error of the
/// two-sided approximation, and report B/A ratios.
pub fn compare_choices(
    h: &KernelMatrixHandle,
    choice_a: &SubsetChoice,
    choice_b: &SubsetChoice,
    ranks: &[usize],
    which: &[usize],
) -> Result<Vec<RatioRow>> {
    let k = h.eval_full()?;
    let mut rows = Vec::with_capacity(ranks.len());
    for &rank in ranks {
        let (a1, a2) = choice_a.realize(h, rank)?;
        let (b1, b2) = choice_b.realize(h, rank)?;
        let rep_a = compute_indicators(h, &a1, &a2, which)?;
        let rep_b = compute_indicators(h, &b1, &b2, which)?;

        let err = |s1: &SubsetSelection, s2: &SubsetSelection| -> Result<f64> {
            let f = factor::two_sided(h, s1, s2, false, 0.0)?;
            Ok(max_norm(&(&k - &f.reconstruct())))
        };
        let err_a = err(&a1, &a2)?;
        let err_b = err(&b1, &b2)?;

        let mut ratio_indicators = [None; 5];
        for i in 0..5 {
            if let (Some(nb), Some(na)) = (rep_b.values[i], rep_a.values[i]) {
                ratio_indicators[i] = ratio(nb, na);
            }
        }
        let predictions = std::array::from_fn(|i| Prediction::from_ratio(ratio_indicators[i]));
        rows.push(RatioRow {
            rank,
            ratio_indicators,
            ratio_error: ratio(err_b, err_a),
            predictions,
        });
    }
    Ok(rows)
}

/// Emits the fixed-column CSV: `rank,ratio_ind1..ratio_ind5,ratio_error,predictions`,
/// with empty cells for undefined ratios and predictions joined by `;`.
pub fn ratio_table_csv(rows: &[RatioRow]) -> String {
    let mut out = String::from(
        "rank,ratio_ind1,ratio_ind2,ratio_ind3,ratio_ind4,ratio_ind5,ratio_error,predictions\n",
    );
    for row in rows {
        let cell = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x}"));
        let preds: Vec<&str> = row.predictions.iter().map(|p| p.token()).collect();
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            row.rank,
            cell(row.ratio_indicators[0]),
            cell(row.ratio_indicators[1]),
            cell(row.ratio_indicators[2]),
            cell(row.ratio_indicators[3]),
            cell(row.ratio_indicators[4]),
            cell(row.ratio_error),
            preds.join(";"),
        ));
    }
    out
}
