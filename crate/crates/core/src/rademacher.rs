//! Rademacher-symmetrized suprema used as random thresholds:
//!
//! ```text
//! R(n, j)    = 2 ‖(1/n) Σ ε_i K_j(X_i, ·)‖_∞
//! T(n, j, l) = 2 ‖(1/n) Σ ε_i (K_j - K_l)(X_i, ·)‖_∞
//! ```
//!
//! and their conditional expectations over the signs, by Monte Carlo or, for
//! small samples, exact enumeration.

use std::collections::BTreeMap;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{project_measure, Sample};
use crate::piecewise::DyadicPiecewisePoly;
use crate::rng::{label, StreamKey};
use crate::spline_kernel::ProjectionKernel;

/// Largest sample for which exact enumeration over all sign vectors is offered.
pub const MAX_ENUMERATION_N: usize = 20;

pub const DEFAULT_M_DRAWS: usize = 100;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RademacherDraw {
    pub signs: Vec<i8>,
    pub seed_path: StreamKey,
}

impl RademacherDraw {
    pub fn generate(n: usize, key: &StreamKey) -> Self {
        let mut rng = key.rng();
        let signs = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
        Self {
            signs,
            seed_path: key.clone(),
        }
    }

    /// The `index`-th draw of the Rademacher stream under `key`.
    pub fn nth(n: usize, key: &StreamKey, index: u64) -> Self {
        Self::generate(n, &key.child(label::RADEMACHER).child(index))
    }

    pub fn from_signs(signs: Vec<i8>, seed_path: StreamKey) -> Result<Self> {
        if let Some(&bad) = signs.iter().find(|&&e| e != 1 && e != -1) {
            return Err(Error::InvalidArgument(format!("Rademacher sign must be ±1, got {bad}")));
        }
        Ok(Self { signs, seed_path })
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn negated(&self) -> Self {
        Self {
            signs: self.signs.iter().map(|e| -e).collect(),
            seed_path: self.seed_path.clone(),
        }
    }

    /// `ε_i / n`.
    pub fn weights(&self) -> Vec<f64> {
        let n = self.signs.len() as f64;
        self.signs.iter().map(|&e| f64::from(e) / n).collect()
    }
}

/// `(1/n) Σ ε_i K_j(X_i, ·)`.
pub fn symmetrized_projection(
    s: &Sample,
    draw: &RademacherDraw,
    j: u32,
    kernel: &ProjectionKernel,
) -> Result<DyadicPiecewisePoly> {
    Ok(project_measure(s, &draw.weights(), j, kernel)?.density)
}

pub fn rademacher_sup(s: &Sample, draw: &RademacherDraw, j: u32, kernel: &ProjectionKernel) -> Result<f64> {
    Ok(2.0 * symmetrized_projection(s, draw, j, kernel)?.sup_norm().value)
}

pub fn pair_sup(s: &Sample, draw: &RademacherDraw, j: u32, l: u32, kernel: &ProjectionKernel) -> Result<f64> {
    if j >= l {
        return Err(Error::PairOrder { j, l });
    }
    let pj = symmetrized_projection(s, draw, j, kernel)?;
    let pl = symmetrized_projection(s, draw, l, kernel)?;
    Ok(2.0 * pj.difference(&pl).sup_norm().value)
}

fn statistic(s: &Sample, draw: &RademacherDraw, j: u32, l: Option<u32>, kernel: &ProjectionKernel) -> Result<f64> {
    match l {
        None => rademacher_sup(s, draw, j, kernel),
        Some(l) => pair_sup(s, draw, j, l, kernel),
    }
}

/// Monte Carlo mean with its standard error (`None` for a single draw).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanEstimate {
    pub mean: f64,
    pub std_err: Option<f64>,
    pub draws: usize,
}

impl MeanEstimate {
    pub fn from_values(values: &[f64]) -> Self {
        let m = values.len();
        let mean = values.iter().sum::<f64>() / m as f64;
        let std_err = (m > 1).then(|| {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
            (var / m as f64).sqrt()
        });
        Self {
            mean,
            std_err,
            draws: m,
        }
    }
}

/// `E^ε R(n, j)` (or `E^ε T(n, j, l)` when `l` is given) over `m` seeded draws.
pub fn cond_expect_sup(
    s: &Sample,
    m: usize,
    key: &StreamKey,
    j: u32,
    l: Option<u32>,
    kernel: &ProjectionKernel,
) -> Result<MeanEstimate> {
    if m == 0 {
        return Err(Error::InvalidArgument("m_draws must be at least 1".into()));
    }
    let values = (0..m as u64)
        .into_par_iter()
        .map(|d| statistic(s, &RademacherDraw::nth(s.len(), key, d), j, l, kernel))
        .collect::<Result<Vec<f64>>>()?;
    Ok(MeanEstimate::from_values(&values))
}

/// Exact `E^ε` by averaging over all `2^n` sign vectors.
pub fn exact_cond_expect_sup(s: &Sample, j: u32, l: Option<u32>, kernel: &ProjectionKernel) -> Result<f64> {
    let n = s.len();
    if n > MAX_ENUMERATION_N {
        return Err(Error::InvalidArgument(format!(
            "exact enumeration needs n ≤ {MAX_ENUMERATION_N}, got {n}"
        )));
    }
    let key = StreamKey::root(0);
    let values = (0..1u64 << n)
        .into_par_iter()
        .map(|bits| {
            let signs = (0..n).map(|i| if bits >> i & 1 == 1 { 1 } else { -1 }).collect();
            statistic(
                s,
                &RademacherDraw {
                    signs,
                    seed_path: key.clone(),
                },
                j,
                l,
                kernel,
            )
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(values.iter().sum::<f64>() / values.len() as f64)
}

/// `R(n, l)` for every level and `T(n, j, l)` for every pair `j < l` of a
/// grid, averaged over `m_draws` draws that are shared by all levels.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdStats {
    pub r: BTreeMap<u32, MeanEstimate>,
    pub t: BTreeMap<(u32, u32), MeanEstimate>,
    pub m_draws: usize,
}

impl ThresholdStats {
    pub fn compute(
        s: &Sample,
        levels: &[u32],
        kernel: &ProjectionKernel,
        m_draws: usize,
        key: &StreamKey,
    ) -> Result<Self> {
        if m_draws == 0 {
            return Err(Error::InvalidArgument("m_draws must be at least 1".into()));
        }
        let per_draw = (0..m_draws as u64)
            .into_par_iter()
            .map(|d| {
                let draw = RademacherDraw::nth(s.len(), key, d);
                let proj = levels
                    .iter()
                    .map(|&j| symmetrized_projection(s, &draw, j, kernel))
                    .collect::<Result<Vec<_>>>()?;
                let r: Vec<f64> = proj.iter().map(|p| 2.0 * p.sup_norm().value).collect();
                let mut t = Vec::new();
                for a in 0..levels.len() {
                    for b in a + 1..levels.len() {
                        t.push(2.0 * proj[a].difference(&proj[b]).sup_norm().value);
                    }
                }
                Ok((r, t))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut r = BTreeMap::new();
        for (a, &j) in levels.iter().enumerate() {
            let vals: Vec<f64> = per_draw.iter().map(|(rv, _)| rv[a]).collect();
            r.insert(j, MeanEstimate::from_values(&vals));
        }
        let mut t = BTreeMap::new();
        let mut idx = 0;
        for a in 0..levels.len() {
            for b in a + 1..levels.len() {
                let vals: Vec<f64> = per_draw.iter().map(|(_, tv)| tv[idx]).collect();
                t.insert((levels[a], levels[b]), MeanEstimate::from_values(&vals));
                idx += 1;
            }
        }
        Ok(Self { r, t, m_draws })
    }

    pub fn r(&self, l: u32) -> Option<f64> {
        self.r.get(&l).map(|e| e.mean)
    }

    /// `T(n, j, l)`, zero on the diagonal.
    pub fn t(&self, j: u32, l: u32) -> Option<f64> {
        if j == l {
            return Some(0.0);
        }
        self.t.get(&(j.min(l), j.max(l))).map(|e| e.mean)
    }
}
