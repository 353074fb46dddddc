//! Monte Carlo and analytic checks of the estimators on known densities:
//! sup-norm risk, bias and deviation terms, oracle levels, concentration
//! bounds, rate regressions and the distribution-function CLT.

pub mod bounds;
pub mod densities;
pub mod experiments;
pub mod oracles;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use densities::TestDensity;

use crate::error::{Error, Result};
use crate::estimator::{project_measure, Sample};
use crate::lepski::{build_grid, select, SelectorVariant};
use crate::piecewise::{cell_width, CumulativePoly, DyadicPiecewisePoly};
use crate::poly;
use crate::rademacher::MeanEstimate;
use crate::rng::{label, StreamKey};
use crate::spline_kernel::ProjectionKernel;

/// Absolute tolerance of the per-cell quadrature behind `E p_n(j)`.
pub const QUADRATURE_TOL: f64 = 1e-10;

/// Run `f` on replicates `0..reps` in parallel; results come back in index order.
pub(crate) fn replicate_map<T, F>(reps: usize, key: &StreamKey, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&StreamKey) -> Result<T> + Sync,
{
    (0..reps as u64).into_par_iter().map(|i| f(&key.replicate(i))).collect()
}

pub(crate) fn draw_sample(density: &TestDensity, n: usize, rep: &StreamKey) -> Result<Sample> {
    Sample::new(density.sample(n, &mut rep.child(label::SAMPLE).rng()))
}

fn check_reps(reps: usize, min: usize) -> Result<()> {
    if reps < min {
        return Err(Error::InvalidArgument(format!(
            "need at least {min} replications, got {reps}"
        )));
    }
    Ok(())
}

/// `E p_n(j) = π_j p₀`, from per-cell quadrature of the B-splines against `p₀`.
pub fn expected_projection(density: &TestDensity, j: u32, kernel: &ProjectionKernel) -> Result<DyadicPiecewisePoly> {
    let scale = (j as f64).exp2();
    let h = cell_width(j);
    let (a, b) = density.support();
    let m_first = (a * scale).floor() as i64;
    let m_last = (b * scale).ceil() as i64 - 1;
    let r = kernel.order().get() as i64;
    let first = m_first - (r - 1);
    let mut beta = vec![0.0; (m_last - first + 1) as usize];
    for m in m_first..=m_last {
        for (i, piece) in kernel.pieces().iter().enumerate() {
            let integral = quadrature::integrate(
                |u| poly::horner(piece, u) * density.eval((m as f64 + u) * h),
                0.0,
                1.0,
                QUADRATURE_TOL,
            )
            .integral;
            beta[(m - i as i64 - first) as usize] += h * integral;
        }
    }
    kernel.synthesize(j, first, &beta, kernel.k_trunc())
}

/// `max_k max_u f(k, u)` over cells `k_lo..=k_hi`, on `m + 1` equispaced
/// local points per cell (both ends included). `m` starts at 64 and doubles
/// until the maximum moves by less than 0.1%, up to 1024.
pub(crate) fn refined_cell_max(k_lo: i64, k_hi: i64, f: impl Fn(i64, f64) -> f64) -> f64 {
    let at = |m: usize| {
        let mut best = 0.0f64;
        for k in k_lo..=k_hi {
            for i in 0..=m {
                best = best.max(f(k, i as f64 / m as f64));
            }
        }
        best
    };
    let mut m = 64;
    let mut prev = at(m);
    while m < 1024 {
        m *= 2;
        let next = at(m);
        let settled = (next - prev).abs() < 1e-3 * prev;
        prev = next;
        if settled {
            break;
        }
    }
    prev
}

fn cell_range(level: u32, k_min: i64, k_max: i64, density: &TestDensity) -> (i64, i64) {
    let scale = (level as f64).exp2();
    let (a, b) = density.support();
    (
        k_min.min((a * scale).floor() as i64),
        k_max.max((b * scale).ceil() as i64 - 1),
    )
}

/// `sup_y |p(y) - p₀(y)|` on a per-cell grid that includes every knot (both
/// one-sided values) and hence every feature point of the density.
pub fn sup_distance_to_density(p: &DyadicPiecewisePoly, density: &TestDensity) -> f64 {
    let h = cell_width(p.level());
    let (k_lo, k_hi) = cell_range(p.level(), p.k_min(), p.k_max(), density);
    refined_cell_max(k_lo, k_hi, |k, u| {
        let pv = p.cell(k).map_or(0.0, |c| poly::horner(c, u));
        (pv - density.eval((k as f64 + u) * h)).abs()
    })
}

/// `sup_s |F̂(s) - F(s)|` for a piecewise-polynomial distribution function.
pub fn sup_distance_to_cdf(c: &CumulativePoly, density: &TestDensity) -> f64 {
    let h = cell_width(c.level());
    let (k_lo, k_hi) = cell_range(c.level(), c.k_min(), c.k_max(), density);
    refined_cell_max(k_lo, k_hi, |k, u| {
        (c.eval_local(k, u) - density.cdf((k as f64 + u) * h)).abs()
    })
    .max((c.total() - 1.0).abs())
}

/// `sup_s |F_n(s) - F(s)|`, exactly.
pub fn ecdf_distance_to_cdf(s: &Sample, density: &TestDensity) -> f64 {
    let n = s.len() as f64;
    s.xs().iter().enumerate().fold(0.0f64, |m, (i, &x)| {
        let f = density.cdf(x);
        m.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n)
    })
}

/// Bias bound: `2^{-jt} H / (t + 1)` for Haar, `2^{-jt} ‖p₀‖_{t,∞} C(Φ)` otherwise.
pub fn bias_bound(j: u32, density: &TestDensity, kernel: &ProjectionKernel) -> f64 {
    let t = density.smoothness();
    let decay = (-(j as f64) * t).exp2();
    if kernel.order().is_haar() {
        decay * density.holder_h() / (t + 1.0)
    } else {
        decay * density.holder_norm() * kernel.phi_holder_moment(t)
    }
}

/// `σ(j, n) = √(2^j j / n)`.
pub fn variance_proxy(j: u32, n: usize) -> f64 {
    crate::lepski::deviation_scale(j, n)
}

/// How the resolution level of each replicate is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum LevelRule {
    Fixed {
        j: u32,
    },
    /// The smallest grid level, without adaptation.
    GridMin,
    Select {
        variant: SelectorVariant,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskEstimate {
    pub n: usize,
    pub mean: f64,
    pub std_err: f64,
    pub reps: usize,
    /// Level used in each replicate.
    pub levels: Vec<u32>,
    pub values: Vec<f64>,
}

impl RiskEstimate {
    fn from_values(n: usize, levels: Vec<u32>, values: Vec<f64>) -> Self {
        let est = MeanEstimate::from_values(&values);
        Self {
            n,
            mean: est.mean,
            std_err: est.std_err.unwrap_or(0.0),
            reps: values.len(),
            levels,
            values,
        }
    }

    pub fn median_level(&self) -> u32 {
        let mut l = self.levels.clone();
        l.sort_unstable();
        l[(l.len() - 1) / 2]
    }
}

/// `E ‖p_n(ĵ) - p₀‖_∞` by Monte Carlo.
pub fn supnorm_risk_mc(
    density: &TestDensity,
    kernel: &ProjectionKernel,
    rule: LevelRule,
    n: usize,
    reps: usize,
    key: &StreamKey,
) -> Result<RiskEstimate> {
    check_reps(reps, 2)?;
    let grid_min = match rule {
        LevelRule::GridMin => Some(build_grid(n, kernel.order())?.j_min),
        _ => None,
    };
    let out = replicate_map(reps, key, |rep| {
        let s = draw_sample(density, n, rep)?;
        let (j, p) = match rule {
            LevelRule::Fixed { j } => (j, project_measure(&s, &s.uniform_weights(), j, kernel)?.density),
            LevelRule::GridMin => {
                let j = grid_min.expect("grid computed");
                (j, project_measure(&s, &s.uniform_weights(), j, kernel)?.density)
            }
            LevelRule::Select { variant } => {
                let sel = select(&s, kernel, variant, rep)?;
                (sel.trace.j_hat, sel.estimate.density)
            }
        };
        Ok((j, sup_distance_to_density(&p, density)))
    })?;
    let (levels, values) = out.into_iter().unzip();
    Ok(RiskEstimate::from_values(n, levels, values))
}

/// `E(l) = E ‖p_n(l) - E p_n(l)‖_∞` by Monte Carlo, for each level.
pub fn deviation_mc(
    density: &TestDensity,
    kernel: &ProjectionKernel,
    levels: &[u32],
    n: usize,
    reps: usize,
    key: &StreamKey,
) -> Result<Vec<MeanEstimate>> {
    check_reps(reps, 2)?;
    let centres = levels
        .iter()
        .map(|&l| expected_projection(density, l, kernel))
        .collect::<Result<Vec<_>>>()?;
    let per_rep = replicate_map(reps, key, |rep| {
        let s = draw_sample(density, n, rep)?;
        levels
            .iter()
            .zip(&centres)
            .map(|(&l, c)| {
                let p = project_measure(&s, &s.uniform_weights(), l, kernel)?.density;
                Ok(p.difference(c).sup_norm().value)
            })
            .collect::<Result<Vec<f64>>>()
    })?;
    Ok((0..levels.len())
        .map(|i| MeanEstimate::from_values(&per_rep.iter().map(|v| v[i]).collect::<Vec<_>>()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn haar_bias_bound_values() {
        let k = ProjectionKernel::haar();
        let d = TestDensity::Triangular;
        assert_eq!(bias_bound(3, &d, &k), 0.0625);
        assert_eq!(bias_bound(4, &d, &k), 0.03125);
    }

    #[test]
    fn variance_proxy_value() {
        assert_eq!(variance_proxy(4, 1024), 0.25);
    }

    #[test]
    fn haar_expected_projection_is_cell_average() {
        let k = ProjectionKernel::haar();
        let d = TestDensity::Triangular;
        let p = expected_projection(&d, 2, &k).unwrap();
        // cell [0, 1/4): average of x is 1/8
        assert!((p.eval(0.1) - 0.125).abs() < 1e-12);
        assert!((p.integral() - 1.0).abs() < 1e-10);
    }
}
