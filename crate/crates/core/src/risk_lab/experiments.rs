//! Campaign-level experiments: convergence-rate regressions, the
//! distribution-function CLT and the asymptotic constants of the Haar estimator.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::oracles::oracle_jstar;
use super::{
    deviation_mc, draw_sample, ecdf_distance_to_cdf, replicate_map, sup_distance_to_cdf, supnorm_risk_mc, LevelRule,
    RiskEstimate, TestDensity,
};
use crate::error::{Error, Result};
use crate::estimator::{cdf_estimate, sup_distance_to_ecdf};
use crate::lepski::{select, SelectorVariant};
use crate::rng::{label, StreamKey};
use crate::spline_kernel::ProjectionKernel;

pub const MIN_LADDER: usize = 5;

/// Least-squares fit of `log risk` on `log(n / log n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRegression {
    pub slope: f64,
    pub intercept: f64,
    /// Half-width of the 95% confidence interval for the slope.
    pub half_width: f64,
    pub points: Vec<(usize, f64)>,
}

pub fn rate_regression(points: &[(usize, f64)]) -> Result<RateRegression> {
    if points.len() < MIN_LADDER {
        return Err(Error::InvalidArgument(format!(
            "rate regression needs at least {MIN_LADDER} sample sizes, got {}",
            points.len()
        )));
    }
    if let Some(&(n, r)) = points.iter().find(|&&(n, r)| n < 3 || r.is_nan() || r <= 0.0) {
        return Err(Error::InvalidArgument(format!("bad regression point n={n}, risk={r}")));
    }
    let xs: Vec<f64> = points.iter().map(|&(n, _)| (n as f64 / (n as f64).ln()).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|&(_, r)| r.ln()).collect();
    let k = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / k;
    let my = ys.iter().sum::<f64>() / k;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let df = k - 2.0;
    let se = (sse / df / sxx).sqrt();
    let quantile = StudentsT::new(0.0, 1.0, df).expect("df ≥ 3").inverse_cdf(0.975);
    Ok(RateRegression {
        slope,
        intercept,
        half_width: quantile * se,
        points: points.to_vec(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateCampaign {
    pub rule: LevelRule,
    pub risks: Vec<RiskEstimate>,
    pub regression: RateRegression,
}

/// Risk at each `n` of the ladder, then the rate regression. Every rule run
/// with the same key sees the same samples.
pub fn rate_campaign(
    density: &TestDensity,
    kernel: &ProjectionKernel,
    rule: LevelRule,
    ladder: &[usize],
    reps: usize,
    key: &StreamKey,
) -> Result<RateCampaign> {
    check_ladder(ladder)?;
    let risks = ladder
        .iter()
        .map(|&n| supnorm_risk_mc(density, kernel, rule, n, reps, &key.child(n as u64)))
        .collect::<Result<Vec<_>>>()?;
    let points: Vec<(usize, f64)> = risks.iter().map(|r| (r.n, r.mean)).collect();
    Ok(RateCampaign {
        rule,
        regression: rate_regression(&points)?,
        risks,
    })
}

pub fn check_ladder(ladder: &[usize]) -> Result<()> {
    if ladder.is_empty() {
        return Err(Error::InvalidArgument("sample-size ladder is empty".into()));
    }
    if ladder.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidArgument(
            "sample-size ladder must be strictly increasing".into(),
        ));
    }
    Ok(())
}

pub const KOLMOGOROV_DRAWS: usize = 100_000;
pub const BRIDGE_GRID: usize = 1 << 12;

/// Sorted suprema `sup_s |B(s)|` of Brownian bridges simulated on a grid of
/// `grid` steps.
pub fn kolmogorov_reference(count: usize, grid: usize, key: &StreamKey) -> Vec<f64> {
    let base = key.child(label::BROWNIAN);
    let step = (1.0 / grid as f64).sqrt();
    let mut sups: Vec<f64> = (0..count as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = base.child(i).rng();
            let mut path = Vec::with_capacity(grid + 1);
            let mut w = 0.0;
            path.push(0.0);
            for _ in 0..grid {
                let z: f64 = StandardNormal.sample(&mut rng);
                w += step * z;
                path.push(w);
            }
            let end = w;
            path.iter()
                .enumerate()
                .fold(0.0f64, |m, (k, &wk)| m.max((wk - k as f64 / grid as f64 * end).abs()))
        })
        .collect();
    sups.sort_by(f64::total_cmp);
    sups
}

/// `sup_x |F_a(x) - F_b(x)|` between the empirical laws of two samples.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut k) = (0, 0);
    let mut best = 0.0f64;
    while i < a.len() && k < b.len() {
        let x = a[i].min(b[k]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while k < b.len() && b[k] <= x {
            k += 1;
        }
        best = best.max((i as f64 / na - k as f64 / nb).abs());
    }
    best
}

pub const MIN_CLT_REPS: usize = 200;
pub const CLT_KS_GATE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CltReport {
    pub n: usize,
    pub reps: usize,
    /// KS distance of the law of `√n ‖F̂ - F‖_∞` to the Kolmogorov law.
    pub ks_estimator: f64,
    /// The same for `√n ‖F_n - F‖_∞`.
    pub ks_calibration: f64,
    pub median_estimator: f64,
    pub median_calibration: f64,
    /// Median of `√n ‖F̂ - F_n‖_∞`.
    pub median_ecdf_gap: f64,
    pub pass: bool,
}

fn median(v: &[f64]) -> f64 {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub fn clt_check(
    density: &TestDensity,
    kernel: &ProjectionKernel,
    variant: SelectorVariant,
    n: usize,
    reps: usize,
    key: &StreamKey,
    reference: &[f64],
) -> Result<CltReport> {
    if reps < MIN_CLT_REPS {
        return Err(Error::InvalidArgument(format!(
            "CLT check needs at least {MIN_CLT_REPS} replications"
        )));
    }
    let root_n = (n as f64).sqrt();
    let per_rep = replicate_map(reps, key, |rep| {
        let s = draw_sample(density, n, rep)?;
        let sel = select(&s, kernel, variant, rep)?;
        Ok((
            root_n * sup_distance_to_cdf(&sel.cdf.cdf, density),
            root_n * ecdf_distance_to_cdf(&s, density),
            root_n * sup_distance_to_ecdf(&sel.cdf, &s),
        ))
    })?;
    let est: Vec<f64> = per_rep.iter().map(|p| p.0).collect();
    let cal: Vec<f64> = per_rep.iter().map(|p| p.1).collect();
    let gap: Vec<f64> = per_rep.iter().map(|p| p.2).collect();
    let ks_estimator = ks_distance(&est, reference);
    let ks_calibration = ks_distance(&cal, reference);
    Ok(CltReport {
        n,
        reps,
        ks_estimator,
        ks_calibration,
        median_estimator: median(&est),
        median_calibration: median(&cal),
        median_ecdf_gap: median(&gap),
        pass: ks_estimator < CLT_KS_GATE && ks_calibration < CLT_KS_GATE,
    })
}

/// Median of `√n ‖F̂ - F_n‖_∞` at each sample size.
pub fn ecdf_gap_ladder(
    density: &TestDensity,
    kernel: &ProjectionKernel,
    variant: SelectorVariant,
    ladder: &[usize],
    reps: usize,
    key: &StreamKey,
) -> Result<Vec<(usize, f64)>> {
    check_ladder(ladder)?;
    ladder
        .iter()
        .map(|&n| {
            let gaps = replicate_map(reps, &key.child(n as u64), |rep| {
                let s = draw_sample(density, n, rep)?;
                let sel = select(&s, kernel, variant, rep)?;
                Ok((n as f64).sqrt() * sup_distance_to_ecdf(&cdf_estimate(&sel.estimate), &s))
            })?;
            Ok((n, median(&gaps)))
        })
        .collect()
}

/// `A(p₀) = 26.6 [‖p₀‖_∞^t H / (√(2 ln 2)(1 + t))]^{1/(2t+1)}`.
pub fn adaptive_constant_bound(density: &TestDensity) -> f64 {
    let t = density.smoothness();
    let inner = density.sup().powf(t) * density.holder_h() / ((2.0 * std::f64::consts::LN_2).sqrt() * (1.0 + t));
    26.6 * inner.powf(1.0 / (2.0 * t + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate {
    Pass,
    Warn,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantRow {
    pub n: usize,
    pub j_star: u32,
    /// `√(n/(2^j j)) E‖p_n(j) - E p_n(j)‖_∞` at `j = j*`.
    pub normalized_deviation: f64,
    pub normalized_deviation_se: f64,
    /// Ratio of the above to `√(2 ln 2) √‖p₀‖_∞`.
    pub deviation_ratio: f64,
    /// `(n / ln n)^{t/(2t+1)} E‖p_n(ĵ) - p₀‖_∞`.
    pub adaptive_constant: f64,
    pub adaptive_constant_se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub rows: Vec<ConstantRow>,
    pub a_bound: f64,
    /// `√(‖p₀‖_∞ / (4π ln 2))`, reported for reference only.
    pub sudakov_constant: f64,
    pub deviation_gate: Gate,
    pub adaptive_gate: Gate,
}

pub const DEVIATION_RATIO_RANGE: (f64, f64) = (0.6, 1.3);
pub const ADAPTIVE_FACTOR: f64 = 1.5;

pub fn asymptotic_constant_check(
    density: &TestDensity,
    variant: SelectorVariant,
    ladder: &[usize],
    reps: usize,
    key: &StreamKey,
) -> Result<ConstantReport> {
    check_ladder(ladder)?;
    let kernel = ProjectionKernel::haar();
    let t = density.smoothness();
    let limit = (2.0 * std::f64::consts::LN_2).sqrt() * density.sup().sqrt();
    let rows = ladder
        .iter()
        .map(|&n| {
            let sub = key.child(n as u64);
            let j = oracle_jstar(density, &kernel, n)?.j;
            let dev = deviation_mc(density, &kernel, &[j], n, reps, &sub)?.remove(0);
            let norm = (n as f64 / ((j as f64).exp2() * j as f64)).sqrt();
            let risk = supnorm_risk_mc(density, &kernel, LevelRule::Select { variant }, n, reps, &sub)?;
            let rate = (n as f64 / (n as f64).ln()).powf(t / (2.0 * t + 1.0));
            Ok(ConstantRow {
                n,
                j_star: j,
                normalized_deviation: norm * dev.mean,
                normalized_deviation_se: norm * dev.std_err.unwrap_or(0.0),
                deviation_ratio: norm * dev.mean / limit,
                adaptive_constant: rate * risk.mean,
                adaptive_constant_se: rate * risk.std_err,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let a_bound = adaptive_constant_bound(density);
    let last = rows.last().expect("nonempty ladder");
    let (lo, hi) = DEVIATION_RATIO_RANGE;
    let deviation_gate = if (lo..=hi).contains(&last.deviation_ratio) {
        Gate::Pass
    } else if (lo / 2.0..=hi * 2.0).contains(&last.deviation_ratio) {
        Gate::Warn
    } else {
        Gate::Fail
    };
    let adaptive_gate = if last.adaptive_constant <= ADAPTIVE_FACTOR * a_bound {
        Gate::Pass
    } else if last.adaptive_constant <= 2.0 * ADAPTIVE_FACTOR * a_bound {
        Gate::Warn
    } else {
        Gate::Fail
    };
    Ok(ConstantReport {
        rows,
        a_bound,
        sudakov_constant: (density.sup() / (4.0 * std::f64::consts::PI * std::f64::consts::LN_2)).sqrt(),
        deviation_gate,
        adaptive_gate,
    })
}
