//! Oracle resolution levels that know the true density.

use serde::{Deserialize, Serialize};

use super::{bias_bound, deviation_mc, supnorm_risk_mc, variance_proxy, LevelRule, TestDensity};
use crate::error::{Error, Result};
use crate::lepski::{build_grid, ResolutionGrid};
use crate::piecewise::cell_width;
use crate::rademacher::MeanEstimate;
use crate::rng::StreamKey;
use crate::spline_kernel::ProjectionKernel;

/// Replications required by the Monte Carlo oracles.
pub const MIN_ORACLE_REPS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleLevel {
    pub j: u32,
    /// No level satisfied the defining inequality; `j` is `j_max`.
    pub flagged: bool,
}

/// Smallest grid level with `bias(j) ≤ √(2 ln 2) √‖p₀‖_∞ ‖Φ‖₂ σ(j, n)`.
pub fn jstar_from(grid: &ResolutionGrid, bias: impl Fn(u32) -> f64, sup: f64, phi_l2: f64, n: usize) -> OracleLevel {
    let c = (2.0 * std::f64::consts::LN_2).sqrt() * sup.sqrt() * phi_l2;
    grid.levels
        .iter()
        .find(|&&j| bias(j) <= c * variance_proxy(j, n))
        .map_or(
            OracleLevel {
                j: grid.j_max,
                flagged: true,
            },
            |&j| OracleLevel { j, flagged: false },
        )
}

pub fn oracle_jstar(density: &TestDensity, kernel: &ProjectionKernel, n: usize) -> Result<OracleLevel> {
    let grid = build_grid(n, kernel.order())?;
    Ok(jstar_from(
        &grid,
        |j| bias_bound(j, density, kernel),
        density.sup(),
        kernel.phi_l2(),
        n,
    ))
}

/// Index of the smallest value; ties go to the earliest index.
pub fn argmin_first(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BalanceRow {
    pub l: u32,
    /// Monte Carlo `E ‖p_n(l) - E p_n(l)‖_∞`.
    pub deviation: MeanEstimate,
    pub bias: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharpOracle {
    pub j: u32,
    pub rows: Vec<BalanceRow>,
}

/// `argmin_l max(E(l), B(l))`, smallest level on ties.
pub fn jsharp_from(rows: &[BalanceRow]) -> u32 {
    let v: Vec<f64> = rows.iter().map(|r| r.deviation.mean.max(r.bias)).collect();
    rows[argmin_first(&v)].l
}

pub fn oracle_jsharp(
    density: &TestDensity,
    kernel: &ProjectionKernel,
    n: usize,
    reps: usize,
    key: &StreamKey,
) -> Result<SharpOracle> {
    check_oracle_reps(reps)?;
    let grid = build_grid(n, kernel.order())?;
    let devs = deviation_mc(density, kernel, &grid.levels, n, reps, key)?;
    let rows: Vec<BalanceRow> = grid
        .levels
        .iter()
        .zip(devs)
        .map(|(&l, deviation)| BalanceRow {
            l,
            deviation,
            bias: bias_bound(l, density, kernel),
        })
        .collect();
    Ok(SharpOracle {
        j: jsharp_from(&rows),
        rows,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskRow {
    pub l: u32,
    pub mean: f64,
    pub std_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskScan {
    pub j: u32,
    pub rows: Vec<RiskRow>,
}

/// Level of smallest Monte Carlo risk over `levels` (same samples at every level).
pub fn oracle_jh_over(
    density: &TestDensity,
    kernel: &ProjectionKernel,
    levels: &[u32],
    n: usize,
    reps: usize,
    key: &StreamKey,
) -> Result<RiskScan> {
    check_oracle_reps(reps)?;
    if levels.is_empty() {
        return Err(Error::InvalidArgument("empty level list".into()));
    }
    let rows = levels
        .iter()
        .map(|&l| {
            let r = supnorm_risk_mc(density, kernel, LevelRule::Fixed { j: l }, n, reps, key)?;
            Ok(RiskRow {
                l,
                mean: r.mean,
                std_err: r.std_err,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let means: Vec<f64> = rows.iter().map(|r| r.mean).collect();
    Ok(RiskScan {
        j: rows[argmin_first(&means)].l,
        rows,
    })
}

pub fn oracle_jh(
    density: &TestDensity,
    kernel: &ProjectionKernel,
    n: usize,
    reps: usize,
    key: &StreamKey,
) -> Result<RiskScan> {
    let grid = build_grid(n, kernel.order())?;
    oracle_jh_over(density, kernel, &grid.levels, n, reps, key)
}

fn check_oracle_reps(reps: usize) -> Result<()> {
    if reps < MIN_ORACLE_REPS {
        return Err(Error::InvalidArgument(format!(
            "oracle scans need at least {MIN_ORACLE_REPS} replications, got {reps}"
        )));
    }
    Ok(())
}

/// Points per Haar cell in the sup of [`local_holder_w`].
pub const W_POINTS_PER_CELL: usize = 256;

/// Self-similarity functional
/// `W(l, p₀) = min(1, 2^{lt}(t+1)/H · sup_x |2^l ∫_{cell(x)} p₀ - p₀(x)|)`,
/// where `cell(x) = (k 2^{-l}, (k+1) 2^{-l}]` is the dyadic cell containing `x`.
pub fn local_holder_w(l: u32, density: &TestDensity) -> f64 {
    let t = density.smoothness();
    let scale = (l as f64).exp2();
    let h = cell_width(l);
    let (a, b) = density.support();
    let mut sup = 0.0f64;
    for k in (a * scale).floor() as i64 - 1..=(b * scale).ceil() as i64 {
        let (lo, hi) = (k as f64 * h, (k + 1) as f64 * h);
        let avg = scale * (density.cdf(hi) - density.cdf(lo));
        for i in 1..=W_POINTS_PER_CELL {
            let x = lo + h * i as f64 / W_POINTS_PER_CELL as f64;
            sup = sup.max((avg - density.eval(x)).abs());
        }
    }
    (scale.powf(t) * (t + 1.0) / density.holder_h() * sup).min(1.0)
}
