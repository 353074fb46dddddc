//! Resolution grid and the Lepski-type level selectors with Rademacher
//! thresholds.
//!
//! A level `j` is accepted when, for every finer grid level `l`,
//! `‖p_n(j) - p_n(l)‖_∞` stays below a threshold made of a Rademacher
//! statistic plus a deterministic term `√‖p_n(j_max)‖_∞ · √(2^l l / n)`.
//! The smallest accepted level wins; if there is none, `j_max` is used.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::{cdf_estimate, project_measure, sup_distance_to_ecdf, CdfEstimate, DensityEstimate, Sample};
use crate::rademacher::{ThresholdStats, DEFAULT_M_DRAWS};
use crate::rng::StreamKey;
use crate::spline_kernel::{ProjectionKernel, SplineOrder};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolutionGrid {
    pub j_min: u32,
    pub j_max: u32,
    pub levels: Vec<u32>,
}

/// `j_min = max(1, ⌊log2((n/ln n)^{1/(2r+1)})⌋)`, `j_max = ⌊log2(n/(ln n)²)⌋`.
pub fn build_grid(n: usize, r: SplineOrder) -> Result<ResolutionGrid> {
    let degenerate = |j_min, j_max| Error::DegenerateGrid { n, j_min, j_max };
    if n < 3 {
        return Err(degenerate(1, 0));
    }
    let nf = n as f64;
    let ln = nf.ln();
    let exponent = 1.0 / (2.0 * r.get() as f64 + 1.0);
    let j_min = ((nf / ln).log2() * exponent).floor().max(1.0) as i64;
    let j_max = (nf / (ln * ln)).log2().floor() as i64;
    if j_min >= j_max {
        return Err(degenerate(j_min, j_max));
    }
    let (j_min, j_max) = (j_min as u32, j_max as u32);
    Ok(ResolutionGrid {
        j_min,
        j_max,
        levels: (j_min..=j_max).collect(),
    })
}

/// `√(2^l l / n)`.
pub fn deviation_scale(l: u32, n: usize) -> f64 {
    ((l as f64).exp2() * l as f64 / n as f64).sqrt()
}

/// `T + 7 ‖Φ‖₂ √plug · √(2^l l / n)`.
pub fn threshold_bar(t: f64, phi_l2: f64, plug_in_sup: f64, l: u32, n: usize) -> f64 {
    t + 7.0 * phi_l2 * plug_in_sup.sqrt() * deviation_scale(l, n)
}

/// `(B + 1) R + 7 ‖Φ‖₂ √plug · √(2^l l / n)`.
pub fn threshold_tilde(r: f64, op_norm_bound: f64, phi_l2: f64, plug_in_sup: f64, l: u32, n: usize) -> f64 {
    (op_norm_bound + 1.0) * r + 7.0 * phi_l2 * plug_in_sup.sqrt() * deviation_scale(l, n)
}

/// `5 R + 10 √plug · √(2^l l / n)`.
pub fn threshold_route(r: f64, plug_in_sup: f64, l: u32, n: usize) -> f64 {
    5.0 * r + 10.0 * plug_in_sup.sqrt() * deviation_scale(l, n)
}

/// `1 / (√n ln n)`.
pub fn cdf_tolerance(n: usize) -> f64 {
    let nf = n as f64;
    1.0 / (nf.sqrt() * nf.ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectorKind {
    /// Pair statistic `T(n,j,l)` from one draw.
    BarEps,
    /// `E^ε T(n,j,l)`.
    Bar,
    /// `(B+1) R(n,l)` from one draw.
    TildeEps,
    /// `(B+1) E^ε R(n,l)`.
    Tilde,
    /// Haar only: `5 R(n,l) + 10 √plug · √(2^l l/n)`.
    Route,
}

impl SelectorKind {
    pub const ALL: [SelectorKind; 5] = [
        SelectorKind::BarEps,
        SelectorKind::Bar,
        SelectorKind::TildeEps,
        SelectorKind::Tilde,
        SelectorKind::Route,
    ];

    pub fn uses_expectation(self) -> bool {
        matches!(self, SelectorKind::Bar | SelectorKind::Tilde)
    }

    pub fn name(self) -> &'static str {
        match self {
            SelectorKind::BarEps => "bar_eps",
            SelectorKind::Bar => "bar",
            SelectorKind::TildeEps => "tilde_eps",
            SelectorKind::Tilde => "tilde",
            SelectorKind::Route => "route",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectorVariant {
    pub kind: SelectorKind,
    /// Draws averaged by the `E^ε` variants; the others use a single draw.
    pub m_draws: usize,
    pub cdf_constraint: bool,
    /// Use a fresh set of draws for every candidate `j` instead of one shared set.
    pub refresh_draws: bool,
}

impl SelectorVariant {
    pub fn new(kind: SelectorKind) -> Self {
        Self {
            kind,
            m_draws: DEFAULT_M_DRAWS,
            cdf_constraint: false,
            refresh_draws: false,
        }
    }

    pub fn effective_draws(&self) -> usize {
        if self.kind.uses_expectation() {
            self.m_draws
        } else {
            1
        }
    }
}

/// Overrides for exercising the selection logic in isolation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionHooks {
    pub threshold_scale: f64,
    pub statistic_override: Option<f64>,
}

impl Default for SelectionHooks {
    fn default() -> Self {
        Self {
            threshold_scale: 1.0,
            statistic_override: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairTest {
    pub j: u32,
    pub l: u32,
    pub statistic: f64,
    pub threshold: f64,
    /// Monte Carlo standard error of the threshold's Rademacher part.
    pub threshold_se: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfCheck {
    pub j: u32,
    pub distance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionTrace {
    pub variant: SelectorVariant,
    pub grid: ResolutionGrid,
    pub tests: Vec<PairTest>,
    /// `‖p_n(j_max)‖_∞`.
    pub plug_in_sup: f64,
    pub j_hat: u32,
    pub fallback: bool,
    /// Per-level distance to the empirical CDF, when the constraint is active.
    pub cdf_checks: Vec<CdfCheck>,
    pub cdf_tolerance: Option<f64>,
    /// Set when no level meets the CDF constraint, so `F_n` itself is the answer.
    pub empirical_cdf_sentinel: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub trace: SelectionTrace,
    pub estimate: DensityEstimate,
    pub cdf: CdfEstimate,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstrainedSelection {
    Estimate(Selection),
    /// No candidate is close enough to `F_n`; use the empirical CDF.
    EmpiricalCdf(SelectionTrace),
}

impl ConstrainedSelection {
    pub fn trace(&self) -> &SelectionTrace {
        match self {
            ConstrainedSelection::Estimate(s) => &s.trace,
            ConstrainedSelection::EmpiricalCdf(t) => t,
        }
    }
}

/// Threshold for the pair `(j, l)` and the Monte Carlo standard error of its
/// random part.
fn threshold_for(
    stats: &ThresholdStats,
    kind: SelectorKind,
    kernel: &ProjectionKernel,
    plug: f64,
    j: u32,
    l: u32,
    n: usize,
) -> (f64, Option<f64>) {
    let r = &stats.r[&l];
    let se = |est: &crate::rademacher::MeanEstimate, factor: f64| est.std_err.map(|s| factor * s);
    match kind {
        SelectorKind::BarEps | SelectorKind::Bar => {
            let t = &stats.t[&(j, l)];
            (threshold_bar(t.mean, kernel.phi_l2(), plug, l, n), se(t, 1.0))
        }
        SelectorKind::TildeEps | SelectorKind::Tilde => {
            let b = kernel.op_norm_bound();
            (threshold_tilde(r.mean, b, kernel.phi_l2(), plug, l, n), se(r, b + 1.0))
        }
        SelectorKind::Route => (threshold_route(r.mean, plug, l, n), se(r, 5.0)),
    }
}

fn run(
    s: &Sample,
    kernel: &ProjectionKernel,
    variant: SelectorVariant,
    key: &StreamKey,
    hooks: SelectionHooks,
) -> Result<(SelectionTrace, Vec<DensityEstimate>)> {
    if variant.kind == SelectorKind::Route && !kernel.order().is_haar() {
        return Err(Error::RouteRequiresHaar(kernel.order().get()));
    }
    let n = s.len();
    let grid = build_grid(n, kernel.order())?;
    let weights = s.uniform_weights();
    let estimates = grid
        .levels
        .iter()
        .map(|&j| project_measure(s, &weights, j, kernel))
        .collect::<Result<Vec<_>>>()?;
    let idx = |j: u32| (j - grid.j_min) as usize;
    let plug = estimates[idx(grid.j_max)].density.sup_norm().value;
    let m = variant.effective_draws();

    let tol = variant.cdf_constraint.then(|| cdf_tolerance(n));
    let cdf_checks: Vec<CdfCheck> = match tol {
        Some(tol) => grid
            .levels
            .iter()
            .map(|&j| {
                let distance = sup_distance_to_ecdf(&cdf_estimate(&estimates[idx(j)]), s);
                CdfCheck {
                    j,
                    distance,
                    pass: distance <= tol,
                }
            })
            .collect(),
        None => Vec::new(),
    };
    let cdf_ok = |j: u32| cdf_checks.get(idx(j)).is_none_or(|c| c.pass);

    let shared = if variant.refresh_draws {
        None
    } else {
        Some(ThresholdStats::compute(s, &grid.levels, kernel, m, key)?)
    };
    let mut tests = Vec::new();
    let mut chosen = None;
    for &j in &grid.levels {
        let fresh;
        let stats = match &shared {
            Some(st) => st,
            None => {
                fresh = ThresholdStats::compute(s, &grid.levels, kernel, m, &key.child(u64::from(j)))?;
                &fresh
            }
        };
        let mut all_pass = true;
        for &l in grid.levels.iter().filter(|&&l| l > j) {
            let statistic = match hooks.statistic_override {
                Some(v) => v,
                None => {
                    estimates[idx(j)]
                        .density
                        .difference(&estimates[idx(l)].density)
                        .sup_norm()
                        .value
                }
            };
            let (base, threshold_se) = threshold_for(stats, variant.kind, kernel, plug, j, l, n);
            let threshold = hooks.threshold_scale * base;
            let pass = statistic <= threshold;
            all_pass &= pass;
            tests.push(PairTest {
                j,
                l,
                statistic,
                threshold,
                threshold_se,
                pass,
            });
        }
        // j_max has no pairs to test; reaching it means nothing coarser passed
        if all_pass && cdf_ok(j) && j < grid.j_max {
            chosen = Some(j);
            break;
        }
    }
    let (j_hat, fallback) = match chosen {
        Some(j) => (j, false),
        None => (grid.j_max, true),
    };
    let sentinel = fallback && !cdf_ok(grid.j_max);
    let trace = SelectionTrace {
        variant,
        grid,
        tests,
        plug_in_sup: plug,
        j_hat,
        fallback,
        cdf_checks,
        cdf_tolerance: tol,
        empirical_cdf_sentinel: sentinel,
    };
    Ok((trace, estimates))
}

fn finish(trace: SelectionTrace, mut estimates: Vec<DensityEstimate>) -> Selection {
    let estimate = estimates.swap_remove((trace.j_hat - trace.grid.j_min) as usize);
    let cdf = cdf_estimate(&estimate);
    Selection { trace, estimate, cdf }
}

/// Select `ĵ` and return the estimate at that level. The CDF constraint flag
/// of `variant` is ignored here; see [`select_with_cdf_constraint`].
pub fn select(s: &Sample, kernel: &ProjectionKernel, variant: SelectorVariant, key: &StreamKey) -> Result<Selection> {
    select_with_hooks(
        s,
        kernel,
        SelectorVariant {
            cdf_constraint: false,
            ..variant
        },
        key,
        SelectionHooks::default(),
    )
}

pub fn select_with_hooks(
    s: &Sample,
    kernel: &ProjectionKernel,
    variant: SelectorVariant,
    key: &StreamKey,
    hooks: SelectionHooks,
) -> Result<Selection> {
    let (trace, estimates) = run(s, kernel, variant, key, hooks)?;
    Ok(finish(trace, estimates))
}

/// Selection where every candidate must also lie within `1/(√n ln n)` of the
/// empirical CDF; if no level qualifies, the empirical CDF sentinel is returned.
pub fn select_with_cdf_constraint(
    s: &Sample,
    kernel: &ProjectionKernel,
    variant: SelectorVariant,
    key: &StreamKey,
) -> Result<ConstrainedSelection> {
    let variant = SelectorVariant {
        cdf_constraint: true,
        ..variant
    };
    let (trace, estimates) = run(s, kernel, variant, key, SelectionHooks::default())?;
    if trace.empirical_cdf_sentinel {
        Ok(ConstrainedSelection::EmpiricalCdf(trace))
    } else {
        Ok(ConstrainedSelection::Estimate(finish(trace, estimates)))
    }
}
