//! Concentration inequalities for suprema of empirical processes, evaluated
//! numerically, and an empirical check of the Rademacher-based bound on the
//! Haar cell-indicator class.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{draw_sample, replicate_map, TestDensity};
use crate::error::{Error, Result};
use crate::rademacher::MeanEstimate;
use crate::rng::{label, StreamKey};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub n: usize,
    /// `σ²`, an upper bound for `sup_f P f²`.
    pub sigma2: f64,
    /// `E ‖Σ (f(X_i) - P f)‖_F`.
    pub esup: f64,
    /// `E ‖Σ ε_i f(X_i)‖_F`.
    pub rademacher_esup: f64,
    /// Uniform entropy constants: `N(F, L²(Q), τ) ≤ (A/τ)^v`.
    pub a: f64,
    pub v: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundValue {
    pub value: f64,
    /// Value at `t = 0` for the tail bounds; absent for the moment bound.
    pub prefactor: Option<f64>,
    pub preconditions_hold: bool,
}

/// `c₁(λ) = 2(15 + 1350/λ)`.
pub fn c1(lambda: f64) -> f64 {
    2.0 * (15.0 + 1350.0 / lambda)
}

/// `c₂(λ) = 1 + 120/λ + 10800/λ²`.
pub fn c2(lambda: f64) -> f64 {
    1.0 + 120.0 / lambda + 10800.0 / (lambda * lambda)
}

fn tail(value: f64, prefactor: f64, ok: bool) -> BoundValue {
    BoundValue {
        value,
        prefactor: Some(prefactor),
        preconditions_hold: ok,
    }
}

/// Every bound at deviation level `t`, keyed by name.
pub fn bound_evaluators(inputs: &BoundInputs, t: f64) -> Result<BTreeMap<&'static str, BoundValue>> {
    let BoundInputs {
        n,
        sigma2,
        esup,
        rademacher_esup,
        a,
        v,
        lambda,
    } = *inputs;
    let sigma = sigma2.sqrt();
    if sigma > 0.5 {
        return Err(Error::SigmaTooLarge(sigma));
    }
    if !(sigma2 > 0.0 && a > 0.0 && v > 0.0 && lambda > 0.0 && t >= 0.0 && esup >= 0.0 && rademacher_esup >= 0.0) {
        return Err(Error::InvalidArgument("bound inputs must be positive".into()));
    }
    let nf = n as f64;
    let ns2 = nf * sigma2;
    let log_term = (5.0 * a / sigma).ln();
    let big_v = ns2 + 2.0 * esup;
    let v_prime = ns2 + 4.0 * rademacher_esup;
    let (c1, c2) = (c1(lambda), c2(lambda));
    let sigma_cond = ns2 >= lambda * lambda * v / 2.0 * log_term;
    let t_cond = c1 * (2.0 * v * ns2 * log_term).sqrt() <= t && t <= 1.5 * c2 * ns2;

    let mut out = BTreeMap::new();
    out.insert("bous", tail((-t * t / (2.0 * big_v + 2.0 * t / 3.0)).exp(), 1.0, true));
    out.insert("kr", tail((-t * t / (2.0 * big_v + 2.0 * t)).exp(), 1.0, true));
    out.insert(
        "expect",
        BoundValue {
            value: 2.0 * (15.0 * (2.0 * v * ns2 * log_term).sqrt() + 1350.0 * v * log_term),
            prefactor: None,
            preconditions_hold: true,
        },
    );
    out.insert(
        "gaussb",
        tail((-t * t / (3.0 * c2 * ns2)).exp(), 1.0, sigma_cond && t_cond),
    );
    out.insert("kolt", tail((-2.0 * t * t / (3.0 * nf)).exp(), 1.0, true));
    out.insert(
        "random",
        tail(2.0 * (-t * t / (2.0 * v_prime + 2.0 * t)).exp(), 2.0, true),
    );
    out.insert(
        "cor1",
        tail(
            2.0 * (-t * t / (2.1 * c2 * ns2)).exp(),
            2.0,
            sigma_cond && t > 0.0 && t <= c2 * ns2 / 20.0,
        ),
    );
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationRow {
    pub t: f64,
    pub frequency: f64,
    /// Binomial standard error `√(f(1-f)/reps)`.
    pub std_err: f64,
    pub bound: f64,
    /// `bound + 3·std_err - frequency`; negative means a violation.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetrizationCheck {
    /// `E ‖Σ (f(X_i) - P f)‖`.
    pub centered: MeanEstimate,
    /// `E ‖Σ ε_i f(X_i)‖`.
    pub rademacher: MeanEstimate,
    /// `√n/2 · ‖P f‖`.
    pub mean_term: f64,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ViolationReport {
    pub n: usize,
    pub j: u32,
    pub reps: usize,
    pub sigma2: f64,
    pub v_prime: f64,
    pub rows: Vec<ViolationRow>,
    pub symmetrization: SymmetrizationCheck,
    pub pass: bool,
}

pub const DEFAULT_T_LADDER: [f64; 10] = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0, 10.0];

/// Frequency of `‖Σ(f(X_i) - P f)‖ ≥ 2 ‖Σ ε_i f(X_i)‖ + 3t` for the class
/// `{½ 1_{cell k} : k ∈ ℤ}` of level-`j` Haar cells, against
/// `2 exp(-t²/(2V' + 2t))` with `V' = nσ² + 4 E‖Σ ε_i f(X_i)‖` and
/// `σ² = 2^{-j} ‖p₀‖_∞ ‖Φ‖₂² / 4`.
pub fn empirical_violation_rate(
    density: &TestDensity,
    j: u32,
    n: usize,
    reps: usize,
    t_ladder: &[f64],
    key: &StreamKey,
) -> Result<ViolationReport> {
    if reps < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 replications, got {reps}"
        )));
    }
    let scale = (j as f64).exp2();
    let (a, b) = density.support();
    let k_lo = (a * scale).floor() as i64;
    let k_hi = (b * scale).ceil() as i64 - 1;
    let cells = (k_hi - k_lo + 1) as usize;
    let probs: Vec<f64> = (k_lo..=k_hi)
        .map(|k| density.cdf((k + 1) as f64 / scale) - density.cdf(k as f64 / scale))
        .collect();
    let nf = n as f64;
    let per_rep = replicate_map(reps, key, |rep| {
        let s = draw_sample(density, n, rep)?;
        let mut rng = rep.child(label::RADEMACHER).rng();
        let mut counts = vec![0.0f64; cells];
        let mut signed = vec![0.0f64; cells];
        for &x in s.xs() {
            let k = ((x * scale).floor() as i64 - k_lo).clamp(0, cells as i64 - 1) as usize;
            counts[k] += 1.0;
            signed[k] += if rng.gen::<bool>() { 1.0 } else { -1.0 };
        }
        let centered = counts
            .iter()
            .zip(&probs)
            .fold(0.0f64, |m, (c, p)| m.max(0.5 * (c - nf * p).abs()));
        let rad = signed.iter().fold(0.0f64, |m, s| m.max(0.5 * s.abs()));
        Ok((centered, rad))
    })?;
    let centered: Vec<f64> = per_rep.iter().map(|p| p.0).collect();
    let rad: Vec<f64> = per_rep.iter().map(|p| p.1).collect();
    let centered_est = MeanEstimate::from_values(&centered);
    let rad_est = MeanEstimate::from_values(&rad);

    // Haar: ‖Φ‖₂ = 1
    let sigma2 = density.sup() / scale / 4.0;
    let v_prime = nf * sigma2 + 4.0 * rad_est.mean;
    let rows: Vec<ViolationRow> = t_ladder
        .iter()
        .map(|&t| {
            let hits = per_rep.iter().filter(|(c, r)| *c >= 2.0 * r + 3.0 * t).count();
            let frequency = hits as f64 / reps as f64;
            let std_err = (frequency * (1.0 - frequency) / reps as f64).sqrt();
            let bound = 2.0 * (-t * t / (2.0 * v_prime + 2.0 * t)).exp();
            let margin = bound + 3.0 * std_err - frequency;
            ViolationRow {
                t,
                frequency,
                std_err,
                bound,
                margin,
                pass: margin >= 0.0,
            }
        })
        .collect();

    let mean_term = 0.5 * nf.sqrt() * probs.iter().fold(0.0f64, |m, p| m.max(0.5 * p));
    let lower = 0.5 * rad_est.mean - mean_term;
    let upper = 2.0 * rad_est.mean;
    let slack = 3.0 * (centered_est.std_err.unwrap_or(0.0) + rad_est.std_err.unwrap_or(0.0));
    let sym_pass = centered_est.mean + slack >= lower && centered_est.mean - slack <= upper;
    let symmetrization = SymmetrizationCheck {
        centered: centered_est,
        rademacher: rad_est,
        mean_term,
        lower,
        upper,
        pass: sym_pass,
    };
    let pass = sym_pass && rows.iter().all(|r| r.pass);
    Ok(ViolationReport {
        n,
        j,
        reps,
        sigma2,
        v_prime,
        rows,
        symmetrization,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inputs() -> BoundInputs {
        BoundInputs {
            n: 100,
            sigma2: 0.04,
            esup: 3.0,
            rademacher_esup: 4.0,
            a: 3.0,
            v: 2.0,
            lambda: 5.0,
        }
    }

    #[test]
    fn zero_deviation_gives_prefactors() {
        let b = bound_evaluators(&inputs(), 0.0).unwrap();
        for (name, v) in &b {
            if let Some(p) = v.prefactor {
                assert_eq!(v.value, p, "{name}");
            }
        }
    }

    #[test]
    fn kolt_value() {
        let b = bound_evaluators(&inputs(), 10.0).unwrap();
        assert!((b["kolt"].value - (-2.0f64 / 3.0).exp()).abs() < 1e-15);
        assert!((b["kolt"].value - 0.51342).abs() < 1e-5);
    }

    #[test]
    fn large_lambda_limits() {
        assert!(c1(1e6) > 30.0 && c1(1e6) < 30.01);
        assert!((c2(1e9) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn sigma_normalization_enforced() {
        let bad = BoundInputs {
            sigma2: 0.3,
            ..inputs()
        };
        assert!(matches!(bound_evaluators(&bad, 1.0), Err(Error::SigmaTooLarge(_))));
    }
}
