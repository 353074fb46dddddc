//! Data-driven level selection with every selector variant, including the
//! distribution-function constraint.
//!
//! cargo run --example select

use supnorm_adapt::lepski::{select, select_with_cdf_constraint, SelectorKind, SelectorVariant};
use supnorm_adapt::risk_lab::{oracles::oracle_jstar, sup_distance_to_density, TestDensity};
use supnorm_adapt::rng::label;
use supnorm_adapt::{ProjectionKernel, Sample, StreamKey};

fn main() -> supnorm_adapt::Result<()> {
    let density = TestDensity::Triangular;
    let n = 8192;
    let key = StreamKey::root(11);
    let s = Sample::new(density.sample(n, &mut key.child(label::SAMPLE).rng()))?;
    let kernel = ProjectionKernel::haar();
    println!("oracle j* = {}", oracle_jstar(&density, &kernel, n)?.j);
    for kind in SelectorKind::ALL {
        let mut variant = SelectorVariant::new(kind);
        variant.m_draws = 50;
        let sel = select(&s, &kernel, variant, &key)?;
        println!(
            "{:<10} j_hat = {} (grid {}..={}, fallback {}), sup error {:.4}",
            kind.name(),
            sel.trace.j_hat,
            sel.trace.grid.j_min,
            sel.trace.grid.j_max,
            sel.trace.fallback,
            sup_distance_to_density(&sel.estimate.density, &density)
        );
    }
    let mut constrained = SelectorVariant::new(SelectorKind::BarEps);
    constrained.cdf_constraint = true;
    let out = select_with_cdf_constraint(&s, &kernel, constrained, &key)?;
    let trace = out.trace();
    println!(
        "with CDF constraint (tolerance {:.2e}):",
        trace.cdf_tolerance.unwrap_or(f64::NAN)
    );
    for c in &trace.cdf_checks {
        println!(
            "  j = {} distance {:.2e} {}",
            c.j,
            c.distance,
            if c.pass { "ok" } else { "too far" }
        );
    }
    println!("  sentinel: {}", trace.empirical_cdf_sentinel);
    Ok(())
}
