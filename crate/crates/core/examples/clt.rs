//! Distribution-function CLT: the law of √n ‖F̂ - F‖_∞ against the Kolmogorov law.
//!
//! cargo run --release --example clt

use supnorm_adapt::lepski::{SelectorKind, SelectorVariant};
use supnorm_adapt::risk_lab::experiments::{clt_check, kolmogorov_reference};
use supnorm_adapt::risk_lab::TestDensity;
use supnorm_adapt::{ProjectionKernel, StreamKey};

fn main() -> supnorm_adapt::Result<()> {
    let key = StreamKey::root(7);
    let reference = kolmogorov_reference(20_000, 1024, &key);
    let r = clt_check(
        &TestDensity::Triangular,
        &ProjectionKernel::haar(),
        SelectorVariant::new(SelectorKind::BarEps),
        1 << 12,
        200,
        &key,
        &reference,
    )?;
    println!("Kolmogorov median (simulated) {:.4}", reference[reference.len() / 2]);
    println!(
        "estimator:   KS {:.3}, median {:.4}",
        r.ks_estimator, r.median_estimator
    );
    println!(
        "empirical:   KS {:.3}, median {:.4}",
        r.ks_calibration, r.median_calibration
    );
    println!("median √n |F̂ - F_n| = {:.4}", r.median_ecdf_gap);
    Ok(())
}
