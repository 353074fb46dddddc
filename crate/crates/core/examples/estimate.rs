//! Projection density and distribution estimates at fixed levels.
//!
//! cargo run --example estimate

use supnorm_adapt::estimator::{cdf_estimate, project_measure, sup_distance_to_ecdf};
use supnorm_adapt::risk_lab::{sup_distance_to_cdf, sup_distance_to_density, TestDensity};
use supnorm_adapt::rng::label;
use supnorm_adapt::{ProjectionKernel, Sample, SplineOrder, StreamKey};

fn main() -> supnorm_adapt::Result<()> {
    let density = TestDensity::RaisedCosine;
    let n = 4096;
    let xs = density.sample(n, &mut StreamKey::root(1).child(label::SAMPLE).rng());
    let s = Sample::new(xs)?;
    println!("{} draws from {}", n, density.label());
    println!(
        "{:>2} {:>3} {:>10} {:>10} {:>10}",
        "r", "j", "|p-p0|", "|F-F0|", "|F-Fn|"
    );
    for r in [1, 2, 4] {
        let kernel = ProjectionKernel::new(SplineOrder::new(r)?)?;
        for j in [2, 4, 6] {
            let est = project_measure(&s, &s.uniform_weights(), j, &kernel)?;
            let cdf = cdf_estimate(&est);
            println!(
                "{r:>2} {j:>3} {:>10.5} {:>10.5} {:>10.5}",
                sup_distance_to_density(&est.density, &density),
                sup_distance_to_cdf(&cdf.cdf, &density),
                sup_distance_to_ecdf(&cdf, &s),
            );
        }
    }
    Ok(())
}
