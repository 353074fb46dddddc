//! Symmetrized projections and their conditional expectations: exact
//! enumeration on a tiny sample against Monte Carlo.
//!
//! cargo run --example rademacher

use supnorm_adapt::rademacher::{cond_expect_sup, exact_cond_expect_sup, ThresholdStats};
use supnorm_adapt::rng::label;
use supnorm_adapt::{ProjectionKernel, Sample, StreamKey};

fn main() -> supnorm_adapt::Result<()> {
    let kernel = ProjectionKernel::haar();
    let s = Sample::new(vec![
        0.05, 0.11, 0.2, 0.33, 0.41, 0.48, 0.52, 0.6, 0.71, 0.9, 0.93, 0.97,
    ])?;
    let key = StreamKey::root(5).child(label::RADEMACHER);
    for j in 1..=3 {
        let exact = exact_cond_expect_sup(&s, j, None, &kernel)?;
        let mc = cond_expect_sup(&s, 20_000, &key, j, None, &kernel)?;
        println!(
            "E^ε R(n, {j}): exact {exact:.5}, MC {:.5} ± {:.5}",
            mc.mean,
            mc.std_err.unwrap_or(0.0)
        );
    }
    let stats = ThresholdStats::compute(&s, &[1, 2, 3], &kernel, 200, &key)?;
    for (&(j, l), e) in &stats.t {
        println!("T({j}, {l}) = {:.5}", e.mean);
    }
    Ok(())
}
