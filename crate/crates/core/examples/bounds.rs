//! Concentration bounds for the Haar cell class and their empirical violation rates.
//!
//! cargo run --release --example bounds

use supnorm_adapt::risk_lab::bounds::{bound_evaluators, empirical_violation_rate, BoundInputs, DEFAULT_T_LADDER};
use supnorm_adapt::risk_lab::TestDensity;
use supnorm_adapt::StreamKey;

fn main() -> supnorm_adapt::Result<()> {
    let density = TestDensity::Triangular;
    let (n, j) = (512, 3);
    let report = empirical_violation_rate(&density, j, n, 2000, &DEFAULT_T_LADDER, &StreamKey::root(9))?;
    println!("sigma^2 = {:.4}, V' = {:.3}", report.sigma2, report.v_prime);
    println!("{:>5} {:>9} {:>9} {:>6}", "t", "freq", "bound", "ok");
    for row in &report.rows {
        println!(
            "{:>5.1} {:>9.4} {:>9.4} {:>6}",
            row.t, row.frequency, row.bound, row.pass
        );
    }
    let sym = &report.symmetrization;
    println!(
        "symmetrization: {:.3} <= {:.3} <= {:.3} ({})",
        sym.lower, sym.centered.mean, sym.upper, sym.pass
    );
    let inputs = BoundInputs {
        n,
        sigma2: report.sigma2,
        esup: sym.centered.mean,
        rademacher_esup: sym.rademacher.mean,
        a: std::f64::consts::E,
        v: 2.0,
        lambda: 1.0,
    };
    for (name, b) in bound_evaluators(&inputs, 4.0)? {
        println!("{name:<7} {:.4e} (preconditions {})", b.value, b.preconditions_hold);
    }
    Ok(())
}
