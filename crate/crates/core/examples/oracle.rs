//! Oracle levels for a known density: analytic balance, Monte Carlo balance
//! and the risk minimiser.
//!
//! cargo run --release --example oracle

use supnorm_adapt::risk_lab::oracles::{local_holder_w, oracle_jh, oracle_jsharp, oracle_jstar};
use supnorm_adapt::risk_lab::TestDensity;
use supnorm_adapt::{ProjectionKernel, StreamKey};

fn main() -> supnorm_adapt::Result<()> {
    let density = TestDensity::cusp(0.5)?;
    let kernel = ProjectionKernel::haar();
    let n = 1 << 12;
    let key = StreamKey::root(3);
    let jstar = oracle_jstar(&density, &kernel, n)?;
    let sharp = oracle_jsharp(&density, &kernel, n, 50, &key)?;
    let jh = oracle_jh(&density, &kernel, n, 50, &key)?;
    println!(
        "{} at n = {n}: j* = {}, j# = {}, j^H = {}",
        density.label(),
        jstar.j,
        sharp.j,
        jh.j
    );
    println!("{:>3} {:>9} {:>9} {:>9} {:>6}", "l", "E(l)", "bias", "risk", "W");
    for (b, r) in sharp.rows.iter().zip(&jh.rows) {
        println!(
            "{:>3} {:>9.4} {:>9.4} {:>9.4} {:>6.3}",
            b.l,
            b.deviation.mean,
            b.bias,
            r.mean,
            local_holder_w(b.l, &density)
        );
    }
    Ok(())
}
