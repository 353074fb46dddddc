//! Exact sup-norms, integrals and antiderivatives of dyadic piecewise polynomials.
//!
//! cargo run --example piecewise_sup

use supnorm_adapt::DyadicPiecewisePoly;

fn main() -> supnorm_adapt::Result<()> {
    // level 2: cells of width 1/4 starting at k = 0, cubic pieces in u ∈ [0, 1)
    let p = DyadicPiecewisePoly::new(
        2,
        0,
        vec![
            [0.0, 1.0, 0.0, 0.0],
            [1.0, 0.0, -3.0, 2.0],
            [0.0, 0.0, 0.0, 0.0],
            [-0.5, 0.0, 1.5, -1.0],
        ],
    )?;
    let s = p.sup_norm();
    println!("sup |p| = {:.6} at x = {:.6}", s.value, s.argmax);
    println!("min p   = {:.6}", p.min_value());
    println!("∫ p     = {:.6}", p.integral());
    let q = p.refine_to_level(4)?;
    println!(
        "refined to level 4: {} cells, same sup {:.6}",
        q.cells().len(),
        q.sup_norm().value
    );
    let diff = p.difference(&p.scaled(0.5));
    println!("sup |p - p/2| = {:.6}", diff.sup_norm().value);
    let big_p = p.antiderivative();
    for x in [0.0, 0.25, 0.5, 0.75, 1.0] {
        println!("P({x:.2}) = {:.6}", big_p.eval(x));
    }
    Ok(())
}
