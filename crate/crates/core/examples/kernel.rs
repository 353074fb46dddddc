//! The spline projection kernel: Gram symbol, inverse-Gram decay and the
//! majorant constants for each order.
//!
//! cargo run --example kernel

use supnorm_adapt::spline_kernel::{bspline_sup, gram_sequence, ProjectionKernel};
use supnorm_adapt::SplineOrder;

fn main() -> supnorm_adapt::Result<()> {
    for r in 1..=4 {
        let order = SplineOrder::new(r)?;
        let gram = gram_sequence(order);
        let kernel = ProjectionKernel::new(order)?;
        let inv = kernel.inv_gram();
        let m = kernel.majorant();
        println!("r = {r}");
        println!("  gram a(k)          {:?}", gram.a);
        println!("  sup N_r            {:.6}", bspline_sup(order));
        println!("  |g(k)| <= c lambda^k   c = {:.6}, lambda = {:.6}", inv.c, inv.lambda);
        println!(
            "  truncation radius  {} (tail {:.1e})",
            kernel.k_trunc(),
            kernel.tail_tol()
        );
        println!(
            "  ||Phi||_1 = {:.4}  ||Phi||_2 = {:.4}  op bound = {:.4}",
            m.phi_l1, m.phi_l2, m.op_norm_bound
        );
        println!(
            "  K(0.3, 0.3) = {:.6}  K(0.3, 1.7) = {:.3e}",
            kernel.eval(0.3, 0.3),
            kernel.eval(0.3, 1.7)
        );
    }
    Ok(())
}
