use proptest::prelude::*;
use supnorm_adapt::spline_kernel::{
    bspline_eval, gram_sequence, inverse_gram, majorant_constants, ProjectionKernel, SplineOrder,
};

fn order(r: u32) -> SplineOrder {
    SplineOrder::new(r).unwrap()
}

/// Inverse of the `n × n` section of the Gram Toeplitz matrix by Gauss-Jordan.
fn dense_inverse_middle_row(a: &[f64], n: usize) -> Vec<f64> {
    let mut m = vec![vec![0.0; 2 * n]; n];
    for i in 0..n {
        for k in 0..n {
            let d = i.abs_diff(k);
            m[i][k] = a.get(d).copied().unwrap_or(0.0);
        }
        m[i][n + i] = 1.0;
    }
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
            .unwrap();
        m.swap(col, piv);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for row in 0..n {
            if row != col {
                let f = m[row][col];
                if f != 0.0 {
                    for c in 0..2 * n {
                        m[row][c] -= f * m[col][c];
                    }
                }
            }
        }
    }
    let mid = n / 2;
    (0..=mid).map(|k| m[mid][n + mid + k]).collect()
}

#[test]
fn linear_spline_inverse_gram_closed_form() {
    let inv = inverse_gram(order(2), 1e-12).unwrap();
    let s3 = 3f64.sqrt();
    assert!((inv.c - s3).abs() < 1e-13);
    assert!((inv.lambda - (s3 - 2.0)).abs() < 1e-14);
    for (k, &g) in inv.g.iter().enumerate() {
        let want = s3 * (s3 - 2.0).powi(k as i32);
        assert!((g - want).abs() < 1e-13, "k={k}: {g} vs {want}");
    }
    let a = gram_sequence(order(2)).a;
    assert!((a[0] - 2.0 / 3.0).abs() < 1e-15 && (a[1] - 1.0 / 6.0).abs() < 1e-15);
}

#[test]
fn inverse_gram_matches_dense_truncated_inverse() {
    for r in 2..=4 {
        let inv = inverse_gram(order(r), 1e-12).unwrap();
        let dense = dense_inverse_middle_row(&gram_sequence(order(r)).a, 201);
        for k in 0..=inv.k_trunc.min(40) {
            assert!(
                (inv.g[k] - dense[k]).abs() < 1e-10,
                "r={r} k={k}: {} vs {}",
                inv.g[k],
                dense[k]
            );
        }
    }
}

#[test]
fn inverse_gram_convolves_to_delta() {
    for r in 1..=4 {
        let inv = inverse_gram(order(r), 1e-13).unwrap();
        let a = gram_sequence(order(r)).a;
        for d in 0..10i64 {
            let s: f64 = (-(a.len() as i64) + 1..a.len() as i64)
                .map(|m| a[m.unsigned_abs() as usize] * inv.at(d - m))
                .sum();
            let want = if d == 0 { 1.0 } else { 0.0 };
            assert!((s - want).abs() < 1e-11, "r={r} d={d}: {s}");
        }
    }
}

#[test]
fn kernel_reproduces_low_degree_polynomials() {
    for r in 1..=4u32 {
        let kern = ProjectionKernel::with_tail_tol(order(r), 1e-14).unwrap();
        for x in [0.13, 0.5, 0.91, -0.3] {
            let row = kern.row(0, x, 1e-14).unwrap();
            for alpha in 0..r {
                let m = row.moment(alpha);
                let want = x.powi(alpha as i32);
                assert!((m - want).abs() < 1e-7, "r={r} x={x} alpha={alpha}: {m} vs {want}");
            }
        }
    }
}

#[test]
fn row_agrees_with_pointwise_kernel() {
    for r in 1..=4u32 {
        let kern = ProjectionKernel::new(order(r)).unwrap();
        let j = 3;
        let x = 0.377;
        let row = kern.row(j, x, 1e-13).unwrap();
        let s = 8.0;
        for i in 0..200 {
            let y = -3.0 + i as f64 * 0.0313;
            let want = s * kern.eval(s * x, s * y);
            assert!((row.eval(y) - want).abs() < 1e-9, "r={r} y={y}");
        }
    }
}

#[test]
fn bspline_integrates_to_one() {
    for r in 1..=4u32 {
        let n = 20000;
        let h = r as f64 / n as f64;
        let s: f64 = (0..n)
            .map(|i| bspline_eval(order(r), (i as f64 + 0.5) * h))
            .sum::<f64>()
            * h;
        assert!((s - 1.0).abs() < 1e-7);
    }
}

/// `sup_x ∫ |κ(x, y)| dy` by midpoint rule on a fine grid.
fn lebesgue_constant(kern: &ProjectionKernel) -> f64 {
    let mut best = 0.0f64;
    for i in 0..=40 {
        let x = i as f64 / 40.0;
        let row = kern.row(0, x, 1e-12).unwrap();
        let (lo, hi) = row.support();
        let n = ((hi - lo) * 400.0) as usize;
        let h = (hi - lo) / n as f64;
        let s: f64 = (0..n).map(|m| row.eval(lo + (m as f64 + 0.5) * h).abs()).sum::<f64>() * h;
        best = best.max(s);
    }
    best
}

#[test]
fn operator_norm_bound_dominates_lebesgue_constant() {
    for r in 1..=4u32 {
        let kern = ProjectionKernel::new(order(r)).unwrap();
        let leb = lebesgue_constant(&kern);
        assert!(
            leb <= kern.op_norm_bound() * (1.0 + 1e-6),
            "r={r}: {leb} > {}",
            kern.op_norm_bound()
        );
        assert!(leb >= 1.0 - 1e-9);
    }
}

#[test]
fn majorant_dominates_kernel() {
    for r in 1..=4u32 {
        let kern = ProjectionKernel::new(order(r)).unwrap();
        for i in 0..400 {
            let x = i as f64 * 0.0173;
            for m in 0..300 {
                let y = x + (m as f64 - 150.0) * 0.071;
                let k = kern.eval(x, y).abs();
                assert!(k <= kern.phi((x - y).abs()) + 1e-12, "r={r} x={x} y={y}");
            }
        }
    }
}

#[test]
fn majorant_norm_values() {
    let m = majorant_constants(order(1));
    assert_eq!((m.phi_l1, m.phi_l2, m.op_norm_bound), (1.0, 1.0, 1.0));
    let m2 = majorant_constants(order(2));
    assert!(m2.phi_l2 <= 15.5);
    // amplitude c·r·‖N‖² = 2√3, λ = √3 - 2
    let amp = 2.0 * 3f64.sqrt();
    let rate = -(2.0 - 3f64.sqrt()).ln();
    assert!((m2.phi_l1 - amp * (2.0 + 1.0 / rate)).abs() < 1e-12);
    assert!((m2.phi_l2 - amp * (2.0 + 0.5 / rate).sqrt()).abs() < 1e-12);
}

#[test]
fn holder_moment_haar() {
    // Φ = 1 on [0, 1]: 2 ∫_0^1 u^t du = 2 / (t + 1)
    let kern = ProjectionKernel::haar();
    assert!((kern.phi_holder_moment(0.5) - 2.0 / 1.5).abs() < 1e-14);
}

proptest! {
    #[test]
    fn kernel_symmetric_bitwise(r in 1u32..=4, x in -50.0f64..50.0, y in -50.0f64..50.0) {
        let kern = ProjectionKernel::new(order(r)).unwrap();
        prop_assert_eq!(kern.eval(x, y).to_bits(), kern.eval(y, x).to_bits());
    }

    #[test]
    fn rows_integrate_to_one(r in 1u32..=4, j in 0u32..8, x in -4.0f64..4.0) {
        let kern = ProjectionKernel::new(order(r)).unwrap();
        let row = kern.row(j, x, 1e-12).unwrap();
        prop_assert!((row.integral() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn inverse_gram_within_envelope(r in 2u32..=4) {
        let inv = inverse_gram(order(r), 1e-12).unwrap();
        for (k, &g) in inv.g.iter().enumerate() {
            prop_assert!(g.abs() <= inv.c * inv.lambda.abs().powi(k as i32) + 1e-14);
        }
    }
}
