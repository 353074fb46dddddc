//! Small dense-polynomial helpers on ascending coefficient slices.
//!
//! Everything here works on the local cell variable `u ∈ [0, 1]`, where the
//! degrees involved never exceed four.

pub(crate) fn horner(c: &[f64], u: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * u + a)
}

/// Coefficients of `p(alpha + beta * v)` as a polynomial in `v`.
pub(crate) fn compose_affine<const N: usize>(c: &[f64; N], alpha: f64, beta: f64) -> [f64; N] {
    let mut out = [0.0; N];
    // (alpha + beta v)^i expanded with a running row of powers
    let mut row = [0.0; N];
    row[0] = 1.0;
    for (i, &ci) in c.iter().enumerate() {
        if i > 0 {
            for m in (0..=i).rev() {
                let from_lower = if m > 0 { row[m - 1] * beta } else { 0.0 };
                row[m] = row[m] * alpha + from_lower;
            }
        }
        if ci != 0.0 {
            for m in 0..=i {
                out[m] += ci * row[m];
            }
        }
    }
    out
}

/// Product of two polynomials, truncated to the output size.
pub(crate) fn mul_into(a: &[f64], b: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|x| *x = 0.0);
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        for (m, &bm) in b.iter().enumerate() {
            if i + m < out.len() {
                out[i + m] += ai * bm;
            }
        }
    }
}

/// `∫_0^1 p(u) du`.
pub(crate) fn unit_integral(c: &[f64]) -> f64 {
    c.iter().enumerate().map(|(i, &a)| a / (i as f64 + 1.0)).sum()
}

/// `∫_0^1 p(u) q(u) du` exactly.
pub(crate) fn unit_product_integral(p: &[f64], q: &[f64]) -> f64 {
    let mut s = 0.0;
    for (i, &a) in p.iter().enumerate() {
        for (m, &b) in q.iter().enumerate() {
            s += a * b / ((i + m) as f64 + 1.0);
        }
    }
    s
}

fn effective_degree(c: &[f64]) -> usize {
    let scale = c.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let eps = scale * 1e-14;
    let mut d = c.len().saturating_sub(1);
    while d > 0 && c[d].abs() <= eps {
        d -= 1;
    }
    d
}

/// Real roots in the open interval `(lo, hi)` of a polynomial of degree ≤ 2.
fn quadratic_roots_in(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let (a0, a1, a2) = (
        c.first().copied().unwrap_or(0.0),
        c.get(1).copied().unwrap_or(0.0),
        c.get(2).copied().unwrap_or(0.0),
    );
    let mut roots = Vec::with_capacity(2);
    let scale = a0.abs().max(a1.abs()).max(a2.abs());
    if scale == 0.0 {
        return roots;
    }
    if a2.abs() <= 1e-14 * scale {
        if a1.abs() > 1e-14 * scale {
            roots.push(-a0 / a1);
        }
    } else {
        let disc = a1 * a1 - 4.0 * a2 * a0;
        if disc >= 0.0 {
            // numerically stable pair
            let sq = disc.sqrt();
            let q = -0.5 * (a1 + a1.signum() * sq);
            let q = if q == 0.0 { -0.5 * sq } else { q };
            roots.push(q / a2);
            if q != 0.0 {
                roots.push(a0 / q);
            }
        }
    }
    roots.retain(|&x| x > lo && x < hi);
    roots.sort_by(f64::total_cmp);
    roots.dedup();
    roots
}

/// Real roots in the open interval `(lo, hi)` of a polynomial of degree ≤ 3.
///
/// Splits the interval at the critical points so each piece is monotone,
/// then bisects every piece that changes sign.
pub(crate) fn roots_in(c: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let deg = effective_degree(c);
    if deg <= 2 {
        return quadratic_roots_in(&c[..=deg.min(c.len() - 1)], lo, hi);
    }
    assert!(deg == 3, "roots_in handles degree ≤ 3");
    let d = [c[1], 2.0 * c[2], 3.0 * c[3]];
    let mut breaks = vec![lo];
    breaks.extend(quadratic_roots_in(&d, lo, hi));
    breaks.push(hi);
    let mut roots = Vec::new();
    for w in breaks.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (mut fa, fb) = (horner(c, a), horner(c, b));
        if fa == 0.0 {
            if a > lo {
                roots.push(a);
            }
            continue;
        }
        if fb == 0.0 || fa.signum() == fb.signum() {
            continue;
        }
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = horner(c, m);
            if fm == 0.0 {
                a = m;
                b = m;
                break;
            }
            if fm.signum() == fa.signum() {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots.retain(|&x| x > lo && x < hi);
    roots.dedup();
    roots
}

pub(crate) fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    (0..k).fold(1.0, |acc, i| acc * f64::from(n - i) / f64::from(i + 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_matches_direct() {
        let c = [0.3, -1.2, 2.5, 0.7];
        let (alpha, beta) = (0.25, 0.5);
        let q = compose_affine(&c, alpha, beta);
        for v in [0.0, 0.1, 0.5, 0.9, 1.0] {
            let direct = horner(&c, alpha + beta * v);
            assert!((horner(&q, v) - direct).abs() < 1e-14);
        }
    }

    #[test]
    fn cubic_roots() {
        // (u - 0.2)(u - 0.5)(u - 0.9)
        let c = [-0.09, 0.73, -1.6, 1.0];
        let r = roots_in(&c, 0.0, 1.0);
        assert_eq!(r.len(), 3);
        for (x, want) in r.iter().zip([0.2, 0.5, 0.9]) {
            assert!((x - want).abs() < 1e-12, "{x} vs {want}");
        }
    }

    #[test]
    fn double_root_of_quadratic() {
        let c = [0.25, -1.0, 1.0];
        assert_eq!(roots_in(&c, 0.0, 1.0), vec![0.5]);
    }

    #[test]
    fn product_integral() {
        // ∫ u * (1 - u) = 1/6
        assert!((unit_product_integral(&[0.0, 1.0], &[1.0, -1.0]) - 1.0 / 6.0).abs() < 1e-15);
    }
}
