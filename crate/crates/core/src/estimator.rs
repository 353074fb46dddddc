//! Linear spline-projection estimators of a density and its distribution
//! function, for arbitrary signed weights on the sample points.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::piecewise::{cell_width, CumulativePoly, DyadicPiecewisePoly};
use crate::poly;
use crate::spline_kernel::{ProjectionKernel, SplineOrder, MAX_CELLS};

/// Sorted, finite, nonempty sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    xs: Vec<f64>,
}

impl Sample {
    pub fn new(mut xs: Vec<f64>) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(&bad) = xs.iter().find(|x| !x.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        xs.sort_by(f64::total_cmp);
        Ok(Self { xs })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Number of points `≤ t`.
    pub fn count_le(&self, t: f64) -> usize {
        self.xs.partition_point(|&x| x <= t)
    }

    /// Number of points `< t`.
    pub fn count_lt(&self, t: f64) -> usize {
        self.xs.partition_point(|&x| x < t)
    }

    /// Right-continuous empirical distribution function.
    pub fn ecdf(&self, t: f64) -> f64 {
        self.count_le(t) as f64 / self.len() as f64
    }

    pub fn uniform_weights(&self) -> Vec<f64> {
        vec![1.0 / self.len() as f64; self.len()]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityEstimate {
    pub j: u32,
    pub density: DyadicPiecewisePoly,
    pub kernel_order: SplineOrder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfEstimate {
    pub cdf: CumulativePoly,
    pub total_mass: f64,
}

impl CdfEstimate {
    pub fn eval(&self, s: f64) -> f64 {
        self.cdf.eval(s)
    }
}

/// `Σ_i w_i 2^j κ(2^j X_i, 2^j ·)`, with `weights` aligned to the sorted sample.
pub fn project_measure(points: &Sample, weights: &[f64], j: u32, kernel: &ProjectionKernel) -> Result<DensityEstimate> {
    if weights.len() != points.len() {
        return Err(Error::WeightLength {
            weights: weights.len(),
            n: points.len(),
        });
    }
    let scale = (j as f64).exp2();
    let r = kernel.order().get() as i64;
    let xs = points.xs();
    let first = (xs[0] * scale).floor() as i64 - (r - 1);
    let last = (xs[xs.len() - 1] * scale).floor() as i64;
    let width = (last - first + 1) as u64;
    if width > MAX_CELLS {
        return Err(Error::SupportTooWide {
            cells: width,
            level: j,
            limit: MAX_CELLS,
        });
    }
    let mut beta = vec![0.0; width as usize];
    for (&x, &w) in xs.iter().zip(weights) {
        if w == 0.0 {
            continue;
        }
        for (l, v) in kernel.active(x * scale) {
            beta[(l - first) as usize] += w * v;
        }
    }
    let density = kernel.synthesize(j, first, &beta, kernel.k_trunc())?;
    Ok(DensityEstimate {
        j,
        density,
        kernel_order: kernel.order(),
    })
}

/// `π_j f` for a piecewise polynomial `f` of level at least `j`, by exact
/// integration of `f` against the level-`j` B-splines.
pub fn project_spline(f: &DyadicPiecewisePoly, j: u32, kernel: &ProjectionKernel) -> Result<DyadicPiecewisePoly> {
    let f = if f.level() < j {
        f.refine_to_level(j)?
    } else {
        f.clone()
    };
    let split = 1i64 << (f.level() - j);
    let b = 1.0 / split as f64;
    let h = cell_width(f.level());
    let r = kernel.order().get() as i64;
    let m_first = f.k_min().div_euclid(split);
    let m_last = f.k_max().div_euclid(split);
    let first = m_first - (r - 1);
    let mut beta = vec![0.0; (m_last - first + 1) as usize];
    for (idx, cell) in f.cells().iter().enumerate() {
        let k = f.k_min() + idx as i64;
        let m = k.div_euclid(split);
        let a = k.rem_euclid(split) as f64 * b;
        for (i, piece) in kernel.pieces().iter().enumerate() {
            // on level-j cell m the spline N_{j,m-i} is piece i in u = a + b v
            let q = poly::compose_affine(piece, a, b);
            beta[(m - i as i64 - first) as usize] += h * poly::unit_product_integral(cell, &q);
        }
    }
    kernel.synthesize(j, first, &beta, kernel.k_trunc())
}

pub fn cdf_estimate(d: &DensityEstimate) -> CdfEstimate {
    let cdf = d.density.antiderivative();
    let total_mass = cdf.total();
    CdfEstimate { cdf, total_mass }
}

/// `sup_t |F^S(t) - F_n(t)|` over ℝ, with both one-sided limits of the
/// empirical distribution function taken at its jumps.
pub fn sup_distance_to_ecdf(c: &CdfEstimate, s: &Sample) -> f64 {
    let n = s.len() as f64;
    let h = cell_width(c.cdf.level());
    let mut best = 0.0f64;
    let mut check = |t: f64, value: f64| {
        let below = s.count_lt(t) as f64 / n;
        let upto = s.count_le(t) as f64 / n;
        best = best.max((value - below).abs()).max((value - upto).abs());
    };
    for (idx, cell) in c.cdf.cells().iter().enumerate() {
        let k = c.cdf.k_min() + idx as i64;
        check(k as f64 * h, cell[0]);
        let d = [cell[1], 2.0 * cell[2], 3.0 * cell[3], 4.0 * cell[4]];
        for u in poly::roots_in(&d, 0.0, 1.0) {
            check((k as f64 + u) * h, poly::horner(cell, u));
        }
    }
    check((c.cdf.k_max() + 1) as f64 * h, c.total_mass);
    for &x in s.xs() {
        check(x, c.cdf.eval(x));
    }
    // far left and far right
    best.max((c.total_mass - 1.0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn haar() -> ProjectionKernel {
        ProjectionKernel::haar()
    }

    #[test]
    fn sample_validation() {
        assert_eq!(Sample::new(vec![]), Err(Error::EmptySample));
        assert!(matches!(Sample::new(vec![1.0, f64::NAN]), Err(Error::NonFinite(_))));
        let s = Sample::new(vec![3.0, 1.0, 2.0]).unwrap();
        assert_eq!(s.xs(), &[1.0, 2.0, 3.0]);
        assert_eq!(s.ecdf(2.0), 2.0 / 3.0);
        assert_eq!(s.count_lt(2.0), 1);
    }

    #[test]
    fn single_point_haar() {
        let s = Sample::new(vec![0.4]).unwrap();
        let d = project_measure(&s, &[1.0], 0, &haar()).unwrap();
        assert_eq!(d.density.eval(0.0), 1.0);
        assert_eq!(d.density.eval(0.99), 1.0);
        assert_eq!(d.density.eval(1.0), 0.0);
        assert_eq!(d.density.eval(-0.01), 0.0);
        let c = cdf_estimate(&d);
        assert_eq!(c.eval(0.5), 0.5);
        assert_eq!(c.total_mass, 1.0);
        assert!((sup_distance_to_ecdf(&c, &s) - 0.6).abs() < 1e-15);
    }

    #[test]
    fn weight_length_checked() {
        let s = Sample::new(vec![0.1, 0.2]).unwrap();
        assert_eq!(
            project_measure(&s, &[1.0], 0, &haar()),
            Err(Error::WeightLength { weights: 1, n: 2 })
        );
    }

    #[test]
    fn project_spline_haar_is_cell_average() {
        // f = 2y on [0,1) at level 0; projection to level 1 gives averages 0.5, 1.5
        let f = DyadicPiecewisePoly::new(0, 0, vec![[0.0, 2.0, 0.0, 0.0]]).unwrap();
        let p = project_spline(&f, 1, &haar()).unwrap();
        assert!((p.eval(0.25) - 0.5).abs() < 1e-15);
        assert!((p.eval(0.75) - 1.5).abs() < 1e-15);
    }
}
