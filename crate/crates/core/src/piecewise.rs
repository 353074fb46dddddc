//! Dyadic piecewise polynomials.
//!
//! A [`DyadicPiecewisePoly`] at level `j` is a polynomial of degree ≤ 3 on
//! each half-open cell `[k 2^{-j}, (k+1) 2^{-j})`, stored in the local
//! variable `u = 2^j y - k ∈ [0, 1)`, and zero outside its cell range.
//! Estimates, kernel rows and symmetrized processes all live in this form,
//! so sup-norms, integrals and antiderivatives are exact up to rounding.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;

/// Per-cell coefficients, ascending powers of the local variable.
pub type CellPoly = [f64; 4];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicPiecewisePoly {
    level: u32,
    k_min: i64,
    cells: Vec<CellPoly>,
}

/// Location and value of a sup-norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SupNorm {
    pub value: f64,
    /// Point where `|p|` attains (or, at a right cell end, approaches) the sup.
    pub argmax: f64,
}

pub(crate) fn cell_width(level: u32) -> f64 {
    (-(level as f64)).exp2()
}

impl DyadicPiecewisePoly {
    pub fn new(level: u32, k_min: i64, cells: Vec<CellPoly>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidArgument(
                "piecewise polynomial needs at least one cell".into(),
            ));
        }
        Ok(Self { level, k_min, cells })
    }

    /// The zero function, represented by one zero cell at the origin.
    pub fn zero(level: u32) -> Self {
        Self {
            level,
            k_min: 0,
            cells: vec![[0.0; 4]],
        }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.cells.len() as i64 - 1
    }

    pub fn cells(&self) -> &[CellPoly] {
        &self.cells
    }

    pub fn cell(&self, k: i64) -> Option<&CellPoly> {
        if k < self.k_min {
            return None;
        }
        self.cells.get((k - self.k_min) as usize)
    }

    /// `[start, end)` of the cell range.
    pub fn support(&self) -> (f64, f64) {
        let h = cell_width(self.level);
        (self.k_min as f64 * h, (self.k_max() + 1) as f64 * h)
    }

    pub fn eval(&self, y: f64) -> f64 {
        let scale = (self.level as f64).exp2();
        let t = y * scale;
        let k = t.floor();
        match self.cell(k as i64) {
            Some(c) => poly::horner(c, t - k),
            None => 0.0,
        }
    }

    /// Multiply every coefficient by `a`.
    pub fn scaled(&self, a: f64) -> Self {
        let cells = self
            .cells
            .iter()
            .map(|c| [a * c[0], a * c[1], a * c[2], a * c[3]])
            .collect();
        Self {
            level: self.level,
            k_min: self.k_min,
            cells,
        }
    }

    /// Weighted sum of piecewise polynomials; coarser terms are refined to
    /// the finest level first and the support becomes the union of supports.
    pub fn combine(terms: &[(f64, &DyadicPiecewisePoly)]) -> Self {
        let Some(level) = terms.iter().map(|(_, p)| p.level).max() else {
            return Self::zero(0);
        };
        let refined: Vec<(f64, std::borrow::Cow<'_, DyadicPiecewisePoly>)> = terms
            .iter()
            .map(|&(w, p)| {
                let p = if p.level == level {
                    std::borrow::Cow::Borrowed(p)
                } else {
                    std::borrow::Cow::Owned(p.refine_to_level(level).expect("level is the max"))
                };
                (w, p)
            })
            .collect();
        let k_min = refined.iter().map(|(_, p)| p.k_min).min().unwrap();
        let k_max = refined.iter().map(|(_, p)| p.k_max()).max().unwrap();
        let mut cells = vec![[0.0; 4]; (k_max - k_min + 1) as usize];
        for (w, p) in &refined {
            let off = (p.k_min - k_min) as usize;
            for (dst, src) in cells[off..off + p.cells.len()].iter_mut().zip(&p.cells) {
                for i in 0..4 {
                    dst[i] += w * src[i];
                }
            }
        }
        Self { level, k_min, cells }
    }

    /// `self - other`, the most common combination.
    pub fn difference(&self, other: &DyadicPiecewisePoly) -> Self {
        Self::combine(&[(1.0, self), (-1.0, other)])
    }

    /// Re-express the same function on level-`l` cells.
    pub fn refine_to_level(&self, l: u32) -> Result<Self> {
        if l < self.level {
            return Err(Error::RefineDown {
                from: self.level,
                to: l,
            });
        }
        if l == self.level {
            return Ok(self.clone());
        }
        let split = 1i64 << (l - self.level);
        let beta = 1.0 / split as f64;
        let mut cells = Vec::with_capacity(self.cells.len() * split as usize);
        for c in &self.cells {
            for m in 0..split {
                cells.push(poly::compose_affine(c, m as f64 * beta, beta));
            }
        }
        Ok(Self {
            level: l,
            k_min: self.k_min * split,
            cells,
        })
    }

    /// Exact global sup of `|p|`: per cell, both endpoint values (the right
    /// one as a left limit) and the interior critical points.
    pub fn sup_norm(&self) -> SupNorm {
        let h = cell_width(self.level);
        let mut best = SupNorm {
            value: 0.0,
            argmax: self.k_min as f64 * h,
        };
        for (i, c) in self.cells.iter().enumerate() {
            let k = self.k_min + i as i64;
            let deriv = [c[1], 2.0 * c[2], 3.0 * c[3]];
            let mut consider = |u: f64| {
                let v = poly::horner(c, u).abs();
                if v > best.value {
                    best = SupNorm {
                        value: v,
                        argmax: (k as f64 + u) * h,
                    };
                }
            };
            consider(0.0);
            consider(1.0);
            for u in poly::roots_in(&deriv, 0.0, 1.0) {
                consider(u);
            }
        }
        best
    }

    /// Minimum of `p` over its cell range (same candidate set as the sup).
    pub fn min_value(&self) -> f64 {
        let mut best = f64::INFINITY;
        for c in &self.cells {
            let deriv = [c[1], 2.0 * c[2], 3.0 * c[3]];
            best = best.min(poly::horner(c, 0.0)).min(poly::horner(c, 1.0));
            for u in poly::roots_in(&deriv, 0.0, 1.0) {
                best = best.min(poly::horner(c, u));
            }
        }
        best
    }

    pub fn integral(&self) -> f64 {
        let h = cell_width(self.level);
        h * self.cells.iter().map(|c| poly::unit_integral(c)).sum::<f64>()
    }

    /// `∫ y^alpha p(y) dy` for `alpha ≤ 3`, exact per cell.
    pub fn moment(&self, alpha: u32) -> f64 {
        assert!(alpha <= 3, "moments are supported up to order 3");
        let h = cell_width(self.level);
        let mut total = 0.0;
        let mut prod = [0.0; 7];
        for (i, c) in self.cells.iter().enumerate() {
            let k = (self.k_min + i as i64) as f64;
            // ((k + u) h)^alpha in powers of u
            let mut mono = [0.0; 4];
            for m in 0..=alpha {
                mono[m as usize] = poly::binomial(alpha, m) * k.powi((alpha - m) as i32) * h.powi(alpha as i32);
            }
            poly::mul_into(c, &mono, &mut prod);
            total += poly::unit_integral(&prod);
        }
        total * h
    }

    /// Continuous antiderivative vanishing at `-∞`.
    pub fn antiderivative(&self) -> CumulativePoly {
        let h = cell_width(self.level);
        let mut running = 0.0;
        let mut cells = Vec::with_capacity(self.cells.len());
        for c in &self.cells {
            let q = [running, h * c[0], h * c[1] / 2.0, h * c[2] / 3.0, h * c[3] / 4.0];
            running += h * poly::unit_integral(c);
            cells.push(q);
        }
        CumulativePoly {
            level: self.level,
            k_min: self.k_min,
            cells,
            total: running,
        }
    }
}

/// Antiderivative of a [`DyadicPiecewisePoly`]: degree ≤ 4 per cell, `0` to
/// the left of the cell range and `total` to the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulativePoly {
    level: u32,
    k_min: i64,
    cells: Vec<[f64; 5]>,
    total: f64,
}

impl CumulativePoly {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn k_min(&self) -> i64 {
        self.k_min
    }

    pub fn k_max(&self) -> i64 {
        self.k_min + self.cells.len() as i64 - 1
    }

    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn cells(&self) -> &[[f64; 5]] {
        &self.cells
    }

    pub fn support(&self) -> (f64, f64) {
        let h = cell_width(self.level);
        (self.k_min as f64 * h, (self.k_max() + 1) as f64 * h)
    }

    pub fn eval(&self, y: f64) -> f64 {
        let t = y * (self.level as f64).exp2();
        let kf = t.floor();
        let k = kf as i64;
        if k < self.k_min {
            0.0
        } else if k > self.k_max() {
            self.total
        } else {
            poly::horner(&self.cells[(k - self.k_min) as usize], t - kf)
        }
    }

    /// Value of the cell-`k` polynomial at local coordinate `u ∈ [0, 1]`.
    pub fn eval_local(&self, k: i64, u: f64) -> f64 {
        if k < self.k_min {
            0.0
        } else if k > self.k_max() {
            self.total
        } else {
            poly::horner(&self.cells[(k - self.k_min) as usize], u)
        }
    }
}
