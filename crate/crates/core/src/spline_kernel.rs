//! B-splines on the integer grid, their Gram sequence, its Toeplitz inverse,
//! and the resulting spline projection kernel
//!
//! ```text
//! κ(x, y) = Σ_k Σ_l g(|k - l|) N_{l,r}(x) N_{k,r}(y)
//! ```
//!
//! which coincides pointwise with the Battle-Lemarié wavelet projection
//! kernel of the same order. Order `r = 1` is the Haar case.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::piecewise::{CellPoly, DyadicPiecewisePoly};
use crate::poly;

pub const DEFAULT_TAIL_TOL: f64 = 1e-10;

/// Largest number of cells a synthesized spline may span.
pub const MAX_CELLS: u64 = 1 << 26;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct SplineOrder(u32);

impl SplineOrder {
    pub const HAAR: SplineOrder = SplineOrder(1);

    pub fn new(r: u32) -> Result<Self> {
        if (1..=4).contains(&r) {
            Ok(Self(r))
        } else {
            Err(Error::InvalidOrder(r))
        }
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub fn is_haar(self) -> bool {
        self.0 == 1
    }
}

impl TryFrom<u32> for SplineOrder {
    type Error = Error;
    fn try_from(r: u32) -> Result<Self> {
        Self::new(r)
    }
}

impl From<SplineOrder> for u32 {
    fn from(r: SplineOrder) -> u32 {
        r.0
    }
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// `N_{0,r}(x)` from the truncated-power formula
/// `Σ_{i=0}^{r} (-1)^i C(r,i) (x-i)_+^{r-1} / (r-1)!`, zero outside `[0, r)`.
pub fn bspline_eval(r: SplineOrder, x: f64) -> f64 {
    let r = r.get();
    if !(0.0..(r as f64)).contains(&x) {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..=r {
        let d = x - i as f64;
        if d < 0.0 {
            break;
        }
        let p = if r == 1 { 1.0 } else { d.powi(r as i32 - 1) };
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        s += sign * poly::binomial(r, i) * p;
    }
    s / factorial(r - 1)
}

/// Polynomial pieces of `N_{0,r}` on the unit cells `[m, m+1)`, in the
/// local variable `u = x - m`.
pub fn bspline_pieces(r: SplineOrder) -> Vec<CellPoly> {
    let r = r.get();
    let norm = factorial(r - 1);
    (0..r)
        .map(|m| {
            let mut c = [0.0; 4];
            for i in 0..=m {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                let w = sign * poly::binomial(r, i) / norm;
                // (m - i + u)^{r-1}
                let a = f64::from(m - i);
                for p in 0..r {
                    c[p as usize] += w * poly::binomial(r - 1, p) * a.powi((r - 1 - p) as i32);
                }
            }
            c
        })
        .collect()
}

/// `‖N_{0,r}‖_∞`.
pub fn bspline_sup(r: SplineOrder) -> f64 {
    DyadicPiecewisePoly::new(0, 0, bspline_pieces(r))
        .expect("r ≥ 1 pieces")
        .sup_norm()
        .value
}

/// Gram sequence `a(k) = ∫ N_{0,r}(x) N_{k,r}(x) dx`, `k = 0..r-1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GramSequence {
    pub order: SplineOrder,
    pub a: Vec<f64>,
}

impl GramSequence {
    /// `a(θ) = a(0) + 2 Σ_{k≥1} a(k) cos(kθ)`.
    pub fn symbol(&self, theta: f64) -> f64 {
        self.a
            .iter()
            .enumerate()
            .map(|(k, &ak)| {
                if k == 0 {
                    ak
                } else {
                    2.0 * ak * (k as f64 * theta).cos()
                }
            })
            .sum()
    }

    /// Entry `a_{kl}` of the bi-infinite Gram matrix.
    pub fn entry(&self, k: i64, l: i64) -> f64 {
        self.a.get((k - l).unsigned_abs() as usize).copied().unwrap_or(0.0)
    }
}

pub fn gram_sequence(r: SplineOrder) -> GramSequence {
    let pieces = bspline_pieces(r);
    let n = pieces.len();
    let a = (0..n)
        .map(|k| {
            // N_0 lives on cell m with piece m, N_k with piece m - k
            (k..n)
                .map(|m| poly::unit_product_integral(&pieces[m], &pieces[m - k]))
                .sum()
        })
        .collect();
    GramSequence { order: r, a }
}

/// Geometric envelope `|g(k)| ≤ c |λ|^k` from the roots of the Gram symbol,
/// together with the exact partial-fraction representation
/// `g(k) = Σ_i C_i z_i^k` over the symbol roots inside the unit disc.
#[derive(Debug, Clone, PartialEq)]
pub struct DecayEnvelope {
    pub c: f64,
    pub lambda: f64,
    pub roots: Vec<Complex64>,
    pub residues: Vec<Complex64>,
}

impl DecayEnvelope {
    pub fn coefficient(&self, k: usize) -> f64 {
        if self.roots.is_empty() {
            return if k == 0 { self.c } else { 0.0 };
        }
        self.roots
            .iter()
            .zip(&self.residues)
            .map(|(z, c)| (c * z.powu(k as u32)).re)
            .sum()
    }

    /// `c |λ|^{K+1} / (1 - |λ|)`: bound on `Σ_{k > K} |g(k)|`.
    pub fn tail_bound(&self, radius: usize) -> f64 {
        let lam = self.lambda.abs();
        if lam == 0.0 {
            return 0.0;
        }
        self.c * lam.powi(radius as i32 + 1) / (1.0 - lam)
    }

    /// Smallest `K` whose tail bound is below `tol`.
    pub fn radius_for(&self, tol: f64) -> usize {
        let mut k = 0;
        while self.tail_bound(k) >= tol {
            k += 1;
        }
        k
    }
}

/// Roots of a real polynomial (ascending coefficients) by Weierstrass
/// (Durand-Kerner) iteration; the degree is at most 3 here.
fn polynomial_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let deg = coeffs.len() - 1;
    if deg == 0 {
        return Vec::new();
    }
    let lead = coeffs[deg];
    let monic: Vec<f64> = coeffs.iter().map(|c| c / lead).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..deg).map(|i| seed.powu(i as u32) * 3.0).collect();
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..deg {
            let zi = roots[i];
            let denom = (0..deg)
                .filter(|&m| m != i)
                .fold(Complex64::new(1.0, 0.0), |acc, m| acc * (zi - roots[m]));
            let step = eval(zi) / denom;
            roots[i] = zi - step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-16 {
            break;
        }
    }
    // polish
    for z in roots.iter_mut() {
        for _ in 0..3 {
            let d = monic
                .iter()
                .enumerate()
                .skip(1)
                .rev()
                .fold(Complex64::new(0.0, 0.0), |acc, (i, &a)| acc * *z + a * i as f64);
            if d.norm() > 0.0 {
                *z -= eval(*z) / d;
            }
        }
    }
    roots
}

pub fn decay_envelope(gram: &GramSequence) -> DecayEnvelope {
    let r = gram.order.get() as usize;
    if r == 1 {
        return DecayEnvelope {
            c: 1.0 / gram.a[0],
            lambda: 0.0,
            roots: vec![],
            residues: vec![],
        };
    }
    // a(z) = a0 + Σ a_k (z^k + z^{-k}) = Q(w) with w = z + 1/z, using
    // z^k + z^{-k} = D_k(w), D_0 = 2, D_1 = w, D_{k+1} = w D_k - D_{k-1}.
    let mut q = vec![0.0; r];
    q[0] += gram.a[0];
    let mut d_prev = vec![2.0];
    let mut d_cur = vec![0.0, 1.0];
    for k in 1..r {
        for (i, &c) in d_cur.iter().enumerate() {
            q[i] += gram.a[k] * c;
        }
        let mut next = vec![0.0; d_cur.len() + 1];
        for (i, &c) in d_cur.iter().enumerate() {
            next[i + 1] += c;
        }
        for (i, &c) in d_prev.iter().enumerate() {
            next[i] -= c;
        }
        d_prev = std::mem::replace(&mut d_cur, next);
    }
    let inner: Vec<Complex64> = polynomial_roots(&q)
        .into_iter()
        .map(|w| {
            let s = (w * w - 4.0).sqrt();
            let z1 = (w + s) / 2.0;
            let z2 = (w - s) / 2.0;
            if z1.norm() < z2.norm() {
                z1
            } else {
                z2
            }
        })
        .collect();
    // P(z) = z^{r-1} a(z) = a_{r-1} Π (z - z_i)(z - 1/z_i); g(k) = Σ z_i^{k+r-2} / P'(z_i)
    let lead = gram.a[r - 1];
    let residues: Vec<Complex64> = inner
        .iter()
        .enumerate()
        .map(|(i, &zi)| {
            let mut dp = Complex64::new(lead, 0.0) * (zi - 1.0 / zi);
            for (m, &zm) in inner.iter().enumerate() {
                if m != i {
                    dp *= (zi - zm) * (zi - 1.0 / zm);
                }
            }
            zi.powi(r as i32 - 2) / dp
        })
        .collect();
    let c = residues.iter().map(|c| c.norm()).sum();
    let dominant = inner
        .iter()
        .copied()
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("r ≥ 2 has symbol roots");
    let lambda = if dominant.im.abs() < 1e-12 {
        dominant.re
    } else {
        dominant.norm()
    };
    DecayEnvelope {
        c,
        lambda,
        roots: inner,
        residues,
    }
}

/// Toeplitz coefficients `g(k)` of the inverse Gram matrix, truncated at
/// `k_trunc` where the geometric tail bound drops below `tail_tol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseGramSequence {
    pub order: SplineOrder,
    pub g: Vec<f64>,
    pub c: f64,
    pub lambda: f64,
    pub k_trunc: usize,
    pub tail_tol: f64,
}

impl InverseGramSequence {
    /// `g(|d|)`, zero beyond the truncation radius.
    pub fn at(&self, d: i64) -> f64 {
        self.g.get(d.unsigned_abs() as usize).copied().unwrap_or(0.0)
    }

    pub fn tail_bound(&self, radius: usize) -> f64 {
        let lam = self.lambda.abs();
        if lam == 0.0 {
            return 0.0;
        }
        self.c * lam.powi(radius as i32 + 1) / (1.0 - lam)
    }

    /// Smallest radius whose tail bound is below `tol`, capped at `k_trunc`.
    pub fn radius_for(&self, tol: f64) -> usize {
        let mut k = 0;
        while k < self.k_trunc && self.tail_bound(k) >= tol {
            k += 1;
        }
        k
    }
}

/// Fourier coefficients of `1 / a(θ)` by periodic trapezoidal quadrature,
/// doubling the node count until the coefficients settle.
fn symbol_reciprocal_coefficients(gram: &GramSequence, count: usize) -> Result<Vec<f64>> {
    let mut nodes = 64usize.max(4 * count.next_power_of_two());
    let mut prev: Option<Vec<f64>> = None;
    loop {
        let mut coeffs = vec![0.0; count];
        let mut min_symbol = f64::INFINITY;
        let inv: Vec<(f64, f64)> = (0..nodes)
            .map(|m| {
                let theta = 2.0 * std::f64::consts::PI * m as f64 / nodes as f64;
                let s = gram.symbol(theta);
                min_symbol = min_symbol.min(s);
                (theta, 1.0 / s)
            })
            .collect();
        if min_symbol <= 0.0 {
            return Err(Error::NonPositiveSymbol(min_symbol));
        }
        for (k, out) in coeffs.iter_mut().enumerate() {
            *out = inv.iter().map(|&(theta, w)| w * (k as f64 * theta).cos()).sum::<f64>() / nodes as f64;
        }
        if let Some(p) = &prev {
            let change = p.iter().zip(&coeffs).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            if change < 1e-14 * coeffs[0].abs() || nodes >= 1 << 16 {
                return Ok(coeffs);
            }
        }
        prev = Some(coeffs);
        nodes *= 2;
    }
}

pub fn inverse_gram(r: SplineOrder, tail_tol: f64) -> Result<InverseGramSequence> {
    if tail_tol.is_nan() || tail_tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tail_tol must be positive, got {tail_tol}"
        )));
    }
    let gram = gram_sequence(r);
    let env = decay_envelope(&gram);
    let k_trunc = env.radius_for(tail_tol);
    let g = if r.is_haar() {
        let mut g = vec![0.0; k_trunc + 1];
        g[0] = 1.0 / gram.a[0];
        g
    } else {
        symbol_reciprocal_coefficients(&gram, k_trunc + 1)?
    };
    Ok(InverseGramSequence {
        order: r,
        g,
        c: env.c,
        lambda: env.lambda,
        k_trunc,
        tail_tol,
    })
}

/// Constants of the radial majorant `Φ(u) = c r ‖N‖_∞² |λ|^{max(u - r, 0)}`.
/// Norms are taken over `u ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MajorantConstants {
    pub phi_l1: f64,
    pub phi_l2: f64,
    pub op_norm_bound: f64,
}

fn majorant_amplitude(r: SplineOrder, env_c: f64) -> f64 {
    let n_sup = bspline_sup(r);
    env_c * r.get() as f64 * n_sup * n_sup
}

fn majorant_from(r: SplineOrder, c: f64, lambda: f64) -> MajorantConstants {
    let rf = r.get() as f64;
    let amp = majorant_amplitude(r, c);
    let lam = lambda.abs();
    let (tail1, tail2) = if lam == 0.0 {
        (0.0, 0.0)
    } else {
        let rate = -lam.ln();
        (1.0 / rate, 1.0 / (2.0 * rate))
    };
    let phi_l1 = amp * (rf + tail1);
    let phi_l2 = amp * (rf + tail2).sqrt();
    let published = match r.get() {
        1 => Some(1.0),
        2 => Some(3.0),
        _ => None,
    };
    let op_norm_bound = published.map_or(phi_l1, |b| phi_l1.min(b));
    MajorantConstants {
        phi_l1,
        phi_l2,
        op_norm_bound,
    }
}

pub fn majorant_constants(r: SplineOrder) -> MajorantConstants {
    let env = decay_envelope(&gram_sequence(r));
    majorant_from(r, env.c, env.lambda)
}

#[derive(Debug, Clone)]
pub struct ProjectionKernel {
    order: SplineOrder,
    pieces: Vec<CellPoly>,
    inv_gram: InverseGramSequence,
    majorant: MajorantConstants,
}

impl ProjectionKernel {
    pub fn new(r: SplineOrder) -> Result<Self> {
        Self::with_tail_tol(r, DEFAULT_TAIL_TOL)
    }

    pub fn haar() -> Self {
        Self::new(SplineOrder::HAAR).expect("Haar kernel")
    }

    pub fn with_tail_tol(r: SplineOrder, tail_tol: f64) -> Result<Self> {
        let inv_gram = inverse_gram(r, tail_tol)?;
        let majorant = majorant_from(r, inv_gram.c, inv_gram.lambda);
        Ok(Self {
            order: r,
            pieces: bspline_pieces(r),
            inv_gram,
            majorant,
        })
    }

    pub fn order(&self) -> SplineOrder {
        self.order
    }

    pub fn inv_gram(&self) -> &InverseGramSequence {
        &self.inv_gram
    }

    pub fn majorant(&self) -> MajorantConstants {
        self.majorant
    }

    pub fn phi_l1(&self) -> f64 {
        self.majorant.phi_l1
    }

    pub fn phi_l2(&self) -> f64 {
        self.majorant.phi_l2
    }

    /// `B(φ)`: bound on the `L^∞` operator norm of every projection `π_j`.
    pub fn op_norm_bound(&self) -> f64 {
        self.majorant.op_norm_bound
    }

    pub fn tail_tol(&self) -> f64 {
        self.inv_gram.tail_tol
    }

    pub fn k_trunc(&self) -> usize {
        self.inv_gram.k_trunc
    }

    pub(crate) fn pieces(&self) -> &[CellPoly] {
        &self.pieces
    }

    /// Majorant `Φ(u)` for `u ≥ 0`.
    pub fn phi(&self, u: f64) -> f64 {
        let r = self.order.get() as f64;
        let amp = majorant_amplitude(self.order, self.inv_gram.c);
        let lam = self.inv_gram.lambda.abs();
        if u <= r {
            amp
        } else if lam == 0.0 {
            0.0
        } else {
            amp * lam.powf(u - r)
        }
    }

    /// `C(Φ) = ∫_ℝ Φ(|u|) |u|^t du`.
    pub fn phi_holder_moment(&self, t: f64) -> f64 {
        let r = self.order.get() as f64;
        let amp = majorant_amplitude(self.order, self.inv_gram.c);
        let lam = self.inv_gram.lambda.abs();
        let head = amp * r.powf(t + 1.0) / (t + 1.0);
        let tail = if lam == 0.0 {
            0.0
        } else {
            let rate = -lam.ln();
            let span = 80.0 / rate;
            quadrature::integrate(|u| amp * (-(u - r) * rate).exp() * u.powf(t), r, r + span, 1e-12).integral
        };
        2.0 * (head + tail)
    }

    /// Active B-spline indices and values at `t`: `(l, N_{0,r}(t - l))`.
    pub(crate) fn active(&self, t: f64) -> impl Iterator<Item = (i64, f64)> + '_ {
        let lt = t.floor();
        let u = t - lt;
        let lt = lt as i64;
        self.pieces
            .iter()
            .enumerate()
            .map(move |(i, p)| (lt - i as i64, poly::horner(p, u)))
    }

    /// `κ(x, y)` with the truncated inverse-Gram sequence. The arguments are
    /// put in a canonical order first, so `eval(x, y) == eval(y, x)` bit for bit.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let (a, b) = if x.total_cmp(&y).is_le() { (x, y) } else { (y, x) };
        let mut s = 0.0;
        for (l, nl) in self.active(a) {
            for (k, nk) in self.active(b) {
                s += self.inv_gram.at(k - l) * nl * nk;
            }
        }
        s
    }

    /// `y ↦ Σ_k coeffs[k - first] N_{0,r}(2^j y - k)` on level-`j` cells.
    pub fn spline_series(&self, level: u32, first: i64, coeffs: &[f64]) -> Result<DyadicPiecewisePoly> {
        if coeffs.is_empty() {
            return Ok(DyadicPiecewisePoly::zero(level));
        }
        let r = self.pieces.len();
        let n_cells = coeffs.len() + r - 1;
        let mut cells = vec![[0.0; 4]; n_cells];
        for (m, cell) in cells.iter_mut().enumerate() {
            // B-spline k = first + m - i covers this cell with piece i
            for (i, piece) in self.pieces.iter().enumerate() {
                let Some(idx) = m.checked_sub(i) else { continue };
                let Some(&ck) = coeffs.get(idx) else { continue };
                if ck != 0.0 {
                    for p in 0..4 {
                        cell[p] += ck * piece[p];
                    }
                }
            }
        }
        DyadicPiecewisePoly::new(level, first, cells)
    }

    /// Apply the inverse Gram matrix (truncated at `radius`) to inner-product
    /// coefficients `beta` indexed from `first`, scale by `2^j`, and expand.
    pub(crate) fn synthesize(
        &self,
        level: u32,
        first: i64,
        beta: &[f64],
        radius: usize,
    ) -> Result<DyadicPiecewisePoly> {
        let n_coeff = beta.len() + 2 * radius;
        let n_cells = (n_coeff + self.pieces.len() - 1) as u64;
        if n_cells > MAX_CELLS {
            return Err(Error::SupportTooWide {
                cells: n_cells,
                level,
                limit: MAX_CELLS,
            });
        }
        let scale = (level as f64).exp2();
        let g = &self.inv_gram.g;
        let r = radius as i64;
        let coeffs: Vec<f64> = (0..n_coeff as i64)
            .map(|idx| {
                // coefficient of B-spline k = first - radius + idx
                let centre = idx - r;
                let lo = (centre - r).max(0);
                let hi = (centre + r).min(beta.len() as i64 - 1);
                let mut s = 0.0;
                for l in lo..=hi {
                    s += g[(centre - l).unsigned_abs() as usize] * beta[l as usize];
                }
                scale * s
            })
            .collect();
        self.spline_series(level, first - r, &coeffs)
    }

    /// Dilated kernel row `y ↦ 2^j κ(2^j x, 2^j y)`, with the inverse-Gram
    /// sum cut where the geometric tail bound falls below `tol`.
    pub fn row(&self, j: u32, x: f64, tol: f64) -> Result<DyadicPiecewisePoly> {
        let t = x * (j as f64).exp2();
        let r = self.pieces.len();
        let mut beta = vec![0.0; r];
        let mut first = i64::MAX;
        for (l, v) in self.active(t) {
            first = first.min(l);
            let _ = v;
        }
        for (l, v) in self.active(t) {
            beta[(l - first) as usize] = v;
        }
        self.synthesize(j, first, &beta, self.inv_gram.radius_for(tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(r: u32) -> SplineOrder {
        SplineOrder::new(r).unwrap()
    }

    #[test]
    fn order_bounds() {
        assert_eq!(SplineOrder::new(0), Err(Error::InvalidOrder(0)));
        assert_eq!(SplineOrder::new(5), Err(Error::InvalidOrder(5)));
        assert!(SplineOrder::new(4).is_ok());
    }

    #[test]
    fn bspline_values() {
        assert_eq!(bspline_eval(order(1), 0.5), 1.0);
        assert_eq!(bspline_eval(order(1), 0.0), 1.0);
        assert_eq!(bspline_eval(order(1), 1.0), 0.0);
        assert_eq!(bspline_eval(order(2), 1.0), 1.0);
        assert_eq!(bspline_eval(order(3), -0.1), 0.0);
        assert_eq!(bspline_eval(order(3), 3.0), 0.0);
        assert!((bspline_sup(order(3)) - 0.75).abs() < 1e-15);
        assert!((bspline_sup(order(4)) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn pieces_agree_with_truncated_powers() {
        for r in 1..=4 {
            let pieces = bspline_pieces(order(r));
            for i in 0..400 {
                let x = i as f64 * r as f64 / 400.0;
                let m = x.floor() as usize;
                let via_pieces = poly::horner(&pieces[m], x - m as f64);
                assert!((via_pieces - bspline_eval(order(r), x)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn gram_partition_of_unity() {
        for r in 1..=4 {
            let a = gram_sequence(order(r)).a;
            let total = a[0] + 2.0 * a[1..].iter().sum::<f64>();
            assert!((total - 1.0).abs() < 1e-14, "r={r}: {total}");
            assert!(a[0] > 0.0);
        }
        assert_eq!(gram_sequence(order(1)).a, vec![1.0]);
    }

    #[test]
    fn haar_inverse_is_identity() {
        let inv = inverse_gram(order(1), 1e-10).unwrap();
        assert_eq!(inv.g[0], 1.0);
        assert!(inv.g[1..].iter().all(|&g| g == 0.0));
        assert_eq!(inv.lambda, 0.0);
    }

    #[test]
    fn rejects_nonpositive_tail_tol() {
        assert!(inverse_gram(order(2), 0.0).is_err());
    }

    #[test]
    fn residues_match_quadrature() {
        for r in 2..=4 {
            let gram = gram_sequence(order(r));
            let env = decay_envelope(&gram);
            let inv = inverse_gram(order(r), 1e-12).unwrap();
            for (k, &g) in inv.g.iter().enumerate() {
                assert!((env.coefficient(k) - g).abs() < 1e-12 * inv.c, "r={r} k={k}");
                assert!(g.abs() <= inv.c * inv.lambda.abs().powi(k as i32) * (1.0 + 1e-9) + 1e-15);
            }
            assert!(inv.tail_bound(inv.k_trunc) < inv.tail_tol);
        }
    }

    #[test]
    fn haar_kernel_is_cell_indicator() {
        let k = ProjectionKernel::haar();
        assert_eq!(k.eval(0.3, 0.7), 1.0);
        assert_eq!(k.eval(-0.1, 0.2), 0.0);
        let row = k.row(2, 0.3, 1e-10).unwrap();
        assert_eq!(row.level(), 2);
        assert_eq!(row.eval(0.3), 4.0);
        assert_eq!(row.eval(0.25), 4.0);
        assert_eq!(row.eval(0.5), 0.0);
        assert_eq!(row.eval(0.2), 0.0);
        assert_eq!(row.integral(), 1.0);
    }

    #[test]
    fn majorant_haar_and_linear() {
        let m1 = majorant_constants(order(1));
        assert_eq!((m1.phi_l1, m1.phi_l2, m1.op_norm_bound), (1.0, 1.0, 1.0));
        let m2 = majorant_constants(order(2));
        assert!(m2.phi_l2 <= 15.5);
        assert!(m2.op_norm_bound <= 3.0);
        for r in 1..=4 {
            let m = majorant_constants(order(r));
            assert!(m.phi_l1.is_finite() && m.phi_l1 > 0.0);
            assert!(m.phi_l2.is_finite() && m.phi_l2 > 0.0);
            assert!(m.op_norm_bound.is_finite() && m.op_norm_bound > 0.0);
        }
    }
}
