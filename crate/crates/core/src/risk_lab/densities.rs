//! Test densities with known Hölder exponent, Hölder constant and sup-norm.
//! All their breakpoints are integers, hence knots at every dyadic level.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum TestDensity {
    /// Triangle on `[0, 2]` with peak 1 at `x = 1`.
    Triangular,
    /// `(1 + cos πx) / 2` on `[-1, 1]`.
    RaisedCosine,
    /// `C_t (1 - |x|^t)` on `[-1, 1]`, `C_t = (t + 1) / (2t)`.
    Cusp { t: f64 },
}

impl TestDensity {
    pub fn cusp(t: f64) -> Result<Self> {
        if t > 0.0 && t <= 1.0 {
            Ok(TestDensity::Cusp { t })
        } else {
            Err(Error::InvalidArgument(format!(
                "cusp exponent must lie in (0, 1], got {t}"
            )))
        }
    }

    /// Parse `triangular`, `raised-cosine` or `cusp:<t>`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "triangular" => Ok(TestDensity::Triangular),
            "raised-cosine" | "raised_cosine" => Ok(TestDensity::RaisedCosine),
            _ => match s.strip_prefix("cusp:") {
                Some(t) => Self::cusp(
                    t.parse()
                        .map_err(|_| Error::InvalidArgument(format!("bad cusp exponent {t:?}")))?,
                ),
                None => Err(Error::InvalidArgument(format!("unknown test density {s:?}"))),
            },
        }
    }

    pub fn label(&self) -> String {
        match self {
            TestDensity::Triangular => "triangular".into(),
            TestDensity::RaisedCosine => "raised-cosine".into(),
            TestDensity::Cusp { t } => format!("cusp:{t}"),
        }
    }

    fn cusp_constant(t: f64) -> f64 {
        (t + 1.0) / (2.0 * t)
    }

    pub fn support(&self) -> (f64, f64) {
        match self {
            TestDensity::Triangular => (0.0, 2.0),
            _ => (-1.0, 1.0),
        }
    }

    /// Hölder exponent `t`.
    pub fn smoothness(&self) -> f64 {
        match self {
            TestDensity::Cusp { t } => *t,
            _ => 1.0,
        }
    }

    /// Local Hölder constant `H(t, p₀)`.
    pub fn holder_h(&self) -> f64 {
        match self {
            TestDensity::Triangular => 1.0,
            TestDensity::RaisedCosine => PI / 2.0,
            TestDensity::Cusp { t } => Self::cusp_constant(*t),
        }
    }

    /// `‖p₀‖_∞`.
    pub fn sup(&self) -> f64 {
        match self {
            TestDensity::Cusp { t } => Self::cusp_constant(*t),
            _ => 1.0,
        }
    }

    /// `‖p₀‖_{t,∞} = ‖p₀‖_∞ + H(t, p₀)`.
    pub fn holder_norm(&self) -> f64 {
        self.sup() + self.holder_h()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (a, b) = self.support();
        if x < a || x > b {
            return 0.0;
        }
        match self {
            TestDensity::Triangular => 1.0 - (x - 1.0).abs(),
            TestDensity::RaisedCosine => 0.5 * (1.0 + (PI * x).cos()),
            TestDensity::Cusp { t } => Self::cusp_constant(*t) * (1.0 - x.abs().powf(*t)),
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let (a, b) = self.support();
        if x <= a {
            return 0.0;
        }
        if x >= b {
            return 1.0;
        }
        match self {
            TestDensity::Triangular => {
                if x <= 1.0 {
                    0.5 * x * x
                } else {
                    1.0 - 0.5 * (2.0 - x) * (2.0 - x)
                }
            }
            TestDensity::RaisedCosine => 0.5 * (x + 1.0) + (PI * x).sin() / (2.0 * PI),
            TestDensity::Cusp { t } => {
                let c = Self::cusp_constant(*t);
                let tail = x.abs().powf(t + 1.0) / (t + 1.0);
                if x <= 0.0 {
                    c * ((x + 1.0) - (1.0 / (t + 1.0) - tail))
                } else {
                    0.5 + c * (x - tail)
                }
            }
        }
    }

    pub fn quantile(&self, u: f64) -> f64 {
        match self {
            TestDensity::Triangular => {
                if u <= 0.5 {
                    (2.0 * u).sqrt()
                } else {
                    2.0 - (2.0 * (1.0 - u)).sqrt()
                }
            }
            _ => {
                let (mut lo, mut hi) = self.support();
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if self.cdf(mid) < u {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    pub fn sample<R: Rng>(&self, n: usize, rng: &mut R) -> Vec<f64> {
        (0..n).map(|_| self.quantile(rng.gen::<f64>())).collect()
    }

    /// Points where the density is not smooth.
    pub fn feature_points(&self) -> Vec<f64> {
        match self {
            TestDensity::Triangular => vec![0.0, 1.0, 2.0],
            TestDensity::RaisedCosine => vec![-1.0, 1.0],
            TestDensity::Cusp { .. } => vec![-1.0, 0.0, 1.0],
        }
    }
}
