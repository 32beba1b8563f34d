//! Cost kernels `c(x, y)` with values in `(-inf, +inf]`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::XReal;

/// A point of `R^d`. Coordinates are finite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinitePoint);
        }
        Ok(Point(coords))
    }

    pub fn scalar(v: f64) -> Self {
        Point(vec![v])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    /// Exact coordinate equality; `-0.0` and `0.0` are identified.
    pub fn same_as(&self, other: &Point) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a == b)
    }
}

impl From<f64> for Point {
    fn from(v: f64) -> Self {
        Point::scalar(v)
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

/// A cost kernel.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CostSpec {
    /// `c(x, y) = -<x, y>`, finite everywhere.
    Bilinear,
    /// `c(x, y) = -ln(xy - 1)` in one dimension, `+inf` when `xy <= 1`.
    Polar,
    /// `c(x, y) = 1 - sqrt(1 - |x - y|^2 / r^2)` on the ball `|x - y| <= r`,
    /// `+inf` outside.
    Relativistic { radius: f64 },
    /// Explicit table with `rows[i][j] = c(x_i, y_j)` over abstract sets.
    Matrix { rows: Vec<Vec<XReal>> },
}

impl CostSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CostSpec::Bilinear => "bilinear",
            CostSpec::Polar => "polar",
            CostSpec::Relativistic { .. } => "relativistic",
            CostSpec::Matrix { .. } => "matrix",
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CostSpec::Relativistic { radius } if !(radius.is_finite() && *radius > 0.0) => Err(Error::InvalidCost(
                format!("relativistic radius must be positive, got {radius}"),
            )),
            CostSpec::Matrix { rows } => {
                let width = rows.first().map_or(0, Vec::len);
                if rows.iter().any(|r| r.len() != width) {
                    return Err(Error::InvalidCost("matrix rows have unequal lengths".into()));
                }
                if rows.iter().flatten().any(|&v| v == XReal::NegInf) {
                    return Err(Error::NegInfCost);
                }
                if rows
                    .iter()
                    .flatten()
                    .any(|v| matches!(v, XReal::Finite(f) if f.is_nan()))
                {
                    return Err(Error::NaN);
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    /// True when the kernel can never return `+inf`.
    pub fn is_traditional(&self) -> bool {
        match self {
            CostSpec::Bilinear => true,
            CostSpec::Matrix { rows } => rows.iter().flatten().all(|v| v.is_finite()),
            _ => false,
        }
    }

    /// Evaluates the kernel on two points. The matrix kind has no
    /// coordinates and is rejected here; see [`CostSpec::eval_indexed`].
    pub fn eval(&self, x: &Point, y: &Point) -> Result<XReal> {
        if x.dim() != y.dim() {
            return Err(Error::DimensionMismatch(x.dim(), y.dim()));
        }
        Ok(match self {
            CostSpec::Bilinear => {
                let dot: f64 = x.0.iter().zip(&y.0).map(|(a, b)| a * b).sum();
                XReal::from_kernel(-dot)
            }
            CostSpec::Polar => {
                if x.dim() != 1 {
                    return Err(Error::PolarDimension(x.dim()));
                }
                polar(x.0[0], y.0[0])
            }
            CostSpec::Relativistic { radius } => {
                let sq: f64 = x.0.iter().zip(&y.0).map(|(a, b)| (a - b) * (a - b)).sum();
                let u = sq / (radius * radius);
                if u > 1.0 {
                    XReal::PosInf
                } else {
                    XReal::from_kernel(1.0 - (1.0 - u).sqrt())
                }
            }
            CostSpec::Matrix { .. } => return Err(Error::NeedsPoints),
        })
    }

    /// Looks up `rows[i][j]` for the matrix kind.
    pub fn eval_indexed(&self, i: usize, j: usize) -> Result<XReal> {
        match self {
            CostSpec::Matrix { rows } => {
                let row = rows.get(i).ok_or(Error::IndexOutOfRange {
                    index: i,
                    len: rows.len(),
                })?;
                row.get(j).copied().ok_or(Error::IndexOutOfRange {
                    index: j,
                    len: row.len(),
                })
            }
            _ => Err(Error::InvalidCost(format!(
                "{} cost is evaluated on points, not indices",
                self.name()
            ))),
        }
    }
}

fn polar(x: f64, y: f64) -> XReal {
    let arg = x * y - 1.0;
    // log of a non-positive number is -inf, so the cost is +inf
    if arg <= 0.0 {
        XReal::PosInf
    } else {
        XReal::from_kernel(-arg.ln())
    }
}
