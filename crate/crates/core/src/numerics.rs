//! Extended reals `[-inf, +inf]` with the arithmetic conventions used for
//! costs and c-transforms.
//!
//! Costs take values in `(-inf, +inf]`; `-inf` only shows up as the weight of
//! a vacuous constraint (an absent edge of the alpha-graph) and in the range
//! of transformed functions.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Default absolute tolerance for cycle and residual tests.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// An extended real number. Finite payloads are never NaN.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum XReal {
    NegInf,
    Finite(f64),
    PosInf,
}

impl XReal {
    pub const ZERO: XReal = XReal::Finite(0.0);

    /// Builds a value from a float, mapping `±inf` to the sentinels.
    pub fn new(v: f64) -> Result<Self> {
        if v.is_nan() {
            Err(Error::NaN)
        } else if v == f64::INFINITY {
            Ok(XReal::PosInf)
        } else if v == f64::NEG_INFINITY {
            Ok(XReal::NegInf)
        } else {
            Ok(XReal::Finite(v))
        }
    }

    /// Normalizes a raw kernel output. NaN (e.g. from the log of a negative
    /// number) and `-inf` are both mapped to `+inf`, the value of an
    /// inadmissible pair.
    pub fn from_kernel(v: f64) -> Self {
        if v.is_nan() || v == f64::INFINITY || v == f64::NEG_INFINITY {
            XReal::PosInf
        } else {
            XReal::Finite(v)
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, XReal::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            XReal::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Lossy conversion to `f64` with infinities mapped to float infinities.
    pub fn to_f64(self) -> f64 {
        match self {
            XReal::NegInf => f64::NEG_INFINITY,
            XReal::Finite(v) => v,
            XReal::PosInf => f64::INFINITY,
        }
    }

    fn rank(self) -> u8 {
        match self {
            XReal::NegInf => 0,
            XReal::Finite(_) => 1,
            XReal::PosInf => 2,
        }
    }

    pub fn min(self, other: XReal) -> XReal {
        if other < self {
            other
        } else {
            self
        }
    }

    pub fn max(self, other: XReal) -> XReal {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl Eq for XReal {}

impl PartialOrd for XReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for XReal {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (XReal::Finite(a), XReal::Finite(b)) => a.partial_cmp(b).expect("finite values are never NaN"),
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl std::ops::Neg for XReal {
    type Output = XReal;
    fn neg(self) -> XReal {
        match self {
            XReal::NegInf => XReal::PosInf,
            XReal::Finite(v) => XReal::Finite(-v),
            XReal::PosInf => XReal::NegInf,
        }
    }
}

impl From<f64> for XReal {
    /// Panics on NaN; use [`XReal::new`] for untrusted input.
    fn from(v: f64) -> Self {
        XReal::new(v).expect("NaN is not an extended real")
    }
}

impl fmt::Display for XReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            XReal::NegInf => f.write_str("-inf"),
            XReal::Finite(v) => write!(f, "{v}"),
            XReal::PosInf => f.write_str("inf"),
        }
    }
}

/// `c - phi` with `(+inf) - (+inf) = +inf`.
///
/// A `+inf` cost dominates whatever is subtracted from it, and subtracting
/// `-inf` gives `+inf`. Costs never take the value `-inf`.
pub fn transform_term(c: XReal, phi: XReal) -> Result<XReal> {
    match (c, phi) {
        (XReal::NegInf, _) => Err(Error::NegInfCost),
        (XReal::PosInf, _) => Ok(XReal::PosInf),
        (XReal::Finite(_), XReal::NegInf) => Ok(XReal::PosInf),
        (XReal::Finite(_), XReal::PosInf) => Ok(XReal::NegInf),
        (XReal::Finite(a), XReal::Finite(b)) => Ok(XReal::Finite(a - b)),
    }
}

/// Extended addition, absorbing at each infinity. Adding opposite
/// infinities is a logic error.
pub fn xadd(a: XReal, b: XReal) -> Result<XReal> {
    match (a, b) {
        (XReal::PosInf, XReal::NegInf) | (XReal::NegInf, XReal::PosInf) => Err(Error::MixedInfinity),
        (XReal::NegInf, _) | (_, XReal::NegInf) => Ok(XReal::NegInf),
        (XReal::PosInf, _) | (_, XReal::PosInf) => Ok(XReal::PosInf),
        (XReal::Finite(x), XReal::Finite(y)) => Ok(XReal::Finite(x + y)),
    }
}

// JSON: finite values are numbers, infinities are the strings "inf"/"-inf".

impl Serialize for XReal {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            XReal::NegInf => serializer.serialize_str("-inf"),
            XReal::PosInf => serializer.serialize_str("inf"),
            XReal::Finite(v) => serializer.serialize_f64(*v),
        }
    }
}

struct XRealVisitor;

impl<'de> Visitor<'de> for XRealVisitor {
    type Value = XReal;

    fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
        f.write_str("a number, \"inf\" or \"-inf\"")
    }

    fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<XReal, E> {
        XReal::new(v).map_err(E::custom)
    }

    fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<XReal, E> {
        Ok(XReal::Finite(v as f64))
    }

    fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<XReal, E> {
        Ok(XReal::Finite(v as f64))
    }

    fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<XReal, E> {
        match v {
            "inf" | "+inf" => Ok(XReal::PosInf),
            "-inf" => Ok(XReal::NegInf),
            other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
        }
    }
}

impl<'de> Deserialize<'de> for XReal {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<XReal, D::Error> {
        deserializer.deserialize_any(XRealVisitor)
    }
}
