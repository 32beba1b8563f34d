use serde::{Deserialize, Serialize};

use super::bounds::walks_from;
use super::monotone::certify;
use crate::costs::{CostSpec, Point};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::numerics::{XReal, DEFAULT_TOLERANCE};

pub const DEFAULT_DIVERGENCE_THRESHOLD: f64 = 1e3;

const POLAR_SEGMENT: &str = "polar-segment";
/// Largest decimal resolution whose sample `1 - 10^-k` is still below 1.
const MAX_DECIMAL_RESOLUTION: usize = 15;

/// How a resolution is turned into sample points of the segment
/// `{(x, 3 - 2x) : 3/4 <= x < 1}`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sampling {
    /// `n` equispaced points `x_m = 3/4 + m / (4n)`, `m = 0..n`.
    #[default]
    Uniform,
    /// Resolution `k` samples the single point `t = 1 - 10^-k` next to the
    /// left end `x = 3/4`.
    Decimal,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub name: String,
    pub sampling: Sampling,
    /// Endpoints `(x, y)`, `(z, w)` of the walk bound, matched exactly.
    pub endpoints: ((f64, f64), (f64, f64)),
    pub threshold: f64,
    pub tolerance: f64,
}

impl FamilySpec {
    pub fn new(name: impl Into<String>) -> Self {
        FamilySpec {
            name: name.into(),
            sampling: Sampling::Uniform,
            endpoints: ((0.75, 1.5), (1.5, 0.75)),
            threshold: DEFAULT_DIVERGENCE_THRESHOLD,
            tolerance: DEFAULT_TOLERANCE,
        }
    }

    pub fn sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyRow {
    pub n: usize,
    /// Number of pairs in the sub-instance.
    pub size: usize,
    /// `+inf` when the sub-instance has a positive cycle.
    #[serde(rename = "M")]
    pub m: XReal,
    /// `M(n) - M(previous n)`, when both are finite.
    #[serde(rename = "delta")]
    pub delta: Option<f64>,
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FamilyReport {
    pub family: String,
    pub sampling: Sampling,
    pub endpoints: [[f64; 2]; 2],
    pub threshold: f64,
    pub rows: Vec<FamilyRow>,
    /// Growth across every resolution with the last value above the
    /// threshold. Evidence of an unbounded limit set, not a proof.
    pub divergence: bool,
}

/// The finite sub-instance of a family at one resolution. The distinguished
/// point `(3/2, 3/4)` is always the last pair.
pub fn family_instance(spec: &FamilySpec, resolution: usize) -> Result<Instance> {
    if spec.name != POLAR_SEGMENT {
        return Err(Error::UnknownFamily(spec.name.clone()));
    }
    if resolution == 0 {
        return Err(Error::FamilyParams("resolutions must be positive".into()));
    }
    let xs: Vec<f64> = match spec.sampling {
        Sampling::Uniform => {
            let n = resolution as f64;
            (0..resolution).map(|m| (3.0 * n + m as f64) / (4.0 * n)).collect()
        }
        Sampling::Decimal => {
            if resolution > MAX_DECIMAL_RESOLUTION {
                return Err(Error::FamilyParams(format!(
                    "decimal resolution {resolution} exceeds {MAX_DECIMAL_RESOLUTION}; 1 - 10^-k rounds to 1"
                )));
            }
            vec![0.75, 1.0 - 10f64.powi(-(resolution as i32))]
        }
    };
    let mut pairs: Vec<(Point, Point)> = xs
        .into_iter()
        .map(|x| (Point::scalar(x), Point::scalar(3.0 - 2.0 * x)))
        .collect();
    pairs.push((Point::scalar(1.5), Point::scalar(0.75)));
    Instance::from_points(CostSpec::Polar, pairs, spec.tolerance)
}

fn locate(inst: &Instance, (x, y): (f64, f64)) -> Result<usize> {
    (0..inst.len())
        .find(|&i| {
            let (px, py) = inst.pair(i).expect("family instances carry points");
            px.coords() == [x] && py.coords() == [y]
        })
        .ok_or_else(|| Error::FamilyParams(format!("endpoint ({x}, {y}) is not a sample point")))
}

/// Walk bounds between the endpoints over a sequence of refinements.
pub fn family_diagnose(spec: &FamilySpec, resolutions: &[usize]) -> Result<FamilyReport> {
    if resolutions.is_empty() {
        return Err(Error::FamilyParams("no resolutions given".into()));
    }
    let mut rows: Vec<FamilyRow> = Vec::with_capacity(resolutions.len());
    for &n in resolutions {
        let inst = family_instance(spec, n)?;
        let from = locate(&inst, spec.endpoints.0)?;
        let to = locate(&inst, spec.endpoints.1)?;
        let cert = certify(&inst);
        let monotone = cert.outcome.is_ok();
        let m = if monotone {
            match walks_from(&inst, from, 1, cert.slack) {
                Ok(labels) => labels.walk_to(to).map_or(XReal::NegInf, |w| inst.walk_sum(&w)),
                Err(_) => XReal::PosInf,
            }
        } else {
            XReal::PosInf
        };
        let delta = match (rows.last().and_then(|r| r.m.finite()), m.finite()) {
            (Some(prev), Some(cur)) => Some(cur - prev),
            _ => None,
        };
        log::info!("{} n={n}: M = {m}", spec.name);
        rows.push(FamilyRow {
            n,
            size: inst.len(),
            m,
            delta,
            monotone,
        });
    }
    let increasing = rows.windows(2).all(|w| w[0].m < w[1].m);
    let last = rows.last().expect("nonempty").m;
    let divergence = increasing && last > XReal::Finite(spec.threshold);
    let ((x, y), (z, w)) = spec.endpoints;
    Ok(FamilyReport {
        family: spec.name.clone(),
        sampling: spec.sampling,
        endpoints: [[x, y], [z, w]],
        threshold: spec.threshold,
        rows,
        divergence,
    })
}
