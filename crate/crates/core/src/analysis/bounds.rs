use serde::Serialize;

use super::{certify, BoundTable, Certificate, CycleWitness, MonotoneVerdict};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::numerics::XReal;
use crate::relax::{longest_walks, Labels, Seed};

/// Result of a walk-supremum query.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum WalkBound {
    /// The supremum, with a walk attaining it (`None` when it is `-inf`).
    Value { value: XReal, walk: Option<Vec<usize>> },
    /// A positive cycle makes the supremum `+inf`.
    Unbounded { positive_cycle: CycleWitness },
}

impl WalkBound {
    pub fn value(&self) -> Option<XReal> {
        match self {
            WalkBound::Value { value, .. } => Some(*value),
            WalkBound::Unbounded { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PathBoundedness {
    pub bounded: bool,
    #[serde(flatten)]
    pub verdict: MonotoneVerdict,
    /// The walk bounds `M(i, j)`, present when `bounded`.
    #[serde(rename = "M")]
    pub table: Option<Vec<Vec<XReal>>>,
}

/// Longest walks out of `source`. The slack is first shrunk well below the
/// certified one so the attained walks are (near) exact maximizers; if that
/// exposes a marginal cycle the certified slack is used instead.
pub(crate) fn walks_from(
    inst: &Instance,
    source: usize,
    min_edges: u8,
    slack: f64,
) -> std::result::Result<Labels, CycleWitness> {
    let n = inst.len();
    let weight = |i: usize, j: usize| inst.alpha_weight(i, j);
    let tol = inst.tolerance();
    let mut last = None;
    for s in [slack / 1024.0, slack] {
        match longest_walks(n, weight, Seed::From { source, min_edges }, s) {
            Ok(labels) => return Ok(labels),
            Err(cycle) => {
                let sum = inst.cycle_sum(&cycle).finite().expect("cycle edges are finite");
                let witness = CycleWitness { cycle, sum };
                if sum > tol {
                    return Err(witness);
                }
                last = Some(witness);
            }
        }
    }
    Err(last.expect("loop ran"))
}

fn bound_to(inst: &Instance, labels: &Labels, j: usize) -> WalkBound {
    match labels.walk_to(j) {
        Some(walk) => WalkBound::Value {
            value: inst.walk_sum(&walk),
            walk: Some(walk),
        },
        None => WalkBound::Value {
            value: XReal::NegInf,
            walk: None,
        },
    }
}

/// Supremum of alpha-sums over walks `i -> j` with at least `min_edges`
/// edges.
///
/// On a set without positive cycles the supremum is attained on a walk of
/// at most `n` edges and is found by a longest-walk search; the reported
/// value is the exact alpha-sum of the attaining walk. `-inf` means no walk
/// of finite cost exists.
pub fn sup_walk(inst: &Instance, i: usize, j: usize, min_edges: u8) -> Result<WalkBound> {
    inst.check_index(i)?;
    inst.check_index(j)?;
    if !(1..=2).contains(&min_edges) {
        return Err(Error::MinEdges(min_edges));
    }
    let cert = certify(inst);
    if let Err(w) = cert.outcome {
        return Ok(WalkBound::Unbounded { positive_cycle: w });
    }
    Ok(match walks_from(inst, i, min_edges, cert.slack) {
        Ok(labels) => bound_to(inst, &labels, j),
        Err(w) => WalkBound::Unbounded { positive_cycle: w },
    })
}

/// The full table `a(i, j) = sup_walk(i, j, 1)`. It dominates the single
/// edge weights and is superadditive along walks. Fails with a positive
/// cycle when the set is not cyclically monotone.
pub fn closure_weights(inst: &Instance) -> std::result::Result<BoundTable, CycleWitness> {
    closure_with(inst, &certify(inst))
}

fn closure_with(inst: &Instance, cert: &Certificate) -> std::result::Result<BoundTable, CycleWitness> {
    if let Err(w) = &cert.outcome {
        return Err(w.clone());
    }
    let n = inst.len();
    let mut m = Vec::with_capacity(n);
    for i in 0..n {
        let labels = walks_from(inst, i, 1, cert.slack)?;
        m.push(
            (0..n)
                .map(|j| bound_to(inst, &labels, j).value().expect("bounded"))
                .collect(),
        );
    }
    Ok(BoundTable { m })
}

/// On finite sets path-boundedness coincides with cyclic monotonicity:
/// without positive cycles every walk supremum is attained on a simple
/// path. The bound table is returned as the certificate.
pub fn is_path_bounded(inst: &Instance) -> PathBoundedness {
    let cert = certify(inst);
    let marginal = cert.marginal;
    match closure_with(inst, &cert) {
        Ok(table) => PathBoundedness {
            bounded: true,
            verdict: MonotoneVerdict {
                monotone: true,
                witness: None,
                marginal,
            },
            table: Some(table.m),
        },
        Err(w) => PathBoundedness {
            bounded: false,
            verdict: MonotoneVerdict {
                monotone: false,
                witness: Some(w),
                marginal,
            },
            table: None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costs::{CostSpec, Point};

    fn scalar(cost: CostSpec, pairs: &[(f64, f64)]) -> Instance {
        let pairs = pairs
            .iter()
            .map(|&(x, y)| (Point::scalar(x), Point::scalar(y)))
            .collect();
        Instance::from_points(cost, pairs, 1e-9).unwrap()
    }

    #[test]
    fn bilinear_pair_bounds() {
        let inst = scalar(CostSpec::Bilinear, &[(0.0, 0.0), (1.0, 1.0)]);
        let b = sup_walk(&inst, 0, 1, 1).unwrap();
        assert_eq!(b.value(), Some(XReal::Finite(0.0)));
        // closed walks: self-loops give 0, the 2-cycle gives -1
        let table = closure_weights(&inst).unwrap();
        let f = XReal::Finite;
        assert_eq!(table.m, vec![vec![f(0.0), f(0.0)], vec![f(-1.0), f(0.0)]]);
    }

    #[test]
    fn polar_pair_has_no_walk_back() {
        let inst = scalar(CostSpec::Polar, &[(0.75, 1.5), (1.5, 0.75)]);
        let b = sup_walk(&inst, 1, 0, 1).unwrap();
        assert_eq!(
            b,
            WalkBound::Value {
                value: XReal::NegInf,
                walk: None
            }
        );
        let fwd = sup_walk(&inst, 0, 1, 1).unwrap().value().unwrap().finite().unwrap();
        assert!((fwd - 10f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn closed_walks_are_nonpositive() {
        let inst = scalar(CostSpec::Bilinear, &[(0.0, 0.0), (1.0, 2.0), (2.0, 3.0)]);
        for i in 0..3 {
            let v = sup_walk(&inst, i, i, 1).unwrap().value().unwrap();
            assert!(v <= XReal::ZERO);
        }
    }

    #[test]
    fn two_edge_walks() {
        let inst = scalar(CostSpec::Bilinear, &[(0.0, 0.0), (1.0, 1.0)]);
        // padding with a zero self-loop keeps the one-edge optimum
        for (i, j) in [(0, 1), (1, 0), (0, 0)] {
            assert_eq!(
                sup_walk(&inst, i, j, 2).unwrap().value(),
                sup_walk(&inst, i, j, 1).unwrap().value()
            );
        }
        let w = sup_walk(&inst, 1, 0, 2).unwrap();
        if let WalkBound::Value { walk: Some(walk), .. } = w {
            assert!(walk.len() >= 3);
        } else {
            panic!("expected a walk");
        }
    }

    #[test]
    fn unbounded_on_positive_cycle() {
        let inst = scalar(CostSpec::Bilinear, &[(0.0, 1.0), (1.0, 0.0)]);
        match sup_walk(&inst, 0, 1, 1).unwrap() {
            WalkBound::Unbounded { positive_cycle } => assert_eq!(positive_cycle.cycle, vec![0, 1]),
            other => panic!("expected unbounded, got {other:?}"),
        }
        let pb = is_path_bounded(&inst);
        assert!(!pb.bounded);
        assert!(pb.table.is_none());
    }

    #[test]
    fn argument_errors() {
        let inst = scalar(CostSpec::Bilinear, &[(0.0, 0.0)]);
        assert_eq!(sup_walk(&inst, 0, 0, 3), Err(Error::MinEdges(3)));
        assert!(sup_walk(&inst, 0, 1, 1).is_err());
    }

    #[test]
    fn empty_instance_is_path_bounded() {
        let inst = scalar(CostSpec::Bilinear, &[]);
        let pb = is_path_bounded(&inst);
        assert!(pb.bounded);
        assert_eq!(pb.table, Some(vec![]));
    }
}
