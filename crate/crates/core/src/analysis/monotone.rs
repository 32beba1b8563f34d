use itertools::Itertools;

use super::{CycleWitness, MonotoneVerdict};
use crate::costs::CostSpec;
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::relax::{longest_walks, rotate_to_min, Seed};

/// Largest instance accepted by [`brute_force_monotone`].
pub const BRUTE_FORCE_LIMIT: usize = 8;

/// Outcome of the shared positive-cycle search.
#[derive(Clone, Debug)]
pub(crate) struct Certificate {
    /// Per-edge slack under which the labels converged (or the cycle was found).
    pub slack: f64,
    /// Longest-walk labels per distinct x, or a positive cycle over pairs.
    pub outcome: std::result::Result<Vec<f64>, CycleWitness>,
    pub marginal: bool,
}

/// The alpha-graph collapsed onto distinct x values. Pairs sharing an x
/// have `alpha = 0` in both directions, and `alpha(i, j)` depends on `j`
/// only through `x_j`, so the edge `p -> q` carries the largest
/// `alpha(i, rep(q))` over pairs `i` with x number `p`.
struct XGraph<'a> {
    inst: &'a Instance,
    members: Vec<Vec<usize>>,
}

impl<'a> XGraph<'a> {
    fn new(inst: &'a Instance) -> Self {
        let mut members = vec![Vec::new(); inst.num_x()];
        for i in 0..inst.len() {
            members[inst.x_class(i)].push(i);
        }
        XGraph { inst, members }
    }

    fn len(&self) -> usize {
        self.members.len()
    }

    /// Best realizing pair and weight of the edge `p -> q`.
    fn edge(&self, p: usize, q: usize) -> Option<(usize, f64)> {
        if p == q {
            return Some((self.members[p][0], 0.0));
        }
        let target = self.inst.x_rep(q);
        let mut best: Option<(usize, f64)> = None;
        for &i in &self.members[p] {
            if let Some(a) = self.inst.alpha_weight(i, target) {
                if best.is_none_or(|(_, b)| a > b) {
                    best = Some((i, a));
                }
            }
        }
        best
    }

    /// Lifts a cycle over x numbers to a cycle over pairs with the same sum.
    fn lift(&self, cycle: &[usize]) -> Vec<usize> {
        let k = cycle.len();
        let pairs = (0..k)
            .map(|t| self.edge(cycle[t], cycle[(t + 1) % k]).expect("cycle edge exists").0)
            .collect();
        rotate_to_min(pairs)
    }
}

/// Positive-cycle search shared by the monotonicity check and the
/// potential solver.
///
/// Edges are perturbed to `alpha - slack` with `slack = tol / |P_X G|`, so a
/// simple cycle with alpha-sum above `tol` is always positive and one with
/// sum `<= 0` never is. A cycle found with sum in `(0, tol]` is marginal;
/// the search is then repeated with `slack = tol`, whose labels still satisfy
/// every constraint within `tol`.
pub(crate) fn certify(inst: &Instance) -> Certificate {
    let tol = inst.tolerance();
    let graph = XGraph::new(inst);
    let n = graph.len();
    let weight = |p: usize, q: usize| graph.edge(p, q).map(|(_, a)| a);
    let first = tol / n.max(1) as f64;
    let mut marginal = false;
    for slack in [first, tol] {
        match longest_walks(n, weight, Seed::AllZero, slack) {
            Ok(labels) => {
                let values = labels.value.into_iter().map(|v| v.unwrap_or(0.0)).collect();
                return Certificate {
                    slack,
                    outcome: Ok(values),
                    marginal,
                };
            }
            Err(cycle) => {
                let pairs = graph.lift(&cycle);
                let sum = inst.cycle_sum(&pairs).finite().expect("cycle edges are finite");
                if sum > tol || slack == tol {
                    return Certificate {
                        slack,
                        outcome: Err(CycleWitness { cycle: pairs, sum }),
                        marginal,
                    };
                }
                log::warn!(
                    "marginal cycle {:?} with alpha-sum {sum:e} <= tolerance {tol:e}; treated as nonpositive",
                    pairs
                );
                marginal = true;
            }
        }
    }
    unreachable!("the second pass always returns")
}

/// Decides cyclic monotonicity by searching the alpha-graph for a cycle
/// of positive weight.
pub fn is_cyclically_monotone(inst: &Instance) -> MonotoneVerdict {
    let cert = certify(inst);
    match cert.outcome {
        Ok(_) => MonotoneVerdict {
            monotone: true,
            witness: None,
            marginal: cert.marginal,
        },
        Err(w) => MonotoneVerdict {
            monotone: false,
            witness: Some(w),
            marginal: cert.marginal,
        },
    }
}

/// Exhaustive check of `sum c(x_i, y_i) <= sum c(x_i, y_sigma(i))` over every
/// permutation. Permutations of a sub-selection are the permutations of
/// the whole set fixing the remaining pairs, so enumerating `S_n` covers
/// every subset. Infinite right-hand sides make the inequality vacuous.
pub fn brute_force_monotone(inst: &Instance, max_m: usize) -> Result<bool> {
    let limit = max_m.min(BRUTE_FORCE_LIMIT);
    let n = inst.len();
    if n > limit {
        return Err(Error::TooLarge { size: n, limit });
    }
    let tol = inst.tolerance();
    let identity: f64 = inst.diagonal().iter().sum();
    'perm: for sigma in (0..n).permutations(n) {
        let mut crossed = 0.0;
        for (i, &s) in sigma.iter().enumerate() {
            match inst.cost(i, s).finite() {
                Some(c) => crossed += c,
                None => continue 'perm,
            }
        }
        if identity - crossed > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// For the one-dimensional polar cost on positive points, cyclic
/// monotonicity is equivalent to `(x1 - x2)(y1 - y2) <= 0` for every two
/// pairs, i.e. `G` lies on the graph of a decreasing relation.
pub fn antitone_check(inst: &Instance) -> Result<bool> {
    if *inst.cost_spec() != CostSpec::Polar {
        return Err(Error::WrongKernel(inst.cost_spec().name()));
    }
    let mut coords = Vec::with_capacity(inst.len());
    for i in 0..inst.len() {
        let (x, y) = inst.pair(i).expect("polar instances carry points");
        let (x, y) = (x.coords()[0], y.coords()[0]);
        if x <= 0.0 || y <= 0.0 {
            return Err(Error::NonPositivePoint(inst.source_index(i)));
        }
        coords.push((x, y));
    }
    let tol = inst.tolerance();
    Ok(coords
        .iter()
        .tuple_combinations()
        .all(|(a, b)| (a.0 - b.0) * (a.1 - b.1) <= tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::costs::Point;
    use crate::numerics::XReal;

    fn bilinear(pairs: &[(f64, f64)]) -> Instance {
        let pairs = pairs
            .iter()
            .map(|&(x, y)| (Point::scalar(x), Point::scalar(y)))
            .collect();
        Instance::from_points(CostSpec::Bilinear, pairs, 1e-9).unwrap()
    }

    fn polar(pairs: &[(f64, f64)]) -> Instance {
        let pairs = pairs
            .iter()
            .map(|&(x, y)| (Point::scalar(x), Point::scalar(y)))
            .collect();
        Instance::from_points(CostSpec::Polar, pairs, 1e-9).unwrap()
    }

    #[test]
    fn bilinear_sorted_pair_is_monotone() {
        let inst = bilinear(&[(0.0, 0.0), (1.0, 1.0)]);
        let v = is_cyclically_monotone(&inst);
        assert!(v.monotone);
        assert!(v.witness.is_none());
        assert_eq!(inst.cycle_sum(&[0, 1]), XReal::Finite(-1.0));
        assert!(brute_force_monotone(&inst, 6).unwrap());
    }

    #[test]
    fn bilinear_swapped_pair_is_not_monotone() {
        let inst = bilinear(&[(0.0, 1.0), (1.0, 0.0)]);
        let v = is_cyclically_monotone(&inst);
        assert!(!v.monotone);
        let w = v.witness.unwrap();
        assert_eq!(w.cycle, vec![0, 1]);
        assert_eq!(w.sum, 1.0);
        assert!(!brute_force_monotone(&inst, 6).unwrap());
    }

    #[test]
    fn singleton_and_empty_are_monotone() {
        for inst in [bilinear(&[(3.0, -2.0)]), bilinear(&[])] {
            assert!(is_cyclically_monotone(&inst).monotone);
            assert!(brute_force_monotone(&inst, 6).unwrap());
        }
    }

    #[test]
    fn antitone_polar_pair() {
        let inst = polar(&[(0.75, 1.5), (1.5, 0.75)]);
        assert!(is_cyclically_monotone(&inst).monotone);
        assert!(brute_force_monotone(&inst, 6).unwrap());
        assert!(antitone_check(&inst).unwrap());
    }

    #[test]
    fn increasing_polar_pair() {
        let inst = polar(&[(2.0, 1.0), (3.0, 2.0)]);
        assert!(!antitone_check(&inst).unwrap());
        assert!(!is_cyclically_monotone(&inst).monotone);
        assert!(!brute_force_monotone(&inst, 6).unwrap());
        assert!(antitone_check(&polar(&[(2.0, 1.0)])).unwrap());
    }

    #[test]
    fn duplicated_pairs_are_monotone() {
        let inst =
            Instance::from_matrix(vec![vec![1.0.into(), 1.0.into()], vec![1.0.into(), 1.0.into()]], 1e-9).unwrap();
        assert!(brute_force_monotone(&inst, 6).unwrap());
        assert!(is_cyclically_monotone(&inst).monotone);
    }

    #[test]
    fn shared_x_collapses_consistently() {
        // (0, 5) and (0, -5) share x; the third pair is placed to make a
        // positive cycle only through the second one.
        let inst = bilinear(&[(0.0, 5.0), (0.0, -5.0), (1.0, -1.0)]);
        let v = is_cyclically_monotone(&inst);
        assert_eq!(v.monotone, brute_force_monotone(&inst, 6).unwrap());
        if let Some(w) = v.witness {
            let s = inst.cycle_sum(&w.cycle).finite().unwrap();
            assert_eq!(s, w.sum);
            assert!(s > 1e-9);
        }
    }

    #[test]
    fn brute_force_rejects_large_instances() {
        let pairs: Vec<(f64, f64)> = (0..9).map(|k| (k as f64, k as f64)).collect();
        let inst = bilinear(&pairs);
        assert_eq!(
            brute_force_monotone(&inst, 8),
            Err(Error::TooLarge { size: 9, limit: 8 })
        );
        assert_eq!(
            brute_force_monotone(&inst, 20),
            Err(Error::TooLarge { size: 9, limit: 8 })
        );
    }

    #[test]
    fn antitone_requires_polar() {
        assert!(matches!(
            antitone_check(&bilinear(&[(1.0, 1.0)])),
            Err(Error::WrongKernel(_))
        ));
        assert_eq!(antitone_check(&polar(&[(-2.0, -3.0)])), Err(Error::NonPositivePoint(0)));
    }

    #[test]
    fn marginal_cycles_are_tolerated() {
        // 2-cycle 0 <-> 1 with alpha-sum 9e-10, inside the default tolerance
        let m = |v: f64| XReal::Finite(v);
        let rows = vec![
            vec![m(0.0), m(0.0), m(10.0)],
            vec![m(-9e-10), m(0.0), m(10.0)],
            vec![m(10.0), m(10.0), m(0.0)],
        ];
        let inst = Instance::from_matrix(rows, 1e-9).unwrap();
        assert!((inst.cycle_sum(&[0, 1]).finite().unwrap() - 9e-10).abs() < 1e-20);
        let v = is_cyclically_monotone(&inst);
        assert!(v.monotone);
        assert!(v.marginal);
        assert!(brute_force_monotone(&inst, 6).unwrap());
        let strict = inst.clone().with_tolerance(1e-10).unwrap();
        let v = is_cyclically_monotone(&strict);
        assert!(!v.monotone && !v.marginal);
        assert_eq!(v.witness.unwrap().cycle, vec![0, 1]);
    }
}
