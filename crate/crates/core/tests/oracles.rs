//! Library results checked against independent reference computations.

#![allow(clippy::needless_range_loop)]

mod common;

use common::*;
use otpb::analysis::{closure_weights, equivalence_classes, is_cyclically_monotone, sup_walk, WalkBound};
use otpb::potential::{constraint_violation, solve_potential};
use otpb::{Instance, XReal};
use proptest::prelude::*;

fn raw_alpha(inst: &Instance, i: usize, j: usize) -> Option<f64> {
    if i == j {
        return Some(0.0);
    }
    match inst.cost(j, i) {
        XReal::Finite(c) => Some(inst.diag(i) - c),
        _ => None,
    }
}

/// Best alpha-sum over every walk `i -> j` with between 1 and `max_len`
/// edges, by max-plus products over walk length.
fn walk_oracle(inst: &Instance, max_len: usize) -> Vec<Vec<Option<f64>>> {
    let n = inst.len();
    let mut best = vec![vec![None::<f64>; n]; n];
    for s in 0..n {
        let mut layer: Vec<Option<f64>> = (0..n).map(|v| raw_alpha(inst, s, v)).collect();
        for _ in 0..max_len {
            for v in 0..n {
                if let Some(x) = layer[v] {
                    best[s][v] = Some(best[s][v].map_or(x, |b: f64| b.max(x)));
                }
            }
            let mut next = vec![None::<f64>; n];
            for u in 0..n {
                let Some(lu) = layer[u] else { continue };
                for v in 0..n {
                    if let Some(a) = raw_alpha(inst, u, v) {
                        let cand = lu + a;
                        next[v] = Some(next[v].map_or(cand, |b: f64| b.max(cand)));
                    }
                }
            }
            layer = next;
        }
    }
    best
}

/// Exhaustive assignment check written independently of the library.
fn permutation_oracle(inst: &Instance) -> bool {
    fn rec(inst: &Instance, i: usize, used: &mut Vec<bool>, acc: f64, identity: f64) -> bool {
        let n = inst.len();
        if i == n {
            return identity - acc <= inst.tolerance();
        }
        for s in 0..n {
            if used[s] {
                continue;
            }
            if let XReal::Finite(c) = inst.cost(i, s) {
                used[s] = true;
                let ok = rec(inst, i + 1, used, acc + c, identity);
                used[s] = false;
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    let identity: f64 = (0..inst.len()).map(|i| inst.diag(i)).sum();
    rec(inst, 0, &mut vec![false; inst.len()], 0.0, identity)
}

#[test]
fn sup_walk_matches_walk_enumeration() {
    for inst in corpus(11, 240, 5) {
        let n = inst.len();
        let verdict = is_cyclically_monotone(&inst);
        let oracle = walk_oracle(&inst, 2 * n);
        for i in 0..n {
            for j in 0..n {
                let got = sup_walk(&inst, i, j, 1).unwrap();
                match (&got, verdict.monotone) {
                    (WalkBound::Value { value, .. }, true) => match oracle[i][j] {
                        Some(o) => {
                            let v = value.finite().expect("finite when a walk exists");
                            assert!((v - o).abs() <= 1e-9, "sup_walk({i},{j}) = {v}, oracle {o}");
                        }
                        None => assert_eq!(*value, XReal::NegInf),
                    },
                    (WalkBound::Unbounded { positive_cycle }, false) => {
                        let k = positive_cycle.cycle.len();
                        let sum: f64 = (0..k)
                            .map(|t| {
                                raw_alpha(&inst, positive_cycle.cycle[t], positive_cycle.cycle[(t + 1) % k]).unwrap()
                            })
                            .sum();
                        assert!(sum > inst.tolerance());
                    }
                    other => panic!("verdict and walk bound disagree: {other:?}"),
                }
            }
        }
    }
}

#[test]
fn walk_values_are_attained() {
    for inst in corpus(12, 90, 5) {
        if !is_cyclically_monotone(&inst).monotone {
            continue;
        }
        for i in 0..inst.len() {
            for j in 0..inst.len() {
                if let WalkBound::Value {
                    value,
                    walk: Some(walk),
                } = sup_walk(&inst, i, j, 2).unwrap()
                {
                    assert!(walk.len() >= 3);
                    assert_eq!((walk[0], *walk.last().unwrap()), (i, j));
                    let sum: f64 = walk.windows(2).map(|e| raw_alpha(&inst, e[0], e[1]).unwrap()).sum();
                    assert!((sum - value.finite().unwrap()).abs() <= 1e-9);
                }
            }
        }
    }
}

#[test]
fn monotonicity_matches_assignment_oracle() {
    for inst in corpus(13, 300, 6) {
        assert_eq!(is_cyclically_monotone(&inst).monotone, permutation_oracle(&inst));
    }
}

#[test]
fn potential_bounds_every_walk() {
    for inst in corpus(14, 150, 6) {
        let Ok(phi) = solve_potential(&inst).potential().cloned() else {
            continue;
        };
        let table = closure_weights(&inst).unwrap();
        let slack = inst.tolerance() * inst.len() as f64;
        for i in 0..inst.len() {
            for j in 0..inst.len() {
                if let Some(a) = table.get(i, j).finite() {
                    assert!(a <= phi.at_pair(i) - phi.at_pair(j) + slack);
                }
            }
        }
    }
}

#[test]
fn class_certificates_dominate_walks() {
    for inst in corpus(15, 150, 6) {
        if !is_cyclically_monotone(&inst).monotone {
            continue;
        }
        let classes = equivalence_classes(&inst);
        for cert in &classes.certificates {
            let bound = cert.bound.finite().expect("finite inside a class");
            let sup = sup_walk(&inst, cert.from, cert.to, 1).unwrap().value().unwrap();
            assert!(sup.finite().unwrap() <= bound + 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closure_dominates_edges_and_is_superadditive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = random_bilinear(&mut r, 6);
        if let Ok(table) = closure_weights(&inst) {
            let n = inst.len();
            for i in 0..n {
                for j in 0..n {
                    if let Some(a) = raw_alpha(&inst, i, j) {
                        prop_assert!(table.get(i, j).finite().unwrap() >= a - 1e-9);
                    }
                    for k in 0..n {
                        if let (Some(a), Some(b), Some(c)) =
                            (table.get(i, j).finite(), table.get(j, k).finite(), table.get(i, k).finite())
                        {
                            prop_assert!(c >= a + b - 1e-9);
                        }
                    }
                }
                prop_assert!(table.get(i, i) <= XReal::Finite(1e-9));
            }
        }
    }

    #[test]
    fn feasible_exactly_when_monotone(seed in any::<u64>()) {
        let mut r = rng(seed);
        let inst = random_matrix(&mut r, 6);
        let result = solve_potential(&inst);
        prop_assert_eq!(result.is_feasible(), is_cyclically_monotone(&inst).monotone);
        if let Ok(phi) = result.potential() {
            prop_assert!(constraint_violation(&inst, phi) <= 1e-9);
            prop_assert_eq!(phi.values.iter().copied().fold(f64::MIN, f64::max), 0.0);
        }
    }

    #[test]
    fn shared_x_gets_one_value(seed in any::<u64>(), dy in 0.01f64..1.0) {
        let mut r = rng(seed);
        let base = random_polar(&mut r, 5);
        let (x, y) = base.pair(0).unwrap();
        let (x, y) = (x.coords()[0], y.coords()[0]);
        let mut pairs: Vec<(f64, f64)> =
            (0..base.len()).map(|i| { let (a, b) = base.pair(i).unwrap(); (a.coords()[0], b.coords()[0]) }).collect();
        pairs.push((x, y + dy));
        let inst = scalar_instance(otpb::CostSpec::Polar, &pairs);
        if let Ok(phi) = solve_potential(&inst).potential() {
            prop_assert_eq!(phi.at_pair(0), phi.at_pair(inst.len() - 1));
            prop_assert_eq!(phi.num_x(), inst.len() - 1);
        }
    }
}
