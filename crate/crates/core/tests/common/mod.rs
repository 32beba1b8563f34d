#![allow(dead_code)]

use std::collections::BTreeSet;

use otpb::decomposition::{Edge, Rational, WeightedDag};
use otpb::{CostSpec, Instance, Point, XReal};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type Rng8 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng8 {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn scalar_instance(cost: CostSpec, pairs: &[(f64, f64)]) -> Instance {
    let pairs = pairs
        .iter()
        .map(|&(x, y)| (Point::scalar(x), Point::scalar(y)))
        .collect();
    Instance::from_points(cost, pairs, 1e-9).unwrap()
}

/// Bilinear instance in dimension 1 or 2; sometimes sorted (monotone),
/// sometimes on an integer lattice so that zero-sum cycles occur exactly.
pub fn random_bilinear(rng: &mut Rng8, max_len: usize) -> Instance {
    let n = rng.gen_range(1..=max_len);
    let d = rng.gen_range(1..=2);
    let lattice = rng.gen_bool(0.3);
    let coord = |rng: &mut Rng8| {
        if lattice {
            rng.gen_range(-2..=2) as f64
        } else {
            rng.gen_range(-3.0..3.0)
        }
    };
    let mut pairs: Vec<(Vec<f64>, Vec<f64>)> = (0..n)
        .map(|_| {
            (
                (0..d).map(|_| coord(rng)).collect(),
                (0..d).map(|_| coord(rng)).collect(),
            )
        })
        .collect();
    if d == 1 && rng.gen_bool(0.4) {
        let mut xs: Vec<f64> = pairs.iter().map(|p| p.0[0]).collect();
        let mut ys: Vec<f64> = pairs.iter().map(|p| p.1[0]).collect();
        xs.sort_by(f64::total_cmp);
        ys.sort_by(f64::total_cmp);
        pairs = xs.into_iter().zip(ys).map(|(x, y)| (vec![x], vec![y])).collect();
    }
    let pairs = pairs.into_iter().map(|(x, y)| (Point(x), Point(y))).collect();
    Instance::from_points(CostSpec::Bilinear, pairs, 1e-9).unwrap()
}

/// Polar pairs with coordinates in `(0.1, 5)` and `xy > 1`; sometimes
/// rearranged to be antitone.
pub fn random_polar(rng: &mut Rng8, max_len: usize) -> Instance {
    let n = rng.gen_range(1..=max_len);
    let mut pairs = Vec::with_capacity(n);
    while pairs.len() < n {
        let (x, y): (f64, f64) = (rng.gen_range(0.1..5.0), rng.gen_range(0.1..5.0));
        if x * y > 1.0 {
            pairs.push((x, y));
        }
    }
    if rng.gen_bool(0.4) {
        let mut xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        xs.sort_by(f64::total_cmp);
        ys.sort_by(|a, b| b.total_cmp(a));
        let candidate: Vec<(f64, f64)> = xs.into_iter().zip(ys).collect();
        if candidate.iter().all(|&(x, y)| x * y > 1.0) {
            pairs = candidate;
        }
    }
    scalar_instance(CostSpec::Polar, &pairs)
}

/// Square cost table with roughly a fifth of the off-diagonal entries
/// `+inf`; half of the tables are built from potentials and so monotone.
pub fn random_matrix(rng: &mut Rng8, max_len: usize) -> Instance {
    let n = rng.gen_range(1..=max_len);
    let structured = rng.gen_bool(0.5);
    let phi: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let psi: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let rows = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        XReal::Finite(if structured {
                            phi[i] + psi[j]
                        } else {
                            rng.gen_range(-2.0..2.0)
                        })
                    } else if rng.gen_bool(0.2) {
                        XReal::PosInf
                    } else if structured {
                        XReal::Finite(phi[i] + psi[j] + rng.gen_range(0.0..1.0))
                    } else {
                        XReal::Finite(rng.gen_range(-2.0..2.0))
                    }
                })
                .collect()
        })
        .collect();
    Instance::from_matrix(rows, 1e-9).unwrap()
}

/// The mixed corpus: bilinear, polar and matrix instances in turn.
pub fn corpus(seed: u64, count: usize, max_len: usize) -> Vec<Instance> {
    let mut rng = rng(seed);
    (0..count)
        .map(|k| match k % 3 {
            0 => random_bilinear(&mut rng, max_len),
            1 => random_polar(&mut rng, max_len),
            _ => random_matrix(&mut rng, max_len),
        })
        .collect()
}

/// DAG on up to `max_n` vertices, edges oriented along a random order,
/// weights `p/q` with `q <= 16`.
pub fn random_dag(rng: &mut Rng8, max_n: usize, max_edges: usize) -> WeightedDag {
    let n = rng.gen_range(2..=max_n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let target = rng.gen_range(0..=max_edges.min(n * (n - 1) / 2));
    let mut seen = BTreeSet::new();
    let mut edges = Vec::new();
    for _ in 0..4 * max_edges {
        if edges.len() == target {
            break;
        }
        let a = rng.gen_range(0..n);
        let b = rng.gen_range(0..n);
        if a == b {
            continue;
        }
        let (from, to) = (order[a.min(b)], order[a.max(b)]);
        if seen.insert((from, to)) {
            let w = Rational::new(rng.gen_range(1..=40), rng.gen_range(1..=16));
            edges.push(Edge { from, to, w });
        }
    }
    WeightedDag {
        n,
        edges,
        epsilon: None,
    }
}
