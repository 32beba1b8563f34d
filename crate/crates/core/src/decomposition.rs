//! Path decompositions of nearly balanced weighted DAGs, in exact rational
//! arithmetic.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use petgraph::algo::toposort;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact rational, written `"p/q"` in JSON.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(pub BigRational);

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl FromStr for Rational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidGraph(format!("`{s}` is not a rational of the form p/q"));
        let (p, q) = s.trim().split_once('/').unwrap_or((s.trim(), "1"));
        let p: BigInt = p.trim().parse().map_err(|_| bad())?;
        let q: BigInt = q.trim().parse().map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        Ok(Rational(BigRational::new(p, q)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl std::ops::Add<&Rational> for &Rational {
    type Output = Rational;
    fn add(self, rhs: &Rational) -> Rational {
        Rational(&self.0 + &rhs.0)
    }
}

impl std::ops::Sub<&Rational> for &Rational {
    type Output = Rational;
    fn sub(self, rhs: &Rational) -> Rational {
        Rational(&self.0 - &rhs.0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub w: Rational,
}

/// A weighted directed graph on vertices `0..n`, with optional per-vertex
/// imbalance allowances.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightedDag {
    pub n: usize,
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub epsilon: Option<Vec<Rational>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedPath {
    pub vertices: Vec<usize>,
    pub mu: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PathDecomposition {
    pub paths: Vec<WeightedPath>,
}

impl WeightedDag {
    fn flows(&self) -> (Vec<Rational>, Vec<Rational>) {
        let mut inflow = vec![Rational::zero(); self.n];
        let mut outflow = vec![Rational::zero(); self.n];
        for e in &self.edges {
            if e.from < self.n && e.to < self.n {
                outflow[e.from] = &outflow[e.from] + &e.w;
                inflow[e.to] = &inflow[e.to] + &e.w;
            }
        }
        (inflow, outflow)
    }

    /// `epsilon`, or the exact imbalance `|in - out|` when it is absent.
    pub fn effective_epsilon(&self) -> Vec<Rational> {
        match &self.epsilon {
            Some(eps) => eps.clone(),
            None => {
                let (inflow, outflow) = self.flows();
                inflow
                    .iter()
                    .zip(&outflow)
                    .map(|(i, o)| Rational((&i.0 - &o.0).abs()))
                    .collect()
            }
        }
    }

    /// Checks indices, weights, acyclicity and the balance bound.
    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeMap::new();
        for e in &self.edges {
            if e.from >= self.n || e.to >= self.n {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) has an endpoint outside 0..{}",
                    e.from, e.to, self.n
                )));
            }
            if e.from == e.to {
                return Err(Error::InvalidGraph(format!("self-loop at vertex {}", e.from)));
            }
            if e.w.is_negative() {
                return Err(Error::InvalidGraph(format!(
                    "edge ({}, {}) has negative weight {}",
                    e.from, e.to, e.w
                )));
            }
            if seen.insert((e.from, e.to), ()).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate edge ({}, {})", e.from, e.to)));
            }
        }
        if let Some(eps) = &self.epsilon {
            if eps.len() != self.n {
                return Err(Error::InvalidGraph(format!(
                    "epsilon has {} entries for {} vertices",
                    eps.len(),
                    self.n
                )));
            }
            if let Some(v) = eps.iter().position(Rational::is_negative) {
                return Err(Error::InvalidGraph(format!("epsilon of vertex {v} is negative")));
            }
        }
        let mut g = DiGraph::<(), ()>::with_capacity(self.n, self.edges.len());
        let nodes: Vec<_> = (0..self.n).map(|_| g.add_node(())).collect();
        for e in self.edges.iter().filter(|e| !e.w.is_zero()) {
            g.add_edge(nodes[e.from], nodes[e.to], ());
        }
        if let Err(cycle) = toposort(&g, None) {
            return Err(Error::Cyclic(cycle.node_id().index()));
        }
        let (inflow, outflow) = self.flows();
        for (v, eps) in self.effective_epsilon().iter().enumerate() {
            let imbalance = Rational((&inflow[v].0 - &outflow[v].0).abs());
            if imbalance > *eps {
                return Err(Error::Unbalanced {
                    vertex: v,
                    imbalance: imbalance.to_string(),
                    epsilon: eps.to_string(),
                });
            }
        }
        Ok(())
    }
}

/// Repeatedly takes the lightest remaining edge (ties by `(from, to)`),
/// extends it to a maximal path by the smallest-index neighbor at each end,
/// and peels that path off with the edge's weight.
pub fn decompose(graph: &WeightedDag) -> Result<PathDecomposition> {
    graph.validate()?;
    let mut remaining: BTreeMap<(usize, usize), Rational> = graph
        .edges
        .iter()
        .filter(|e| !e.w.is_zero())
        .map(|e| ((e.from, e.to), e.w.clone()))
        .collect();
    let mut paths = Vec::new();
    while !remaining.is_empty() {
        let (&(from, to), mu) = remaining
            .iter()
            .fold(None::<(&(usize, usize), &Rational)>, |best, (k, w)| match best {
                Some((_, bw)) if bw <= w => best,
                _ => Some((k, w)),
            })
            .expect("nonempty");
        let mu = mu.clone();
        let mut forward = vec![to];
        while let Some((&(_, next), _)) = remaining
            .range((*forward.last().unwrap(), 0)..=(*forward.last().unwrap(), usize::MAX))
            .next()
        {
            forward.push(next);
        }
        let mut backward = vec![from];
        loop {
            let cur = *backward.last().unwrap();
            match remaining.keys().filter(|&&(_, t)| t == cur).map(|&(s, _)| s).min() {
                Some(prev) => backward.push(prev),
                None => break,
            }
        }
        backward.reverse();
        backward.extend(forward);
        for edge in backward.windows(2) {
            let key = (edge[0], edge[1]);
            let w = &remaining[&key] - &mu;
            if w.is_zero() {
                remaining.remove(&key);
            } else {
                remaining.insert(key, w);
            }
        }
        paths.push(WeightedPath { vertices: backward, mu });
    }
    Ok(PathDecomposition { paths })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Path `path` is shorter than one edge or uses a missing edge.
    InvalidPath {
        path: usize,
    },
    NonPositiveWeight {
        path: usize,
    },
    Reconstruction {
        from: usize,
        to: usize,
        expected: Rational,
        actual: Rational,
    },
    EndpointMass {
        vertex: usize,
        mass: Rational,
        epsilon: Rational,
    },
    /// `vertex` starts (`role = "start"`) or ends a path against its
    /// in/out balance.
    Polarity {
        vertex: usize,
        path: usize,
        role: &'static str,
    },
    GlobalBound {
        total: Rational,
        half_epsilon: Rational,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub passed: bool,
    pub violations: Vec<Violation>,
}

/// Checks path validity, exact edge reconstruction, per-vertex endpoint
/// mass against epsilon, endpoint polarity and `sum mu <= sum epsilon / 2`.
pub fn verify_decomposition(graph: &WeightedDag, dec: &PathDecomposition) -> VerificationReport {
    let mut violations = Vec::new();
    let weights: BTreeMap<(usize, usize), &Rational> = graph.edges.iter().map(|e| ((e.from, e.to), &e.w)).collect();
    let mut carried: BTreeMap<(usize, usize), Rational> = BTreeMap::new();
    let mut mass = vec![Rational::zero(); graph.n];
    let (inflow, outflow) = graph.flows();
    let mut total = Rational::zero();

    for (k, p) in dec.paths.iter().enumerate() {
        if p.mu.is_negative() || p.mu.is_zero() {
            violations.push(Violation::NonPositiveWeight { path: k });
        }
        let valid = p.vertices.len() >= 2
            && p.vertices.iter().all(|&v| v < graph.n)
            && p.vertices.windows(2).all(|e| weights.contains_key(&(e[0], e[1])));
        if !valid {
            violations.push(Violation::InvalidPath { path: k });
            continue;
        }
        total = &total + &p.mu;
        for e in p.vertices.windows(2) {
            let c = carried.entry((e[0], e[1])).or_insert_with(Rational::zero);
            *c = &*c + &p.mu;
        }
        let (s, f) = (p.vertices[0], *p.vertices.last().unwrap());
        mass[s] = &mass[s] + &p.mu;
        mass[f] = &mass[f] + &p.mu;
        if inflow[s] >= outflow[s] {
            violations.push(Violation::Polarity {
                vertex: s,
                path: k,
                role: "start",
            });
        }
        if inflow[f] <= outflow[f] {
            violations.push(Violation::Polarity {
                vertex: f,
                path: k,
                role: "end",
            });
        }
    }

    for (&(from, to), &w) in &weights {
        let actual = carried.get(&(from, to)).cloned().unwrap_or_else(Rational::zero);
        if actual != *w {
            violations.push(Violation::Reconstruction {
                from,
                to,
                expected: w.clone(),
                actual,
            });
        }
    }

    let eps = graph.effective_epsilon();
    for (v, (m, e)) in mass.iter().zip(&eps).enumerate() {
        if m > e {
            violations.push(Violation::EndpointMass {
                vertex: v,
                mass: m.clone(),
                epsilon: e.clone(),
            });
        }
    }
    let half = Rational(eps.iter().fold(BigRational::zero(), |acc, e| acc + &e.0) / BigInt::from(2));
    if total > half {
        violations.push(Violation::GlobalBound {
            total,
            half_epsilon: half,
        });
    }

    VerificationReport {
        passed: violations.is_empty(),
        violations,
    }
}
