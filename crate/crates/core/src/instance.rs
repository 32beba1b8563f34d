//! Finite coupling sets `G` and their alpha-weight constraint graph.
//!
//! For pairs `i, j` of `G` the constraint weight is
//! `alpha(i, j) = c(x_i, y_i) - c(x_j, y_i)`, which is `-inf` (no edge) when
//! `c(x_j, y_i) = +inf`. A potential must satisfy
//! `alpha(i, j) <= phi(x_i) - phi(x_j)` for every `i, j`.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::costs::{CostSpec, Point};
use crate::error::{Error, Result};
use crate::numerics::{XReal, DEFAULT_TOLERANCE};

/// Instances up to this size keep a dense cost table.
const DENSE_CACHE_LIMIT: usize = 512;

/// On-disk form of an instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub cost: CostSpec,
    #[serde(default)]
    pub pairs: Vec<PairDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairDoc {
    pub x: Coords,
    pub y: Coords,
}

/// A point written either as a bare number (dimension one) or an array.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Coords {
    Scalar(f64),
    Vector(Vec<f64>),
}

impl From<Coords> for Vec<f64> {
    fn from(c: Coords) -> Self {
        match c {
            Coords::Scalar(v) => vec![v],
            Coords::Vector(v) => v,
        }
    }
}

/// A validated finite coupling set.
#[derive(Clone, Debug)]
pub struct Instance {
    cost: CostSpec,
    /// `(x_i, y_i)`; empty for the matrix kind.
    points: Vec<(Point, Point)>,
    len: usize,
    diag: Vec<f64>,
    /// Position of each retained pair in the source document.
    source_index: Vec<usize>,
    /// Distinct-x class of each pair.
    x_class: Vec<usize>,
    /// First pair index of each distinct x.
    class_reps: Vec<usize>,
    table: Option<Vec<XReal>>,
    tolerance: f64,
}

impl Instance {
    /// Builds an instance over points. Exact duplicate pairs are dropped,
    /// keeping the first occurrence.
    pub fn from_points(cost: CostSpec, pairs: Vec<(Point, Point)>, tolerance: f64) -> Result<Self> {
        cost.validate()?;
        if matches!(cost, CostSpec::Matrix { .. }) {
            return Err(Error::Schema(
                "matrix costs index pairs implicitly; use Instance::from_matrix".into(),
            ));
        }
        check_tolerance(tolerance)?;
        let dim = pairs.first().map(|(x, _)| x.dim());
        let mut kept: Vec<(Point, Point)> = Vec::with_capacity(pairs.len());
        let mut source_index = Vec::with_capacity(pairs.len());
        let mut seen = HashSet::new();
        for (k, (x, y)) in pairs.into_iter().enumerate() {
            let x = Point::new(x.0)?;
            let y = Point::new(y.0)?;
            let d = dim.unwrap_or(0);
            if x.dim() != d || y.dim() != d || d == 0 {
                return Err(Error::Schema(format!(
                    "pair {k}: expected points of dimension {d} (>= 1), got {} and {}",
                    x.dim(),
                    y.dim()
                )));
            }
            if !seen.insert((coord_key(&x), coord_key(&y))) {
                continue;
            }
            kept.push((x, y));
            source_index.push(k);
        }
        let len = kept.len();
        let mut diag = Vec::with_capacity(len);
        for (i, (x, y)) in kept.iter().enumerate() {
            match cost.eval(x, y)? {
                XReal::Finite(v) => diag.push(v),
                _ => return Err(Error::InfiniteDiagonal { index: source_index[i] }),
            }
        }
        let mut x_class = Vec::with_capacity(len);
        let mut class_reps: Vec<usize> = Vec::new();
        let mut class_of_x: HashMap<Vec<u64>, usize> = HashMap::new();
        for (i, (x, _)) in kept.iter().enumerate() {
            let next = class_reps.len();
            let class = *class_of_x.entry(coord_key(x)).or_insert(next);
            if class == next {
                class_reps.push(i);
            }
            x_class.push(class);
        }
        let mut inst = Instance {
            cost,
            points: kept,
            len,
            diag,
            source_index,
            x_class,
            class_reps,
            table: None,
            tolerance,
        };
        inst.build_cache();
        Ok(inst)
    }

    /// Builds an instance from an explicit square cost matrix; pair `k` is
    /// `(row k, column k)`.
    pub fn from_matrix(rows: Vec<Vec<XReal>>, tolerance: f64) -> Result<Self> {
        let cost = CostSpec::Matrix { rows };
        cost.validate()?;
        check_tolerance(tolerance)?;
        let CostSpec::Matrix { rows } = &cost else {
            unreachable!()
        };
        let len = rows.len();
        if rows.iter().any(|r| r.len() != len) {
            return Err(Error::Schema(format!(
                "matrix cost must be square with one row per pair, got {} rows",
                len
            )));
        }
        let mut diag = Vec::with_capacity(len);
        for (i, row) in rows.iter().enumerate() {
            match row[i] {
                XReal::Finite(v) => diag.push(v),
                _ => return Err(Error::InfiniteDiagonal { index: i }),
            }
        }
        let mut inst = Instance {
            cost,
            points: Vec::new(),
            len,
            diag,
            source_index: (0..len).collect(),
            x_class: (0..len).collect(),
            class_reps: (0..len).collect(),
            table: None,
            tolerance,
        };
        inst.build_cache();
        Ok(inst)
    }

    pub fn from_doc(doc: InstanceDoc) -> Result<Self> {
        let tolerance = doc.tolerance.unwrap_or(DEFAULT_TOLERANCE);
        match doc.cost {
            CostSpec::Matrix { rows } => {
                if !doc.pairs.is_empty() {
                    return Err(Error::Schema(
                        "matrix costs take no \"pairs\": pair k is (row k, column k)".into(),
                    ));
                }
                Instance::from_matrix(rows, tolerance)
            }
            cost => {
                let pairs = doc
                    .pairs
                    .into_iter()
                    .map(|p| (Point(p.x.into()), Point(p.y.into())))
                    .collect();
                Instance::from_points(cost, pairs, tolerance)
            }
        }
    }

    pub fn to_doc(&self) -> InstanceDoc {
        InstanceDoc {
            cost: self.cost.clone(),
            pairs: self
                .points
                .iter()
                .map(|(x, y)| PairDoc {
                    x: Coords::Vector(x.0.clone()),
                    y: Coords::Vector(y.0.clone()),
                })
                .collect(),
            tolerance: Some(self.tolerance),
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        check_tolerance(tolerance)?;
        self.tolerance = tolerance;
        Ok(self)
    }

    fn build_cache(&mut self) {
        if self.len > DENSE_CACHE_LIMIT {
            return;
        }
        let n = self.len;
        let mut table = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                table.push(self.eval_cost(i, j));
            }
        }
        self.table = Some(table);
    }

    fn eval_cost(&self, i: usize, j: usize) -> XReal {
        match &self.cost {
            CostSpec::Matrix { rows } => rows[i][j],
            cost => cost
                .eval(&self.points[i].0, &self.points[j].1)
                .expect("dimensions validated at construction"),
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn cost_spec(&self) -> &CostSpec {
        &self.cost
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// `c(x_i, y_j)`.
    pub fn cost(&self, i: usize, j: usize) -> XReal {
        match &self.table {
            Some(t) => t[i * self.len + j],
            None => self.eval_cost(i, j),
        }
    }

    /// `c(x_i, y_i)`, finite by construction.
    pub fn diag(&self, i: usize) -> f64 {
        self.diag[i]
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    /// The points of pair `i`, absent for the matrix kind.
    pub fn pair(&self, i: usize) -> Option<(&Point, &Point)> {
        self.points.get(i).map(|(x, y)| (x, y))
    }

    pub fn has_points(&self) -> bool {
        !matches!(self.cost, CostSpec::Matrix { .. })
    }

    pub fn source_index(&self, i: usize) -> usize {
        self.source_index[i]
    }

    /// Index of the distinct x of pair `i` within `P_X G`.
    pub fn x_class(&self, i: usize) -> usize {
        self.x_class[i]
    }

    /// Number of distinct x values, `|P_X G|`.
    pub fn num_x(&self) -> usize {
        self.class_reps.len()
    }

    /// Representative pair of distinct x number `p`.
    pub fn x_rep(&self, p: usize) -> usize {
        self.class_reps[p]
    }

    pub fn x_members(&self, p: usize) -> Vec<usize> {
        (0..self.len).filter(|&i| self.x_class[i] == p).collect()
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.len {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange {
                index: i,
                len: self.len,
            })
        }
    }

    /// `alpha(i, j) = c(x_i, y_i) - c(x_j, y_i)`; `-inf` when the crossed
    /// cost is infinite and exactly `0` on the diagonal.
    pub fn alpha(&self, i: usize, j: usize) -> Result<XReal> {
        self.check_index(i)?;
        self.check_index(j)?;
        Ok(match self.alpha_weight(i, j) {
            Some(a) => XReal::Finite(a),
            None => XReal::NegInf,
        })
    }

    /// Unchecked finite form of [`Instance::alpha`]; `None` encodes `-inf`.
    #[inline]
    pub fn alpha_weight(&self, i: usize, j: usize) -> Option<f64> {
        if i == j {
            return Some(0.0);
        }
        self.cost(j, i).finite().map(|c| self.diag[i] - c)
    }

    /// True when the walk graph has the edge `i -> j`, i.e. `c(x_j, y_i) < +inf`.
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i == j || self.cost(j, i).is_finite()
    }

    /// Exact alpha-sum of a closed walk `cycle[0] -> cycle[1] -> ... -> cycle[0]`.
    pub fn cycle_sum(&self, cycle: &[usize]) -> XReal {
        if cycle.is_empty() {
            return XReal::ZERO;
        }
        let mut next = cycle.iter().skip(1).chain(cycle.first());
        self.sum_edges(cycle.iter().map(|&i| (i, *next.next().unwrap())))
    }

    /// Exact alpha-sum of an open walk.
    pub fn walk_sum(&self, walk: &[usize]) -> XReal {
        self.sum_edges(walk.windows(2).map(|w| (w[0], w[1])))
    }

    fn sum_edges(&self, edges: impl Iterator<Item = (usize, usize)>) -> XReal {
        let mut total = 0.0;
        for (i, j) in edges {
            match self.alpha_weight(i, j) {
                Some(a) => total += a,
                None => return XReal::NegInf,
            }
        }
        XReal::Finite(total)
    }
}

/// Hash key for exact coordinate equality (`-0.0` and `0.0` collide).
fn coord_key(p: &Point) -> Vec<u64> {
    p.coords().iter().map(|&c| (c + 0.0).to_bits()).collect()
}

fn check_tolerance(t: f64) -> Result<()> {
    if t.is_finite() && t > 0.0 {
        Ok(())
    } else {
        Err(Error::Schema(format!("tolerance must be positive and finite, got {t}")))
    }
}

/// Parses an instance document from JSON text.
pub fn load_instance(json: &str) -> Result<Instance> {
    let doc: InstanceDoc = serde_json::from_str(json).map_err(|e| Error::Schema(e.to_string()))?;
    Instance::from_doc(doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn polar_pair() -> Instance {
        load_instance(r#"{"cost":{"kind":"polar"},"pairs":[{"x":[0.75],"y":[1.5]},{"x":[1.5],"y":[0.75]}]}"#).unwrap()
    }

    #[test]
    fn loads_polar_pair() {
        let inst = polar_pair();
        assert_eq!(inst.len(), 2);
        for &d in inst.diagonal() {
            assert!((d - 8f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_infinite_diagonal() {
        let err =
            load_instance(r#"{"cost":{"kind":"polar"},"pairs":[{"x":2,"y":1},{"x":[0.5],"y":[0.5]}]}"#).unwrap_err();
        assert_eq!(err, Error::InfiniteDiagonal { index: 1 });
        assert!(err.to_string().contains("membership condition"));
    }

    #[test]
    fn empty_instance_is_accepted() {
        let inst = load_instance(r#"{"cost":{"kind":"bilinear"},"pairs":[]}"#).unwrap();
        assert!(inst.is_empty());
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(load_instance(r#"{"pairs":[]}"#), Err(Error::Schema(_))));
        assert!(matches!(
            load_instance(r#"{"cost":{"kind":"bilinear"},"pairs":[{"x":[1],"y":[1,2]}]}"#),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            load_instance(r#"{"cost":{"kind":"matrix","rows":[[0,1]]}}"#),
            Err(Error::Schema(_))
        ));
        assert!(matches!(
            load_instance(r#"{"cost":{"kind":"matrix","rows":[[0]]},"pairs":[{"x":[1],"y":[1]}]}"#),
            Err(Error::Schema(_))
        ));
    }

    #[test]
    fn alpha_bilinear() {
        let inst = Instance::from_points(
            CostSpec::Bilinear,
            vec![(0.0.into(), 0.0.into()), (1.0.into(), 1.0.into())],
            1e-9,
        )
        .unwrap();
        assert_eq!(inst.alpha(1, 0).unwrap(), XReal::Finite(-1.0));
        assert_eq!(inst.alpha(0, 1).unwrap(), XReal::Finite(0.0));
        assert_eq!(inst.alpha(0, 0).unwrap(), XReal::Finite(0.0));
        assert!(inst.alpha(0, 2).is_err());
    }

    #[test]
    fn alpha_polar() {
        let inst = polar_pair();
        let a01 = inst.alpha(0, 1).unwrap().finite().unwrap();
        assert!((a01 - 10f64.ln()).abs() < 1e-12);
        assert!((a01 - std::f64::consts::LN_10).abs() < 1e-6);
        assert_eq!(inst.alpha(1, 0).unwrap(), XReal::NegInf);
        assert!(inst.has_edge(0, 1));
        assert!(!inst.has_edge(1, 0));
    }

    #[test]
    fn duplicates_are_dropped_and_x_merged() {
        let inst = Instance::from_points(
            CostSpec::Bilinear,
            vec![
                (1.0.into(), 2.0.into()),
                (1.0.into(), 2.0.into()),
                (1.0.into(), 3.0.into()),
                (0.0.into(), 0.0.into()),
            ],
            1e-9,
        )
        .unwrap();
        assert_eq!(inst.len(), 3);
        assert_eq!(inst.source_index(1), 2);
        assert_eq!(inst.num_x(), 2);
        assert_eq!(inst.x_class(0), inst.x_class(1));
        assert_eq!(inst.x_members(0), vec![0, 1]);
    }

    #[test]
    fn two_cycle_sum_matches_swap() {
        // alpha(i,j) + alpha(j,i) <= 0 is exactly the m = 2 case of monotonicity
        let inst = Instance::from_points(
            CostSpec::Bilinear,
            vec![(0.0.into(), 1.0.into()), (1.0.into(), 0.0.into())],
            1e-9,
        )
        .unwrap();
        let s = inst.cycle_sum(&[0, 1]).finite().unwrap();
        let swap = inst.diag(0) + inst.diag(1) - inst.cost(0, 1).finite().unwrap() - inst.cost(1, 0).finite().unwrap();
        assert_eq!(s, swap);
        assert_eq!(s, 1.0);
    }

    #[test]
    fn large_instances_skip_the_dense_table() {
        let pairs: Vec<_> = (0..600)
            .map(|k| (Point::scalar(k as f64), Point::scalar(k as f64)))
            .collect();
        let inst = Instance::from_points(CostSpec::Bilinear, pairs, 1e-9).unwrap();
        assert_eq!(inst.cost(3, 5), XReal::Finite(-15.0));
        assert_eq!(inst.alpha(5, 3).unwrap(), XReal::Finite(-25.0 + 15.0));
    }
}
