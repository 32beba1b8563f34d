//! Potentials for finite coupling sets: the difference-constraint solver,
//! the extension off the support, the classical chain construction, the
//! discrete c-transform and the subgradient audit.

use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::analysis::{certify, walks_from, CycleWitness};
use crate::costs::{CostSpec, Point};
use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::numerics::{transform_term, XReal};

/// Finite potential values on the distinct x of an instance.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    /// `phi` per distinct x, in order of first occurrence.
    pub values: Vec<f64>,
    /// The x coordinates, absent for the matrix kind.
    pub points: Vec<Option<Point>>,
    /// Pair indices sharing each x.
    pub members: Vec<Vec<usize>>,
    class_of: Vec<usize>,
}

impl Potential {
    fn from_classes(inst: &Instance, values: Vec<f64>) -> Self {
        let k = inst.num_x();
        let points = (0..k)
            .map(|p| inst.pair(inst.x_rep(p)).map(|(x, _)| x.clone()))
            .collect();
        let members = (0..k).map(|p| inst.x_members(p)).collect();
        let class_of = (0..inst.len()).map(|i| inst.x_class(i)).collect();
        Potential {
            values,
            points,
            members,
            class_of,
        }
    }

    /// `phi(x_i)` for pair `i`.
    pub fn at_pair(&self, i: usize) -> f64 {
        self.values[self.class_of[i]]
    }

    pub fn num_x(&self) -> usize {
        self.values.len()
    }
}

struct PhiEntry<'a>(&'a Potential, usize);

impl Serialize for PhiEntry<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let PhiEntry(p, k) = *self;
        let mut m = s.serialize_map(Some(3))?;
        m.serialize_entry("x", &p.points[k])?;
        m.serialize_entry("pairs", &p.members[k])?;
        m.serialize_entry("value", &p.values[k])?;
        m.end()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialResult {
    Feasible(Potential),
    /// A positive alpha-cycle; it also certifies non-monotonicity.
    Infeasible(CycleWitness),
}

impl PotentialResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, PotentialResult::Feasible(_))
    }

    pub fn potential(&self) -> Result<&Potential> {
        match self {
            PotentialResult::Feasible(p) => Ok(p),
            PotentialResult::Infeasible(_) => Err(Error::Infeasible),
        }
    }
}

impl Serialize for PotentialResult {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            PotentialResult::Feasible(p) => {
                let mut st = s.serialize_struct("PotentialResult", 2)?;
                st.serialize_field("feasible", &true)?;
                let phi: Vec<_> = (0..p.num_x()).map(|k| PhiEntry(p, k)).collect();
                st.serialize_field("phi", &phi)?;
                st.end()
            }
            PotentialResult::Infeasible(w) => {
                let mut st = s.serialize_struct("PotentialResult", 3)?;
                st.serialize_field("feasible", &false)?;
                st.serialize_field("positive_cycle", &w.cycle)?;
                st.serialize_field("cycle_sum", &w.sum)?;
                st.end()
            }
        }
    }
}

/// Solves `alpha(i, j) <= phi(x_i) - phi(x_j)` by longest walks from a
/// virtual source over the distinct x values. The labels `L` satisfy
/// `L(j) >= L(i) + alpha(i, j) - slack`, so `phi = -L` meets every
/// constraint within the slack; it is shifted to `max phi = 0`.
pub fn solve_potential(inst: &Instance) -> PotentialResult {
    let cert = certify(inst);
    match cert.outcome {
        Ok(labels) => {
            let top = labels.iter().copied().fold(f64::INFINITY, f64::min);
            let values = labels.iter().map(|&l| top - l).collect();
            PotentialResult::Feasible(Potential::from_classes(inst, values))
        }
        Err(w) => PotentialResult::Infeasible(w),
    }
}

/// Largest `alpha(i, j) - (phi(x_i) - phi(x_j))` over finite alpha;
/// nonpositive exactly when every constraint holds.
pub fn constraint_violation(inst: &Instance, phi: &Potential) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for i in 0..inst.len() {
        for j in 0..inst.len() {
            if let Some(a) = inst.alpha_weight(i, j) {
                worst = worst.max(a - (phi.at_pair(i) - phi.at_pair(j)));
            }
        }
    }
    worst
}

/// `phi~(z) = inf over (x, y) in G of c(z, y) - c(x, y) + phi(x)`, which
/// agrees with `phi` on the support.
#[derive(Clone, Copy, Debug)]
pub struct ExtendedPotential<'a> {
    inst: &'a Instance,
    phi: &'a Potential,
}

impl<'a> ExtendedPotential<'a> {
    pub fn new(inst: &'a Instance, result: &'a PotentialResult) -> Result<Self> {
        Ok(ExtendedPotential {
            inst,
            phi: result.potential()?,
        })
    }

    /// Evaluates at an arbitrary point. Support points return their stored
    /// value exactly. `+inf` when `c(z, y) = +inf` for every `y`.
    pub fn eval(&self, z: &Point) -> Result<XReal> {
        if !self.inst.has_points() {
            return Err(Error::NeedsPoints);
        }
        for (k, x) in self.phi.points.iter().enumerate() {
            if x.as_ref().is_some_and(|x| x.same_as(z)) {
                return Ok(XReal::Finite(self.phi.values[k]));
            }
        }
        let cost = self.inst.cost_spec();
        let mut best = XReal::PosInf;
        for i in 0..self.inst.len() {
            let (_, y) = self.inst.pair(i).expect("checked above");
            let term = match cost.eval(z, y)? {
                XReal::Finite(c) => XReal::Finite(c - self.inst.diag(i) + self.phi.at_pair(i)),
                other => other,
            };
            best = best.min(term);
        }
        Ok(best)
    }

    /// Evaluates from a cost row `c(z, y_i)`, one entry per pair; this is
    /// the only way to extend a matrix-kind potential.
    pub fn eval_row(&self, row: &[XReal]) -> Result<XReal> {
        if row.len() != self.inst.len() {
            return Err(Error::DimensionMismatch(row.len(), self.inst.len()));
        }
        let mut best = XReal::PosInf;
        for (i, &c) in row.iter().enumerate() {
            let term = match c {
                XReal::Finite(c) => XReal::Finite(c - self.inst.diag(i) + self.phi.at_pair(i)),
                XReal::NegInf => return Err(Error::NegInfCost),
                XReal::PosInf => XReal::PosInf,
            };
            best = best.min(term);
        }
        Ok(best)
    }
}

pub fn extend_potential(inst: &Instance, result: &PotentialResult, z: &Point) -> Result<XReal> {
    ExtendedPotential::new(inst, result)?.eval(z)
}

fn check_grid(grid: usize, values: usize) -> Result<()> {
    if grid == 0 {
        return Err(Error::EmptyGrid);
    }
    if grid != values {
        return Err(Error::GridMismatch(grid, values));
    }
    Ok(())
}

/// Grid-restricted c-transform `psi(y) = min over grid x of c(x, y) - phi(x)`,
/// with `(+inf) - (+inf) = +inf`.
pub fn c_transform(grid: &[Point], phi: &[XReal], cost: &CostSpec, eval_at: &[Point]) -> Result<Vec<XReal>> {
    check_grid(grid.len(), phi.len())?;
    eval_at
        .iter()
        .map(|y| {
            grid.iter().zip(phi).try_fold(XReal::PosInf, |best, (x, &p)| {
                Ok(best.min(transform_term(cost.eval(x, y)?, p)?))
            })
        })
        .collect()
}

/// The transform in the other variable, `phi(x) = min over grid y of
/// c(x, y) - psi(y)`.
pub fn c_transform_dual(grid: &[Point], psi: &[XReal], cost: &CostSpec, eval_at: &[Point]) -> Result<Vec<XReal>> {
    check_grid(grid.len(), psi.len())?;
    eval_at
        .iter()
        .map(|x| {
            grid.iter().zip(psi).try_fold(XReal::PosInf, |best, (y, &p)| {
                Ok(best.min(transform_term(cost.eval(x, y)?, p)?))
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SubgradientReport {
    /// `c(x_i, y_i) - phi(x_i) - phi^c(y_i)` per pair; zero on the subgradient.
    pub residuals: Vec<f64>,
    /// Pairs with `|residual| > tolerance`.
    pub failures: Vec<usize>,
}

/// Checks `phi(x_i) + phi^c(y_i) = c(x_i, y_i)` for every pair, with `phi^c`
/// taken over the support and the extra `audit` points (evaluated through
/// the extension).
pub fn verify_subgradient(inst: &Instance, result: &PotentialResult, audit: &[Point]) -> Result<SubgradientReport> {
    let ext = ExtendedPotential::new(inst, result)?;
    let phi = ext.phi;
    if !audit.is_empty() && !inst.has_points() {
        return Err(Error::NeedsPoints);
    }
    let audit_values = audit.iter().map(|z| ext.eval(z)).collect::<Result<Vec<_>>>()?;
    let cost = inst.cost_spec();
    let tol = inst.tolerance();
    let mut residuals = Vec::with_capacity(inst.len());
    let mut failures = Vec::new();
    for i in 0..inst.len() {
        let mut psi = XReal::PosInf;
        for (k, &v) in phi.values.iter().enumerate() {
            let c = inst.cost(phi.members[k][0], i);
            psi = psi.min(transform_term(c, XReal::Finite(v))?);
        }
        if let Some((_, y)) = inst.pair(i) {
            for (z, &v) in audit.iter().zip(&audit_values) {
                psi = psi.min(transform_term(cost.eval(z, y)?, v)?);
            }
        }
        let r = match psi {
            XReal::Finite(p) => inst.diag(i) - phi.at_pair(i) - p,
            // psi(y_i) <= c(x_i, y_i) - phi(x_i) is finite, so only an audit
            // point can push it to -inf
            _ => f64::INFINITY,
        };
        if r.abs() > tol {
            failures.push(i);
        }
        residuals.push(r);
    }
    Ok(SubgradientReport { residuals, failures })
}

/// The classical chain construction anchored at pair `base`:
/// `phi(x) = inf over chains base -> ... -> (x_m, y_m) of
/// c(x, y_m) - c(x_0, y_0) + sum (c(x_i, y_{i-1}) - c(x_i, y_i))`,
/// i.e. minus the best alpha-walk from `base` to `x`. It needs every crossed
/// cost to be finite.
pub fn rockafellar_construct(inst: &Instance, base: usize) -> Result<Potential> {
    inst.check_index(base)?;
    for to in 0..inst.len() {
        for from in 0..inst.len() {
            if inst.cost(to, from) == XReal::PosInf {
                return Err(Error::ClassicalUndefined { from, to });
            }
        }
    }
    let cert = certify(inst);
    if let Err(w) = cert.outcome {
        return Err(Error::NotMonotone(w.cycle));
    }
    let labels = walks_from(inst, base, 1, cert.slack).map_err(|w| Error::NotMonotone(w.cycle))?;
    let values = (0..inst.num_x())
        .map(|p| {
            let walk = labels.walk_to(inst.x_rep(p)).expect("finite costs reach every pair");
            -inst.walk_sum(&walk).finite().expect("finite costs")
        })
        .collect();
    Ok(Potential::from_classes(inst, values))
}
