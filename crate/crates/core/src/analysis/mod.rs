//! Decision procedures on finite coupling sets: cyclic monotonicity,
//! path-boundedness with explicit walk bounds, the mutual-reachability
//! classes, and growth diagnostics for refining families of samples.

mod bounds;
mod classes;
mod family;
mod monotone;

use serde::Serialize;

use crate::numerics::XReal;

pub use bounds::{closure_weights, is_path_bounded, sup_walk, PathBoundedness, WalkBound};
pub use classes::{equivalence_classes, ClassCertificate, EquivalenceClasses};
pub use family::{
    family_diagnose, family_instance, FamilyReport, FamilyRow, FamilySpec, Sampling, DEFAULT_DIVERGENCE_THRESHOLD,
};
pub use monotone::{antitone_check, brute_force_monotone, is_cyclically_monotone, BRUTE_FORCE_LIMIT};

pub(crate) use bounds::walks_from;
pub(crate) use monotone::{certify, Certificate};

/// A closed walk `cycle[0] -> cycle[1] -> ... -> cycle[0]` over pair
/// indices together with its alpha-sum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CycleWitness {
    pub cycle: Vec<usize>,
    pub sum: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MonotoneVerdict {
    pub monotone: bool,
    /// Positive cycle, present exactly when `monotone` is false.
    pub witness: Option<CycleWitness>,
    /// Set when a cycle with sum in `(0, tolerance]` was seen and treated
    /// as nonpositive.
    pub marginal: bool,
}

// {"monotone": b, "witness": [indices] | null, "cycle_sum": s, "marginal": true}
impl Serialize for MonotoneVerdict {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let len = 2 + usize::from(self.witness.is_some()) + usize::from(self.marginal);
        let mut st = s.serialize_struct("MonotoneVerdict", len)?;
        st.serialize_field("monotone", &self.monotone)?;
        st.serialize_field("witness", &self.witness.as_ref().map(|w| &w.cycle))?;
        if let Some(w) = &self.witness {
            st.serialize_field("cycle_sum", &w.sum)?;
        }
        if self.marginal {
            st.serialize_field("marginal", &true)?;
        }
        st.end()
    }
}

/// `M(i, j)`: supremum of alpha-sums over walks `i -> j` with at least one
/// edge; `-inf` when no finite-cost walk exists.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundTable {
    #[serde(rename = "M")]
    pub m: Vec<Vec<XReal>>,
}

impl BoundTable {
    pub fn get(&self, i: usize, j: usize) -> XReal {
        self.m[i][j]
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }
}
