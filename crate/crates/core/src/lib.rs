//! Cyclic monotonicity, path-boundedness and transport potentials for
//! finite coupling sets under costs that may take the value `+inf`.

pub mod analysis;
pub mod cli;
pub mod costs;
pub mod decomposition;
pub mod error;
pub mod instance;
pub mod numerics;
pub mod potential;
mod relax;

pub use analysis::{
    brute_force_monotone, closure_weights, equivalence_classes, is_cyclically_monotone, is_path_bounded, sup_walk,
    CycleWitness, MonotoneVerdict, WalkBound,
};
pub use costs::{CostSpec, Point};
pub use error::{Error, Result};
pub use instance::{load_instance, Instance};
pub use numerics::XReal;
pub use potential::{solve_potential, PotentialResult};
