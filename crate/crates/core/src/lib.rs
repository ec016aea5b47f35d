//! Pointwise partial information decomposition.
//!
//! Joint distributions over predictors and a (possibly composite) target are
//! held with exact rational masses. Each support realisation is decomposed on
//! the redundancy lattice into specificity and ambiguity atoms using
//! `r⁺min` and `r⁻min`, and the atoms are averaged into the classical
//! redundant, unique and complementary information.

pub mod corpus;
pub mod decomposition;
pub mod distribution;
pub mod error;
pub mod io;
pub mod kelly;
pub mod lattice;
pub mod measures;
pub mod report;
pub mod verify;

pub use decomposition::{
    decompose, AtomTable, BivariateAtoms, DecomposeOptions, NodeAtoms, TargetView,
};
pub use distribution::{
    ratio, DistributionBuilder, JointDistribution, MassMode, Probability, Realisation, SourceEvent,
    VariableSchema,
};
pub use error::{Error, Result};
pub use lattice::{LatticeNode, RedundancyLattice};
pub use measures::{LogBase, Measures};
