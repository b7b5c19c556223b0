//! Local action diagrams of groups acting on trees.

pub mod corpus;
pub mod diagram;
pub mod discrete;
pub mod dtree;
pub mod perm;
pub mod random;
pub mod scopo;
pub mod sgraph;
pub mod universal;

pub use diagram::{
    ArcRef, ColourSet, Diagram, DiagramBuilder, DiagramError, DiagramViolation, LocalAction,
    RayDir, RayGadget, Segment, SymbolicAction,
};
pub use perm::{PermError, PermGroup, Permutation};
pub use sgraph::{GraphError, SerreGraph};
pub use universal::{BallAutomorphism, SearchOutcome, UgroupError};
