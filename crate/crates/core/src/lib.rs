pub mod caps;
pub mod error;
pub mod group;
pub mod harness;
pub mod invariance;
pub mod lattice;
pub mod prering;
pub mod relation;
pub mod structure;
pub mod workspace;

pub use caps::Caps;
pub use error::{Error, Result};
pub use group::{FgAbGroup, Index, Subgroup};
pub use lattice::{Int, Lattice, Matrix, Vector};
pub use relation::{BiRelation, Kind, RelationClass};
