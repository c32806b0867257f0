//! Subset sums, sumsets and additive bases in finite abelian groups, with
//! exact linear algebra and the lattice-covering view of basis systems.

pub mod bitset;
pub mod energy;
pub mod error;
pub mod group;
pub mod lattice;
pub mod limits;
pub mod linalg;
pub mod oracle;
pub mod random;
pub mod sumsets;
pub mod synthesis;
pub mod verify;

pub use error::{Error, ErrorClass, Result};
pub use group::{ElementMultiset, ElementSet, GroupElement, GroupSpec};
pub use lattice::{BasisSystem, BlockLattice, IntLattice};
pub use linalg::{FieldKind, Fp, Matrix, PrimeFieldMatrix};
