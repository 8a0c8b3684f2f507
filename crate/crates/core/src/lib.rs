//! Even lattices of arbitrary signature, Weil representations, Jacobi-Siegel
//! theta functions with Grassmannian parameter and characteristics, and the
//! Jacobi form / vector valued modular form correspondence.

pub mod error;
pub mod jacobi;
pub mod lattice;
pub mod metaplectic;
pub mod realspace;
pub mod theta;
pub mod tolerances;

pub use error::{Error, Result};
pub use jacobi::{JacobiForm, JacobiFormHandle, ModularForm, QSeries, Rep};
pub use lattice::{DiscriminantGroup, IsotropicSubgroupData, Lattice, PrimitiveSublattice};
pub use metaplectic::{GroupRingVector, MetaplecticElement, WeilRepresentation};
pub use realspace::GrassmannianPoint;
pub mod verify;
