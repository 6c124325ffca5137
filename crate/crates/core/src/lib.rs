pub mod complex;
pub mod detection;
pub mod error;
pub mod generators;
pub mod io;
pub mod iso;
pub mod moves;
pub mod reduction;
pub mod rigidity;
pub mod surface;
pub mod surgery;
pub mod weights;

pub use complex::{Complex3, Edge, FVector, GInvariants, Tetra, Triangle, ValidationReport, VertexId};
pub use error::{Error, Result};
pub use iso::is_isomorphic;
pub use surface::{classify_surface, Surface2, SurfaceKind, SurfaceType};
