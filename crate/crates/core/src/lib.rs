pub mod bounds;
pub mod cli;
pub mod complex;
pub mod error;
pub mod fixtures;
pub mod geometry;
pub mod intersect;
pub mod io;
pub mod iso;
pub mod pachner;
pub mod reduction;
pub mod shelling;
pub mod subdivision;

pub use complex::{close_under_faces, Complex, Simplex, VertexId};
pub use error::{Error, ExitCode, Result};
pub use iso::{find_isomorphism, Isomorphism};
