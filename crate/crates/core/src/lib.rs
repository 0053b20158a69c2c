pub mod congruence;
pub mod error;
pub mod hecke;
pub mod homology;
pub mod linalg;
pub mod oracle;
pub mod report;
pub mod selfcheck;
pub mod sharbly;
pub mod voronoi;

pub use error::{Error, Result};
