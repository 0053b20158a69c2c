//! Voronoi decomposition of the cone of positive forms: perfect forms, cells,
//! stabilizers and the orbit table with facet incidences.

pub mod cells;
pub mod complex;
pub mod forms;
pub mod search;

pub use cells::{cell_stabilizer, equivalent_cells, StabilizerElement, VoronoiCell};
pub use complex::{enumerate_cells, CellComplexTable, CellOrbit, FacetRecord};
pub use forms::{minimal_vectors, perfect_forms, PerfectForm};
