//! Fixtures shared by the criterion benches.

use helmbem::{build_mesh, make_geometry, BoundaryMesh, GeometryId, GeometryParams};

/// Mesh of a default-parameter geometry at 10 points per wavelength.
pub fn mesh(id: GeometryId, k: f64) -> BoundaryMesh {
    let curve = make_geometry(id, &GeometryParams::default()).expect("default geometry");
    build_mesh(&curve, k, 10.0).expect("mesh within the default cap")
}
