//! Galerkin boundary elements for the exterior Helmholtz Neumann problem in
//! two dimensions, built around the regularized combined-field operators
//! `B = iη(½ − K) + R H` and `B' = iη(½ − K') + H R`.
//!
//! Meshes are straight-panel polygons on closed parametric curves with
//! continuous piecewise-linear elements; every matrix is dense.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod assembly;
pub mod error;
pub mod geometry;
pub mod kernels;
pub mod linalg;
pub mod oracle;
pub mod quadrature;
pub mod specfun;

pub use num_complex::Complex64;

pub use assembly::{
    GalerkinMatrix, OperatorTag, QuadratureOrders, RegularizerChoice, SystemComponents,
};
pub use error::{BemError, Result};
pub use geometry::{
    build_mesh, make_geometry, BoundaryMesh, GeometryId, GeometryParams, ParametricCurve, Point,
};
pub use linalg::{DenseComplexMatrix, ExtremeSingularValues, SvdOptions};
