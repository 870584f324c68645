//! Polyline dump of a boundary curve.

use std::io::Write;

use helmbem::geometry::point_and_normal;
use helmbem::{make_geometry, GeometryId, GeometryParams};

use crate::{CliError, Result};

/// `samples` points at the parameter midpoints `t_j = t_0 + (j + ½)Δt`, which
/// never hit a corner, as CSV with columns `t, x, y, nx, ny`.
pub fn dump_geometry<W: Write>(
    id: GeometryId,
    params: &GeometryParams,
    samples: usize,
    out: W,
) -> Result<()> {
    if samples == 0 {
        return Err(CliError::Input("need at least one sample".into()));
    }
    let curve = make_geometry(id, params)?;
    let (t0, t1) = curve.parameter_range();
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "x", "y", "nx", "ny"])?;
    for j in 0..samples {
        let t = t0 + (t1 - t0) * (j as f64 + 0.5) / samples as f64;
        let (p, n) = point_and_normal(&curve, t)?;
        w.write_record([t, p[0], p[1], n[0], n[1]].map(|v| (v + 0.0).to_string()))?;
    }
    w.flush().map_err(|e| CliError::Csv(e.into()))
}
