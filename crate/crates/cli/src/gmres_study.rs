//! GMRES iteration counts on `M⁻¹B` for a family of `η` schedules.

use std::path::Path;

use helmbem::geometry::build_mesh_capped;
use helmbem::linalg::gmres;
use helmbem::{make_geometry, BemError, ParametricCurve, SystemComponents};
use serde::{Deserialize, Serialize};

use crate::sweep::{status_of, STATUS_OK};
use crate::table::{run_ordered, Table};
use crate::{OperatorSpec, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmresRow {
    pub geometry: String,
    pub k: f64,
    pub alpha: f64,
    pub c: f64,
    pub eta_value: f64,
    pub iters: usize,
    pub converged: bool,
    pub final_rel_residual: f64,
    pub status: String,
}

fn blank_row(spec: &OperatorSpec, k: f64, alpha: f64) -> GmresRow {
    GmresRow {
        geometry: spec.geometry.to_string(),
        k,
        alpha,
        c: spec.eta.c,
        eta_value: spec.eta.eta(alpha, k),
        iters: 0,
        converged: false,
        final_rel_residual: f64::NAN,
        status: String::new(),
    }
}

fn same_point(row: &GmresRow, template: &GmresRow) -> bool {
    row.geometry == template.geometry
        && row.k == template.k
        && row.alpha == template.alpha
        && row.c == template.c
}

/// All schedules at one wavenumber; the matrices are assembled once.
fn study_point(
    spec: &OperatorSpec,
    curve: &ParametricCurve,
    k: f64,
    incidence_angle: f64,
) -> Vec<GmresRow> {
    let rows: Vec<GmresRow> = spec
        .eta
        .alphas
        .iter()
        .map(|&a| blank_row(spec, k, a))
        .collect();
    let prepared = build_mesh_capped(curve, k, spec.ppw, spec.dof_cap).and_then(|mesh| {
        Ok((
            SystemComponents::assemble(&mesh, k, spec.regularizer, &spec.quadrature)?,
            mesh,
        ))
    });
    let (comp, mesh) = match prepared {
        Ok(p) => p,
        Err(e) => {
            let status = status_of(&e);
            return rows
                .into_iter()
                .map(|r| GmresRow {
                    status: status.clone(),
                    ..r
                })
                .collect();
        }
    };
    let beta = spec.beta.value(k);
    rows.into_iter()
        .map(|mut row| {
            let run = (|| -> std::result::Result<_, BemError> {
                let b = if beta > 0.0 {
                    comp.b_impedance(row.eta_value, beta)?
                } else {
                    comp.b(row.eta_value)?
                };
                let rhs = comp.mass_tri.solve(&comp.planewave_rhs(
                    &mesh,
                    row.eta_value,
                    incidence_angle,
                )?);
                let max_iter = spec.gmres_max_iter.unwrap_or(comp.n() + 2);
                gmres(
                    |v| Ok(comp.mass_tri.solve(&b.data.matvec(v))),
                    &rhs,
                    spec.gmres_tol,
                    max_iter,
                )
            })();
            match run {
                Ok(out) => {
                    row.iters = out.iterations;
                    row.converged = out.converged;
                    row.final_rel_residual = out.final_relative_residual();
                    row.status = STATUS_OK.into();
                }
                Err(e) => row.status = status_of(&e),
            }
            row
        })
        .collect()
}

/// Runs GMRES for every `(k, α)` and writes the rows to `out`, `k` major.
/// Unconverged runs are kept with `converged = false`.
pub fn run_gmres_study(
    spec: &OperatorSpec,
    incidence_angle: f64,
    out: &Path,
    skip_done: bool,
    workers: usize,
) -> Result<Vec<GmresRow>> {
    let curve = make_geometry(spec.geometry, &spec.params)?;
    let (mut table, existing) = Table::open::<GmresRow>(out, skip_done)?;
    let mut rows: Vec<Vec<Option<GmresRow>>> = spec
        .k_list
        .iter()
        .map(|&k| {
            spec.eta
                .alphas
                .iter()
                .map(|&a| {
                    let t = blank_row(spec, k, a);
                    existing.iter().find(|r| same_point(r, &t)).cloned()
                })
                .collect()
        })
        .collect();
    let pending: Vec<(usize, f64)> = spec
        .k_list
        .iter()
        .enumerate()
        .filter(|(i, _)| rows[*i].iter().any(Option::is_none))
        .map(|(i, &k)| (i, k))
        .collect();
    run_ordered(
        &pending,
        workers,
        |&(i, k)| (i, study_point(spec, &curve, k, incidence_angle)),
        |(i, fresh)| {
            for (slot, row) in rows[i].iter_mut().zip(fresh) {
                if slot.is_none() {
                    table.push(&row)?;
                    *slot = Some(row);
                }
            }
            Ok(())
        },
    )?;
    Ok(rows.into_iter().flatten().flatten().collect())
}
