//! Wavenumber sweeps of the extreme singular values of `M⁻¹B`.

use std::path::{Path, PathBuf};
use std::time::Instant;

use helmbem::assembly::write_matrix;
use helmbem::geometry::build_mesh_capped;
use helmbem::linalg::{extreme_singular_values, fit_loglog_slope};
use helmbem::{make_geometry, BemError, GalerkinMatrix, ParametricCurve, SystemComponents};
use serde::{Deserialize, Serialize};

use crate::table::{run_ordered, Table};
use crate::{io_err, CliError, OperatorSpec, Result};

pub const STATUS_OK: &str = "ok";
pub const STATUS_DOF_CAP: &str = "dof_cap_exceeded";

/// One CSV row. Columns are written in field order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub geometry: String,
    pub k: f64,
    pub n_dof: usize,
    pub eta: f64,
    pub regularizer: String,
    pub beta: f64,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub cond: f64,
    pub iters_max: usize,
    pub iters_min: usize,
    pub wall_seconds: f64,
    pub status: String,
}

impl SweepRow {
    pub fn ok(&self) -> bool {
        self.status == STATUS_OK
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FittedSlope {
    pub slope: f64,
    pub intercept: f64,
    pub residual: f64,
    pub points: usize,
}

impl FittedSlope {
    /// `None` with fewer than three points.
    pub fn fit(ks: &[f64], values: &[f64]) -> Option<Self> {
        let f = fit_loglog_slope(ks, values).ok()?;
        Some(Self {
            slope: f.slope,
            intercept: f.intercept,
            residual: f.residual,
            points: ks.len(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    /// The row for every requested `k`, in `k` order.
    pub rows: Vec<SweepRow>,
    pub slope_sigma_max: Option<FittedSlope>,
    pub slope_inv_sigma_min: Option<FittedSlope>,
    pub slope_cond: Option<FittedSlope>,
}

impl SweepRecord {
    pub fn from_rows(rows: Vec<SweepRow>) -> Self {
        let good: Vec<&SweepRow> = rows.iter().filter(|r| r.ok()).collect();
        let ks: Vec<f64> = good.iter().map(|r| r.k).collect();
        let col = |f: fn(&SweepRow) -> f64| good.iter().map(|r| f(r)).collect::<Vec<_>>();
        Self {
            slope_sigma_max: FittedSlope::fit(&ks, &col(|r| r.sigma_max)),
            slope_inv_sigma_min: FittedSlope::fit(&ks, &col(|r| 1.0 / r.sigma_min)),
            slope_cond: FittedSlope::fit(&ks, &col(|r| r.cond)),
            rows,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SweepOptions {
    pub out: PathBuf,
    /// Keep rows already in `out` and compute only the missing ones.
    pub skip_done: bool,
    /// Directory receiving binary dumps of every assembled matrix.
    pub dump_dir: Option<PathBuf>,
    pub workers: usize,
}

impl SweepOptions {
    pub fn new(out: impl Into<PathBuf>) -> Self {
        Self {
            out: out.into(),
            skip_done: false,
            dump_dir: None,
            workers: crate::worker_count(),
        }
    }
}

fn single_alpha(spec: &OperatorSpec) -> Result<f64> {
    match spec.eta.alphas.as_slice() {
        [a] => Ok(*a),
        other => Err(CliError::Config(format!(
            "a sweep takes a single eta exponent, got {} (use the gmres study for schedules)",
            other.len()
        ))),
    }
}

/// Columns identifying a row independently of its measurements.
fn same_point(row: &SweepRow, template: &SweepRow) -> bool {
    row.geometry == template.geometry
        && row.k == template.k
        && row.eta == template.eta
        && row.regularizer == template.regularizer
        && row.beta == template.beta
}

fn blank_row(spec: &OperatorSpec, alpha: f64, k: f64) -> SweepRow {
    SweepRow {
        geometry: spec.geometry.to_string(),
        k,
        n_dof: 0,
        eta: spec.eta.eta(alpha, k),
        regularizer: spec.regularizer.to_string(),
        beta: spec.beta.value(k),
        sigma_max: f64::NAN,
        sigma_min: f64::NAN,
        cond: f64::NAN,
        iters_max: 0,
        iters_min: 0,
        wall_seconds: 0.0,
        status: String::new(),
    }
}

pub(crate) fn status_of(e: &BemError) -> String {
    match e {
        BemError::DofCap { .. } => STATUS_DOF_CAP.to_string(),
        other => format!("failed: {other}"),
    }
}

/// File-name form of an operator name (`K'_k` becomes `Kp_k`).
fn dump_name(geometry: &str, k: f64, m: &GalerkinMatrix) -> String {
    format!("{geometry}_k{k}_{}.bin", m.op.name().replace('\'', "p"))
}

fn dump_all(
    dir: &Path,
    geometry: &str,
    k: f64,
    comp: &SystemComponents,
    system: &GalerkinMatrix,
) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let ops = &comp.ops;
    let mut all = vec![&comp.mass, &ops.s, &ops.k, &ops.kp, &ops.h];
    all.extend(comp.regularizer.as_ref());
    all.push(system);
    for m in all {
        let path = dir.join(dump_name(geometry, k, m));
        let file = std::fs::File::create(&path).map_err(io_err(&path))?;
        write_matrix(std::io::BufWriter::new(file), m).map_err(io_err(&path))?;
    }
    Ok(())
}

fn sweep_point(
    spec: &OperatorSpec,
    curve: &ParametricCurve,
    alpha: f64,
    k: f64,
    dump_dir: Option<&Path>,
) -> Result<SweepRow> {
    let start = Instant::now();
    let mut row = blank_row(spec, alpha, k);
    let measured = (|| -> std::result::Result<_, BemError> {
        let mesh = build_mesh_capped(curve, k, spec.ppw, spec.dof_cap)?;
        row.n_dof = mesh.n_dof;
        let comp = SystemComponents::assemble(&mesh, k, spec.regularizer, &spec.quadrature)?;
        let b = if row.beta > 0.0 {
            comp.b_impedance(row.eta, row.beta)?
        } else {
            comp.b(row.eta)?
        };
        let sv = extreme_singular_values(&b.data, &comp.mass_tri, &spec.svd)?;
        Ok((comp, b, sv))
    })();
    match measured {
        Ok((comp, b, sv)) => {
            if let Some(dir) = dump_dir {
                dump_all(dir, &row.geometry, k, &comp, &b)?;
            }
            row.sigma_max = sv.sigma_max;
            row.sigma_min = sv.sigma_min;
            row.cond = sv.cond();
            row.iters_max = sv.iterations_max;
            row.iters_min = sv.iterations_min;
            row.status = STATUS_OK.into();
        }
        Err(e) => row.status = status_of(&e),
    }
    row.wall_seconds = start.elapsed().as_secs_f64();
    Ok(row)
}

/// Runs the sweep, writing one CSV row per `k` to `opts.out` as soon as all
/// earlier rows are written.
pub fn run_sweep(spec: &OperatorSpec, opts: &SweepOptions) -> Result<SweepRecord> {
    let alpha = single_alpha(spec)?;
    let curve = make_geometry(spec.geometry, &spec.params)?;
    let (mut table, existing) = Table::open::<SweepRow>(&opts.out, opts.skip_done)?;
    let mut rows: Vec<Option<SweepRow>> = spec
        .k_list
        .iter()
        .map(|&k| {
            let template = blank_row(spec, alpha, k);
            existing.iter().find(|r| same_point(r, &template)).cloned()
        })
        .collect();
    let pending: Vec<(usize, f64)> = spec
        .k_list
        .iter()
        .enumerate()
        .filter(|(i, _)| rows[*i].is_none())
        .map(|(i, &k)| (i, k))
        .collect();
    if let Some(&(_, k)) = pending.first() {
        if let Ok(mesh) = build_mesh_capped(&curve, k, spec.ppw, spec.dof_cap) {
            if let Some(w) = spec.regularizer.diameter_warning(&mesh) {
                eprintln!("warning: {w}");
            }
        }
    }
    run_ordered(
        &pending,
        opts.workers,
        |&(i, k)| {
            (
                i,
                sweep_point(spec, &curve, alpha, k, opts.dump_dir.as_deref()),
            )
        },
        |(i, row)| {
            let row = row?;
            table.push(&row)?;
            rows[i] = Some(row);
            Ok(())
        },
    )?;
    Ok(SweepRecord::from_rows(rows.into_iter().flatten().collect()))
}
