use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use helmbem::GeometryId;
use helmbem_cli::config::{
    MeshSection, OperatorSection, SolverSection, WavenumberSection, DEFAULT_GMRES_ALPHAS,
};
use helmbem_cli::{
    dump_geometry, emit_plot, run_gmres_study, run_oracle_circle, run_sweep, run_verify,
    BetaChoice, ConfigFile, OperatorSpec, SweepOptions, WORKERS_ENV,
};

#[derive(Parser)]
#[command(
    name = "helmbem",
    version,
    about = "Regularized combined-field BEM experiments in 2-d"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// TOML configuration file; flags override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    geometry: Option<GeometryId>,
    #[arg(long)]
    kmin: Option<f64>,
    #[arg(long)]
    kmax: Option<f64>,
    #[arg(long)]
    kfactor: Option<f64>,
    /// Explicit wavenumbers, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["kmin", "kmax", "kfactor"])]
    k_list: Option<Vec<f64>>,
    /// Constant `c` of the coupling parameter `η = c k^-α`.
    #[arg(long, allow_negative_numbers = true)]
    eta: Option<f64>,
    /// Exponents `α`, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    eta_alpha: Option<Vec<f64>>,
    #[arg(long, value_parser = ["sik", "s0", "none"])]
    reg: Option<String>,
    /// Constant `a` of the Laplace regularizer.
    #[arg(long)]
    s0_a: Option<f64>,
    /// Impedance coefficient: `0` (Neumann) or `k`.
    #[arg(long)]
    beta: Option<BetaChoice>,
    /// Points per wavelength.
    #[arg(long)]
    ppw: Option<f64>,
    #[arg(long)]
    dof_cap: Option<usize>,
}

impl Common {
    fn config(&self, default_k: Option<&[f64]>) -> Result<ConfigFile> {
        let base = match &self.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let mut merged = base.merged(ConfigFile {
            geometry: self.geometry,
            wavenumbers: WavenumberSection {
                k_list: self.k_list.clone(),
                kmin: self.kmin,
                kmax: self.kmax,
                kfactor: self.kfactor,
            },
            operator: OperatorSection {
                eta: self.eta,
                eta_alpha: self.eta_alpha.clone(),
                regularizer: self.reg.clone(),
                s0_a: self.s0_a,
                beta: self.beta,
            },
            mesh: MeshSection {
                ppw: self.ppw,
                dof_cap: self.dof_cap,
            },
            solver: SolverSection::default(),
            ..Default::default()
        });
        if let Some(ks) = default_k {
            if merged.wavenumbers == WavenumberSection::default() {
                merged.wavenumbers.k_list = Some(ks.to_vec());
            }
        }
        Ok(merged)
    }

    fn spec(&self, default_alphas: &[f64], default_k: Option<&[f64]>) -> Result<OperatorSpec> {
        Ok(self.config(default_k)?.resolve(default_alphas)?)
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: Common,
    /// Output CSV.
    #[arg(long)]
    out: PathBuf,
    /// Keep rows already present in the output and compute only missing ones.
    #[arg(long)]
    skip_done: bool,
    /// Worker slots for independent wavenumbers.
    #[arg(long, env = WORKERS_ENV)]
    workers: Option<usize>,
}

impl RunArgs {
    fn workers(&self) -> usize {
        self.workers
            .filter(|&n| n > 0)
            .unwrap_or_else(helmbem_cli::worker_count)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Extreme singular values of M⁻¹B over a wavenumber list.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        /// Write binary dumps of every assembled matrix into this directory.
        #[arg(long)]
        dump_matrices: Option<PathBuf>,
    },
    /// GMRES iteration counts for plane-wave scattering over η schedules.
    Gmres {
        #[command(flatten)]
        run: RunArgs,
        /// Incidence angle in radians; defaults to π.
        #[arg(long, allow_negative_numbers = true)]
        angle: Option<f64>,
    },
    /// Identity checks as JSON; exits with status 2 when a hard check fails.
    Verify {
        #[command(flatten)]
        common: Common,
    },
    /// Analytic circle spectra and their Galerkin comparison as JSON.
    OracleCircle {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 10)]
        n_max: usize,
    },
    /// Log-log SVG plots of a sweep or GMRES CSV.
    Plot {
        csv: PathBuf,
        /// Output directory; defaults to the directory of the CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Polyline of a boundary as CSV (t, x, y, nx, ny).
    DumpGeometry {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        /// Output file; defaults to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Sweep { run, dump_matrices } => {
            let spec = run.common.spec(&[0.0], None)?;
            let opts = SweepOptions {
                out: run.out.clone(),
                skip_done: run.skip_done,
                dump_dir: dump_matrices,
                workers: run.workers(),
            };
            let record = run_sweep(&spec, &opts)?;
            print_json(&record)?;
        }
        Command::Gmres { run, angle } => {
            let cfg = run.common.config(None)?;
            let spec = cfg.resolve(&DEFAULT_GMRES_ALPHAS)?;
            let angle = angle.unwrap_or(spec.incidence_angle);
            let rows = run_gmres_study(&spec, angle, &run.out, run.skip_done, run.workers())?;
            let unconverged = rows.iter().filter(|r| !r.converged).count();
            if unconverged > 0 {
                eprintln!(
                    "warning: {unconverged} of {} runs did not converge",
                    rows.len()
                );
            }
        }
        Command::Verify { common } => {
            let report = run_verify(&common.spec(&[0.0], Some(&[5.0]))?)?;
            print_json(&report)?;
            if !report.passed {
                return Ok(ExitCode::from(2));
            }
        }
        Command::OracleCircle { mut common, n_max } => {
            common.geometry.get_or_insert(GeometryId::Circle);
            let spec = common.spec(&[0.0], Some(&[5.0]))?;
            print_json(&run_oracle_circle(&spec, n_max)?)?;
        }
        Command::Plot { csv, out } => {
            let dir = out.unwrap_or_else(|| csv.parent().map(PathBuf::from).unwrap_or_default());
            for path in emit_plot(&csv, &dir)? {
                println!("{}", path.display());
            }
        }
        Command::DumpGeometry {
            common,
            samples,
            out,
        } => {
            let cfg = common.config(None)?;
            let id = cfg.geometry.context("no geometry given")?;
            match out {
                Some(path) => {
                    let file =
                        std::fs::File::create(&path).with_context(|| path.display().to_string())?;
                    dump_geometry(
                        id,
                        &cfg.geometry_params,
                        samples,
                        std::io::BufWriter::new(file),
                    )?
                }
                None => dump_geometry(id, &cfg.geometry_params, samples, std::io::stdout().lock())?,
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
