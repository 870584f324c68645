//! Run configuration: a TOML file, overridden by command-line flags, resolved
//! into an [`OperatorSpec`].

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use helmbem::{GeometryId, GeometryParams, QuadratureOrders, RegularizerChoice, SvdOptions};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const DEFAULT_ETA: f64 = 0.5;
pub const DEFAULT_PPW: f64 = 10.0;
pub const DEFAULT_GMRES_TOL: f64 = 1e-6;
/// `k = 5·2ⁿ`, `n = 0..=4`.
pub const DEFAULT_K_LIST: [f64; 5] = [5.0, 10.0, 20.0, 40.0, 80.0];
/// Exponents of the GMRES study schedules `η = c k^{-α}`.
pub const DEFAULT_GMRES_ALPHAS: [f64; 4] = [0.0, 1.0 / 6.0, 1.0 / 3.0, 0.5];

/// Impedance coefficient: Neumann (`0`) or `β = k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum BetaChoice {
    #[default]
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "k")]
    K,
}

impl BetaChoice {
    pub fn value(self, k: f64) -> f64 {
        match self {
            BetaChoice::Zero => 0.0,
            BetaChoice::K => k,
        }
    }
}

impl FromStr for BetaChoice {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "0" => Ok(BetaChoice::Zero),
            "k" => Ok(BetaChoice::K),
            other => Err(CliError::Config(format!(
                "beta must be `0` or `k`, got `{other}`"
            ))),
        }
    }
}

impl fmt::Display for BetaChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BetaChoice::Zero => "0",
            BetaChoice::K => "k",
        })
    }
}

/// `η(k) = c · k^{-α}`
#[derive(Debug, Clone, PartialEq)]
pub struct EtaSchedule {
    pub c: f64,
    pub alphas: Vec<f64>,
}

impl EtaSchedule {
    pub fn eta(&self, alpha: f64, k: f64) -> f64 {
        self.c * k.powf(-alpha)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct WavenumberSection {
    pub k_list: Option<Vec<f64>>,
    pub kmin: Option<f64>,
    pub kmax: Option<f64>,
    pub kfactor: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct OperatorSection {
    pub eta: Option<f64>,
    pub eta_alpha: Option<Vec<f64>>,
    pub regularizer: Option<String>,
    pub s0_a: Option<f64>,
    pub beta: Option<BetaChoice>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeshSection {
    pub ppw: Option<f64>,
    pub dof_cap: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSection {
    pub sigma_tol: Option<f64>,
    pub sigma_max_iter: Option<usize>,
    pub gmres_tol: Option<f64>,
    /// Defaults to `n_dof + 2`.
    pub gmres_max_iter: Option<usize>,
    /// Incidence angle of the plane wave, radians.
    pub incidence_angle: Option<f64>,
}

/// Contents of a `--config` file. Every key is optional.
#[derive(Debug, Clone, Default, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub geometry: Option<GeometryId>,
    pub geometry_params: GeometryParams,
    pub wavenumbers: WavenumberSection,
    pub operator: OperatorSection,
    pub mesh: MeshSection,
    pub solver: SolverSection,
    pub quadrature: Option<QuadratureOrders>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Layers `over` on top of `self`: any key set in `over` wins.
    pub fn merged(mut self, over: ConfigFile) -> Self {
        fn pick<T>(base: &mut Option<T>, over: Option<T>) {
            if over.is_some() {
                *base = over;
            }
        }
        pick(&mut self.geometry, over.geometry);
        pick(
            &mut self.geometry_params.radius,
            over.geometry_params.radius,
        );
        pick(
            &mut self.geometry_params.semi_x,
            over.geometry_params.semi_x,
        );
        pick(
            &mut self.geometry_params.semi_y,
            over.geometry_params.semi_y,
        );
        pick(&mut self.geometry_params.side, over.geometry_params.side);
        let w = over.wavenumbers;
        if w.k_list.is_some() {
            self.wavenumbers = WavenumberSection {
                k_list: w.k_list,
                ..Default::default()
            };
        } else if w.kmin.is_some() || w.kmax.is_some() || w.kfactor.is_some() {
            self.wavenumbers.k_list = None;
            pick(&mut self.wavenumbers.kmin, w.kmin);
            pick(&mut self.wavenumbers.kmax, w.kmax);
            pick(&mut self.wavenumbers.kfactor, w.kfactor);
        }
        let o = over.operator;
        pick(&mut self.operator.eta, o.eta);
        pick(&mut self.operator.eta_alpha, o.eta_alpha);
        pick(&mut self.operator.regularizer, o.regularizer);
        pick(&mut self.operator.s0_a, o.s0_a);
        pick(&mut self.operator.beta, o.beta);
        pick(&mut self.mesh.ppw, over.mesh.ppw);
        pick(&mut self.mesh.dof_cap, over.mesh.dof_cap);
        let s = over.solver;
        pick(&mut self.solver.sigma_tol, s.sigma_tol);
        pick(&mut self.solver.sigma_max_iter, s.sigma_max_iter);
        pick(&mut self.solver.gmres_tol, s.gmres_tol);
        pick(&mut self.solver.gmres_max_iter, s.gmres_max_iter);
        pick(&mut self.solver.incidence_angle, s.incidence_angle);
        pick(&mut self.quadrature, over.quadrature);
        self
    }

    /// Validated spec; `default_alphas` applies when no `eta_alpha` is set.
    pub fn resolve(&self, default_alphas: &[f64]) -> Result<OperatorSpec, CliError> {
        let geometry = self.geometry.ok_or_else(|| {
            CliError::Config("no geometry given (use --geometry or `geometry = ...`)".into())
        })?;
        let k_list = self.k_list()?;
        let c = self.operator.eta.unwrap_or(DEFAULT_ETA);
        if c == 0.0 || !c.is_finite() {
            return Err(CliError::Config(format!(
                "eta must be finite and nonzero, got {c}"
            )));
        }
        let alphas = self
            .operator
            .eta_alpha
            .clone()
            .unwrap_or_else(|| default_alphas.to_vec());
        if alphas.is_empty() || alphas.iter().any(|a| !a.is_finite()) {
            return Err(CliError::Config(
                "eta_alpha must be a nonempty list of finite exponents".into(),
            ));
        }
        let s0_a = self
            .operator
            .s0_a
            .unwrap_or(RegularizerChoice::DEFAULT_S0_A);
        if !(s0_a > 0.0) || !s0_a.is_finite() {
            return Err(CliError::Config(format!(
                "s0_a must be positive, got {s0_a}"
            )));
        }
        let regularizer = match self.operator.regularizer.as_deref().unwrap_or("sik") {
            "s0" => RegularizerChoice::S0 { a: s0_a },
            other => other.parse::<RegularizerChoice>()?,
        };
        let ppw = self.mesh.ppw.unwrap_or(DEFAULT_PPW);
        if !(ppw >= 2.0) || !ppw.is_finite() {
            return Err(CliError::Config(format!(
                "ppw must be at least 2, got {ppw}"
            )));
        }
        let dof_cap = self
            .mesh
            .dof_cap
            .unwrap_or(helmbem::geometry::DEFAULT_DOF_CAP);
        let defaults = SvdOptions::default();
        let svd = SvdOptions {
            tol: self.solver.sigma_tol.unwrap_or(defaults.tol),
            max_iter: self.solver.sigma_max_iter.unwrap_or(defaults.max_iter),
        };
        let gmres_tol = self.solver.gmres_tol.unwrap_or(DEFAULT_GMRES_TOL);
        for (name, v) in [("sigma_tol", svd.tol), ("gmres_tol", gmres_tol)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(CliError::Config(format!(
                    "{name} must lie in (0, 1), got {v}"
                )));
            }
        }
        let quadrature = self.quadrature.unwrap_or_default();
        quadrature.validate()?;
        Ok(OperatorSpec {
            geometry,
            params: self.geometry_params,
            k_list,
            eta: EtaSchedule { c, alphas },
            regularizer,
            beta: self.operator.beta.unwrap_or_default(),
            ppw,
            dof_cap,
            svd,
            gmres_tol,
            gmres_max_iter: self.solver.gmres_max_iter,
            incidence_angle: self.solver.incidence_angle.unwrap_or(std::f64::consts::PI),
            quadrature,
        })
    }

    fn k_list(&self) -> Result<Vec<f64>, CliError> {
        let w = &self.wavenumbers;
        let ks = if let Some(list) = &w.k_list {
            list.clone()
        } else if w.kmin.is_some() || w.kmax.is_some() || w.kfactor.is_some() {
            let kmin = w.kmin.unwrap_or(DEFAULT_K_LIST[0]);
            let kmax = w.kmax.unwrap_or(DEFAULT_K_LIST[DEFAULT_K_LIST.len() - 1]);
            let factor = w.kfactor.unwrap_or(2.0);
            if !(factor > 1.0) || !factor.is_finite() {
                return Err(CliError::Config(format!(
                    "kfactor must exceed 1, got {factor}"
                )));
            }
            if !(kmin > 0.0) || !(kmax >= kmin) || !kmax.is_finite() {
                return Err(CliError::Config(format!(
                    "need 0 < kmin <= kmax, got {kmin} and {kmax}"
                )));
            }
            let mut ks = Vec::new();
            let mut n = 0;
            loop {
                let k = kmin * factor.powi(n);
                if k > kmax * (1.0 + 1e-12) {
                    break;
                }
                ks.push(k);
                n += 1;
            }
            ks
        } else {
            DEFAULT_K_LIST.to_vec()
        };
        if ks.is_empty() {
            return Err(CliError::Config("empty wavenumber list".into()));
        }
        if ks.iter().any(|&k| !(k > 0.0) || !k.is_finite()) {
            return Err(CliError::Config(
                "wavenumbers must be positive and finite".into(),
            ));
        }
        if ks.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Config(
                "wavenumbers must be strictly increasing".into(),
            ));
        }
        Ok(ks)
    }
}

/// One fully specified family of systems.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    pub geometry: GeometryId,
    pub params: GeometryParams,
    pub k_list: Vec<f64>,
    pub eta: EtaSchedule,
    pub regularizer: RegularizerChoice,
    pub beta: BetaChoice,
    pub ppw: f64,
    pub dof_cap: usize,
    pub svd: SvdOptions,
    pub gmres_tol: f64,
    pub gmres_max_iter: Option<usize>,
    pub incidence_angle: f64,
    pub quadrature: QuadratureOrders,
}

impl OperatorSpec {
    /// Spec with every default and the given geometry.
    pub fn new(geometry: GeometryId) -> Self {
        ConfigFile {
            geometry: Some(geometry),
            ..Default::default()
        }
        .resolve(&[0.0])
        .expect("defaults are valid")
    }

    pub fn with_k_list(mut self, ks: &[f64]) -> Self {
        self.k_list = ks.to_vec();
        self
    }

    pub fn with_regularizer(mut self, reg: RegularizerChoice) -> Self {
        self.regularizer = reg;
        self
    }

    pub fn with_eta(mut self, c: f64, alphas: &[f64]) -> Self {
        self.eta = EtaSchedule {
            c,
            alphas: alphas.to_vec(),
        };
        self
    }

    pub fn with_beta(mut self, beta: BetaChoice) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_ppw(mut self, ppw: f64) -> Self {
        self.ppw = ppw;
        self
    }
}
