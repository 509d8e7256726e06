//! TOML run configuration for the solver subcommands.
//!
//! ```toml
//! [mesh]
//! n_per_face = 4
//! p = 6
//! strategy = "optimized"     # or "naive", "naive:<order>"
//! alignment = "local"        # or "spherical"
//!
//! [solver]
//! kind = "advect"            # advect | diffuse | maxwell | swe
//! dt = 1e-4                  # any field of the chosen solver's parameter set
//!
//! [output]
//! directory = "out"
//! stem = "bell"
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::FrameAlignment;
use crate::mesh::NodeStrategy;
use crate::solvers::advection::AdvectionCase;
use crate::solvers::diffusion::ReactionDiffusionParams;
use crate::solvers::maxwell::MaxwellParams;
use crate::solvers::swe::{SweRun, WilliamsonCase};
use crate::solvers::DEFAULT_CADENCE;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub mesh: MeshConfig,
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MeshConfig {
    pub n_per_face: usize,
    /// Solution order; the geometry uses the same order.
    pub p: usize,
    pub strategy: String,
    pub alignment: String,
}

impl Default for MeshConfig {
    fn default() -> Self {
        MeshConfig { n_per_face: 4, p: 4, strategy: "optimized".into(), alignment: "local".into() }
    }
}

impl MeshConfig {
    pub fn strategy(&self) -> Result<NodeStrategy> {
        self.strategy.parse().map_err(|e: Error| Error::Config(e.to_string()))
    }

    pub fn alignment(&self) -> Result<FrameAlignment> {
        self.alignment.parse().map_err(|e: Error| Error::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SolverConfig {
    Advect(AdvectionCase),
    Diffuse(ReactionDiffusionParams),
    Maxwell(MaxwellParams),
    Swe(SweConfig),
}

impl SolverConfig {
    pub fn kind(&self) -> &'static str {
        match self {
            SolverConfig::Advect(_) => "advect",
            SolverConfig::Diffuse(_) => "diffuse",
            SolverConfig::Maxwell(_) => "maxwell",
            SolverConfig::Swe(_) => "swe",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweConfig {
    /// steady-zonal, unsteady-zonal, rossby-haurwitz, rossby-haurwitz-disturbed,
    /// isolated-mountain, unstable-jet
    pub case: String,
    /// Flow tilt for the zonal cases.
    pub alpha: Option<f64>,
    /// Days; the case default when absent.
    pub dt: Option<f64>,
    pub t_final: f64,
    pub cadence: usize,
}

impl Default for SweConfig {
    fn default() -> Self {
        SweConfig { case: "steady-zonal".into(), alpha: None, dt: None, t_final: 5.0, cadence: DEFAULT_CADENCE }
    }
}

impl SweConfig {
    pub fn run(&self) -> Result<SweRun> {
        let mut case: WilliamsonCase = self.case.parse().map_err(|e: Error| Error::Config(e.to_string()))?;
        if let Some(a) = self.alpha {
            case = match case {
                WilliamsonCase::SteadyZonal { .. } => WilliamsonCase::SteadyZonal { alpha: a },
                WilliamsonCase::UnsteadyZonal { .. } => WilliamsonCase::UnsteadyZonal { alpha: a },
                _ => return Err(Error::Config(format!("alpha does not apply to {}", self.case))),
            };
        }
        let mut run = SweRun::new(case, self.t_final);
        if let Some(dt) = self.dt {
            run.dt = dt;
        }
        run.cadence = self.cadence;
        Ok(run)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: PathBuf,
    /// File stem; the solver kind when absent.
    pub stem: Option<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig { directory: PathBuf::from("."), stem: None }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Checks everything that can be checked without building a mesh.
    pub fn validate(&self) -> Result<()> {
        let m = &self.mesh;
        if m.n_per_face == 0 {
            return Err(Error::Config("mesh.n_per_face must be positive".into()));
        }
        if !(1..=16).contains(&m.p) {
            return Err(Error::Config(format!("mesh.p = {} outside 1..=16", m.p)));
        }
        m.strategy()?;
        m.alignment()?;
        let (dt, t_final, cadence) = match &self.solver {
            SolverConfig::Advect(c) => {
                c.validate().map_err(|e| Error::Config(e.to_string()))?;
                (c.dt, c.t_final, c.cadence)
            }
            SolverConfig::Diffuse(c) => {
                c.validate().map_err(|e| Error::Config(e.to_string()))?;
                (c.dt, c.t_final, c.cadence)
            }
            SolverConfig::Maxwell(c) => {
                c.validate().map_err(|e| Error::Config(e.to_string()))?;
                (c.dt, c.t_final, c.cadence)
            }
            SolverConfig::Swe(c) => {
                let r = c.run()?;
                (r.dt, r.t_final, r.cadence)
            }
        };
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::Config(format!("dt = {dt} must be positive")));
        }
        if !(t_final >= 0.0 && t_final.is_finite()) {
            return Err(Error::Config(format!("t_final = {t_final} must be non-negative")));
        }
        if cadence == 0 {
            return Err(Error::Config("cadence must be positive".into()));
        }
        Ok(())
    }

    pub fn stem(&self) -> String {
        self.output.stem.clone().unwrap_or_else(|| self.solver.kind().to_string())
    }
}
