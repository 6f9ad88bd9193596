//! Experiment configuration, read from TOML.
//!
//! ```toml
//! norm = "linf"                 # "l1", "l2" or "linf"
//! n_list = [1000, 10000]
//! replicates = 50
//! base_seed = 7
//! c = 1.0                       # fixed-c experiments
//! beta = 0.0                    # Poisson-limit experiments
//! epsilon = 0.2                 # connectivity
//! alpha = 0.25                  # condition check
//! output_dir = "out"
//! workers = 1
//!
//! [density]
//! kind = "uniform_cube"         # or product, radial_interior, radial_edge, class_h
//! dim = 2
//!
//! [integration]                 # quasi-Monte Carlo fallback
//! budget = 4096
//! shifts = 8
//! rel_tol = 0.05
//!
//! [tolerances]                  # radius solver, relative to the target mass
//! closed_form_rel = 1e-8
//! quadrature_rel = 1e-5
//!
//! [conditions]
//! grid_size = 10
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::density::{ClassHSpec, Density, Hole, IntegrationSettings, Marginal, SupportShape, Tolerances};
use crate::error::{Error, Result};
use crate::norm::{Norm, NormSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DensitySpec {
    UniformCube {
        dim: usize,
    },
    Product {
        marginals: Vec<Marginal>,
    },
    /// A (1 − ‖x‖)^p on the unit ball of the configured norm.
    RadialInterior {
        dim: usize,
        p: u32,
    },
    /// A (‖x‖ − inner)^p between the inner radius and the unit sphere.
    RadialEdge {
        dim: usize,
        inner: f64,
        p: u32,
    },
    ClassH {
        dim: usize,
        support: SupportShape,
        #[serde(default)]
        holes: Vec<Hole>,
    },
}

impl DensitySpec {
    pub fn dim(&self) -> usize {
        match self {
            DensitySpec::Product { marginals } => marginals.len(),
            DensitySpec::UniformCube { dim }
            | DensitySpec::RadialInterior { dim, .. }
            | DensitySpec::RadialEdge { dim, .. }
            | DensitySpec::ClassH { dim, .. } => *dim,
        }
    }

    /// Radial and class-H densities measure distances in `norm`.
    pub fn build(&self, norm: Norm, integration: IntegrationSettings) -> Result<Density> {
        let density = match self {
            DensitySpec::UniformCube { dim } => Density::uniform_cube(*dim)?,
            DensitySpec::Product { marginals } => Density::product(marginals.clone())?,
            DensitySpec::RadialInterior { dim, p } => Density::radial_interior(*dim, *p, norm)?,
            DensitySpec::RadialEdge { dim, inner, p } => Density::radial_edge(*dim, *inner, *p, norm)?,
            DensitySpec::ClassH { dim, support, holes } => Density::class_h(
                *dim,
                ClassHSpec {
                    support: support.clone(),
                    holes: holes.clone(),
                },
                norm,
            )?,
        };
        Ok(density.with_integration(integration))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConditionSettings {
    pub grid_size: usize,
}

impl Default for ConditionSettings {
    fn default() -> Self {
        Self { grid_size: 10 }
    }
}

/// Slack factors for the degree-bound comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DegreeSettings {
    /// Δ_n / log n counts as a violation above upper_slack · c H₊⁻¹(1/c).
    pub upper_slack: f64,
    /// δ_n / log n counts as a violation below lower_slack · c H₋⁻¹(1/c).
    pub lower_slack: f64,
    /// Probe locations whose conditional out-degree is recorded.
    pub probes: Vec<Vec<f64>>,
}

impl Default for DegreeSettings {
    fn default() -> Self {
        Self {
            upper_slack: 1.1,
            lower_slack: 0.9,
            probes: Vec::new(),
        }
    }
}

fn default_c() -> f64 {
    1.0
}

fn default_epsilon() -> f64 {
    0.2
}

fn default_alpha() -> f64 {
    0.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Free-form label; the subcommand decides what runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<String>,
    pub density: DensitySpec,
    pub norm: Norm,
    pub n_list: Vec<f64>,
    pub replicates: usize,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_c")]
    pub c: f64,
    #[serde(default)]
    pub beta: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default)]
    pub integration: IntegrationSettings,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub conditions: ConditionSettings,
    #[serde(default)]
    pub degree: DegreeSettings,
}

impl ExperimentConfig {
    /// A configuration with defaults for everything but the essentials.
    pub fn new(density: DensitySpec, norm: Norm, n_list: Vec<f64>, replicates: usize, base_seed: u64) -> Self {
        Self {
            experiment: None,
            density,
            norm,
            n_list,
            replicates,
            base_seed,
            c: default_c(),
            beta: 0.0,
            epsilon: default_epsilon(),
            alpha: default_alpha(),
            output_dir: None,
            workers: None,
            integration: IntegrationSettings::default(),
            tolerances: Tolerances::default(),
            conditions: ConditionSettings::default(),
            degree: DegreeSettings::default(),
        }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.replicates == 0 {
            return bad("replicates must be at least 1".into());
        }
        if self.n_list.is_empty() {
            return bad("n_list must not be empty".into());
        }
        if self.n_list.iter().any(|n| !(*n > 1.0 && n.is_finite())) {
            return bad("every n in n_list must be a finite number above 1".into());
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return bad("n_list must be strictly increasing".into());
        }
        if self.density.dim() == 0 {
            return bad("density dimension must be at least 1".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        if !(self.c > 0.0) {
            return bad(format!("c must be positive, got {}", self.c));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must be in (0, 1), got {}", self.alpha));
        }
        if !(self.epsilon > 0.0) {
            return bad(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.conditions.grid_size == 0 {
            return bad("conditions.grid_size must be at least 1".into());
        }
        if self.integration.budget == 0 || self.integration.shifts < 2 {
            return bad("integration needs a positive budget and at least two shifts".into());
        }
        for p in &self.degree.probes {
            if p.len() != self.density.dim() {
                return bad(format!("probe {p:?} does not match dimension {}", self.density.dim()));
            }
        }
        Ok(())
    }

    pub fn norm_spec(&self) -> Result<NormSpec> {
        NormSpec::new(self.norm, self.density.dim())
    }

    pub fn build_density(&self) -> Result<Density> {
        self.density.build(self.norm, self.integration)
    }
}
