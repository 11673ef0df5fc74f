//! JSON run configuration.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{read_nlsh1_file, Field, Grid};
use crate::nls::{default_power, Potential, SolverConfig};
use crate::variational::ground_state_w;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    /// Half-width of the periodic box `[-L, L)^d`.
    #[serde(rename = "L")]
    pub half_width: f64,
    pub n: usize,
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid> {
        Grid::new(self.dim, self.half_width, self.n)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    /// `a exp(-|x - c|²/(2w²)) e^{i k·x}`.
    Gaussian {
        amplitude: f64,
        width: f64,
        #[serde(default)]
        center: Option<Vec<f64>>,
        #[serde(default)]
        momentum: Option<Vec<f64>>,
    },
    /// The tapered ground state `W` times `amplitude` (`d = 3`).
    GroundState {
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// An NLSH1 file; its grid must match `grid`.
    File { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

impl InitialData {
    pub fn build(&self, grid: &Grid, base: &Path) -> Result<Field> {
        match self {
            Self::Gaussian {
                amplitude,
                width,
                center,
                momentum,
            } => {
                let d = grid.dim();
                let c = axis_vector(center.as_deref(), d, "center")?;
                let k = axis_vector(momentum.as_deref(), d, "momentum")?;
                if !(*width > 0.0) {
                    return Err(Error::InvalidArgument(format!("gaussian width {width} must be positive")));
                }
                Field::sample(grid, |x| {
                    let r2: f64 = (0..d).map(|a| (x[a] - c[a]).powi(2)).sum();
                    let phase: f64 = (0..d).map(|a| k[a] * x[a]).sum();
                    Complex64::from_polar(amplitude * (-r2 / (2.0 * width * width)).exp(), phase)
                })
            }
            Self::GroundState { amplitude } => Ok(ground_state_w(grid)?.scale(*amplitude)),
            Self::File { path } => {
                let path = if path.is_absolute() { path.clone() } else { base.join(path) };
                let f = read_nlsh1_file(&path)?;
                if f.grid() != grid {
                    return Err(Error::GridMismatch);
                }
                Ok(f)
            }
        }
    }
}

fn axis_vector(v: Option<&[f64]>, d: usize, what: &str) -> Result<Vec<f64>> {
    match v {
        None => Ok(vec![0.0; d]),
        Some(v) if v.len() == d => Ok(v.to_vec()),
        Some(v) => Err(Error::InvalidArgument(format!("{what} has {} entries for d = {d}", v.len()))),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    #[default]
    Harmonic,
    /// `a sin(x_1) exp(-(|x|/R)^8)`, a bounded smooth perturbation of the trap.
    CappedSin { amplitude: f64, radius: f64 },
    /// `V = E·x`.
    Stark { field: Vec<f64> },
}

impl PotentialSpec {
    pub fn build(&self, grid: &Grid) -> Result<Potential> {
        match self {
            Self::Harmonic => Ok(Potential::Harmonic),
            Self::CappedSin { amplitude, radius } => {
                let r = *radius;
                Ok(Potential::Bounded(Field::sample_real(grid, |x| {
                    let r2: f64 = x.iter().map(|c| c * c).sum();
                    amplitude * x[0].sin() * (-(r2.sqrt() / r).powi(8)).exp()
                })?))
            }
            Self::Stark { field } => {
                axis_vector(Some(field), grid.dim(), "stark field")?;
                Ok(Potential::Stark(field.clone()))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticToggles {
    #[serde(default = "yes")]
    pub csv: bool,
    #[serde(default = "yes")]
    pub virial: bool,
    #[serde(default = "yes")]
    pub final_state: bool,
}

fn yes() -> bool {
    true
}

impl Default for DiagnosticToggles {
    fn default() -> Self {
        Self {
            csv: true,
            virial: true,
            final_state: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Core,
    Spectral,
    Profiles,
    All,
}

/// Everything an `evolve` or `blowup` run needs. Solver fields left out take
/// the solver defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub initial: InitialData,
    pub mu: f64,
    #[serde(default)]
    pub p: Option<f64>,
    pub dt: f64,
    pub t_end: f64,
    #[serde(default)]
    pub order: Option<u8>,
    #[serde(default)]
    pub potential: PotentialSpec,
    #[serde(default)]
    pub picard_tol: Option<f64>,
    #[serde(default)]
    pub picard_max: Option<usize>,
    #[serde(default)]
    pub grad_factor: Option<f64>,
    #[serde(default)]
    pub dt_min: Option<f64>,
    #[serde(default)]
    pub energy_tol: Option<f64>,
    #[serde(default)]
    pub adaptive: Option<bool>,
    #[serde(default)]
    pub spectral_tail: Option<f64>,
    /// Where outputs go when `--out` is not given.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    /// Snapshot and checkpoint cadence in time units.
    #[serde(default)]
    pub checkpoint_every: Option<f64>,
    #[serde(default)]
    pub diagnostics: DiagnosticToggles,
    #[serde(default)]
    pub suite: Option<Suite>,
}

/// A config that failed to parse, with the JSON path of the offending value.
#[derive(Debug)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "config error at `{}`: {}", self.path, self.message)
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> std::result::Result<Self, ConfigError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| ConfigError {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })?;
        cfg.check().map_err(|(path, message)| ConfigError {
            path: path.into(),
            message,
        })?;
        Ok(cfg)
    }

    fn check(&self) -> std::result::Result<(), (&'static str, String)> {
        self.grid.build().map_err(|e| ("grid", e.to_string()))?;
        if !(self.dt > 0.0) {
            return Err(("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_end >= 0.0) {
            return Err(("t_end", format!("must be non-negative, got {}", self.t_end)));
        }
        if let Some(c) = self.checkpoint_every {
            if !(c > 0.0) {
                return Err(("checkpoint_every", format!("must be positive, got {c}")));
            }
        }
        Ok(())
    }

    /// Canonical JSON encoding; the manifest hashes this.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn schema() -> schemars::schema::RootSchema {
        schemars::schema_for!(RunConfig)
    }

    pub fn solver_config(&self) -> Result<SolverConfig> {
        let grid = self.grid.build()?;
        let mut cfg = SolverConfig::new(self.grid.dim, self.mu, self.dt, self.t_end)
            .with_power(self.p.unwrap_or_else(|| default_power(self.grid.dim)));
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { cfg.$f = v; } )* };
        }
        take!(order, picard_tol, picard_max, grad_factor, dt_min, energy_tol, adaptive, spectral_tail);
        cfg.potential = self.potential.build(&grid)?;
        cfg.snapshot_every = self.checkpoint_every;
        cfg.keep_snapshots = self.checkpoint_every.is_some();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn initial_field(&self, base: &Path) -> Result<Field> {
        self.initial.build(&self.grid.build()?, base)
    }
}
