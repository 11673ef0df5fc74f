//! Run manifests, written before any numerics start.

use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::field::Grid;
use crate::hermite::default_modes;

#[derive(Clone, Debug, Serialize)]
pub struct GridChecks {
    pub dim: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
    pub n: usize,
    pub dx: f64,
    pub nyquist: f64,
    /// Classical turning radius `sqrt(2K + d)` of the default Hermite cap.
    pub hermite_turning_radius: f64,
    /// The cap's turning radius leaves room inside the box.
    pub hermite_fits: bool,
    /// Largest harmonic eigenvalue the grid resolves, `nyquist²/2`.
    pub resolved_energy: f64,
}

impl GridChecks {
    pub fn new(grid: &Grid) -> Self {
        let k = default_modes(grid);
        let turning = ((2 * k + grid.dim()) as f64).sqrt();
        Self {
            dim: grid.dim(),
            half_width: grid.half_width(),
            n: grid.n(),
            dx: grid.dx(),
            nyquist: grid.nyquist(),
            hermite_turning_radius: turning,
            hermite_fits: turning + 1.0 <= grid.half_width(),
            resolved_energy: 0.5 * grid.nyquist().powi(2),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Manifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub args: Vec<String>,
    /// Seconds since the Unix epoch.
    pub started: u64,
    /// SHA-256 of the canonical config (or of the input file for file commands).
    pub config_sha256: Option<String>,
    pub grid: Option<GridChecks>,
    pub float: &'static str,
}

impl Manifest {
    pub fn new(command: &str, args: &[String]) -> Self {
        Self {
            tool: "nlsh",
            version: env!("CARGO_PKG_VERSION"),
            command: command.into(),
            args: args.to_vec(),
            started: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            config_sha256: None,
            grid: None,
            float: "f64",
        }
    }

    pub fn with_hash(mut self, bytes: &[u8]) -> Self {
        self.config_sha256 = Some(sha256_hex(bytes));
        self
    }

    pub fn with_grid(mut self, grid: &Grid) -> Self {
        self.grid = Some(GridChecks::new(grid));
        self
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_stable() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn grid_checks() {
        let g = Grid::new(1, 16.0, 256).unwrap();
        let c = GridChecks::new(&g);
        assert!(c.hermite_fits);
        assert!((c.nyquist - std::f64::consts::PI / g.dx()).abs() < 1e-12);
    }
}
