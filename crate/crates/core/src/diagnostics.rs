//! Per-step diagnostic rows and their CSV persistence.

use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::Field;

/// One record; the field order is the CSV column order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub mass: f64,
    pub energy: f64,
    pub e_delta: f64,
    pub sigma_norm: f64,
    pub sup_norm: f64,
    pub virial_f: f64,
    pub strichartz_cum: f64,
}

pub const CSV_HEADER: &str = "t,mass,energy,e_delta,sigma_norm,sup_norm,virial_f,strichartz_cum";

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct DiagnosticsSeries {
    pub rows: Vec<DiagnosticsRow>,
}

impl DiagnosticsSeries {
    pub fn push(&mut self, row: DiagnosticsRow) {
        self.rows.push(row);
    }

    pub fn last(&self) -> Option<&DiagnosticsRow> {
        self.rows.last()
    }

    pub fn first(&self) -> Option<&DiagnosticsRow> {
        self.rows.first()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Times strictly increase and the cumulative Strichartz integral never decreases.
    pub fn validate(&self) -> Result<()> {
        for w in self.rows.windows(2) {
            if !(w[1].t > w[0].t) {
                return Err(Error::NonUniform(format!("time {} does not follow {}", w[1].t, w[0].t)));
            }
            if w[1].strichartz_cum < w[0].strichartz_cum {
                return Err(Error::InvalidArgument("cumulative Strichartz integral decreased".into()));
            }
        }
        Ok(())
    }

    /// Largest `|mass(t) - mass(0)| / mass(0)`.
    pub fn mass_drift(&self) -> f64 {
        self.drift(|r| r.mass)
    }

    /// Largest `|E(t) - E(0)| / |E(0)|`.
    pub fn energy_drift(&self) -> f64 {
        self.drift(|r| r.energy)
    }

    fn drift<F: Fn(&DiagnosticsRow) -> f64>(&self, f: F) -> f64 {
        let Some(first) = self.rows.first() else {
            return 0.0;
        };
        let base = f(first);
        let scale = if base != 0.0 { base.abs() } else { 1.0 };
        self.rows.iter().map(|r| (f(r) - base).abs() / scale).fold(0.0, f64::max)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        for r in &self.rows {
            out.serialize(r).map_err(|e| Error::Format(e.to_string()))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn write_csv_file(&self, path: impl AsRef<Path>) -> Result<()> {
        let file = std::fs::File::create(path)?;
        if self.rows.is_empty() {
            writeln!(&file, "{CSV_HEADER}")?;
            return Ok(());
        }
        self.write_csv(file)
    }
}

/// Spacetime exponent of the Strichartz integral: `2(d+2)/(d-2)` in the
/// energy-critical case `d >= 3`, and the mass-admissible `p(d+2)/2`
/// otherwise (for `d = 1, p = 4` this is 6).
pub fn strichartz_exponent(d: usize, p: f64) -> f64 {
    if d >= 3 {
        2.0 * (d as f64 + 2.0) / (d as f64 - 2.0)
    } else {
        p * (d as f64 + 2.0) / 2.0
    }
}

/// `∫|u|^q dx` at one time.
pub fn strichartz_integrand(u: &Field, q: f64) -> f64 {
    u.lp_integral(q)
}
