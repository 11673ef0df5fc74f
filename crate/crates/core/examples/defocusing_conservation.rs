//! Defocusing quintic evolution in the trap with mass and energy tracking.

use nls_harmonic::nls::{evolve, SolverConfig};
use nls_harmonic::{Field, Grid};

fn main() -> nls_harmonic::Result<()> {
    let g = Grid::new(1, 16.0, 256)?;
    let u0 = Field::sample_real(&g, |x| 1.5 * (-0.5 * (x[0] - 1.0).powi(2)).exp())?;
    let mut cfg = SolverConfig::new(1, 1.0, 1e-3, 2.0);
    cfg.adaptive = false;
    let run = evolve(&u0, &cfg)?;
    println!("status {:?} after {} steps", run.status, run.steps);
    println!("mass drift {:.2e}, energy drift {:.2e}", run.series.mass_drift(), run.series.energy_drift());
    Ok(())
}
