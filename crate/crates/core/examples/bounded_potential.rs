//! Replace the trap by a bounded smooth potential and check energy.

use nls_harmonic::nls::{evolve, Potential, SolverConfig};
use nls_harmonic::variational::bounded_potential_energy;
use nls_harmonic::{Field, Grid};

fn main() -> nls_harmonic::Result<()> {
    let g = Grid::new(1, 16.0, 256)?;
    let v = Field::sample_real(&g, |x| x[0].sin() * (-(x[0] / 8.0).powi(8)).exp())?;
    let u0 = Field::sample_real(&g, |x| (-0.5 * x[0] * x[0]).exp())?;
    let mut cfg = SolverConfig::new(1, 1.0, 1e-3, 1.0);
    cfg.adaptive = false;
    cfg.potential = Potential::Bounded(v.clone());
    let run = evolve(&u0, &cfg)?;
    let e0 = bounded_potential_energy(&u0, &v, 1.0, 4.0)?;
    let e1 = bounded_potential_energy(&run.field, &v, 1.0, 4.0)?;
    println!("energy {e0:.10} -> {e1:.10} (relative drift {:.2e})", ((e1 - e0) / e0).abs());
    Ok(())
}
