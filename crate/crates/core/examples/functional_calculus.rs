//! Fractional powers of the harmonic oscillator and the Mehler heat flow.

use nls_harmonic::hermite::{apply_power, heat_propagate, mehler_heat};
use nls_harmonic::{Field, Grid};

fn main() -> nls_harmonic::Result<()> {
    let g = Grid::new(1, 16.0, 256)?;
    let f = Field::sample_real(&g, |x| (1.0 + x[0]) * (-0.5 * x[0] * x[0]).exp())?;

    let half = apply_power(&f, 0.5)?;
    let twice = apply_power(&half, 0.5)?;
    println!("H^(1/2) H^(1/2) f vs H f: {:.2e}", twice.relative_l2_error(&apply_power(&f, 1.0)?)?);
    println!("||H^(1/2) f||^2 = {:.12}", half.mass());
    println!("||f||_Sigma^2 / 2 = {:.12}", 0.5 * f.sigma_sq());

    let heat = heat_propagate(&f, 0.3)?;
    println!("e^(-0.3 H) spectral vs Mehler kernel: {:.2e}", heat.relative_l2_error(&mehler_heat(&f, 0.3)?)?);
    Ok(())
}
