//! Pointwise dispersive decay and the evolved position/momentum identity.

use nls_harmonic::propagators::{dispersive_ratio, heisenberg_observables};
use nls_harmonic::{Field, Grid};

fn main() -> nls_harmonic::Result<()> {
    let g = Grid::new(1, 16.0, 512)?;
    let f = Field::sample_real(&g, |x| (-2.0 * (x[0] - 1.0).powi(2)).exp())?;
    println!("bound (2 pi)^(-1/2) = {:.4}", (2.0 * std::f64::consts::PI).powf(-0.5));
    for t in [0.3, 0.9, 1.5, 2.4] {
        let obs = heisenberg_observables(&f, t)?;
        println!("t = {t}: dispersive ratio {:.4}, observable defect {:.2e}", dispersive_ratio(&f, &[t])?[0], obs.identity_defect);
    }
    Ok(())
}
