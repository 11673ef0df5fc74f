//! Pull two concentrated bubbles out of a field and audit the decoupling.

use nls_harmonic::profiles::{decoupling_audit, frame_apply, profile_decompose, ExtractOptions, Frame};
use nls_harmonic::{Field, Grid};

fn main() -> nls_harmonic::Result<()> {
    let g = Grid::new(1, 4.0, 8192)?;
    let mut f = Field::zeros(&g);
    for (x0, n) in [(-1.5, 64.0), (1.0, 128.0)] {
        let frame = Frame::concentrating(0.0, &[x0], n)?;
        let phi = Field::sample_real(&frame.profile_grid(&g)?, |y| (-0.5 * y[0] * y[0]).exp())?;
        f = f.add(&frame_apply(&frame, &phi, &g)?)?;
    }
    let dec = profile_decompose(&f, 4, &ExtractOptions::new(0.1))?;
    for it in &dec.items {
        println!("profile at x = {:+.4}, N = {}", it.frame.x0[0], it.frame.n);
    }
    let audit = decoupling_audit(&f, &dec.items, &dec.remainder)?;
    println!("Sigma decoupling defect {:.2e}", audit.sigma_defect);
    Ok(())
}
