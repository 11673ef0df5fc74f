//! Compare the lens, Hermite and Mehler propagators on a displaced Gaussian.

use nls_harmonic::propagators::{harmonic_propagate, hermite_propagate, mehler_apply_oracle};
use nls_harmonic::{Field, Grid};

fn main() -> nls_harmonic::Result<()> {
    let g = Grid::new(1, 16.0, 256)?;
    let f = Field::sample_real(&g, |x| (-0.5 * (x[0] - 2.0).powi(2)).exp())?;
    for t in [0.5, 1.0, 2.0, std::f64::consts::PI] {
        let lens = harmonic_propagate(&f, t);
        let hermite = hermite_propagate(&f, t)?;
        let mehler = mehler_apply_oracle(&f, t).and_then(|m| m.relative_l2_error(&lens));
        println!(
            "t = {t:.4}  <x> moves to {:+.4}  lens-hermite {:.2e}  lens-mehler {}",
            lens.map_nodes(|x, z| x[0] * z).inner(&lens)?.re / lens.mass(),
            hermite.relative_l2_error(&lens)?,
            mehler.map_or("singular".into(), |e| format!("{e:.2e}"))
        );
    }
    Ok(())
}
