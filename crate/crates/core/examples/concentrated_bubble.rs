//! Approximate a highly concentrated solution by a rescaled profile glued to
//! the linear flow, and watch the residual shrink as the scale grows.

use nls_harmonic::profiles::{
    approximation_residual, build_bubble_approximation, rescaled_coupling, Frame, ProfileSolution,
};
use nls_harmonic::{Field, Grid};

fn main() -> nls_harmonic::Result<()> {
    let g = Grid::new(1, 4.0, 16384)?;
    let (mu, p) = (1.0, 4.0);
    for n in [8.0, 16.0, 32.0] {
        let frame = Frame::concentrating(0.0, &[0.0], n)?;
        let phi = Field::sample_real(&frame.profile_grid(&g)?, |y| (-0.5 * y[0] * y[0]).exp())?;
        let dt = 1.0 / (32.0 * n * n);
        let v = ProfileSolution::compute(&phi, rescaled_coupling(mu, p, 1, n), p, n * n * dt, 32, 4)?;
        let traj = build_bubble_approximation(&v, &frame, &g, 1.0, dt, 2.0 / (n * n))?;
        println!("N = {n}: residual {:.4e}", approximation_residual(&traj, mu, p)?.window_aggregate);
    }
    Ok(())
}
