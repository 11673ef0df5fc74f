//! Spacetime functionals of trajectories sampled on a uniform time lattice.

use serde::Serialize;

use crate::diagnostics::{strichartz_exponent, strichartz_integrand};
use crate::field::{spectral, sum, Field};
use crate::profiles::h_half_norm;
use crate::propagators::harmonic_propagate;

/// `u_k = e^{-ikdtH} f` for `k = 0..=steps`.
pub fn linear_trajectory(f: &Field, dt: f64, steps: usize) -> Vec<Field> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(f.clone());
    for k in 0..steps {
        let next = harmonic_propagate(&out[k], dt);
        out.push(next);
    }
    out
}

fn trapezoid(values: &[f64], dt: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => dt * (sum::pairwise(values) - 0.5 * (values[0] + values[n - 1])),
    }
}

/// `∫_I ∫ |u|^q dx dt` by the trapezoid rule in time, with `q` from
/// [`strichartz_exponent`]. `fields[k]` is the state at `t0 + k dt`.
pub fn strichartz_norm(fields: &[Field], dt: f64, p: f64) -> f64 {
    let Some(first) = fields.first() else {
        return 0.0;
    };
    let q = strichartz_exponent(first.grid().dim(), p);
    let integrand: Vec<f64> = fields.iter().map(|u| strichartz_integrand(u, q)).collect();
    trapezoid(&integrand, dt)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LocalSmoothing {
    /// `∫_I ∫ |∇u|² ⟨(x - z)/R⟩^{-3} dx dt`.
    pub functional: f64,
    /// `R (1 + |I|) sup_t ||u||_2 sup_t ||H^{1/2} u||_2`.
    pub bound: f64,
    /// `functional / bound`, and 0 when the bound vanishes.
    pub ratio: f64,
}

/// Morawetz-weighted gradient energy of a linear trajectory against its
/// conserved-quantity bound.
pub fn local_smoothing_functional(fields: &[Field], dt: f64, z: &[f64], r: f64) -> LocalSmoothing {
    let Some(first) = fields.first() else {
        return LocalSmoothing {
            functional: 0.0,
            bound: 0.0,
            ratio: 0.0,
        };
    };
    let grid = first.grid();
    let d = grid.dim();
    let weight: Vec<f64> = (0..grid.len())
        .map(|i| {
            let x = grid.node(i);
            let s: f64 = (0..d).map(|a| ((x[a] - z.get(a).copied().unwrap_or(0.0)) / r).powi(2)).sum();
            (1.0 + s).powf(-1.5)
        })
        .collect();
    let integrand: Vec<f64> = fields
        .iter()
        .map(|u| {
            let grad = spectral::gradient(u);
            let terms: Vec<f64> = (0..grid.len())
                .map(|i| weight[i] * grad.iter().map(|g| g.values()[i].norm_sqr()).sum::<f64>())
                .collect();
            sum::pairwise(&terms) * grid.cell_volume()
        })
        .collect();
    let functional = trapezoid(&integrand, dt);
    let span = dt * (fields.len() - 1) as f64;
    let l2 = fields.iter().map(Field::l2_norm).fold(0.0, f64::max);
    let hh = fields.iter().map(h_half_norm).fold(0.0, f64::max);
    let bound = r * (1.0 + span) * l2 * hh;
    LocalSmoothing {
        functional,
        bound,
        ratio: if bound > 0.0 { functional / bound } else { 0.0 },
    }
}
