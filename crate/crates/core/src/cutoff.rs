//! The smooth cutoff shared by the Littlewood-Paley bumps and the spatial
//! localizations of profiles.

use std::sync::OnceLock;

use crate::quadrature::gauss_legendre;

const RULE: usize = 48;

fn rule() -> &'static (Vec<f64>, Vec<f64>, f64) {
    static RULE_CELL: OnceLock<(Vec<f64>, Vec<f64>, f64)> = OnceLock::new();
    RULE_CELL.get_or_init(|| {
        let (x, w) = gauss_legendre(RULE);
        let z = raw_integral(&x, &w, 1.0);
        (x, w, z)
    })
}

fn kernel(v: f64) -> f64 {
    if v <= 0.0 || v >= 1.0 {
        0.0
    } else {
        (-1.0 / (v * (1.0 - v))).exp()
    }
}

fn raw_integral(x: &[f64], w: &[f64], u: f64) -> f64 {
    let h = 0.5 * u;
    x.iter().zip(w).map(|(x, w)| w * kernel(h * (x + 1.0))).sum::<f64>() * h
}

/// `int_0^u e^{-1/(v(1-v))} dv`, normalized to reach 1 at `u = 1`.
fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    if u >= 1.0 {
        return 1.0;
    }
    let (x, w, z) = rule();
    // The kernel is symmetric about 1/2; integrate the shorter side.
    if u <= 0.5 {
        raw_integral(x, w, u) / z
    } else {
        1.0 - raw_integral(x, w, 1.0 - u) / z
    }
}

/// `phi(s) = 1` for `|s| <= 1`, `0` for `|s| >= 2`, smooth and monotone between.
pub fn bump(s: f64) -> f64 {
    1.0 - smooth_step(s.abs() - 1.0)
}

/// Dyadic annulus `psi(s) = phi(s) - phi(2s)`, supported in `1/2 <= |s| <= 2`.
pub fn annulus(s: f64) -> f64 {
    bump(s) - bump(2.0 * s)
}
