use num_complex::Complex64;
use serde::Serialize;

use super::spectral;
use super::{Field, Grid};
use crate::error::{Error, Result};

/// Norms of a single field. `sigma^2 = h1dot^2 + weight^2` by construction.
#[derive(Clone, Debug, Serialize)]
pub struct NormReport {
    /// `(p, ||f||_p)` for each requested exponent; `p = inf` is the sup norm.
    pub lp: Vec<(f64, f64)>,
    pub h1dot: f64,
    pub weight: f64,
    pub sigma: f64,
}

impl NormReport {
    pub fn lp(&self, p: f64) -> Option<f64> {
        self.lp.iter().find(|(q, _)| *q == p).map(|(_, v)| *v)
    }
}

impl Field {
    pub fn norms(&self, ps: &[f64]) -> Result<NormReport> {
        if let Some(p) = ps.iter().find(|p| !(**p >= 1.0)) {
            return Err(Error::InvalidArgument(format!("exponent {p} outside [1, inf]")));
        }
        let h1 = self.h1dot_sq();
        let w = self.weight_sq();
        Ok(NormReport {
            lp: ps.iter().map(|&p| (p, self.lp_norm(p))).collect(),
            h1dot: h1.sqrt(),
            weight: w.sqrt(),
            sigma: (h1 + w).sqrt(),
        })
    }

    pub fn h1dot_sq(&self) -> f64 {
        spectral::h1dot_sq(self)
    }

    /// `||f||_Sigma^2 = ||grad f||^2 + ||x f||^2`.
    pub fn sigma_sq(&self) -> f64 {
        self.h1dot_sq() + self.weight_sq()
    }

    pub fn sigma_norm(&self) -> f64 {
        self.sigma_sq().sqrt()
    }
}

/// Pointwise multiplication by `|x|^{2 gamma}`, `gamma` in `[0, 1]`.
pub fn apply_weight(f: &Field, gamma: f64) -> Result<Field> {
    if !(0.0..=1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!("weight power {gamma} outside [0, 1]")));
    }
    if gamma == 0.0 {
        return Ok(f.clone());
    }
    Ok(f.map_nodes(|x, z| {
        let r2: f64 = x.iter().map(|c| c * c).sum();
        z * r2.powf(gamma)
    }))
}

/// Largest modulus on the outermost layer of nodes relative to the peak.
/// Measures how well the periodic box stands in for the whole space.
pub fn boundary_ratio(f: &Field) -> f64 {
    let g: &Grid = f.grid();
    let peak = f.sup_norm();
    if peak == 0.0 {
        return 0.0;
    }
    let n = g.n();
    let edge = f
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| {
            let m = g.multi_index(*i);
            (0..g.dim()).any(|a| m[a] == 0 || m[a] == n - 1)
        })
        .map(|(_, z): (usize, &Complex64)| z.norm())
        .fold(0.0, f64::max);
    edge / peak
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn h0(g: &Grid) -> Field {
        Field::sample_real(g, |x| {
            let r2: f64 = x.iter().map(|c| c * c).sum();
            PI.powf(-0.25 * x.len() as f64) * (-0.5 * r2).exp()
        })
        .unwrap()
    }

    #[test]
    fn gaussian_sigma_norms() {
        let r = h0(&Grid::new(1, 16.0, 512).unwrap()).norms(&[2.0, f64::INFINITY]).unwrap();
        assert!((r.sigma * r.sigma - 1.0).abs() < 1e-8);
        assert!((r.h1dot * r.h1dot - 0.5).abs() < 1e-8);
        assert!((r.lp(2.0).unwrap() - 1.0).abs() < 1e-10);
        let r3 = h0(&Grid::new(3, 8.0, 32).unwrap()).norms(&[]).unwrap();
        assert!((r3.sigma * r3.sigma - 3.0).abs() < 1e-6);
        assert!(((r3.h1dot.powi(2) + r3.weight.powi(2)) / r3.sigma.powi(2) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn weight_half_on_gaussian() {
        let f = h0(&Grid::new(1, 16.0, 512).unwrap());
        let w = apply_weight(&f, 0.5).unwrap();
        assert!((w.l2_norm() - 0.5f64.sqrt()).abs() < 1e-8);
        assert_eq!(apply_weight(&f, 0.0).unwrap(), f);
        assert!(apply_weight(&f, 1.5).is_err());
    }

    #[test]
    fn rejects_bad_exponent() {
        let f = h0(&Grid::new(1, 8.0, 64).unwrap());
        assert!(f.norms(&[0.5]).is_err());
    }

    #[test]
    fn boundary_ratio_of_gaussian_is_tiny() {
        let f = h0(&Grid::new(2, 10.0, 64).unwrap());
        assert!(boundary_ratio(&f) < 1e-8);
    }
}
