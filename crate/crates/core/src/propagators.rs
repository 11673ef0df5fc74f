//! The unitary groups `e^{itΔ/2}` and `e^{-itH}`, the Mehler-kernel oracle,
//! dispersive ratios and the evolved position and momentum observables.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{spectral, Field, Grid};
use crate::hermite::HermiteBasis;

const PARITY_TOL: f64 = 1e-12;
/// Chirp aliasing budget `|γ| L dx` per lens substep.
const CHIRP_BUDGET: f64 = PI / 4.0;

/// `e^{itΔ/2} f`, the Fourier multiplier `e^{-it|k|²/2}`.
pub fn free_propagate(f: &Field, t: f64) -> Field {
    if t == 0.0 {
        return f.clone();
    }
    spectral::apply_multiplier(f, &free_multiplier(f.grid(), t))
}

pub fn free_multiplier(grid: &Grid, t: f64) -> Vec<Complex64> {
    grid.wavenumber_sq()
        .iter()
        .map(|&k2| Complex64::from_polar(1.0, -0.5 * t * k2))
        .collect()
}

/// Chirp and free-time factors of the lens transform at time `t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LensFactors {
    pub t: f64,
    /// `γ(t) = (cos t - 1) / (2 sin t)`, evaluated as `-tan(t/2)/2`.
    pub gamma: f64,
    /// Free-propagation time `sin t`.
    pub s: f64,
}

impl LensFactors {
    pub fn new(t: f64) -> Self {
        Self {
            t,
            gamma: -0.5 * (0.5 * t).tan(),
            s: t.sin(),
        }
    }
}

/// Reduces `t` into `(-π, π]`; returns the reduced time and the number of
/// whole periods removed.
fn reduce(t: f64) -> (f64, f64) {
    let periods = (t / (2.0 * PI)).round();
    let mut r = t - 2.0 * PI * periods;
    let mut p = periods;
    if r <= -PI {
        r += 2.0 * PI;
        p -= 1.0;
    }
    (r, p)
}

fn chirp(f: &Field, gamma: f64) -> Field {
    f.map_nodes(|x, z| {
        let r2: f64 = x.iter().map(|c| c * c).sum();
        z * Complex64::from_polar(1.0, gamma * r2)
    })
}

fn lens_step(f: &Field, t: f64) -> Field {
    let lf = LensFactors::new(t);
    let inner = chirp(f, lf.gamma);
    chirp(&free_propagate(&inner, lf.s), lf.gamma)
}

/// Number of equal lens substeps needed for `|t| <= π/2`.
pub fn lens_substeps(grid: &Grid, t: f64) -> usize {
    let ldx = grid.half_width() * grid.dx();
    let mut m = 1usize;
    while LensFactors::new(t / m as f64).gamma.abs() * ldx >= CHIRP_BUDGET {
        m += 1;
    }
    m
}

/// `e^{-iπH} f = e^{-iπd/2} f(-x)`.
pub fn parity_propagate(f: &Field) -> Field {
    half_period(f, 1.0)
}

/// `e^{∓iπH} f = e^{∓iπd/2} f(-x)` for `sign = ±1`.
fn half_period(f: &Field, sign: f64) -> Field {
    let d = f.grid().dim() as f64;
    f.reflect().scale(Complex64::from_polar(1.0, -0.5 * PI * d * sign))
}

/// `e^{-itH} f` by the lens transform.
///
/// Whole periods contribute the phase `e^{-iπd}`, half periods are the exact
/// parity map, and the remainder `|t| <= π/2` is split into equal substeps
/// small enough that the pointwise chirps do not alias on the grid.
pub fn harmonic_propagate(f: &Field, t: f64) -> Field {
    let d = f.grid().dim() as f64;
    let (mut r, periods) = reduce(t);
    let mut out = f.clone();
    if periods != 0.0 {
        out = out.scale(Complex64::from_polar(1.0, -PI * d * periods));
    }
    if (r - PI).abs() < PARITY_TOL || (r + PI).abs() < PARITY_TOL {
        return parity_propagate(&out);
    }
    if r.abs() > 0.5 * PI {
        out = half_period(&out, r.signum());
        r -= PI * r.signum();
    }
    if r == 0.0 {
        return out;
    }
    let m = lens_substeps(f.grid(), r);
    let dt = r / m as f64;
    for _ in 0..m {
        out = lens_step(&out, dt);
    }
    out
}

/// `e^{-itH} f` through the Hermite eigenbasis with the default mode cap.
pub fn hermite_propagate(f: &Field, t: f64) -> Result<Field> {
    HermiteBasis::with_default_modes(f.grid())?.apply(f, |l| Complex64::from_polar(1.0, -t * l))
}

/// `(2πi sin t)^{-1/2}` on the principal branch, for one axis.
fn mehler_prefactor(s: f64) -> Complex64 {
    Complex64::new(0.0, 2.0 * PI * s).powf(-0.5)
}

/// Reference `e^{-itH} f` by direct quadrature of the Mehler kernel, one axis
/// at a time. Cost is `O(d n^{d+1})`. Only valid away from `sin t = 0`.
pub fn mehler_apply_oracle(f: &Field, t: f64) -> Result<Field> {
    let (r, periods) = reduce(t);
    let s = r.sin();
    if s.abs() <= 0.1 {
        return Err(Error::MehlerSingular(s.abs()));
    }
    let c = r.cos();
    let grid = f.grid();
    let n = grid.n();
    let xs = grid.coords();
    let dx = grid.dx();
    let pre = mehler_prefactor(s) * dx;
    let kernel: Vec<Complex64> = (0..n * n)
        .map(|ij| {
            let (x, y) = (xs[ij / n], xs[ij % n]);
            pre * Complex64::from_polar(1.0, (0.5 * (x * x + y * y) * c - x * y) / s)
        })
        .collect();
    let mut values = f.values().to_vec();
    let shape = grid.shape();
    for axis in 0..grid.dim() {
        crate::field::tensor::map_axis(&mut values, &shape, axis, |line| {
            let out: Vec<Complex64> = (0..n)
                .map(|i| {
                    let row = &kernel[i * n..(i + 1) * n];
                    row.iter().zip(line.iter()).map(|(k, z)| k * z).sum()
                })
                .collect();
            line.copy_from_slice(&out);
        });
    }
    let out = Field::from_raw(grid, values);
    let d = grid.dim() as f64;
    Ok(if periods != 0.0 {
        out.scale(Complex64::from_polar(1.0, -PI * d * periods))
    } else {
        out
    })
}

/// Which implementation of `e^{-itH}` to use.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Lens,
    Hermite,
    Mehler,
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lens" => Ok(Self::Lens),
            "hermite" => Ok(Self::Hermite),
            "mehler" => Ok(Self::Mehler),
            other => Err(Error::InvalidArgument(format!("unknown method {other}"))),
        }
    }
}

pub fn propagate(f: &Field, t: f64, method: Method) -> Result<Field> {
    match method {
        Method::Lens => Ok(harmonic_propagate(f, t)),
        Method::Hermite => hermite_propagate(f, t),
        Method::Mehler => mehler_apply_oracle(f, t),
    }
}

/// `||e^{-itH} f||_∞ |sin t|^{d/2} / ||f||_1` at each time.
pub fn dispersive_ratio(f: &Field, ts: &[f64]) -> Result<Vec<f64>> {
    let l1 = f.lp_norm(1.0);
    let d = f.grid().dim() as f64;
    ts.iter()
        .map(|&t| {
            let s = t.sin().abs();
            if s < 1e-12 {
                return Err(Error::DispersiveSingular(t));
            }
            if l1 == 0.0 {
                return Ok(0.0);
            }
            Ok(harmonic_propagate(f, t).sup_norm() * s.powf(0.5 * d) / l1)
        })
        .collect()
}

/// `P(t) f` and `X(t) f`, componentwise, with consistency measures.
#[derive(Clone, Debug)]
pub struct Observables {
    pub momentum: Vec<Field>,
    pub position: Vec<Field>,
    /// Largest relative L² gap between the conjugated and closed-form results.
    pub defect: f64,
    /// `||P(t) f||² + ||X(t) f||² - ||f||_Σ²`.
    pub identity_defect: f64,
}

/// Evaluates the evolved momentum and position
/// `P(t) = i∇ cos t - x sin t` and `X(t) = i∇ sin t + x cos t` in closed form
/// and by conjugation with the propagator.
///
/// These closed forms are `e^{-itH} A e^{itH}` for `A = i∇, x`; conjugating in
/// the opposite order flips the sign of `t`. Either way
/// `||P(t) f||² + ||X(t) f||² = ||f||_Σ²`.
pub fn heisenberg_observables(f: &Field, t: f64) -> Result<Observables> {
    let d = f.grid().dim();
    let i = Complex64::new(0.0, 1.0);
    let u = harmonic_propagate(f, -t);
    let grad_u = spectral::gradient(&u);
    let grad_f = spectral::gradient(f);
    let (c, s) = (t.cos(), t.sin());
    let mut momentum = Vec::with_capacity(d);
    let mut position = Vec::with_capacity(d);
    let mut defect: f64 = 0.0;
    let mut total = 0.0;
    for a in 0..d {
        let p = harmonic_propagate(&grad_u[a].scale(i), t);
        let x = harmonic_propagate(&u.map_nodes(|x, z| x[a] * z), t);
        let xf = f.map_nodes(|x, z| x[a] * z);
        let p_closed = grad_f[a].scale(i * c).axpy(-s, &xf)?;
        let x_closed = grad_f[a].scale(i * s).axpy(c, &xf)?;
        defect = defect.max(rel_gap(&p, &p_closed)?).max(rel_gap(&x, &x_closed)?);
        total += p.mass() + x.mass();
        momentum.push(p);
        position.push(x);
    }
    Ok(Observables {
        momentum,
        position,
        defect,
        identity_defect: total - f.sigma_sq(),
    })
}

fn rel_gap(a: &Field, b: &Field) -> Result<f64> {
    let diff = a.sub(b)?.l2_norm();
    let scale = a.l2_norm().max(b.l2_norm());
    Ok(if scale > 0.0 { diff / scale } else { diff })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Grid;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn h0(g: &Grid) -> Field {
        Field::sample_real(g, |x| {
            let r2: f64 = x.iter().map(|c| c * c).sum();
            PI.powf(-0.25 * x.len() as f64) * (-0.5 * r2).exp()
        })
        .unwrap()
    }

    /// Sum of shifted, modulated Gaussians: decaying, smooth, not symmetric.
    fn random_bumps(g: &Grid, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = g.dim();
        let bumps: Vec<(Vec<f64>, Vec<f64>, f64, Complex64)> = (0..3)
            .map(|_| {
                let c: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.5..1.5)).collect();
                let k: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let w = rng.gen_range(0.7..1.3);
                let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                (c, k, w, a)
            })
            .collect();
        let f = Field::sample(g, |x| {
            bumps
                .iter()
                .map(|(c, k, w, a)| {
                    let r2: f64 = x.iter().zip(c).map(|(x, c)| (x - c) * (x - c)).sum();
                    let ph: f64 = x.iter().zip(k).map(|(x, k)| x * k).sum();
                    a * Complex64::from_polar((-r2 / (2.0 * w * w)).exp(), ph)
                })
                .sum()
        })
        .unwrap();
        f.scale(1.0 / f.sigma_norm())
    }

    #[test]
    fn lens_chirp_is_small_near_zero() {
        let t = 1e-3;
        assert!((LensFactors::new(t).gamma + t / 4.0).abs() < 1e-8);
        let lf = LensFactors::new(1.0);
        assert!((lf.gamma - (1.0f64.cos() - 1.0) / (2.0 * 1.0f64.sin())).abs() < 1e-15);
    }

    #[test]
    fn free_propagator_on_plane_wave() {
        let g = Grid::new(1, 8.0, 64).unwrap();
        let k = 3.0 * PI / 8.0;
        let f = Field::sample(&g, |x| Complex64::from_polar(1.0, k * x[0])).unwrap();
        let t = 0.77;
        let expected = f.scale(Complex64::from_polar(1.0, -0.5 * t * k * k));
        assert!(free_propagate(&f, t).max_abs_diff(&expected).unwrap() < 1e-12);
        assert_eq!(free_propagate(&f, 0.0), f);
    }

    #[test]
    fn eigenfunction_phase() {
        for (g, tol) in [(Grid::new(1, 16.0, 256).unwrap(), 1e-8), (Grid::new(3, 12.0, 64).unwrap(), 1e-8)] {
            let f = h0(&g);
            let d = g.dim() as f64;
            for t in [0.1, 1.0, PI / 2.0, 3.0, -2.0, 7.5] {
                let expected = f.scale(Complex64::from_polar(1.0, -t * d / 2.0));
                let err = harmonic_propagate(&f, t).relative_l2_error(&expected).unwrap();
                assert!(err < tol, "d = {d}, t = {t}: {err}");
            }
        }
    }

    #[test]
    fn half_and_full_periods() {
        let g = Grid::new(3, 12.0, 32).unwrap();
        let f = random_bumps(&g, 1);
        let half = harmonic_propagate(&f, PI);
        let expected = f.reflect().scale(Complex64::from_polar(1.0, -1.5 * PI));
        assert!(half.sub(&expected).unwrap().l2_norm() < 1e-12);
        let full = harmonic_propagate(&f, 2.0 * PI);
        assert!(full.add(&f).unwrap().l2_norm() < 1e-12);
    }

    #[test]
    fn lens_hermite_mehler_agree() {
        let g = Grid::new(1, 16.0, 256).unwrap();
        let f = random_bumps(&g, 2);
        let t = 0.3;
        let lens = harmonic_propagate(&f, t);
        let herm = hermite_propagate(&f, t).unwrap();
        assert!(lens.relative_l2_error(&herm).unwrap() < 1e-7);
        let meh = mehler_apply_oracle(&f, 1.0).unwrap();
        assert!(harmonic_propagate(&f, 1.0).relative_l2_error(&meh).unwrap() < 1e-4);
    }

    #[test]
    fn mehler_oracle_on_ground_state_and_rejection() {
        let g = Grid::new(1, 16.0, 256).unwrap();
        let f = h0(&g);
        let out = mehler_apply_oracle(&f, PI / 2.0).unwrap();
        let expected = f.scale(Complex64::from_polar(1.0, -PI / 4.0));
        assert!(out.relative_l2_error(&expected).unwrap() < 1e-4);
        assert!((out.l2_norm() - 1.0).abs() < 1e-3);
        assert!(matches!(mehler_apply_oracle(&f, 0.05), Err(Error::MehlerSingular(_))));
    }

    #[test]
    fn group_law_across_the_half_period() {
        let g = Grid::new(1, 16.0, 256).unwrap();
        let f = random_bumps(&g, 3);
        for (s, t) in [(0.4, 0.9), (1.5, 1.7), (3.0, 0.14), (-2.2, 0.5)] {
            let two = harmonic_propagate(&harmonic_propagate(&f, s), t);
            let one = harmonic_propagate(&f, s + t);
            assert!(two.relative_l2_error(&one).unwrap() < 1e-8, "{s} + {t}");
        }
    }

    #[test]
    fn dispersive_ratio_respects_symmetry_and_bound() {
        let g = Grid::new(1, 16.0, 256).unwrap();
        let f = h0(&g);
        let ts: Vec<f64> = (1..=15).map(|i| 0.2 * i as f64).collect();
        let bound = (2.0 * PI).powf(-0.5);
        for r in dispersive_ratio(&f, &ts).unwrap() {
            assert!(r <= bound * (1.0 + 1e-9));
        }
        let a = dispersive_ratio(&f, &[1.1]).unwrap()[0];
        let b = dispersive_ratio(&f, &[2.0 * PI - 1.1]).unwrap()[0];
        assert!((a - b).abs() < 1e-6);
        assert!(dispersive_ratio(&f, &[PI]).is_err());
    }

    #[test]
    fn observables_at_special_times() {
        let g = Grid::new(1, 16.0, 256).unwrap();
        let f = random_bumps(&g, 4);
        assert!(heisenberg_observables(&f, 0.0).unwrap().defect < 1e-9);
        assert!(heisenberg_observables(&f, PI / 2.0).unwrap().defect < 1e-7);
        for t in [0.3, 1.0, 2.5] {
            let o = heisenberg_observables(&f, t).unwrap();
            assert!(o.identity_defect.abs() < 1e-7, "t = {t}: {}", o.identity_defect);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn lens_is_unitary(t in -10.0f64..10.0, seed in 0u64..1000) {
            let g = Grid::new(1, 12.0, 128).unwrap();
            let f = random_bumps(&g, seed);
            let m0 = f.mass();
            prop_assert!((harmonic_propagate(&f, t).mass() / m0 - 1.0).abs() < 1e-10);
            prop_assert!((free_propagate(&f, t).mass() / m0 - 1.0).abs() < 1e-12);
        }
    }
}
