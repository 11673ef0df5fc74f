//! FFT-based spectral operations on periodic grids.
//!
//! Forward transforms are unnormalized; [`inverse`] divides by `n^d`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::sum::pairwise_by;
use super::tensor::map_axis;
use super::{Field, Grid};

type Plans = HashMap<(usize, bool), Arc<dyn Fft<f64>>>;

fn plan(len: usize, inverse: bool) -> Arc<dyn Fft<f64>> {
    static PLANS: OnceLock<Mutex<(FftPlanner<f64>, Plans)>> = OnceLock::new();
    let cell = PLANS.get_or_init(|| Mutex::new((FftPlanner::new(), HashMap::new())));
    let mut guard = cell.lock().expect("fft planner poisoned");
    let (planner, cache) = &mut *guard;
    cache
        .entry((len, inverse))
        .or_insert_with(|| {
            if inverse {
                planner.plan_fft_inverse(len)
            } else {
                planner.plan_fft_forward(len)
            }
        })
        .clone()
}

/// Unnormalized d-dimensional FFT in place over a tensor of the given shape.
pub(crate) fn fft_nd(values: &mut [Complex64], shape: &[usize], inverse: bool) {
    for axis in 0..shape.len() {
        let fft = plan(shape[axis], inverse);
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        map_axis(values, shape, axis, |line| fft.process_with_scratch(line, &mut scratch));
    }
}

/// 1D unnormalized transform of a single line.
pub(crate) fn fft_1d(line: &mut [Complex64], inverse: bool) {
    plan(line.len(), inverse).process(line);
}

pub fn forward(f: &Field) -> Vec<Complex64> {
    let mut v = f.values().to_vec();
    fft_nd(&mut v, &f.grid().shape(), false);
    v
}

pub fn inverse(grid: &Grid, mut spec: Vec<Complex64>) -> Field {
    fft_nd(&mut spec, &grid.shape(), true);
    let scale = 1.0 / grid.len() as f64;
    for z in spec.iter_mut() {
        *z *= scale;
    }
    Field::from_raw(grid, spec)
}

/// Multiplies the spectrum of `f` by `mult` (one entry per FFT bin, row-major).
pub fn apply_multiplier(f: &Field, mult: &[Complex64]) -> Field {
    assert_eq!(mult.len(), f.grid().len(), "multiplier length");
    let mut spec = forward(f);
    for (z, m) in spec.iter_mut().zip(mult) {
        *z *= m;
    }
    inverse(f.grid(), spec)
}

/// Multiplies the spectrum by a symbol evaluated on the wavevector.
pub fn apply_symbol<F: Fn(&[f64]) -> Complex64>(f: &Field, symbol: F) -> Field {
    let mult = symbol_table(f.grid(), symbol);
    apply_multiplier(f, &mult)
}

pub fn symbol_table<F: Fn(&[f64]) -> Complex64>(grid: &Grid, symbol: F) -> Vec<Complex64> {
    let ks = grid.wavenumbers();
    let d = grid.dim();
    (0..grid.len())
        .map(|i| {
            let m = grid.multi_index(i);
            let mut k = [0.0; 3];
            for a in 0..d {
                k[a] = ks[m[a]];
            }
            symbol(&k[..d])
        })
        .collect()
}

/// `d` partial derivatives by the periodic wavenumber multiplier `i k_a`.
/// The Nyquist bin is treated as `-n/2`, which keeps the derivative of real
/// band-limited data real up to that single mode.
pub fn gradient(f: &Field) -> Vec<Field> {
    let grid = f.grid();
    let spec = forward(f);
    let ks = grid.wavenumbers();
    (0..grid.dim())
        .map(|axis| {
            let s: Vec<Complex64> = spec
                .iter()
                .enumerate()
                .map(|(i, z)| z * Complex64::new(0.0, ks[grid.multi_index(i)[axis]]))
                .collect();
            inverse(grid, s)
        })
        .collect()
}

pub fn laplacian(f: &Field) -> Field {
    let k2 = f.grid().wavenumber_sq();
    let mult: Vec<Complex64> = k2.iter().map(|&k| Complex64::new(-k, 0.0)).collect();
    apply_multiplier(f, &mult)
}

/// Discrete Parseval weight: `sum |f|^2 dx^d = fourier_weight * sum |F|^2`.
fn fourier_weight(grid: &Grid) -> f64 {
    grid.cell_volume() / grid.len() as f64
}

/// `||grad f||_2^2`, evaluated on the Fourier side.
pub fn h1dot_sq(f: &Field) -> f64 {
    let spec = forward(f);
    let k2 = f.grid().wavenumber_sq();
    let terms: Vec<f64> = spec.iter().zip(&k2).map(|(z, k)| z.norm_sqr() * k).collect();
    super::sum::pairwise(&terms) * fourier_weight(f.grid())
}

/// Mass computed from the spectrum (Parseval cross-check).
pub fn fourier_mass(f: &Field) -> f64 {
    pairwise_by(&forward(f), |z| z.norm_sqr()) * fourier_weight(f.grid())
}

/// Fraction of spectral energy in bins whose largest axis wavenumber exceeds
/// half the Nyquist frequency.
pub fn top_octave_fraction(f: &Field) -> f64 {
    let grid = f.grid();
    let spec = forward(f);
    let n = grid.n();
    let mut top = Vec::new();
    let mut all = Vec::with_capacity(spec.len());
    for (i, z) in spec.iter().enumerate() {
        let e = z.norm_sqr();
        all.push(e);
        let m = grid.multi_index(i);
        let high = (0..grid.dim()).any(|a| {
            let signed = if m[a] < n / 2 { m[a] } else { n - m[a] };
            signed > n / 4
        });
        if high {
            top.push(e);
        }
    }
    let total = super::sum::pairwise(&all);
    if total == 0.0 {
        0.0
    } else {
        super::sum::pairwise(&top) / total
    }
}
