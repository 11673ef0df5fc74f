//! Periodic Cartesian grids and the complex fields sampled on them.
//!
//! A [`Grid`] discretizes `[-L, L)^d` with `n` nodes per axis. Every other
//! module in the crate works on [`Field`] values, which are immutable in
//! spirit: operations return new fields rather than mutating shared state.

mod io;
mod norms;
mod resample;
pub(crate) mod sum;
pub(crate) mod tensor;
pub mod spectral;

pub use io::{read_nlsh1, read_nlsh1_file, write_nlsh1, write_nlsh1_file, NLSH1_MAGIC};
pub use norms::{apply_weight, boundary_ratio, NormReport};
pub use resample::Overflow;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

/// Uniform periodic grid on `[-L, L)^d` with `n` samples per axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    dim: usize,
    half_width: f64,
    n: usize,
}

impl Grid {
    pub fn new(dim: usize, half_width: f64, n: usize) -> Result<Self> {
        if !(1..=MAX_DIM).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not in 1..=3")));
        }
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!("half-width {half_width} must be positive")));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidGrid(format!("{n} samples per axis: need a power of two >= 8")));
        }
        Ok(Self { dim, half_width, n })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n as f64
    }

    /// Quadrature weight `dx^d`.
    pub fn cell_volume(&self) -> f64 {
        self.dx().powi(self.dim as i32)
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn shape(&self) -> Vec<usize> {
        vec![self.n; self.dim]
    }

    /// Coordinate of node `j` along any axis.
    pub fn coord(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.dx()
    }

    pub fn coords(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.coord(j)).collect()
    }

    /// Wavenumber `pi m / L` of FFT bin `j`, with `m` in `[-n/2, n/2)`.
    pub fn wavenumber(&self, j: usize) -> f64 {
        let m = if j < self.n / 2 { j as f64 } else { j as f64 - self.n as f64 };
        std::f64::consts::PI * m / self.half_width
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.wavenumber(j)).collect()
    }

    pub fn nyquist(&self) -> f64 {
        std::f64::consts::PI / self.dx()
    }

    /// Per-axis indices of the flat row-major index `idx` (axis 0 slowest).
    pub fn multi_index(&self, mut idx: usize) -> [usize; MAX_DIM] {
        let mut out = [0; MAX_DIM];
        for axis in (0..self.dim).rev() {
            out[axis] = idx % self.n;
            idx /= self.n;
        }
        out
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().take(self.dim).fold(0, |acc, &i| acc * self.n + i)
    }

    /// Physical coordinates of the node with flat index `idx`; unused axes are zero.
    pub fn node(&self, idx: usize) -> [f64; MAX_DIM] {
        let m = self.multi_index(idx);
        let mut x = [0.0; MAX_DIM];
        for axis in 0..self.dim {
            x[axis] = self.coord(m[axis]);
        }
        x
    }

    /// `|x|^2` at every node.
    pub fn radius_sq(&self) -> Vec<f64> {
        (0..self.len())
            .map(|i| self.node(i).iter().map(|c| c * c).sum())
            .collect()
    }

    /// `|k|^2` at every FFT bin.
    pub fn wavenumber_sq(&self) -> Vec<f64> {
        let ks = self.wavenumbers();
        (0..self.len())
            .map(|i| {
                let m = self.multi_index(i);
                (0..self.dim).map(|a| ks[m[a]] * ks[m[a]]).sum()
            })
            .collect()
    }

    /// Flat index of the node nearest the origin (exactly the origin, since
    /// `n` is even).
    pub fn origin_index(&self) -> usize {
        self.flat_index(&[self.n / 2; MAX_DIM])
    }
}

/// Complex samples on a [`Grid`], row-major over axes.
#[derive(Clone, Debug, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<Complex64>,
}

impl Field {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            values: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_values(grid: &Grid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::NonFinite {
                coords: grid.node(i)[..grid.dim()].to_vec(),
                value: values[i].to_string(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    /// Samples `f` at every node. Non-finite samples are rejected with the
    /// offending node coordinates.
    pub fn sample<F>(grid: &Grid, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> Complex64,
    {
        let d = grid.dim();
        let values = (0..grid.len()).map(|i| f(&grid.node(i)[..d])).collect();
        Self::from_values(grid, values)
    }

    pub fn sample_real<F>(grid: &Grid, f: F) -> Result<Self>
    where
        F: Fn(&[f64]) -> f64,
    {
        Self::sample(grid, |x| Complex64::new(f(x), 0.0))
    }

    /// Internal constructor for values already known to be finite.
    pub(crate) fn from_raw(grid: &Grid, values: Vec<Complex64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Self {
        Self::from_raw(&self.grid, self.values.iter().map(|&z| f(z)).collect())
    }

    /// Pointwise map with access to the node coordinates.
    pub fn map_nodes<F: Fn(&[f64], Complex64) -> Complex64>(&self, f: F) -> Self {
        let d = self.grid.dim();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(i, &z)| f(&self.grid.node(i)[..d], z))
            .collect();
        Self::from_raw(&self.grid, values)
    }

    pub fn scale(&self, c: impl Into<Complex64>) -> Self {
        let c = c.into();
        self.map(|z| z * c)
    }

    pub fn conj(&self) -> Self {
        self.map(|z| z.conj())
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_raw(
            &self.grid,
            self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_raw(
            &self.grid,
            self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        ))
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: impl Into<Complex64>, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let c = c.into();
        Ok(Self::from_raw(
            &self.grid,
            self.values.iter().zip(&other.values).map(|(a, b)| a + c * b).collect(),
        ))
    }

    /// Pointwise product.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self::from_raw(
            &self.grid,
            self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect(),
        ))
    }

    /// `<f, g> = sum f conj(g) dx^d`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_same(other)?;
        let re: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| (a * b.conj()).re).collect();
        let im: Vec<f64> = self.values.iter().zip(&other.values).map(|(a, b)| (a * b.conj()).im).collect();
        let w = self.grid.cell_volume();
        Ok(Complex64::new(sum::pairwise(&re) * w, sum::pairwise(&im) * w))
    }

    /// Mass `||f||_2^2`.
    pub fn mass(&self) -> f64 {
        let sq: Vec<f64> = self.values.iter().map(|z| z.norm_sqr()).collect();
        sum::pairwise(&sq) * self.grid.cell_volume()
    }

    pub fn l2_norm(&self) -> f64 {
        self.mass().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `||f||_p` by Riemann quadrature; `p = inf` gives the maximum modulus.
    pub fn lp_norm(&self, p: f64) -> f64 {
        if p.is_infinite() {
            return self.sup_norm();
        }
        self.lp_integral(p).powf(1.0 / p)
    }

    /// `int |f|^p` by Riemann quadrature.
    pub fn lp_integral(&self, p: f64) -> f64 {
        let terms: Vec<f64> = self.values.iter().map(|z| z.norm().powf(p)).collect();
        sum::pairwise(&terms) * self.grid.cell_volume()
    }

    /// `||xf||_2^2`.
    pub fn weight_sq(&self) -> f64 {
        let terms: Vec<f64> = self
            .values
            .iter()
            .enumerate()
            .map(|(i, z)| {
                let x = self.grid.node(i);
                let r2: f64 = x.iter().map(|c| c * c).sum();
                r2 * z.norm_sqr()
            })
            .collect();
        sum::pairwise(&terms) * self.grid.cell_volume()
    }

    /// `||f - other||_2 / ||other||_2` (absolute error when `other` vanishes).
    pub fn relative_l2_error(&self, reference: &Self) -> Result<f64> {
        let diff = self.sub(reference)?.l2_norm();
        let scale = reference.l2_norm();
        Ok(if scale > 0.0 { diff / scale } else { diff })
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_same(other)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    /// Reflection `f(-x)`. On the periodic grid node `j` maps to `(n - j) mod n`.
    pub fn reflect(&self) -> Self {
        let g = &self.grid;
        let n = g.n();
        let values = (0..g.len())
            .map(|i| {
                let m = g.multi_index(i);
                let mut r = [0; MAX_DIM];
                for a in 0..g.dim() {
                    r[a] = (n - m[a]) % n;
                }
                self.values[g.flat_index(&r)]
            })
            .collect();
        Self::from_raw(g, values)
    }

    /// Value at the node nearest the origin.
    pub fn at_origin(&self) -> Complex64 {
        self.values[self.grid.origin_index()]
    }
}
