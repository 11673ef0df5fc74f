//! Affine resampling `g(x) = f(scale * (x - center))` between periodic grids by
//! Fourier cropping or zero-padding, exact for band-limited data.

use num_complex::Complex64;

use super::spectral::fft_1d;
use super::tensor::resize_axis;
use super::{Field, Grid};
use crate::error::{Error, Result};

/// What to do when part of the source does not land on the target grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Overflow {
    /// Reject if more than a negligible fraction of the source mass is lost.
    Strict,
    /// Drop whatever falls outside.
    Truncate,
}

const LOST_MASS_TOL: f64 = 1e-10;

impl Field {
    /// Samples `x -> self(scale * (x - center))` on `target`.
    ///
    /// `scale * target.dx() / self.grid().dx()` must be a power of two (either
    /// side of one). Positions outside the source box read as zero.
    pub fn resample_affine(
        &self,
        target: &Grid,
        scale: f64,
        center: &[f64],
        overflow: Overflow,
    ) -> Result<Field> {
        let src = self.grid();
        let d = src.dim();
        if target.dim() != d || center.len() != d {
            return Err(Error::InvalidArgument("resample: dimension mismatch".into()));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidArgument(format!("resample scale {scale} must be positive")));
        }
        let rho = scale * target.dx() / src.dx();
        let log = rho.log2();
        if (log - log.round()).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "resample step ratio {rho} is not a power of two"
            )));
        }
        let rho = 2f64.powi(log.round() as i32);
        let ns = src.n();
        let fine = ns as f64 / rho;
        if fine < 2.0 || fine > (1usize << 26) as f64 {
            return Err(Error::InvalidArgument(format!("resample step ratio {rho} out of range")));
        }
        let np = fine as usize;
        let step = scale * target.dx();

        let mut shape = src.shape();
        let mut values = self.values().to_vec();
        let (mut lost, mut total) = (0.0, 0.0);
        for axis in 0..d {
            let y0 = scale * (-target.half_width() - center[axis]);
            let offset = (y0 + src.half_width()) / step;
            let near = offset.round();
            let a = if (offset - near).abs() < 1e-9 { near } else { offset.floor() };
            let frac = offset - a;
            let a = a as i64;
            let nt = target.n();
            values = resize_axis(&values, &mut shape, axis, nt, |line| {
                let v = refine_line(line, np, frac);
                let mut out = vec![Complex64::new(0.0, 0.0); nt];
                for (i, z) in out.iter_mut().enumerate() {
                    let j = a + i as i64;
                    if (0..np as i64).contains(&j) {
                        *z = v[j as usize];
                    }
                }
                let all: f64 = v.iter().map(|z| z.norm_sqr()).sum();
                let kept: f64 = out.iter().map(|z| z.norm_sqr()).sum();
                total += all;
                lost += (all - kept).max(0.0);
                out
            });
        }
        if overflow == Overflow::Strict && total > 0.0 && lost / total > LOST_MASS_TOL {
            return Err(Error::SupportOverflow {
                scale,
                detail: format!("{:.3e} of the mass maps outside the target box", lost / total),
            });
        }
        Field::from_values(target, values)
    }
}

/// Band-limited values of a periodic line of length `ns` at the `np` points
/// `j + frac` of the uniform grid with `np` nodes over the same period.
fn refine_line(line: &[Complex64], np: usize, frac: f64) -> Vec<Complex64> {
    let ns = line.len();
    if np == ns && frac == 0.0 {
        return line.to_vec();
    }
    let mut spec = line.to_vec();
    fft_1d(&mut spec, false);
    let half = ns.min(np) / 2;
    let mut out = vec![Complex64::new(0.0, 0.0); np];
    let norm = 1.0 / ns as f64;
    // Signed modes strictly inside the shared band; the Nyquist bin is dropped.
    for m in -(half as i64) + 1..half as i64 {
        let src_bin = m.rem_euclid(ns as i64) as usize;
        let dst_bin = m.rem_euclid(np as i64) as usize;
        let phase = Complex64::from_polar(norm, 2.0 * std::f64::consts::PI * m as f64 * frac / np as f64);
        out[dst_bin] = spec[src_bin] * phase;
    }
    fft_1d(&mut out, true);
    out
}
