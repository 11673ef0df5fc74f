//! Axis-by-axis application of 1D operators to row-major tensors.

use num_complex::Complex64;

/// Applies `op` in place to every pencil along `axis` of a tensor of shape `shape`.
pub(crate) fn map_axis<F>(values: &mut [Complex64], shape: &[usize], axis: usize, mut op: F)
where
    F: FnMut(&mut [Complex64]),
{
    let len = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut line = vec![Complex64::new(0.0, 0.0); len];
    for o in 0..outer {
        for s in 0..stride {
            let base = o * len * stride + s;
            if stride == 1 {
                op(&mut values[base..base + len]);
                continue;
            }
            for (j, z) in line.iter_mut().enumerate() {
                *z = values[base + j * stride];
            }
            op(&mut line);
            for (j, z) in line.iter().enumerate() {
                values[base + j * stride] = *z;
            }
        }
    }
}

/// Replaces every pencil along `axis` by `op(pencil)`, which may change its length
/// to `new_len`. Returns the new tensor; `shape[axis]` is updated.
pub(crate) fn resize_axis<F>(
    values: &[Complex64],
    shape: &mut [usize],
    axis: usize,
    new_len: usize,
    mut op: F,
) -> Vec<Complex64>
where
    F: FnMut(&[Complex64]) -> Vec<Complex64>,
{
    let len = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); outer * new_len * stride];
    let mut line = vec![Complex64::new(0.0, 0.0); len];
    for o in 0..outer {
        for s in 0..stride {
            let base = o * len * stride + s;
            for (j, z) in line.iter_mut().enumerate() {
                *z = values[base + j * stride];
            }
            let mapped = op(&line);
            debug_assert_eq!(mapped.len(), new_len);
            let obase = o * new_len * stride + s;
            for (j, z) in mapped.into_iter().enumerate() {
                out[obase + j * stride] = z;
            }
        }
    }
    shape[axis] = new_len;
    out
}
