//! Propagator timing table behind `nlsh bench`.

use std::time::Instant;

use serde::Serialize;

use crate::error::Result;
use crate::field::{Field, Grid};
use crate::hermite::HermiteBasis;
use crate::propagators::{harmonic_propagate, mehler_apply_oracle};

#[derive(Clone, Debug, Serialize)]
pub struct BenchRow {
    pub dim: usize,
    pub n: usize,
    pub reps: usize,
    pub lens_ms: f64,
    /// Excludes building the Hermite table.
    pub hermite_ms: Option<f64>,
    pub mehler_ms: Option<f64>,
}

/// Largest axis size for which the dense transforms are timed.
pub const HERMITE_MAX_N: usize = 1024;
pub const MEHLER_MAX_N: usize = 512;

fn time_ms<F: FnMut()>(reps: usize, mut f: F) -> f64 {
    let start = Instant::now();
    for _ in 0..reps {
        f();
    }
    start.elapsed().as_secs_f64() * 1e3 / reps as f64
}

pub fn bench_propagators(dim: usize, sizes: &[usize], reps: usize) -> Result<Vec<BenchRow>> {
    let reps = reps.max(1);
    let mut rows = Vec::new();
    for &n in sizes {
        let g = Grid::new(dim, 12.0, n)?;
        let f = Field::sample_real(&g, |x| (-0.5 * x.iter().map(|c| c * c).sum::<f64>()).exp())?;
        let lens_ms = time_ms(reps, || {
            std::hint::black_box(harmonic_propagate(&f, 1.0));
        });
        let hermite_ms = if dim == 1 && n <= HERMITE_MAX_N {
            let basis = HermiteBasis::with_default_modes(&g)?;
            let phase = |l: f64| num_complex::Complex64::from_polar(1.0, -l);
            Some(time_ms(reps, || {
                std::hint::black_box(basis.apply(&f, phase).expect("same grid"));
            }))
        } else {
            None
        };
        let mehler_ms = if dim == 1 && n <= MEHLER_MAX_N {
            Some(time_ms(reps, || {
                std::hint::black_box(mehler_apply_oracle(&f, 1.0).expect("regular time"));
            }))
        } else {
            None
        };
        rows.push(BenchRow {
            dim,
            n,
            reps,
            lens_ms,
            hermite_ms,
            mehler_ms,
        });
    }
    Ok(rows)
}

pub fn format_table(rows: &[BenchRow]) -> String {
    let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"));
    let mut s = String::from("dim\tn\treps\tlens_ms\thermite_ms\tmehler_ms\n");
    for r in rows {
        s.push_str(&format!(
            "{}\t{}\t{}\t{:.3}\t{}\t{}\n",
            r.dim,
            r.n,
            r.reps,
            r.lens_ms,
            cell(r.hermite_ms),
            cell(r.mehler_ms)
        ));
    }
    s
}
