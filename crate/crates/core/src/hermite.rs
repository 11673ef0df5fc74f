//! Functional calculus of `H = -Δ/2 + |x|²/2` through the Hermite eigenbasis.
//!
//! Transforms are tensorized: each axis is handled by a dense `(K+1) x n`
//! table of `h_m(x_j)`. Eigenvalues are `|α| + d/2`.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::cutoff::bump;
use crate::error::{Error, Result};
use crate::field::tensor::resize_axis;
use crate::field::{spectral, Field, Grid};

/// Hermite functions `h_m(x_j)`, `m <= K`, tabulated on one axis of a grid.
#[derive(Clone, Debug)]
pub struct HermiteBasis {
    grid: Grid,
    modes: usize,
    table: Arc<Vec<f64>>,
}

impl HermiteBasis {
    /// Tabulates modes `0..=k`. The turning radius `sqrt(2k + 1)` plus a margin
    /// of 4 must fit in the half-width.
    pub fn new(grid: &Grid, k: usize) -> Result<Self> {
        let turning = ((2 * k + 1) as f64).sqrt();
        if turning + 4.0 > grid.half_width() {
            return Err(Error::GridTooNarrow {
                modes: k,
                turning,
                half_width: grid.half_width(),
            });
        }
        if k >= grid.n() {
            return Err(Error::InvalidArgument(format!("mode cap {k} exceeds samples per axis")));
        }
        let n = grid.n();
        let mut table = vec![0.0; (k + 1) * n];
        for (j, x) in grid.coords().into_iter().enumerate() {
            for (m, h) in hermite_functions(x, k).into_iter().enumerate() {
                table[m * n + j] = h;
            }
        }
        Ok(Self {
            grid: grid.clone(),
            modes: k,
            table: Arc::new(table),
        })
    }

    /// `K = n/4`.
    pub fn with_default_modes(grid: &Grid) -> Result<Self> {
        Self::new(grid, default_modes(grid))
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn value(&self, m: usize, j: usize) -> f64 {
        self.table[m * self.grid.n() + j]
    }

    /// `max |<h_m, h_m'> - δ|` over the tabulated modes, by grid quadrature.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.grid.n();
        let dx = self.grid.dx();
        let mut worst: f64 = 0.0;
        for a in 0..=self.modes {
            for b in a..=self.modes {
                let ra = &self.table[a * n..(a + 1) * n];
                let rb = &self.table[b * n..(b + 1) * n];
                let ip: f64 = ra.iter().zip(rb).map(|(x, y)| x * y).sum::<f64>() * dx;
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((ip - target).abs());
            }
        }
        worst
    }

    pub fn analyze(&self, f: &Field) -> Result<SpectrumH> {
        if f.grid() != &self.grid {
            return Err(Error::GridMismatch);
        }
        let n = self.grid.n();
        let k1 = self.modes + 1;
        let dx = self.grid.dx();
        let mut shape = self.grid.shape();
        let mut values = f.values().to_vec();
        for axis in 0..self.grid.dim() {
            values = resize_axis(&values, &mut shape, axis, k1, |line| {
                (0..k1)
                    .map(|m| {
                        let row = &self.table[m * n..(m + 1) * n];
                        row.iter().zip(line).map(|(h, z)| z * *h).sum::<Complex64>() * dx
                    })
                    .collect()
            });
        }
        let captured: f64 = values.iter().map(|c| c.norm_sqr()).sum();
        Ok(SpectrumH {
            basis: self.clone(),
            coeffs: values,
            tail: f.mass() - captured,
        })
    }

    pub fn synthesize(&self, s: &SpectrumH) -> Field {
        let n = self.grid.n();
        let k1 = self.modes + 1;
        let mut shape = vec![k1; self.grid.dim()];
        let mut values = s.coeffs.clone();
        for axis in 0..self.grid.dim() {
            values = resize_axis(&values, &mut shape, axis, n, |line| {
                (0..n)
                    .map(|j| {
                        line.iter()
                            .enumerate()
                            .map(|(m, c)| c * self.table[m * n + j])
                            .sum::<Complex64>()
                    })
                    .collect()
            });
        }
        Field::from_raw(&self.grid, values)
    }

    /// `F(H) f` for a scalar function of the eigenvalue.
    pub fn apply<F: Fn(f64) -> Complex64>(&self, f: &Field, mult: F) -> Result<Field> {
        Ok(self.synthesize(&self.analyze(f)?.map(mult)))
    }

    /// Largest eigenvalue represented, `d K + d/2`.
    pub fn top_eigenvalue(&self) -> f64 {
        let d = self.grid.dim() as f64;
        d * self.modes as f64 + 0.5 * d
    }
}

pub fn default_modes(grid: &Grid) -> usize {
    grid.n() / 4
}

/// `h_0(x), ..., h_k(x)` by the normalized three-term recurrence. The common
/// factor `e^{-x²/2}` is carried as a separate exponent so that modes near the
/// turning point survive even where the Gaussian alone underflows.
pub fn hermite_functions(x: f64, k: usize) -> Vec<f64> {
    const BIG: f64 = 1e150;
    let mut out = vec![0.0; k + 1];
    let mut log_scale = -0.5 * x * x;
    let mut prev = 0.0;
    let mut cur = PI.powf(-0.25);
    out[0] = cur * log_scale.exp();
    for m in 0..k {
        let next = (2.0 / (m + 1) as f64).sqrt() * x * cur - (m as f64 / (m + 1) as f64).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > BIG {
            cur /= BIG;
            prev /= BIG;
            log_scale += BIG.ln();
        }
        out[m + 1] = cur * log_scale.exp();
    }
    out
}

/// Hermite coefficients `c_α`, row-major over `α ∈ [0, K]^d`.
#[derive(Clone, Debug)]
pub struct SpectrumH {
    basis: HermiteBasis,
    coeffs: Vec<Complex64>,
    tail: f64,
}

impl SpectrumH {
    pub fn basis(&self) -> &HermiteBasis {
        &self.basis
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `||f||² - sum |c_α|²`: mass not captured by the truncated basis.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let k1 = self.basis.modes + 1;
        let d = self.basis.grid.dim();
        let mut a = vec![0; d];
        for axis in (0..d).rev() {
            a[axis] = idx % k1;
            idx /= k1;
        }
        a
    }

    pub fn coefficient(&self, alpha: &[usize]) -> Complex64 {
        let k1 = self.basis.modes + 1;
        self.coeffs[alpha.iter().fold(0, |acc, &a| acc * k1 + a)]
    }

    /// Eigenvalue `|α| + d/2` of each stored coefficient.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let half_d = 0.5 * self.basis.grid.dim() as f64;
        (0..self.coeffs.len())
            .map(|i| self.multi_index(i).iter().sum::<usize>() as f64 + half_d)
            .collect()
    }

    pub fn map<F: Fn(f64) -> Complex64>(&self, mult: F) -> SpectrumH {
        let coeffs = self
            .coeffs
            .iter()
            .zip(self.eigenvalues())
            .map(|(c, l)| c * mult(l))
            .collect();
        SpectrumH {
            basis: self.basis.clone(),
            coeffs,
            tail: 0.0,
        }
    }

    pub fn captured_mass(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }
}

pub fn hermite_analyze(f: &Field, k: usize) -> Result<SpectrumH> {
    HermiteBasis::new(f.grid(), k)?.analyze(f)
}

pub fn apply_spectral_multiplier<F: Fn(f64) -> Complex64>(f: &Field, mult: F, k: usize) -> Result<Field> {
    HermiteBasis::new(f.grid(), k)?.apply(f, mult)
}

/// `H^s f` on the default basis.
pub fn apply_power(f: &Field, s: f64) -> Result<Field> {
    HermiteBasis::with_default_modes(f.grid())?.apply(f, |l| Complex64::new(l.powf(s), 0.0))
}

/// `e^{-tH} f` through the eigenbasis.
pub fn heat_propagate(f: &Field, t: f64) -> Result<Field> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("heat time {t} must be positive")));
    }
    HermiteBasis::with_default_modes(f.grid())?.apply(f, |l| Complex64::new((-t * l).exp(), 0.0))
}

/// `γ̃(t) = (1 - cosh t) / (2 sinh t)`.
pub fn heat_chirp(t: f64) -> f64 {
    (1.0 - t.cosh()) / (2.0 * t.sinh())
}

/// `e^{-tH} f` through the Mehler factorization
/// `e^{γ̃|x|²} e^{sinh(t) Δ/2} e^{γ̃|x|²}`. Works on any grid, including ones too
/// large for a dense Hermite table; all three factors are contractions.
pub fn mehler_heat(f: &Field, t: f64) -> Result<Field> {
    if !(t > 0.0) {
        return Err(Error::InvalidArgument(format!("heat time {t} must be positive")));
    }
    let g = heat_chirp(t);
    let chirp = |x: &[f64], z: Complex64| z * (g * x.iter().map(|c| c * c).sum::<f64>()).exp();
    let s = t.sinh();
    let inner = f.map_nodes(chirp);
    let mult: Vec<Complex64> = f
        .grid()
        .wavenumber_sq()
        .iter()
        .map(|&k2| Complex64::new((-0.5 * s * k2).exp(), 0.0))
        .collect();
    Ok(spectral::apply_multiplier(&inner, &mult).map_nodes(chirp))
}

/// Closed-form kernel `e^{-tH}(x, y)`.
pub fn mehler_heat_kernel(t: f64, x: &[f64], y: &[f64]) -> f64 {
    let d = x.len() as f64;
    let s = t.sinh();
    let g = heat_chirp(t);
    let r2: f64 = x.iter().chain(y).map(|c| c * c).sum();
    let dist2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (g * r2).exp() * (2.0 * PI * s).powf(-0.5 * d) * (-dist2 / (2.0 * s)).exp()
}

/// Free heat kernel `e^{tΔ/2}(x, y)`.
pub fn free_heat_kernel(t: f64, x: &[f64], y: &[f64]) -> f64 {
    let d = x.len() as f64;
    let dist2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (2.0 * PI * t).powf(-0.5 * d) * (-dist2 / (2.0 * t)).exp()
}

/// Which family of Littlewood-Paley multipliers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpKind {
    /// `P_N = ψ(sqrt(H)/N)` from the smooth bump.
    Bump,
    /// `P̃_N = e^{-H/N²} - e^{-4H/N²}`.
    Heat,
}

/// `P_{<=N}` or `P_N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpBand {
    Le,
    Eq,
}

fn check_dyadic(n: f64) -> Result<()> {
    if !(n >= 1.0) || (n.log2() - n.log2().round()).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!("frequency {n} is not a dyadic N >= 1")));
    }
    Ok(())
}

/// Scalar symbol of a Littlewood-Paley projector as a function of the
/// eigenvalue. Frequencies below 1 are absent, so `P_1 = P_{<=1}`.
pub fn lp_symbol(kind: LpKind, band: LpBand, n: f64) -> Result<impl Fn(f64) -> f64> {
    check_dyadic(n)?;
    let le = move |m: f64, l: f64| match kind {
        LpKind::Bump => bump(l.sqrt() / m),
        LpKind::Heat => (-l / (m * m)).exp(),
    };
    Ok(move |l: f64| match band {
        LpBand::Le => le(n, l),
        LpBand::Eq if n == 1.0 => le(1.0, l),
        LpBand::Eq => le(n, l) - le(n / 2.0, l),
    })
}

pub fn littlewood_paley_project(f: &Field, n: f64, kind: LpKind, band: LpBand) -> Result<Field> {
    let sym = lp_symbol(kind, band, n)?;
    HermiteBasis::with_default_modes(f.grid())?.apply(f, |l| Complex64::new(sym(l), 0.0))
}

/// Largest dyadic `N` whose bump band meets the represented spectrum.
pub fn ladder_top(basis: &HermiteBasis) -> f64 {
    let top = basis.top_eigenvalue().sqrt();
    let mut n = 1.0;
    while 2.0 * n < 2.0 * top {
        n *= 2.0;
    }
    n
}

/// The dyadic ladder `(N, P_N f)` for `N = 1, 2, ..., N_max`, with every band
/// above `N_max` folded into the top projector so the pieces sum to `f`
/// on the represented spectrum.
pub fn lp_ladder(f: &Field, kind: LpKind) -> Result<Vec<(f64, Field)>> {
    let basis = HermiteBasis::with_default_modes(f.grid())?;
    let spec = basis.analyze(f)?;
    let top = ladder_top(&basis);
    let mut out = Vec::new();
    let mut n = 1.0;
    while n <= top {
        let piece = if n == top && n > 1.0 {
            let below = lp_symbol(kind, LpBand::Le, n / 2.0)?;
            spec.map(|l| Complex64::new(1.0 - below(l), 0.0))
        } else if n == top {
            spec.map(|_| Complex64::new(1.0, 0.0))
        } else {
            let sym = lp_symbol(kind, LpBand::Eq, n)?;
            spec.map(|l| Complex64::new(sym(l), 0.0))
        };
        out.push((n, basis.synthesize(&piece)));
        n *= 2.0;
    }
    Ok(out)
}

/// `||(sum_N |P_N f|²)^{1/2}||_2` over the ladder.
pub fn square_function_norm(pieces: &[(f64, Field)]) -> f64 {
    let Some((_, first)) = pieces.first() else {
        return 0.0;
    };
    let mut acc = vec![0.0; first.grid().len()];
    for (_, p) in pieces {
        for (a, z) in acc.iter_mut().zip(p.values()) {
            *a += z.norm_sqr();
        }
    }
    (acc.iter().sum::<f64>() * first.grid().cell_volume()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn h0(g: &Grid) -> Field {
        Field::sample_real(g, |x| {
            let r2: f64 = x.iter().map(|c| c * c).sum();
            PI.powf(-0.25 * x.len() as f64) * (-0.5 * r2).exp()
        })
        .unwrap()
    }

    fn grid1() -> Grid {
        Grid::new(1, 16.0, 256).unwrap()
    }

    /// A random combination of low Hermite modes: smooth, decaying, band-limited.
    fn random_field(g: &Grid, seed: u64) -> Field {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = HermiteBasis::new(g, 12).unwrap();
        let spec = basis.analyze(&Field::zeros(g)).unwrap();
        let coeffs: Vec<Complex64> = (0..spec.coefficients().len())
            .map(|i| {
                let a = spec.multi_index(i);
                if a.iter().sum::<usize>() <= 12 {
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                } else {
                    Complex64::new(0.0, 0.0)
                }
            })
            .collect();
        basis.synthesize(&SpectrumH {
            basis: basis.clone(),
            coeffs,
            tail: 0.0,
        })
    }

    #[test]
    fn orthonormal_on_default_grids() {
        assert!(HermiteBasis::with_default_modes(&grid1()).unwrap().orthonormality_defect() < 1e-8);
        let g3 = Grid::new(3, 12.0, 64).unwrap();
        assert!(HermiteBasis::with_default_modes(&g3).unwrap().orthonormality_defect() < 1e-8);
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let g = Grid::new(1, 6.0, 256).unwrap();
        assert!(matches!(
            HermiteBasis::with_default_modes(&g),
            Err(Error::GridTooNarrow { .. })
        ));
    }

    #[test]
    fn recurrence_survives_gaussian_underflow() {
        // h_m at x = 40 for m near 900 is not negligible even though e^{-800} underflows.
        let hs = hermite_functions(40.0, 900);
        assert_eq!(PI.powf(-0.25) * (-800.0f64).exp(), 0.0);
        assert!(hs[900].abs() > 1e-3);
        assert!(hs.iter().all(|h| h.is_finite()));
    }

    #[test]
    fn analyze_basis_elements() {
        let g = grid1();
        let s = hermite_analyze(&h0(&g), 64).unwrap();
        assert!((s.coefficient(&[0]) - 1.0).norm() < 1e-8);
        assert!(s.coefficients()[1..].iter().all(|c| c.norm() < 1e-8));
        assert!(s.tail().abs() < 1e-8);
        let xh = h0(&g).map_nodes(|x, z| x[0] * z);
        let s = hermite_analyze(&xh, 64).unwrap();
        assert!((s.coefficient(&[1]).re - 0.5f64.sqrt()).abs() < 1e-8);
        for (i, c) in s.coefficients().iter().enumerate() {
            if i != 1 {
                assert!(c.norm() < 1e-8);
            }
        }
    }

    #[test]
    fn roundtrip_random_fields() {
        let g = grid1();
        let basis = HermiteBasis::with_default_modes(&g).unwrap();
        for seed in 0..3 {
            let f = random_field(&g, seed);
            let back = basis.synthesize(&basis.analyze(&f).unwrap());
            assert!(back.relative_l2_error(&f).unwrap() < 1e-7);
        }
    }

    #[test]
    fn multipliers_on_eigenfunction() {
        let g = grid1();
        let f = h0(&g);
        let id = apply_spectral_multiplier(&f, |_| Complex64::new(1.0, 0.0), 64).unwrap();
        assert!(id.relative_l2_error(&f).unwrap() < 1e-8);
        let hf = apply_spectral_multiplier(&f, |l| Complex64::new(l, 0.0), 64).unwrap();
        assert!(hf.relative_l2_error(&f.scale(0.5)).unwrap() < 1e-8);
    }

    #[test]
    fn quadratic_form_identity() {
        let g = grid1();
        for seed in 0..3 {
            let f = random_field(&g, 10 + seed);
            let lhs = apply_power(&f, 0.5).unwrap().mass();
            let rhs = 0.5 * f.sigma_sq();
            assert!((lhs / rhs - 1.0).abs() < 1e-8, "seed {seed}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn composition_and_self_adjointness() {
        let g = grid1();
        let basis = HermiteBasis::with_default_modes(&g).unwrap();
        let (f, h) = (random_field(&g, 3), random_field(&g, 4));
        let a = |l: f64| Complex64::new((-0.1 * l).exp(), 0.0);
        let b = |l: f64| Complex64::new(1.0 / (1.0 + l), 0.0);
        let ab = basis.apply(&basis.apply(&f, b).unwrap(), a).unwrap();
        let direct = basis.apply(&f, |l| a(l) * b(l)).unwrap();
        assert!(ab.relative_l2_error(&direct).unwrap() < 1e-9);
        let lhs = basis.apply(&f, a).unwrap().inner(&h).unwrap();
        let rhs = f.inner(&basis.apply(&h, a).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-9 * lhs.norm().max(1.0));
    }

    #[test]
    fn heat_semigroup_routes_agree() {
        let g = grid1();
        let f = h0(&g);
        let t = 0.7;
        let e = heat_propagate(&f, t).unwrap();
        assert!(e.relative_l2_error(&f.scale((-0.5 * t).exp())).unwrap() < 1e-8);
        let r = random_field(&g, 7);
        let two = heat_propagate(&heat_propagate(&r, 0.3).unwrap(), 0.4).unwrap();
        let one = heat_propagate(&r, 0.7).unwrap();
        assert!(two.relative_l2_error(&one).unwrap() < 1e-8);
        let m = mehler_heat(&r, 0.7).unwrap();
        assert!(m.relative_l2_error(&one).unwrap() < 1e-8);
    }

    #[test]
    fn heat_kernel_is_dominated_by_free_heat() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let t = rng.gen_range(0.05..3.0);
            let x = [rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)];
            let y = [rng.gen_range(-4.0..4.0), rng.gen_range(-4.0..4.0)];
            let k = mehler_heat_kernel(t, &x, &y);
            assert!(k >= 0.0 && k <= free_heat_kernel(t, &x, &y) * (1.0 + 1e-12));
        }
    }

    #[test]
    fn ladder_sums_to_identity_for_both_kinds() {
        let g = grid1();
        let f = random_field(&g, 11);
        for kind in [LpKind::Bump, LpKind::Heat] {
            let pieces = lp_ladder(&f, kind).unwrap();
            let mut sum = Field::zeros(&g);
            for (_, p) in &pieces {
                sum = sum.add(p).unwrap();
            }
            assert!(sum.relative_l2_error(&f).unwrap() < 1e-8, "{kind:?}");
        }
    }

    #[test]
    fn square_function_is_comparable_to_l2() {
        let g = grid1();
        let f = random_field(&g, 12);
        let pieces = lp_ladder(&f, LpKind::Bump).unwrap();
        let ratio = square_function_norm(&pieces) / f.l2_norm();
        assert!((0.5f64.sqrt()..=1.0 + 1e-12).contains(&ratio), "{ratio}");
    }

    #[test]
    fn derivative_equivalence_on_bands() {
        let g = grid1();
        let f = random_field(&g, 13);
        let n_top = ladder_top(&HermiteBasis::with_default_modes(&g).unwrap());
        let mut n = 1.0;
        while n < n_top {
            let p = littlewood_paley_project(&f, n, LpKind::Bump, LpBand::Eq).unwrap();
            if p.l2_norm() > 1e-6 * f.l2_norm() {
                let hp = apply_power(&p, 0.5).unwrap();
                let r = hp.l2_norm() / (n * p.l2_norm());
                assert!((0.25..=4.0).contains(&r), "N = {n}: {r}");
            }
            n *= 2.0;
        }
    }

    #[test]
    fn rejects_non_dyadic_frequency() {
        let f = h0(&grid1());
        assert!(littlewood_paley_project(&f, 0.5, LpKind::Bump, LpBand::Eq).is_err());
        assert!(littlewood_paley_project(&f, 3.0, LpKind::Heat, LpBand::Le).is_err());
    }
}
