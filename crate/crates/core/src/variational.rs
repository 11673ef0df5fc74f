//! Energies, the ground state `W`, energy trapping and the virial certificate.
//!
//! Sign conventions: the nonlinearity is `μ|u|^p u`, so the potential energy
//! density is `2μ/(p+2) |u|^{p+2}` and `μ = -1` is focusing. For `d = 3, p = 4`
//! this is `-(1 - 2/d)|u|^6`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{spectral, Field, Grid, Overflow};
use crate::quadrature::radial_integral;

/// One pass of the quadratures that every energy is assembled from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct Energies {
    pub mass: f64,
    /// `E = ||∇u||²/2 + ||xu||²/2 + 2μ/(p+2) ||u||_{p+2}^{p+2}`.
    pub energy: f64,
    /// `E_Δ = ||∇u||²/2 + 2μ/(p+2) ||u||_{p+2}^{p+2}`.
    pub e_delta: f64,
    /// `||∇u||_2²`.
    pub grad_sq: f64,
    /// `||u||_{p+2}^{p+2}`.
    pub potential: f64,
    /// `||xu||_2²`.
    pub weight_sq: f64,
}

impl Energies {
    pub fn sigma_sq(&self) -> f64 {
        self.grad_sq + self.weight_sq
    }
}

pub fn energy_functionals(u: &Field, mu: f64, p: f64) -> Energies {
    let grad_sq = spectral::h1dot_sq(u);
    let weight_sq = u.weight_sq();
    let potential = if mu == 0.0 { 0.0 } else { u.lp_integral(p + 2.0) };
    let nonlinear = 2.0 * mu / (p + 2.0) * potential;
    Energies {
        mass: u.mass(),
        energy: 0.5 * grad_sq + 0.5 * weight_sq + nonlinear,
        e_delta: 0.5 * grad_sq + nonlinear,
        grad_sq,
        potential,
        weight_sq,
    }
}

/// Energy with a bounded external potential `V` in place of the trap:
/// `||∇u||²/2 + ∫V|u|² + 2μ/(p+2) ||u||_{p+2}^{p+2}`.
pub fn bounded_potential_energy(u: &Field, v: &Field, mu: f64, p: f64) -> Result<f64> {
    if u.grid() != v.grid() {
        return Err(Error::GridMismatch);
    }
    let vu: Vec<f64> = u
        .values()
        .iter()
        .zip(v.values())
        .map(|(z, v)| v.re * z.norm_sqr())
        .collect();
    let pot = crate::field::sum::pairwise(&vu) * u.grid().cell_volume();
    let nl = if mu == 0.0 { 0.0 } else { 2.0 * mu / (p + 2.0) * u.lp_integral(p + 2.0) };
    Ok(0.5 * spectral::h1dot_sq(u) + pot + nl)
}

/// The two normalizations of the ground state found in the literature.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WNormalization {
    /// `(1 + 2|x|²/(d(d-2)))^{-(d-2)/2}`, which solves `ΔW/2 + W^{(d+2)/(d-2)} = 0`.
    Doubled,
    /// `(1 + |x|²/(d(d-2)))^{-(d-2)/2}`, which solves `ΔW + W^{(d+2)/(d-2)} = 0`.
    Plain,
}

/// Radial closed form of `W` and its derivative.
#[derive(Clone, Copy, Debug)]
pub struct GroundState {
    pub d: usize,
    pub normalization: WNormalization,
}

impl GroundState {
    pub fn new(d: usize) -> Result<Self> {
        Self::with_normalization(d, WNormalization::Doubled)
    }

    pub fn with_normalization(d: usize, normalization: WNormalization) -> Result<Self> {
        if d < 3 {
            return Err(Error::Unsupported(format!("ground state needs d >= 3, got {d}")));
        }
        Ok(Self { d, normalization })
    }

    fn a(&self) -> f64 {
        let dd = (self.d * (self.d - 2)) as f64;
        match self.normalization {
            WNormalization::Doubled => 2.0 / dd,
            WNormalization::Plain => 1.0 / dd,
        }
    }

    fn exponent(&self) -> f64 {
        0.5 * (self.d as f64 - 2.0)
    }

    pub fn value(&self, r: f64) -> f64 {
        (1.0 + self.a() * r * r).powf(-self.exponent())
    }

    pub fn derivative(&self, r: f64) -> f64 {
        let a = self.a();
        -self.exponent() * 2.0 * a * r * (1.0 + a * r * r).powf(-self.exponent() - 1.0)
    }

    /// Critical Sobolev exponent `2d/(d-2)`.
    pub fn critical_exponent(&self) -> f64 {
        2.0 * self.d as f64 / (self.d as f64 - 2.0)
    }

    /// `||∇W||²` and `||W||_{2d/(d-2)}^{2d/(d-2)}` by quadrature of the closed
    /// form over the whole space (substitution `r = tan θ`).
    pub fn constants(&self) -> GroundStateConstants {
        let q = self.critical_exponent();
        let d = self.d;
        let over_space = |g: &dyn Fn(f64) -> f64| {
            let integrand = |th: f64| {
                if th >= 0.5 * PI {
                    return 0.0;
                }
                let r = th.tan();
                let jac = 1.0 + r * r;
                r.powi(d as i32 - 1) * g(r) * jac
            };
            crate::quadrature::sphere_area(d)
                * crate::quadrature::adaptive_simpson(&integrand, 0.0, 0.5 * PI, 1e-13)
        };
        let grad_sq = over_space(&|r| self.derivative(r).powi(2));
        let potential = over_space(&|r| self.value(r).powf(q));
        GroundStateConstants {
            grad_sq,
            potential,
            e_delta: 0.5 * grad_sq - (1.0 - 2.0 / d as f64) * potential,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GroundStateConstants {
    pub grad_sq: f64,
    pub potential: f64,
    pub e_delta: f64,
}

/// `C²` taper equal to 1 up to `r1` and 0 from `r2`.
#[derive(Clone, Copy, Debug)]
pub struct Taper {
    pub r1: f64,
    pub r2: f64,
}

impl Taper {
    /// Taper that ends two units inside the box: `r2 = L - 2`, `r1 = r2 / 2`.
    pub fn for_grid(grid: &Grid) -> Self {
        let r2 = grid.half_width() - 2.0;
        Self { r1: 0.5 * r2, r2 }
    }

    fn u(&self, r: f64) -> f64 {
        ((r - self.r1) / (self.r2 - self.r1)).clamp(0.0, 1.0)
    }

    pub fn value(&self, r: f64) -> f64 {
        let u = self.u(r);
        1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
    }

    pub fn derivative(&self, r: f64) -> f64 {
        let u = self.u(r);
        if u <= 0.0 || u >= 1.0 {
            return 0.0;
        }
        -30.0 * u * u * (1.0 - u) * (1.0 - u) / (self.r2 - self.r1)
    }
}

impl GroundState {
    /// `W` times a taper, sampled on `grid`.
    pub fn sample(&self, grid: &Grid, taper: Taper) -> Result<Field> {
        if grid.dim() != self.d {
            return Err(Error::InvalidArgument("grid dimension differs from ground state".into()));
        }
        Field::sample_real(grid, |x| {
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            self.value(r) * taper.value(r)
        })
    }

    /// Radial-quadrature oracle for the tapered profile: `(||∇u||², ||u||_q^q, E_Δ)`.
    pub fn tapered_constants(&self, taper: Taper) -> GroundStateConstants {
        let q = self.critical_exponent();
        let w = |r: f64| self.value(r) * taper.value(r);
        let dw = |r: f64| self.derivative(r) * taper.value(r) + self.value(r) * taper.derivative(r);
        let br = [taper.r1, taper.r2];
        let grad_sq = radial_integral(self.d, |r| dw(r).powi(2), &br, taper.r2, 1e-12);
        let potential = radial_integral(self.d, |r| w(r).powf(q), &br, taper.r2, 1e-12);
        GroundStateConstants {
            grad_sq,
            potential,
            e_delta: 0.5 * grad_sq - (1.0 - 2.0 / self.d as f64) * potential,
        }
    }
}

/// `W` with the default normalization and taper on a 3D grid; `W(0) = 1`.
pub fn ground_state_w(grid: &Grid) -> Result<Field> {
    let w = GroundState::new(grid.dim())?;
    w.sample(grid, Taper::for_grid(grid))
}

/// Where to measure the elliptic residual.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ResidualRegion {
    Full,
    /// Only inside the untapered core `|x| <= r1`.
    Core,
}

/// `||ΔW/2 + W^{(d+2)/(d-2)}||_2` for the sampled, tapered ground state.
pub fn elliptic_residual(grid: &Grid, region: ResidualRegion) -> Result<f64> {
    let gs = GroundState::new(grid.dim())?;
    let taper = Taper::for_grid(grid);
    let w = gs.sample(grid, taper)?;
    let power = (gs.d as f64 + 2.0) / (gs.d as f64 - 2.0);
    let lap = spectral::laplacian(&w);
    let res = lap.scale(0.5).add(&w.map(|z| num_complex::Complex64::new(z.re.powf(power), 0.0)))?;
    let res = match region {
        ResidualRegion::Full => res,
        ResidualRegion::Core => res.map_nodes(|x, z| {
            let r = x.iter().map(|c| c * c).sum::<f64>().sqrt();
            if r <= taper.r1 {
                z
            } else {
                num_complex::Complex64::new(0.0, 0.0)
            }
        }),
    };
    Ok(res.l2_norm())
}

/// Sobolev quotient `||u||_{2d/(d-2)} / ||∇u||_2`.
pub fn sobolev_quotient(u: &Field) -> f64 {
    let d = u.grid().dim() as f64;
    let q = 2.0 * d / (d - 2.0);
    u.lp_norm(q) / spectral::h1dot_sq(u).sqrt()
}

/// Energy-critical rescaling `λ^{(d-2)/2} u(λx)` on the same grid. `λ` must
/// be a power of two.
pub fn critical_rescale(u: &Field, lambda: f64) -> Result<Field> {
    let d = u.grid().dim();
    let s = u.resample_affine(u.grid(), lambda, &vec![0.0; d], Overflow::Truncate)?;
    Ok(s.scale(lambda.powf(0.5 * (d as f64 - 2.0))))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Trapping {
    TrappedBelow,
    TrappedAbove,
    OutsideHypotheses,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrappingReport {
    pub class: Trapping,
    pub energies: Energies,
    pub threshold_grad_sq: f64,
    pub threshold_e_delta: f64,
    /// `1 - E_Δ(u)/E_Δ(W)`.
    pub delta0: f64,
    /// For trapped fields below, whether `||u||_Σ <= ||∇W||_2` held.
    pub sigma_bound: Option<bool>,
    /// For trapped fields above, `||∇u||²/2 - ||u||_6^6 + δ0 E_Δ(W)` (should be `<= 0`).
    pub virial_gap: Option<f64>,
}

/// Focusing classification against the ground-state thresholds (`d = 3`).
pub fn energy_trapping_classify(u: &Field) -> Result<TrappingReport> {
    static CONSTANTS: std::sync::OnceLock<GroundStateConstants> = std::sync::OnceLock::new();
    if u.grid().dim() != 3 {
        return Err(Error::Unsupported("energy trapping is defined for d = 3".into()));
    }
    let w = *CONSTANTS.get_or_init(|| GroundState::new(3).expect("d = 3").constants());
    let e = energy_functionals(u, -1.0, 4.0);
    let delta0 = 1.0 - e.e_delta / w.e_delta;
    let class = if e.energy < w.e_delta {
        if e.grad_sq <= w.grad_sq {
            Trapping::TrappedBelow
        } else {
            Trapping::TrappedAbove
        }
    } else {
        Trapping::OutsideHypotheses
    };
    Ok(TrappingReport {
        class,
        energies: e,
        threshold_grad_sq: w.grad_sq,
        threshold_e_delta: w.e_delta,
        delta0,
        sigma_bound: (class == Trapping::TrappedBelow).then(|| e.sigma_sq() <= w.grad_sq),
        virial_gap: (class == Trapping::TrappedAbove)
            .then(|| 0.5 * e.grad_sq - e.potential + delta0 * w.e_delta),
    })
}

/// `f(t) = ||xu||²` and its first two time derivatives, evaluated from a single field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VirialSample {
    pub t: f64,
    pub f: f64,
    /// `2 Im ∫ ū x·∇u`.
    pub df: f64,
    /// `2||∇u||² + 2dpμ/(p+2) ||u||_{p+2}^{p+2} - 2||xu||²`.
    pub d2f: f64,
}

pub fn virial_sample(u: &Field, t: f64, mu: f64, p: f64) -> VirialSample {
    let grid = u.grid();
    let d = grid.dim() as f64;
    let grad = spectral::gradient(u);
    let terms: Vec<f64> = (0..grid.len())
        .map(|i| {
            let x = grid.node(i);
            let z = u.values()[i].conj();
            (0..grid.dim()).map(|a| (z * grad[a].values()[i]).im * x[a]).sum()
        })
        .collect();
    let df = 2.0 * crate::field::sum::pairwise(&terms) * grid.cell_volume();
    let e = energy_functionals(u, mu, p);
    VirialSample {
        t,
        f: e.weight_sq,
        df,
        d2f: 2.0 * e.grad_sq + 2.0 * d * p * mu / (p + 2.0) * e.potential - 2.0 * e.weight_sq,
    }
}

/// Quadratic majorant `f(t0 + τ) <= A + Bτ + Cτ²/2` with `C < 0`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Certificate {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "B")]
    pub b: f64,
    #[serde(rename = "C")]
    pub c: f64,
    /// Absolute time `t0 + τ*` where the majorant vanishes.
    pub root: f64,
    pub window: [f64; 2],
}

#[derive(Clone, Debug, Serialize)]
pub struct VirialReport {
    pub samples: Vec<VirialSample>,
    /// Centered second differences of `f` at interior samples.
    pub second_differences: Vec<f64>,
    pub max_mismatch: f64,
    pub tolerance: f64,
    pub consistent: bool,
    pub min_f: f64,
    pub certificate: Option<Certificate>,
}

/// Compares finite differences of `f` with the analytic `f''` and, when `f''`
/// stays negative, emits the lifespan certificate.
pub fn virial_diagnostics(samples: &[VirialSample]) -> Result<VirialReport> {
    if samples.len() < 5 {
        return Err(Error::NonUniform(format!("need at least 5 samples, got {}", samples.len())));
    }
    let dt = samples[1].t - samples[0].t;
    for w in samples.windows(2) {
        if ((w[1].t - w[0].t) - dt).abs() > 1e-9 * dt.abs().max(1.0) || !(dt > 0.0) {
            return Err(Error::NonUniform(format!("step {} differs from {dt}", w[1].t - w[0].t)));
        }
    }
    let mut second = Vec::new();
    let mut mismatch: f64 = 0.0;
    for i in 1..samples.len() - 1 {
        let fd = (samples[i + 1].f - 2.0 * samples[i].f + samples[i - 1].f) / (dt * dt);
        mismatch = mismatch.max((fd - samples[i].d2f).abs());
        second.push(fd);
    }
    // Centered differences are off by dt²/12 f''''; estimate f'''' from the
    // analytic f'' samples and allow three times the resulting bound.
    let fourth = (1..samples.len() - 1)
        .map(|i| ((samples[i + 1].d2f - 2.0 * samples[i].d2f + samples[i - 1].d2f) / (dt * dt)).abs())
        .fold(0.0, f64::max);
    let scale = samples.iter().map(|s| s.d2f.abs().max(s.f.abs())).fold(0.0, f64::max);
    let tolerance = 3.0 * dt * dt * fourth + 1e-8 * scale.max(1.0);
    let c = samples.iter().map(|s| s.d2f).fold(f64::NEG_INFINITY, f64::max);
    let first = samples[0];
    let last = samples[samples.len() - 1];
    let certificate = (c < 0.0).then(|| {
        let (a, b) = (first.f, first.df);
        let tau = (b + (b * b - 2.0 * a * c).sqrt()) / (-c);
        Certificate {
            a,
            b,
            c,
            root: first.t + tau,
            window: [first.t, last.t],
        }
    });
    Ok(VirialReport {
        samples: samples.to_vec(),
        second_differences: second,
        max_mismatch: mismatch,
        tolerance,
        consistent: mismatch <= tolerance,
        min_f: samples.iter().map(|s| s.f).fold(f64::INFINITY, f64::min),
        certificate,
    })
}
