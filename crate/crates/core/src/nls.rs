//! Time integration of `i u_t = Hu + μ|u|^p u` and its bounded-potential
//! variants: split-step evolution, the Duhamel fixed point, and blowup halts.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{strichartz_exponent, DiagnosticsRow, DiagnosticsSeries};
use crate::error::{Error, Result};
use crate::field::{spectral, Field};
use crate::propagators::{free_propagate, harmonic_propagate};
use crate::variational::{bounded_potential_energy, energy_functionals, virial_sample, VirialSample};

/// The linear part of the equation.
#[derive(Clone, Debug, PartialEq)]
pub enum Potential {
    /// `H = -Δ/2 + |x|²/2`, stepped exactly by the lens transform.
    Harmonic,
    /// `-Δ/2 + V` with a sampled, real, bounded `V`.
    Bounded(Field),
    /// `-Δ/2 + E·x`.
    Stark(Vec<f64>),
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Sign of the nonlinearity; `-1` focusing, `+1` defocusing, `0` linear.
    pub mu: f64,
    pub p: f64,
    pub dt: f64,
    pub t_end: f64,
    /// 1 for Lie splitting, 2 for Strang.
    pub order: u8,
    pub potential: Potential,
    pub picard_tol: f64,
    pub picard_max: usize,
    /// Halt once `||∇u||` exceeds this multiple of its initial value.
    pub grad_factor: f64,
    pub dt_min: f64,
    /// Halve `dt` when a step changes the energy by more than this relative amount.
    pub energy_tol: f64,
    pub adaptive: bool,
    /// Halt when the top-octave spectral energy fraction exceeds this.
    pub spectral_tail: f64,
    /// Snapshot cadence; snapshots land exactly on multiples of it.
    pub snapshot_every: Option<f64>,
    /// Keep snapshot fields (not only their virial samples).
    pub keep_snapshots: bool,
}

impl SolverConfig {
    /// Energy-critical defaults: `p = 4/(d-2)` for `d = 3`, otherwise `p = 4`.
    pub fn new(d: usize, mu: f64, dt: f64, t_end: f64) -> Self {
        Self {
            mu,
            p: default_power(d),
            dt,
            t_end,
            order: 2,
            potential: Potential::Harmonic,
            picard_tol: 1e-10,
            picard_max: 50,
            grad_factor: 1e2,
            dt_min: 1e-9,
            energy_tol: 1e-6,
            adaptive: true,
            spectral_tail: 1e-6,
            snapshot_every: None,
            keep_snapshots: false,
        }
    }

    pub fn with_power(mut self, p: f64) -> Self {
        self.p = p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::InvalidArgument(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.p > 0.0) {
            return Err(Error::InvalidArgument(format!("power p = {} must be positive", self.p)));
        }
        if !(self.t_end >= 0.0) {
            return Err(Error::InvalidArgument(format!("t_end = {} must be nonnegative", self.t_end)));
        }
        if self.order != 1 && self.order != 2 {
            return Err(Error::InvalidArgument(format!("splitting order {} not in {{1, 2}}", self.order)));
        }
        if let Some(s) = self.snapshot_every {
            if !(s > 0.0) {
                return Err(Error::InvalidArgument("snapshot cadence must be positive".into()));
            }
        }
        if let Potential::Bounded(v) = &self.potential {
            if v.values().iter().any(|z| z.im != 0.0) {
                return Err(Error::InvalidArgument("potential must be real".into()));
            }
        }
        Ok(())
    }
}

pub fn default_power(d: usize) -> f64 {
    if d >= 3 {
        4.0 / (d as f64 - 2.0)
    } else {
        4.0
    }
}

/// Exact flow of `i u_t = μ|u|^p u`: `u e^{-iμ|u|^p dt}`.
pub fn nonlinear_phase_step(u: &Field, dt: f64, mu: f64, p: f64) -> Field {
    if dt == 0.0 || mu == 0.0 {
        return u.clone();
    }
    u.map(|z| z * Complex64::from_polar(1.0, -mu * z.norm().powf(p) * dt))
}

/// Exact flow of `i u_t = (V + μ|u|^p) u`.
fn potential_phase_step(u: &Field, v: &[f64], dt: f64, mu: f64, p: f64) -> Field {
    let values = u
        .values()
        .iter()
        .zip(v)
        .map(|(z, v)| z * Complex64::from_polar(1.0, -(v + mu * z.norm().powf(p)) * dt))
        .collect();
    Field::from_raw(u.grid(), values)
}

fn sampled_potential(u: &Field, potential: &Potential) -> Option<Vec<f64>> {
    match potential {
        Potential::Harmonic => None,
        Potential::Bounded(v) => Some(v.values().iter().map(|z| z.re).collect()),
        Potential::Stark(e) => Some(
            (0..u.grid().len())
                .map(|i| {
                    let x = u.grid().node(i);
                    e.iter().zip(x.iter()).map(|(e, x)| e * x).sum()
                })
                .collect(),
        ),
    }
}

/// One splitting step of size `dt`. Strang is half nonlinear, full linear,
/// half nonlinear; Lie is nonlinear then linear. With an external potential
/// the linear part is the free flow and `V` joins the phase substep.
pub fn split_step(u: &Field, cfg: &SolverConfig, dt: f64) -> Field {
    let v = sampled_potential(u, &cfg.potential);
    split_step_with(u, cfg, dt, v.as_deref())
}

fn split_step_with(u: &Field, cfg: &SolverConfig, dt: f64, v: Option<&[f64]>) -> Field {
    let phase = |w: &Field, h: f64| match v {
        None => nonlinear_phase_step(w, h, cfg.mu, cfg.p),
        Some(v) => potential_phase_step(w, v, h, cfg.mu, cfg.p),
    };
    let linear = |w: &Field, h: f64| match v {
        None => harmonic_propagate(w, h),
        Some(_) => free_propagate(w, h),
    };
    match cfg.order {
        1 => linear(&phase(u, dt), dt),
        _ => phase(&linear(&phase(u, 0.5 * dt), dt), 0.5 * dt),
    }
}

/// Strang step regardless of the configured order.
pub fn strang_step(u: &Field, cfg: &SolverConfig) -> Field {
    let mut c = cfg.clone();
    c.order = 2;
    split_step(u, &c, cfg.dt)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Completed,
    BlowupDetected,
    StepUnderflow,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HaltReason {
    GradientGrowth,
    StepUnderflow,
    SpectralTail,
    NonFinite,
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    /// Final state, or the last finite state before a halt.
    pub field: Field,
    pub series: DiagnosticsSeries,
    pub status: Status,
    pub halt: Option<HaltReason>,
    pub t_final: f64,
    pub steps: usize,
    pub dt_final: f64,
    pub virial: Vec<VirialSample>,
    pub snapshots: Vec<(f64, Field)>,
}

fn energy_of(u: &Field, cfg: &SolverConfig, v: Option<&[f64]>) -> (f64, f64) {
    match v {
        None => {
            let e = energy_functionals(u, cfg.mu, cfg.p);
            (e.energy, e.e_delta)
        }
        Some(v) => {
            let vf = Field::from_raw(u.grid(), v.iter().map(|&x| Complex64::new(x, 0.0)).collect());
            let e = bounded_potential_energy(u, &vf, cfg.mu, cfg.p).expect("same grid");
            let ed = energy_functionals(u, cfg.mu, cfg.p).e_delta;
            (e, ed)
        }
    }
}

struct Monitor {
    q: f64,
    last_integrand: f64,
    cum: f64,
}

impl Monitor {
    fn row(&mut self, u: &Field, t: f64, dt: f64, cfg: &SolverConfig, v: Option<&[f64]>) -> DiagnosticsRow {
        let (energy, e_delta) = energy_of(u, cfg, v);
        let integrand = u.lp_integral(self.q);
        if dt > 0.0 {
            self.cum += 0.5 * dt * (integrand + self.last_integrand);
        }
        self.last_integrand = integrand;
        DiagnosticsRow {
            t,
            mass: u.mass(),
            energy,
            e_delta,
            sigma_norm: u.sigma_norm(),
            sup_norm: u.sup_norm(),
            virial_f: u.weight_sq(),
            strichartz_cum: self.cum,
        }
    }
}

/// Evolves `u0` to `cfg.t_end`, recording diagnostics after every step.
///
/// The run halts early when the gradient norm grows past `grad_factor` times
/// its initial value, when adaptive halving pushes `dt` below `dt_min`, when
/// the spectrum reaches the top octave, or when the state stops being finite.
/// Focusing halts report `BlowupDetected`; otherwise a halt is a resolution
/// failure and reports `StepUnderflow`. Non-finite states always count as blowup.
pub fn evolve(u0: &Field, cfg: &SolverConfig) -> Result<EvolutionResult> {
    cfg.validate()?;
    let v = sampled_potential(u0, &cfg.potential);
    let v = v.as_deref();
    let q = strichartz_exponent(u0.grid().dim(), cfg.p);
    let mut monitor = Monitor {
        q,
        last_integrand: 0.0,
        cum: 0.0,
    };
    let mut series = DiagnosticsSeries::default();
    series.push(monitor.row(u0, 0.0, 0.0, cfg, v));
    let grad0 = spectral::h1dot_sq(u0).sqrt();
    let mut virial = vec![virial_sample(u0, 0.0, cfg.mu, cfg.p)];
    let mut snapshots = Vec::new();
    if cfg.keep_snapshots && cfg.snapshot_every.is_some() {
        snapshots.push((0.0, u0.clone()));
    }

    let mut u = u0.clone();
    let mut t = 0.0;
    let mut dt = cfg.dt;
    let mut steps = 0usize;
    let mut energy = series.rows[0].energy;
    let mut next_snap = cfg.snapshot_every.map(|s| (s, 1usize));
    let mut halt = None;
    let eps_t = 1e-12 * cfg.t_end.max(1.0);

    while t < cfg.t_end - eps_t {
        let mut h = dt.min(cfg.t_end - t);
        if let Some((s, k)) = next_snap {
            h = h.min(s * k as f64 - t);
        }
        let candidate = split_step_with(&u, cfg, h, v);
        if !candidate.is_finite() {
            halt = Some(HaltReason::NonFinite);
            break;
        }
        let (e_new, _) = energy_of(&candidate, cfg, v);
        let defect = (e_new - energy).abs() / energy.abs().max(1e-300);
        if cfg.adaptive && defect > cfg.energy_tol {
            dt *= 0.5;
            if dt < cfg.dt_min {
                halt = Some(HaltReason::StepUnderflow);
                break;
            }
            continue;
        }
        let landed_snap = next_snap.is_some_and(|(s, k)| (t + h - s * k as f64).abs() <= eps_t);
        t = if landed_snap {
            let (s, k) = next_snap.expect("checked");
            s * k as f64
        } else {
            t + h
        };
        u = candidate;
        energy = e_new;
        steps += 1;
        series.push(monitor.row(&u, t, h, cfg, v));
        if landed_snap {
            virial.push(virial_sample(&u, t, cfg.mu, cfg.p));
            if cfg.keep_snapshots {
                snapshots.push((t, u.clone()));
            }
            next_snap = next_snap.map(|(s, k)| (s, k + 1));
        }
        if grad0 > 0.0 && spectral::h1dot_sq(&u).sqrt() > cfg.grad_factor * grad0 {
            halt = Some(HaltReason::GradientGrowth);
            break;
        }
        if spectral::top_octave_fraction(&u) > cfg.spectral_tail {
            halt = Some(HaltReason::SpectralTail);
            break;
        }
    }

    let status = match halt {
        None => Status::Completed,
        Some(HaltReason::NonFinite) => Status::BlowupDetected,
        Some(_) if cfg.mu < 0.0 => Status::BlowupDetected,
        Some(_) => Status::StepUnderflow,
    };
    Ok(EvolutionResult {
        field: u,
        series,
        status,
        halt,
        t_final: t,
        steps,
        dt_final: dt,
        virial,
        snapshots,
    })
}

#[derive(Clone, Debug)]
pub struct PicardResult {
    pub field: Field,
    pub iterations: usize,
    /// Relative sup-in-time change between consecutive iterates.
    pub residuals: Vec<f64>,
}

pub const PICARD_NODES: usize = 32;

/// Fixed point of the Duhamel map
/// `u(s) = e^{-isH}u0 - i ∫_0^s e^{-i(s-σ)H} F(u(σ)) dσ`
/// on `PICARD_NODES` equal subintervals with the composite trapezoid rule.
///
/// Writing the integral as `e^{-isH} ∫ e^{iσH} F(u(σ)) dσ` turns each sweep
/// into cumulative sums, so an iteration costs `O(M)` propagations.
pub fn picard_local_solve(u0: &Field, t: f64, cfg: &SolverConfig) -> Result<PicardResult> {
    if cfg.potential != Potential::Harmonic {
        return Err(Error::Unsupported("Picard solver is implemented for the harmonic trap".into()));
    }
    let m = PICARD_NODES;
    let h = t / m as f64;
    let s: Vec<f64> = (0..=m).map(|k| k as f64 * h).collect();
    let mut traj: Vec<Field> = s.iter().map(|&sk| harmonic_propagate(u0, sk)).collect();
    let scale = u0.l2_norm().max(1e-300);
    let nonlinearity = |w: &Field| w.map(|z| z * (cfg.mu * z.norm().powf(cfg.p)));
    let minus_i = Complex64::new(0.0, -1.0);
    let mut residuals = Vec::new();
    for iter in 1..=cfg.picard_max {
        let g: Vec<Field> = traj
            .iter()
            .zip(&s)
            .map(|(w, &sk)| harmonic_propagate(&nonlinearity(w), -sk))
            .collect();
        let mut next = Vec::with_capacity(m + 1);
        let mut acc = Field::zeros(u0.grid());
        next.push(u0.clone());
        for k in 1..=m {
            acc = acc.add(&g[k - 1].add(&g[k])?.scale(0.5 * h))?;
            next.push(harmonic_propagate(&u0.axpy(minus_i, &acc)?, s[k]));
        }
        let mut change: f64 = 0.0;
        for (a, b) in next.iter().zip(&traj) {
            change = change.max(a.sub(b)?.l2_norm() / scale);
        }
        residuals.push(change);
        traj = next;
        if change < cfg.picard_tol {
            return Ok(PicardResult {
                field: traj.pop().expect("nonempty"),
                iterations: iter,
                residuals,
            });
        }
        if !change.is_finite() {
            break;
        }
    }
    Err(Error::NoConvergence {
        iterations: cfg.picard_max,
        residual: residuals.last().copied().unwrap_or(f64::NAN),
    })
}
