//! Invariant suites behind `nlsh verify`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;
use crate::field::{read_nlsh1, spectral, write_nlsh1, Field, Grid};
use crate::harness::config::Suite;
use crate::hermite::{apply_power, heat_propagate, lp_ladder, mehler_heat, HermiteBasis, LpKind};
use crate::nls::{evolve, picard_local_solve, SolverConfig};
use crate::profiles::{
    decoupling_audit, frame_apply, frame_inverse, frames_orthogonal, profile_decompose, ExtractOptions, Frame,
    ORTHOGONALITY_THRESHOLD,
};
use crate::propagators::{dispersive_ratio, harmonic_propagate, heisenberg_observables, hermite_propagate};

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub suite: &'static str,
    pub name: &'static str,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn below(suite: &'static str, name: &'static str, value: f64, tolerance: f64) -> Self {
        Self {
            suite,
            name,
            value,
            tolerance,
            passed: value.is_finite() && value < tolerance,
        }
    }
}

fn h0(g: &Grid) -> Field {
    let d = g.dim() as f64;
    Field::sample_real(g, |x| {
        let r2: f64 = x.iter().map(|c| c * c).sum();
        PI.powf(-d / 4.0) * (-0.5 * r2).exp()
    })
    .expect("finite")
}

/// A smooth random field: a few displaced, boosted Gaussians.
fn random_smooth(g: &Grid, rng: &mut ChaCha8Rng) -> Field {
    let d = g.dim();
    let mut f = Field::zeros(g);
    for _ in 0..3 {
        let c: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let k: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let w = rng.gen_range(0.7..1.3);
        let a = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let bump = Field::sample(g, |x| {
            let r2: f64 = (0..d).map(|i| (x[i] - c[i]).powi(2)).sum();
            let phase: f64 = (0..d).map(|i| k[i] * x[i]).sum();
            a * Complex64::from_polar((-r2 / (2.0 * w * w)).exp(), phase)
        })
        .expect("finite");
        f = f.add(&bump).expect("same grid");
    }
    f
}

pub fn core_suite() -> Result<Vec<Check>> {
    const S: &str = "core";
    let mut out = Vec::new();
    let g = Grid::new(1, 16.0, 256)?;
    let f0 = h0(&g);

    let worst = [0.1, 1.0, PI / 2.0, 3.0]
        .iter()
        .map(|&t| {
            let exact = f0.scale(Complex64::from_polar(1.0, -t / 2.0));
            harmonic_propagate(&f0, t).relative_l2_error(&exact)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    out.push(Check::below(S, "eigenfunction_phase", worst, 1e-8));

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let f = random_smooth(&g, &mut rng);
    let f = f.scale(1.0 / f.sigma_norm());
    let parity = harmonic_propagate(&f, PI)
        .sub(&f.reflect().scale(Complex64::from_polar(1.0, -PI / 2.0)))?
        .l2_norm();
    out.push(Check::below(S, "parity_at_half_period", parity, 1e-6));

    let lens = harmonic_propagate(&f, 1.0);
    let herm = hermite_propagate(&f, 1.0)?;
    out.push(Check::below(S, "lens_vs_hermite", lens.relative_l2_error(&herm)?, 1e-7));

    let half = apply_power(&f, 0.5)?;
    let form = 0.5 * f.sigma_sq();
    out.push(Check::below(S, "quadratic_form_identity", (half.mass() - form).abs() / form, 1e-8));

    let mut buf = Vec::new();
    write_nlsh1(&f, &mut buf)?;
    let back = read_nlsh1(buf.as_slice())?;
    let same = back.values().iter().zip(f.values()).all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits());
    out.push(Check::below(S, "nlsh1_round_trip", if same { 0.0 } else { 1.0 }, 0.5));

    let mut cfg = SolverConfig::new(1, 1.0, 1e-3, 0.5);
    cfg.adaptive = false;
    let run = evolve(&f0.scale(1.2), &cfg)?;
    out.push(Check::below(S, "defocusing_mass_drift", run.series.mass_drift(), 1e-10));
    out.push(Check::below(S, "defocusing_energy_drift", run.series.energy_drift(), 1e-6));

    let mut cfg = SolverConfig::new(1, 1.0, 1e-5, 0.01);
    cfg.adaptive = false;
    let u0 = f0.scale(1.2);
    let picard = picard_local_solve(&u0, 0.01, &cfg)?;
    let split = evolve(&u0, &cfg)?.field;
    out.push(Check::below(S, "duhamel_vs_split", picard.field.relative_l2_error(&split)?, 1e-6));
    Ok(out)
}

pub fn spectral_suite() -> Result<Vec<Check>> {
    const S: &str = "spectral";
    let mut out = Vec::new();
    let g = Grid::new(1, 16.0, 256)?;
    let basis = HermiteBasis::with_default_modes(&g)?;
    out.push(Check::below(S, "hermite_orthonormality", basis.orthonormality_defect(), 1e-10));

    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let f = random_smooth(&g, &mut rng);
    let h = apply_power(&f, 1.0)?;
    let direct = spectral::laplacian(&f)
        .scale(-0.5)
        .add(&f.map_nodes(|x, z| 0.5 * x[0] * x[0] * z))?;
    out.push(Check::below(S, "power_one_is_h", h.relative_l2_error(&direct)?, 1e-8));
    let twice = apply_power(&apply_power(&f, 0.5)?, 0.5)?;
    out.push(Check::below(S, "half_powers_compose", twice.relative_l2_error(&h)?, 1e-8));

    let pieces = lp_ladder(&f, LpKind::Bump)?;
    let mut total = Field::zeros(&g);
    for (_, p) in &pieces {
        total = total.add(p)?;
    }
    out.push(Check::below(S, "ladder_sums_to_identity", total.relative_l2_error(&f)?, 1e-10));

    let heat = heat_propagate(&f, 0.3)?;
    let mehler = mehler_heat(&f, 0.3)?;
    out.push(Check::below(S, "mehler_heat_matches_hermite", mehler.relative_l2_error(&heat)?, 1e-8));

    let ts: Vec<f64> = (1..=20).map(|k| 0.15 * k as f64).filter(|t| (t % PI).abs() > 0.05).collect();
    let worst = dispersive_ratio(&f, &ts)?.into_iter().fold(0.0, f64::max);
    out.push(Check::below(S, "dispersive_bound", worst / ((2.0 * PI).powf(-0.5) * 1.05), 1.0));

    let worst = [0.3, 1.0, 2.5]
        .iter()
        .map(|&t| heisenberg_observables(&f, t).map(|o| o.identity_defect.abs() / f.sigma_sq()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    out.push(Check::below(S, "observable_identity", worst, 1e-7));
    Ok(out)
}

pub fn profiles_suite() -> Result<Vec<Check>> {
    const S: &str = "profiles";
    let mut out = Vec::new();
    let g = Grid::new(1, 4.0, 2048)?;
    let frame = Frame::concentrating(0.0, &[0.5], 32.0)?;
    let pg = frame.profile_grid(&g)?;
    let phi = Field::sample_real(&pg, |y| (-0.5 * y[0] * y[0]).exp())?;
    let f = frame_apply(&frame, &phi, &g)?;
    let back = frame_inverse(&frame, &f)?;
    let inside = Field::sample_real(&pg, |y| if (y[0] * frame.n_prime / frame.n).abs() < 0.5 { 1.0 } else { 0.0 })?;
    let err = back.mul(&inside)?.sub(&phi.mul(&inside)?)?.l2_norm() / phi.l2_norm();
    out.push(Check::below(S, "frame_round_trip", err, 1e-8));

    let dec = profile_decompose(&f, 3, &ExtractOptions::new(0.1))?;
    let recovered = dec.items.first().map(|it| {
        let dn = (it.frame.n / frame.n).log2().abs();
        let dx = (it.frame.x0[0] - frame.x0[0]).abs() * frame.n / 2.0;
        dn.max(dx)
    });
    out.push(Check::below(S, "single_bubble_recovered", recovered.unwrap_or(f64::INFINITY), 1.0 + 1e-9));
    let audit = decoupling_audit(&f, &dec.items, &dec.remainder)?;
    out.push(Check::below(S, "single_bubble_decoupling", audit.sigma_defect, 0.05));

    let a = Frame::concentrating(0.0, &[-2.0], 256.0)?;
    let b = Frame::concentrating(0.0, &[2.0], 256.0)?;
    let score = frames_orthogonal(&a, &b, ORTHOGONALITY_THRESHOLD).score;
    out.push(Check::below(S, "distant_frames_orthogonal", 1024.0 / score, 1.0 + 1e-12));
    Ok(out)
}

pub fn run_suite(suite: Suite) -> Result<Vec<Check>> {
    match suite {
        Suite::Core => core_suite(),
        Suite::Spectral => spectral_suite(),
        Suite::Profiles => profiles_suite(),
        Suite::All => {
            let mut all = core_suite()?;
            all.extend(spectral_suite()?);
            all.extend(profiles_suite()?);
            Ok(all)
        }
    }
}
