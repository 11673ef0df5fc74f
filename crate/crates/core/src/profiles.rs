//! Frames and the profile machinery built on them: the scaling, translation
//! and cutoff operators, bubble extraction, the linear profile decomposition
//! with its decoupling audit, and concentrated approximate solutions.
//!
//! A frame `(t, x0, N, N')` acts on a profile `φ` as
//! `e^{itH} G S φ`, where `S φ = χ(N' y / N) φ` cuts `φ` off at radius `N/N'`
//! in the rescaled variable and `(G φ)(x) = N^{(d-2)/2} φ(N(x - x0))`.
//! Profiles live on the rescaled grid `Grid(d, N L, n)`, so `G` maps nodes to
//! nodes and resampling is a pure (possibly fractional) translation.
//!
//! Everything here works with one field rather than a sequence. Limits in `n`
//! become sweeps over `N` that the tests and reports monitor.

use num_complex::Complex64;
use serde::Serialize;

use crate::cutoff::bump;
use crate::error::{Error, Result};
use crate::field::{spectral, Field, Grid, Overflow};
use crate::hermite::mehler_heat;
use crate::nls::{evolve, Potential, SolverConfig};
use crate::propagators::harmonic_propagate;

/// Default orthogonality threshold for [`frames_orthogonal`].
pub const ORTHOGONALITY_THRESHOLD: f64 = 64.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FrameKind {
    Identity,
    Concentrating,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Frame {
    pub kind: FrameKind,
    pub t: f64,
    pub x0: Vec<f64>,
    #[serde(rename = "N")]
    pub n: f64,
    #[serde(rename = "Nprime")]
    pub n_prime: f64,
    /// `|x0| / N`; bounded frames keep this of order one.
    pub c: f64,
}

fn is_dyadic(n: f64) -> bool {
    n >= 1.0 && n.log2().fract() == 0.0
}

/// Smallest dyadic `N' >= sqrt(N)`, or `1` when the frame sits far out
/// (`|x0| >= N/4`), standing in for the case of a nonzero limit `|x0|/N`.
pub fn default_n_prime(n: f64, x0: &[f64]) -> f64 {
    let r = x0.iter().map(|c| c * c).sum::<f64>().sqrt();
    if r >= n / 4.0 {
        1.0
    } else {
        2f64.powi(n.sqrt().log2().ceil() as i32)
    }
}

impl Frame {
    pub fn identity(d: usize) -> Self {
        Self {
            kind: FrameKind::Identity,
            t: 0.0,
            x0: vec![0.0; d],
            n: 1.0,
            n_prime: 1.0,
            c: 0.0,
        }
    }

    /// Concentrating frame with the default `N'`.
    pub fn concentrating(t: f64, x0: &[f64], n: f64) -> Result<Self> {
        Self::with_n_prime(t, x0, n, default_n_prime(n, x0))
    }

    pub fn with_n_prime(t: f64, x0: &[f64], n: f64, n_prime: f64) -> Result<Self> {
        if !is_dyadic(n) || n < 2.0 {
            return Err(Error::InvalidArgument(format!("frame scale {n} must be a dyadic >= 2")));
        }
        if !(n_prime == 1.0 || (n_prime >= n.sqrt() - 1e-12 && n_prime <= n)) {
            return Err(Error::InvalidArgument(format!(
                "cutoff scale {n_prime} must be 1 or lie in [sqrt N, N] for N = {n}"
            )));
        }
        if !t.is_finite() || x0.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument("frame center must be finite".into()));
        }
        let r = x0.iter().map(|c| c * c).sum::<f64>().sqrt();
        Ok(Self {
            kind: FrameKind::Concentrating,
            t,
            x0: x0.to_vec(),
            n,
            n_prime,
            c: r / n,
        })
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    /// Grid on which profiles for this frame live, given the physical grid.
    pub fn profile_grid(&self, physical: &Grid) -> Result<Grid> {
        Grid::new(physical.dim(), physical.half_width() * self.n, physical.n())
    }

    fn amplitude(&self) -> f64 {
        self.n.powf(0.5 * (self.dim() as f64 - 2.0))
    }
}

/// The spatial cutoff `S`: identity for the identity frame, otherwise
/// multiplication by `χ(N' y / N)`.
pub fn spatial_cutoff(frame: &Frame, phi: &Field) -> Field {
    if frame.kind == FrameKind::Identity {
        return phi.clone();
    }
    let k = frame.n_prime / frame.n;
    phi.map_nodes(|y, z| {
        let r = y.iter().map(|c| c * c).sum::<f64>().sqrt();
        z * bump(k * r)
    })
}

/// `G` alone: `N^{(d-2)/2} φ(N(x - x0))` resampled onto `target`.
pub fn scale_translate(frame: &Frame, phi: &Field, target: &Grid) -> Result<Field> {
    if frame.kind == FrameKind::Identity {
        if phi.grid() != target {
            return Err(Error::GridMismatch);
        }
        return Ok(phi.clone());
    }
    let g = phi.resample_affine(target, frame.n, &frame.x0, Overflow::Strict)?;
    Ok(g.scale(frame.amplitude()))
}

/// `G^{-1}`: `N^{-(d-2)/2} g(x0 + y/N)` on the frame's profile grid. Parts of
/// the profile box that fall outside `g`'s box read as zero.
pub fn scale_translate_inverse(frame: &Frame, g: &Field) -> Result<Field> {
    if frame.kind == FrameKind::Identity {
        return Ok(g.clone());
    }
    let target = frame.profile_grid(g.grid())?;
    let center: Vec<f64> = frame.x0.iter().map(|c| -c * frame.n).collect();
    let phi = g.resample_affine(&target, 1.0 / frame.n, &center, Overflow::Truncate)?;
    Ok(phi.scale(1.0 / frame.amplitude()))
}

/// `e^{itH} G S φ` on `target`: cutoff, rescale and translate, then propagate.
pub fn frame_apply(frame: &Frame, phi: &Field, target: &Grid) -> Result<Field> {
    if phi.grid().dim() != frame.dim() || target.dim() != frame.dim() {
        return Err(Error::InvalidArgument("frame and field dimensions differ".into()));
    }
    let g = scale_translate(frame, &spatial_cutoff(frame, phi), target)?;
    Ok(if frame.t == 0.0 { g } else { harmonic_propagate(&g, -frame.t) })
}

/// Undoes propagation, translation and rescaling (not the cutoff), returning
/// `S φ` for `f = frame_apply(frame, φ)`.
pub fn frame_inverse(frame: &Frame, f: &Field) -> Result<Field> {
    let g = if frame.t == 0.0 { f.clone() } else { harmonic_propagate(f, frame.t) };
    scale_translate_inverse(frame, &g)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Orthogonality {
    pub score: f64,
    pub orthogonal: bool,
}

/// `N_a/N_b + N_b/N_a + N_a N_b |t_a - t_b| + sqrt(N_a N_b) |x_a - x_b|`
/// against `threshold`.
pub fn frames_orthogonal(a: &Frame, b: &Frame, threshold: f64) -> Orthogonality {
    let dist = a
        .x0
        .iter()
        .zip(&b.x0)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt();
    let score = a.n / b.n + b.n / a.n + a.n * b.n * (a.t - b.t).abs() + (a.n * b.n).sqrt() * dist;
    Orthogonality {
        score,
        orthogonal: score > threshold,
    }
}

/// `P̃_N = e^{-H/N²} - e^{-4H/N²}`, evaluated through the Mehler heat factorization.
pub fn heat_band(f: &Field, n: f64) -> Result<Field> {
    let a = mehler_heat(f, 1.0 / (n * n))?;
    let b = mehler_heat(f, 4.0 / (n * n))?;
    a.sub(&b)
}

fn raw_score(sup: f64, n: f64, d: usize) -> f64 {
    sup * n.powf(-0.5 * (d as f64 - 2.0))
}

/// Concentration score of the ground mode `h0`, the unit in which extraction
/// scores are reported: `max_N N^{-(d-2)/2} (e^{-d/(2N²)} - e^{-2d/N²}) h0(0)`.
pub fn concentration_unit(d: usize) -> f64 {
    let lambda = 0.5 * d as f64;
    let h00 = std::f64::consts::PI.powf(-0.25 * d as f64);
    (0..12)
        .map(|j| {
            let n = 2f64.powi(j);
            let band = (-lambda / (n * n)).exp() - (-4.0 * lambda / (n * n)).exp();
            raw_score(band * h00, n, d)
        })
        .fold(0.0, f64::max)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtractOptions {
    /// Time window scanned for the concentration time.
    pub window: [f64; 2],
    /// Extraction gate, in units of [`concentration_unit`].
    pub eps: f64,
    pub time_samples: usize,
    /// Largest dyadic scale scanned; defaults to a quarter of the Nyquist wavenumber.
    pub n_max: Option<f64>,
}

impl ExtractOptions {
    pub fn new(eps: f64) -> Self {
        Self {
            window: [0.0, 0.0],
            eps,
            time_samples: 64,
            n_max: None,
        }
    }

    pub fn with_window(mut self, a: f64, b: f64) -> Self {
        self.window = [a.min(b), a.max(b)];
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileItem {
    pub frame: Frame,
    #[serde(skip)]
    pub profile: Field,
    /// Normalized concentration score at extraction.
    pub level: f64,
    /// `||e^{itH} G S φ||_Σ² / ||f||_Σ²` for the field it was extracted from.
    pub sigma_share: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanPoint {
    #[serde(rename = "N")]
    pub n: f64,
    pub t: f64,
    pub score: f64,
    pub node: usize,
}

fn best_node(g: &Field) -> (usize, f64) {
    g.values()
        .iter()
        .enumerate()
        .map(|(i, z)| (i, z.norm()))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc })
}

fn scale_ladder(grid: &Grid, n_max: Option<f64>) -> Vec<f64> {
    let cap = n_max.unwrap_or(grid.nyquist() / 4.0).max(1.0);
    let mut out = vec![1.0];
    while out[out.len() - 1] * 2.0 <= cap {
        out.push(out[out.len() - 1] * 2.0);
    }
    out
}

/// Best `(t, x)` for one scale: uniform samples of the window, then a
/// golden-section search between the neighbours of the best sample.
fn scan_scale(band: &Field, n: f64, opts: &ExtractOptions, unit: f64) -> ScanPoint {
    let d = band.grid().dim();
    let eval = |t: f64| {
        let g = if t == 0.0 { band.clone() } else { harmonic_propagate(band, t) };
        let (node, sup) = best_node(&g);
        ScanPoint {
            n,
            t,
            score: raw_score(sup, n, d) / unit,
            node,
        }
    };
    let [a, b] = opts.window;
    let m = opts.time_samples.max(1);
    if b <= a || m == 1 {
        return eval(a);
    }
    let h = (b - a) / (m - 1) as f64;
    let samples: Vec<ScanPoint> = (0..m).map(|k| eval(a + k as f64 * h)).collect();
    let k = (0..m)
        .max_by(|&i, &j| samples[i].score.total_cmp(&samples[j].score))
        .expect("nonempty");
    let mut best = samples[k];
    let (mut lo, mut hi) = (a + (k.max(1) - 1) as f64 * h, a + (k + 1).min(m - 1) as f64 * h);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut p = hi - ratio * (hi - lo);
    let mut q = lo + ratio * (hi - lo);
    let (mut fp, mut fq) = (eval(p), eval(q));
    for _ in 0..40 {
        if hi - lo < 1e-6 * h {
            break;
        }
        if fp.score >= fq.score {
            hi = q;
            q = p;
            fq = fp;
            p = hi - ratio * (hi - lo);
            fp = eval(p);
        } else {
            lo = p;
            p = q;
            fp = fq;
            q = lo + ratio * (hi - lo);
            fq = eval(q);
        }
    }
    for c in [fp, fq] {
        if c.score > best.score {
            best = c;
        }
    }
    best
}

/// All `(N, t*, score)` triples of the scan, one per dyadic scale.
pub fn concentration_scan(f: &Field, opts: &ExtractOptions) -> Result<Vec<ScanPoint>> {
    let unit = concentration_unit(f.grid().dim());
    scale_ladder(f.grid(), opts.n_max)
        .into_iter()
        .map(|n| Ok(scan_scale(&heat_band(f, n)?, n, opts, unit)))
        .collect()
}

/// Finds the scale, time and place where `f` concentrates most and builds the
/// corresponding profile, or returns `None` when the normalized score is
/// below `opts.eps`.
///
/// The profile is `S G^{-1} e^{-it*H} f`, the solution localized to the
/// frame's cutoff radius. When the best scale is `N = 1` the frame is the
/// identity and the profile is `f` itself.
pub fn extract_bubble(f: &Field, opts: &ExtractOptions) -> Result<Option<ProfileItem>> {
    let scan = concentration_scan(f, opts)?;
    let Some(best) = scan.iter().copied().max_by(|a, b| a.score.total_cmp(&b.score)) else {
        return Ok(None);
    };
    if !(best.score >= opts.eps) || best.score == 0.0 {
        return Ok(None);
    }
    let d = f.grid().dim();
    let frame = if best.n == 1.0 {
        Frame::identity(d)
    } else {
        let x = f.grid().node(best.node);
        Frame::concentrating(best.t, &x[..d], best.n)?
    };
    let profile = spatial_cutoff(&frame, &frame_inverse(&frame, f)?);
    let planted = frame_apply(&frame, &profile, f.grid())?;
    let total = f.sigma_sq();
    Ok(Some(ProfileItem {
        frame,
        profile,
        level: best.score,
        sigma_share: if total > 0.0 { planted.sigma_sq() / total } else { 0.0 },
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct Decomposition {
    pub items: Vec<ProfileItem>,
    #[serde(skip)]
    pub remainder: Field,
    pub remainder_sigma: f64,
}

/// Repeatedly extracts a bubble and subtracts its image, up to `j_max` times
/// or until extraction finds nothing above the gate.
pub fn profile_decompose(f: &Field, j_max: usize, opts: &ExtractOptions) -> Result<Decomposition> {
    if j_max == 0 {
        return Err(Error::InvalidArgument("at least one level is required".into()));
    }
    let mut items = Vec::new();
    let mut r = f.clone();
    let total = f.sigma_sq();
    for _ in 0..j_max {
        let Some(mut item) = extract_bubble(&r, opts)? else {
            break;
        };
        let planted = frame_apply(&item.frame, &item.profile, f.grid())?;
        item.sigma_share = if total > 0.0 { planted.sigma_sq() / total } else { 0.0 };
        r = r.sub(&planted)?;
        let identity = item.frame.kind == FrameKind::Identity;
        items.push(item);
        if identity {
            break;
        }
    }
    Ok(Decomposition {
        items,
        remainder_sigma: r.sigma_norm(),
        remainder: r,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecouplingReport {
    /// `| ||f||_Σ² - Σ ||φ_j||_Σ² - ||r||_Σ² | / ||f||_Σ²`.
    pub sigma_defect: f64,
    /// The same for `||·||_{2d/(d-2)}^{2d/(d-2)}`; `None` for `d < 3`.
    pub potential_defect: Option<f64>,
    /// `||f - Σ φ_j - r||_2 / ||f||_2`.
    pub bookkeeping: f64,
}

pub const BOOKKEEPING_TOL: f64 = 1e-9;

pub fn decoupling_audit(f: &Field, items: &[ProfileItem], remainder: &Field) -> Result<DecouplingReport> {
    let planted: Vec<Field> = items
        .iter()
        .map(|it| frame_apply(&it.frame, &it.profile, f.grid()))
        .collect::<Result<_>>()?;
    let mut sum = remainder.clone();
    for p in &planted {
        sum = sum.add(p)?;
    }
    let scale = f.l2_norm();
    let bookkeeping = if scale > 0.0 { f.sub(&sum)?.l2_norm() / scale } else { sum.l2_norm() };
    if !(bookkeeping <= BOOKKEEPING_TOL) {
        return Err(Error::Bookkeeping(bookkeeping));
    }
    let defect = |norm: &dyn Fn(&Field) -> f64| {
        let whole = norm(f);
        let parts: f64 = planted.iter().map(norm).sum::<f64>() + norm(remainder);
        if whole > 0.0 { (whole - parts).abs() / whole } else { parts }
    };
    let d = f.grid().dim();
    let potential_defect = (d >= 3).then(|| {
        let q = 2.0 * d as f64 / (d as f64 - 2.0);
        defect(&|g: &Field| g.lp_integral(q))
    });
    Ok(DecouplingReport {
        sigma_defect: defect(&|g: &Field| g.sigma_sq()),
        potential_defect,
        bookkeeping,
    })
}

/// Coupling under which the rescaled equation for `v` maps to the physical
/// one under `G̃`: `μ N^{(d-2)p/2 - 2}`. It is `μ` exactly in the energy-critical case.
pub fn rescaled_coupling(mu: f64, p: f64, d: usize, n: f64) -> f64 {
    mu * n.powf(0.5 * (d as f64 - 2.0) * p - 2.0)
}

/// Samples of a potential-free solution `v(s)` on a uniform lattice in the
/// rescaled time `s`, indexed from `-k_max` to `k_max`.
#[derive(Clone, Debug)]
pub struct ProfileSolution {
    pub ds: f64,
    pub fields: Vec<Field>,
}

impl ProfileSolution {
    /// Solves `i v_s = -Δv/2 + c|v|^p v`, `v(0) = φ`, forward and backward to
    /// `|s| <= k_max ds`, with `substeps` Strang steps per lattice step.
    pub fn compute(phi: &Field, coupling: f64, p: f64, ds: f64, k_max: usize, substeps: usize) -> Result<Self> {
        let run = |data: &Field| -> Result<Vec<Field>> {
            if k_max == 0 {
                return Ok(vec![data.clone()]);
            }
            let mut cfg = SolverConfig::new(phi.grid().dim(), coupling, ds / substeps.max(1) as f64, ds * k_max as f64)
                .with_power(p);
            cfg.potential = Potential::Bounded(Field::zeros(phi.grid()));
            cfg.adaptive = false;
            cfg.spectral_tail = 1.0;
            cfg.grad_factor = f64::INFINITY;
            cfg.snapshot_every = Some(ds);
            cfg.keep_snapshots = true;
            let r = evolve(data, &cfg)?;
            if r.snapshots.len() != k_max + 1 {
                return Err(Error::InvalidArgument("profile solution halted early".into()));
            }
            Ok(r.snapshots.into_iter().map(|(_, f)| f).collect())
        };
        let fwd = run(phi)?;
        // Backward in time by reversibility: v(-s) = conj(w(s)) with w(0) = conj φ.
        let bwd = run(&phi.conj())?;
        let mut fields: Vec<Field> = bwd.into_iter().skip(1).rev().map(|f| f.conj()).collect();
        fields.extend(fwd);
        Ok(Self { ds, fields })
    }

    pub fn k_max(&self) -> usize {
        self.fields.len() / 2
    }

    /// `v(k ds)`.
    pub fn at(&self, k: i64) -> Option<&Field> {
        let idx = k + self.k_max() as i64;
        (0..self.fields.len() as i64).contains(&idx).then(|| &self.fields[idx as usize])
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub dt: f64,
    /// Lattice times `k dt` for `k = -k_max ..= k_max`.
    pub times: Vec<f64>,
    pub fields: Vec<Field>,
    /// `T / N²`; lattice times with `|t|` up to this use the bubble branch.
    pub window: f64,
    pub frame: Frame,
}

/// Euclidean frequency cutoff `φ(|k|/M)`.
fn euclidean_low_pass(v: &Field, m: f64) -> Field {
    spectral::apply_symbol(v, |k| {
        let r = k.iter().map(|c| c * c).sum::<f64>().sqrt();
        Complex64::new(bump(r / m), 0.0)
    })
}

/// The concentrated approximate solution `ṽ` on a uniform lattice of step
/// `dt` over `|t| <= t_max`.
///
/// Inside `|t| <= T N^{-2}` it is
/// `e^{-it|x0|²/2} G̃[S P_{<=Ñ'} v](t + t_n)` with `Ñ' = (N/N')^{1/2}` and
/// `G̃ w(t, x) = N^{(d-2)/2} w(N²(t - t_n), N(x - x0))`; outside, it follows
/// the linear flow from the window edge. `v` is sampled at `s = N² t`, so its
/// lattice step must be `N² dt`.
pub fn build_bubble_approximation(
    v: &ProfileSolution,
    frame: &Frame,
    target: &Grid,
    big_t: f64,
    dt: f64,
    t_max: f64,
) -> Result<Trajectory> {
    if frame.kind != FrameKind::Concentrating {
        return Err(Error::InvalidArgument("bubble approximation needs a concentrating frame".into()));
    }
    if !(t_max <= 2.0) {
        return Err(Error::InvalidArgument(format!("t_max = {t_max} exceeds the interval [-2, 2]")));
    }
    let n2 = frame.n * frame.n;
    if ((v.ds - n2 * dt) / v.ds).abs() > 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "profile lattice step {} does not match N² dt = {}",
            v.ds,
            n2 * dt
        )));
    }
    let window = big_t / n2;
    let k_window = (window / dt).round() as i64;
    if ((k_window as f64 * dt - window) / window).abs() > 1e-9 {
        return Err(Error::InvalidArgument("T / N² must be a whole number of lattice steps".into()));
    }
    let k_max = (t_max / dt).round() as i64;
    if k_max < k_window {
        return Err(Error::InvalidArgument("lattice does not cover the bubble window".into()));
    }
    if (k_window as usize) > v.k_max() {
        return Err(Error::InvalidArgument("profile solution is shorter than the window".into()));
    }
    let cutoff = (frame.n / frame.n_prime).sqrt();
    let x0_sq: f64 = frame.x0.iter().map(|c| c * c).sum();
    let bubble = |k: i64| -> Result<Field> {
        let t = k as f64 * dt;
        // G̃ evaluated at t + t_n reads w at N²((t + t_n) - t_n) = N² t.
        let s_index = (n2 * ((t + frame.t) - frame.t) / v.ds).round() as i64;
        let w = v.at(s_index).ok_or_else(|| Error::InvalidArgument("profile sample missing".into()))?;
        let shaped = spatial_cutoff(frame, &euclidean_low_pass(w, cutoff));
        let g = scale_translate(frame, &shaped, target)?;
        Ok(g.scale(Complex64::from_polar(1.0, -0.5 * t * x0_sq)))
    };
    let len = (2 * k_max + 1) as usize;
    let mut fields: Vec<Option<Field>> = vec![None; len];
    for k in -k_window..=k_window {
        fields[(k + k_max) as usize] = Some(bubble(k)?);
    }
    // Outside the window the glue is the linear flow, one lattice step at a time.
    for k in k_window + 1..=k_max {
        let hi = harmonic_propagate(fields[(k - 1 + k_max) as usize].as_ref().expect("filled"), dt);
        let lo = harmonic_propagate(fields[(-k + 1 + k_max) as usize].as_ref().expect("filled"), -dt);
        fields[(k + k_max) as usize] = Some(hi);
        fields[(-k + k_max) as usize] = Some(lo);
    }
    Ok(Trajectory {
        dt,
        times: (-k_max..=k_max).map(|k| k as f64 * dt).collect(),
        fields: fields.into_iter().map(|f| f.expect("filled")).collect(),
        window,
        frame: frame.clone(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ResidualReport {
    /// Interior lattice times.
    pub times: Vec<f64>,
    /// `||H^{1/2} e(t)||_2` at each interior time.
    pub norms: Vec<f64>,
    /// `∫ ||H^{1/2} e||_2 dt` over the bubble window.
    pub window_aggregate: f64,
    /// The same over the linear-flow pieces.
    pub outside_aggregate: f64,
}

/// `||H^{1/2} g||_2 = (||∇g||²/2 + ||xg||²/2)^{1/2}`, by the quadratic-form identity.
pub fn h_half_norm(g: &Field) -> f64 {
    (0.5 * g.sigma_sq()).sqrt()
}

fn apply_h(u: &Field) -> Result<Field> {
    let lap = spectral::laplacian(u);
    let pot = u.map_nodes(|x, z| z * (0.5 * x.iter().map(|c| c * c).sum::<f64>()));
    lap.scale(-0.5).add(&pot)
}

/// `e = (i∂_t - H)ṽ - μ|ṽ|^p ṽ` with a centered time difference, measured in
/// `H^{1/2}` at every interior lattice time.
pub fn approximation_residual(traj: &Trajectory, mu: f64, p: f64) -> Result<ResidualReport> {
    let limit = 1.0 / (32.0 * traj.frame.n * traj.frame.n);
    if traj.dt > limit * (1.0 + 1e-12) {
        return Err(Error::LatticeTooCoarse {
            spacing: traj.dt,
            limit,
        });
    }
    let m = traj.fields.len();
    if m < 3 {
        return Err(Error::InvalidArgument("need at least three lattice times".into()));
    }
    let i_over = Complex64::new(0.0, 1.0 / (2.0 * traj.dt));
    let mut times = Vec::with_capacity(m - 2);
    let mut norms = Vec::with_capacity(m - 2);
    for k in 1..m - 1 {
        let u = &traj.fields[k];
        let dudt = traj.fields[k + 1].sub(&traj.fields[k - 1])?.scale(i_over);
        let nl = u.map(|z| z * (mu * z.norm().powf(p)));
        let e = dudt.sub(&apply_h(u)?)?.sub(&nl)?;
        times.push(traj.times[k]);
        norms.push(h_half_norm(&e));
    }
    let (mut inside, mut outside) = (0.0, 0.0);
    for w in 0..times.len().saturating_sub(1) {
        let piece = 0.5 * traj.dt * (norms[w] + norms[w + 1]);
        let mid = 0.5 * (times[w] + times[w + 1]);
        if mid.abs() <= traj.window {
            inside += piece;
        } else {
            outside += piece;
        }
    }
    Ok(ResidualReport {
        times,
        norms,
        window_aggregate: inside,
        outside_aggregate: outside,
    })
}
