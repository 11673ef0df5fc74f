//! Command-line surface. Exit status 0 on success, 2 for bad input or
//! configuration, 3 for numerical failure (with a diagnostic file).

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::error::Error;
use crate::field::{read_nlsh1_file, write_nlsh1_file, Field, Grid};
use crate::harness::bench::{bench_propagators, format_table};
use crate::harness::config::{RunConfig, Suite};
use crate::harness::manifest::Manifest;
use crate::harness::verify::run_suite;
use crate::nls::{evolve, EvolutionResult, Status};
use crate::profiles::{decoupling_audit, profile_decompose, ExtractOptions};
use crate::propagators::{propagate, Method};
use crate::variational::{energy_trapping_classify, virial_diagnostics};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Tail gate used by `blowup` when the config leaves `spectral_tail` unset.
pub const BLOWUP_SPECTRAL_TAIL: f64 = 1e-2;

#[derive(Debug, Parser)]
#[command(name = "nlsh", version, about = "Harmonic-trap NLS simulation and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the solver from a JSON config.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply e^{-itH} to an NLSH1 field.
    Propagate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        t: f64,
        #[arg(long, default_value = "lens")]
        method: Method,
        #[arg(long)]
        out: PathBuf,
    },
    /// Greedy profile decomposition of an NLSH1 field.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 4)]
        levels: usize,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
        /// Time window searched for concentration.
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
        window: Option<Vec<f64>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Focusing run with trapping classification and virial certificate.
    Blowup {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariant suites.
    Verify {
        #[arg(long, value_enum, default_value = "all")]
        suite: Suite,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Propagator timing table.
    Bench {
        #[arg(long, value_delimiter = ',', default_values_t = [64usize, 128, 256, 512])]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long, default_value_t = 5)]
        reps: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Why a command stopped.
#[derive(Debug)]
enum Failure {
    Config(String),
    Numerical { message: String, diagnostic: Option<PathBuf> },
}

impl Failure {
    fn numerical(message: impl Into<String>, diagnostic: Option<&Path>) -> Self {
        let message = message.into();
        let diagnostic = diagnostic.and_then(|p| {
            std::fs::write(p, serde_json::to_string_pretty(&json!({ "error": message })).ok()?).ok()?;
            Some(p.to_path_buf())
        });
        Self::Numerical { message, diagnostic }
    }
}

type Outcome = std::result::Result<(), Failure>;

fn io_config<E: std::fmt::Display>(what: &Path) -> impl FnOnce(E) -> Failure + '_ {
    move |e| Failure::Config(format!("{}: {e}", what.display()))
}

pub fn run_cli<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    let args: Vec<String> = argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    let outcome = match cli.command {
        Command::Evolve { config, out } => cmd_run(&config, out, &args, false),
        Command::Blowup { config, out } => cmd_run(&config, out, &args, true),
        Command::Propagate { input, t, method, out } => cmd_propagate(&input, t, method, &out, &args),
        Command::Decompose {
            input,
            levels,
            eps,
            window,
            out,
        } => cmd_decompose(&input, levels, eps, window, &out, &args),
        Command::Verify { suite, out } => cmd_verify(suite, out, &args),
        Command::Bench { sizes, dim, reps, out } => cmd_bench(&sizes, dim, reps, out, &args),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Config(msg)) => {
            eprintln!("nlsh: {msg}");
            EXIT_CONFIG
        }
        Err(Failure::Numerical { message, diagnostic }) => {
            eprintln!("nlsh: numerical failure: {message}");
            if let Some(p) = diagnostic {
                eprintln!("nlsh: diagnostics written to {}", p.display());
            }
            EXIT_NUMERICAL
        }
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Outcome {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::numerical(e.to_string(), None))?;
    std::fs::write(path, text).map_err(|e| Failure::numerical(format!("{}: {e}", path.display()), None))
}

fn prepare_dir(dir: &Path) -> Outcome {
    std::fs::create_dir_all(dir).map_err(io_config(dir))
}

fn emit_manifest(manifest: &Manifest, out: Option<&Path>) -> Outcome {
    match out {
        Some(path) => manifest.write(path).map_err(|e| Failure::Config(format!("{}: {e}", path.display()))),
        None => {
            eprintln!("{}", serde_json::to_string(manifest).expect("manifest serializes"));
            Ok(())
        }
    }
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

#[derive(Serialize)]
struct RunReport<'a> {
    status: Status,
    halt: Option<crate::nls::HaltReason>,
    t_final: f64,
    steps: usize,
    dt_final: f64,
    mass_drift: f64,
    energy_drift: f64,
    strichartz: f64,
    sup_growth: f64,
    grad_growth: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    classification: Option<crate::variational::TrappingReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    virial: Option<VirialSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    virial_note: Option<&'a str>,
}

#[derive(Serialize)]
struct VirialSummary {
    samples: usize,
    max_mismatch: f64,
    tolerance: f64,
    consistent: bool,
    min_f: f64,
    certificate: Option<crate::variational::Certificate>,
}

fn cmd_run(config: &Path, out: Option<PathBuf>, args: &[String], blowup: bool) -> Outcome {
    let text = std::fs::read_to_string(config).map_err(io_config(config))?;
    let cfg = RunConfig::from_json(&text).map_err(|e| Failure::Config(e.to_string()))?;
    let dir = out
        .or_else(|| cfg.output_dir.clone())
        .ok_or_else(|| Failure::Config("no output directory: pass --out or set `output_dir`".into()))?;
    if blowup && !(cfg.mu < 0.0) {
        return Err(Failure::Config("config error at `mu`: blowup runs need mu < 0".into()));
    }
    prepare_dir(&dir)?;
    let grid = cfg.grid.build().map_err(|e| Failure::Config(e.to_string()))?;
    let manifest = Manifest::new(if blowup { "blowup" } else { "evolve" }, args)
        .with_hash(cfg.canonical_json().as_bytes())
        .with_grid(&grid);
    emit_manifest(&manifest, Some(&dir.join("manifest.json")))?;

    let base = config.parent().unwrap_or(Path::new("."));
    let u0 = cfg
        .initial_field(base)
        .map_err(|e| Failure::Config(format!("config error at `initial`: {e}")))?;
    let mut solver = cfg
        .solver_config()
        .map_err(|e| Failure::Config(format!("config error: {e}")))?;
    if blowup {
        if cfg.spectral_tail.is_none() {
            solver.spectral_tail = BLOWUP_SPECTRAL_TAIL;
        }
        if solver.snapshot_every.is_none() {
            solver.snapshot_every = Some(4.0 * cfg.dt);
        }
    }
    let error_path = dir.join("error.json");
    let classification = if blowup && grid.dim() == 3 {
        Some(energy_trapping_classify(&u0).map_err(|e| Failure::numerical(e.to_string(), Some(&error_path)))?)
    } else {
        None
    };
    let result = evolve(&u0, &solver).map_err(|e| Failure::numerical(e.to_string(), Some(&error_path)))?;
    write_outputs(&dir, &cfg, &result)?;

    let (virial, virial_note) = if cfg.diagnostics.virial || blowup {
        match virial_diagnostics(&result.virial) {
            Ok(r) => (
                Some(VirialSummary {
                    samples: r.samples.len(),
                    max_mismatch: r.max_mismatch,
                    tolerance: r.tolerance,
                    consistent: r.consistent,
                    min_f: r.min_f,
                    certificate: r.certificate,
                }),
                None,
            ),
            Err(_) => (None, Some("fewer than 5 virial samples; set checkpoint_every")),
        }
    } else {
        (None, None)
    };
    let report = RunReport {
        status: result.status,
        halt: result.halt,
        t_final: result.t_final,
        steps: result.steps,
        dt_final: result.dt_final,
        mass_drift: result.series.mass_drift(),
        energy_drift: result.series.energy_drift(),
        strichartz: result.series.last().map_or(0.0, |r| r.strichartz_cum),
        sup_growth: growth(&result, |r| r.sup_norm),
        grad_growth: (result.field.h1dot_sq() / u0.h1dot_sq().max(1e-300)).sqrt(),
        classification,
        virial,
        virial_note,
    };
    write_json(&dir.join("report.json"), &report)?;
    println!("{}", serde_json::to_string(&json!({
        "status": report.status, "halt": report.halt, "t_final": report.t_final, "steps": report.steps,
    })).expect("serializes"));

    let halted = result.status != Status::Completed;
    if halted && !blowup {
        return Err(Failure::numerical(
            format!("run halted at t = {} ({:?})", result.t_final, result.halt),
            Some(&error_path),
        ));
    }
    Ok(())
}

fn growth(result: &EvolutionResult, f: impl Fn(&crate::diagnostics::DiagnosticsRow) -> f64) -> f64 {
    match (result.series.first(), result.series.last()) {
        (Some(a), Some(b)) if f(a) > 0.0 => f(b) / f(a),
        _ => 1.0,
    }
}

fn write_outputs(dir: &Path, cfg: &RunConfig, result: &EvolutionResult) -> Outcome {
    let fail = |e: Error| Failure::numerical(e.to_string(), None);
    if cfg.diagnostics.csv {
        result.series.write_csv_file(dir.join("series.csv")).map_err(fail)?;
    }
    if cfg.diagnostics.final_state {
        write_nlsh1_file(&result.field, dir.join("final.nlsh")).map_err(fail)?;
    }
    if !result.snapshots.is_empty() {
        let ck = dir.join("checkpoints");
        prepare_dir(&ck)?;
        for (k, (_, f)) in result.snapshots.iter().enumerate() {
            write_nlsh1_file(f, ck.join(format!("state_{k:05}.nlsh"))).map_err(fail)?;
        }
        let times: Vec<f64> = result.snapshots.iter().map(|(t, _)| *t).collect();
        write_json(&ck.join("times.json"), &times)?;
    }
    Ok(())
}

fn read_field(path: &Path) -> std::result::Result<(Field, Vec<u8>), Failure> {
    let bytes = std::fs::read(path).map_err(io_config(path))?;
    let f = read_nlsh1_file(path).map_err(io_config(path))?;
    Ok((f, bytes))
}

/// `e^{-ikπH} f = e^{-ikπd/2} f((-1)^k ·)` at integer multiples of π.
fn symmetry_image(f: &Field, t: f64) -> Option<Field> {
    let k = (t / PI).round();
    if (t - k * PI).abs() > 1e-12 * t.abs().max(1.0) {
        return None;
    }
    let d = f.grid().dim() as f64;
    let phase = Complex64::from_polar(1.0, -k * PI * d / 2.0);
    let base = if (k as i64).rem_euclid(2) == 1 { f.reflect() } else { f.clone() };
    Some(base.scale(phase))
}

fn cmd_propagate(input: &Path, t: f64, method: Method, out: &Path, args: &[String]) -> Outcome {
    let (f, bytes) = read_field(input)?;
    let manifest = Manifest::new("propagate", args).with_hash(&bytes).with_grid(f.grid());
    emit_manifest(&manifest, Some(&sibling(out, ".manifest.json")))?;
    let error_path = sibling(out, ".error.json");
    let g = propagate(&f, t, method).map_err(|e| Failure::numerical(e.to_string(), Some(&error_path)))?;
    if !g.is_finite() {
        return Err(Failure::numerical("propagated field is not finite", Some(&error_path)));
    }
    write_nlsh1_file(&g, out).map_err(|e| Failure::numerical(e.to_string(), None))?;
    let deviation = symmetry_image(&f, t).map(|img| g.max_abs_diff(&img).expect("same grid"));
    let report = json!({
        "t": t,
        "method": method,
        "mass_in": f.mass(),
        "mass_out": g.mass(),
        "max_deviation": deviation,
    });
    println!("{report}");
    Ok(())
}

#[derive(Serialize)]
struct ProfileRecord {
    t: f64,
    x0: Vec<f64>,
    #[serde(rename = "N")]
    n: f64,
    #[serde(rename = "Nprime")]
    n_prime: f64,
    sigma_share: f64,
    level: f64,
}

fn cmd_decompose(
    input: &Path,
    levels: usize,
    eps: f64,
    window: Option<Vec<f64>>,
    out: &Path,
    args: &[String],
) -> Outcome {
    if !(eps > 0.0) {
        return Err(Failure::Config(format!("--eps must be positive, got {eps}")));
    }
    let (f, bytes) = read_field(input)?;
    prepare_dir(out)?;
    let manifest = Manifest::new("decompose", args).with_hash(&bytes).with_grid(f.grid());
    emit_manifest(&manifest, Some(&out.join("manifest.json")))?;
    let error_path = out.join("error.json");
    let mut opts = ExtractOptions::new(eps);
    if let Some(w) = window {
        opts = opts.with_window(w[0], w[1]);
    }
    let num = |e: Error| Failure::numerical(e.to_string(), Some(&error_path));
    let dec = profile_decompose(&f, levels, &opts).map_err(num)?;
    let audit = decoupling_audit(&f, &dec.items, &dec.remainder).map_err(num)?;
    for (j, it) in dec.items.iter().enumerate() {
        write_nlsh1_file(&it.profile, out.join(format!("profile_{j}.nlsh"))).map_err(num)?;
    }
    write_nlsh1_file(&dec.remainder, out.join("remainder.nlsh")).map_err(num)?;
    let profiles: Vec<ProfileRecord> = dec
        .items
        .iter()
        .map(|it| ProfileRecord {
            t: it.frame.t,
            x0: it.frame.x0.clone(),
            n: it.frame.n,
            n_prime: it.frame.n_prime,
            sigma_share: it.sigma_share,
            level: it.level,
        })
        .collect();
    let sigma = f.sigma_norm();
    let report = json!({
        "profiles": profiles,
        "remainder_sigma_share": if sigma > 0.0 { (dec.remainder_sigma / sigma).powi(2) } else { 0.0 },
        "sigma_defect": audit.sigma_defect,
        "potential_defect": audit.potential_defect,
    });
    write_json(&out.join("report.json"), &report)?;
    println!("{report}");
    Ok(())
}

fn cmd_verify(suite: Suite, out: Option<PathBuf>, args: &[String]) -> Outcome {
    if let Some(dir) = &out {
        prepare_dir(dir)?;
    }
    let manifest = Manifest::new("verify", args);
    emit_manifest(&manifest, out.as_ref().map(|d| d.join("manifest.json")).as_deref())?;
    let error_path = out.as_ref().map(|d| d.join("error.json"));
    let checks = run_suite(suite).map_err(|e| Failure::numerical(e.to_string(), error_path.as_deref()))?;
    for c in &checks {
        println!(
            "{} {}/{}: {:.3e} (limit {:.1e})",
            if c.passed { "PASS" } else { "FAIL" },
            c.suite,
            c.name,
            c.value,
            c.tolerance
        );
    }
    if let Some(dir) = &out {
        write_json(&dir.join("report.json"), &checks)?;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    if failed > 0 {
        return Err(Failure::numerical(format!("{failed} of {} checks failed", checks.len()), error_path.as_deref()));
    }
    Ok(())
}

fn cmd_bench(sizes: &[usize], dim: usize, reps: usize, out: Option<PathBuf>, args: &[String]) -> Outcome {
    for &n in sizes {
        Grid::new(dim, 12.0, n).map_err(|e| Failure::Config(e.to_string()))?;
    }
    if let Some(dir) = &out {
        prepare_dir(dir)?;
    }
    let manifest = Manifest::new("bench", args);
    emit_manifest(&manifest, out.as_ref().map(|d| d.join("manifest.json")).as_deref())?;
    let rows = bench_propagators(dim, sizes, reps).map_err(|e| Failure::numerical(e.to_string(), None))?;
    print!("{}", format_table(&rows));
    if let Some(dir) = &out {
        write_json(&dir.join("bench.json"), &rows)?;
    }
    Ok(())
}
