use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::config::{ExperimentConfig, ScenarioKind};
use super::manifest::{ArtifactWriter, Manifest};
use super::pipeline::{run_front, run_transport, PacketSetup, PacketSummary};
use crate::bloch::{BranchSolver, DispersionBranch};
use crate::error::{Error, Result};
use crate::grid::{Fft2, Grid2, KRect};
use crate::nonresonant::{curve_derivative, extend_dispersion, IsoenergeticCurve, NonResonantMask};
use crate::potentials::{check_a1, check_a2, sample_potential, A1Options, A1Report, A2Report, PotentialSpec, ValidationReport};
use crate::transform::{
    analyze, build_eta_delta, fourier_closeness, parseval_defect, sandwich_holds, Closeness, WaveField,
};

/// Result of one scenario: the manifest and whether its checks passed.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub manifest: Manifest,
    pub passed: bool,
    /// One-line human summary.
    pub summary: String,
}

fn grid_of(cfg: &ExperimentConfig) -> Result<Grid2> {
    let (len, res) = cfg.grid_table().ok_or_else(|| Error::input("scenario needs [grid] length and resolution"))?;
    Grid2::centered(len, res)
}

fn setup_of(cfg: &ExperimentConfig, spec: &PotentialSpec, level: usize, slack: f64) -> Result<PacketSetup> {
    let packet = cfg.packet.as_ref().ok_or_else(|| Error::input("scenario needs [packet]"))?;
    PacketSetup::build(grid_of(cfg)?, spec.approximant(level)?, cfg.branch, packet.profile, packet.delta_cells, slack)
}

fn csv_header(seed: u64, kind: &str) -> Vec<u8> {
    format!("# ballistic {kind} seed={seed}\n").into_bytes()
}

/// Runs `cfg` and writes its artifacts plus `manifest.json` into `out`.
/// `config_text` is hashed into the manifest.
pub fn run_scenario(cfg: &ExperimentConfig, config_text: &str, out: &Path) -> Result<RunOutcome> {
    let spec = cfg.potential.build()?;
    let level = cfg.level.unwrap_or(spec.levels());
    let mut w = ArtifactWriter::new(out, cfg.kind.name(), cfg.seed, config_text)?;
    let (passed, summary) = match cfg.kind {
        ScenarioKind::Validate => run_validate(cfg, &spec, level, &mut w)?,
        ScenarioKind::Bands => run_bands(cfg, &spec, level, &mut w)?,
        ScenarioKind::Isoenergy => run_isoenergy(cfg, &spec, level, &mut w)?,
        ScenarioKind::Transform => run_transform(cfg, &spec, level, &mut w)?,
        ScenarioKind::Transport => run_transport_kind(cfg, &spec, level, &mut w)?,
        ScenarioKind::Front => run_front_kind(cfg, &spec, level, &mut w)?,
    };
    Ok(RunOutcome { manifest: w.finish()?, passed, summary })
}

#[derive(Serialize)]
struct SampleStats {
    min: f64,
    max: f64,
    mean: f64,
}

#[derive(Serialize)]
struct ValidateOut {
    seed: u64,
    level: usize,
    levels: usize,
    potential: ValidationReport,
    a1: Option<A1Report>,
    a2: Option<A2Report>,
    sample: Option<SampleStats>,
    passed: bool,
}

fn run_validate(cfg: &ExperimentConfig, spec: &PotentialSpec, level: usize, w: &mut ArtifactWriter) -> Result<(bool, String)> {
    let t = cfg.validate.clone().unwrap_or_default();
    let potential = spec.validate();
    let (a1, a2) = match spec {
        PotentialSpec::QuasiPeriodic(q) => {
            let opts = A1Options { n0: t.n0, n1_floor: t.n1, search_bound: t.search_bound, ..A1Options::default() };
            (Some(check_a1(&q.alpha, opts)?), Some(check_a2(&q.alpha, &q.frequency_set())?))
        }
        _ => (None, None),
    };
    let sample = if t.sample {
        let f = sample_potential(&spec.approximant(level)?, &grid_of(cfg)?)?;
        Some(SampleStats { min: f.min(), max: f.max(), mean: f.mean() })
    } else {
        None
    };
    let passed = potential.is_valid() && a1.as_ref().is_none_or(|r| r.passes()) && a2.as_ref().is_none_or(|r| r.passes());
    let mut parts = vec![format!("invariants {}", if potential.is_valid() { "ok" } else { "violated" })];
    if let Some(r) = &a1 {
        parts.push(format!("A1 {}", if r.passes() { "pass" } else { "fail" }));
    }
    if let Some(r) = &a2 {
        parts.push(format!("A2 {}", if r.passes() { "pass" } else { "fail" }));
    }
    let out = ValidateOut { seed: cfg.seed, level, levels: spec.levels(), potential, a1, a2, sample, passed };
    w.write_json("validate.json", &out)?;
    Ok((passed, parts.join(", ")))
}

#[derive(Serialize)]
struct BandsOut {
    seed: u64,
    level: usize,
    cells: usize,
    dual_dimension: usize,
    nonresonant_fraction: f64,
    blend_width: f64,
    derivative_bounds: [f64; 4],
}

fn run_bands(cfg: &ExperimentConfig, spec: &PotentialSpec, level: usize, w: &mut ArtifactWriter) -> Result<(bool, String)> {
    let t = cfg.bands.as_ref().ok_or_else(|| Error::input("scenario needs [bands]"))?;
    let rect = KRect::spanning(t.lo, t.hi, t.cells)?;
    let k_max = (0..2).map(|a| t.lo[a].abs().max(t.hi[a].abs())).fold(0.0, |s: f64, v| s.hypot(v));
    let solver = BranchSolver::new(spec.approximant(level)?, cfg.branch, k_max)?;
    let branch = DispersionBranch::compute(&solver, rect.clone(), level, spec.coupling())?;
    let mask = NonResonantMask::from_branch(&branch, &cfg.branch);
    let blend = t.blend_width.unwrap_or(3.0 * rect.spacing[0].max(rect.spacing[1]));
    let ext = extend_dispersion(&mask, &branch, blend)?;
    let seed = w.seed();
    w.write_with("branch.csv", |b| {
        b.extend(csv_header(seed, "bands"));
        branch.write_csv(b)
    })?;
    w.write_with("mask.pgm", |b| mask.write_pgm(b))?;
    let mut ext_csv = csv_header(seed, "bands");
    ext_csv.extend(b"kx,ky,blend,lambda_ext\n");
    for (c, k) in rect.centers().enumerate() {
        ext_csv.extend(format!("{:.12e},{:.12e},{:.12e},{:.15e}\n", k[0], k[1], ext.blend[c], ext.lambda[c]).bytes());
    }
    w.write("extension.csv", &ext_csv)?;
    let out = BandsOut {
        seed,
        level,
        cells: rect.len(),
        dual_dimension: solver.dual.len(),
        nonresonant_fraction: mask.fraction(),
        blend_width: blend,
        derivative_bounds: ext.derivative_bounds,
    };
    w.write_json("bands.json", &out)?;
    Ok((true, format!("{} cells, non-resonant fraction {:.4}", out.cells, out.nonresonant_fraction)))
}

#[derive(Serialize)]
struct CurveSummary {
    lambda: f64,
    file: String,
    members: usize,
    directions: usize,
    max_deviation: f64,
    max_derivative: f64,
    direction_measure: f64,
}

#[derive(Serialize)]
struct IsoenergyOut {
    seed: u64,
    level: usize,
    curves: Vec<CurveSummary>,
}

fn run_isoenergy(cfg: &ExperimentConfig, spec: &PotentialSpec, level: usize, w: &mut ArtifactWriter) -> Result<(bool, String)> {
    let t = cfg.isoenergy.as_ref().ok_or_else(|| Error::input("scenario needs [isoenergy]"))?;
    let top = t.lambdas.iter().cloned().fold(0.0, f64::max);
    let solver = BranchSolver::new(spec.approximant(level)?, cfg.branch, 1.5 * top.sqrt() + 1.0)?;
    let seed = w.seed();
    let mut curves = Vec::new();
    for (i, &lambda) in t.lambdas.iter().enumerate() {
        let curve = IsoenergeticCurve::trace(&solver, lambda, level, t.directions)?;
        let d = curve_derivative(&curve)?;
        let file = format!("curve_{i:02}.csv");
        w.write_with(&file, |b| {
            b.extend(csv_header(seed, "isoenergy"));
            curve.write_csv(b)
        })?;
        curves.push(CurveSummary {
            lambda,
            file,
            members: curve.samples.iter().filter(|s| s.member()).count(),
            directions: t.directions,
            max_deviation: curve.max_deviation(),
            max_derivative: d.max_abs,
            direction_measure: curve.direction_measure(),
        });
    }
    let summary = curves
        .iter()
        .map(|c| format!("λ={}: |B|={:.4}", c.lambda, c.direction_measure))
        .collect::<Vec<_>>()
        .join(", ");
    w.write_json("isoenergy.json", &IsoenergyOut { seed, level, curves })?;
    Ok((true, summary))
}

#[derive(Serialize)]
struct CutoffRow {
    delta_cells: f64,
    sandwich: bool,
    gradient_scale: f64,
}

#[derive(Serialize)]
struct TransformOut {
    seed: u64,
    level: usize,
    packet: PacketSummary,
    random_fields: usize,
    max_parseval_defect: f64,
    max_norm_ratio: f64,
    contraction: bool,
    closeness: Closeness,
    cutoffs: Vec<CutoffRow>,
}

/// Unit-norm field with independent uniform real and imaginary parts.
pub fn random_field(grid: &Grid2, rng: &mut ChaCha8Rng) -> WaveField {
    let mut f = WaveField::zeros(grid.clone());
    for z in f.psi.iter_mut() {
        *z = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    f.normalize().expect("nonzero random field");
    f
}

fn run_transform(cfg: &ExperimentConfig, spec: &PotentialSpec, level: usize, w: &mut ArtifactWriter) -> Result<(bool, String)> {
    let t = cfg.transform.clone().unwrap_or_default();
    let setup = setup_of(cfg, spec, level, 3.0)?;
    let grid = setup.grid.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut fft = Fft2::new(grid.n);
    let (mut defect, mut ratio) = (0.0f64, 0.0f64);
    for _ in 0..t.random_fields {
        let f = random_field(&grid, &mut rng);
        defect = defect.max(parseval_defect(&setup.basis, &f, &mut fft)?);
        ratio = ratio.max(analyze(&setup.basis, &f, &mut fft)?.norm_sqr().sqrt() / f.norm());
    }
    let closeness = fourier_closeness(&setup.basis, cfg.seed, t.closeness_iterations)?;
    let rect = setup.basis.window.rect();
    let cell = rect.spacing[0].max(rect.spacing[1]);
    let d0 = cfg.packet.as_ref().map_or(4.0, |p| p.delta_cells);
    let mut cutoffs = Vec::new();
    for m in [1.0, 2.0, 4.0] {
        let eta = build_eta_delta(&rect, &setup.basis.nonresonant, m * d0 * cell)?;
        cutoffs.push(CutoffRow {
            delta_cells: m * d0,
            sandwich: sandwich_holds(&rect, &setup.basis.nonresonant, &eta),
            gradient_scale: eta.gradient_scale,
        });
    }
    let seed = cfg.seed;
    w.write_with("profile.csv", |b| {
        b.extend(csv_header(seed, "transform"));
        setup.amp.write_csv(b)
    })?;
    w.write_with("packet.bin", |b| setup.synthesis.field.write_packet(b))?;
    let contraction = ratio <= 1.0 + 1e-12;
    let passed = contraction && cutoffs.iter().all(|c| c.sandwich);
    let summary = format!("Parseval defect {defect:.2e}, max ‖TF‖/‖F‖ {ratio:.6}, closeness {:.3e}", closeness.estimate);
    let out = TransformOut {
        seed,
        level,
        packet: setup.summary(),
        random_fields: t.random_fields,
        max_parseval_defect: defect,
        max_norm_ratio: ratio,
        contraction,
        closeness,
        cutoffs,
    };
    w.write_json("transform.json", &out)?;
    Ok((passed, summary))
}

#[derive(Serialize)]
struct TransportOut<'a> {
    seed: u64,
    level: usize,
    dt: f64,
    steps: usize,
    packet: PacketSummary,
    report: &'a crate::dynamics::TransportReport,
}

fn run_transport_kind(cfg: &ExperimentConfig, spec: &PotentialSpec, level: usize, w: &mut ArtifactWriter) -> Result<(bool, String)> {
    let t = cfg.transport.as_ref().ok_or_else(|| Error::input("scenario needs [transport]"))?;
    let setup = setup_of(cfg, spec, level, t.slack_widths)?;
    let run = run_transport(&setup, &t.t_grid, t.dt, t.sample_every)?;
    let seed = cfg.seed;
    w.write_with("moments.csv", |b| {
        b.extend(csv_header(seed, "transport"));
        run.evolution.series.write_csv(b)
    })?;
    w.write_with("final.bin", |b| run.evolution.last.write_packet(b))?;
    let r = &run.report;
    let out = TransportOut { seed, level, dt: run.dt, steps: run.evolution.series.steps, packet: setup.summary(), report: r };
    w.write_json("report.json", &out)?;
    let passed = r.trusted && r.floor_holds_beyond_onset() && r.upper_bound.holds;
    let beta = r.beta_abel.map_or("n/a".to_string(), |b| format!("{:.4}±{:.4}", b.beta, b.band));
    Ok((
        passed,
        format!(
            "β_Abel {beta}, coefficient/C_gv {:.4}, floor onset {:?}, trusted {}",
            r.coefficient_ratio, r.onset, r.trusted
        ),
    ))
}

#[derive(Serialize)]
struct FrontOut<'a> {
    seed: u64,
    level: usize,
    dt: f64,
    packet: PacketSummary,
    wrap_risk: bool,
    front: &'a crate::dynamics::FrontProfile,
}

fn run_front_kind(cfg: &ExperimentConfig, spec: &PotentialSpec, level: usize, w: &mut ArtifactWriter) -> Result<(bool, String)> {
    let t = cfg.front.as_ref().ok_or_else(|| Error::input("scenario needs [front]"))?;
    let setup = setup_of(cfg, spec, level, 3.0)?;
    let run = run_front(&setup, t.t, t.dt, t.bin_width, t.tail_radius)?;
    let seed = cfg.seed;
    w.write_with("front.csv", |b| {
        b.extend(csv_header(seed, "front"));
        run.profile.write_csv(b)
    })?;
    w.write_with("final.bin", |b| run.evolution.last.write_packet(b))?;
    let wrap_risk = run.evolution.series.any_wrap_risk();
    let p = &run.profile;
    let out = FrontOut { seed, level, dt: run.dt, packet: setup.summary(), wrap_risk, front: p };
    w.write_json("front.json", &out)?;
    Ok((
        !wrap_risk,
        format!(
            "support [{:.3}, {:.3}], mass in support {:.6}, peak {:.3} vs {:.3}",
            p.predicted_support[0], p.predicted_support[1], p.mass_in_support, p.measured_peak, p.predicted_peak
        ),
    ))
}
