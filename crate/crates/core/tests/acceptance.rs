//! One PASS/FAIL line per acceptance criterion. Expected values come from
//! closed forms or from independent computations in this file.

use std::path::{Path, PathBuf};
use std::time::Instant;

use ballistic::bloch::{
    select_plane_wave_branch, solve_dense, solve_recursive, BranchOptions, BranchOutcome, BranchSolver, RecursiveOptions,
    DEFAULT_DENSE_LIMIT,
};
use ballistic::dynamics::Propagator;
use ballistic::nonresonant::{curve_derivative, IsoenergeticCurve};
use ballistic::potentials::{check_a1, check_a2, sample_potential, A1Options, Alpha, QuasiPeriodicPotential};
use ballistic::scenario::{random_field, run_front, run_scenario, run_transport, ExperimentConfig, PacketSetup};
use ballistic::transform::{
    analyze, build_eta_delta, parseval_defect, sandwich_holds, PacketBasis, ProfileShape, WaveField,
};
use ballistic::{DualWindow, Fft2, Grid2, KRect};
use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(bool, String), String>;

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn load(name: &str) -> (ExperimentConfig, String) {
    let p = scenario_path(name);
    let text = std::fs::read_to_string(&p).expect("shipped scenario");
    (ExperimentConfig::parse(&text, &p).expect("valid scenario"), text)
}

fn setup(cfg: &ExperimentConfig) -> PacketSetup {
    let spec = cfg.potential.build().unwrap();
    let (len, res) = cfg.grid_table().unwrap();
    let packet = cfg.packet.as_ref().unwrap();
    let slack = cfg.transport.as_ref().map_or(3.0, |t| t.slack_widths);
    PacketSetup::build(
        Grid2::centered(len, res).unwrap(),
        spec.approximant(cfg.level.unwrap_or(spec.levels())).unwrap(),
        cfg.branch,
        packet.profile,
        packet.delta_cells,
        slack,
    )
    .unwrap()
}

fn lp_solver(k_max: f64) -> BranchSolver {
    let (cfg, _) = load("transport_lp.toml");
    let spec = cfg.potential.build().unwrap();
    BranchSolver::new(spec.approximant(1).unwrap(), BranchOptions::default(), k_max).unwrap()
}

/// Free law: `⟨⟨X²⟩⟩_T = X₀ + 2 T² ⟨|k|²⟩` with `X₀ = 1/(2σ²)` and
/// `⟨|k|²⟩ = |k₀|² + 2σ²` for `|φ̂|² ∝ exp(-|k-k₀|²/2σ²)`.
fn criterion_1() -> Check {
    let (cfg, _) = load("free_ballistic.toml");
    let start = Instant::now();
    let s = setup(&cfg);
    let t = cfg.transport.as_ref().unwrap();
    let run = run_transport(&s, &t.t_grid, t.dt, t.sample_every).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed().as_secs_f64();
    let ProfileShape::Gaussian { center, sigma } = cfg.packet.as_ref().unwrap().profile else {
        return Err("expected a Gaussian profile".into());
    };
    let k2 = center[0] * center[0] + center[1] * center[1] + 2.0 * sigma * sigma;
    let x0 = 1.0 / (2.0 * sigma * sigma);
    let worst = run
        .report
        .abel
        .iter()
        .map(|m| ((m.value - (x0 + 2.0 * m.t * m.t * k2)) / (x0 + 2.0 * m.t * m.t * k2)).abs())
        .fold(0.0, f64::max);
    let span = t.t_grid.last().unwrap() / t.t_grid[0];
    let ok = worst < 0.02 && span >= 10.0 * (1.0 - 1e-9) && !run.report.wrap_risk && elapsed < 300.0;
    Ok((ok, format!("max rel. deviation {worst:.2e} (tol 2e-2) over T-span x{span:.1}, 512² run {elapsed:.1} s (< 300 s)")))
}

fn criterion_2() -> Check {
    let (cfg, _) = load("transport_lp.toml");
    let s = setup(&cfg);
    let t = cfg.transport.as_ref().unwrap();
    let r = run_transport(&s, &t.t_grid, t.dt, t.sample_every).map_err(|e| e.to_string())?.report;
    let floor = r.floor_holds_beyond_onset();
    let agree = (r.coefficient_ratio - 1.0).abs() <= 0.10;
    let ok = floor && agree && r.trusted && r.onset.is_some();
    Ok((
        ok,
        format!(
            "floor c1 T² holds from T0 = {:?} (c1 = {:.4}); measured/C_gv = {:.4} (tol 10%); trusted {}",
            r.onset, r.predictions.c1, r.coefficient_ratio, r.trusted
        ),
    ))
}

/// 50 non-resonant quasimomenta in the annulus `4 <= |k| <= 8`.
fn annulus_points(solver: &BranchSolver) -> Vec<[f64; 2]> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut out = Vec::new();
    while out.len() < 50 {
        let r = rng.gen_range(4.0..8.0);
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let k = [r * phi.cos(), r * phi.sin()];
        if solver.nonresonant(k).unwrap().is_some() {
            out.push(k);
        }
    }
    out
}

fn dense_point(solver: &BranchSolver, k: [f64; 2]) -> Result<ballistic::bloch::DispersionPoint, String> {
    let m = solver.matrix(k).map_err(|e| e.to_string())?;
    let pairs = solve_dense(&m, DEFAULT_DENSE_LIMIT).map_err(|e| e.to_string())?;
    match select_plane_wave_branch(&pairs, &m, solver.options.theta).map_err(|e| e.to_string())? {
        BranchOutcome::Plane(p) => Ok(p),
        BranchOutcome::Resonant(_) => Err(format!("dense branch resonant at {k:?}")),
    }
}

fn criterion_3() -> Check {
    let solver = lp_solver(8.0);
    let (mut ev, mut cd, mut l1) = (0.0f64, 0.0f64, 0.0f64);
    for k in annulus_points(&solver) {
        let m = solver.matrix(k).map_err(|e| e.to_string())?;
        let d = dense_point(&solver, k)?;
        let r = solve_recursive(&m, RecursiveOptions::default()).map_err(|e| e.to_string())?;
        let k2 = k[0] * k[0] + k[1] * k[1];
        ev = ev.max((d.lambda - r.lambda).abs() / k2);
        let dist: f64 = d.coefficients.iter().zip(&r.coefficients).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        cd = cd.max(dist);
        l1 = l1.max(d.unit_leading().iter().map(|c| c.norm()).sum());
    }
    let ok = ev <= 1e-8 && cd <= 1e-6 && l1 < 2.0;
    Ok((ok, format!("max |Δλ|/|k|² {ev:.2e} (tol 1e-8), max ℓ² distance {cd:.2e} (tol 1e-6), max Σ|C_r| {l1:.6} (< 2)")))
}

fn criterion_4() -> Check {
    let solver = lp_solver(8.0);
    let h = 1e-4;
    let (mut rel, mut ratio) = (0.0f64, f64::INFINITY);
    for k in annulus_points(&solver) {
        let p = dense_point(&solver, k)?;
        let lam = |q: [f64; 2]| dense_point(&solver, q).map(|p| p.lambda);
        let fd = [
            (lam([k[0] + h, k[1]])? - lam([k[0] - h, k[1]])?) / (2.0 * h),
            (lam([k[0], k[1] + h])? - lam([k[0], k[1] - h])?) / (2.0 * h),
        ];
        let diff = (p.grad[0] - fd[0]).hypot(p.grad[1] - fd[1]);
        rel = rel.max(diff / fd[0].hypot(fd[1]));
        ratio = ratio.min(p.grad[0].hypot(p.grad[1]) / k[0].hypot(k[1]));
    }
    let ok = rel < 1e-4 && ratio >= 1.0;
    Ok((ok, format!("max rel. gradient error {rel:.2e} (tol 1e-4), min |∇λ|/|k| {ratio:.4} (>= 1)")))
}

fn criterion_5() -> Check {
    let (cfg, _) = load("isoenergy_lp.toml");
    let spec = cfg.potential.build().unwrap();
    let iso = cfg.isoenergy.as_ref().unwrap();
    let solver = BranchSolver::new(spec.approximant(1).unwrap(), cfg.branch, 13.0).unwrap();
    let mut dev = Vec::new();
    let mut der = Vec::new();
    let mut meas = Vec::new();
    for &lambda in &[16.0, 36.0, 64.0] {
        let c = IsoenergeticCurve::trace(&solver, lambda, 1, iso.directions).map_err(|e| e.to_string())?;
        dev.push(c.max_deviation());
        der.push(curve_derivative(&c).map_err(|e| e.to_string())?.max_abs);
        meas.push(c.direction_measure());
    }
    let dec = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let ok = dec(&dev) && dec(&der) && meas.windows(2).all(|w| w[1] >= w[0]) && meas.iter().all(|m| *m <= std::f64::consts::TAU);
    Ok((
        ok,
        format!(
            "max|κ-√λ| {:.2e} > {:.2e} > {:.2e}; max|dκ/dφ| {:.2e} > {:.2e} > {:.2e}; |B| {:.4} <= {:.4} <= {:.4} (2π = 6.2832)",
            dev[0], dev[1], dev[2], der[0], der[1], der[2], meas[0], meas[1], meas[2]
        ),
    ))
}

/// Half-plane mask `kx >= 0` on a square rectangle.
fn half_plane(n: usize) -> (KRect, Vec<bool>) {
    let rect = KRect::spanning([-(n as f64) / 2.0, 0.0], [n as f64 / 2.0, n as f64], [n, n]).unwrap();
    let mask = (0..n * n).map(|c| rect.center(c / n, c % n)[0] >= 0.0).collect();
    (rect, mask)
}

fn criterion_6() -> Check {
    let grid = Grid2::centered([32.0, 32.0], [64, 64]).unwrap();
    let free = BranchSolver::new(
        ballistic::potentials::FourierPotential::zero(ballistic::potentials::FrequencyModule::Lattice {
            step: [std::f64::consts::TAU; 2],
        }),
        BranchOptions::default(),
        20.0,
    )
    .unwrap();
    let full = PacketBasis::compute(&free, DualWindow::full(grid.clone()), None).map_err(|e| e.to_string())?;
    let half = PacketBasis::compute(&free, DualWindow::new(grid.clone(), [-16, -32], [32, 64]).unwrap(), None)
        .map_err(|e| e.to_string())?;
    let (cfg, _) = load("transform_lp.toml");
    let lp = setup(&cfg);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut fft = Fft2::new(grid.n);
    let mut lp_fft = Fft2::new(lp.grid.n);
    let (mut defect, mut ratio) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let f = random_field(&grid, &mut rng);
        for b in [&full, &half] {
            defect = defect.max(parseval_defect(b, &f, &mut fft).map_err(|e| e.to_string())?);
            ratio = ratio.max(analyze(b, &f, &mut fft).map_err(|e| e.to_string())?.norm_sqr().sqrt() / f.norm());
        }
        let g = random_field(&lp.grid, &mut rng);
        ratio = ratio.max(analyze(&lp.basis, &g, &mut lp_fft).map_err(|e| e.to_string())?.norm_sqr().sqrt() / g.norm());
    }
    let (rect, mask) = half_plane(96);
    let mut scales = Vec::new();
    let mut sandwich = true;
    for cells in [4.0, 8.0, 16.0] {
        let eta = build_eta_delta(&rect, &mask, cells).map_err(|e| e.to_string())?;
        sandwich &= sandwich_holds(&rect, &mask, &eta);
        scales.push(eta.gradient_scale);
    }
    // continuum value for a half-plane: δ times the peak of the projected
    // bump (1 - r²/R²)^4, R = δ/2, which is 2 (256/315) / (π/5) = 2560/(315π)
    let bound = 2560.0 / (315.0 * std::f64::consts::PI);
    let bounded = scales.iter().all(|s| *s <= 1.05 * bound && *s >= 0.5 * bound);
    let ok = defect < 1e-10 && ratio <= 1.0 + 1e-12 && sandwich && bounded;
    Ok((
        ok,
        format!(
            "free Parseval defect {defect:.1e} (< 1e-10); max ‖TF‖/‖F‖ {ratio:.12} (<= 1); sandwich {sandwich}; \
             sup|∇η|·δ = {:.3}, {:.3}, {:.3} at δ = 4, 8, 16 cells (within [0.5, 1.05] x {bound:.3})",
            scales[0], scales[1], scales[2]
        ),
    ))
}

/// `i ∂ψ/∂t = (-Δ + V) ψ` by RK4 in the interaction picture
/// `φ̂(t) = e^{i|k|²t} ψ̂(t)`, where the kinetic part is exact.
fn rk4_oracle(psi0: &WaveField, v: &Array2<f64>, t_end: f64, steps: usize) -> WaveField {
    let g = &psi0.grid;
    let n = (g.n[0] * g.n[1]) as f64;
    let mut fft = Fft2::new(g.n);
    let k2 = Array2::from_shape_fn((g.n[0], g.n[1]), |(i, j)| g.k(0, i).powi(2) + g.k(1, j).powi(2));
    let mut phi = psi0.psi.clone();
    fft.forward(&mut phi);
    let mut rhs = |t: f64, a: &Array2<Complex64>| -> Array2<Complex64> {
        let mut x = Array2::from_shape_fn(a.dim(), |ij| a[ij] * Complex64::from_polar(1.0, -k2[ij] * t));
        fft.inverse(&mut x);
        x.zip_mut_with(v, |z, vv| *z *= *vv / n);
        fft.forward(&mut x);
        Array2::from_shape_fn(a.dim(), |ij| Complex64::new(0.0, -1.0) * x[ij] * Complex64::from_polar(1.0, k2[ij] * t))
    };
    let h = t_end / steps as f64;
    for s in 0..steps {
        let t = s as f64 * h;
        let k1 = rhs(t, &phi);
        let k2s = rhs(t + h / 2.0, &(&phi + &k1.mapv(|z| z * (h / 2.0))));
        let k3 = rhs(t + h / 2.0, &(&phi + &k2s.mapv(|z| z * (h / 2.0))));
        let k4 = rhs(t + h, &(&phi + &k3.mapv(|z| z * h)));
        phi = &phi + &((&k1 + &k2s.mapv(|z| z * 2.0) + &k3.mapv(|z| z * 2.0) + &k4).mapv(|z| z * (h / 6.0)));
    }
    let mut out = Array2::from_shape_fn(phi.dim(), |ij| phi[ij] * Complex64::from_polar(1.0, -k2[ij] * t_end));
    fft.inverse(&mut out);
    out.mapv_inplace(|z| z / n);
    WaveField { grid: g.clone(), psi: out, time: t_end }
}

fn criterion_7() -> Check {
    let grid = Grid2::centered([4.0, 4.0], [64, 64]).unwrap();
    let (cfg, _) = load("transport_lp.toml");
    let spec = cfg.potential.build().unwrap();
    // unit coupling so the splitting error stands well above round-off
    let pot = spec.approximant(1).unwrap().scaled(1.0 / spec.coupling());
    let field = sample_potential(&pot, &grid).map_err(|e| e.to_string())?;
    let mut psi0 = WaveField::from_fn(grid.clone(), |x| {
        Complex64::from_polar((-(x[0] * x[0] + x[1] * x[1]) / 0.5).exp(), 2.0 * x[0])
    });
    psi0.normalize().map_err(|e| e.to_string())?;

    let mut prop = Propagator::new(&grid, Some(&field), 1e-3).map_err(|e| e.to_string())?;
    let mut f = psi0.clone();
    prop.advance(&mut f, 1000).map_err(|e| e.to_string())?;
    let drift = (f.norm() - psi0.norm()).abs() / psi0.norm();
    let mut back = Propagator::new(&grid, Some(&field), -1e-3).map_err(|e| e.to_string())?;
    back.advance(&mut f, 1000).map_err(|e| e.to_string())?;
    let reversal = f.distance(&psi0);

    let t_end = 0.5;
    let exact = rk4_oracle(&psi0, &field.samples, t_end, 2000);
    let strang = |dt: f64| -> Result<f64, String> {
        let mut p = Propagator::new(&grid, Some(&field), dt).map_err(|e| e.to_string())?;
        let mut g = psi0.clone();
        p.advance(&mut g, (t_end / dt).round() as usize).map_err(|e| e.to_string())?;
        Ok(g.distance(&exact))
    };
    let (e1, e2) = (strang(0.01)?, strang(0.005)?);
    let ratio = e1 / e2;
    let ok = drift < 1e-10 && reversal < 1e-9 && (3.5..=4.5).contains(&ratio);
    Ok((
        ok,
        format!(
            "norm drift {drift:.1e}/1e3 steps (< 1e-10); reversal {reversal:.1e} (< 1e-9); \
             error {e1:.3e} -> {e2:.3e}, ratio {ratio:.3} (in [3.5, 4.5])"
        ),
    ))
}

fn criterion_8() -> Check {
    let (cfg, _) = load("front_ring.toml");
    let s = setup(&cfg);
    let t = cfg.front.as_ref().unwrap();
    let run = run_front(&s, t.t, t.dt, t.bin_width, t.tail_radius).map_err(|e| e.to_string())?;
    let ProfileShape::Ring { k_min, k_max } = cfg.packet.as_ref().unwrap().profile else {
        return Err("expected a ring profile".into());
    };
    let w = t.bin_width;
    // group velocity 2k: the band is [2 k_min, 2 k_max], widened by one bin
    let (lo, hi) = (2.0 * k_min - w, 2.0 * k_max + w);
    let eps = 1e-9;
    let inside: f64 = run
        .profile
        .bins
        .iter()
        .filter(|b| b.z_lo >= lo - eps && b.z_hi <= hi + eps)
        .map(|b| b.measured)
        .sum();
    let wrap = run.evolution.series.any_wrap_risk();
    let peak_ok = (run.profile.measured_peak - run.profile.predicted_peak).abs() <= w + eps;
    let ok = inside >= 0.999 && !wrap && peak_ok;
    Ok((
        ok,
        format!(
            "mass in [{lo}, {hi}] = {inside:.6} (>= 0.999); peak {:.3} vs predicted {:.3}; wrap risk {wrap}",
            run.profile.measured_peak, run.profile.predicted_peak
        ),
    ))
}

fn criterion_9() -> Check {
    let golden = Alpha::golden();
    let a1 = check_a1(&golden, A1Options::default()).map_err(|e| e.to_string())?;
    let sep = QuasiPeriodicPotential::separable_example(golden.clone()).map_err(|e| e.to_string())?;
    let mix = QuasiPeriodicPotential::mixed_example(golden.clone()).map_err(|e| e.to_string())?;
    let a2_sep = check_a2(&golden, &sep.frequency_set()).map_err(|e| e.to_string())?;
    let a2_mix = check_a2(&golden, &mix.frequency_set()).map_err(|e| e.to_string())?;
    // α² + α - 1 = 0 for α = (√5 - 1)/2
    let relation = a1.exact_zeros.iter().any(|n| n[1] == n[2] && n[0] == -n[1]);
    let ok = a1.passes() && a1.exact_zero_count > 0 && relation && !a2_sep.passes() && a2_mix.passes();
    Ok((
        ok,
        format!(
            "A1 golden: {} ({} exact zeros, minimal relation found {relation}); A2 separable: {}; A2 non-separable: {}",
            if a1.passes() { "pass" } else { "fail" },
            a1.exact_zero_count,
            if a2_sep.passes() { "pass" } else { "fail" },
            if a2_mix.passes() { "pass" } else { "fail" }
        ),
    ))
}

fn criterion_10() -> Check {
    let root = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut compared = 0;
    for name in ["transform_lp.toml", "bands_lp.toml", "validate_qp.toml"] {
        let (cfg, text) = load(name);
        let a = root.path().join(format!("{name}.a"));
        let b = root.path().join(format!("{name}.b"));
        let ma = run_scenario(&cfg, &text, &a).map_err(|e| e.to_string())?.manifest;
        run_scenario(&cfg, &text, &b).map_err(|e| e.to_string())?;
        let mut files: Vec<String> = ma.artifacts.iter().map(|e| e.file.clone()).collect();
        files.push("manifest.json".into());
        for f in files {
            let (x, y) = (std::fs::read(a.join(&f)).map_err(|e| e.to_string())?, std::fs::read(b.join(&f)).map_err(|e| e.to_string())?);
            if x != y {
                return Ok((false, format!("{name}: {f} differs between runs")));
            }
            compared += 1;
        }
    }
    Ok((true, format!("{compared} files byte-identical across two runs of 3 shipped scenarios")))
}

fn main() {
    let checks: [(&str, fn() -> Check); 10] = [
        ("free ballistic law", criterion_1),
        ("ballistic floor at g = 0.05", criterion_2),
        ("recursive vs dense branch", criterion_3),
        ("Hellmann-Feynman gradient", criterion_4),
        ("isoenergetic trends", criterion_5),
        ("transform identities", criterion_6),
        ("propagator properties", criterion_7),
        ("stationary-phase front", criterion_8),
        ("A1/A2 validators", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in checks.iter().enumerate() {
        let (ok, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        println!("criterion {:>2} {}: {name}: {detail}", i + 1, if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
