//! The subcommands. Each writes its reports under the output directory and
//! returns whether all of its checks passed.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use quartic_core::bounds::{self, Surd, SurdPi};
use quartic_core::curve::{sample_points, tangent_line};
use quartic_core::hermitian::project;
use quartic_core::mesh::integrate;
use quartic_core::spectral::{self, EigenOptions, ShiftInvert};
use quartic_core::{balance, testmap, uniform, CurveMesh, Error, Herm3, ProjPoint};
use serde::Serialize;

use crate::config::RunConfig;
use crate::plot::{line_plot, Marker, Series};

/// Outcome of a subcommand: the names of failed checks, empty on success.
pub type Failures = Vec<String>;

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn write_text(dir: &Path, name: &str, text: &str) -> Result<PathBuf> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(name);
    std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

#[derive(Serialize)]
struct MeshInfo {
    curve: String,
    level: u32,
    seed: u64,
    n_vertices: usize,
    n_triangles: usize,
    euler_characteristic: i64,
    content_hash: String,
}

fn mesh_info(cfg: &RunConfig, mesh: &CurveMesh) -> Result<MeshInfo> {
    Ok(MeshInfo {
        curve: cfg.curve.clone(),
        level: cfg.level,
        seed: cfg.seed,
        n_vertices: mesh.n_vertices(),
        n_triangles: mesh.topo.triangles.len(),
        euler_characteristic: mesh.euler_characteristic(),
        content_hash: mesh.content_hash()?,
    })
}

#[derive(Serialize)]
struct Check {
    name: String,
    expected: String,
    value: f64,
    error: f64,
    tolerance: f64,
    passed: bool,
}

impl Check {
    fn absolute(name: &str, expected: &str, value: f64, target: f64, tolerance: f64) -> Self {
        let error = (value - target).abs();
        Check { name: name.into(), expected: expected.into(), value, error, tolerance, passed: error < tolerance }
    }

    fn relative(name: &str, expected: &str, value: f64, target: f64, tolerance: f64) -> Self {
        let error = ((value - target) / target).abs();
        Check { name: name.into(), expected: expected.into(), value, error, tolerance, passed: error < tolerance }
    }
}

fn failed(checks: &[Check]) -> Failures {
    checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| format!("{} (expected {}, got {:.6e}, error {:.3e} above {:.1e})", c.name, c.expected, c.value, c.error, c.tolerance))
        .collect()
}

/// Largest residual of each embedding identity over sampled curve points.
fn identity_checks(cfg: &RunConfig, samples: usize) -> Result<Vec<Check>> {
    let curve = cfg.curve()?;
    let id = Herm3::identity();
    let mut worst = [0.0f64; 5];
    for z in sample_points(&curve, samples, cfg.seed) {
        let p = ProjPoint::new(z)?;
        let a = p.projector();
        let b = project(&tangent_line(&curve, &p)?.v)? - a;
        let r = [
            a.norm_sq() - 2.0,
            a.inner(&id) - 2.0,
            b.norm_sq() - 4.0,
            b.inner(&a) + 2.0,
            b.inner(&id),
        ];
        for (w, v) in worst.iter_mut().zip(r) {
            *w = w.max(v.abs());
        }
    }
    let tol = cfg.tolerances.identity;
    let names = [("|A|^2", "2"), ("<A,I>", "2"), ("|B|^2", "4"), ("<B,A>", "-2"), ("<B,I>", "0")];
    Ok(names
        .iter()
        .zip(worst)
        .map(|((n, e), w)| Check {
            name: format!("identity {n}"),
            expected: e.to_string(),
            value: w,
            error: w,
            tolerance: tol,
            passed: w < tol,
        })
        .collect())
}

#[derive(Serialize)]
struct VerifyReport {
    mesh: MeshInfo,
    checks: Vec<Check>,
    passed: bool,
}

pub fn verify(cfg: &RunConfig, mesh_file: Option<&Path>) -> Result<Failures> {
    let curve = cfg.curve()?;
    let mesh = match mesh_file {
        Some(p) => match CurveMesh::load(p, &curve) {
            Ok(m) => m,
            Err(e @ Error::EulerMismatch { .. }) => {
                let name = format!("Euler characteristic of mesh file: {e}");
                write_json(&cfg.out, "verify.json", &serde_json::json!({ "mesh_file": p, "failed": name }))?;
                return Ok(vec![name]);
            }
            Err(e) => return Err(e).with_context(|| format!("loading mesh {}", p.display())),
        },
        None => {
            let m = cfg.mesh()?;
            std::fs::create_dir_all(&cfg.out)?;
            m.save(&cfg.out.join("mesh.json"))?;
            m
        }
    };
    let d = curve.degree() as f64;
    let chi = curve.euler_characteristic();
    let tol = &cfg.tolerances;
    let mut checks = identity_checks(cfg, 1000)?;
    checks.push(Check::absolute(
        "Euler characteristic",
        &chi.to_string(),
        mesh.euler_characteristic() as f64,
        chi as f64,
        0.5,
    ));
    checks.push(Check::absolute(
        "curve residual at vertices",
        "0",
        mesh.max_curve_residual(&curve),
        0.0,
        1e-9,
    ));
    let area = mesh.area(None);
    let s2 = integrate(&mesh, &mesh.sigma2(), None)?;
    let k_defect = integrate(&mesh, &mesh.curvature(), None)?;
    let k_gauss = area - 0.5 * s2;
    let area_exact = 4.0 * PI * d;
    let k_exact = 2.0 * PI * chi as f64;
    let s2_exact = 2.0 * (area_exact - k_exact);
    let pi_str = |v: f64| format!("{}π", (v / PI).round());
    checks.push(Check::relative("area", &pi_str(area_exact), area, area_exact, tol.area_rel));
    if s2_exact != 0.0 {
        checks.push(Check::relative("integral of |sigma|^2", &pi_str(s2_exact), s2, s2_exact, tol.integral_rel));
    } else {
        checks.push(Check::absolute("integral of |sigma|^2", "0", s2, 0.0, tol.integral_rel));
    }
    if k_exact != 0.0 {
        checks.push(Check::relative("integral of K (angle defects)", &pi_str(k_exact), k_defect, k_exact, tol.integral_rel));
        checks.push(Check::relative("integral of K (Gauss equation)", &pi_str(k_exact), k_gauss, k_exact, tol.integral_rel));
    } else {
        checks.push(Check::absolute("integral of K (angle defects)", "0", k_defect, 0.0, tol.integral_rel));
        checks.push(Check::absolute("integral of K (Gauss equation)", "0", k_gauss, 0.0, tol.integral_rel));
    }
    let fails = failed(&checks);
    let report = VerifyReport { mesh: mesh_info(cfg, &mesh)?, checks, passed: fails.is_empty() };
    write_json(&cfg.out, "verify.json", &report)?;
    Ok(fails)
}

#[derive(Clone, Copy, Debug)]
pub struct Grid {
    pub from: f64,
    pub to: f64,
    pub step: f64,
}

impl Grid {
    pub fn points(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !(self.to >= self.from) {
            anyhow::bail!("invalid grid {}..{} step {}", self.from, self.to, self.step);
        }
        let n = ((self.to - self.from) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..n).map(|i| self.from + i as f64 * self.step).collect())
    }
}

#[derive(Serialize)]
struct ScanRow {
    a: f64,
    closed_form_energy: f64,
    mesh_energy: f64,
    #[serde(rename = "F_closed")]
    f_closed: f64,
    #[serde(rename = "F_mesh")]
    f_mesh: f64,
}

#[derive(Serialize)]
struct ScanReport {
    mesh: MeshInfo,
    metric: String,
    grid: [f64; 3],
    /// Exact minimizer and minimum of the closed form, for plane quartics.
    a1_exact: Option<Surd>,
    f_min_exact: Option<SurdPi>,
    a_min_closed: f64,
    a_min_mesh: f64,
    f_min_mesh_over_pi: f64,
    f_at_zero_over_pi: Option<f64>,
    max_rel_diff: f64,
    tolerance: f64,
    passed: bool,
}

/// Vertex of the parabola through three equally spaced samples.
fn parabolic_min(x: [f64; 3], y: [f64; 3]) -> f64 {
    let h = x[1] - x[0];
    let den = y[0] - 2.0 * y[1] + y[2];
    if den > 0.0 {
        x[1] + 0.5 * h * (y[0] - y[2]) / den
    } else {
        x[1]
    }
}

pub fn scan_energy(cfg: &RunConfig, grid: Grid) -> Result<Failures> {
    let curve = cfg.curve()?;
    let mesh = cfg.mesh()?;
    let factor = cfg.factor(&mesh)?;
    let (g, d) = (curve.genus(), curve.degree());
    let k = spectral::assemble_stiffness(&mesh.topo)?;
    let mut rows = Vec::new();
    for a in grid.points()? {
        let energy = spectral::map_energy(&k, &testmap::phi_values(&mesh, a));
        rows.push(ScanRow {
            a,
            closed_form_energy: testmap::total_energy(g, d, a),
            mesh_energy: energy,
            f_closed: testmap::f_general(g, d, a),
            f_mesh: energy / testmap::mean_radius_sq(&mesh, factor.as_ref(), a),
        });
    }
    let imin = (0..rows.len())
        .min_by(|&i, &j| rows[i].f_mesh.total_cmp(&rows[j].f_mesh))
        .expect("grid is not empty");
    let a_min_mesh = if imin > 0 && imin + 1 < rows.len() {
        parabolic_min(
            [rows[imin - 1].a, rows[imin].a, rows[imin + 1].a],
            [rows[imin - 1].f_mesh, rows[imin].f_mesh, rows[imin + 1].f_mesh],
        )
    } else {
        rows[imin].a
    };
    let f_min_mesh_over_pi = testmap::mesh_f(&mesh, factor.as_ref(), a_min_mesh)? / PI;
    let a_min_closed = if d == 4 {
        testmap::golden_section_min(grid.from, grid.to)
    } else {
        let f = |a: f64| testmap::f_general(g, d, a);
        golden(grid.from, grid.to, f)
    };
    let quartic = d == 4;
    let minimizer = testmap::minimize_f();
    let max_rel_diff = rows.iter().map(|r| ((r.f_mesh - r.f_closed) / r.f_closed).abs()).fold(0.0, f64::max);
    let passed = max_rel_diff < cfg.tolerances.energy_rel;

    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r)?;
    }
    let csv_text = String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)?;
    write_text(&cfg.out, "scan_energy.csv", &csv_text)?;

    let closed: Vec<(f64, f64)> = rows.iter().map(|r| (r.a, r.f_closed / PI)).collect();
    let meshv: Vec<(f64, f64)> = rows.iter().map(|r| (r.a, r.f_mesh / PI)).collect();
    let fmin = testmap::f_general(g, d, a_min_closed) / PI;
    let label = format!("minimum a = {a_min_closed:.4}, F/π = {fmin:.3}");
    let svg = line_plot(
        &format!("Energy quotient F(a), {} level {}", cfg.curve, cfg.level),
        "a",
        "F(a) / π",
        &[
            Series { label: "closed form", color: "steelblue", points: &closed },
            Series { label: "mesh", color: "darkorange", points: &meshv },
        ],
        &[Marker { label: &label, x: a_min_closed, y: fmin }],
    );
    write_text(&cfg.out, "scan_energy.svg", &svg)?;

    let f_at_zero = rows.iter().find(|r| r.a == 0.0).map(|r| r.f_mesh / PI);
    let report = ScanReport {
        mesh: mesh_info(cfg, &mesh)?,
        metric: cfg.metric.clone(),
        grid: [grid.from, grid.to, grid.step],
        a1_exact: quartic.then_some(minimizer.a1),
        f_min_exact: quartic.then(|| SurdPi::times_pi(minimizer.value_over_pi)),
        a_min_closed,
        a_min_mesh,
        f_min_mesh_over_pi,
        f_at_zero_over_pi: f_at_zero,
        max_rel_diff,
        tolerance: cfg.tolerances.energy_rel,
        passed,
    };
    write_json(&cfg.out, "scan_energy.json", &report)?;
    Ok(if passed { vec![] } else { vec![format!("closed form vs mesh F(a): max relative difference {max_rel_diff:.3e}")] })
}

/// Golden-section minimization of a unimodal function.
fn golden(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let x1 = hi - r * (hi - lo);
        let x2 = lo + r * (hi - lo);
        if f(x1) < f(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Serialize)]
struct BalanceOutput {
    mesh: MeshInfo,
    metric: String,
    report: balance::BalanceReport,
    verified_residual: f64,
    pushed_mesh_hash: String,
}

pub fn balance(cfg: &RunConfig) -> Result<Failures> {
    let mesh = cfg.mesh()?;
    let factor = cfg.factor(&mesh)?;
    let a = cfg.a();
    let b = match balance::balance_mesh(&mesh, factor.as_ref(), a) {
        Ok(b) => b,
        Err(e) if balance::guaranteed_regime(a) => {
            return Ok(vec![format!("balancing failed for a = {a} where a solution is guaranteed (solver bug): {e}")])
        }
        Err(e) => return Ok(vec![format!("balancing failed for a = {a}: {e}")]),
    };
    let out = BalanceOutput {
        mesh: mesh_info(cfg, &mesh)?,
        metric: cfg.metric.clone(),
        verified_residual: b.verified_residual,
        pushed_mesh_hash: b.mesh.content_hash()?,
        report: b.report,
    };
    let fails = if out.report.residual < cfg.tolerances.balance && out.verified_residual < cfg.tolerances.balance_verify {
        vec![]
    } else {
        vec![format!("balance residual {:.3e}", out.report.residual)]
    };
    write_json(&cfg.out, "balance.json", &out)?;
    Ok(fails)
}

#[derive(Serialize)]
struct SpectrumOutput {
    mesh: MeshInfo,
    metric: String,
    eigenvalues: Vec<f64>,
    area: f64,
    lambda1_area: f64,
    lambda1_area_over_pi: f64,
    clusters: Vec<(f64, usize)>,
    bound: SurdPi,
}

pub fn spectrum(cfg: &RunConfig, count: usize) -> Result<Failures> {
    let mesh = cfg.mesh()?;
    let factor = cfg.factor(&mesh)?;
    let k = spectral::assemble_stiffness(&mesh.topo)?;
    let m = spectral::mass_diagonal(&mesh.topo, factor.as_ref())?;
    let r = ShiftInvert::new(&k)?.solve(&m, count, &EigenOptions { seed: cfg.seed, ..Default::default() })?;
    let out = SpectrumOutput {
        mesh: mesh_info(cfg, &mesh)?,
        metric: cfg.metric.clone(),
        clusters: spectral::clusters(&r.eigenvalues[1..]),
        lambda1_area: r.product,
        lambda1_area_over_pi: r.product / PI,
        area: r.area,
        eigenvalues: r.eigenvalues,
        bound: SurdPi::times_pi(bounds::quartic_bound()),
    };
    write_json(&cfg.out, "spectrum.json", &out)?;
    Ok(vec![])
}

#[derive(Serialize)]
struct UniformizeOutput {
    mesh: MeshInfo,
    target_k: f64,
    residual_norm: f64,
    newton_iterations: usize,
    residual_history: Vec<f64>,
    area: f64,
    /// `2 pi chi / target_k`.
    expected_area: f64,
    area_rel_error: f64,
    gauge_defect: f64,
    factor_file: PathBuf,
}

pub fn uniformize(cfg: &RunConfig, target_k: f64) -> Result<Failures> {
    let mesh = cfg.mesh()?;
    let r = uniform::uniformize(&mesh, target_k)?;
    write_json(&cfg.out, "factor.json", &r.u.u)?;
    let chi = mesh.euler_characteristic() as f64;
    let expected_area = if target_k != 0.0 { 2.0 * PI * chi / target_k } else { mesh.area(None) };
    let area_rel_error = ((r.area - expected_area) / expected_area).abs();
    let passed = r.residual_norm < uniform::RESIDUAL_TOL && area_rel_error < cfg.tolerances.area_rel;
    let out = UniformizeOutput {
        mesh: mesh_info(cfg, &mesh)?,
        target_k,
        residual_norm: r.residual_norm,
        newton_iterations: r.newton_iterations,
        residual_history: r.residual_history,
        area: r.area,
        expected_area,
        area_rel_error,
        gauge_defect: r.gauge_defect,
        factor_file: PathBuf::from("factor.json"),
    };
    write_json(&cfg.out, "uniformize.json", &out)?;
    Ok(if passed { vec![] } else { vec![format!("Gauss-Bonnet area error {area_rel_error:.3e}")] })
}

#[derive(Serialize)]
struct ConstantRow {
    name: String,
    relation: &'static str,
    exact: String,
    value: f64,
    over_pi: f64,
    context: String,
}

fn constant_rows() -> Vec<ConstantRow> {
    let mut rows = Vec::new();
    let mut push = |name: &str, relation: &'static str, exact: String, value: f64, context: &str| {
        rows.push(ConstantRow {
            name: name.into(),
            relation,
            exact,
            value,
            over_pi: value / PI,
            context: context.into(),
        })
    };
    let m = testmap::minimize_f();
    push("a1", "=", m.a1.to_string(), m.a1_f64, "minimizer of F(a) = 24π(7a²-4a+1)/(3a²-3a+1)");
    push("F(a1)", "=", SurdPi::times_pi(m.value_over_pi).to_string(), m.value, "minimum of F, bound for plane quartics");
    push("F(0)", "=", SurdPi::times_pi(Surd::int(24)).to_string(), testmap::f_value(0.0), "test map A alone");
    let th = bounds::balance_threshold();
    push("sqrt(3)/6", "=", th.to_string(), th.to_f64(), "balancing guaranteed for 0 <= a < sqrt(3)/6");
    let hd = bounds::hull_distance();
    push("sqrt(3)/3", "=", hd.to_string(), hd.to_f64(), "distance from I/3 to the boundary of the hull");
    for kv in bounds::known_values() {
        let exact = kv.exact.map(|e| e.to_string()).unwrap_or_else(|| format!("{}π (numerical)", kv.over_pi));
        push(&kv.label, kv.relation.symbol(), exact, kv.over_pi * PI, &format!("genus {}", kv.genus));
    }
    let hy = bounds::yang_yau(3, Some(2));
    push("Lambda_1, hyperelliptic genus 3", "<=", hy.to_string(), hy.to_f64(), "degree-two map to the sphere");
    let yy = bounds::yang_yau(3, Some(3));
    push("8π·gonality, plane quartic", "<=", yy.to_string(), yy.to_f64(), "projection from a point of the curve");
    let (j0, j1) = bounds::jacobi_bounds();
    push("Jacobi lambda_0 * Area", "<=", j0.to_string(), j0.to_f64(), "genus-three minimal surface");
    push("Jacobi lambda_1 * Area", "<=", j1.to_string(), j1.to_f64(), "genus-three minimal surface");
    rows
}

pub fn bound_report(cfg: &RunConfig) -> Result<Failures> {
    let rows = constant_rows();
    let mut md = String::from("| constant | relation | exact | decimal | / π | context |\n|---|---|---|---|---|---|\n");
    for r in &rows {
        md.push_str(&format!(
            "| {} | {} | {} | {:.6} | {:.6} | {} |\n",
            r.name, r.relation, r.exact, r.value, r.over_pi, r.context
        ));
    }
    write_text(&cfg.out, "bounds.md", &md)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &rows {
        w.serialize(r)?;
    }
    write_text(&cfg.out, "bounds.csv", &String::from_utf8(w.into_inner().map_err(|e| anyhow::anyhow!("{e}"))?)?)?;
    write_json(&cfg.out, "bounds.json", &rows)?;
    let mut fails = Vec::new();
    if bounds::a1() >= bounds::balance_threshold() {
        fails.push("a1 lies outside the guaranteed balancing regime".into());
    }
    if bounds::quartic_bound() >= Surd::int(24) {
        fails.push("F(a1) does not improve on 24π".into());
    }
    Ok(fails)
}

#[derive(Serialize)]
struct ChainRun {
    metric: String,
    seed: u64,
    lambda1_area_over_pi: f64,
    /// On the balanced image with the transported measure.
    lambda1_area_pushed_over_pi: f64,
    rayleigh_over_pi: f64,
    bound_over_pi: f64,
    balance_residual: f64,
    verified_balance_residual: f64,
    lambda1_le_rayleigh: bool,
    rayleigh_le_bound: bool,
    holds: bool,
    error: Option<String>,
}

#[derive(Serialize)]
struct TheoremReport {
    mesh: MeshInfo,
    a1: Surd,
    a1_value: f64,
    bound: SurdPi,
    bound_value: f64,
    slack: f64,
    runs: Vec<ChainRun>,
    all_hold: bool,
}

fn chain_run(cfg: &RunConfig, mesh: &CurveMesh, seed: u64, a1: f64, bound: f64) -> Result<ChainRun> {
    let run_cfg = RunConfig { seed, ..cfg.clone() };
    let factor = run_cfg.factor(mesh)?;
    let l1 = spectral::lambda1_area(&mesh.topo, factor.as_ref())?;
    let mut run = ChainRun {
        metric: cfg.metric.clone(),
        seed,
        lambda1_area_over_pi: l1 / PI,
        lambda1_area_pushed_over_pi: f64::NAN,
        rayleigh_over_pi: f64::NAN,
        bound_over_pi: bound / PI,
        balance_residual: f64::NAN,
        verified_balance_residual: f64::NAN,
        lambda1_le_rayleigh: false,
        rayleigh_le_bound: false,
        holds: false,
        error: None,
    };
    let b = match balance::balance_mesh(mesh, factor.as_ref(), a1) {
        Ok(b) => b,
        Err(e) => {
            run.error = Some(format!("balancing failed in the guaranteed regime (solver bug): {e}"));
            return Ok(run);
        }
    };
    run.balance_residual = b.report.residual;
    run.verified_balance_residual = b.verified_residual;
    let rb = spectral::rayleigh_bound(&b.mesh, Some(&b.factor), a1)?;
    let l1p = spectral::lambda1_area(&b.mesh.topo, Some(&b.factor))?;
    run.lambda1_area_pushed_over_pi = l1p / PI;
    run.rayleigh_over_pi = rb.value / PI;
    run.lambda1_le_rayleigh = l1p <= rb.value;
    run.rayleigh_le_bound = rb.value <= bound * (1.0 + cfg.tolerances.chain_slack);
    run.holds = run.lambda1_le_rayleigh && run.rayleigh_le_bound && l1 <= bound * (1.0 + cfg.tolerances.chain_slack);
    Ok(run)
}

pub fn full_theorem(cfg: &RunConfig, batch: usize) -> Result<Failures> {
    let mesh = cfg.mesh()?;
    let m = testmap::minimize_f();
    let bound = m.value;
    let batch = batch.max(1);
    let mut runs = Vec::with_capacity(batch);
    for i in 0..batch as u64 {
        runs.push(chain_run(cfg, &mesh, cfg.seed + i, m.a1_f64, bound)?);
    }
    let fails: Failures = runs
        .iter()
        .filter(|r| !r.holds)
        .map(|r| match &r.error {
            Some(e) => format!("seed {}: {e}", r.seed),
            None => format!(
                "seed {}: chain {:.4}π <= {:.4}π <= {:.4}π fails",
                r.seed, r.lambda1_area_pushed_over_pi, r.rayleigh_over_pi, r.bound_over_pi
            ),
        })
        .collect();
    let report = TheoremReport {
        mesh: mesh_info(cfg, &mesh)?,
        a1: m.a1,
        a1_value: m.a1_f64,
        bound: SurdPi::times_pi(m.value_over_pi),
        bound_value: bound,
        slack: cfg.tolerances.chain_slack,
        all_hold: fails.is_empty(),
        runs,
    };
    write_json(&cfg.out, "full_theorem.json", &report)?;
    Ok(fails)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points_are_exact_multiples() {
        let g = Grid { from: -0.5, to: 1.5, step: 0.01 };
        let p = g.points().unwrap();
        assert_eq!(p.len(), 201);
        assert_eq!(p[50], 0.0);
        assert!((p[200] - 1.5).abs() < 1e-12);
        assert!(Grid { from: 1.0, to: 0.0, step: 0.1 }.points().is_err());
    }

    #[test]
    fn parabola_vertex() {
        let f = |x: f64| (x - 0.3).powi(2);
        let v = parabolic_min([0.2, 0.25, 0.3], [f(0.2), f(0.25), f(0.3)]);
        assert!((v - 0.3).abs() < 1e-12);
    }

    #[test]
    fn constant_table_has_exact_forms() {
        let rows = constant_rows();
        let f = rows.iter().find(|r| r.name == "F(a1)").unwrap();
        assert_eq!(f.exact, "(64 - 16√7)π");
        assert!((f.over_pi - 21.668).abs() < 5e-4);
        let j = rows.iter().find(|r| r.name == "Jacobi lambda_1 * Area").unwrap();
        assert_eq!(j.exact, "(48 - 16√7)π");
    }
}
