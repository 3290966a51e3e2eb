//! Subcommand bodies. Each returns `Ok(true)` when everything requested
//! passed or converged.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use dpfilm::energy::{full_energy_3d, interface_length, reduced_energy, rescaled_energy_eps, z_average, EnergyBreakdown, Params};
use dpfilm::geometry::{cutoff_chi, signed_distance, CutoffField, SignedDistanceField};
use dpfilm::io::{load_field, save_field2d, save_field3d, FieldData};
use dpfilm::minimize::gioia::{gioia_sweep, GioiaConfig};
use dpfilm::minimize::sweep::{sweep_lambda, SweepConfig};
use dpfilm::minimize::{minimize_3d, minimize_reduced, EnergyKind, InitRegistry};
use dpfilm::verify::{CheckRegistry, VerifyConfig};
use dpfilm::{Boundary, DomainSpec, Field2D, Field3D};
use serde::Serialize;

use crate::config::{check_version, load, parse_number, parse_range, EnergyFile, GioiaFile, MinimizeFile, SweepFile, VerifyFile, SCHEMA_VERSION};
use crate::Common;

/// All files of a run go through here, one at a time.
struct Output<'a> {
    dir: &'a Path,
}

impl Output<'_> {
    fn json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        std::fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }

    fn csv<R: Serialize>(&self, name: &str, header: &[&str], rows: impl IntoIterator<Item = R>) -> Result<PathBuf> {
        let path = self.dir.join(name);
        let mut w = csv::WriterBuilder::new().has_headers(false).from_path(&path).with_context(|| format!("writing {}", path.display()))?;
        w.write_record(header)?;
        for r in rows {
            w.serialize(r)?;
        }
        w.flush()?;
        Ok(path)
    }
}

fn check_padding(p: Option<usize>) -> Result<()> {
    if let Some(p) = p {
        if ![1, 2, 4].contains(&p) {
            bail!("padding must be 1, 2 or 4, got {p}");
        }
    }
    Ok(())
}

/// Cutoff for the planar energies: built at `δ` (reduced) or `εδ`
/// (rescaled); absent for the local energy or a zero thickness.
fn planar_cutoff(sdf: &SignedDistanceField, params: &Params, kind: EnergyKind) -> Result<Option<CutoffField>> {
    let t = match kind {
        EnergyKind::Local => return Ok(None),
        EnergyKind::Reduced => params.delta,
        EnergyKind::Rescaled => params.eps.context("the rescaled energy needs `eps` in params")? * params.delta,
    };
    Ok(if t > 0.0 { Some(cutoff_chi(sdf, t)?) } else { None })
}

#[derive(Serialize)]
struct EnergyReport {
    kind: &'static str,
    energy: EnergyKind,
    nx: usize,
    ny: usize,
    nz: usize,
    breakdown: EnergyBreakdown,
}

pub fn energy(c: &Common, field: Option<PathBuf>, params: Option<PathBuf>) -> Result<bool> {
    let file: EnergyFile = match &c.config {
        Some(p) => load(p)?,
        None => EnergyFile { schema_version: SCHEMA_VERSION, field: None, params: None, energy: EnergyKind::Reduced, domain: None },
    };
    check_version(file.schema_version)?;
    check_padding(c.padding)?;
    let path = field.or(file.field).context("no field given (--field, or `field` in the config)")?;
    let mut p = match params {
        Some(pp) => load::<Params>(&pp)?,
        None => file.params.context("no parameters given (--params, or `params` in the config)")?,
    };
    if c.padding.is_some() {
        p.padding = c.padding;
    }
    let report = match load_field(&path)? {
        FieldData::Plane(mut f) => {
            let chi = match &file.domain {
                Some(d) => {
                    let sdf = signed_distance(d, &f.grid)?;
                    f.mask = sdf.domain_mask();
                    planar_cutoff(&sdf, &p, file.energy)?
                }
                None => None,
            };
            let chi = chi.unwrap_or_else(|| CutoffField::ones(f.grid));
            let b = match file.energy {
                EnergyKind::Reduced => reduced_energy(&f, &p, &chi)?,
                EnergyKind::Rescaled => rescaled_energy_eps(&f, &p, &chi)?,
                EnergyKind::Local => {
                    use dpfilm::energy::{Objective, PlanarEnergy};
                    PlanarEnergy::local(f.grid, f.mask.clone(), f.boundary).breakdown(&f.values)
                }
            };
            EnergyReport { kind: "planar", energy: file.energy, nx: f.grid.nx, ny: f.grid.ny, nz: 1, breakdown: b }
        }
        FieldData::Stack(mut s) => {
            if let Some(d) = &file.domain {
                s.mask = signed_distance(d, &s.grid)?.domain_mask();
            }
            if (s.thickness - p.delta).abs() > 1e-9 * p.delta.max(1e-300) {
                bail!("stack thickness {} differs from params.delta = {}", s.thickness, p.delta);
            }
            let b = full_energy_3d(&s, &p, None)?;
            EnergyReport { kind: "layered", energy: file.energy, nx: s.grid.nx, ny: s.grid.ny, nz: s.nz(), breakdown: b }
        }
    };
    let out = Output { dir: &c.out };
    out.json("energy.json", &report)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(true)
}

#[derive(Serialize)]
struct MinimizeReport {
    breakdown: EnergyBreakdown,
    iterations: usize,
    proj_grad: f64,
    converged: bool,
    interface_length: f64,
}

#[derive(Serialize)]
struct HistoryRow {
    iteration: usize,
    energy: f64,
}

pub fn minimize(c: &Common, layered: bool) -> Result<bool> {
    let path = c.config.as_ref().context("minimize needs --config")?;
    let mut file: MinimizeFile = load(path)?;
    check_version(file.schema_version)?;
    check_padding(c.padding)?;
    if c.padding.is_some() {
        file.params.padding = c.padding;
    }
    if let Some(s) = c.seed {
        file.minimize.init.seed = s;
    }
    if !(file.spacing > 0.0) {
        bail!("spacing must be positive, got {}", file.spacing);
    }
    file.domain.validate()?;
    let (grid, sdf, mask) = domain_grid(&file.domain, file.spacing)?;
    let x0 = InitRegistry::default().build(&grid, &mask, &file.minimize.init)?;
    let out = Output { dir: &c.out };
    let (report, history) = if layered {
        let init = Field3D::from_layers(grid, mask, file.params.delta, vec![x0; file.nz])?;
        let r = minimize_3d(&init, &file.params, None, &file.minimize, Some(&sdf))?;
        let avg = z_average(&r.stack);
        save_field3d(&c.out.join("stack.bin"), &r.stack)?;
        save_field2d(&c.out.join("average.bin"), &avg)?;
        let len = interface_length(&avg);
        (MinimizeReport { breakdown: r.breakdown, iterations: r.iterations, proj_grad: r.proj_grad, converged: r.converged, interface_length: len }, r.history)
    } else {
        let init = Field2D { grid, values: x0, mask, boundary: Boundary::Open };
        let chi = planar_cutoff(&sdf, &file.params, file.minimize.energy)?;
        let r = minimize_reduced(&init, &file.params, chi.as_ref(), &file.minimize, Some(&sdf))?;
        save_field2d(&c.out.join("field.bin"), &r.field)?;
        let len = interface_length(&r.field);
        (MinimizeReport { breakdown: r.breakdown, iterations: r.iterations, proj_grad: r.proj_grad, converged: r.converged, interface_length: len }, r.history)
    };
    let name = if layered { "minimize3d" } else { "minimize" };
    out.json(&format!("{name}.json"), &report)?;
    out.csv("history.csv", &["iteration", "energy"], history.iter().enumerate().map(|(i, &e)| HistoryRow { iteration: i, energy: e }))?;
    println!(
        "{name}: energy {:.10e}, {} iterations, projected gradient {:.3e}, converged {}",
        report.breakdown.total, report.iterations, report.proj_grad, report.converged
    );
    Ok(report.converged)
}

fn domain_grid(domain: &DomainSpec, h: f64) -> Result<(dpfilm::Grid2D, SignedDistanceField, Vec<bool>)> {
    let grid = domain.grid(h, 2.0 * h).smoothed();
    let sdf = signed_distance(domain, &grid)?;
    let mask = sdf.domain_mask();
    Ok((grid, sdf, mask))
}

#[derive(Serialize)]
struct SweepRow {
    lambda: f64,
    eps: f64,
    best_energy: f64,
    modulated: u8,
    interface_length: f64,
    iterations: usize,
    converged: u8,
}

pub fn sweep(c: &Common, eps: Option<String>, lambda: Option<String>, gamma: Option<f64>, radius: Option<f64>) -> Result<bool> {
    let eps = eps.as_deref().map(parse_number).transpose()?;
    let lambdas = lambda.as_deref().map(parse_range).transpose()?;
    let mut cfg = match &c.config {
        Some(p) => {
            let f: SweepFile = load(p)?;
            check_version(f.schema_version)?;
            f.sweep
        }
        None => SweepConfig::new(
            eps.context("--eps is required without --config")?,
            gamma.unwrap_or(20.0),
            lambdas.clone().context("--lambda is required without --config")?,
            DomainSpec::disc(radius.unwrap_or(1.0)),
        ),
    };
    if let Some(e) = eps {
        cfg.eps = e;
    }
    if let Some(l) = lambdas {
        cfg.lambdas = l;
    }
    if let Some(g) = gamma {
        cfg.gamma = g;
    }
    if let Some(r) = radius {
        cfg.domain = DomainSpec::disc(r);
    }
    check_padding(c.padding)?;
    if let Some(p) = c.padding {
        cfg.padding = p;
    }
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    let rec = sweep_lambda(&cfg)?;
    let out = Output { dir: &c.out };
    out.csv(
        "sweep.csv",
        &["lambda", "eps", "best_energy", "modulated", "interface_length", "iterations", "converged"],
        rec.points.iter().map(|p| SweepRow {
            lambda: p.lambda,
            eps: p.eps,
            best_energy: p.best_energy,
            modulated: p.modulated.into(),
            interface_length: p.interface_length,
            iterations: p.iterations,
            converged: p.converged.into(),
        }),
    )?;
    out.json("sweep.json", &rec)?;
    match rec.lambda_star {
        Some(l) => println!("eps = {}: lambda* = {l:.6} ({:.4} lambda_c)", cfg.eps, l / dpfilm::LAMBDA_C),
        None => println!("eps = {}: no uniform-to-modulated crossing on this grid", cfg.eps),
    }
    Ok(rec.points.iter().all(|p| p.converged))
}

#[derive(Serialize)]
struct SummaryRow<'a> {
    check: &'a str,
    cases: usize,
    worst_ratio: f64,
    tol: f64,
    pass: u8,
}

pub fn verify(c: &Common, suite: Option<String>, cases: Option<usize>) -> Result<bool> {
    let file: Option<VerifyFile> = c.config.as_deref().map(load).transpose()?;
    if let Some(f) = &file {
        check_version(f.schema_version)?;
    }
    let name = suite.or(file.as_ref().map(|f| f.suite.clone())).unwrap_or_else(|| "core".into());
    let mut vc = VerifyConfig::default();
    if let Some(n) = cases.or(file.as_ref().and_then(|f| f.cases)) {
        vc.cases = n;
    }
    if let Some(s) = c.seed.or(file.as_ref().and_then(|f| f.seed)) {
        vc.seed = s;
    }
    let reports = CheckRegistry::default().run(&name, &vc)?;
    let out = Output { dir: &c.out };
    out.json("verify.json", &reports)?;
    out.csv(
        "verify_summary.csv",
        &["check", "cases", "worst_ratio", "tol", "pass"],
        reports.iter().map(|r| SummaryRow { check: &r.name, cases: r.cases.len(), worst_ratio: r.worst_ratio, tol: r.tol, pass: r.pass.into() }),
    )?;
    for r in &reports {
        println!("{:<12} {} worst ratio {:.6} over {} cases", r.name, if r.pass { "pass" } else { "FAIL" }, r.worst_ratio, r.cases.len());
    }
    Ok(reports.iter().all(|r| r.pass))
}

#[derive(Serialize)]
struct GioiaRow {
    delta: f64,
    scaled_energy: f64,
    distance: f64,
    iterations: usize,
    converged: u8,
}

pub fn gioia(c: &Common) -> Result<bool> {
    let mut cfg = match &c.config {
        Some(p) => {
            let f: GioiaFile = load(p)?;
            check_version(f.schema_version)?;
            f.gioia
        }
        None => GioiaConfig::new(DomainSpec::disc(4.0), 1.0, vec![0.4, 0.2, 0.1, 0.05], 0.1),
    };
    check_padding(c.padding)?;
    if let Some(p) = c.padding {
        cfg.padding = p;
    }
    if let Some(s) = c.seed {
        cfg.init.seed = s;
    }
    let pts = gioia_sweep(&cfg)?;
    let out = Output { dir: &c.out };
    out.csv(
        "gioia.csv",
        &["delta", "scaled_energy", "distance", "iterations", "converged"],
        pts.iter().map(|p| GioiaRow {
            delta: p.delta,
            scaled_energy: p.scaled_energy,
            distance: p.distance,
            iterations: p.iterations,
            converged: p.converged.into(),
        }),
    )?;
    out.json("gioia.json", &pts)?;
    for p in &pts {
        println!("delta {:<8} distance {:.6} scaled energy {:.8}", p.delta, p.distance, p.scaled_energy);
    }
    Ok(pts.iter().all(|p| p.converged))
}
