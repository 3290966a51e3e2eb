use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::families::{random_stack, with_envelope, Family};
use super::{CheckCase, CheckReport, VerifyConfig};
use crate::energy::{dirichlet_integral, full_energy_3d, reduced_energy, Params};
use crate::error::{Error, Result};
use crate::geometry::{cutoff_chi, measures, signed_distance, CutoffField, DomainSpec, SignedDistanceField};
use crate::grid::{Boundary, Field2D, Field3D, Grid2D};
use crate::rng::SplitMix64;
use crate::spectral::{dipolar_decomposition, dipolar_energy, slab_symbol, HalfLaplacianOp};

/// Slack allowed by default on top of the inequalities themselves.
pub const DEFAULT_TOL: f64 = 1e-3;

/// A disc of `radius` sampled at spacing `h`, with its distance field.
struct Disc {
    spec: DomainSpec,
    sdf: SignedDistanceField,
}

impl Disc {
    fn new(radius: f64, h: f64) -> Result<Self> {
        let spec = DomainSpec::disc(radius);
        let grid = spec.grid(h, 3.0 * h);
        let sdf = signed_distance(&spec, &grid)?;
        Ok(Self { spec, sdf })
    }

    fn grid(&self) -> Grid2D {
        self.sdf.grid
    }

    fn mask(&self) -> Vec<bool> {
        self.sdf.domain_mask()
    }

    fn perimeter(&self) -> Result<f64> {
        Ok(measures(&self.spec)?.perimeter)
    }
}

/// `∫_Ω |∇φ|²` of a layered stack: in-plane edges per layer times the layer
/// thickness, plus layer-to-layer differences.
pub fn dirichlet_3d(stack: &Field3D) -> f64 {
    let t = stack.layer_thickness();
    let mut s = 0.0;
    for l in &stack.layers {
        let f = Field2D { grid: stack.grid, values: l.clone(), mask: stack.mask.clone(), boundary: stack.boundary };
        s += t * dirichlet_integral(&f);
    }
    let a = stack.grid.cell_area();
    for w in stack.layers.windows(2) {
        s += w[0].iter().zip(&w[1]).zip(&stack.mask).filter(|(_, &m)| m).map(|((x, y), _)| (y - x).powi(2)).sum::<f64>() * a / t;
    }
    s
}

// ---------------------------------------------------------------- positivity

/// `0 ≤ E_d ≤ ∫φ²` per stack. Upper cases compare `E_d` with `∫φ²`; lower
/// cases compare `max(−E_d, 0)` with the allowed slack `tol·∫φ²`.
pub fn check_positivity(stacks: &[(String, Field3D)], padding: usize, tol: f64) -> Result<CheckReport> {
    let pairs: Vec<(f64, f64)> = stacks
        .par_iter()
        .map(|(_, s)| Ok((dipolar_energy(s, padding)?, s.l2_norm_sq())))
        .collect::<Result<_>>()?;
    let mut cases = Vec::with_capacity(2 * stacks.len());
    for ((label, _), (ed, l2)) in stacks.iter().zip(&pairs) {
        cases.push(CheckCase::new(format!("upper {label}"), *ed, *l2));
        cases.push(CheckCase::new(format!("lower {label}"), (-ed).max(0.0), tol * l2));
    }
    let mut r = CheckReport::new("positivity", tol, cases);
    // a lower case with ratio ≤ 1 is already within the slack
    let lower_ok = r.cases.iter().filter(|c| c.label.starts_with("lower")).all(|c| c.ratio <= 1.0);
    r = r.require("lower_bound_ok", lower_ok);
    Ok(r)
}

pub fn positivity_suite(cfg: &VerifyConfig) -> Result<CheckReport> {
    let tol = 1e-10;
    let stacks: Vec<(String, Field3D)> = (0..cfg.cases as u64)
        .map(|i| {
            let seed = cfg.seed.wrapping_add(i);
            let mut rng = SplitMix64::new(seed);
            let n = [16, 24, 32][(i % 3) as usize];
            let nz = 1 + (i % 4) as usize;
            let thickness = rng.uniform(0.05, 1.0);
            let grid = Grid2D::centered(n, 1.0);
            let mask: Vec<bool> = if i % 2 == 0 {
                (0..grid.len()).map(|k| grid.point(k)[0].hypot(grid.point(k)[1]) < 0.9).collect()
            } else {
                vec![true; grid.len()]
            };
            let base = families(seed, 1.0)[(i % 5) as usize].clone();
            let stack = random_stack(grid, mask, thickness, nz, seed, &base, 0.5);
            (format!("{} n={n} nz={nz} thickness={thickness:.4} seed={seed}", base.label()), stack)
        })
        .collect();
    let mut r = check_positivity(&stacks, 2, tol)?;

    // a uniform periodic film saturates the upper bound
    let g = Grid2D::centered(16, 1.0);
    let one = Field2D::periodic(g).with_constant(1.0);
    let s = Field3D::replicate(&one, 0.3, 2)?;
    let sat = dipolar_energy(&s, 1)? / s.l2_norm_sq();
    r = r.with("uniform_periodic_ratio", sat).require("uniform_saturates", sat >= 1.0 - tol);

    // an in-plane mode of a z-independent film has E_d/∫φ² = f_δ(k)/δ
    let n = 32;
    let g = Grid2D::centered(n, 1.0);
    let k = 2.0 * PI * 4.0 / 2.0;
    let mut f = Field2D::periodic(g);
    for (idx, v) in f.values.iter_mut().enumerate() {
        *v = (k * g.point(idx)[0]).cos();
    }
    let delta = 2.0;
    let s = Field3D::replicate(&f, delta, 1)?;
    let got = dipolar_energy(&s, 1)? / s.l2_norm_sq();
    let want = slab_symbol(k, delta) / delta;
    Ok(r.with("oscillation_ratio", got)
        .with("oscillation_closed_form", want)
        .require("oscillation_matches", (got - want).abs() <= 1e-10 * want))
}

/// The planar families used by the random checks, scaled to a domain of
/// size `scale`.
pub fn families(seed: u64, scale: f64) -> Vec<Family> {
    let mut rng = SplitMix64::new(seed ^ 0xfa11);
    let a = 2.0 * PI * rng.next_f64();
    let k = 2.0 * PI / scale * rng.uniform(1.0, 4.0);
    vec![
        Family::Uniform { value: rng.uniform(-1.0, 1.0) },
        Family::SingleMode { k: [k * a.cos(), k * a.sin()], phase: 2.0 * PI * rng.next_f64() },
        Family::TanhStripes { period: scale * rng.uniform(0.3, 1.0), width: scale * rng.uniform(0.03, 0.1) },
        Family::BandLimited { kmax: 2.0 * PI / scale * 6.0, seed },
        Family::Rough { seed },
    ]
}

// ----------------------------------------------------------------------- ded

/// `|E_d(χφ) − ∫χ²φ² + (δ²/2)∫χφ̄(−Δ)^{1/2}χφ̄| ≤ (δ²/2)∫|∇(χφ)|²` per stack,
/// `δ` the stack thickness.
pub fn check_ded(stacks: &[(String, Field3D, CutoffField)], padding: usize, tol: f64) -> Result<CheckReport> {
    let cases: Vec<CheckCase> = stacks
        .par_iter()
        .map(|(label, s, chi)| {
            let cs = s.scaled_by(&chi.values);
            let d = dipolar_decomposition(&cs, padding)?;
            let rhs = 0.5 * s.thickness * s.thickness * dirichlet_3d(&cs);
            Ok(CheckCase::new(label.clone(), d.remainder.abs(), rhs))
        })
        .collect::<Result<_>>()?;
    Ok(CheckReport::new("ded", tol, cases))
}

pub fn ded_suite(cfg: &VerifyConfig) -> Result<CheckReport> {
    let mut stacks = Vec::new();
    for (di, &delta) in [0.1f64, 0.2, 0.4].iter().enumerate() {
        let h = (0.5 * delta).min(1.0 / 16.0);
        let disc = Disc::new(1.0, h)?;
        let chi = cutoff_chi(&disc.sdf, delta)?;
        for (fi, fam) in families(cfg.seed.wrapping_add(di as u64), 1.0).iter().enumerate() {
            let f = fam.field(disc.grid(), disc.mask());
            let nz = 1 + fi % 3;
            stacks.push((format!("z-independent {} delta={delta} h={h} nz={nz}", fam.label()), Field3D::replicate(&f, delta, nz)?, chi.clone()));
        }
        for i in 0..cfg.cases.div_ceil(3) as u64 {
            let seed = cfg.seed.wrapping_add(1000 * (di as u64 + 1) + i);
            let base = families(seed, 1.0)[(i % 5) as usize].clone();
            let s = random_stack(disc.grid(), disc.mask(), delta, 3, seed, &base, 0.5);
            stacks.push((format!("layered {} delta={delta} h={h} nz=3 seed={seed}", base.label()), s, chi.clone()));
        }
    }
    let r = check_ded(&stacks, 2, 1e-6)?;
    let zi = r.cases.iter().filter(|c| c.label.starts_with("z-independent")).map(|c| c.ratio).fold(0.0, f64::max);
    Ok(r.with("worst_z_independent", zi).require("z_independent_within_third", zi <= 1.0 / 3.0 + 1e-3))
}

// ---------------------------------------------------------------------- edge

/// Both edge bounds for stacks on a domain with thickness `δ`: the rough one
/// `3‖φ‖_{L²(Ω)}‖φ‖_{L²(Ω∖Ω_{2δ})}` and the refined `98|∂D|δ²‖φ‖²_∞`.
pub fn check_edge(stacks: &[(String, Field3D)], sdf: &SignedDistanceField, perimeter: f64, padding: usize, tol: f64) -> Result<CheckReport> {
    let rows: Vec<[CheckCase; 2]> = stacks
        .par_iter()
        .map(|(label, s)| {
            let delta = s.thickness;
            let chi = cutoff_chi(sdf, delta)?;
            let lhs = (dipolar_energy(s, padding)? - dipolar_energy(&s.scaled_by(&chi.values), padding)?).abs();
            let band: Vec<f64> = sdf.values.iter().map(|&r| if r <= 2.0 * delta { 1.0 } else { 0.0 }).collect();
            let rough = 3.0 * s.l2_norm_sq().sqrt() * s.scaled_by(&band).l2_norm_sq().sqrt();
            let refined = 98.0 * perimeter * delta * delta * s.max_abs().powi(2);
            Ok([CheckCase::new(format!("rough {label}"), lhs, rough), CheckCase::new(format!("refined {label}"), lhs, refined)])
        })
        .collect::<Result<_>>()?;
    Ok(CheckReport::new("edge", tol, rows.into_iter().flatten().collect()))
}

pub fn edge_suite(cfg: &VerifyConfig) -> Result<CheckReport> {
    let mut all = Vec::new();
    let mut uniform_refined: f64 = 0.0;
    for &delta in &[0.05, 0.1, 0.2] {
        let h = 0.5 * delta;
        let disc = Disc::new(1.0, h)?;
        let (grid, mask) = (disc.grid(), disc.mask());
        let mut stacks = Vec::new();
        let one = Family::Uniform { value: 1.0 }.field(grid, mask.clone());
        stacks.push((format!("uniform(1) delta={delta}"), Field3D::replicate(&one, delta, 2)?));
        let mut bump = Family::SingleMode { k: [3.0, 2.0], phase: 0.3 }.field(grid, mask.clone());
        with_envelope(&mut bump, 1.0 - 2.0 * delta - h, 0.3);
        stacks.push((format!("inner bump delta={delta}"), Field3D::replicate(&bump, delta, 2)?));
        for i in 0..(cfg.cases / 10).max(2) as u64 {
            let seed = cfg.seed.wrapping_add(i);
            let base = families(seed, 1.0)[(i % 5) as usize].clone();
            stacks.push((format!("{} delta={delta} nz=2 seed={seed}", base.label()), random_stack(grid, mask.clone(), delta, 2, seed, &base, 0.3)));
        }
        let r = check_edge(&stacks, &disc.sdf, disc.perimeter()?, 2, DEFAULT_TOL)?;
        uniform_refined = uniform_refined.max(r.cases[1].ratio);
        all.extend(r.cases);
    }
    Ok(CheckReport::new("edge", DEFAULT_TOL, all).with("uniform_refined_ratio", uniform_refined))
}

// -------------------------------------------------------------------- interp

/// `F(s, t) = (s − t)²/(s − s³/3 − t + t³/3)`, in the cancelled form
/// `3(s − t)/(3 − s² − st − t²)`, zero on the diagonal.
pub fn f_interp(s: f64, t: f64) -> f64 {
    if s == t {
        0.0
    } else {
        3.0 * (s - t) / (3.0 - s * s - s * t - t * t)
    }
}

/// `‖∇g(φ)‖_{L¹}` with the gradient averaged over each cell's two edges per
/// axis. The field is constant beyond the grid.
fn gradient_l1(f: &Field2D, g: impl Fn(f64) -> f64) -> f64 {
    let grid = f.grid;
    let v: Vec<f64> = f.values.iter().map(|&x| g(x)).collect();
    let at = |i: usize, j: usize| v[grid.idx(i, j)];
    let mut s = 0.0;
    for j in 0..grid.ny - 1 {
        for i in 0..grid.nx - 1 {
            let gx = 0.5 * (at(i + 1, j) - at(i, j) + at(i + 1, j + 1) - at(i, j + 1)) / grid.dx;
            let gy = 0.5 * (at(i, j + 1) - at(i, j) + at(i + 1, j + 1) - at(i + 1, j)) / grid.dy;
            s += gx.hypot(gy);
        }
    }
    s * grid.cell_area()
}

/// Terms of the interpolation bound for one field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpTerms {
    /// `(1/4π)∬(φ(r) − φ(r′))²/|r − r′|³`.
    pub lhs: f64,
    /// `‖∇(φ − φ³/3)‖_{L¹}`.
    pub tv: f64,
    /// `‖∇φ‖²_{L²}`.
    pub dirichlet: f64,
}

/// `pinned` fields equal 1 off their domain; their left side is taken of
/// `φ − 1`, which is compactly supported.
pub fn interp_terms(field: &Field2D, pinned: bool, padding: usize) -> Result<InterpTerms> {
    let max = field.max_abs();
    if max > 1.0 + 1e-12 {
        return Err(Error::Hypothesis(format!("sup norm {max} exceeds 1")));
    }
    let u: Vec<f64> = field.values.iter().map(|&v| if pinned { v - 1.0 } else { v }).collect();
    let lhs = HalfLaplacianOp::new(field.grid, padding, Boundary::Open)?.form(&u);
    Ok(InterpTerms { lhs, tv: gradient_l1(field, |x| x - x * x * x / 3.0), dirichlet: dirichlet_integral(field) })
}

/// `r` values `0.01·(R/0.01)^{i/n}`, `i = 0..n`, all below `R`.
pub fn r_grid(radius: f64, n: usize) -> Vec<f64> {
    let lo: f64 = 0.01;
    (0..n).map(|i| lo * (radius / lo).powf(i as f64 / n as f64)).collect()
}

/// The bound with `πR` (`4πR` when pinned), at every `r` of the grid.
pub fn check_interp(fields: &[(String, Field2D, f64, bool)], n_r: usize, padding: usize, tol: f64) -> Result<CheckReport> {
    let terms: Vec<InterpTerms> = fields.par_iter().map(|(_, f, _, pinned)| interp_terms(f, *pinned, padding)).collect::<Result<_>>()?;
    let mut cases = Vec::new();
    for ((label, _, radius, pinned), t) in fields.iter().zip(&terms) {
        let c = if *pinned { 4.0 * PI * radius } else { PI * radius };
        for r in r_grid(*radius, n_r) {
            let rhs = 3.0 / PI * (radius / r).ln() * t.tv + r * t.dirichlet + c;
            cases.push(CheckCase::new(format!("{label} R={radius} r={r:.4}"), t.lhs, rhs));
        }
    }
    Ok(CheckReport::new("interp", tol, cases))
}

/// Largest `|F|` over the `n × n` lattice on `[−1, 1]²` and where it occurs.
pub fn f_lattice_max(n: usize) -> (f64, f64, f64) {
    let pts: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
    pts.par_iter()
        .map(|&s| pts.iter().map(|&t| (f_interp(s, t).abs(), s, t)).fold((0.0, 0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a }))
        .reduce(|| (0.0, 0.0, 0.0), |a, b| if b.0 > a.0 { b } else { a })
}

/// Growth of the left side for a `±1` disc pattern as its step is sharpened.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpSummary {
    pub widths: Vec<f64>,
    pub lhs: Vec<f64>,
    /// Least-squares slope of the left side against `ln(1/width)`.
    pub slope: f64,
    /// `(3/π)‖∇(φ − φ³/3)‖_{L¹}` at the sharpest step.
    pub target: f64,
    /// `(3/π)·perimeter`.
    pub perimeter_value: f64,
}

impl InterpSummary {
    pub fn relative_error(&self) -> f64 {
        (self.slope - self.target).abs() / self.target
    }
}

/// `φ = 1 − 2s`, `s` the indicator of a disc smoothed over `±width`; the
/// field is 1 off the disc, so the pinned form of the left side applies.
pub fn mollified_disc_slope(radius: f64, h: f64, widths: &[f64]) -> Result<InterpSummary> {
    let half = radius + widths.iter().cloned().fold(0.0, f64::max) + 0.25 * radius;
    let n = crate::grid::next_smooth((2.0 * half / h).ceil() as usize);
    let grid = Grid2D::centered(n, half);
    let mask = vec![true; grid.len()];
    let rows: Vec<(f64, f64)> = widths
        .par_iter()
        .map(|&w| {
            let f = Family::MollifiedDisc { radius, width: w }.field(grid, mask.clone());
            let t = interp_terms(&f, true, 2)?;
            Ok((t.lhs, t.tv))
        })
        .collect::<Result<_>>()?;
    let xs: Vec<f64> = widths.iter().map(|w| (1.0 / w).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sharpest = widths.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap_or(0);
    Ok(InterpSummary {
        widths: widths.to_vec(),
        lhs: ys,
        slope: sxy / sxx,
        target: 3.0 / PI * rows[sharpest].1,
        perimeter_value: 3.0 / PI * 2.0 * PI * radius,
    })
}

pub fn interp_suite(cfg: &VerifyConfig) -> Result<CheckReport> {
    let radius = 4.0;
    let mut fields = Vec::new();
    for &n in &[96, 128, 192] {
        let grid = Grid2D::centered(n, radius);
        let mask = vec![true; grid.len()];
        let h = grid.dx;
        let mut fams = families(cfg.seed.wrapping_add(n as u64), radius);
        fams.push(Family::TanhStripes { period: 2.0, width: 0.25 });
        fams.push(Family::Uniform { value: 0.0 });
        for fam in fams {
            let mut f = fam.field(grid, mask.clone());
            with_envelope(&mut f, radius - h, 0.5);
            fields.push((format!("{} n={n}", fam.label()), f, radius, false));
        }
        // equal to 1 off the disc of radius 2
        let p = Family::MollifiedDisc { radius: 1.0, width: 0.2 }.field(grid, mask.clone());
        fields.push((format!("pinned {} n={n}", "mollified_disc(R=1,w=0.2)"), p, 2.0, true));
    }
    let r = check_interp(&fields, 20, 2, DEFAULT_TOL)?;
    let (fmax, s, t) = f_lattice_max(2001);
    let corner = f_interp(-1.0, 1.0);
    Ok(r.with("max_abs_f", fmax)
        .with("argmax_s", s)
        .with("argmax_t", t)
        .with("f_corner", corner)
        .require("f_bounded", fmax <= 3.0 && corner == -3.0))
}

// ------------------------------------------------------------------ sandwich

/// The two normalized defects of the sandwich for a z-independent film and
/// the empirical constant they imply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SandwichPoint {
    pub family: String,
    pub gamma: f64,
    pub delta: f64,
    /// `ℰ(φ)`.
    pub energy_3d: f64,
    /// `E(φ̄)·δ`.
    pub reduced_times_delta: f64,
    pub d_low: f64,
    pub beta_up: f64,
    /// `max(d_low, β_up, 0)`.
    pub beta: f64,
}

/// Sandwich defects on a disc of `radius`, spacing `δ/4`, one layer.
pub fn sandwich_point(family: &Family, radius: f64, gamma: f64, delta: f64) -> Result<SandwichPoint> {
    let h = 0.25 * delta;
    let disc = Disc::new(radius, h)?;
    let params = Params::new(delta, gamma);
    params.validate()?;
    let alpha = params.alpha();
    if 2.0 * alpha * delta * delta >= 1.0 {
        return Err(Error::InvalidParameter(format!("2αδ² = {} must stay below 1", 2.0 * alpha * delta * delta)));
    }
    let chi = cutoff_chi(&disc.sdf, delta)?;
    let phi = family.field(disc.grid(), disc.mask());
    let e2 = reduced_energy(&phi, &params, &chi)?.total * delta;
    let stack = Field3D::replicate(&phi, delta, 1)?;
    let e3 = full_energy_3d(&stack, &params, None)?.total;
    let m = phi.max_abs();
    let perim = disc.perimeter()?;
    // ‖∇φ̄‖² over the band D∖D_δ, edges with an end in the band
    let band: Vec<bool> = disc.sdf.values.iter().map(|&r| r > 0.0 && r <= delta).collect();
    let g = phi.grid;
    let mut edge = 0.0;
    for j in 0..g.ny {
        for i in 0..g.nx {
            let k = g.idx(i, j);
            for (ok, k2) in [(i + 1 < g.nx, k + 1), (j + 1 < g.ny, k + g.nx)] {
                if ok && phi.mask[k] && phi.mask[k2] && (band[k] || band[k2]) {
                    edge += (phi.values[k2] - phi.values[k]).powi(2);
                }
            }
        }
    }
    let d_low = if m == 0.0 { 0.0 } else { (e2 - e3) / (gamma * delta * delta * m * m * perim) };
    let beta_up = (e3 - e2 / (1.0 - 2.0 * alpha * delta * delta))
        / (delta * delta * (1.0 + gamma * gamma) * (1.0 + m.powi(4)) * perim + delta * edge);
    Ok(SandwichPoint {
        family: family.label(),
        gamma,
        delta,
        energy_3d: e3,
        reduced_times_delta: e2,
        d_low,
        beta_up,
        beta: d_low.max(beta_up).max(0.0),
    })
}

/// For each family and `γ`, the fitted constant along the decreasing `δ`
/// sequence; each case compares a value with its predecessor, so the report
/// passes when the fit never grows.
pub fn check_sandwich(fams: &[Family], gammas: &[f64], deltas: &[f64], radius: f64, tol: f64) -> Result<(CheckReport, Vec<SandwichPoint>)> {
    let jobs: Vec<(usize, f64, f64)> =
        (0..fams.len()).flat_map(|f| gammas.iter().flat_map(move |&g| deltas.iter().map(move |&d| (f, g, d)))).collect();
    let points: Vec<SandwichPoint> = jobs.par_iter().map(|&(f, g, d)| sandwich_point(&fams[f], radius, g, d)).collect::<Result<_>>()?;
    let mut cases = Vec::new();
    for w in points.windows(2) {
        if w[0].family == w[1].family && w[0].gamma == w[1].gamma {
            cases.push(CheckCase::new(
                format!("{} gamma={} delta {} -> {}", w[1].family, w[1].gamma, w[0].delta, w[1].delta),
                w[1].beta,
                w[0].beta,
            ));
        }
    }
    let fitted = points.iter().map(|p| p.beta).fold(0.0, f64::max);
    Ok((CheckReport::new("sandwich", tol, cases).with("fitted_beta", fitted), points))
}

pub fn sandwich_suite(_cfg: &VerifyConfig) -> Result<CheckReport> {
    let fams = [Family::Uniform { value: 1.0 }, Family::TanhStripes { period: 1.0, width: 0.1 }];
    Ok(check_sandwich(&fams, &[0.5, 1.0, 2.0], &[0.2, 0.1, 0.05], 1.0, DEFAULT_TOL)?.0)
}

// ---------------------------------------------------------------- coercivity

/// The lower bound on `E(φ̄)` for small `δ`, rearranged so both sides are
/// nonnegative: `⅛‖∇φ̄‖² + ¼‖φ̄‖⁴_4 + ¼|D|` against `E(φ̄) + ½(1 + γ²δ²/4)‖φ̄‖²
/// + γ|∂D|^{1/4}δ^{1/4}‖φ̄‖_2‖φ̄‖_4`.
pub fn check_coercivity(fields: &[(String, Field2D)], params: &Params, chi: &CutoffField, perimeter: f64, tol: f64) -> Result<CheckReport> {
    let (d, g) = (params.delta, params.gamma);
    let cases: Vec<CheckCase> = fields
        .par_iter()
        .map(|(label, f)| {
            let e = reduced_energy(f, params, chi)?.total;
            let l2 = f.l2_norm();
            let l4 = f.lp_norm(4.0);
            let lhs = 0.125 * dirichlet_integral(f) + 0.25 * l4.powi(4) + 0.25 * f.area();
            let rhs = e + 0.5 * (1.0 + g * g * d * d / 4.0) * l2 * l2 + g * perimeter.powf(0.25) * d.powf(0.25) * l2 * l4;
            Ok(CheckCase::new(format!("{label} delta={d} gamma={g}"), lhs, rhs))
        })
        .collect::<Result<_>>()?;
    Ok(CheckReport::new("coercivity", tol, cases))
}

pub fn coercivity_suite(cfg: &VerifyConfig) -> Result<CheckReport> {
    let spec = DomainSpec::disc(1.0);
    let delta = 0.1 * spec.min_feature();
    let disc = Disc::new(1.0, 0.25 * delta)?;
    let chi = cutoff_chi(&disc.sdf, delta)?;
    let mut all = Vec::new();
    for &gamma in &[0.5, 1.0, 2.0] {
        let params = Params::new(delta, gamma);
        let mut fields = vec![
            ("uniform(0)".to_string(), Family::Uniform { value: 0.0 }.field(disc.grid(), disc.mask())),
            ("uniform(1)".to_string(), Family::Uniform { value: 1.0 }.field(disc.grid(), disc.mask())),
        ];
        for i in 0..(cfg.cases / 3).max(1) as u64 {
            let seed = cfg.seed.wrapping_add(i);
            let fam = families(seed, 1.0)[(i % 5) as usize].clone();
            fields.push((format!("{} seed={seed}", fam.label()), fam.field(disc.grid(), disc.mask())));
        }
        all.extend(check_coercivity(&fields, &params, &chi, disc.perimeter()?, DEFAULT_TOL)?.cases);
    }
    Ok(CheckReport::new("coercivity", DEFAULT_TOL, all))
}
