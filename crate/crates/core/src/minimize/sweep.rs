//! Multistart minimization of the ε-rescaled energy over a grid of λ, with
//! bisection for the uniform-to-modulated crossing.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{descend, Constraints, InitRegistry, InitSpec};
use crate::energy::{interface_length, Objective, Params, PlanarEnergy};
use crate::error::{Error, Result};
use crate::geometry::{cutoff_chi, signed_distance, DomainSpec};
use crate::grid::{Boundary, Field2D};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub eps: f64,
    pub gamma: f64,
    pub lambdas: Vec<f64>,
    pub domain: DomainSpec,
    /// Grid spacing; `ε/2` when absent.
    #[serde(default)]
    pub spacing: Option<f64>,
    /// Pinned collar width; `2ε` when absent.
    #[serde(default)]
    pub rho_pin: Option<f64>,
    #[serde(default = "two")]
    pub padding: usize,
    #[serde(default = "iters")]
    pub max_iters: usize,
    #[serde(default = "tol")]
    pub grad_tol: f64,
    /// Initial fields tried at every λ; the standard starts when empty.
    #[serde(default)]
    pub inits: Vec<InitSpec>,
    #[serde(default = "bisect")]
    pub bisection_steps: usize,
    #[serde(default)]
    pub seed: u64,
}

fn two() -> usize {
    2
}
fn iters() -> usize {
    3000
}
fn tol() -> f64 {
    1e-5
}
fn bisect() -> usize {
    4
}

impl SweepConfig {
    pub fn new(eps: f64, gamma: f64, lambdas: Vec<f64>, domain: DomainSpec) -> Self {
        Self {
            eps,
            gamma,
            lambdas,
            domain,
            spacing: None,
            rho_pin: None,
            padding: 2,
            max_iters: iters(),
            grad_tol: tol(),
            inits: Vec::new(),
            bisection_steps: bisect(),
            seed: 0,
        }
    }

    pub fn spacing(&self) -> f64 {
        self.spacing.unwrap_or(0.5 * self.eps)
    }

    pub fn rho_pin(&self) -> f64 {
        self.rho_pin.unwrap_or(2.0 * self.eps)
    }

    /// The configured initial fields, or uniform, stripes, checkerboard,
    /// random and bubble ones scaled to the domain.
    pub fn init_specs(&self) -> Vec<InitSpec> {
        if !self.inits.is_empty() {
            return self.inits.clone();
        }
        let [x0, x1, y0, y1] = self.domain.bounding_box();
        let size = (x1 - x0).min(y1 - y0);
        vec![
            InitSpec::uniform(1.0),
            InitSpec::stripes(0.5 * size, 0.0),
            InitSpec::checkerboard(0.5 * size),
            InitSpec::random(self.seed, 0.5),
            InitSpec::bubble(0.5 * size),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() {
            return Err(Error::InvalidParameter("empty λ grid".into()));
        }
        if self.lambdas.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter("λ grid must be strictly increasing".into()));
        }
        for &l in &self.lambdas {
            Params::from_lambda(l, self.eps, self.gamma)?.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub lambda: f64,
    pub eps: f64,
    pub best_energy: f64,
    pub uniform_energy: f64,
    pub modulated: bool,
    pub interface_length: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub best_init: String,
    /// Energies reached from every initial field, in `init_specs` order.
    pub energies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub points: Vec<SweepPoint>,
    /// Bisected crossing, `None` when no uniform-then-modulated pair exists.
    pub lambda_star: Option<f64>,
    pub bracket: Option<(f64, f64)>,
}

/// Energies within this margin are a tie, resolved as uniform.
pub const TIE: f64 = 1e-10;

/// Multistart run at one λ.
pub fn sweep_point(cfg: &SweepConfig, lambda: f64) -> Result<SweepPoint> {
    let (point, _) = sweep_point_with_field(cfg, lambda)?;
    Ok(point)
}

pub fn sweep_point_with_field(cfg: &SweepConfig, lambda: f64) -> Result<(SweepPoint, Field2D)> {
    let eps = cfg.eps;
    let params = Params::from_lambda(lambda, eps, cfg.gamma)?;
    params.validate()?;
    let h = cfg.spacing();
    let rho_pin = cfg.rho_pin();
    let margin = 2.0 * h;
    let grid = cfg.domain.grid(h, margin).smoothed();
    let sdf = signed_distance(&cfg.domain, &grid)?;
    let mask = sdf.domain_mask();
    let cut = eps * params.delta;
    let chi = if cut > 0.0 { Some(cutoff_chi(&sdf, cut)?) } else { None };
    let mut p = params.clone();
    p.padding = Some(cfg.padding);
    let obj = PlanarEnergy::rescaled(grid, mask.clone(), Boundary::Open, &p, chi.as_ref())?;
    let pinned: Vec<bool> = sdf.values.iter().map(|&r| r > 0.0 && r <= rho_pin).collect();
    let cons = Constraints { free: mask.clone(), pinned, box_constraint: true };
    let reg = InitRegistry::default();
    let specs = cfg.init_specs();
    let runs: Vec<_> = specs
        .iter()
        .map(|s| -> Result<_> {
            let x0 = reg.build(&grid, &mask, s)?;
            Ok(descend(&obj, &x0, &cons, cfg.max_iters, cfg.grad_tol, false))
        })
        .collect::<Result<_>>()?;
    let uniform: Vec<f64> = mask.iter().map(|&m| if m { 1.0 } else { 0.0 }).collect();
    let uniform_energy = obj.value(&uniform);
    let field_of = |x: &[f64]| Field2D { grid, values: x.to_vec(), mask: mask.clone(), boundary: Boundary::Open };
    let mut best: Option<(usize, f64, f64)> = None;
    for (i, r) in runs.iter().enumerate() {
        let len = interface_length(&field_of(&r.x));
        let modulated = len > h;
        let e = r.energy;
        let better = match best {
            None => true,
            Some((_, be, blen)) => {
                let b_mod = blen > h;
                if (e - be).abs() <= TIE * (1.0 + be.abs()) {
                    // ties go to the uniform state
                    b_mod && !modulated
                } else {
                    e < be
                }
            }
        };
        if better {
            best = Some((i, e, len));
        }
    }
    let (bi, mut be, mut blen) = best.expect("at least one initial field");
    let mut best_x = runs[bi].x.clone();
    let mut best_name = specs[bi].name.clone();
    // the constrained uniform state competes even if no run ended there
    if uniform_energy <= be + TIE * (1.0 + be.abs()) && blen > h {
        be = uniform_energy;
        blen = 0.0;
        best_x = uniform.clone();
        best_name = "uniform".into();
    }
    let point = SweepPoint {
        lambda,
        eps,
        best_energy: be,
        uniform_energy,
        modulated: blen > h,
        interface_length: blen,
        iterations: runs.iter().map(|r| r.iterations).sum(),
        evaluations: runs.iter().map(|r| r.evaluations).sum(),
        converged: runs.iter().all(|r| r.converged),
        best_init: best_name,
        energies: runs.iter().map(|r| r.energy).collect(),
    };
    Ok((point, field_of(&best_x)))
}

/// Runs every λ of the grid (concurrently, up to the rayon pool size), then
/// bisects between the last uniform and the first modulated point.
pub fn sweep_lambda(cfg: &SweepConfig) -> Result<SweepRecord> {
    cfg.validate()?;
    let mut points: Vec<SweepPoint> =
        cfg.lambdas.par_iter().map(|&l| sweep_point(cfg, l)).collect::<Result<Vec<_>>>()?;
    let mut bracket = None;
    if let Some(i) = points.iter().position(|p| p.modulated) {
        if i > 0 && points[..i].iter().all(|p| !p.modulated) {
            bracket = Some((points[i - 1].lambda, points[i].lambda));
        }
    }
    if let Some((mut lo, mut hi)) = bracket {
        for _ in 0..cfg.bisection_steps {
            let mid = 0.5 * (lo + hi);
            let p = sweep_point(cfg, mid)?;
            if p.modulated {
                hi = mid;
            } else {
                lo = mid;
            }
            points.push(p);
        }
        bracket = Some((lo, hi));
    }
    points.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(SweepRecord { points, lambda_star: bracket.map(|(a, b)| 0.5 * (a + b)), bracket })
}
