//! The fixed-domain thin-film limit: minimize the layered energy for a
//! decreasing sequence of thicknesses and watch the z-average approach a
//! single well.

use serde::{Deserialize, Serialize};

use super::{minimize_3d, InitRegistry, InitSpec, MinimizeConfig};
use crate::energy::{z_average, Params};
use crate::error::{Error, Result};
use crate::geometry::{signed_distance, DomainSpec};
use crate::grid::Field3D;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GioiaConfig {
    pub domain: DomainSpec,
    pub gamma: f64,
    pub deltas: Vec<f64>,
    pub spacing: f64,
    #[serde(default = "two")]
    pub nz: usize,
    #[serde(default = "two")]
    pub padding: usize,
    #[serde(default)]
    pub init: InitSpec,
    #[serde(default = "iters")]
    pub max_iters: usize,
    #[serde(default = "tol")]
    pub grad_tol: f64,
    /// Off by default: the limit concerns unconstrained minimizers, and with
    /// the box on the uniform state is already stationary.
    #[serde(default)]
    pub box_constraint: bool,
}

fn two() -> usize {
    2
}
fn iters() -> usize {
    2000
}
fn tol() -> f64 {
    1e-6
}

impl GioiaConfig {
    pub fn new(domain: DomainSpec, gamma: f64, deltas: Vec<f64>, spacing: f64) -> Self {
        Self {
            domain,
            gamma,
            deltas,
            spacing,
            nz: 2,
            padding: 2,
            init: InitSpec::uniform(1.0),
            max_iters: iters(),
            grad_tol: tol(),
            box_constraint: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GioiaPoint {
    pub delta: f64,
    /// `δ⁻¹` times the layered energy at the minimizer.
    pub scaled_energy: f64,
    /// `‖|φ̄| − 1‖_{L²(D)}`.
    pub distance: f64,
    pub iterations: usize,
    pub proj_grad: f64,
    pub converged: bool,
}

/// One minimization per thickness, each from the configured initial field,
/// in the order given.
pub fn gioia_sweep(cfg: &GioiaConfig) -> Result<Vec<GioiaPoint>> {
    if cfg.deltas.is_empty() || cfg.deltas.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::InvalidParameter("thicknesses must be positive".into()));
    }
    let grid = cfg.domain.grid(cfg.spacing, 2.0 * cfg.spacing).smoothed();
    let sdf = signed_distance(&cfg.domain, &grid)?;
    let mask = sdf.domain_mask();
    let x0 = InitRegistry::default().build(&grid, &mask, &cfg.init)?;
    let mcfg = MinimizeConfig { max_iters: cfg.max_iters, grad_tol: cfg.grad_tol, record_history: false, box_constraint: cfg.box_constraint, ..Default::default() };
    cfg.deltas
        .iter()
        .map(|&delta| {
            let mut p = Params::new(delta, cfg.gamma);
            p.padding = Some(cfg.padding);
            p.validate()?;
            let init = Field3D::from_layers(grid, mask.clone(), delta, vec![x0.clone(); cfg.nz])?;
            let r = minimize_3d(&init, &p, None, &mcfg, Some(&sdf))?;
            let avg = z_average(&r.stack);
            Ok(GioiaPoint {
                delta,
                scaled_energy: r.breakdown.total / delta,
                distance: avg.integrate(|v| (v.abs() - 1.0).powi(2)).sqrt(),
                iterations: r.iterations,
                proj_grad: r.proj_grad,
                converged: r.converged,
            })
        })
        .collect()
}
