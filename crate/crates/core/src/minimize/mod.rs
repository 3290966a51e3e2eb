//! Projected Barzilai–Borwein descent with Armijo backtracking, the stripe
//! ansatz and the λ sweep.

pub mod gioia;
pub mod init;
pub mod stripe;
pub mod sweep;

use serde::{Deserialize, Serialize};

use crate::energy::{EnergyBreakdown, LayeredEnergy, Objective, Params, PlanarEnergy};
use crate::error::{Error, Result};
use crate::geometry::{CutoffField, SignedDistanceField};
use crate::grid::{Field2D, Field3D};

pub use init::{InitRegistry, InitSpec, InitStrategy};

/// Which planar functional `minimize_reduced` descends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EnergyKind {
    #[default]
    Reduced,
    Rescaled,
    Local,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeConfig {
    #[serde(default = "default_iters")]
    pub max_iters: usize,
    /// Sup-norm of the projected gradient (per unit measure) at which to stop.
    #[serde(default = "default_tol")]
    pub grad_tol: f64,
    #[serde(default = "yes")]
    pub box_constraint: bool,
    #[serde(default)]
    pub pin_collar: bool,
    #[serde(default)]
    pub init: InitSpec,
    #[serde(default)]
    pub energy: EnergyKind,
    #[serde(default = "yes")]
    pub record_history: bool,
}

fn default_iters() -> usize {
    5000
}
fn default_tol() -> f64 {
    1e-8
}
fn yes() -> bool {
    true
}

impl Default for MinimizeConfig {
    fn default() -> Self {
        Self {
            max_iters: default_iters(),
            grad_tol: default_tol(),
            box_constraint: true,
            pin_collar: false,
            init: InitSpec::default(),
            energy: EnergyKind::Reduced,
            record_history: true,
        }
    }
}

impl MinimizeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 || !(self.grad_tol > 0.0) {
            return Err(Error::InvalidParameter("need max_iters >= 1 and grad_tol > 0".into()));
        }
        Ok(())
    }
}

/// Which unknowns move and where they are projected.
#[derive(Debug, Clone)]
pub struct Constraints {
    /// Unknowns that are optimized; the others keep their initial value.
    pub free: Vec<bool>,
    /// Unknowns held at `+1`.
    pub pinned: Vec<bool>,
    pub box_constraint: bool,
}

impl Constraints {
    pub fn project(&self, x: &mut [f64]) {
        for k in 0..x.len() {
            if self.pinned[k] {
                x[k] = 1.0;
            } else if self.free[k] && self.box_constraint {
                x[k] = x[k].clamp(-1.0, 1.0);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct RawResult {
    pub x: Vec<f64>,
    pub energy: f64,
    pub iterations: usize,
    pub proj_grad: f64,
    pub converged: bool,
    pub history: Vec<f64>,
    /// Energy evaluations, gradient evaluations included.
    pub evaluations: usize,
}

/// Relative energy resolution assumed by the line search.
const ROUNDOFF: f64 = 1e-13;
const ARMIJO_C: f64 = 1e-4;
const MAX_HALVINGS: usize = 60;

fn proj_grad_norm(x: &[f64], g: &[f64], w: f64, c: &Constraints) -> f64 {
    let mut m = 0.0f64;
    for k in 0..x.len() {
        if !c.free[k] || c.pinned[k] {
            continue;
        }
        let mut y = x[k] - g[k] / w;
        if c.box_constraint {
            y = y.clamp(-1.0, 1.0);
        }
        m = m.max((x[k] - y).abs());
    }
    m
}

/// Minimizes `obj` from `x0`. The step direction is the gradient divided by
/// the cell measure, so step lengths and `grad_tol` are resolution
/// independent.
pub fn descend(obj: &dyn Objective, x0: &[f64], c: &Constraints, max_iters: usize, grad_tol: f64, record: bool) -> RawResult {
    let w = obj.cell_measure();
    let mut x = x0.to_vec();
    c.project(&mut x);
    let (mut f, mut g) = obj.value_and_gradient(&x);
    let mut history = if record { vec![f] } else { Vec::new() };
    let mut pg = proj_grad_norm(&x, &g, w, c);
    let gmax = (0..x.len()).filter(|&k| c.free[k] && !c.pinned[k]).map(|k| (g[k] / w).abs()).fold(0.0, f64::max);
    let mut alpha = if gmax > 0.0 { (0.1 / gmax).min(1.0) } else { 1.0 };
    let mut iterations = 0;
    let mut converged = pg <= grad_tol;
    let mut xt = vec![0.0; x.len()];
    let mut evaluations = 1;
    while !converged && iterations < max_iters {
        iterations += 1;
        // projected trial point and direction
        let mut d = vec![0.0; x.len()];
        for k in 0..x.len() {
            if c.free[k] && !c.pinned[k] {
                let mut y = x[k] - alpha * g[k] / w;
                if c.box_constraint {
                    y = y.clamp(-1.0, 1.0);
                }
                d[k] = y - x[k];
            }
        }
        let slope: f64 = g.iter().zip(&d).map(|(a, b)| a * b).sum();
        if slope >= 0.0 {
            converged = pg <= grad_tol;
            break;
        }
        // the full step usually passes, so it is evaluated with its gradient
        let mut t = 1.0;
        let mut accepted = None;
        for h in 0..=MAX_HALVINGS {
            for k in 0..x.len() {
                xt[k] = x[k] + t * d[k];
            }
            c.project(&mut xt);
            let (ft, gt) = if h == 0 { obj.value_and_gradient(&xt) } else { (obj.value(&xt), Vec::new()) };
            evaluations += 1;
            // below roundoff the sufficient-decrease test is noise; plain
            // non-increase is the most that can be asked
            let unresolved = -ARMIJO_C * t * slope <= ROUNDOFF * f.abs().max(1.0);
            if ft <= f + ARMIJO_C * t * slope || (unresolved && ft <= f) {
                accepted = Some((ft, gt));
                break;
            }
            t *= 0.5;
        }
        let Some((fnew, mut gnew)) = accepted else {
            break;
        };
        if gnew.is_empty() {
            gnew = obj.value_and_gradient(&xt).1;
            evaluations += 1;
        }
        let mut ss = 0.0;
        let mut sy = 0.0;
        for k in 0..x.len() {
            let s = xt[k] - x[k];
            ss += s * s;
            sy += s * (gnew[k] - g[k]) / w;
        }
        // without positive curvature, grow from the step actually taken
        alpha = if sy > 0.0 { (ss / sy).clamp(1e-12, 1e12) } else { (4.0 * t * alpha).clamp(1e-12, 1e12) };
        let moved = ss > 0.0;
        std::mem::swap(&mut x, &mut xt);
        f = fnew;
        g = gnew;
        if record {
            history.push(f);
        }
        pg = proj_grad_norm(&x, &g, w, c);
        converged = pg <= grad_tol;
        if !moved {
            break;
        }
    }
    RawResult { x, energy: f, iterations, proj_grad: pg, converged, history, evaluations }
}

#[derive(Debug, Clone)]
pub struct MinimizeResult {
    pub field: Field2D,
    pub breakdown: EnergyBreakdown,
    pub iterations: usize,
    pub proj_grad: f64,
    pub converged: bool,
    pub history: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct MinimizeResult3D {
    pub stack: Field3D,
    pub breakdown: EnergyBreakdown,
    pub iterations: usize,
    pub proj_grad: f64,
    pub converged: bool,
    pub history: Vec<f64>,
}

/// Nodes of the collar `0 < ρ ≤ ρ_pin`.
pub fn collar(sdf: &SignedDistanceField, rho_pin: f64) -> Vec<bool> {
    sdf.values.iter().map(|&r| r > 0.0 && r <= rho_pin).collect()
}

fn constraints_2d(init: &Field2D, params: &Params, cfg: &MinimizeConfig, sdf: Option<&SignedDistanceField>) -> Result<Constraints> {
    let pinned = if cfg.pin_collar {
        let sdf = sdf.ok_or_else(|| Error::InvalidParameter("pinning the collar needs the signed distance".into()))?;
        init.grid.ensure_same(&sdf.grid, "signed distance")?;
        collar(sdf, params.rho_pin).iter().zip(&init.mask).map(|(&a, &m)| a && m).collect()
    } else {
        vec![false; init.grid.len()]
    };
    Ok(Constraints { free: init.mask.clone(), pinned, box_constraint: cfg.box_constraint })
}

fn check_admissible(x: &[f64], c: &Constraints) -> Result<()> {
    for k in 0..x.len() {
        if c.free[k] && c.box_constraint && x[k].abs() > 1.0 + 1e-12 {
            return Err(Error::Hypothesis(format!("initial value {} violates the box constraint at node {k}", x[k])));
        }
    }
    Ok(())
}

pub fn planar_objective(init: &Field2D, params: &Params, chi: Option<&CutoffField>, kind: EnergyKind) -> Result<PlanarEnergy> {
    match kind {
        EnergyKind::Reduced => PlanarEnergy::reduced(init.grid, init.mask.clone(), init.boundary, params, chi),
        EnergyKind::Rescaled => PlanarEnergy::rescaled(init.grid, init.mask.clone(), init.boundary, params, chi),
        EnergyKind::Local => Ok(PlanarEnergy::local(init.grid, init.mask.clone(), init.boundary)),
    }
}

/// Discrete local minimizer of the planar energy selected by `cfg.energy`,
/// starting from `init` (the pinned collar is overwritten with `1`).
pub fn minimize_reduced(
    init: &Field2D,
    params: &Params,
    chi: Option<&CutoffField>,
    cfg: &MinimizeConfig,
    sdf: Option<&SignedDistanceField>,
) -> Result<MinimizeResult> {
    cfg.validate()?;
    init.check_finite()?;
    let obj = planar_objective(init, params, chi, cfg.energy)?;
    let c = constraints_2d(init, params, cfg, sdf)?;
    check_admissible(&init.values, &c)?;
    Ok(run_planar(&obj, init, &c, cfg))
}

pub fn run_planar(obj: &PlanarEnergy, init: &Field2D, c: &Constraints, cfg: &MinimizeConfig) -> MinimizeResult {
    let r = descend(obj, &init.values, c, cfg.max_iters, cfg.grad_tol, cfg.record_history);
    let breakdown = obj.breakdown(&r.x);
    MinimizeResult {
        field: init.like(r.x),
        breakdown,
        iterations: r.iterations,
        proj_grad: r.proj_grad,
        converged: r.converged,
        history: r.history,
    }
}

/// Discrete local minimizer of the layered energy. Constraints apply per
/// layer; the collar is pinned through the whole thickness.
pub fn minimize_3d(
    init: &Field3D,
    params: &Params,
    chi: Option<&CutoffField>,
    cfg: &MinimizeConfig,
    sdf: Option<&SignedDistanceField>,
) -> Result<MinimizeResult3D> {
    cfg.validate()?;
    init.check_finite()?;
    let obj = LayeredEnergy::for_stack(init, params, chi)?;
    let pin2d = if cfg.pin_collar {
        let sdf = sdf.ok_or_else(|| Error::InvalidParameter("pinning the collar needs the signed distance".into()))?;
        collar(sdf, params.rho_pin)
    } else {
        vec![false; init.grid.len()]
    };
    let nz = init.nz();
    let c = Constraints {
        free: (0..nz).flat_map(|_| init.mask.iter().copied()).collect(),
        pinned: (0..nz).flat_map(|_| pin2d.iter().zip(&init.mask).map(|(&a, &m)| a && m)).collect(),
        box_constraint: cfg.box_constraint,
    };
    let x0 = LayeredEnergy::flatten(init);
    check_admissible(&x0, &c)?;
    let r = descend(&obj, &x0, &c, cfg.max_iters, cfg.grad_tol, cfg.record_history);
    let breakdown = obj.breakdown(&r.x);
    Ok(MinimizeResult3D {
        stack: obj.stack_of(&r.x),
        breakdown,
        iterations: r.iterations,
        proj_grad: r.proj_grad,
        converged: r.converged,
        history: r.history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid2D;

    #[test]
    fn single_node_goes_to_sign() {
        let g = Grid2D::centered(1, 0.5);
        for v in [0.3, -0.2] {
            let f = Field2D::from_fn(g, vec![true], |_, _| v);
            let cfg = MinimizeConfig { energy: EnergyKind::Local, box_constraint: false, ..Default::default() };
            let r = minimize_reduced(&f, &Params::new(0.0, 0.0), None, &cfg, None).unwrap();
            assert!(r.converged);
            assert!((r.field.values[0] - v.signum()).abs() < 1e-8);
        }
    }

    #[test]
    fn relaxes_to_a_well() {
        let g = Grid2D::centered(16, 1.0);
        let init = InitRegistry::default().build(&g, &vec![true; 256], &InitSpec::random(11, 0.1)).unwrap();
        let f = Field2D { grid: g, values: init, mask: vec![true; 256], boundary: crate::Boundary::Periodic };
        let cfg = MinimizeConfig { box_constraint: false, ..Default::default() };
        let r = minimize_reduced(&f, &Params::new(0.0, 0.0), None, &cfg, None).unwrap();
        assert!(r.converged, "{} {}", r.iterations, r.proj_grad);
        assert!(r.breakdown.total < 1e-10, "{:?}", r.breakdown);
        assert!(r.history.windows(2).all(|w| w[1] <= w[0]));
    }
}
