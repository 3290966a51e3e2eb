//! The film energies: layered 3D, reduced 2D, local, ε-rescaled and
//! sharp-interface, with exact gradients of their discretizations.
//!
//! Dirichlet integrals are summed over grid edges whose two end nodes lie in
//! the domain. Edges leaving the domain are simply absent, which is the
//! natural (Neumann) boundary condition, and the gradient is the exact
//! adjoint of the discrete sum.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, CutoffField, DomainSpec, SignedDistanceField};
use crate::grid::{Boundary, Field2D, Field3D, Grid2D};
use crate::spectral::{default_padding, DipolarOp, HalfLaplacianOp};
use crate::{SIGMA0, SIGMA1};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Params {
    /// Film thickness.
    pub delta: f64,
    /// Dipolar strength.
    pub gamma: f64,
    /// Gradient correction; `1/π² + γ` when absent.
    #[serde(default)]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub lambda: Option<f64>,
    /// Width of the collar next to the boundary held at `+1` while minimizing.
    #[serde(default)]
    pub rho_pin: f64,
    /// Zero-padding factor of in-plane transforms (ignored on periodic cells).
    #[serde(default)]
    pub padding: Option<usize>,
    /// Applied field, entering as `−∫hφ`.
    #[serde(skip)]
    pub field: Option<Vec<f64>>,
}

impl Params {
    pub fn new(delta: f64, gamma: f64) -> Self {
        Self { delta, gamma, alpha: None, eps: None, lambda: None, rho_pin: 0.0, padding: None, field: None }
    }

    /// `δ_ε = λ/(γ|ln ε|)`.
    pub fn from_lambda(lambda: f64, eps: f64, gamma: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::InvalidParameter(format!("ε must lie in (0, 1), got {eps}")));
        }
        if !(gamma > 0.0) || !(lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!("need γ > 0 and λ ≥ 0, got γ = {gamma}, λ = {lambda}")));
        }
        let mut p = Self::new(lambda / (gamma * eps.ln().abs()), gamma);
        p.eps = Some(eps);
        p.lambda = Some(lambda);
        Ok(p)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha.unwrap_or(std::f64::consts::FRAC_1_PI * std::f64::consts::FRAC_1_PI + self.gamma)
    }

    pub fn padding_for(&self, boundary: Boundary) -> usize {
        match boundary {
            Boundary::Periodic => 1,
            Boundary::Open => self.padding.unwrap_or(default_padding(boundary)),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta >= 0.0) || !(self.gamma >= 0.0) {
            return Err(Error::InvalidParameter(format!("need δ ≥ 0 and γ ≥ 0, got {} and {}", self.delta, self.gamma)));
        }
        let ad2 = self.alpha() * self.delta * self.delta;
        if ad2 >= 1.0 {
            return Err(Error::InvalidParameter(format!("αδ² = {ad2:.4} must be below 1")));
        }
        if let (Some(l), Some(e)) = (self.lambda, self.eps) {
            let want = l / (self.gamma * e.ln().abs());
            if (want - self.delta).abs() > 1e-12 * want.max(1e-300) {
                return Err(Error::InvalidParameter(format!("δ = {} but λ/(γ|ln ε|) = {want}", self.delta)));
            }
        }
        if !(self.rho_pin >= 0.0) {
            return Err(Error::InvalidParameter("rho_pin must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub dirichlet: f64,
    pub double_well: f64,
    pub nonlocal: f64,
    pub field_term: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    fn from_parts(dirichlet: f64, double_well: f64, nonlocal: f64, field_term: f64) -> Self {
        Self { dirichlet, double_well, nonlocal, field_term, total: dirichlet + double_well + nonlocal + field_term }
    }
}

/// Edges of the node graph restricted to a mask: `(a, b, weight)` with the
/// weight `dx dy / spacing²` so that `Σ w (u_a − u_b)²` approximates `∫|∇u|²`.
#[derive(Debug, Clone)]
pub struct EdgeList {
    pub edges: Vec<(u32, u32, f64)>,
}

impl EdgeList {
    pub fn new(grid: &Grid2D, mask: &[bool], boundary: Boundary) -> Self {
        let wx = grid.dy / grid.dx;
        let wy = grid.dx / grid.dy;
        let periodic = boundary == Boundary::Periodic;
        let mut edges = Vec::new();
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let a = grid.idx(i, j);
                if !mask[a] {
                    continue;
                }
                let right = if i + 1 < grid.nx { Some(i + 1) } else if periodic && grid.nx > 2 { Some(0) } else { None };
                if let Some(ii) = right {
                    let b = grid.idx(ii, j);
                    if mask[b] {
                        edges.push((a as u32, b as u32, wx));
                    }
                }
                let up = if j + 1 < grid.ny { Some(j + 1) } else if periodic && grid.ny > 2 { Some(0) } else { None };
                if let Some(jj) = up {
                    let b = grid.idx(i, jj);
                    if mask[b] {
                        edges.push((a as u32, b as u32, wy));
                    }
                }
            }
        }
        Self { edges }
    }

    /// `Σ w (u_a − u_b)²`.
    pub fn dirichlet(&self, u: &[f64]) -> f64 {
        self.edges.iter().map(|&(a, b, w)| w * (u[a as usize] - u[b as usize]).powi(2)).sum()
    }

    /// Adds `scale · ∂/∂u Σ w (u_a − u_b)²` into `g`.
    pub fn add_gradient(&self, u: &[f64], scale: f64, g: &mut [f64]) {
        for &(a, b, w) in &self.edges {
            let d = 2.0 * scale * w * (u[a as usize] - u[b as usize]);
            g[a as usize] += d;
            g[b as usize] -= d;
        }
    }
}

/// Discrete `∫|∇u|²` over a field's mask.
pub fn dirichlet_integral(field: &Field2D) -> f64 {
    EdgeList::new(&field.grid, &field.mask, field.boundary).dirichlet(&field.values)
}

/// A differentiable energy of a flat vector of node values.
pub trait Objective: Sync {
    fn len(&self) -> usize;
    fn is_empty(&self) -> bool {
        self.len() == 0
    }
    /// Measure carried by every unknown (cell area or cell volume).
    fn cell_measure(&self) -> f64;
    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>);
    fn value(&self, x: &[f64]) -> f64 {
        self.value_and_gradient(x).0
    }
    fn breakdown(&self, x: &[f64]) -> EnergyBreakdown;
}

/// `∫ a/2 |∇u|² + b/4 (1 − u²)² − c ∫χu(−Δ)^{1/2}χu − ∫hu` on a planar grid.
/// The reduced, local and ε-rescaled energies are instances.
pub struct PlanarEnergy {
    pub grid: Grid2D,
    pub mask: Vec<bool>,
    pub boundary: Boundary,
    pub grad_coeff: f64,
    pub well_coeff: f64,
    pub nonlocal_coeff: f64,
    pub chi: Vec<f64>,
    pub field: Option<Vec<f64>>,
    edges: EdgeList,
    hl: Option<HalfLaplacianOp>,
}

impl PlanarEnergy {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        grid: Grid2D,
        mask: Vec<bool>,
        boundary: Boundary,
        grad_coeff: f64,
        well_coeff: f64,
        nonlocal_coeff: f64,
        chi: Option<&CutoffField>,
        padding: usize,
        field: Option<Vec<f64>>,
    ) -> Result<Self> {
        let chi = match chi {
            Some(c) => {
                grid.ensure_same(&c.grid, "cutoff")?;
                c.values.clone()
            }
            None => vec![1.0; grid.len()],
        };
        if let Some(h) = &field {
            if h.len() != grid.len() {
                return Err(Error::GridMismatch("applied field size differs from grid".into()));
            }
        }
        let hl = if nonlocal_coeff != 0.0 {
            let p = if boundary == Boundary::Periodic { 1 } else { padding };
            Some(HalfLaplacianOp::new(grid, p, boundary)?)
        } else {
            None
        };
        let edges = EdgeList::new(&grid, &mask, boundary);
        Ok(Self { grid, mask, boundary, grad_coeff, well_coeff, nonlocal_coeff, chi, field, edges, hl })
    }

    /// The reduced energy with its cutoff.
    pub fn reduced(grid: Grid2D, mask: Vec<bool>, boundary: Boundary, params: &Params, chi: Option<&CutoffField>) -> Result<Self> {
        params.validate()?;
        let a = 1.0 - params.alpha() * params.delta * params.delta;
        let c = params.gamma * params.delta / 4.0;
        Self::new(grid, mask, boundary, a, 1.0, c, chi, params.padding_for(boundary), params.field.clone())
    }

    /// The ε-rescaled reduced energy; `params` must carry `ε` and `λ`.
    pub fn rescaled(grid: Grid2D, mask: Vec<bool>, boundary: Boundary, params: &Params, chi: Option<&CutoffField>) -> Result<Self> {
        params.validate()?;
        let eps = params.eps.ok_or_else(|| Error::InvalidParameter("ε missing for the rescaled energy".into()))?;
        let a = eps * (1.0 - params.alpha() * params.delta * params.delta);
        let c = params.gamma * params.delta / 4.0;
        Self::new(grid, mask, boundary, a, 1.0 / eps, c, chi, params.padding_for(boundary), params.field.clone())
    }

    pub fn local(grid: Grid2D, mask: Vec<bool>, boundary: Boundary) -> Self {
        Self::new(grid, mask, boundary, 1.0, 1.0, 0.0, None, 1, None).expect("local energy has no fallible parts")
    }

    fn parts(&self, x: &[f64], grad: Option<&mut Vec<f64>>) -> EnergyBreakdown {
        let w = self.grid.cell_area();
        let dir = 0.5 * self.grad_coeff * self.edges.dirichlet(x);
        let mut well = 0.0;
        let mut fld = 0.0;
        for k in 0..x.len() {
            if self.mask[k] {
                let v = x[k];
                well += (1.0 - v * v).powi(2);
                if let Some(h) = &self.field {
                    fld -= h[k] * v;
                }
            }
        }
        well *= 0.25 * self.well_coeff * w;
        fld *= w;
        let mut nl = 0.0;
        let mut applied = None;
        if let Some(hl) = &self.hl {
            let u: Vec<f64> = (0..x.len()).map(|k| if self.mask[k] { self.chi[k] * x[k] } else { 0.0 }).collect();
            if grad.is_some() {
                let (e, a) = hl.form_and_apply(&u);
                nl = -self.nonlocal_coeff * e;
                applied = Some(a);
            } else {
                nl = -self.nonlocal_coeff * hl.form(&u);
            }
        }
        if let Some(g) = grad {
            g.clear();
            g.resize(x.len(), 0.0);
            self.edges.add_gradient(x, 0.5 * self.grad_coeff, g);
            for k in 0..x.len() {
                if !self.mask[k] {
                    g[k] = 0.0;
                    continue;
                }
                let v = x[k];
                g[k] += self.well_coeff * w * (v * v * v - v);
                if let Some(h) = &self.field {
                    g[k] -= h[k] * w;
                }
                if let Some(a) = &applied {
                    g[k] -= 2.0 * self.nonlocal_coeff * w * self.chi[k] * a[k];
                }
            }
        }
        EnergyBreakdown::from_parts(dir, well, nl, fld)
    }
}

impl Objective for PlanarEnergy {
    fn len(&self) -> usize {
        self.grid.len()
    }

    fn cell_measure(&self) -> f64 {
        self.grid.cell_area()
    }

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let mut g = Vec::new();
        let b = self.parts(x, Some(&mut g));
        (b.total, g)
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.parts(x, None).total
    }

    fn breakdown(&self, x: &[f64]) -> EnergyBreakdown {
        self.parts(x, None)
    }
}

/// Which field enters the dipolar term of the 3D energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DipolarInput {
    #[default]
    Raw,
    CutOff,
}

/// `∫ a/2|∇φ|² + b/4(1 − φ²)² + (γ/2)(E_d(φ) − ∫φ²) − ∫hφ` over a layered film.
pub struct LayeredEnergy {
    pub grid: Grid2D,
    pub mask: Vec<bool>,
    pub boundary: Boundary,
    pub nz: usize,
    pub thickness: f64,
    pub grad_coeff: f64,
    pub well_coeff: f64,
    pub gamma: f64,
    pub chi: Option<Vec<f64>>,
    pub field: Option<Vec<f64>>,
    edges: EdgeList,
    dip: DipolarOp,
}

impl LayeredEnergy {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        grid: Grid2D,
        mask: Vec<bool>,
        boundary: Boundary,
        nz: usize,
        thickness: f64,
        params: &Params,
        chi: Option<&CutoffField>,
    ) -> Result<Self> {
        if !(params.gamma >= 0.0) {
            return Err(Error::InvalidParameter("γ must be non-negative".into()));
        }
        let chi = match chi {
            Some(c) => {
                grid.ensure_same(&c.grid, "cutoff")?;
                Some(c.values.clone())
            }
            None => None,
        };
        let dip = DipolarOp::new(grid, nz, thickness, params.padding_for(boundary), boundary)?;
        let edges = EdgeList::new(&grid, &mask, boundary);
        Ok(Self {
            grid,
            mask,
            boundary,
            nz,
            thickness,
            grad_coeff: 1.0,
            well_coeff: 1.0,
            gamma: params.gamma,
            chi,
            field: params.field.clone(),
            edges,
            dip,
        })
    }

    pub fn for_stack(stack: &Field3D, params: &Params, chi: Option<&CutoffField>) -> Result<Self> {
        Self::new(stack.grid, stack.mask.clone(), stack.boundary, stack.nz(), stack.thickness, params, chi)
    }

    /// ε-rescaled coefficients: `ε` on the gradient, `1/ε` on the well.
    pub fn rescale(mut self, eps: f64) -> Self {
        self.grad_coeff = eps;
        self.well_coeff = 1.0 / eps;
        self
    }

    pub fn stack_of(&self, x: &[f64]) -> Field3D {
        let n = self.grid.len();
        Field3D {
            grid: self.grid,
            mask: self.mask.clone(),
            thickness: self.thickness,
            layers: (0..self.nz).map(|l| x[l * n..(l + 1) * n].to_vec()).collect(),
            boundary: self.boundary,
        }
    }

    pub fn flatten(stack: &Field3D) -> Vec<f64> {
        stack.layers.concat()
    }

    fn parts(&self, x: &[f64], want_grad: bool) -> (EnergyBreakdown, Vec<f64>) {
        let n = self.grid.len();
        let t = self.thickness / self.nz as f64;
        let area = self.grid.cell_area();
        let vol = area * t;
        let mut g = if want_grad { vec![0.0; x.len()] } else { Vec::new() };
        let mut dir = 0.0;
        let mut well = 0.0;
        let mut sq = 0.0;
        let mut fld = 0.0;
        for l in 0..self.nz {
            let u = &x[l * n..(l + 1) * n];
            // in-plane edges carry the layer thickness
            dir += 0.5 * self.grad_coeff * t * self.edges.dirichlet(u);
            if want_grad {
                self.edges.add_gradient(u, 0.5 * self.grad_coeff * t, &mut g[l * n..(l + 1) * n]);
            }
            for k in 0..n {
                if !self.mask[k] {
                    continue;
                }
                let v = u[k];
                well += (1.0 - v * v).powi(2);
                sq += v * v;
                if let Some(h) = &self.field {
                    fld -= h[k] * v;
                }
                if want_grad {
                    let gk = &mut g[l * n + k];
                    *gk += self.well_coeff * vol * (v * v * v - v) - self.gamma * vol * v;
                    if let Some(h) = &self.field {
                        *gk -= h[k] * vol;
                    }
                }
                if l + 1 < self.nz {
                    let d = x[(l + 1) * n + k] - v;
                    dir += 0.5 * self.grad_coeff * area / t * d * d;
                    if want_grad {
                        let s = self.grad_coeff * area / t * d;
                        g[l * n + k] -= s;
                        g[(l + 1) * n + k] += s;
                    }
                }
            }
        }
        well *= 0.25 * self.well_coeff * vol;
        fld *= vol;
        sq *= vol;
        let mut stack = self.stack_of(x);
        if let Some(c) = &self.chi {
            stack = stack.scaled_by(c);
        }
        let ed = if self.gamma == 0.0 {
            0.0
        } else if want_grad {
            let (e, gd) = self.dip.energy_and_gradient(&stack).expect("operator built for this grid");
            for l in 0..self.nz {
                for k in 0..n {
                    let w = self.chi.as_ref().map_or(1.0, |c| c[k]);
                    g[l * n + k] += 0.5 * self.gamma * w * gd[l][k];
                }
            }
            e
        } else {
            self.dip.energy(&stack).expect("operator built for this grid")
        };
        let nl = 0.5 * self.gamma * (ed - sq);
        if want_grad {
            for l in 0..self.nz {
                for k in 0..n {
                    if !self.mask[k] {
                        g[l * n + k] = 0.0;
                    }
                }
            }
        }
        (EnergyBreakdown::from_parts(dir, well, nl, fld), g)
    }
}

impl Objective for LayeredEnergy {
    fn len(&self) -> usize {
        self.grid.len() * self.nz
    }

    fn cell_measure(&self) -> f64 {
        self.grid.cell_area() * self.thickness / self.nz as f64
    }

    fn value_and_gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let (b, g) = self.parts(x, true);
        (b.total, g)
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.parts(x, false).0.total
    }

    fn breakdown(&self, x: &[f64]) -> EnergyBreakdown {
        self.parts(x, false).0
    }
}

pub fn z_average(stack: &Field3D) -> Field2D {
    let n = stack.grid.len();
    let mut values = vec![0.0; n];
    for l in &stack.layers {
        for (v, x) in values.iter_mut().zip(l) {
            *v += x;
        }
    }
    let s = 1.0 / stack.nz() as f64;
    for (v, &m) in values.iter_mut().zip(&stack.mask) {
        *v = if m { *v * s } else { 0.0 };
    }
    Field2D { grid: stack.grid, values, mask: stack.mask.clone(), boundary: stack.boundary }
}

/// Extends a field on `D` to `D + B_δ` by reflection through `∂D`: a node at
/// outward distance `s` takes the (bilinearly interpolated) value at inward
/// distance `s` along the normal. Interpolation uses only nodes of `D`,
/// renormalizing the bilinear weights.
pub fn extend_reflect(field: &Field2D, sdf: &SignedDistanceField, delta: f64) -> Result<Field2D> {
    field.grid.ensure_same(&sdf.grid, "signed distance")?;
    if let Some(rc) = sdf.spec.min_curvature_radius() {
        if delta >= rc {
            return Err(Error::InvalidParameter(format!(
                "δ = {delta} is not below the smallest boundary curvature radius {rc}"
            )));
        }
    }
    let g = field.grid;
    let inside: Vec<bool> = sdf.values.iter().zip(&field.mask).map(|(&r, &m)| r > 0.0 && m).collect();
    let mut out = Field2D::zeros(g, sdf.values.iter().map(|&r| r > -delta).collect());
    out.boundary = field.boundary;
    for k in 0..g.len() {
        let rho = sdf.values[k];
        if inside[k] {
            out.values[k] = field.values[k];
            continue;
        }
        if !out.mask[k] {
            continue;
        }
        let [x, y] = g.point(k);
        let gr = sdf.gradient(x, y);
        let gn = gr[0].hypot(gr[1]).max(1e-300);
        // ν = −∇ρ; the mirror point is r + 2ρν
        let (px, py) = (x - 2.0 * rho * gr[0] / gn, y - 2.0 * rho * gr[1] / gn);
        let (i, j) = g.ij(k);
        if sdf.eval(px, py) <= 0.0 {
            return Err(Error::ReflectionOutside { i, j });
        }
        out.values[k] = masked_bilinear(&g, &field.values, &inside, px, py).ok_or(Error::ReflectionOutside { i, j })?;
    }
    Ok(out)
}

fn masked_bilinear(g: &Grid2D, values: &[f64], mask: &[bool], x: f64, y: f64) -> Option<f64> {
    let fx = (x - g.origin[0]) / g.dx;
    let fy = (y - g.origin[1]) / g.dy;
    if fx < 0.0 || fy < 0.0 || fx > (g.nx - 1) as f64 || fy > (g.ny - 1) as f64 {
        return None;
    }
    let i = (fx.floor() as usize).min(g.nx - 2);
    let j = (fy.floor() as usize).min(g.ny - 2);
    let (tx, ty) = (fx - i as f64, fy - j as f64);
    let mut num = 0.0;
    let mut den = 0.0;
    for (a, b, w) in [
        (i, j, (1.0 - tx) * (1.0 - ty)),
        (i + 1, j, tx * (1.0 - ty)),
        (i, j + 1, (1.0 - tx) * ty),
        (i + 1, j + 1, tx * ty),
    ] {
        let k = g.idx(a, b);
        if mask[k] {
            num += w * values[k];
            den += w;
        }
    }
    if den > 1e-12 {
        Some(num / den)
    } else {
        None
    }
}

pub fn reduced_energy(field: &Field2D, params: &Params, chi: &CutoffField) -> Result<EnergyBreakdown> {
    field.check_finite()?;
    if params.delta > 0.0 && (chi.delta - params.delta).abs() > 1e-12 * params.delta && chi.delta != 0.0 {
        return Err(Error::GridMismatch(format!("cutoff built for δ = {}, params have δ = {}", chi.delta, params.delta)));
    }
    let e = PlanarEnergy::reduced(field.grid, field.mask.clone(), field.boundary, params, Some(chi))?;
    Ok(e.breakdown(&field.values))
}

pub fn gradient_reduced(field: &Field2D, params: &Params, chi: &CutoffField) -> Result<Field2D> {
    field.check_finite()?;
    let e = PlanarEnergy::reduced(field.grid, field.mask.clone(), field.boundary, params, Some(chi))?;
    Ok(field.like(e.value_and_gradient(&field.values).1))
}

pub fn local_energy_e0(field: &Field2D) -> f64 {
    PlanarEnergy::local(field.grid, field.mask.clone(), field.boundary).value(&field.values)
}

/// The ε-rescaled reduced energy with `δ_ε = λ/(γ|ln ε|)`; `chi` is built at
/// thickness `ε δ_ε`.
pub fn rescaled_energy_eps(field: &Field2D, params: &Params, chi: &CutoffField) -> Result<EnergyBreakdown> {
    field.check_finite()?;
    let e = PlanarEnergy::rescaled(field.grid, field.mask.clone(), field.boundary, params, Some(chi))?;
    Ok(e.breakdown(&field.values))
}

/// Length of the `{u = 0}` contour of a sign field, nodes outside the mask
/// counted as `+1`.
pub fn interface_length(field: &Field2D) -> f64 {
    let v: Vec<f64> = field.values.iter().zip(&field.mask).map(|(&v, &m)| if m && v < 0.0 { -1.0 } else { 1.0 }).collect();
    geometry::contour_length(&field.grid, &v, 0.0)
}

/// `−(σ1λ/4)|∂D| + (σ0 − σ1λ)·(length of the interface)`.
pub fn sharp_interface_estar(indicator: &Field2D, lambda: f64, spec: &DomainSpec) -> Result<f64> {
    for (k, (&v, &m)) in indicator.values.iter().zip(&indicator.mask).enumerate() {
        if m && v != 1.0 && v != -1.0 {
            let (i, j) = indicator.grid.ij(k);
            return Err(Error::NonBinary { i, j, value: v });
        }
    }
    let perimeter = geometry::measures(spec)?.perimeter;
    Ok(-0.25 * SIGMA1 * lambda * perimeter + (SIGMA0 - SIGMA1 * lambda) * interface_length(indicator))
}

/// The layered 3D energy; with `chi` the dipolar term sees `χφ`.
pub fn full_energy_3d(stack: &Field3D, params: &Params, chi: Option<&CutoffField>) -> Result<EnergyBreakdown> {
    stack.check_finite()?;
    let e = LayeredEnergy::for_stack(stack, params, chi)?;
    Ok(e.breakdown(&LayeredEnergy::flatten(stack)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{cutoff_chi, signed_distance};

    fn disc_setup(h: f64) -> (SignedDistanceField, Field2D) {
        let d = DomainSpec::disc(1.0);
        let g = d.grid(h, 0.3);
        let sdf = signed_distance(&d, &g).unwrap();
        let f = Field2D::zeros(g, sdf.domain_mask());
        (sdf, f)
    }

    #[test]
    fn zero_field_reduced_energy_is_quarter_area() {
        let (sdf, f) = disc_setup(0.05);
        let p = Params::new(0.1, 1.0);
        let chi = cutoff_chi(&sdf, 0.1).unwrap();
        let e = reduced_energy(&f, &p, &chi).unwrap();
        assert!((e.total - 0.25 * f.area()).abs() < 1e-12);
        let one = f.with_constant(1.0);
        let p0 = Params::new(0.0, 0.0);
        assert!(reduced_energy(&one, &p0, &CutoffField::ones(f.grid)).unwrap().total.abs() < 1e-14);
        let e1 = reduced_energy(&one, &p, &chi).unwrap();
        assert!(e1.nonlocal < 0.0 && (e1.total - e1.nonlocal).abs() < 1e-14);
    }

    #[test]
    fn reflection_on_disc() {
        let (sdf, f) = disc_setup(0.02);
        let f = Field2D::from_fn(f.grid, f.mask.clone(), |x, y| x.hypot(y).powi(2));
        let ext = extend_reflect(&f, &sdf, 0.2).unwrap();
        for k in 0..f.grid.len() {
            let r = -sdf.values[k];
            if r > 0.0 && r < 0.2 {
                let want = (1.0 - r).powi(2);
                // first order in h: the stencil is renormalized onto nodes of D
                assert!((ext.values[k] - want).abs() < 2.0 * 0.02 * 2.0, "{} vs {want}", ext.values[k]);
            }
        }
        let c = extend_reflect(&f.with_constant(0.7), &sdf, 0.2).unwrap();
        assert!(c.values.iter().zip(&c.mask).all(|(v, &m)| !m || (v - 0.7).abs() < 1e-14));
        assert!(extend_reflect(&f, &sdf, 1.0).is_err());
    }

    #[test]
    fn estar_values() {
        let spec = DomainSpec::rectangle(1.0, 1.0, 0.01);
        let g = Grid2D::covering(-0.5, 0.5, -0.5, 0.5, 0.01);
        let ind = Field2D::from_fn(g, vec![true; g.len()], |x, _| if x > 0.0 { 1.0 } else { -1.0 });
        let per = geometry::measures(&spec).unwrap().perimeter;
        let len = interface_length(&ind);
        let e = sharp_interface_estar(&ind, 1.0, &spec).unwrap();
        assert!((e - (-SIGMA1 * per / 4.0 + (SIGMA0 - SIGMA1) * len)).abs() < 1e-12);
        let lc = crate::LAMBDA_C;
        let e = sharp_interface_estar(&ind, lc, &spec).unwrap();
        assert!((e + SIGMA1 * lc * per / 4.0).abs() < 1e-12);
        let mut bad = ind.clone();
        bad.values[3] = 0.5;
        assert!(matches!(sharp_interface_estar(&bad, 1.0, &spec), Err(Error::NonBinary { .. })));
    }

    #[test]
    fn layered_uniform_periodic_is_zero() {
        let g = Grid2D::centered(8, 1.0);
        let f = Field2D::periodic(g).with_constant(1.0);
        let s = Field3D::replicate(&f, 0.2, 2).unwrap();
        let e = full_energy_3d(&s, &Params::new(0.2, 1.5), None).unwrap();
        assert!(e.total.abs() < 1e-12, "{e:?}");
        let z = Field3D::replicate(&f.with_constant(0.0), 0.2, 2).unwrap();
        let e = full_energy_3d(&z, &Params::new(0.2, 1.5), None).unwrap();
        assert!((e.total - 0.25 * 4.0 * 0.2).abs() < 1e-12);
    }

    #[test]
    fn alpha_default_and_validation() {
        let p = Params::new(0.1, 2.0);
        assert!((p.alpha() - (1.0 / (std::f64::consts::PI.powi(2)) + 2.0)).abs() < 1e-15);
        assert!(Params::new(1.0, 2.0).validate().is_err());
        let q = Params::from_lambda(3.0, 0.0625, 10.0).unwrap();
        assert!((q.delta - 3.0 / (10.0 * 16f64.ln())).abs() < 1e-15);
        q.validate().unwrap();
    }

    fn fd_check(obj: &dyn Objective, x: &[f64], seed: u64) -> f64 {
        let mut rng = crate::rng::SplitMix64::new(seed);
        let v: Vec<f64> = (0..x.len()).map(|_| rng.uniform(-1.0, 1.0)).collect();
        let g = obj.value_and_gradient(x).1;
        let t = 1e-5;
        let xp: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a + t * b).collect();
        let xm: Vec<f64> = x.iter().zip(&v).map(|(a, b)| a - t * b).collect();
        let fd = (obj.value(&xp) - obj.value(&xm)) / (2.0 * t);
        let an: f64 = g.iter().zip(&v).map(|(a, b)| a * b).sum();
        (fd - an).abs() / an.abs().max(1e-12)
    }

    #[test]
    fn layered_gradient_matches_differences() {
        let (sdf, f) = disc_setup(0.1);
        let mut rng = crate::rng::SplitMix64::new(3);
        let layers: Vec<Vec<f64>> = (0..3).map(|_| (0..f.grid.len()).map(|_| rng.uniform(-1.0, 1.0)).collect()).collect();
        let s = Field3D::from_layers(f.grid, f.mask.clone(), 0.2, layers).unwrap();
        let chi = cutoff_chi(&sdf, 0.2).unwrap();
        for c in [None, Some(&chi)] {
            let e = LayeredEnergy::for_stack(&s, &Params::new(0.2, 1.3), c).unwrap();
            let r = fd_check(&e, &LayeredEnergy::flatten(&s), 9);
            assert!(r < 1e-6, "{r}");
        }
    }

    #[test]
    fn planar_gradient_matches_differences() {
        let (sdf, f) = disc_setup(0.05);
        let mut rng = crate::rng::SplitMix64::new(4);
        let x: Vec<f64> = f.mask.iter().map(|&m| if m { rng.uniform(-1.0, 1.0) } else { 0.0 }).collect();
        let chi = cutoff_chi(&sdf, 0.1).unwrap();
        let e = PlanarEnergy::reduced(f.grid, f.mask.clone(), Boundary::Open, &Params::new(0.1, 2.0), Some(&chi)).unwrap();
        let r = fd_check(&e, &x, 5);
        assert!(r < 1e-6, "{r}");
    }
}
